"""Regenerates configs/eis_demo.json.

Four 24-period regimes alternate between consumption-price noise and
investment-return noise as the driver of the gross rate, so per-fold slopes
of consumption growth on the log gross rate disagree.
"""

import json
import math
import random
import sys

PERIODS = 96
REGIME = 24


def main(path: str) -> None:
    rng = random.Random(20240611)
    returns, prices = [], []
    price = 1.0
    for t in range(PERIODS):
        regime = t // REGIME
        if regime % 2 == 0:
            price *= math.exp(rng.gauss(0.0, 0.04))
            ret = 0.02 + rng.gauss(0.0, 0.005)
        else:
            ret = 0.02 + rng.gauss(0.0, 0.08)
        prices.append(round(price, 6))
        returns.append(round(ret, 6))
    config = {
        "agents": 8,
        "periods": PERIODS,
        "seed": 11,
        "threads": 2,
        "policy": {"persistence": 0.8, "curvature": 3.0, "regret_weight": 0.5},
        "prices": {
            "c": {"kind": "series", "values": prices},
            "t": 1.0, "i": 1.0, "l": 1.0, "b": 1.0, "h": 1.0,
        },
        "wealth": {
            "distribution": "lognormal", "mu": 7.0, "sigma": 0.5,
            "investable_share": 0.8, "period_share": 0.1,
            "credit_investment": True, "investment_return": returns,
        },
        "eis": {"folds": 4},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "configs/eis_demo.json")
