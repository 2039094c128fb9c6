#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "uiwd/core.hpp"

namespace uiwd {

enum class ShockKind : std::uint8_t { IncomeLoss, PriceJump, HealthEvent, Layoff };

std::string_view shock_kind_name(ShockKind kind) noexcept;
ShockKind parse_shock_kind(std::string_view text);

/// An exogenous event hitting one period.
///
/// `target` is a factor for price jumps; an empty target means wealth.
/// `magnitude` is relative: -0.5 halves, +1.0 doubles.
struct Shock {
    ShockKind kind = ShockKind::IncomeLoss;
    std::optional<FactorId> target;
    double magnitude = 0.0;
    std::int64_t period = 1;

    bool operator==(const Shock&) const = default;
};

/// Empty string when the shock is well-formed, otherwise the broken invariant.
std::string shock_violation(const Shock& shock);

/// Applies `shock` to a state whose period_index equals shock.period.
///
/// income_loss and layoff scale period wealth by (1 + magnitude); price_jump
/// scales the target factor's price; health_event scales all three wealth
/// figures and adds |magnitude| to regret memory. Raising period wealth above
/// investable (or total) lifts those figures to keep the wealth ordering.
AgentState apply_shock(const AgentState& state, const Shock& shock);

} // namespace uiwd
