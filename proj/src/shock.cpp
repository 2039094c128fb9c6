#include "uiwd/shock.hpp"

#include <algorithm>
#include <cmath>

#include "uiwd/errors.hpp"

namespace uiwd {

std::string_view shock_kind_name(ShockKind kind) noexcept {
    switch (kind) {
    case ShockKind::IncomeLoss: return "income_loss";
    case ShockKind::PriceJump: return "price_jump";
    case ShockKind::HealthEvent: return "health_event";
    case ShockKind::Layoff: return "layoff";
    }
    return "unknown";
}

ShockKind parse_shock_kind(std::string_view text) {
    for (ShockKind k : {ShockKind::IncomeLoss, ShockKind::PriceJump, ShockKind::HealthEvent,
                        ShockKind::Layoff}) {
        if (text == shock_kind_name(k)) {
            return k;
        }
    }
    throw PreconditionError("unknown shock kind '" + std::string(text) + "'");
}

std::string shock_violation(const Shock& shock) {
    if (!(shock.magnitude > -1.0) || !std::isfinite(shock.magnitude)) {
        return "magnitude > -1";
    }
    if (shock.period < 0) {
        return "period ≥ 0";
    }
    if (shock.kind == ShockKind::PriceJump && !shock.target) {
        return "price_jump needs a factor target";
    }
    return {};
}

AgentState apply_shock(const AgentState& state, const Shock& shock) {
    if (shock.period != state.period_index) {
        throw PreconditionError("shock for period " + std::to_string(shock.period) +
                                " applied to period " + std::to_string(state.period_index));
    }
    if (auto bad = shock_violation(shock); !bad.empty()) {
        throw PreconditionError("invalid shock: " + bad);
    }
    AgentState out = state;
    const double scale = 1.0 + shock.magnitude;
    switch (shock.kind) {
    case ShockKind::IncomeLoss:
    case ShockKind::Layoff:
        out.wealth.period *= scale;
        break;
    case ShockKind::PriceJump:
        out.prices[*shock.target] *= scale;
        break;
    case ShockKind::HealthEvent:
        out.wealth.total *= scale;
        out.wealth.investable *= scale;
        out.wealth.period *= scale;
        out.regret_memory += std::abs(shock.magnitude);
        break;
    }
    out.wealth.investable = std::max(out.wealth.investable, out.wealth.period);
    out.wealth.total = std::max(out.wealth.total, out.wealth.investable);
    // A rescaled allocation no longer matches the shocked budget.
    if (shock.magnitude != 0.0) {
        out.budget_closed = false;
    }
    return out;
}

} // namespace uiwd
