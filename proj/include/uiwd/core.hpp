#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace uiwd {

// Symbol glossary. Each factor has a unit price and an allocated quantity:
//
//   factor        price   quantity   persistence coefficient
//   Consumption   c       v          b
//   Taxes         t       y          d
//   Investment    i       x          a
//   Leisure       l       z          e
//   Intangibles   b       s          j
//   Housing       h       r          k
//
// The letters "t" (time vs tax price) and "r" (discount rate vs housing
// quantity) are overloaded in the literature; here they only appear as
// accessor names on the price and quantity types, never as free variables.

/// The six allocation domains, in their fixed iteration order.
enum class FactorId : std::uint8_t {
    Consumption = 0,
    Taxes = 1,
    Investment = 2,
    Leisure = 3,
    Intangibles = 4,
    Housing = 5,
};

inline constexpr std::size_t kFactorCount = 6;

inline constexpr std::array<FactorId, kFactorCount> kAllFactors{
    FactorId::Consumption, FactorId::Taxes,       FactorId::Investment,
    FactorId::Leisure,     FactorId::Intangibles, FactorId::Housing,
};

constexpr std::size_t index_of(FactorId f) noexcept { return static_cast<std::size_t>(f); }

std::string_view factor_name(FactorId f) noexcept;
/// Single-letter price symbol (c, t, i, l, b, h).
std::string_view price_symbol(FactorId f) noexcept;
/// Single-letter quantity symbol (v, y, x, z, s, r).
std::string_view quantity_symbol(FactorId f) noexcept;
/// Accepts the factor name (case-insensitive) or its price symbol.
FactorId parse_factor(std::string_view text);

using FactorValues = std::array<double, kFactorCount>;

/// Per-unit cost of each factor, in wealth-units per factor-unit.
struct UnitPrices {
    FactorValues values{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};

    double& operator[](FactorId f) noexcept { return values[index_of(f)]; }
    double operator[](FactorId f) const noexcept { return values[index_of(f)]; }

    double c() const noexcept { return values[0]; }
    double t() const noexcept { return values[1]; }
    double i() const noexcept { return values[2]; }
    double l() const noexcept { return values[3]; }
    double b() const noexcept { return values[4]; }
    double h() const noexcept { return values[5]; }

    static UnitPrices uniform(double p) noexcept { return {{p, p, p, p, p, p}}; }

    bool operator==(const UnitPrices&) const = default;
};

/// Factor-unit quantities chosen in one period. Entries may be negative.
struct AllocationVector {
    FactorValues values{};

    double& operator[](FactorId f) noexcept { return values[index_of(f)]; }
    double operator[](FactorId f) const noexcept { return values[index_of(f)]; }

    double v() const noexcept { return values[0]; }
    double y() const noexcept { return values[1]; }
    double x() const noexcept { return values[2]; }
    double z() const noexcept { return values[3]; }
    double s() const noexcept { return values[4]; }
    double r() const noexcept { return values[5]; }

    static AllocationVector uniform(double q) noexcept { return {{q, q, q, q, q, q}}; }

    bool operator==(const AllocationVector&) const = default;
};

struct Wealth {
    double total = 0.0;      ///< W_T: monetary plus non-monetary wealth
    double investable = 0.0;
    double period = 0.0;     ///< w_t: wealth allocated this period

    bool operator==(const Wealth&) const = default;
};

/// Persistence weights of the allocation recursion, one per factor.
struct RecursionCoefficients {
    double a = 0.5; ///< Investment
    double b = 0.5; ///< Consumption
    double d = 0.5; ///< Taxes
    double e = 0.5; ///< Leisure
    double j = 0.5; ///< Intangibles
    double k = 0.5; ///< Housing

    double of(FactorId f) const noexcept;
    static RecursionCoefficients uniform(double w) noexcept { return {w, w, w, w, w, w}; }
    bool operator==(const RecursionCoefficients&) const = default;
};

struct AgentState {
    Wealth wealth;
    UnitPrices prices;
    AllocationVector current_alloc;
    AllocationVector prior_alloc;
    double regret_memory = 0.0;
    std::int64_t period_index = 0;
    /// When set, current_alloc must exhaust wealth.period at `prices`.
    bool budget_closed = false;

    bool operator==(const AgentState&) const = default;
};

/// Present-value components of the savings-utility integrand.
struct SavingsProfile {
    double pv_savings = 0.0;            ///< I_s
    double pv_expected_uncovered = 0.0; ///< X_e
    double pv_unexpected = 0.0;         ///< X_u
    double pv_inflation = 0.0;          ///< X_i
    double instability_regret = 0.0;    ///< L_r
    double pv_home_equity = 0.0;        ///< V_h
    double pv_gov_support = 0.0;        ///< I_g
    double pv_insurance = 0.0;          ///< I_i
    double horizon_years = 1.0;         ///< t (years to death)
    double discount_rate = 0.0;         ///< r, carried as metadata; components are already discounted

    bool operator==(const SavingsProfile&) const = default;
};

/// MRIJS for a given sum of the six marginal rates.
///
/// exp(min(0, -sum)). Results that would underflow to zero are held at the
/// smallest positive double so the value stays inside (0, 1].
double mrijs_from_sum(double rate_sum) noexcept;

/// The six marginal rates of substitution and the joint index built from them.
class SubstitutionRates {
public:
    SubstitutionRates() : SubstitutionRates(FactorValues{}) {}
    /// Rates are indexed by FactorId (C*, T*, I*, L*, B*, H*).
    explicit SubstitutionRates(const FactorValues& rates);

    double operator[](FactorId f) const noexcept { return rates_[index_of(f)]; }
    const FactorValues& rates() const noexcept { return rates_; }

    double c_star() const noexcept { return rates_[0]; }
    double t_star() const noexcept { return rates_[1]; }
    double i_star() const noexcept { return rates_[2]; }
    double l_star() const noexcept { return rates_[3]; }
    double b_star() const noexcept { return rates_[4]; }
    double h_star() const noexcept { return rates_[5]; }
    double rate_sum() const noexcept;
    double mrijs() const noexcept { return mrijs_; }

    bool operator==(const SubstitutionRates&) const = default;

private:
    FactorValues rates_;
    double mrijs_;
};

struct Violation {
    std::string field;
    std::string invariant;

    bool operator==(const Violation&) const = default;
};

/// Relative tolerance for budget closure: 1e-9 * max(1, |period wealth|).
inline constexpr double kBudgetTolerance = 1e-9;
double budget_tolerance(double period_wealth) noexcept;

std::vector<Violation> validate_prices(const UnitPrices& prices);
std::vector<Violation> validate_wealth(const Wealth& wealth);
std::vector<Violation> validate_allocation(const AllocationVector& alloc, std::string_view name);
std::vector<Violation> validate_profile(const SavingsProfile& profile);

/// Every broken invariant of the state. An empty list means the state is valid.
std::vector<Violation> validate_state(const AgentState& state);

std::string to_string(const std::vector<Violation>& violations);

} // namespace uiwd
