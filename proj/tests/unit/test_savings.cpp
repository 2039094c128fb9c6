#include <doctest.h>

#include <cmath>

#include "uiwd/errors.hpp"
#include "uiwd/savings.hpp"

using namespace uiwd;

namespace {

SavingsProfile with_savings(double is) {
    SavingsProfile p;
    p.pv_savings = is;
    return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_CASE("integrand signs") {
    CHECK(integrand(SavingsProfile{}) == 0.0);

    SavingsProfile p;
    p.pv_savings = 10.0;
    p.pv_home_equity = 5.0;
    CHECK(integrand(p) == 15.0);

    SavingsProfile q;
    q.pv_savings = 10.0;
    q.pv_expected_uncovered = 3.0;
    q.pv_gov_support = 2.0;
    CHECK(integrand(q) == 5.0);

    SavingsProfile all;
    all.pv_savings = 1;
    all.pv_expected_uncovered = 2;
    all.pv_unexpected = 4;
    all.pv_inflation = 8;
    all.instability_regret = 16;
    all.pv_home_equity = 32;
    all.pv_gov_support = 64;
    all.pv_insurance = 128;
    CHECK(integrand(all) == 1 - 2 - 4 - 8 - 16 + 32 - 64 - 128);
}

TEST_CASE("savings_utility closed forms") {
    SUBCASE("constant integrand") {
        const auto path = ProfilePath::sample(10.0, 1000, [](double) { return with_savings(0.1); });
        CHECK(rel(savings_utility(path), std::exp(1.0)) <= 1e-10);
    }
    SUBCASE("zero integrand") {
        const auto path = ProfilePath::sample(30.0, 100, [](double) { return SavingsProfile{}; });
        CHECK(savings_utility(path) == 1.0);
    }
    SUBCASE("linear ramp") {
        const double k = 0.08;
        const double t = 25.0;
        for (std::size_t n : {4u, 10u, 1000u}) {
            const auto path = ProfilePath::sample(t, n, [&](double s) { return with_savings(k * s / t); });
            CHECK(rel(savings_utility(path), std::exp(k * t / 2.0)) <= 1e-10);
        }
    }
}

TEST_CASE("savings_utility properties") {
    const auto smooth = [](double s) {
        SavingsProfile p;
        p.pv_savings = 0.05 + 0.02 * std::sin(s / 3.0);
        p.pv_inflation = 0.01 * std::cos(s / 5.0);
        p.pv_home_equity = 0.002 * s;
        return p;
    };
    const double u = savings_utility(ProfilePath::sample(30.0, 1000, smooth));
    const double u_half = savings_utility(ProfilePath::sample(30.0, 2000, smooth));
    CHECK(rel(u_half, u) < 1e-6);
    CHECK(u > 0.0);

    const auto bigger = [&](double s) {
        SavingsProfile p = smooth(s);
        p.pv_savings += 0.01;
        return p;
    };
    CHECK(savings_utility(ProfilePath::sample(30.0, 1000, bigger)) >= u);

    const auto dire = ProfilePath::sample(30.0, 10, [](double) {
        SavingsProfile p;
        p.pv_unexpected = 1e6;
        return p;
    });
    CHECK(savings_utility(dire) > 0.0);
}

TEST_CASE("ProfilePath grid") {
    const auto path = ProfilePath::sample(8.0, 4, [](double s) { return with_savings(s); });
    CHECK(path.grid_step() == 2.0);
    CHECK(path.samples().size() == 5);
    CHECK(path.integrand_at(3.0) == doctest::Approx(3.0));
    CHECK(integrate(path) == doctest::Approx(32.0));
    CHECK_THROWS(ProfilePath::sample(8.0, 3, [](double) { return SavingsProfile{}; }));
    CHECK_THROWS(ProfilePath::sample(-1.0, 10, [](double) { return SavingsProfile{}; }));
}
