#include <doctest.h>

#include "modkam/error.hpp"
#include "modkam/regularity.hpp"

#include <cmath>

using namespace modkam;

TEST_CASE("weighted integral of a power") {
    // integral of x^{1/2 + q} over (0, 1]
    ModulusSpec m = ModulusSpec::hoelder(0.5);
    for (double q : {0.1, -0.9, -1.0, -1.4}) {
        IntegralVerdict v = weighted_integral(m, q);
        REQUIRE(v.converges);
        CHECK(v.value == doctest::Approx(1.0 / (1.5 + q)).epsilon(1e-8));
    }
    CHECK_FALSE(weighted_integral(m, -2.4).converges);
    CHECK(std::isnan(weighted_integral(m, -2.4).value));
}

TEST_CASE("dini integral on the log scale") {
    // integral over (0, 1/2] of 1/(x (ln 1/x)^lambda) = (ln 2)^{1-lambda} / (lambda - 1)
    for (double lam : {1.5, 2.0}) {
        IntegralVerdict v = dini_integral(ModulusSpec::log_hoelder(lam), 6, 2.0);
        REQUIRE(v.converges);
        CHECK(v.value == doctest::Approx(std::pow(std::log(2.0), 1.0 - lam) / (lam - 1.0)).epsilon(1e-6));
    }
    for (double lam : {0.5, 1.0}) {
        IntegralVerdict v = dini_integral(ModulusSpec::log_hoelder(lam), 6, 2.0);
        CHECK_FALSE(v.converges);
        CHECK(v.truncation_trace.size() > 2);
    }
    IntegralVerdict c = classical_dini(ModulusSpec::hoelder(0.5));
    REQUIRE(c.converges);
    CHECK(c.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("critical exponent of shifted powers") {
    ModulusSpec m = ModulusSpec::hoelder(0.5);
    PhiFunction phi{m, 2.1, 0};
    CHECK(critical_exponent(phi) == 2);
    PhiFunction p1 = phi_from_modulus(m, 7, 2.2, 1);
    PhiFunction p2 = phi_from_modulus(m, 7, 2.2, 2);
    CHECK(p1.power_shift == doctest::Approx(7 - 4.4 - 1));
    CHECK(p2.power_shift == doctest::Approx(7 - 2.2 - 1));
    CHECK(critical_exponent(p1) == 2);
    CHECK(critical_exponent(p2) == 4);
    CHECK_THROWS_AS(phi_from_modulus(m, 7, 2.2, 3), ArgumentError);
}

TEST_CASE("remaining modulus of a hoelder phi") {
    PhiFunction phi = phi_from_modulus(ModulusSpec::hoelder(0.5), 7, 2.2, 1);
    RegularityReport rep = remaining_modulus_log(phi, 2, 0.5, default_log_gamma_grid(0.5));
    CHECK(rep.balance_residual < rep.tolerance);
    ExponentFit f = fit_remaining_exponents(rep);
    CHECK(f.power_only == doctest::Approx(0.1).epsilon(0.05));
    CHECK_THROWS_AS(remaining_modulus(phi, 2, 0.5, {0.6, 0.1}), ArgumentError);
}

TEST_CASE("regularity from deltas") {
    std::vector<double> r, d;
    for (int j = 1; j <= 12; ++j) {
        r.push_back(std::ldexp(1.0, -j));
        d.push_back(std::pow(r.back(), 3.4));
    }
    RegularityReport rep = regularity_from_deltas(r, d);
    CHECK(rep.k_star == 3);
    CHECK(fit_remaining_exponents(rep).power_only == doctest::Approx(0.4).epsilon(0.05 / 0.4));
    REQUIRE(rep.phi_fit.has_value());
    CHECK(rep.phi_fit->tail.a == doctest::Approx(3.4).epsilon(1e-6));

    std::vector<double> zeros(r.size(), 0.0);
    CHECK(regularity_from_deltas(r, zeros).analytic_limit);

    std::vector<double> bad = r;
    bad[3] *= 1.1;
    CHECK_THROWS_AS(regularity_from_deltas(bad, d), ArgumentError);
    CHECK_THROWS_AS(regularity_from_deltas({0.5, 0.25}, {1.0, 0.5}), ArgumentError);
}
