#include <doctest.h>

#include "modkam/error.hpp"
#include "modkam/modulus.hpp"
#include "modkam/quadrature.hpp"

#include <cmath>

using namespace modkam;

TEST_CASE("closed forms") {
    CHECK(eval(ModulusSpec::hoelder(0.5), 0.25) == doctest::Approx(0.5));
    CHECK(eval(ModulusSpec::log_hoelder(2.0), std::exp(-4.0)) == doctest::Approx(1.0 / 16.0));
    CHECK(eval(ModulusSpec::power_log(0.4, 1.5), std::exp(-3.0)) ==
          doctest::Approx(std::exp(-1.2) / std::pow(3.0, 1.5)));

    // ln 1/x = e^2, ln ln 1/x = 2
    const double x = std::exp(-std::exp(2.0));
    CHECK(eval(ModulusSpec::gen_log_hoelder(2, 1.5), x) == doctest::Approx(1.0 / (std::exp(2.0) * std::pow(2.0, 1.5))));
}

TEST_CASE("log_eval past underflow") {
    ModulusSpec m = ModulusSpec::log_hoelder(1.5);
    CHECK(log_eval(m, 1e6) == doctest::Approx(-1.5 * std::log(1e6)));
    ModulusSpec h = ModulusSpec::hoelder(0.3);
    CHECK(log_eval(h, 5000.0) == doctest::Approx(-1500.0));
}

TEST_CASE("domain and argument errors") {
    CHECK_THROWS_AS(eval(ModulusSpec::log_hoelder(1.5), 0.9), DomainError);
    CHECK_THROWS_AS(eval(ModulusSpec::hoelder(0.5), 0.0), DomainError);
    CHECK_THROWS_AS(ModulusSpec::hoelder(1.5), ArgumentError);
    CHECK_THROWS_AS(ModulusSpec::log_hoelder(-1.0), ArgumentError);
}

TEST_CASE("tabulated power law is exact between nodes") {
    std::vector<std::pair<double, double>> s;
    for (double x : {1e-6, 1e-4, 1e-2, 1.0}) s.emplace_back(x, std::sqrt(x));
    ModulusSpec t = ModulusSpec::tabulated(s);
    CHECK(eval(t, 3e-3) == doctest::Approx(std::sqrt(3e-3)).epsilon(1e-12));
}

TEST_CASE("weak homogeneity limits") {
    auto grid = default_tail_grid(ModulusSpec::log_hoelder(2.0));
    PropertyReport lh = weak_homogeneity(ModulusSpec::log_hoelder(2.0), 0.5, grid);
    CHECK(lh.verdict);
    CHECK(lh.limit_estimate == doctest::Approx(1.0).epsilon(0.02));

    PropertyReport h = weak_homogeneity(ModulusSpec::hoelder(0.5), 0.5, default_tail_grid(ModulusSpec::hoelder(0.5)));
    CHECK(h.verdict);
    CHECK(h.limit_estimate == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("semi separability and convexity of log type") {
    ModulusSpec m = ModulusSpec::log_hoelder(2.0);
    CHECK(semi_separability(m, default_semi_grid(), 64).verdict);
    CHECK(convexity_check(m, default_tail_grid(m)).verdict);
    // convex here means w' >= 0 nonincreasing near 0+
    ModulusSpec root = ModulusSpec::hoelder(0.5);
    CHECK(convexity_check(root, default_tail_grid(root)).verdict);
    std::vector<std::pair<double, double>> sq;
    for (double x = 1e-8; x <= 1.0; x *= 2.0) sq.emplace_back(x, x * x);
    ModulusSpec square = ModulusSpec::tabulated(sq);
    CHECK_FALSE(convexity_check(square, geometric_grid(0.5, 1e-7, 40)).verdict);
}

TEST_CASE("ordering") {
    ModulusSpec lh = ModulusSpec::log_hoelder(2.0);
    ModulusSpec h = ModulusSpec::hoelder(0.5);
    auto grid = geometric_grid(0.4, 1e-200, 200);
    CHECK(compare(lh, h, grid) == Ordering::strictly_weaker);
    CHECK(compare(h, lh, grid) == Ordering::strictly_stronger);
    CHECK(compare(h, ModulusSpec::hoelder(0.5), grid) == Ordering::equivalent);
}

TEST_CASE("log quadrature") {
    // integral of e^{-s} over [0, 3]
    CHECK(std::exp(log_integral([](double s) { return -s; }, 0.0, 3.0)) == doctest::Approx(1.0 - std::exp(-3.0)));
    TailIntegral t = tail_integral([](double s) { return -2.0 * std::log(s); }, 1.0);
    CHECK(t.converges);
    CHECK(std::exp(t.log_value) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(tail_integral([](double s) { return -std::log(s); }, 1.0).converges);
}
