#include <doctest.h>

#include "modkam/error.hpp"
#include "modkam/jackson.hpp"
#include "modkam/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace modkam;

TEST_CASE("fourier profile") {
    CHECK(kernel_profile(0.0) == 1.0);
    CHECK(kernel_profile(0.5) == 1.0);
    CHECK(kernel_profile(1.0) == 0.0);
    CHECK(kernel_profile(3.0) == 0.0);
    double prev = 1.0;
    for (double r = 0.5; r <= 1.0; r += 0.01) {
        CHECK(kernel_profile(r) <= prev + 1e-15);
        prev = kernel_profile(r);
    }
}

TEST_CASE("kernel moments and symmetry") {
    auto K = build_kernel(1);
    CHECK(kernel_moments(*K, {0}, {0}, 3) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(kernel_moments(*K, {1}, {1}, 3) == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(kernel_moments(*K, {2}, {2}, 3) == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(std::fabs(kernel_moments(*K, {2}, {0}, 3)) < 1e-5);
    CHECK(K->value(std::vector<double>{0.7}) == doctest::Approx(K->value(std::vector<double>{-0.7})));
    CHECK_THROWS_AS(kernel_moments(*K, {4}, {0}, 3), ArgumentError);
}

TEST_CASE("paley wiener decay on the strip") {
    auto K = build_kernel(1);
    std::vector<std::complex<double>> z;
    for (double x : {0.0, 2.0, 10.0, 40.0}) z.emplace_back(x, 0.5);
    PaleyWienerReport rep = paley_wiener_check(*K, 2, z);
    CHECK(rep.verdict);
    CHECK(rep.samples.size() == z.size());
    CHECK_THROWS_AS(paley_wiener_check(*K, 2, {{0.0, 2.0}}), ArgumentError);
}

TEST_CASE("smoothing keeps low modes and kills high ones") {
    TorusFunction f(1, 64);
    f.set_coeff({1}, 0.5);
    f.set_coeff({-1}, 0.5);
    f.set_coeff({20}, 0.25);
    f.set_coeff({-20}, 0.25);
    const double r = 0.01;  // 2 pi r = 0.063: mode 1 in the flat part, mode 20 beyond the support
    TorusFunction s = smooth(f, r);
    CHECK(std::abs(s.coeff({1}) - cplx(0.5)) < 1e-15);
    CHECK(std::abs(s.coeff({20})) < 1e-15);
}

TEST_CASE("convolution agrees with the spectral multiplier") {
    auto K = build_kernel(1);
    TorusFunction f = synthesize_ck_function(2, 0.5, 256);
    const double r = 1.0 / 32.0;
    std::vector<double> x = {0.0, 0.13, 0.5, 0.77};
    std::vector<double> conv = smooth_by_convolution(*K, f, r, x);
    TorusFunction s = smooth(f, r);
    for (std::size_t j = 0; j < x.size(); ++j) CHECK(conv[j] == doctest::Approx(s.eval(std::vector<double>{x[j]})).epsilon(1e-6));
}

TEST_CASE("jackson error slope") {
    std::vector<double> rs;
    for (int j = 3; j <= 9; ++j) rs.push_back(std::ldexp(1.0, -j));
    TorusFunction f = synthesize_ck_function(2, 0.5);
    SmoothErrorReport rep = smooth_error_report(f, ModulusSpec::hoelder(0.5), 2, rs);
    REQUIRE_FALSE(rep.fits.empty());
    CHECK(std::fabs(rep.fits[0].slope_vs_r - 2.5) <= 0.15);
    // error / (r^k w(r)) stays within a fixed band
    double lo = 1e300, hi = 0.0;
    for (const auto& row : rep.rows)
        if (row.order == 0) {
            lo = std::min(lo, row.ratio);
            hi = std::max(hi, row.ratio);
        }
    CHECK(hi / lo < 2.0);
}

TEST_CASE("spectral derivative") {
    TorusFunction f(1, 32);
    f.set_coeff({3}, cplx(0.0, -0.5));
    f.set_coeff({-3}, cplx(0.0, 0.5));  // sin(6 pi x)
    TorusFunction d = f.derivative(0);
    const double x = 0.1;
    CHECK(d.eval(std::vector<double>{x}) == doctest::Approx(6.0 * std::numbers::pi * std::cos(6.0 * std::numbers::pi * x)));
}
