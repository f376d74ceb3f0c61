#include <doctest.h>

#include "modkam/diophantine.hpp"
#include "modkam/error.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

using namespace modkam;

namespace {

// brute force over the full box, 1-norm
double brute(const std::vector<double>& w, double tau, int kmax) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = -kmax; a <= kmax; ++a)
        for (int b = -kmax; b <= kmax; ++b) {
            int n = std::abs(a) + std::abs(b);
            if (n == 0 || n > kmax) continue;
            best = std::min(best, std::fabs(a * w[0] + b * w[1]) * std::pow(n, tau));
        }
    return best;
}

} // namespace

TEST_CASE("search matches brute force") {
    std::vector<double> w = golden_frequency();
    CHECK(w[1] == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0));
    for (double tau : {1.0, 2.0}) {
        DioResult r = dio_search(w, tau, 60);
        CHECK_FALSE(r.resonant);
        CHECK(r.value == doctest::Approx(brute(w, tau, 60)));
        REQUIRE(r.witness.size() == 2);
        const int n = std::abs(r.witness[0]) + std::abs(r.witness[1]);
        CHECK(std::fabs(r.witness[0] * w[0] + r.witness[1] * w[1]) * std::pow(n, tau) == doctest::Approx(r.value));
    }
}

TEST_CASE("resonance witness") {
    DioResult r = dio_search({1.0, 0.5}, 1.0, 50);
    CHECK(r.resonant);
    CHECK(r.value == 0.0);
    CHECK(r.witness == std::vector<int>{1, -2});
    CHECK_THROWS_AS(certify({1.0, 0.5}, 1.0, 50), ResonanceError);
}

TEST_CASE("certified frequency") {
    Frequency f = certify(golden_frequency(), 1.0, 100);
    REQUIRE(f.alpha_star.has_value());
    CHECK(*f.alpha_star > 0.0);
    CHECK(f.k_max == 100);
    CHECK(*f.alpha_star == doctest::Approx(dio_constant(golden_frequency(), 1.0, 100)));
}

TEST_CASE("argument checks") {
    CHECK_THROWS_AS(dio_search({}, 1.0, 10), ArgumentError);
    CHECK_THROWS_AS(dio_search({0.0, 0.0}, 1.0, 10), ArgumentError);
    CHECK_THROWS_AS(dio_search({1.0, 2.0}, 1.0, 0), ArgumentError);
    CHECK_THROWS_AS(dio_search({1.0, NAN}, 1.0, 10), ArgumentError);
}
