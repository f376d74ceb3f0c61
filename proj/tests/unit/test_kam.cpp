#include <doctest.h>

#include "modkam/error.hpp"
#include "modkam/kam.hpp"

#include <cmath>
#include <random>

using namespace modkam;

namespace {

TorusFunction random_zero_mean(int N, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TorusFunction g(2, N);
    const int m = N / 2 - 1;
    for (int a = -m; a <= m; ++a)
        for (int b = 0; b <= m; ++b) {
            if (b == 0 && a <= 0) continue;
            cplx c(u(rng), u(rng));
            g.set_coeff({a, b}, c);
            g.set_coeff({-a, -b}, std::conj(c));
        }
    return g;
}

HamiltonianModel example(double lambda = 1.5) {
    ExampleParams p;
    p.omega = golden_frequency();
    p.lambda = lambda;
    return build_example_hamiltonian(ModelKind::log_hoelder_example, p);
}

} // namespace

TEST_CASE("homological equation") {
    const auto w = golden_frequency();
    TorusFunction g = random_zero_mean(16, 7);
    TorusFunction phi = solve_homological(g, w);
    CHECK(homological_residual(phi, g, w) < 1e-12);
    CHECK(phi.mean() == 0.0);

    TorusFunction biased = g;
    biased.set_mean(0.3);
    CHECK_THROWS_AS(solve_homological(biased, w), SolvabilityError);

    TorusFunction r(2, 16);
    r.set_coeff({2, -1}, 1.0);
    r.set_coeff({-2, 1}, 1.0);
    CHECK_THROWS_AS(solve_homological(r, {1.0, 2.0}), ResonanceError);
}

TEST_CASE("action profile derivatives chain") {
    ActionProfile P(1.5);
    CHECK(P.derivative(6, 0.3) == doctest::Approx(ActionProfile::top(1.5, 0.3)));
    const double h = 1e-4;
    for (int order = 0; order < 6; ++order) {
        const double s = 0.4;
        const double fd = (P.derivative(order, s + h) - P.derivative(order, s - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(P.derivative(order + 1, s)).epsilon(1e-6));
    }
    CHECK(P.derivative(2, -0.4) == doctest::Approx(P.derivative(2, 0.4)));
    CHECK_THROWS_AS(P.derivative(0, 1.5), DomainError);
}

TEST_CASE("hypotheses of the example and the lambda one control") {
    Frequency f = certify(golden_frequency(), 2.0, 64);
    HypothesisReport ok = check_hypotheses(example(), f);
    CHECK(ok.all_passed());
    CHECK(ok.checks.size() == 4);

    HypothesisReport bad = check_hypotheses(example(1.0), f);
    REQUIRE(bad.first_failure() != nullptr);
    CHECK(bad.first_failure()->name == "H1");
    CHECK_THROWS_AS(run_kam(example(1.0), f), HypothesisError);
}

TEST_CASE("integrable model sits on its torus") {
    ExampleParams p;
    p.omega = golden_frequency();
    HamiltonianModel m = build_example_hamiltonian(ModelKind::integrable, p);
    auto [ry, rx] = invariance_residual(m, TorusMap::identity(2, 16), m.omega);
    CHECK(ry == 0.0);
    CHECK(rx == 0.0);
}

TEST_CASE("theoretical regularity of the conjugacy") {
    int k1 = 0, k2 = 0;
    auto th = theoretical_regularity(ModulusSpec::log_hoelder(1.5), 6, 2.0, 0.5, &k1, &k2);
    CHECK(k1 == 1);
    CHECK(k2 == 3);
    CHECK(fit_remaining_exponents(th.first).log_only == doctest::Approx(0.5).epsilon(0.2));

    auto h = theoretical_regularity(ModulusSpec::hoelder(0.5), 7, 2.2, 0.5, &k1, &k2);
    CHECK(k1 == 2);
    CHECK(k2 == 4);
    CHECK(k1 + fit_remaining_exponents(h.first).power_only == doctest::Approx(2.1).epsilon(0.01));
    CHECK(k2 + fit_remaining_exponents(h.second).power_only == doctest::Approx(4.3).epsilon(0.01));
}

TEST_CASE("example run invariants") {
    KamConfig cfg;
    cfg.nu_max = 6;
    Frequency f = certify(golden_frequency(), 2.0, cfg.lattice);
    HamiltonianModel m = example();
    KamResult res = run_kam(m, f, cfg);
    const auto& recs = res.trace.records;
    REQUIRE(recs.size() >= 5);
    for (const auto& r : recs) {
        CHECK(r.freq_error <= 1e-8);
        CHECK(r.jac_sum <= 1.0 - cfg.theta);
        CHECK(r.min_det > 0.0);
    }
    for (std::size_t j = 1; j < recs.size(); ++j)
        CHECK(recs[j].residual_x <= recs[j - 1].residual_x + 1e-12);
    auto [ry, rx] = invariance_residual(m, res.torus, f.omega);
    CHECK(std::max(ry, rx) <= 1e-6);
    CHECK(composition_gap(res) <= 1e-10);

    // the converged torus lives on low modes; cutting below them loses invariance
    TorusMap half = res.torus;
    for (auto& c : half.u_minus_id) c = c.truncated(2);
    for (auto& c : half.v) c = c.truncated(2);
    auto [hy, hx] = invariance_residual(m, half, f.omega);
    CHECK(std::max(hy, hx) > std::max(ry, rx));

    // the invariant graph is well defined
    auto w = graph_of(res.torus);
    CHECK(w.size() == 2);
}
