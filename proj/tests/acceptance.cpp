#include "cli.hpp"

#include "modkam/asymptotics.hpp"
#include "modkam/diophantine.hpp"
#include "modkam/error.hpp"
#include "modkam/jackson.hpp"
#include "modkam/json_io.hpp"
#include "modkam/kam.hpp"
#include "modkam/kernel.hpp"
#include "modkam/quadrature.hpp"
#include "modkam/regularity.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#ifndef MODKAM_TEST_DATA
#define MODKAM_TEST_DATA "tests/data"
#endif

using namespace modkam;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

json load(const std::string& name) {
    std::ifstream in(std::string(MODKAM_TEST_DATA) + "/" + name);
    return json::parse(in);
}

void guarded(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("exception: ") + e.what());
    }
}

void kernel_moments_check() {
    auto t0 = std::chrono::steady_clock::now();
    auto K = build_kernel(1);
    double worst = 0.0;
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; b <= 3; ++b) {
            double want = 0.0;
            if (a == b) want = std::tgamma(a + 1.0) * (a % 2 ? -1.0 : 1.0);
            worst = std::max(worst, std::fabs(kernel_moments(*K, {a}, {b}, 3) - want));
        }
    const double mass = std::fabs(kernel_moments(*K, {0}, {0}, 3) - 1.0);
    const double t = seconds_since(t0);
    report(1, worst <= 1e-5 && mass <= 1e-8 && t < 10.0,
           "max moment error " + fmt("%.3g", worst) + ", mass error " + fmt("%.3g", mass) + ", " + fmt("%.2f s", t));
}

void jackson_check() {
    std::vector<double> rs;
    for (int j = 3; j <= 9; ++j) rs.push_back(std::ldexp(1.0, -j));
    bool ok = true;
    std::string detail;
    for (auto [k, ah] : {std::pair{2, 0.5}, std::pair{4, 0.3}}) {
        TorusFunction f = synthesize_ck_function(k, ah);
        SmoothErrorReport rep = smooth_error_report(f, ModulusSpec::hoelder(ah), k, rs);
        const double slope = rep.fits.at(0).slope_vs_r;
        ok = ok && std::fabs(slope - (k + ah)) <= 0.15;
        detail += "k=" + std::to_string(k) + " slope " + fmt("%.4f", slope) + " (want " + fmt("%.1f", k + ah) + ") ";
    }
    report(2, ok, detail);
}

void dini_check() {
    bool ok = true;
    std::string detail;
    const double tau = 2.0;
    for (double lam : {0.5, 1.0, 1.5, 2.0}) {
        IntegralVerdict v = dini_integral(ModulusSpec::log_hoelder(lam), static_cast<int>(2 * tau + 2), tau);
        const bool want = lam > 1.0;
        ok = ok && v.converges == want;
        detail += "lambda " + fmt("%.1f", lam) + (v.converges ? " conv, " : " div, ");
    }
    IntegralVerdict h = dini_integral(ModulusSpec::hoelder(0.5), 7, 2.2);
    const double err = h.converges ? std::fabs(h.value - 1.0 / 1.1) : INFINITY;
    ok = ok && err <= 1e-6;
    report(3, ok, detail + "hoelder value error " + fmt("%.3g", err));
}

void critical_check() {
    bool ok = true;
    std::string detail;
    for (auto [ell, tau] : {std::pair{7.5, 2.2}, std::pair{9.3, 3.1}}) {
        const int k = static_cast<int>(std::floor(ell));
        ModulusSpec m = ModulusSpec::hoelder(ell - k);
        const int k1 = critical_exponent(phi_from_modulus(m, k, tau, 1));
        const int k2 = critical_exponent(phi_from_modulus(m, k, tau, 2));
        const int w1 = static_cast<int>(std::floor(ell - 2 * tau - 1));
        const int w2 = static_cast<int>(std::floor(ell - tau - 1));
        ok = ok && k1 == w1 && k2 == w2;
        detail += "(" + std::to_string(k1) + "," + std::to_string(k2) + ") want (" + std::to_string(w1) + "," +
                  std::to_string(w2) + "); ";
    }
    const int n = 2;
    ModulusSpec g = ModulusSpec::gen_log_hoelder(1, 1.5);
    const int k1 = critical_exponent(phi_from_modulus(g, 2 * n, n - 1.0, 1));
    const int k2 = critical_exponent(phi_from_modulus(g, 2 * n, n - 1.0, 2));
    ok = ok && k1 == 1 && k2 == n;
    detail += "log case (" + std::to_string(k1) + "," + std::to_string(k2) + ") want (1," + std::to_string(n) + ")";
    report(4, ok, detail);
}

ExponentFit remaining_fit(const PhiFunction& phi, double eps = 0.5) {
    const int ks = critical_exponent(phi);
    return fit_remaining_exponents(remaining_modulus_log(phi, ks, eps, default_log_gamma_grid(eps)));
}

void remaining_check() {
    bool ok = true;
    std::string detail;
    const double ell = 7.5, tau = 2.2;
    for (int i = 1; i <= 2; ++i) {
        ExponentFit f = remaining_fit(phi_from_modulus(ModulusSpec::hoelder(0.5), 7, tau, i));
        const double x = ell - (3 - i) * tau - 2;
        const double want = x - std::floor(x);
        ok = ok && std::fabs(f.power_only - want) <= 0.05;
        detail += "hoelder i=" + std::to_string(i) + " " + fmt("%.3f", f.power_only) + " want " + fmt("%.1f", want) + "; ";
    }
    for (int i = 1; i <= 2; ++i) {
        ExponentFit f = remaining_fit(phi_from_modulus(ModulusSpec::log_hoelder(1.5), 6, 2.0, i));
        ok = ok && std::fabs(f.log_only - 0.5) <= 0.1;
        detail += "log i=" + std::to_string(i) + " " + fmt("%.3f", f.log_only) + " want 0.5; ";
    }
    ExponentFit f = remaining_fit(phi_from_modulus(ModulusSpec::power_log(0.4, 1.5), 6, tau, 2));
    ok = ok && std::fabs(f.power - 0.2) <= 0.05 && std::fabs(f.log_power - 1.5) <= 0.1;
    detail += "mixed " + fmt("%.3f", f.power) + "/" + fmt("%.3f", f.log_power) + " want 0.2/1.5";
    report(5, ok, detail);
}

void homological_check() {
    auto t0 = std::chrono::steady_clock::now();
    Frequency freq = certify(golden_frequency(), 1.0);
    std::mt19937_64 rng(20261017);
    std::normal_distribution<double> gauss;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        TorusFunction g(2, 16);
        for (int k1 = -7; k1 <= 7; ++k1)
            for (int k2 = 0; k2 <= 7; ++k2) {
                if (k2 == 0 && k1 <= 0) continue;
                cplx c(gauss(rng), gauss(rng));
                g.set_coeff({k1, k2}, c);
                g.set_coeff({-k1, -k2}, std::conj(c));
            }
        TorusFunction phi = solve_homological(g, freq.omega);
        worst = std::max(worst, homological_residual(phi, g, freq.omega));
    }
    const double t = seconds_since(t0);
    report(6, worst <= 1e-9 && t < 30.0, "max residual " + fmt("%.3g", worst) + ", " + fmt("%.2f s", t));
}

// least-squares slope of ln delta against ln r over nonzero deltas
double decay_exponent(const std::vector<StepRecord>& recs, double StepRecord::*field, double floor) {
    std::vector<double> x, y;
    for (const auto& r : recs)
        if (r.*field > floor) {
            x.push_back(std::log(r.r_nu));
            y.push_back(std::log(r.*field));
        }
    if (x.size() < 2) return NAN;
    return fit_line(x, y).slope;
}

void kam_check() {
    auto t0 = std::chrono::steady_clock::now();
    json in = load("kam_example.json");
    HamiltonianModel model = model_from_json(in["model"]);
    KamConfig cfg = kam_config_from_json(in["config"]);
    Frequency freq = certify(model.omega, in["tau"].get<double>(), cfg.lattice);
    KamResult res = run_kam(model, freq, cfg);
    const auto& recs = res.trace.records;
    double freq_worst = 0.0;
    for (const auto& r : recs) freq_worst = std::max(freq_worst, r.freq_error);
    auto [ry, rx] = invariance_residual(model, res.torus, freq.omega);
    const double ku = decay_exponent(recs, &StepRecord::u_delta, cfg.stop_floor);
    const double kw = decay_exponent(recs, &StepRecord::w_delta, cfg.stop_floor);
    const double t = seconds_since(t0);
    const bool ok = freq_worst <= 1e-8 && recs.size() >= 5 && std::max(rx, ry) <= 1e-6 && std::fabs(ku - 1.0) <= 0.3 &&
                    std::fabs(kw - 2.0) <= 0.3 && t < 300.0;
    report(7, ok,
           std::to_string(recs.size()) + " steps, freq error " + fmt("%.3g", freq_worst) + ", residual " +
               fmt("%.3g", std::max(rx, ry)) + ", u decay " + fmt("%.3f", ku) + " (want 1), w decay " + fmt("%.3f", kw) +
               " (want 2), " + fmt("%.1f s", t));
}

void deltas_check() {
    std::vector<double> r, d1, d2;
    for (int j = 1; j <= 40; ++j) {
        const double rv = std::ldexp(1.0, -j);
        r.push_back(rv);
        d1.push_back(std::pow(rv, 3.4));
        d2.push_back(rv * rv / std::pow(std::log(1.0 / rv), 2));
    }
    RegularityReport a = regularity_from_deltas(r, d1);
    RegularityReport b = regularity_from_deltas(r, d2);
    ExponentFit fa = fit_remaining_exponents(a);
    ExponentFit fb = fit_remaining_exponents(b);
    const bool ok = a.k_star == 3 && std::fabs(fa.power_only - 0.4) <= 0.05 && b.k_star == 2 && std::fabs(fb.log_only - 1.0) <= 0.15;
    report(8, ok,
           "power case k*=" + std::to_string(a.k_star) + " exponent " + fmt("%.3f", fa.power_only) + "; log case k*=" +
               std::to_string(b.k_star) + " exponent " + fmt("%.3f", fb.log_only));
}

void asymptotic_ratio_check() {
    bool ok = true;
    double lo = INFINITY, hi = 0.0;
    std::string worst;
    auto note = [&](double v, const std::string& what) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
        if (!(v >= 0.5 && v <= 2.0)) {
            if (ok) worst = what + " " + fmt("%.3f", v);
            ok = false;
        }
    };
    const double M = 16.0;
    for (double X = 1e4; X <= 1e8 * 1.0001; X *= std::sqrt(10.0)) {
        for (int rho : {1, 2}) note(iterated_log_ratio(rho, 2.0, M, X), "iterated-log rho " + std::to_string(rho));
        for (double s : {0.3, 0.5, 0.7}) {
            note(power_log_head_ratio(s, 2.0, M, X), "head sigma " + fmt("%.1f", s));
            note(power_log_tail_ratio(s, 2.0, X), "tail sigma " + fmt("%.1f", s));
        }
    }
    report(9, ok, "ratios in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]" + (ok ? "" : ", first outside: " + worst));
}

void negative_check() {
    bool ok = true;
    std::string detail;
    DioResult d = dio_search({1.0, 0.5}, 1.0, 50);
    bool threw = false;
    try {
        certify({1.0, 0.5}, 1.0, 50);
    } catch (const ResonanceError&) {
        threw = true;
    }
    ok = ok && threw && d.resonant && d.witness == std::vector<int>{1, -2};
    detail += std::string("certify ") + (threw ? "rejects" : "accepts") + ", witness (" +
              (d.witness.size() == 2 ? std::to_string(d.witness[0]) + "," + std::to_string(d.witness[1]) : "") + "); ";

    const std::string outdir = (std::filesystem::temp_directory_path() / "modkam_acceptance_neg").string();
    std::filesystem::remove_all(outdir);
    cli::CommandConfig cfg;
    cfg.subcommand = "kam-run";
    cfg.input = std::string(MODKAM_TEST_DATA) + "/kam_lambda_one.json";
    cfg.output = outdir;
    std::ostringstream out, err;
    const int code = cli::dispatch(cfg, out, err);
    json res;
    std::ifstream rj(outdir + "/residual.json");
    if (rj) res = json::parse(rj);
    const bool h1 = res.contains("error") && res["error"].value("hypothesis", "") == "H1";
    int rows = 0;
    std::ifstream tc(outdir + "/trace.csv");
    for (std::string line; std::getline(tc, line);) rows += !line.empty();
    const bool no_steps = rows <= 1;
    ok = ok && code == 1 && h1 && no_steps;
    detail += "kam-run exit " + std::to_string(code) + (h1 ? ", H1 reported" : ", H1 missing") + (no_steps ? ", no steps" : ", steps ran");
    report(10, ok, detail);
}

} // namespace

int main() {
    guarded(1, kernel_moments_check);
    guarded(2, jackson_check);
    guarded(3, dini_check);
    guarded(4, critical_check);
    guarded(5, remaining_check);
    guarded(6, homological_check);
    guarded(7, kam_check);
    guarded(8, deltas_check);
    guarded(9, asymptotic_ratio_check);
    guarded(10, negative_check);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures ? 1 : 0;
}
