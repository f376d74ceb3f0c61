#include "modkam/regularity.hpp"

#include "modkam/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace modkam {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

IntegralVerdict to_verdict(const TailIntegral& t) {
    IntegralVerdict v;
    v.converges = t.converges;
    v.log_value = t.log_value;
    v.value = t.converges ? std::exp(t.log_value) : std::numeric_limits<double>::quiet_NaN();
    v.divergence_rate = t.converges ? 0.0 : t.rate;
    v.decay_power = t.decay_power;
    v.truncation_trace = t.trace;
    return v;
}

double lower_s(const ModulusSpec& m) { return std::max(0.0, -m.log_delta()); }

// ln of the integral of exp(h) over [S, inf) for an integrand known to converge
double convergent_tail_log(const LogIntegrand& h, double S) {
    const double href = h(S) + std::log(S);
    auto f = [&](double u) -> double {
        if (u <= 0.0) return 0.0;
        double e = h(S / u) - href + std::log(S) - 2.0 * std::log(u);
        return e < -745.0 ? 0.0 : std::exp(e);
    };
    // u = e^{-t} keeps s = S/u below S * 1e12 and lets the adaptive rule bisect across table kinks;
    // the piece u < u0 is closed with a local power law
    const double u0 = 1e-12;
    const double t0 = -std::log(u0);
    auto g = [&](double t) { return f(std::exp(-t)) * std::exp(-t); };
    double err = 0.0;
    double I = std::numeric_limits<double>::quiet_NaN();
    try {
        I = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, t0, 15, 1e-10, &err);
        const double f0 = f(u0), f1 = f(10.0 * u0);
        if (f0 > 0.0 && f1 > 0.0) {
            const double c = std::log10(f1 / f0);
            I = c > -1.0 ? I + f0 * u0 / (c + 1.0) : std::numeric_limits<double>::quiet_NaN();
        }
    } catch (const std::exception&) {
        I = std::numeric_limits<double>::quiet_NaN();
    }
    if (std::isfinite(I) && I > 0.0 && err <= 1e-6 * I) return href + std::log(I);
    TailIntegral t = tail_integral(h, S);
    if (!t.converges) throw NumericError("balance: lower integral does not converge");
    return t.log_value;
}

} // namespace

IntegralVerdict weighted_integral(const ModulusSpec& m, double q) {
    const double c = -(q + 1.0);
    auto h = [&m, c](double s) { return c * s + log_eval(m, s); };
    return to_verdict(tail_integral(h, lower_s(m)));
}

IntegralVerdict dini_integral(const ModulusSpec& m, int k, double tau) {
    return weighted_integral(m, static_cast<double>(k) - 2.0 * tau - 3.0);
}

IntegralVerdict classical_dini(const ModulusSpec& m) { return weighted_integral(m, -1.0); }

PhiFunction phi_from_modulus(const ModulusSpec& m, int k, double tau, int i) {
    if (i != 1 && i != 2) throw ArgumentError("phi_from_modulus: i must be 1 or 2");
    PhiFunction phi;
    phi.base_modulus = m;
    phi.power_shift = static_cast<double>(k) - (3.0 - i) * tau - 1.0;
    phi.label = i;
    return phi;
}

IntegralVerdict phi_order_integral(const PhiFunction& phi, int order) {
    return weighted_integral(phi.base_modulus, phi.power_shift - static_cast<double>(order));
}

int critical_exponent(const PhiFunction& phi) {
    if (!phi_order_integral(phi, 1).converges)
        throw AnalysisError("critical_exponent: phi/x diverges, phi too rough or degenerate");
    for (int k = 0; k <= 64; ++k) {
        if (!phi_order_integral(phi, k + 2).converges) return k;
    }
    throw AnalysisError("critical_exponent: no critical order in [0, 64], phi too regular or degenerate");
}

std::vector<double> default_log_gamma_grid(double eps, double log_gamma_floor, int count) {
    if (count < 3) throw ArgumentError("default_log_gamma_grid: count must be >= 3");
    double Ta = -std::log(eps) + 3.0;
    double Tb = -log_gamma_floor;
    if (!(Tb > Ta)) throw ArgumentError("default_log_gamma_grid: floor above eps");
    std::vector<double> g;
    for (int j = 0; j < count; ++j) g.push_back(-Ta * std::pow(Tb / Ta, static_cast<double>(j) / (count - 1)));
    return g;
}

RegularityReport remaining_modulus(const PhiFunction& phi, int k_star, double eps, const std::vector<double>& gamma_grid,
                                   const RemainingOptions& opt) {
    std::vector<double> lg;
    for (double g : gamma_grid) {
        if (!(g > 0.0)) throw ArgumentError("remaining_modulus: gamma must be positive");
        lg.push_back(std::log(g));
    }
    return remaining_modulus_log(phi, k_star, eps, lg, opt);
}

RegularityReport remaining_modulus_log(const PhiFunction& phi, int k_star, double eps,
                                       const std::vector<double>& log_gamma_grid, const RemainingOptions& opt) {
    if (k_star < 0) throw ArgumentError("remaining_modulus: k_star must be nonnegative");
    if (!(eps > 0.0)) throw ArgumentError("remaining_modulus: eps must be positive");
    if (log_gamma_grid.size() < 2) throw ArgumentError("remaining_modulus: gamma grid needs at least two points");
    const ModulusSpec& m = phi.base_modulus;
    const double le = std::log(eps);
    if (le > m.log_delta() + 1e-12) throw ArgumentError("remaining_modulus: eps exceeds the modulus domain");
    const double s_eps = -le;
    const double p = phi.power_shift;
    const double k = static_cast<double>(k_star);
    auto hL = [&](double s) { return (k + 1.0 - p) * s + log_eval(m, s); };
    auto hR = [&](double s) { return (k - p) * s + log_eval(m, s); };

    RegularityReport rep;
    rep.k_star = k_star;
    rep.epsilon = eps;
    rep.tolerance = opt.tolerance;
    double prev = std::numeric_limits<double>::infinity();
    for (double lg : log_gamma_grid) {
        if (!(lg <= le)) throw ArgumentError("remaining_modulus: gamma must not exceed eps");
        if (!(lg < prev)) throw ArgumentError("remaining_modulus: gamma grid must decrease");
        prev = lg;
        const double T = -lg;
        auto sides = [&](double S, double& lhs, double& rhs) {
            lhs = lg + log_integral(hL, s_eps, S);
            rhs = convergent_tail_log(hR, S);
        };
        auto F = [&](double S) {
            double a, b;
            sides(S, a, b);
            return a - b;
        };
        double Slo = std::max(T, s_eps);
        double Shi = 2.0 * T;
        double Flo = F(Slo), Fhi = F(Shi);
        // L above gamma toward eps, or below gamma^2
        for (int j = 0; j < 60 && Flo > 0.0 && Slo > s_eps; ++j) {
            Shi = Slo;
            Fhi = Flo;
            Slo = s_eps + 0.5 * (Slo - s_eps);
            if (Slo - s_eps < 1e-12 * std::max(1.0, s_eps)) break;
            Flo = F(Slo);
        }
        for (int j = 0; j < 8 && Fhi < 0.0; ++j) {
            Slo = Shi;
            Flo = Fhi;
            Shi *= 2.0;
            Fhi = F(Shi);
        }
        if (!(Flo <= 0.0 && Fhi >= 0.0)) {
            std::ostringstream os;
            os.precision(6);
            os << "remaining_modulus: balance bracket failure at ln(gamma) = " << lg << " (ln LHS - ln RHS = " << Flo
               << " at ln(1/L) = " << Slo << ", " << Fhi << " at ln(1/L) = " << Shi << ")";
            throw AnalysisError(os.str());
        }
        double S;
        if (Flo == 0.0) S = Slo;
        else if (Fhi == 0.0) S = Shi;
        else {
            std::uintmax_t iters = 200;
            auto tol = [](double a, double b) { return std::fabs(b - a) <= 1e-13 * std::max(1.0, std::fabs(a)); };
            auto r = boost::math::tools::toms748_solve(F, Slo, Shi, Flo, Fhi, tol, iters);
            S = 0.5 * (r.first + r.second);
        }
        double a, b;
        sides(S, a, b);
        rep.log_gamma.push_back(lg);
        rep.log_L.push_back(-S);
        rep.log_omega_star.push_back(0.5 * (a + b));
        double mis = 1.0 - std::exp(-std::fabs(a - b));
        rep.balance_mismatch.push_back(mis);
        rep.balance_residual = std::max(rep.balance_residual, mis);
    }

    // tabulated modulus over increasing gamma, monotone envelope
    std::vector<double> lx(rep.log_gamma.rbegin(), rep.log_gamma.rend());
    std::vector<double> lw(rep.log_omega_star.rbegin(), rep.log_omega_star.rend());
    for (std::size_t j = 1; j < lw.size(); ++j) lw[j] = std::max(lw[j], lw[j - 1]);
    rep.remaining_modulus = ModulusSpec::tabulated_log(std::move(lx), std::move(lw));
    return rep;
}

ExponentFit fit_remaining_exponents(const RegularityReport& rep) {
    const auto& lg = rep.log_gamma;
    const auto& lw = rep.log_omega_star;
    std::vector<double> llt;
    for (double g : lg) llt.push_back(std::log(-g));
    ExponentFit f;
    f.power_only = fit_line(lg, lw).slope;
    f.log_only = -fit_line(llt, lw).slope;
    if (lg.size() >= 3) {
        PlaneFit pf = fit_plane(lg, llt, lw);
        f.power = pf.c1;
        f.log_power = -pf.c2;
    }
    return f;
}

RegularityReport regularity_from_deltas(const std::vector<double>& r_seq, const std::vector<double>& deltas) {
    const std::size_t n = r_seq.size();
    if (n < 4 || deltas.size() != n) throw ArgumentError("regularity_from_deltas: need matching sequences of length >= 4");
    for (std::size_t j = 0; j < n; ++j) {
        if (!(r_seq[j] > 0.0) || !std::isfinite(r_seq[j])) throw ArgumentError("regularity_from_deltas: radii must be positive");
        if (!(deltas[j] >= 0.0) || !std::isfinite(deltas[j]))
            throw ArgumentError("regularity_from_deltas: deltas must be finite and nonnegative");
    }
    const double ratio = r_seq[1] / r_seq[0];
    if (!(ratio < 1.0)) throw ArgumentError("regularity_from_deltas: radii must decrease");
    for (std::size_t j = 1; j < n; ++j)
        if (std::fabs(r_seq[j] / r_seq[j - 1] - ratio) > 1e-9 * ratio)
            throw ArgumentError("regularity_from_deltas: radii must be geometric");
    if (!(r_seq[0] < 1.0)) throw ArgumentError("regularity_from_deltas: r_0 must be below 1");

    RegularityReport rep;
    rep.epsilon = r_seq[0];
    if (std::all_of(deltas.begin(), deltas.end(), [](double d) { return d == 0.0; })) {
        rep.analytic_limit = true;
        return rep;
    }

    // upper envelope: phi(r_nu) = max over radii <= r_nu
    std::vector<double> env(n);
    double run = 0.0;
    for (std::size_t j = n; j-- > 0;) {
        run = std::max(run, deltas[j]);
        env[j] = run;
    }
    std::vector<double> lx, lw;
    for (std::size_t j = n; j-- > 0;) {
        if (env[j] > 0.0) {
            lx.push_back(std::log(r_seq[j]));
            lw.push_back(std::log(env[j]));
        }
    }
    if (lx.size() < 4) throw AnalysisError("regularity_from_deltas: fewer than four nonzero deltas, cannot fit a decay law");
    if (!(lw.back() > lw.front() + 1e-12))
        throw AnalysisError("regularity_from_deltas: deltas do not decay");

    // tail law on the smallest third
    const std::size_t m = std::max<std::size_t>(lx.size() / 3, 4);
    std::vector<double> tx, tl, tw;
    for (std::size_t j = 0; j < m; ++j) {
        tx.push_back(lx[j]);
        tl.push_back(std::log(-lx[j]));
        tw.push_back(lw[j]);
    }
    TailLaw law;
    try {
        PlaneFit pf = fit_plane(tx, tl, tw);
        law.a = pf.c1;
        law.b = -pf.c2;
    } catch (const NumericError&) {
        law.a = fit_line(tx, tw).slope;
        law.b = 0.0;
    }
    if (!(law.a > 0.0)) throw AnalysisError("regularity_from_deltas: deltas do not decay toward r -> 0");

    ModulusSpec fit = ModulusSpec::tabulated_log(lx, lw);
    fit.has_tail = true;
    fit.tail = law;

    PhiFunction phi{fit, 0.0, 0};
    int ks = critical_exponent(phi);
    const double r0 = r_seq.front();
    const double Ta = -std::log(r0) + 4.0 * std::log(2.0);
    // the tail law carries the fit below the smallest radius
    const double Tb = std::max(-lx.front(), 4.0 * Ta);
    std::vector<double> lg;
    const int count = 16;
    for (int j = 0; j < count; ++j) lg.push_back(-Ta * std::pow(Tb / Ta, static_cast<double>(j) / (count - 1)));
    RegularityReport out = remaining_modulus_log(phi, ks, r0, lg);
    out.phi_fit = fit;
    return out;
}

} // namespace modkam
