#include "modkam/jackson.hpp"

#include "modkam/error.hpp"
#include "modkam/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace modkam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double freq_norm(const TorusFunction& f, std::size_t flat) {
    double s = 0.0;
    for (int k : f.frequencies(flat)) s += static_cast<double>(k) * k;
    return std::sqrt(s);
}

double sup_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (auto c : v) m = std::max(m, std::abs(c));
    return m;
}

// coefficients continued to Im x_0 = v
TorusFunction shifted(const TorusFunction& f, double v) {
    TorusFunction g = f;
    auto& c = g.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= std::exp(-kTwoPi * f.frequencies(i)[0] * v);
    return g;
}

} // namespace

TorusFunction smooth(const TorusFunction& f, double r) {
    if (!(r > 0.0)) throw ArgumentError("smooth: r must be positive");
    TorusFunction g = f;
    auto& c = g.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i == 0) continue;  // Khat(0) = 1 exactly
        c[i] *= kernel_profile(kTwoPi * r * freq_norm(f, i));
    }
    return g;
}

std::vector<double> smooth_by_convolution(const Kernel& kernel, const TorusFunction& f, double r, const std::vector<double>& x) {
    if (kernel.dimension() != 1 || f.dim() != 1) throw ArgumentError("smooth_by_convolution: n = 1 only");
    if (!(r > 0.0)) throw ArgumentError("smooth_by_convolution: r must be positive");
    const int n = f.n();
    const double kmax = n / 2.0;
    const double band = 1.0 + kTwoPi * r * kmax;
    const double X = kernel.moment_extent();
    double h = 1.0;
    std::vector<double> Kt;
    if (band < kTwoPi * 0.95) {
        Kt = kernel.cached_samples();
    } else {
        h = 0.9 * kTwoPi / band;
        int cnt = static_cast<int>(X / h);
        for (int j = 0; j <= cnt; ++j) Kt.push_back(kernel.value_radial(j * h));
    }
    // factor quadrature of K(t) f(x - r t) through each mode
    const auto& c = f.coefficients();
    std::vector<cplx> mult(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        int k = f.frequency(static_cast<int>(i));
        long double acc = Kt[0];
        for (std::size_t j = 1; j < Kt.size(); ++j)
            acc += 2.0L * Kt[j] * std::cos(static_cast<long double>(kTwoPi) * k * r * (static_cast<long double>(j) * h));
        mult[i] = c[i] * static_cast<double>(acc * h);
    }
    std::vector<double> out;
    for (double xx : x) {
        cplx s(0.0, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            int k = f.frequency(static_cast<int>(i));
            s += mult[i] * std::exp(cplx(0.0, kTwoPi * k * xx));
        }
        out.push_back(s.real());
    }
    return out;
}

std::vector<cplx> taylor_comparator(const TorusFunction& f, int order, double v) {
    std::vector<cplx> acc(f.size(), cplx(0.0, 0.0));
    TorusFunction d = f;
    double fact = 1.0;
    for (int j = 0; j <= order; ++j) {
        if (j > 0) {
            d = d.derivative(0);
            fact *= j;
        }
        cplx w = std::pow(cplx(0.0, v), j) / fact;
        auto s = d.complex_samples();
        for (std::size_t i = 0; i < s.size(); ++i) acc[i] += w * s[i];
    }
    return acc;
}

TorusFunction synthesize_ck_function(int k, double alpha_hat, int n) {
    if (k < 0 || !(alpha_hat > 0.0 && alpha_hat <= 1.0)) throw ArgumentError("synthesize_ck_function: bad (k, alpha)");
    TorusFunction f(1, n);
    for (int m = 1; m < n / 2; ++m) {
        double c = 0.5 * std::pow(static_cast<double>(m), -(k + 1.0 + alpha_hat));
        f.set_coeff({m}, c);
        f.set_coeff({-m}, c);
    }
    return f;
}

SmoothErrorReport smooth_error_report(const TorusFunction& f, const ModulusSpec& m, int k, const std::vector<double>& r_list) {
    if (k < 0) throw ArgumentError("smooth_error_report: k must be nonnegative");
    if (r_list.size() < 2) throw ArgumentError("smooth_error_report: need at least two scales");
    SmoothErrorReport rep;
    std::vector<int> orders{0};
    if (k > 0) orders.push_back(k);
    for (double r : r_list) {
        if (!(r > 0.0 && r <= 1.0)) throw ArgumentError("smooth_error_report: scales must lie in (0,1]");
        TorusFunction s = smooth(f, r);
        for (int ord : orders) {
            TorusFunction fd = ord ? f.derivative(0, ord) : f;
            TorusFunction sd = ord ? s.derivative(0, ord) : s;
            SmoothErrorRow row;
            row.r = r;
            row.order = ord;
            row.error = (sd - fd).sup_norm_grid();
            auto cont = shifted(sd, r).complex_samples();
            auto cmp = taylor_comparator(fd, k - ord, r);
            for (std::size_t i = 0; i < cont.size(); ++i) cont[i] -= cmp[i];
            row.strip_error = sup_abs(cont);
            row.bound = std::pow(r, k - ord) * eval(m, std::min(r, m.delta));
            row.ratio = row.error / row.bound;
            rep.rows.push_back(row);
        }
    }
    for (int ord : orders) {
        SmoothErrorFit fit;
        fit.order = ord;
        std::vector<double> lr, lb, le, errs;
        for (const auto& row : rep.rows) {
            if (row.order != ord) continue;
            errs.push_back(row.error);
            if (row.error > 0.0) {
                lr.push_back(std::log(row.r));
                lb.push_back(std::log(row.bound));
                le.push_back(std::log(row.error));
            }
        }
        fit.exact = le.empty();
        for (std::size_t i = 1; i < errs.size(); ++i) {
            bool shrinking = rep.rows.size() > 0 && r_list[i] < r_list[i - 1];
            if (shrinking ? errs[i] > errs[i - 1] * (1.0 + 1e-9) : errs[i] < errs[i - 1] * (1.0 - 1e-9)) fit.non_monotone = true;
        }
        if (le.size() >= 2) {
            fit.slope_vs_r = fit_line(lr, le).slope;
            LineFit lf = fit_line(lb, le);
            fit.slope_vs_bound = lf.slope;
            fit.offset = lf.intercept;
        }
        rep.fits.push_back(fit);
    }
    return rep;
}

} // namespace modkam
