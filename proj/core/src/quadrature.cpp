#include "modkam/quadrature.hpp"

#include "modkam/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace modkam {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// accumulates ln of the integral of exp(h) over [p, q] into acc; pieces where h varies strongly are bisected,
// pieces far below the running total are dropped
void log_piece(const LogIntegrand& h, double p, double q, int depth, double& acc) {
    double hs[9];
    double hmax = kNegInf, hmin = HUGE_VAL;
    for (int i = 0; i <= 8; ++i) {
        hs[i] = h(p + (q - p) * i / 8.0);
        hmax = std::max(hmax, hs[i]);
        hmin = std::min(hmin, hs[i]);
    }
    if (hmax == kNegInf) return;
    if (!std::isfinite(hmax)) throw NumericError("log_integral: integrand not finite");
    if (acc != kNegInf && hmax + std::log(q - p) + 3.0 < acc - 40.0) return;
    if (hmax - hmin > 20.0 && depth < 400) {
        const double mid = 0.5 * (p + q);
        const double left = std::max({hs[0], hs[1], hs[2], hs[3], hs[4]});
        const double right = std::max({hs[4], hs[5], hs[6], hs[7], hs[8]});
        if (left >= right) {
            log_piece(h, p, mid, depth + 1, acc);
            log_piece(h, mid, q, depth + 1, acc);
        } else {
            log_piece(h, mid, q, depth + 1, acc);
            log_piece(h, p, mid, depth + 1, acc);
        }
        return;
    }
    auto f = [&](double s) {
        double v = h(s) - hmax;
        return v < -745.0 ? 0.0 : std::exp(v);
    };
    double err = 0.0;
    double I = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, p, q, 12, 1e-13, &err);
    if (!std::isfinite(I) || I < 0.0) throw NumericError("log_integral: quadrature failed");
    if (I == 0.0) return;
    acc = log_sum_exp(acc, hmax + std::log(I));
}

} // namespace

double log_sum_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double log_integral(const LogIntegrand& h, double a, double b) {
    if (!(b > a)) return kNegInf;
    const double len = b - a;
    std::vector<double> cuts{a, b};
    if (len > 2.0) {
        const double mid = a + 0.5 * len;
        cuts.push_back(mid);
        for (double w = 1.0; a + w < mid; w = 2.0 * w + 1.0) {
            cuts.push_back(a + w);
            cuts.push_back(b - w);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double acc = kNegInf;
    if (h(b) > h(a)) {
        for (std::size_t i = cuts.size() - 1; i >= 1; --i) log_piece(h, cuts[i - 1], cuts[i], 0, acc);
    } else {
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) log_piece(h, cuts[i], cuts[i + 1], 0, acc);
    }
    return acc;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw ArgumentError("fit_line: need at least two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < n; ++i)
        f.max_residual = std::max(f.max_residual, std::fabs(y[i] - f.intercept - f.slope * x[i]));
    return f;
}

PlaneFit fit_plane(const std::vector<double>& x1, const std::vector<double>& x2, const std::vector<double>& y) {
    const std::size_t n = y.size();
    if (n < 3 || x1.size() != n || x2.size() != n) throw ArgumentError("fit_plane: need at least three points");
    double m1 = 0, m2 = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { m1 += x1[i]; m2 += x2[i]; my += y[i]; }
    m1 /= static_cast<double>(n);
    m2 /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double d1 = x1[i] - m1, d2 = x2[i] - m2, dy = y[i] - my;
        a11 += d1 * d1; a12 += d1 * d2; a22 += d2 * d2;
        b1 += d1 * dy; b2 += d2 * dy;
    }
    double det = a11 * a22 - a12 * a12;
    if (!(std::fabs(det) > 1e-300)) throw NumericError("fit_plane: singular design");
    PlaneFit f;
    f.c1 = (b1 * a22 - b2 * a12) / det;
    f.c2 = (a11 * b2 - a12 * b1) / det;
    f.c0 = my - f.c1 * m1 - f.c2 * m2;
    return f;
}

TailIntegral tail_integral(const LogIntegrand& h, double s0, int doublings) {
    if (doublings < 12) throw ArgumentError("tail_integral: need at least 12 doublings");
    TailIntegral out;
    const double T0 = std::max(2.0 * s0, s0 + 1.0);
    double partial = log_integral(h, s0, T0);
    out.trace.push_back({T0, partial});
    std::vector<double> logD;  // increments over [T_{j-1}, T_j]
    double T = T0;
    const int W = 8;
    const double lo = std::log(0.95), hi = std::log(1.05);
    int J = doublings;
    for (int j = 1; j <= doublings; ++j) {
        double D = log_integral(h, T, 2.0 * T);
        T *= 2.0;
        logD.push_back(D);
        partial = log_sum_exp(partial, D);
        out.trace.push_back({T, partial});
        if (j < W + 1) continue;
        // clear-cut cases stop early: geometric decay far below the partial sum, or growth dominating it
        bool decay = true, grow = true;
        for (int i = j - W; i < j; ++i) {
            double a = logD[static_cast<std::size_t>(i - 1)], b = logD[static_cast<std::size_t>(i)];
            if (!(b - a <= lo) && !(a == kNegInf && b == kNegInf)) decay = false;
            if (!(b - a >= hi)) grow = false;
        }
        if (!(D < partial - 40.0)) decay = false;
        if (!(D >= partial - 1.0)) grow = false;
        if (decay || grow) {
            J = j;
            break;
        }
    }

    std::vector<double> rho;
    for (int j = J - W; j < J; ++j) {
        double a = logD[static_cast<std::size_t>(j - 1)], b = logD[static_cast<std::size_t>(j)];
        if (a == kNegInf && b == kNegInf) rho.push_back(kNegInf);
        else rho.push_back(b - a);
    }
    // growth rate of the truncated integrals
    {
        std::vector<double> xs, ys;
        for (std::size_t i = out.trace.size() - W; i < out.trace.size(); ++i) {
            xs.push_back(out.trace[i].upper);
            ys.push_back(out.trace[i].log_partial);
        }
        out.rate = fit_line(xs, ys).slope;
    }

    bool all_small = true, all_large = true;
    for (double r : rho) {
        if (!(r <= lo)) all_small = false;
        if (!(r >= hi)) all_large = false;
    }
    const double lastD = logD.back();
    if (all_small) {
        out.converges = true;
        double tail = kNegInf;
        if (lastD != kNegInf) {
            double r = std::exp(rho.back());
            tail = lastD + std::log(r / (1.0 - r));
        }
        out.log_value = log_sum_exp(partial, tail);
        return out;
    }
    if (all_large) {
        out.converges = false;
        out.log_value = partial;
        return out;
    }
    // ratio near one: algebraic decay of increments in j
    std::vector<double> lj, ld, jj;
    for (int j = J - W; j <= J; ++j) {
        lj.push_back(std::log(static_cast<double>(j)));
        jj.push_back(static_cast<double>(j));
        ld.push_back(logD[static_cast<std::size_t>(j - 1)]);
    }
    LineFit pf = fit_line(lj, ld);
    LineFit gf = fit_line(jj, ld);
    out.decay_power = -pf.slope;
    out.converges = out.decay_power > 1.1;
    if (out.converges) {
        double tail;
        if (gf.max_residual < pf.max_residual && gf.slope < 0.0) {
            double r = std::exp(gf.slope);
            tail = lastD + std::log(r / (1.0 - r));
        } else {
            double p = out.decay_power;
            tail = lastD + std::log(std::max(J / (p - 1.0) - 0.5, 1e-300));
        }
        out.log_value = log_sum_exp(partial, tail);
    } else {
        out.log_value = partial;
    }
    return out;
}

} // namespace modkam
