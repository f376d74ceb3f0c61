#include "modkam/modulus.hpp"

#include "modkam/error.hpp"
#include "modkam/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace modkam {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw ArgumentError(msg);
}

// interpolate ln w at ln x for the tabulated kind
double tabulated_log(const ModulusSpec& m, double lx) {
    const auto& X = m.log_x;
    const auto& W = m.log_w;
    const std::size_t n = X.size();
    if (n == 1) {
        if (m.has_tail && lx < X[0]) {
            double s0 = -X[0], s = -lx;
            return W[0] + m.tail.a * (lx - X[0]) - m.tail.b * (std::log(s) - std::log(s0));
        }
        return W[0];
    }
    if (lx < X[0]) {
        if (m.has_tail && X[0] < 0.0) {
            double s0 = -X[0], s = -lx;
            return W[0] + m.tail.a * (lx - X[0]) - m.tail.b * (std::log(s) - std::log(s0));
        }
        double slope = (W[1] - W[0]) / (X[1] - X[0]);
        return W[0] + slope * (lx - X[0]);
    }
    if (lx >= X[n - 1]) return W[n - 1];
    auto it = std::upper_bound(X.begin(), X.end(), lx);
    std::size_t j = static_cast<std::size_t>(it - X.begin());
    double t = (lx - X[j - 1]) / (X[j] - X[j - 1]);
    return W[j - 1] + t * (W[j] - W[j - 1]);
}

} // namespace

std::string to_string(ModulusKind k) {
    switch (k) {
    case ModulusKind::hoelder: return "hoelder";
    case ModulusKind::log_hoelder: return "log_hoelder";
    case ModulusKind::gen_log_hoelder: return "gen_log_hoelder";
    case ModulusKind::power_log: return "power_log";
    case ModulusKind::tabulated: return "tabulated";
    }
    return "?";
}

ModulusKind modulus_kind_from_string(const std::string& s) {
    if (s == "hoelder") return ModulusKind::hoelder;
    if (s == "log_hoelder") return ModulusKind::log_hoelder;
    if (s == "gen_log_hoelder") return ModulusKind::gen_log_hoelder;
    if (s == "power_log") return ModulusKind::power_log;
    if (s == "tabulated") return ModulusKind::tabulated;
    throw ArgumentError("unknown modulus kind '" + s + "'");
}

double gen_log_default_log_delta(int depth) {
    // L_1(delta) = exp^{rho-2}(2) for rho >= 2, ln 2 for rho = 1
    if (depth <= 1) return std::log(0.5);
    double L1 = 2.0;
    for (int i = 2; i < depth; ++i) L1 = std::exp(L1);
    return -L1;
}

double gen_log_default_delta(int depth) { return std::exp(gen_log_default_log_delta(depth)); }

ModulusSpec ModulusSpec::hoelder(double alpha, double delta) {
    require(alpha > 0.0 && alpha <= 1.0, "hoelder: alpha must lie in (0,1]");
    require(delta > 0.0, "hoelder: delta must be positive");
    ModulusSpec m;
    m.kind = ModulusKind::hoelder;
    m.alpha = alpha;
    m.delta = delta;
    return m;
}

ModulusSpec ModulusSpec::log_hoelder(double lambda, double delta) {
    require(lambda > 0.0, "log_hoelder: lambda must be positive");
    require(delta > 0.0 && delta < 1.0, "log_hoelder: delta must lie in (0,1)");
    ModulusSpec m;
    m.kind = ModulusKind::log_hoelder;
    m.lambda = lambda;
    m.delta = delta;
    return m;
}

ModulusSpec ModulusSpec::gen_log_hoelder(int depth, double lambda) {
    return gen_log_hoelder(depth, lambda, gen_log_default_delta(depth));
}

ModulusSpec ModulusSpec::gen_log_hoelder(int depth, double lambda, double delta) {
    require(depth >= 1, "gen_log_hoelder: depth must be >= 1");
    require(depth <= 4, "gen_log_hoelder: depth above 4 is not representable in double");
    require(lambda > 0.0, "gen_log_hoelder: lambda must be positive");
    ModulusSpec m;
    m.kind = ModulusKind::gen_log_hoelder;
    m.depth = depth;
    m.lambda = lambda;
    m.delta = delta;
    require(delta > 0.0 && delta < 1.0, "gen_log_hoelder: delta must lie in (0,1)");
    // every iterated log must be positive at delta
    double L = -std::log(delta);
    for (int i = 1; i < depth; ++i) {
        require(L > 1.0, "gen_log_hoelder: iterated logarithm not positive at delta");
        L = std::log(L);
    }
    require(L > 0.0, "gen_log_hoelder: iterated logarithm not positive at delta");
    return m;
}

ModulusSpec ModulusSpec::power_log(double a, double lambda, double delta) {
    require(a >= 0.0 && a < 1.0, "power_log: a must lie in [0,1)");
    require(lambda > 0.0, "power_log: lambda must be positive");
    require(delta > 0.0 && delta < 1.0, "power_log: delta must lie in (0,1)");
    ModulusSpec m;
    m.kind = ModulusKind::power_log;
    m.alpha = a;
    m.lambda = lambda;
    m.delta = delta;
    return m;
}

ModulusSpec ModulusSpec::tabulated(const std::vector<std::pair<double, double>>& samples) {
    std::vector<double> lx, lw;
    for (auto [x, w] : samples) {
        require(x > 0.0 && w > 0.0, "tabulated: samples must be positive");
        lx.push_back(std::log(x));
        lw.push_back(std::log(w));
    }
    return tabulated_log(std::move(lx), std::move(lw));
}

ModulusSpec ModulusSpec::tabulated_log(std::vector<double> lx, std::vector<double> lw) {
    require(!lx.empty() && lx.size() == lw.size(), "tabulated: need matching nonempty sample arrays");
    for (std::size_t j = 0; j < lx.size(); ++j)
        require(std::isfinite(lx[j]) && std::isfinite(lw[j]), "tabulated: samples must be finite");
    for (std::size_t j = 1; j < lx.size(); ++j) {
        require(lx[j] > lx[j - 1], "tabulated: abscissae must be strictly increasing");
        require(lw[j] >= lw[j - 1], "tabulated: values must be nondecreasing");
    }
    ModulusSpec m;
    m.kind = ModulusKind::tabulated;
    m.log_x = std::move(lx);
    m.log_w = std::move(lw);
    m.delta = std::exp(m.log_x.back());
    return m;
}

double ModulusSpec::log_delta() const {
    if (kind == ModulusKind::tabulated) return log_x.back();
    return std::log(delta);
}

double log_eval(const ModulusSpec& m, double s) {
    const double ld = m.log_delta();
    if (!(s >= -ld - 1e-15 * std::fabs(ld) - 1e-300) || std::isnan(s))
        throw DomainError("modulus evaluated outside (0, delta]");
    switch (m.kind) {
    case ModulusKind::hoelder:
        return -m.alpha * s;
    case ModulusKind::log_hoelder:
        return -m.lambda * std::log(s);
    case ModulusKind::power_log:
        return -m.alpha * s - m.lambda * std::log(s);
    case ModulusKind::gen_log_hoelder: {
        double L = s, acc = 0.0;
        for (int i = 1; i < m.depth; ++i) {
            acc -= std::log(L);
            L = std::log(L);
        }
        return acc - m.lambda * std::log(L);
    }
    case ModulusKind::tabulated:
        return tabulated_log(m, -s);
    }
    return 0.0;
}

double eval(const ModulusSpec& m, double x) {
    if (!(x > 0.0) || x > m.delta * (1.0 + 1e-15))
        throw DomainError("modulus evaluated outside (0, delta]");
    switch (m.kind) {
    case ModulusKind::hoelder:
        return std::pow(x, m.alpha);
    case ModulusKind::log_hoelder:
        return std::pow(-std::log(x), -m.lambda);
    case ModulusKind::power_log:
        return std::pow(x, m.alpha) * std::pow(-std::log(x), -m.lambda);
    default:
        return std::exp(log_eval(m, -std::log(x)));
    }
}

std::string to_string(Property p) {
    switch (p) {
    case Property::semi_separable: return "semi_separable";
    case Property::weak_homogeneous: return "weak_homogeneous";
    case Property::convex: return "convex";
    case Property::comparison: return "comparison";
    }
    return "?";
}

std::string to_string(Ordering o) {
    switch (o) {
    case Ordering::weaker: return "weaker";
    case Ordering::strictly_weaker: return "strictly_weaker";
    case Ordering::equivalent: return "equivalent";
    case Ordering::stronger: return "stronger";
    case Ordering::strictly_stronger: return "strictly_stronger";
    case Ordering::incomparable: return "incomparable";
    }
    return "?";
}

std::vector<double> geometric_grid(double hi, double lo, int count) {
    if (count < 2 || !(hi > 0.0) || !(lo > 0.0)) throw ArgumentError("geometric_grid: bad arguments");
    std::vector<double> g(static_cast<std::size_t>(count));
    double lh = std::log(hi), ll = std::log(lo);
    for (int j = 0; j < count; ++j) g[static_cast<std::size_t>(j)] = std::exp(lh + (ll - lh) * j / (count - 1));
    g.front() = hi;
    g.back() = lo;
    return g;
}

std::vector<double> default_semi_grid() { return geometric_grid(1.0, 1e8, 33); }

std::vector<double> default_tail_grid(const ModulusSpec& m) {
    double hi = std::min(m.delta, 0.5);
    return geometric_grid(hi, 1e-12, 60);
}

namespace {

// bounded tail: nonincreasing over the last third, or below the head maximum
bool bounded_tail(const std::vector<double>& v) {
    const std::size_t n = v.size();
    const std::size_t start = n - std::max<std::size_t>(n / 3, 2);
    bool nonincreasing = true;
    for (std::size_t j = start + 1; j < n; ++j)
        if (v[j] > v[j - 1] * (1.0 + 1e-9) + 1e-300) nonincreasing = false;
    if (nonincreasing) return true;
    double head = 0.0;
    for (std::size_t j = 0; j < start; ++j) head = std::max(head, v[j]);
    double tail = 0.0;
    for (std::size_t j = start; j < n; ++j) tail = std::max(tail, v[j]);
    return start > 0 && tail <= head * (1.0 + 1e-9);
}

} // namespace

PropertyReport semi_separability(const ModulusSpec& m, const std::vector<double>& x_grid, int r_resolution) {
    if (x_grid.size() < 3) throw ArgumentError("semi_separability: grid needs at least 3 points");
    if (r_resolution < 2) throw ArgumentError("semi_separability: r_resolution must be >= 2");
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
        if (!(x_grid[j] >= 1.0)) throw ArgumentError("semi_separability: grid points must be >= 1");
        if (j > 0 && !(x_grid[j] > x_grid[j - 1])) throw ArgumentError("semi_separability: grid must increase");
    }
    PropertyReport rep;
    rep.property = Property::semi_separable;
    const double ld = m.log_delta();
    std::vector<double> per_x;
    for (double x : x_grid) {
        const double lx = std::log(x);
        // r from delta/x down twelve decades further: s_r = -ln r
        const double s_top = lx - ld;
        double best = 0.0;
        for (int i = 0; i < r_resolution; ++i) {
            double s = s_top + 12.0 * std::log(10.0) * i / (r_resolution - 1);
            if (s < -ld) s = -ld;
            double v = log_eval(m, std::max(s - lx, -ld)) - log_eval(m, s);
            best = std::max(best, std::exp(v));
        }
        rep.witness.push_back({x, best});
        per_x.push_back(best / x);
    }
    rep.bound_constant = *std::max_element(per_x.begin(), per_x.end());
    rep.verdict = bounded_tail(per_x);
    return rep;
}

PropertyReport weak_homogeneity(const ModulusSpec& m, double a, const std::vector<double>& x_grid) {
    if (!(a > 0.0 && a < 1.0)) throw ArgumentError("weak_homogeneity: a must lie in (0,1)");
    if (x_grid.size() < 3) throw ArgumentError("weak_homogeneity: grid needs at least 3 points");
    PropertyReport rep;
    rep.property = Property::weak_homogeneous;
    std::vector<double> ratio;
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
        double x = x_grid[j];
        if (j > 0 && !(x < x_grid[j - 1])) throw ArgumentError("weak_homogeneity: grid must decrease");
        double s = -std::log(x);
        double v = std::exp(log_eval(m, s) - log_eval(m, s - std::log(a)));
        rep.witness.push_back({x, v});
        ratio.push_back(v);
    }
    const std::size_t start = ratio.size() - std::max<std::size_t>(ratio.size() / 3, 2);
    rep.bound_constant = *std::max_element(ratio.begin() + static_cast<long>(start), ratio.end());
    rep.verdict = bounded_tail(ratio) && std::isfinite(rep.bound_constant);
    std::vector<double> t, rt;
    for (std::size_t j = start; j < ratio.size(); ++j) {
        t.push_back(1.0 / -std::log(x_grid[j]));
        rt.push_back(ratio[j]);
    }
    rep.limit_estimate = std::clamp(fit_line(t, rt).intercept, 0.0, rep.bound_constant);
    return rep;
}

Ordering compare(const ModulusSpec& m1, const ModulusSpec& m2, const std::vector<double>& x_grid) {
    if (x_grid.size() < 6) throw ArgumentError("compare: grid needs at least 6 points");
    const double ld = std::min(m1.log_delta(), m2.log_delta());
    std::vector<double> lq;
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
        double x = x_grid[j];
        if (!(x > 0.0) || std::log(x) > ld + 1e-15) throw DomainError("compare: grid leaves the common domain");
        if (j > 0 && !(x < x_grid[j - 1])) throw ArgumentError("compare: grid must decrease");
        double s = -std::log(x);
        lq.push_back(log_eval(m2, s) - log_eval(m1, s));
    }
    const std::size_t n = lq.size();
    const std::size_t start = n - std::max<std::size_t>(n / 3, 2);
    double lo = *std::min_element(lq.begin(), lq.end());
    double hi = *std::max_element(lq.begin(), lq.end());
    if (hi - lo <= 0.1) return Ordering::equivalent;
    bool dec = true, inc = true;
    for (std::size_t j = start + 1; j < n; ++j) {
        if (lq[j] > lq[j - 1]) dec = false;
        if (lq[j] < lq[j - 1]) inc = false;
    }
    double drift = lq[n - 1] - lq[start];
    if (dec && drift < -0.1) return Ordering::strictly_weaker;
    if (inc && drift > 0.1) return Ordering::strictly_stronger;
    double head_hi = *std::max_element(lq.begin(), lq.begin() + static_cast<long>(start));
    double head_lo = *std::min_element(lq.begin(), lq.begin() + static_cast<long>(start));
    double tail_hi = *std::max_element(lq.begin() + static_cast<long>(start), lq.end());
    double tail_lo = *std::min_element(lq.begin() + static_cast<long>(start), lq.end());
    bool bounded_above = tail_hi <= head_hi + 0.1;
    bool bounded_below = tail_lo >= head_lo - 0.1;
    if (bounded_above && bounded_below) return Ordering::equivalent;
    if (bounded_above) return Ordering::weaker;
    if (bounded_below) return Ordering::stronger;
    return Ordering::incomparable;
}

PropertyReport convexity_check(const ModulusSpec& m, const std::vector<double>& x_grid) {
    if (x_grid.size() < 3) throw ArgumentError("convexity_check: grid needs at least 3 points");
    std::vector<double> xs = x_grid;
    std::sort(xs.begin(), xs.end());
    for (std::size_t j = 1; j < xs.size(); ++j)
        if (!(xs[j] > xs[j - 1])) throw ArgumentError("convexity_check: grid points must be distinct");
    std::vector<double> w;
    for (double x : xs) w.push_back(eval(m, x));

    PropertyReport rep;
    rep.property = Property::convex;
    std::vector<double> slope;
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
        double s = (w[j + 1] - w[j]) / (xs[j + 1] - xs[j]);
        slope.push_back(s);
        rep.witness.push_back({0.5 * (xs[j] + xs[j + 1]), s});
    }
    // near 0+: points at least two decades below the top of the grid
    std::size_t upto = 0;
    while (upto < xs.size() && xs[upto] <= 1e-2 * xs.back()) ++upto;
    if (upto < 3) upto = std::max<std::size_t>(3, xs.size() / 2);
    bool nonincreasing = true;
    double extreme = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 2 < upto; ++j) {
        double d2 = (slope[j + 1] - slope[j]) / (0.5 * (xs[j + 2] - xs[j]));
        extreme = std::max(extreme, d2);
        double tol = 1e-10 * std::max(std::fabs(slope[j]), std::fabs(slope[j + 1]));
        if (slope[j + 1] > slope[j] + tol) nonincreasing = false;
    }
    rep.second_difference_extreme = extreme;
    rep.verdict = nonincreasing;
    rep.bound_constant = slope.front();
    if (rep.verdict) rep.implied = {Property::semi_separable, Property::weak_homogeneous};
    return rep;
}

} // namespace modkam
