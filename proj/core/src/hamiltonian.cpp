#include "modkam/hamiltonian.hpp"

#include "modkam/error.hpp"
#include "modkam/jackson.hpp"
#include "modkam/regularity.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace modkam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_zero(const TorusFunction& f) {
    for (auto c : f.coefficients())
        if (c != cplx(0.0, 0.0)) return false;
    return true;
}

double factorial(int j) {
    double f = 1.0;
    for (int i = 2; i <= j; ++i) f *= i;
    return f;
}

// all multi-indices of length n with |alpha| <= order
void multi_indices(int n, int order, std::vector<std::vector<int>>& out) {
    std::vector<int> a(static_cast<std::size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int d, int left) {
        if (d == n) {
            out.push_back(a);
            return;
        }
        for (int j = 0; j <= left; ++j) {
            a[static_cast<std::size_t>(d)] = j;
            rec(d + 1, left - j);
        }
        a[static_cast<std::size_t>(d)] = 0;
    };
    rec(0, order);
}

TorusFunction mixed_derivative(const TorusFunction& f, const std::vector<int>& alpha) {
    TorusFunction g = f;
    for (std::size_t d = 0; d < alpha.size(); ++d)
        if (alpha[d] > 0) g = g.derivative(static_cast<int>(d), alpha[d]);
    return g;
}

std::vector<double> abs_samples(const TorusFunction& f) {
    auto s = f.samples();
    for (auto& v : s) v = std::fabs(v);
    return s;
}

} // namespace

// ---------------------------------------------------------------- action profile

double ActionProfile::top(double lambda, double s) {
    double a = std::fabs(s);
    if (a == 0.0) return 0.0;
    return std::pow(1.0 - std::log(a), -lambda);
}

ActionProfile::ActionProfile(double lambda, int samples) : lambda_(lambda) {
    if (!(lambda > 0.0)) throw ArgumentError("ActionProfile: lambda must be positive");
    if (samples < 64) throw ArgumentError("ActionProfile: too few samples");
    nodes_ = static_cast<std::size_t>(samples) + 1;
    h_ = 1.0 / samples;
    for (auto& d : d_) d.assign(nodes_, 0.0);
    for (std::size_t i = 0; i < nodes_; ++i) d_[6][i] = top(lambda, static_cast<double>(i) * h_);
    for (int m = 5; m >= 0; --m) {
        auto& lo = d_[m];
        const auto& f = d_[m + 1];
        for (std::size_t i = 1; i < nodes_; ++i) {
            double step = 0.5 * h_ * (f[i - 1] + f[i]);
            if (m + 2 <= 6 && m != 5) step -= h_ * h_ / 12.0 * (d_[m + 2][i] - d_[m + 2][i - 1]);
            lo[i] = lo[i - 1] + step;
        }
    }
}

double ActionProfile::derivative(int order, double s) const {
    if (order < 0 || order > 6) throw ArgumentError("ActionProfile: derivative order must lie in [0, 6]");
    const double a = std::fabs(s);
    if (a > 1.0 + 1e-12) throw DomainError("ActionProfile: |s| must be <= 1");
    const double sign = (s < 0.0 && order % 2 == 1) ? -1.0 : 1.0;
    if (order == 6) return top(lambda_, a);
    std::size_t i = std::min(nodes_ - 1, static_cast<std::size_t>(std::llround(a / h_)));
    const double si = static_cast<double>(i) * h_;
    const double t = a - si;
    double v = 0.0;
    const int m = 5 - order;
    for (int j = 0; j <= m; ++j) v += d_[order + j][i] * std::pow(t, j) / factorial(j);
    // remainder: int_{si}^{a} P6(u) (a-u)^m / m! du, 4-point Gauss
    if (t != 0.0) {
        static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
        static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
        double rem = 0.0;
        for (int q = 0; q < 4; ++q) {
            double u = si + 0.5 * t * (gx[q] + 1.0);
            rem += gw[q] * top(lambda_, u) * std::pow(a - u, m);
        }
        v += 0.5 * t * rem / factorial(m);
    }
    return sign * v;
}

// ---------------------------------------------------------------- model kinds

std::string to_string(ModelKind k) {
    switch (k) {
    case ModelKind::integrable: return "integrable";
    case ModelKind::hoelder_test: return "hoelder_test";
    case ModelKind::log_hoelder_example: return "log_hoelder_example";
    case ModelKind::custom: return "custom";
    }
    return "custom";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "integrable") return ModelKind::integrable;
    if (s == "hoelder_test") return ModelKind::hoelder_test;
    if (s == "log_hoelder_example") return ModelKind::log_hoelder_example;
    if (s == "custom") return ModelKind::custom;
    throw ArgumentError("unknown model kind '" + s + "'");
}

HamiltonianModel build_example_hamiltonian(ModelKind kind, const ExampleParams& p) {
    const int n = static_cast<int>(p.omega.size());
    if (n < 1) throw ArgumentError("build_example_hamiltonian: omega must be nonempty");
    if (!(p.M > 0.0)) throw ArgumentError("build_example_hamiltonian: M must be positive");
    if (!(p.epsilon >= 0.0)) throw ArgumentError("build_example_hamiltonian: epsilon must be nonnegative");
    if (p.lattice < 4 || p.lattice % 2) throw ArgumentError("build_example_hamiltonian: lattice must be even and >= 4");
    if (kind != ModelKind::integrable && !(p.epsilon > 0.0))
        throw ArgumentError("build_example_hamiltonian: epsilon must be positive");

    HamiltonianModel m;
    m.n = n;
    m.kind = kind;
    m.M = p.M;
    m.epsilon = p.epsilon;
    m.omega = p.omega;
    m.k = p.k;
    const int N = p.lattice;
    m.h0 = TorusFunction(n, N);
    for (int i = 0; i < n; ++i) m.h1.push_back(TorusFunction::constant(n, N, p.omega[static_cast<std::size_t>(i)]));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.h2.push_back(TorusFunction::constant(n, N, i == j ? 2.0 / p.M : 0.0));

    switch (kind) {
    case ModelKind::integrable:
        m.modulus = ModulusSpec::hoelder(1.0);
        break;
    case ModelKind::log_hoelder_example: {
        if (n != 2) throw ArgumentError("log_hoelder_example: n must be 2");
        if (!(p.lambda > 0.0)) throw ArgumentError("log_hoelder_example: lambda must be positive");
        m.k = 6;
        m.modulus = ModulusSpec::log_hoelder(p.lambda);
        // eps (sin 2 pi x1 + sin 2 pi x2)
        for (int d = 0; d < 2; ++d) {
            std::vector<int> kp(2, 0), km(2, 0);
            kp[static_cast<std::size_t>(d)] = 1;
            km[static_cast<std::size_t>(d)] = -1;
            m.h0.set_coeff(kp, cplx(0.0, -0.5 * p.epsilon));
            m.h0.set_coeff(km, cplx(0.0, 0.5 * p.epsilon));
        }
        m.p_scale = p.epsilon;
        m.P = std::make_shared<const ActionProfile>(p.lambda);
        break;
    }
    case ModelKind::hoelder_test: {
        if (!(p.ell > 0.0)) throw ArgumentError("hoelder_test: ell must be positive");
        m.k = static_cast<int>(std::floor(p.ell));
        if (m.k == p.ell) throw ArgumentError("hoelder_test: ell must not be an integer");
        m.modulus = ModulusSpec::hoelder(p.ell - m.k);
        auto& c = m.h0.coefficients();
        for (std::size_t f = 0; f < c.size(); ++f) {
            auto kv = m.h0.frequencies(f);
            int norm = 0;
            bool edge = false;
            for (int kk : kv) {
                norm += std::abs(kk);
                if (std::abs(kk) >= N / 2) edge = true;
            }
            if (norm == 0 || edge) continue;
            c[f] = 0.5 * p.epsilon * std::pow(static_cast<double>(norm), -(p.ell + n));
        }
        break;
    }
    case ModelKind::custom:
        throw ArgumentError("build_example_hamiltonian: custom models are built from data");
    }
    return m;
}

// ---------------------------------------------------------------- evaluation

HamiltonianEvaluator::HamiltonianEvaluator(const HamiltonianModel& model) : model_(model) {
    const int n = model.n;
    if (static_cast<int>(model.h1.size()) != n || static_cast<int>(model.h2.size()) != n * n)
        throw ArgumentError("HamiltonianModel: coefficient function count mismatch");
    // layout: h0, h0_x[d], h1[i], h1_x[i][d], h2[ij], h2_x[ij][d]
    store_.reserve(static_cast<std::size_t>((1 + n) * (1 + n + n * n)));
    auto add = [&](const TorusFunction& f) {
        store_.push_back(f);
        for (int d = 0; d < n; ++d) store_.push_back(f.derivative(d));
    };
    add(model.h0);
    for (const auto& f : model.h1) add(f);
    for (const auto& f : model.h2) add(f);
    for (const auto& f : store_) fns_.push_back(is_zero(f) ? nullptr : &f);
}

HamiltonianValues HamiltonianEvaluator::operator()(const std::vector<double>& x, const std::vector<double>& y) const {
    const std::size_t n = static_cast<std::size_t>(model_.n);
    if (x.size() % n || y.size() != x.size()) throw ArgumentError("evaluate: point arrays mismatch");
    const std::size_t np = x.size() / n;
    std::vector<const TorusFunction*> live;
    std::vector<std::size_t> slot(fns_.size(), SIZE_MAX);
    for (std::size_t i = 0; i < fns_.size(); ++i)
        if (fns_[i]) {
            slot[i] = live.size();
            live.push_back(fns_[i]);
        }
    auto vals = live.empty() ? std::vector<std::vector<double>>{} : eval_points_many(live, x);
    auto get = [&](std::size_t fi, std::size_t p) { return slot[fi] == SIZE_MAX ? 0.0 : vals[slot[fi]][p]; };
    const std::size_t stride = 1 + n;
    auto idx_h0 = [&](std::size_t d) { return d; };  // d = 0 value, 1..n derivative
    auto idx_h1 = [&](std::size_t i, std::size_t d) { return stride * (1 + i) + d; };
    auto idx_h2 = [&](std::size_t i, std::size_t j, std::size_t d) { return stride * (1 + n + i * n + j) + d; };

    HamiltonianValues out;
    out.H.assign(np, 0.0);
    out.Hx.assign(np * n, 0.0);
    out.Hy.assign(np * n, 0.0);
    out.Hyy.assign(np * n * n, 0.0);
    for (std::size_t p = 0; p < np; ++p) {
        const double* yp = &y[p * n];
        double H = get(idx_h0(0), p);
        for (std::size_t i = 0; i < n; ++i) {
            H += get(idx_h1(i, 0), p) * yp[i];
            for (std::size_t j = 0; j < n; ++j) H += 0.5 * get(idx_h2(i, j, 0), p) * yp[i] * yp[j];
        }
        for (std::size_t d = 1; d <= n; ++d) {
            double gx = get(idx_h0(d), p);
            for (std::size_t i = 0; i < n; ++i) {
                gx += get(idx_h1(i, d), p) * yp[i];
                for (std::size_t j = 0; j < n; ++j) gx += 0.5 * get(idx_h2(i, j, d), p) * yp[i] * yp[j];
            }
            out.Hx[p * n + d - 1] = gx;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double gy = get(idx_h1(i, 0), p);
            for (std::size_t j = 0; j < n; ++j) {
                double hij = get(idx_h2(i, j, 0), p);
                gy += hij * yp[j];
                out.Hyy[(p * n + i) * n + j] = hij;
            }
            if (model_.P && model_.p_scale != 0.0) {
                H += model_.p_scale * model_.P->derivative(0, yp[i]);
                gy += model_.p_scale * model_.P->derivative(1, yp[i]);
                out.Hyy[(p * n + i) * n + i] += model_.p_scale * model_.P->derivative(2, yp[i]);
            }
            out.Hy[p * n + i] = gy;
        }
        out.H[p] = H;
    }
    return out;
}

HamiltonianValues evaluate(const HamiltonianModel& model, const std::vector<double>& x, const std::vector<double>& y) {
    return HamiltonianEvaluator(model)(x, y);
}

double step_scale(const HamiltonianModel& model, int nu) {
    if (nu < 0) throw ArgumentError("approximate_sequence: nu must be >= 0");
    return std::ldexp(model.epsilon, -nu);
}

HamiltonianModel approximate_sequence(const HamiltonianModel& model, int nu) {
    const double r = step_scale(model, nu);
    if (!(r > 0.0)) return model;
    HamiltonianModel out = model;
    out.h0 = smooth(model.h0, r);
    for (auto& f : out.h1) f = smooth(f, r);
    for (auto& f : out.h2) f = smooth(f, r);
    return out;
}

// ---------------------------------------------------------------- hypotheses

bool HypothesisReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.passed; });
}

const HypothesisCheck* HypothesisReport::first_failure() const {
    for (const auto& c : checks)
        if (!c.passed) return &c;
    return nullptr;
}

namespace {

int check_lattice(const HamiltonianModel& m) { return std::max(32, 4 * m.lattice()); }

// sup over the grid of sum_alpha |d^alpha f| eps^{|alpha| + shift}
std::vector<double> weighted_derivative_sum(const TorusFunction& f, int order, double eps, double shift) {
    std::vector<std::vector<int>> alphas;
    multi_indices(f.dim(), order, alphas);
    std::vector<double> acc(f.size(), 0.0);
    for (const auto& a : alphas) {
        int abs_a = 0;
        for (int v : a) abs_a += v;
        double w = std::pow(eps, abs_a + shift);
        auto s = abs_samples(mixed_derivative(f, a));
        for (std::size_t i = 0; i < s.size(); ++i) acc[i] += w * s[i];
    }
    return acc;
}

double sup_derivatives(const TorusFunction& f, int order) {
    std::vector<std::vector<int>> alphas;
    multi_indices(f.dim(), order, alphas);
    double s = 0.0;
    for (const auto& a : alphas) s = std::max(s, mixed_derivative(f, a).sup_norm_grid());
    return s;
}

// C^k norm plus w-seminorm of the top derivatives, bounded through the next derivative
double ck_w_proxy(const TorusFunction& f, int k, const ModulusSpec& w) {
    const double d = std::min(w.delta, 1.0);
    const double wd = eval(w, d);
    double top = 0.0, next = 0.0;
    std::vector<std::vector<int>> alphas;
    multi_indices(f.dim(), k, alphas);
    for (const auto& a : alphas) {
        int abs_a = 0;
        for (int v : a) abs_a += v;
        if (abs_a != k) continue;
        TorusFunction g = mixed_derivative(f, a);
        top = std::max(top, g.sup_norm_grid());
        for (int ax = 0; ax < f.dim(); ++ax) next = std::max(next, g.derivative(ax).sup_norm_grid());
    }
    double semi = std::max(next * d / wd, 2.0 * top / wd);
    return sup_derivatives(f, k) + semi;
}

} // namespace

HypothesisReport check_hypotheses(const HamiltonianModel& model, const Frequency& freq) {
    HypothesisReport rep;
    const int n = model.n;
    const int L = check_lattice(model);

    // H1
    {
        HypothesisCheck c;
        c.name = "H1";
        IntegralVerdict v = dini_integral(model.modulus, model.k, freq.tau);
        c.passed = v.converges;
        c.lhs = v.converges ? v.value : HUGE_VAL;
        c.rhs = HUGE_VAL;
        c.margin = v.converges ? -v.log_value : -v.divergence_rate;
        std::ostringstream os;
        os << "Dini integral with k = " << model.k << ", tau = " << freq.tau << (v.converges ? " converges" : " diverges");
        if (model.k < 2 * freq.tau + 2) os << "; k < 2 tau + 2";
        if (model.k < 2 * freq.tau + 2) c.passed = false;
        c.detail = os.str();
        rep.checks.push_back(c);
    }
    // H2
    {
        HypothesisCheck c;
        c.name = "H2";
        const ModulusSpec& w = model.modulus;
        double norm = ck_w_proxy(model.h0.resized(L), model.k, w);
        for (const auto& f : model.h1) norm += model.rho * ck_w_proxy(f.resized(L), model.k, w);
        for (const auto& f : model.h2) norm += 0.5 * model.rho * model.rho * ck_w_proxy(f.resized(L), model.k, w);
        if (model.P && model.p_scale != 0.0) {
            double s = 0.0;
            for (int j = 0; j <= 6; ++j) s = std::max(s, std::fabs(model.P->derivative(j, model.rho)));
            // |P6(s) - P6(t)| <= w(|s - t|) for the log profile
            norm += model.p_scale * (s + 1.0);
        }
        Eigen::MatrixXd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double a = model.h2[static_cast<std::size_t>(i * n + j)].mean();
                if (i == j && model.P && model.p_scale != 0.0) a += model.p_scale * model.P->derivative(2, 0.0);
                A(i, j) = a;
            }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
        double smin = svd.singularValues()(n - 1);
        double inv_norm = smin > 0.0 ? 1.0 / smin : HUGE_VAL;
        c.lhs = std::max(norm, inv_norm);
        c.rhs = model.M;
        c.margin = model.M - c.lhs;
        c.passed = norm <= model.M && inv_norm <= model.M;
        std::ostringstream os;
        os << "norm proxy " << norm << ", averaged Hessian inverse " << inv_norm << ", M " << model.M;
        c.detail = os.str();
        rep.checks.push_back(c);
    }
    // H3
    {
        HypothesisCheck c;
        c.name = "H3";
        const int kmax = std::max(freq.k_max, model.lattice());
        try {
            Frequency f = certify(freq.omega, freq.tau, kmax);
            c.passed = true;
            c.lhs = *f.alpha_star;
            c.margin = *f.alpha_star;
            std::ostringstream os;
            os << "alpha_* = " << *f.alpha_star << " up to |k| = " << kmax;
            c.detail = os.str();
        } catch (const ResonanceError& e) {
            c.passed = false;
            c.margin = 0.0;
            c.detail = e.what();
        }
        rep.checks.push_back(c);
    }
    // H4
    {
        HypothesisCheck c;
        c.name = "H4";
        const double eps = model.epsilon;
        TorusFunction h = model.h0.resized(L);
        h.set_mean(0.0);
        std::vector<double> lhs = eps > 0.0 ? weighted_derivative_sum(h, model.k, eps, 0.0) : std::vector<double>(h.size(), 0.0);
        std::vector<double> fsum(h.size(), 0.0);
        for (int i = 0; i < n; ++i) {
            TorusFunction f = model.h1[static_cast<std::size_t>(i)].resized(L);
            f.set_mean(f.mean() - model.omega[static_cast<std::size_t>(i)]);
            if (model.P && model.p_scale != 0.0) f.set_mean(f.mean() + model.p_scale * model.P->derivative(1, 0.0));
            std::vector<double> s = eps > 0.0 ? weighted_derivative_sum(f, model.k - 1, eps, freq.tau + 1.0)
                                              : abs_samples(f);
            for (std::size_t g = 0; g < s.size(); ++g) fsum[g] += s[g] * s[g];
        }
        double sup = 0.0;
        for (std::size_t g = 0; g < lhs.size(); ++g) sup = std::max(sup, lhs[g] + std::sqrt(fsum[g]));
        c.lhs = sup;
        c.rhs = eps > 0.0 ? model.M * std::pow(eps, model.k) * eval(model.modulus, std::min(eps, model.modulus.delta)) : 0.0;
        c.margin = c.rhs - c.lhs;
        c.passed = c.lhs <= c.rhs;
        std::ostringstream os;
        os << "smallness left side " << c.lhs << " vs M eps^k w(eps) = " << c.rhs;
        c.detail = os.str();
        rep.checks.push_back(c);
    }
    return rep;
}

void require_hypotheses(const HamiltonianModel& model, const Frequency& freq) {
    HypothesisReport rep = check_hypotheses(model, freq);
    if (const auto* f = rep.first_failure()) throw HypothesisError(f->name, f->margin, f->name + " failed: " + f->detail);
}

} // namespace modkam
