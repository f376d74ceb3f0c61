#include "modkam/kam.hpp"

#include "modkam/error.hpp"
#include "modkam/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace modkam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

double sup_diff(const TorusFunction& a, const TorusFunction& b) { return (a - b).sup_norm_grid(); }

std::vector<TorusFunction> zeros(int count, int n, int N) { return std::vector<TorusFunction>(static_cast<std::size_t>(count), TorusFunction(n, N)); }

// d_j f_i for each i, j (row-major)
std::vector<TorusFunction> jacobian(const std::vector<TorusFunction>& f) {
    std::vector<TorusFunction> out;
    for (const auto& fi : f)
        for (int j = 0; j < fi.dim(); ++j) out.push_back(fi.derivative(j));
    return out;
}

struct MapValues {
    std::vector<std::vector<double>> a, v, da;  // a[i][p], v[i][p], da[i*n+j][p]
};

// values of (a, v, d a) at arbitrary points
MapValues map_at(const std::vector<TorusFunction>& a, const std::vector<TorusFunction>& v, const std::vector<double>& pts) {
    const std::size_t n = a.size();
    std::vector<TorusFunction> da = jacobian(a);
    std::vector<const TorusFunction*> fs;
    for (const auto& f : a) fs.push_back(&f);
    for (const auto& f : v) fs.push_back(&f);
    for (const auto& f : da) fs.push_back(&f);
    auto vals = eval_points_many(fs, pts);
    MapValues out;
    for (std::size_t i = 0; i < n; ++i) out.a.push_back(std::move(vals[i]));
    for (std::size_t i = 0; i < n; ++i) out.v.push_back(std::move(vals[n + i]));
    for (std::size_t i = 0; i < n * n; ++i) out.da.push_back(std::move(vals[2 * n + i]));
    return out;
}

Mat jac_at(const MapValues& m, std::size_t p, int n) {
    Mat J = Mat::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) J(i, j) += m.da[static_cast<std::size_t>(i * n + j)][p];
    return J;
}

// (a, v) <- (a, v) o step, step: xi' -> (xi' + s(xi'), b(xi'))
void compose(std::vector<TorusFunction>& a, std::vector<TorusFunction>& v, const std::vector<double>& grid,
             const std::vector<std::vector<double>>& s, const std::vector<std::vector<double>>& b) {
    const int n = static_cast<int>(a.size());
    const int N = a[0].n();
    const std::size_t np = s[0].size();
    std::vector<double> pts(grid.size());
    for (std::size_t p = 0; p < np; ++p)
        for (int d = 0; d < n; ++d) pts[p * n + d] = grid[p * n + d] + s[static_cast<std::size_t>(d)][p];
    MapValues m = map_at(a, v, pts);
    std::vector<std::vector<double>> na(static_cast<std::size_t>(n), std::vector<double>(np)), nv = na;
    for (std::size_t p = 0; p < np; ++p) {
        Mat J = jac_at(m, p, n);
        Vec bb(n);
        for (int i = 0; i < n; ++i) bb(i) = b[static_cast<std::size_t>(i)][p];
        Vec shift = J.transpose().partialPivLu().solve(bb);
        for (int i = 0; i < n; ++i) {
            na[static_cast<std::size_t>(i)][p] = s[static_cast<std::size_t>(i)][p] + m.a[static_cast<std::size_t>(i)][p];
            nv[static_cast<std::size_t>(i)][p] = m.v[static_cast<std::size_t>(i)][p] + shift(i);
        }
    }
    for (int i = 0; i < n; ++i) {
        a[static_cast<std::size_t>(i)] = TorusFunction::from_samples(n, N, na[static_cast<std::size_t>(i)]);
        v[static_cast<std::size_t>(i)] = TorusFunction::from_samples(n, N, nv[static_cast<std::size_t>(i)]);
    }
}

struct Measure {
    std::vector<double> R;        // H(u,v) - mean, per point
    std::vector<double> f;        // np * n
    std::vector<double> Q;        // np * n * n
    double freq = 0.0;
    double angle = 0.0;
};

Measure measure(const HamiltonianEvaluator& ev, const TorusMap& map, const std::vector<double>& grid,
                const std::vector<double>& omega) {
    const int n = map.n;
    const std::size_t np = grid.size() / static_cast<std::size_t>(n);
    std::vector<double> X(grid.size()), Y(grid.size());
    std::vector<std::vector<double>> au, vv;
    for (int i = 0; i < n; ++i) {
        au.push_back(map.u_minus_id[static_cast<std::size_t>(i)].samples());
        vv.push_back(map.v[static_cast<std::size_t>(i)].samples());
    }
    std::vector<std::vector<double>> du, dv;
    for (const auto& g : jacobian(map.u_minus_id)) du.push_back(g.samples());
    for (const auto& g : jacobian(map.v)) dv.push_back(g.samples());
    for (std::size_t p = 0; p < np; ++p)
        for (int d = 0; d < n; ++d) {
            X[p * n + d] = grid[p * n + d] + au[static_cast<std::size_t>(d)][p];
            Y[p * n + d] = vv[static_cast<std::size_t>(d)][p];
        }
    HamiltonianValues hv = ev(X, Y);
    Measure m;
    m.R.resize(np);
    m.f.resize(np * n);
    m.Q.resize(np * n * n);
    double mean = 0.0;
    for (double h : hv.H) mean += h;
    mean /= static_cast<double>(np);
    for (std::size_t p = 0; p < np; ++p) {
        m.R[p] = hv.H[p] - mean;
        Mat J = Mat::Identity(n, n), Dv(n, n), Hyy(n, n);
        Vec Hx(n), Hy(n);
        for (int i = 0; i < n; ++i) {
            Hx(i) = hv.Hx[p * n + i];
            Hy(i) = hv.Hy[p * n + i];
            for (int j = 0; j < n; ++j) {
                J(i, j) += du[static_cast<std::size_t>(i * n + j)][p];
                Dv(i, j) = dv[static_cast<std::size_t>(i * n + j)][p];
                Hyy(i, j) = hv.Hyy[(p * n + i) * n + j];
            }
        }
        auto lu = J.partialPivLu();
        Vec f = lu.solve(Hy);
        Mat Jinv = lu.inverse();
        Mat Q = Jinv * Hyy * Jinv.transpose();
        Vec ang = J.transpose() * Hx + Dv.transpose() * Hy;
        for (int i = 0; i < n; ++i) {
            f(i) -= omega[static_cast<std::size_t>(i)];
            m.f[p * n + i] = f(i);
            m.freq = std::max(m.freq, std::fabs(f(i)));
            m.angle = std::max(m.angle, std::fabs(ang(i)));
            for (int j = 0; j < n; ++j) m.Q[(p * n + i) * n + j] = Q(i, j);
        }
    }
    return m;
}

} // namespace

// ---------------------------------------------------------------- torus map

TorusMap TorusMap::identity(int n, int lattice) {
    TorusMap t;
    t.n = n;
    t.lattice = lattice;
    t.u_minus_id = zeros(n, n, lattice);
    t.v = zeros(n, n, lattice);
    return t;
}

double TorusMap::min_jacobian_det() const {
    std::vector<std::vector<double>> d;
    for (const auto& g : jacobian(u_minus_id)) d.push_back(g.samples());
    const std::size_t np = d.empty() ? 0 : d[0].size();
    double best = HUGE_VAL;
    for (std::size_t p = 0; p < np; ++p) {
        Mat J = Mat::Identity(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) J(i, j) += d[static_cast<std::size_t>(i * n + j)][p];
        best = std::min(best, J.determinant());
    }
    return best;
}

// ---------------------------------------------------------------- homological equation

TorusFunction apply_D(const TorusFunction& f, const std::vector<double>& omega) {
    if (static_cast<int>(omega.size()) != f.dim()) throw ArgumentError("apply_D: omega dimension mismatch");
    TorusFunction g(f.dim(), f.n());
    for (int d = 0; d < f.dim(); ++d) g += omega[static_cast<std::size_t>(d)] * f.derivative(d);
    return g;
}

TorusFunction solve_homological(const TorusFunction& g, const std::vector<double>& omega, double divisor_floor) {
    if (static_cast<int>(omega.size()) != g.dim()) throw ArgumentError("solve_homological: omega dimension mismatch");
    double scale = 1.0;
    for (auto c : g.coefficients()) scale = std::max(scale, std::abs(c));
    if (std::abs(g.coefficients()[0]) > 1e-12 * scale) {
        std::ostringstream os;
        os << "solve_homological: right-hand side has mean " << g.coefficients()[0].real() << ", not zero";
        throw SolvabilityError(os.str());
    }
    TorusFunction phi(g.dim(), g.n());
    const auto& c = g.coefficients();
    auto& out = phi.coefficients();
    for (std::size_t f = 1; f < c.size(); ++f) {
        if (c[f] == cplx(0.0, 0.0)) continue;
        auto k = g.frequencies(f);
        bool nyquist = false;
        double dot = 0.0, mag = 0.0;
        for (std::size_t d = 0; d < k.size(); ++d) {
            if (k[d] == -g.n() / 2) nyquist = true;
            dot += k[d] * omega[d];
            mag += std::fabs(k[d] * omega[d]);
        }
        if (nyquist) continue;  // not representable by the spectral derivative
        if (std::fabs(dot) <= 8.0 * 2.220446049250313e-16 * mag) {
            std::ostringstream os;
            os << "resonance: <k, omega> = 0 at k = (";
            for (std::size_t d = 0; d < k.size(); ++d) os << (d ? ", " : "") << k[d];
            os << ")";
            throw ResonanceError(os.str());
        }
        if (std::fabs(dot) < divisor_floor) throw NumericError("solve_homological: divisor below certificate floor");
        out[f] = c[f] / cplx(0.0, kTwoPi * dot);
    }
    return phi;
}

double homological_residual(const TorusFunction& phi, const TorusFunction& g, const std::vector<double>& omega) {
    return (apply_D(phi, omega) - g).sup_norm_grid();
}

// ---------------------------------------------------------------- step

StepOutcome kam_step(const HamiltonianModel& Hnu, const TorusMap& current, const std::vector<double>& omega, double theta,
                     double r_star, const KamConfig& cfg) {
    const int n = current.n, N = current.lattice;
    if (static_cast<int>(omega.size()) != n || Hnu.n != n) throw ArgumentError("kam_step: dimension mismatch");
    HamiltonianEvaluator ev(Hnu);
    const std::vector<double> grid = torus_grid_points(n, N);
    const std::size_t np = grid.size() / static_cast<std::size_t>(n);

    StepOutcome out;
    TorusMap map = current;
    StepTransform& st = out.step;
    st.r_nu = r_star;
    st.U = TorusFunction(n, N);
    st.V = zeros(n, n, N);
    st.vt = zeros(n, n, N);
    st.c.assign(static_cast<std::size_t>(n), 0.0);

    Measure m;
    double prev = HUGE_VAL;
    int it = 0;
    for (;; ++it) {
        m = measure(ev, map, grid, omega);
        if (it == 0) {
            out.freq_error_in = m.freq;
            out.angle_error_in = m.angle;
            if (m.freq > cfg.gate || m.angle > cfg.gate) {
                std::ostringstream os;
                os << "kam_step: input errors (" << m.freq << ", " << m.angle << ") exceed the smallness gate";
                throw DivergenceError(os.str());
            }
        }
        const double err = std::max(m.freq, m.angle);
        if (err <= cfg.newton_tol) break;
        if (it > 0 && err < 1e-9 && err > 0.5 * prev) break;  // floating-point floor
        if (it >= cfg.max_inner) break;
        if (it > 2 && err > prev) {
            std::ostringstream os;
            os << "kam_step: inner iteration diverged at error " << err;
            throw DivergenceError(os.str());
        }
        prev = err;

        // angle error: D W = -R
        TorusFunction R = TorusFunction::from_samples(n, N, m.R);
        R.set_mean(0.0);
        TorusFunction W = solve_homological(-1.0 * R, omega);
        std::vector<std::vector<double>> gW;
        for (int d = 0; d < n; ++d) gW.push_back(W.derivative(d).samples());

        // frequency adjustment through the averaged Q
        Mat Qbar = Mat::Zero(n, n);
        Vec rhs = Vec::Zero(n);
        for (std::size_t p = 0; p < np; ++p)
            for (int i = 0; i < n; ++i) {
                double s = m.f[p * n + i];
                for (int j = 0; j < n; ++j) {
                    double q = m.Q[(p * n + i) * n + j];
                    Qbar(i, j) += q;
                    s += q * gW[static_cast<std::size_t>(j)][p];
                }
                rhs(i) += s;
            }
        Qbar /= static_cast<double>(np);
        rhs /= static_cast<double>(np);
        Eigen::JacobiSVD<Mat> svd(Qbar);
        const auto& sv = svd.singularValues();
        if (!(sv(n - 1) > 1e-13 * sv(0))) throw NondegeneracyError("kam_step: averaged Hessian is numerically singular");
        Vec c = -Qbar.partialPivLu().solve(rhs);

        std::vector<std::vector<double>> b(static_cast<std::size_t>(n), std::vector<double>(np));
        std::vector<std::vector<double>> ra = b;
        for (std::size_t p = 0; p < np; ++p)
            for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)][p] = c(i) + gW[static_cast<std::size_t>(i)][p];
        for (std::size_t p = 0; p < np; ++p)
            for (int i = 0; i < n; ++i) {
                double s = m.f[p * n + i];
                for (int j = 0; j < n; ++j) s += m.Q[(p * n + i) * n + j] * b[static_cast<std::size_t>(j)][p];
                ra[static_cast<std::size_t>(i)][p] = s;
            }
        std::vector<std::vector<double>> a(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            TorusFunction g = TorusFunction::from_samples(n, N, ra[static_cast<std::size_t>(i)]);
            g.set_mean(0.0);
            a[static_cast<std::size_t>(i)] = solve_homological(g, omega).samples();
        }

        compose(map.u_minus_id, map.v, grid, a, b);
        compose(st.V, st.vt, grid, a, b);
        st.U += W;
        for (int i = 0; i < n; ++i) st.c[static_cast<std::size_t>(i)] += c(i);
    }
    if (m.freq > cfg.accept_tol) {
        std::ostringstream os;
        os << "kam_step: frequency error " << m.freq << " after " << it << " inner iterations";
        throw DivergenceError(os.str());
    }
    st.inner_iterations = it;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<double> q(np);
            for (std::size_t p = 0; p < np; ++p) q[p] = m.Q[(p * n + i) * n + j];
            st.Q.push_back(TorusFunction::from_samples(n, N, q));
        }
    out.freq_error = m.freq;
    out.angle_error = m.angle;
    map.strip = theta * r_star;
    out.next = std::move(map);
    return out;
}

// ---------------------------------------------------------------- graph, chain, residual

std::vector<TorusFunction> graph_of(const TorusMap& torus, double tol) {
    const int n = torus.n, N = torus.lattice;
    const std::vector<double> grid = torus_grid_points(n, N);
    const std::size_t np = grid.size() / static_cast<std::size_t>(n);
    // warm start xi = x - a(x)
    std::vector<double> xi = grid;
    {
        MapValues m0 = map_at(torus.u_minus_id, torus.v, grid);
        for (std::size_t p = 0; p < np; ++p)
            for (int d = 0; d < n; ++d) xi[p * n + d] -= m0.a[static_cast<std::size_t>(d)][p];
    }
    MapValues m;
    for (int iter = 0;; ++iter) {
        m = map_at(torus.u_minus_id, torus.v, xi);
        double res = 0.0;
        std::vector<double> next = xi;
        for (std::size_t p = 0; p < np; ++p) {
            Vec F(n);
            for (int d = 0; d < n; ++d) F(d) = xi[p * n + d] + m.a[static_cast<std::size_t>(d)][p] - grid[p * n + d];
            res = std::max(res, F.cwiseAbs().maxCoeff());
            Vec step = jac_at(m, p, n).partialPivLu().solve(F);
            for (int d = 0; d < n; ++d) next[p * n + d] -= step(d);
        }
        if (res <= tol) break;
        if (iter >= 50) throw NumericError("graph_of: Newton inversion of u did not converge");
        xi = std::move(next);
    }
    std::vector<TorusFunction> w;
    for (int i = 0; i < n; ++i) w.push_back(TorusFunction::from_samples(n, N, m.v[static_cast<std::size_t>(i)]));
    return w;
}

std::vector<double> evaluate_chain(const std::vector<StepTransform>& steps, const std::vector<double>& pts) {
    if (steps.empty()) throw ArgumentError("evaluate_chain: empty chain");
    const int n = static_cast<int>(steps[0].V.size());
    const std::size_t np = pts.size() / static_cast<std::size_t>(n);
    std::vector<double> xi = pts, eta(pts.size(), 0.0);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        MapValues m = map_at(it->V, it->vt, xi);
        for (std::size_t p = 0; p < np; ++p) {
            Mat J = jac_at(m, p, n);
            Vec e(n);
            for (int d = 0; d < n; ++d) e(d) = eta[p * n + d];
            Vec sh = J.transpose().partialPivLu().solve(e);
            for (int d = 0; d < n; ++d) {
                xi[p * n + d] += m.a[static_cast<std::size_t>(d)][p];
                eta[p * n + d] = m.v[static_cast<std::size_t>(d)][p] + sh(d);
            }
        }
    }
    std::vector<double> out(np * 2 * static_cast<std::size_t>(n));
    for (std::size_t p = 0; p < np; ++p)
        for (int d = 0; d < n; ++d) {
            out[p * 2 * n + d] = xi[p * n + d];
            out[p * 2 * n + n + d] = eta[p * n + d];
        }
    return out;
}

double composition_gap(const KamResult& r) {
    const int n = r.torus.n, N = r.torus.lattice;
    const std::vector<double> grid = torus_grid_points(n, N);
    const std::size_t np = grid.size() / static_cast<std::size_t>(n);
    if (r.trace.steps.empty()) return 0.0;
    auto chain = evaluate_chain(r.trace.steps, grid);
    double gap = 0.0;
    for (int d = 0; d < n; ++d) {
        auto a = r.torus.u_minus_id[static_cast<std::size_t>(d)].samples();
        auto v = r.torus.v[static_cast<std::size_t>(d)].samples();
        for (std::size_t p = 0; p < np; ++p) {
            gap = std::max(gap, std::fabs(grid[p * n + d] + a[p] - chain[p * 2 * n + d]));
            gap = std::max(gap, std::fabs(v[p] - chain[p * 2 * n + n + d]));
        }
    }
    return gap;
}

std::pair<double, double> invariance_residual(const HamiltonianModel& model, const TorusMap& torus,
                                              const std::vector<double>& omega) {
    const int n = torus.n, N = torus.lattice;
    const std::vector<double> grid = torus_grid_points(n, N);
    const std::size_t np = grid.size() / static_cast<std::size_t>(n);
    std::vector<double> X(grid.size()), Y(grid.size());
    std::vector<std::vector<double>> Du, Dv;
    for (int d = 0; d < n; ++d) {
        auto a = torus.u_minus_id[static_cast<std::size_t>(d)].samples();
        auto v = torus.v[static_cast<std::size_t>(d)].samples();
        for (std::size_t p = 0; p < np; ++p) {
            X[p * n + d] = grid[p * n + d] + a[p];
            Y[p * n + d] = v[p];
        }
        Du.push_back(apply_D(torus.u_minus_id[static_cast<std::size_t>(d)], omega).samples());
        Dv.push_back(apply_D(torus.v[static_cast<std::size_t>(d)], omega).samples());
    }
    HamiltonianValues hv = evaluate(model, X, Y);
    double ry = 0.0, rx = 0.0;
    for (std::size_t p = 0; p < np; ++p)
        for (int d = 0; d < n; ++d) {
            ry = std::max(ry, std::fabs(omega[static_cast<std::size_t>(d)] + Du[static_cast<std::size_t>(d)][p] - hv.Hy[p * n + d]));
            rx = std::max(rx, std::fabs(Dv[static_cast<std::size_t>(d)][p] + hv.Hx[p * n + d]));
        }
    return {ry, rx};
}

// ---------------------------------------------------------------- run

KamResult run_kam(const HamiltonianModel& model, const Frequency& freq, const KamConfig& cfg, IterationTrace* partial) {
    if (cfg.nu_max < 0 || cfg.lattice < 4 || cfg.lattice % 2) throw ArgumentError("run_kam: bad configuration");
    if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) throw ArgumentError("run_kam: theta must lie in (0, 1)");
    if (static_cast<int>(freq.omega.size()) != model.n) throw ArgumentError("run_kam: omega dimension mismatch");
    require_hypotheses(model, freq);

    const int n = model.n, N = cfg.lattice;
    const auto& omega = freq.omega;
    KamResult res;
    IterationTrace& tr = res.trace;
    tr.k = model.k;
    tr.tau = freq.tau;
    tr.epsilon = model.epsilon;
    TorusMap map = TorusMap::identity(n, N);
    std::vector<TorusFunction> w_prev = zeros(n, n, N);

    // Q^0: H_yy(x, 0) of the unsmoothed model on the output lattice
    std::vector<TorusFunction> q_prev;
    {
        auto grid = torus_grid_points(n, N);
        HamiltonianValues hv = evaluate(model, grid, std::vector<double>(grid.size(), 0.0));
        const std::size_t np = grid.size() / static_cast<std::size_t>(n);
        for (int i = 0; i < n * n; ++i) {
            std::vector<double> q(np);
            for (std::size_t p = 0; p < np; ++p) q[p] = hv.Hyy[p * static_cast<std::size_t>(n * n) + static_cast<std::size_t>(i)];
            q_prev.push_back(TorusFunction::from_samples(n, N, q));
        }
    }

    auto bound = [&](double r, double p) {
        return std::pow(r, p) * eval(model.modulus, std::min(r, model.modulus.delta));
    };
    const double k = model.k, tau = freq.tau;
    double jac_sum = 0.0;
    tr.stop_reason = "nu_max";
    try {
        for (int nu = 0; nu <= cfg.nu_max; ++nu) {
            const double r = step_scale(model, nu);
            HamiltonianModel Hnu = approximate_sequence(model, nu);
            StepOutcome so = kam_step(Hnu, map, omega, cfg.theta, r, cfg);

            StepRecord rec;
            rec.nu = nu;
            rec.r_nu = r;
            rec.freq_error_in = so.freq_error_in;
            rec.angle_error_in = so.angle_error_in;
            rec.freq_error = so.freq_error;
            rec.angle_error = so.angle_error;
            rec.inner_iterations = so.step.inner_iterations;
            double jac_step = 0.0;
            for (int i = 0; i < n; ++i) {
                const auto& un = so.next.u_minus_id[static_cast<std::size_t>(i)];
                const auto& uo = map.u_minus_id[static_cast<std::size_t>(i)];
                rec.u_delta = std::max(rec.u_delta, sup_diff(un, uo));
                for (int j = 0; j < n; ++j) jac_step = std::max(jac_step, sup_diff(un.derivative(j), uo.derivative(j)));
            }
            jac_sum += jac_step;
            rec.jac_sum = jac_sum;
            std::vector<TorusFunction> w = graph_of(so.next, cfg.inversion_tol);
            for (int i = 0; i < n; ++i)
                rec.w_delta = std::max(rec.w_delta, sup_diff(w[static_cast<std::size_t>(i)], w_prev[static_cast<std::size_t>(i)]));
            const StepTransform& st = so.step;
            for (int i = 0; i < n; ++i) {
                rec.psi_minus_id = std::max({rec.psi_minus_id, st.V[static_cast<std::size_t>(i)].sup_norm_grid(),
                                             st.vt[static_cast<std::size_t>(i)].sup_norm_grid()});
                rec.ux_sup = std::max(rec.ux_sup, st.vt[static_cast<std::size_t>(i)].sup_norm_grid());
                for (int j = 0; j < n; ++j) {
                    rec.psi_jac_minus_id = std::max({rec.psi_jac_minus_id,
                                                     st.V[static_cast<std::size_t>(i)].derivative(j).sup_norm_grid(),
                                                     st.vt[static_cast<std::size_t>(i)].derivative(j).sup_norm_grid()});
                }
            }
            for (int i = 0; i < n * n; ++i)
                rec.q_diff = std::max(rec.q_diff, sup_diff(st.Q[static_cast<std::size_t>(i)], q_prev[static_cast<std::size_t>(i)]));
            rec.ratio_psi = rec.psi_minus_id / bound(r, k - 2 * tau - 1);
            rec.ratio_jac = rec.psi_jac_minus_id / bound(r, k - 2 * tau - 2);
            rec.ratio_q = rec.q_diff / (bound(r, k - 2 * tau - 2) / (2.0 * model.M));
            rec.ratio_ux = rec.ux_sup / bound(r, k - tau - 1);
            rec.ratio_u = rec.u_delta / bound(r, k - 2 * tau - 1);
            rec.ratio_w = rec.w_delta / bound(r, k - tau - 1);
            auto resid = invariance_residual(model, so.next, omega);
            rec.residual_y = resid.first;
            rec.residual_x = resid.second;
            rec.min_det = so.next.min_jacobian_det();

            tr.records.push_back(rec);
            tr.steps.push_back(st);
            q_prev = st.Q;
            w_prev = std::move(w);
            map = std::move(so.next);

            const auto& R = tr.records;
            if (R.size() >= 4) {
                bool grow = true;
                for (std::size_t j = R.size() - 3; j < R.size(); ++j)
                    if (!(R[j].u_delta > R[j - 1].u_delta && R[j].u_delta > cfg.delta_floor)) grow = false;
                if (grow) throw DivergenceError("run_kam: u-delta grew over 3 consecutive steps");
            }
            if (nu + 1 >= cfg.min_steps && rec.u_delta <= cfg.stop_floor && rec.w_delta <= cfg.stop_floor) {
                tr.stop_reason = "floor";
                break;
            }
        }
    } catch (...) {
        tr.stop_reason = "aborted";
        if (partial) *partial = tr;
        throw;
    }
    res.torus = std::move(map);
    if (partial) *partial = tr;
    return res;
}

// ---------------------------------------------------------------- regularity of the conjugacy

std::pair<RegularityReport, RegularityReport> theoretical_regularity(const ModulusSpec& w, int k, double tau, double eps,
                                                                    int* k1, int* k2) {
    if (!(eps > 0.0 && eps < 1.0)) eps = 0.5;
    RegularityReport out[2];
    for (int i = 1; i <= 2; ++i) {
        PhiFunction phi = phi_from_modulus(w, k, tau, i);
        int ks = critical_exponent(phi);
        if (i == 1 && k1) *k1 = ks;
        if (i == 2 && k2) *k2 = ks;
        out[i - 1] = remaining_modulus_log(phi, ks, eps, default_log_gamma_grid(eps));
    }
    return {out[0], out[1]};
}

ConjugacyRegularity conjugacy_regularity(const IterationTrace& trace, const HamiltonianModel& model) {
    std::vector<double> r, du, dw;
    for (const auto& rec : trace.records) {
        r.push_back(rec.r_nu);
        du.push_back(rec.u_delta);
        dw.push_back(rec.w_delta);
    }
    ConjugacyRegularity out;
    auto th = theoretical_regularity(model.modulus, model.k, trace.tau, model.epsilon, &out.k1_star, &out.k2_star);
    out.theoretical_u = std::move(th.first);
    out.theoretical_w = std::move(th.second);
    out.measured_u = regularity_from_deltas(r, du);
    out.measured_w = regularity_from_deltas(r, dw);
    return out;
}

} // namespace modkam
