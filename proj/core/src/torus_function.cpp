#include "modkam/torus_function.hpp"

#include "modkam/error.hpp"
#include "modkam/parallel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace modkam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t ipow(int n, int d) {
    std::size_t r = 1;
    for (int i = 0; i < d; ++i) r *= static_cast<std::size_t>(n);
    return r;
}

std::mutex g_plan_mu;
std::map<std::tuple<int, int, int>, fftw_plan> g_plans;

fftw_plan get_plan(int dim, int n, int sign) {
    std::lock_guard<std::mutex> lk(g_plan_mu);
    auto key = std::make_tuple(dim, n, sign);
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;
    std::size_t total = ipow(n, dim);
    fftw_complex* buf = fftw_alloc_complex(total);
    int dims[3] = {n, n, n};
    fftw_plan p = fftw_plan_dft(dim, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    g_plans.emplace(key, p);
    return p;
}

void check_shape(int dim, int n) {
    if (dim < 1 || dim > 3) throw ArgumentError("TorusFunction: dimension must be 1, 2 or 3");
    if (n < 2 || n % 2 != 0) throw ArgumentError("TorusFunction: grid size must be even and >= 2");
}

} // namespace

void fft_forward(int dim, int n, std::vector<cplx>& data) {
    fftw_plan p = get_plan(dim, n, FFTW_FORWARD);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, ptr, ptr);
    const double s = 1.0 / static_cast<double>(data.size());
    for (auto& c : data) c *= s;
}

void fft_inverse(int dim, int n, std::vector<cplx>& data) {
    fftw_plan p = get_plan(dim, n, FFTW_BACKWARD);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, ptr, ptr);
}

TorusFunction::TorusFunction(int dim, int n) : dim_(dim), n_(n) {
    check_shape(dim, n);
    coef_.assign(ipow(n, dim), cplx(0.0, 0.0));
}

TorusFunction TorusFunction::from_samples(int dim, int n, const std::vector<double>& values) {
    TorusFunction f(dim, n);
    if (values.size() != f.size()) throw ArgumentError("TorusFunction::from_samples: size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) f.coef_[i] = values[i];
    fft_forward(dim, n, f.coef_);
    return f;
}

TorusFunction TorusFunction::from_complex_samples(int dim, int n, const std::vector<cplx>& values) {
    TorusFunction f(dim, n);
    if (values.size() != f.size()) throw ArgumentError("TorusFunction::from_complex_samples: size mismatch");
    f.coef_ = values;
    fft_forward(dim, n, f.coef_);
    return f;
}

TorusFunction TorusFunction::constant(int dim, int n, double c) {
    TorusFunction f(dim, n);
    f.coef_[0] = c;
    return f;
}

std::vector<int> TorusFunction::frequencies(std::size_t flat) const {
    std::vector<int> k(static_cast<std::size_t>(dim_));
    for (int d = dim_ - 1; d >= 0; --d) {
        k[static_cast<std::size_t>(d)] = frequency(static_cast<int>(flat % static_cast<std::size_t>(n_)));
        flat /= static_cast<std::size_t>(n_);
    }
    return k;
}

std::size_t TorusFunction::flat_index(const std::vector<int>& k) const {
    if (static_cast<int>(k.size()) != dim_) throw ArgumentError("TorusFunction: frequency dimension mismatch");
    std::size_t idx = 0;
    for (int d = 0; d < dim_; ++d) {
        int kk = k[static_cast<std::size_t>(d)];
        if (kk < -n_ / 2 || kk >= n_ / 2) throw ArgumentError("TorusFunction: frequency outside the lattice");
        int i = kk >= 0 ? kk : kk + n_;
        idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    }
    return idx;
}

cplx TorusFunction::coeff(const std::vector<int>& k) const { return coef_[flat_index(k)]; }

void TorusFunction::set_coeff(const std::vector<int>& k, cplx value) { coef_[flat_index(k)] = value; }

std::vector<cplx> TorusFunction::complex_samples() const {
    std::vector<cplx> v = coef_;
    fft_inverse(dim_, n_, v);
    return v;
}

std::vector<double> TorusFunction::samples() const {
    std::vector<cplx> v = complex_samples();
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
    return out;
}

std::vector<double> TorusFunction::grid_point(std::size_t flat) const {
    std::vector<double> x(static_cast<std::size_t>(dim_));
    for (int d = dim_ - 1; d >= 0; --d) {
        x[static_cast<std::size_t>(d)] = static_cast<double>(flat % static_cast<std::size_t>(n_)) / n_;
        flat /= static_cast<std::size_t>(n_);
    }
    return x;
}

std::vector<double> torus_grid_points(int dim, int n) {
    check_shape(dim, n);
    std::size_t total = ipow(n, dim);
    std::vector<double> pts(total * static_cast<std::size_t>(dim));
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t g = f;
        for (int d = dim - 1; d >= 0; --d) {
            pts[f * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)] =
                static_cast<double>(g % static_cast<std::size_t>(n)) / n;
            g /= static_cast<std::size_t>(n);
        }
    }
    return pts;
}

cplx TorusFunction::eval(const std::vector<cplx>& z) const {
    if (static_cast<int>(z.size()) != dim_) throw ArgumentError("TorusFunction::eval: point dimension mismatch");
    cplx acc(0.0, 0.0);
    for (std::size_t f = 0; f < coef_.size(); ++f) {
        if (coef_[f] == cplx(0.0, 0.0)) continue;
        std::vector<int> k = frequencies(f);
        cplx ph(0.0, 0.0);
        for (int d = 0; d < dim_; ++d) ph += static_cast<double>(k[static_cast<std::size_t>(d)]) * z[static_cast<std::size_t>(d)];
        acc += coef_[f] * std::exp(cplx(0.0, kTwoPi) * ph);
    }
    return acc;
}

double TorusFunction::eval(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim_) throw ArgumentError("TorusFunction::eval: point dimension mismatch");
    return eval_points(x)[0];
}

std::vector<double> TorusFunction::eval_points(const std::vector<double>& pts) const {
    return eval_points_many({this}, pts)[0];
}

std::vector<std::vector<double>> eval_points_many(const std::vector<const TorusFunction*>& fs, const std::vector<double>& pts) {
    if (fs.empty()) return {};
    const int dim = fs[0]->dim(), n = fs[0]->n();
    for (auto* f : fs)
        if (f->dim() != dim || f->n() != n) throw ArgumentError("eval_points_many: functions must share a lattice");
    if (pts.size() % static_cast<std::size_t>(dim) != 0) throw ArgumentError("eval_points_many: point array size");
    const std::size_t np = pts.size() / static_cast<std::size_t>(dim);
    std::vector<std::vector<double>> out(fs.size(), std::vector<double>(np));
    const std::size_t N = static_cast<std::size_t>(n);
    parallel_for(np, [&](std::size_t b, std::size_t e) {
        std::vector<cplx> E(N * static_cast<std::size_t>(dim));
        std::vector<cplx> inner(N * N);
        for (std::size_t p = b; p < e; ++p) {
            for (int d = 0; d < dim; ++d) {
                double x = pts[p * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)];
                for (std::size_t i = 0; i < N; ++i) {
                    int k = static_cast<int>(i) < n / 2 ? static_cast<int>(i) : static_cast<int>(i) - n;
                    double ph = kTwoPi * k * x;
                    E[static_cast<std::size_t>(d) * N + i] = cplx(std::cos(ph), std::sin(ph));
                }
            }
            for (std::size_t fi = 0; fi < fs.size(); ++fi) {
                const auto& c = fs[fi]->coefficients();
                double v = 0.0;
                if (dim == 1) {
                    cplx acc(0.0, 0.0);
                    for (std::size_t i = 0; i < N; ++i) acc += c[i] * E[i];
                    v = acc.real();
                } else if (dim == 2) {
                    cplx acc(0.0, 0.0);
                    for (std::size_t i0 = 0; i0 < N; ++i0) {
                        cplx row(0.0, 0.0);
                        const cplx* cr = &c[i0 * N];
                        for (std::size_t i1 = 0; i1 < N; ++i1) row += cr[i1] * E[N + i1];
                        acc += row * E[i0];
                    }
                    v = acc.real();
                } else {
                    cplx acc(0.0, 0.0);
                    for (std::size_t i0 = 0; i0 < N; ++i0) {
                        cplx mid(0.0, 0.0);
                        for (std::size_t i1 = 0; i1 < N; ++i1) {
                            cplx row(0.0, 0.0);
                            const cplx* cr = &c[(i0 * N + i1) * N];
                            for (std::size_t i2 = 0; i2 < N; ++i2) row += cr[i2] * E[2 * N + i2];
                            mid += row * E[N + i1];
                        }
                        acc += mid * E[i0];
                    }
                    v = acc.real();
                }
                out[fi][p] = v;
            }
        }
    });
    return out;
}

TorusFunction TorusFunction::derivative(int axis, int order) const {
    if (axis < 0 || axis >= dim_) throw ArgumentError("TorusFunction::derivative: bad axis");
    TorusFunction g = *this;
    for (std::size_t f = 0; f < coef_.size(); ++f) {
        std::size_t stride = 1;
        for (int d = dim_ - 1; d > axis; --d) stride *= static_cast<std::size_t>(n_);
        int i = static_cast<int>((f / stride) % static_cast<std::size_t>(n_));
        if (i == n_ / 2) {
            g.coef_[f] = 0.0;
            continue;
        }
        cplx m = std::pow(cplx(0.0, kTwoPi * frequency(i)), order);
        g.coef_[f] *= m;
    }
    return g;
}

TorusFunction TorusFunction::truncated(int kmax) const {
    TorusFunction g = *this;
    for (std::size_t f = 0; f < coef_.size(); ++f) {
        auto k = frequencies(f);
        for (int kk : k)
            if (std::abs(kk) > kmax) {
                g.coef_[f] = 0.0;
                break;
            }
    }
    return g;
}

TorusFunction TorusFunction::resized(int n_new) const {
    TorusFunction g(dim_, n_new);
    const int lim = std::min(n_, n_new) / 2 - 1;
    for (std::size_t f = 0; f < coef_.size(); ++f) {
        auto k = frequencies(f);
        bool ok = true;
        for (int kk : k)
            if (std::abs(kk) > lim) ok = false;
        if (ok) g.coef_[g.flat_index(k)] = coef_[f];
    }
    return g;
}

TorusFunction& TorusFunction::operator+=(const TorusFunction& o) {
    if (o.dim_ != dim_ || o.n_ != n_) throw ArgumentError("TorusFunction: lattice mismatch");
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += o.coef_[i];
    return *this;
}

TorusFunction& TorusFunction::operator-=(const TorusFunction& o) {
    if (o.dim_ != dim_ || o.n_ != n_) throw ArgumentError("TorusFunction: lattice mismatch");
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] -= o.coef_[i];
    return *this;
}

TorusFunction& TorusFunction::operator*=(double s) {
    for (auto& c : coef_) c *= s;
    return *this;
}

TorusFunction operator+(TorusFunction a, const TorusFunction& b) { return a += b; }
TorusFunction operator-(TorusFunction a, const TorusFunction& b) { return a -= b; }
TorusFunction operator*(double s, TorusFunction a) { return a *= s; }

double TorusFunction::sup_norm_grid() const {
    double m = 0.0;
    for (double v : samples()) m = std::max(m, std::fabs(v));
    return m;
}

} // namespace modkam
