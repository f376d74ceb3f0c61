#include "modkam/kernel.hpp"

#include "modkam/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace modkam {

namespace {

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

constexpr long double kPiL = 3.141592653589793238462643383279502884L;

} // namespace

double kernel_profile(double rho) {
    double a = std::fabs(rho);
    if (a <= 0.5) return 1.0;
    if (a >= 1.0) return 0.0;
    double t = (a - 0.5) / 0.5;
    double f1 = bump(1.0 - t), f0 = bump(t);
    return f1 / (f1 + f0);
}

Kernel::Kernel(int dimension, int resolution) : n_(dimension), res_(resolution) {
    if (dimension < 1 || dimension > 3) throw ArgumentError("build_kernel: dimension must be 1, 2 or 3");
    if (resolution < 64) throw ArgumentError("build_kernel: resolution must be >= 64");
    xi_.resize(static_cast<std::size_t>(res_));
    w_.resize(static_cast<std::size_t>(res_));
    for (int m = 0; m < res_; ++m) {
        long double xi = (static_cast<long double>(m) + 0.5L) / res_;
        xi_[static_cast<std::size_t>(m)] = xi;
        long double w = static_cast<long double>(kernel_profile(static_cast<double>(xi))) / res_;
        if (n_ == 2) w *= xi;
        if (n_ == 3) w *= xi * xi;
        w_[static_cast<std::size_t>(m)] = w;
    }
    // aliasing of the midpoint rule sits at distance 2 pi res; stay well inside it
    extent_ = std::min(2400, static_cast<int>(std::floor(0.5 * std::numbers::pi * res_)));
    if (n_ == 1) {
        step_ = 1.0;
        cache_.resize(static_cast<std::size_t>(extent_) + 1);
        for (int j = 0; j <= extent_; ++j) cache_[static_cast<std::size_t>(j)] = value_radial(j);
    } else {
        step_ = 0.5;
        cache_.resize(257);
        for (std::size_t j = 0; j < cache_.size(); ++j) cache_[j] = value_radial(step_ * static_cast<double>(j));
    }
}

double Kernel::value_radial(double r) const {
    r = std::fabs(r);
    long double acc = 0.0L;
    switch (n_) {
    case 1:
        for (std::size_t m = 0; m < xi_.size(); ++m) acc += w_[m] * std::cos(static_cast<long double>(r) * xi_[m]);
        return static_cast<double>(acc / kPiL);
    case 2:
        for (std::size_t m = 0; m < xi_.size(); ++m)
            acc += w_[m] * std::cyl_bessel_j(0.0, static_cast<double>(xi_[m]) * r);
        return static_cast<double>(acc / (2.0L * kPiL));
    default:
        for (std::size_t m = 0; m < xi_.size(); ++m) {
            long double a = xi_[m] * r;
            acc += w_[m] * (a == 0.0L ? 1.0L : std::sin(a) / a);
        }
        return static_cast<double>(acc / (2.0L * kPiL * kPiL));
    }
}

double Kernel::value(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n_) throw ArgumentError("Kernel::value: point dimension mismatch");
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    return value_radial(std::sqrt(r2));
}

std::complex<double> Kernel::value(std::complex<double> z) const {
    if (n_ != 1) throw ArgumentError("Kernel::value: complex evaluation needs n = 1");
    std::complex<long double> zz(z.real(), z.imag()), acc(0.0L, 0.0L);
    for (std::size_t m = 0; m < xi_.size(); ++m) acc += w_[m] * std::cos(zz * xi_[m]);
    acc /= kPiL;
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

long double Kernel::derivative(int order, long double x) const {
    if (n_ != 1) throw ArgumentError("Kernel::derivative: needs n = 1");
    const long double shift = order * kPiL / 2.0L;
    long double acc = 0.0L;
    for (std::size_t m = 0; m < xi_.size(); ++m)
        acc += w_[m] * std::pow(xi_[m], order) * std::cos(x * xi_[m] + shift);
    return acc / kPiL;
}

const std::vector<long double>& Kernel::derivative_samples(int order) const {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = deriv_cache_.find(order);
    if (it != deriv_cache_.end()) return it->second;
    std::vector<long double> v(static_cast<std::size_t>(extent_) + 1);
    for (int j = 0; j <= extent_; ++j) v[static_cast<std::size_t>(j)] = derivative(order, j);
    return deriv_cache_.emplace(order, std::move(v)).first->second;
}

std::shared_ptr<const Kernel> build_kernel(int n, int resolution) { return std::make_shared<const Kernel>(n, resolution); }

double kernel_moments(const Kernel& kernel, const std::vector<int>& alpha, const std::vector<int>& beta, int k) {
    if (kernel.dimension() != 1) throw ArgumentError("kernel_moments: implemented for n = 1");
    if (alpha.size() != 1 || beta.size() != 1) throw ArgumentError("kernel_moments: multi-index dimension mismatch");
    if (k > 6 || k < 0) throw ArgumentError("kernel_moments: order bound must lie in [0, 6]");
    const int a = alpha[0], b = beta[0];
    if (a < 0 || b < 0) throw ArgumentError("kernel_moments: negative multi-index");
    if (a > k || b > k) throw ArgumentError("kernel_moments: order beyond budget");
    const auto& D = kernel.derivative_samples(b);
    // trapezoid with unit step is exact for integrands of bandwidth below 2 pi
    const long double sign = ((a + b) % 2 == 0) ? 2.0L : 0.0L;
    long double acc = (a == 0) ? D[0] : 0.0L;
    if (sign != 0.0L) {
        for (std::size_t j = D.size() - 1; j >= 1; --j) acc += sign * std::pow(static_cast<long double>(j), a) * D[j];
    }
    return static_cast<double>(acc);
}

PaleyWienerReport paley_wiener_check(const Kernel& kernel, int p, const std::vector<std::complex<double>>& z) {
    if (p < 1) throw ArgumentError("paley_wiener_check: p must be >= 1");
    if (z.empty()) throw ArgumentError("paley_wiener_check: no sample points");
    PaleyWienerReport rep;
    double reach = 0.0;
    for (auto zz : z) {
        if (std::fabs(zz.imag()) > 1.0) throw ArgumentError("paley_wiener_check: |Im z| must be <= 1");
        double v = std::abs(kernel.value(zz)) * std::pow(1.0 + std::fabs(zz.real()), p) * std::exp(-std::fabs(zz.imag()));
        rep.samples.push_back({zz, v});
        rep.max_ratio = std::max(rep.max_ratio, v);
        reach = std::max(reach, std::fabs(zz.real()));
    }
    // probe further out along the real axis: the ratio must not climb past the sampled maximum
    bool stable = std::isfinite(rep.max_ratio);
    for (double x = std::max(2.0 * reach, 8.0); x <= 2000.0 && stable; x *= 2.0) {
        double v = std::abs(kernel.value(std::complex<double>(x, 0.0))) * std::pow(1.0 + x, p);
        if (v > rep.max_ratio * (1.0 + 1e-9)) stable = false;
    }
    rep.verdict = stable;
    return rep;
}

} // namespace modkam
