#pragma once

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace modkam {

// radial Fourier profile: 1 on [0, 1/2], 0 on [1, inf), smooth bump transition between
double kernel_profile(double rho);

class Kernel {
public:
    Kernel(int dimension, int resolution);

    int dimension() const { return n_; }
    int resolution() const { return res_; }
    double fourier_profile(double xi_norm) const { return kernel_profile(xi_norm); }

    // K at a real point (x.size() == dimension)
    double value(const std::vector<double>& x) const;
    double value_radial(double r) const;

    // n = 1 only
    std::complex<double> value(std::complex<double> z) const;
    long double derivative(int order, long double x) const;

    // cached real-grid samples, n = 1: K(j * step), j = 0..count-1; radial otherwise
    double cache_step() const { return step_; }
    const std::vector<double>& cached_samples() const { return cache_; }

    // d^order K at integers 0..extent (n = 1), computed lazily
    const std::vector<long double>& derivative_samples(int order) const;
    int moment_extent() const { return extent_; }

private:
    int n_;
    int res_;
    double step_ = 1.0;
    int extent_ = 0;
    std::vector<double> cache_;
    std::vector<long double> xi_;
    std::vector<long double> w_;  // profile times midpoint weight (times radial Jacobian when n > 1)
    mutable std::mutex mu_;
    mutable std::map<int, std::vector<long double>> deriv_cache_;
};

std::shared_ptr<const Kernel> build_kernel(int n, int resolution = 1024);

// integral of x^alpha d^beta K, n = 1; |alpha|, |beta| <= k <= 6
double kernel_moments(const Kernel& kernel, const std::vector<int>& alpha, const std::vector<int>& beta, int k);

struct PaleyWienerSample {
    std::complex<double> z;
    double ratio;
};

struct PaleyWienerReport {
    double max_ratio = 0.0;
    bool verdict = false;
    std::vector<PaleyWienerSample> samples;
};

PaleyWienerReport paley_wiener_check(const Kernel& kernel, int p, const std::vector<std::complex<double>>& z);

} // namespace modkam
