#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace modkam {

using cplx = std::complex<double>;

// Trigonometric polynomial on T^n = (R/Z)^n, stored as dense Fourier coefficients on an N^n lattice.
// Axis index i carries frequency i for i < N/2 and i - N otherwise.  Grid points are j/N.
class TorusFunction {
public:
    TorusFunction() = default;
    TorusFunction(int dim, int n);

    static TorusFunction from_samples(int dim, int n, const std::vector<double>& values);
    static TorusFunction from_complex_samples(int dim, int n, const std::vector<cplx>& values);
    static TorusFunction constant(int dim, int n, double c);

    int dim() const { return dim_; }
    int n() const { return n_; }
    std::size_t size() const { return coef_.size(); }
    bool empty() const { return coef_.empty(); }

    int frequency(int axis_index) const { return axis_index < n_ / 2 ? axis_index : axis_index - n_; }
    std::vector<int> frequencies(std::size_t flat) const;
    std::size_t flat_index(const std::vector<int>& k) const;  // throws if out of range

    cplx coeff(const std::vector<int>& k) const;
    void set_coeff(const std::vector<int>& k, cplx value);
    std::vector<cplx>& coefficients() { return coef_; }
    const std::vector<cplx>& coefficients() const { return coef_; }

    std::vector<double> samples() const;        // real part on the grid
    std::vector<cplx> complex_samples() const;
    std::vector<double> grid_point(std::size_t flat) const;

    double eval(const std::vector<double>& x) const;
    cplx eval(const std::vector<cplx>& z) const;
    // real values at many points (row-major, dim entries per point)
    std::vector<double> eval_points(const std::vector<double>& pts) const;

    TorusFunction derivative(int axis, int order = 1) const;
    TorusFunction truncated(int max_abs_frequency) const;
    TorusFunction resized(int n_new) const;

    double mean() const { return coef_.empty() ? 0.0 : coef_[0].real(); }
    void set_mean(double m) { coef_[0] = m; }

    TorusFunction& operator+=(const TorusFunction& o);
    TorusFunction& operator-=(const TorusFunction& o);
    TorusFunction& operator*=(double s);

    double sup_norm_grid() const;

private:
    int dim_ = 0;
    int n_ = 0;
    std::vector<cplx> coef_;
};

TorusFunction operator+(TorusFunction a, const TorusFunction& b);
TorusFunction operator-(TorusFunction a, const TorusFunction& b);
TorusFunction operator*(double s, TorusFunction a);

// evaluate several functions on one point set, sharing exponential tables
std::vector<std::vector<double>> eval_points_many(const std::vector<const TorusFunction*>& fs, const std::vector<double>& pts);

std::vector<double> torus_grid_points(int dim, int n);

// spectral FFT wrappers (unnormalised forward, inverse with 1/N^n applied in forward)
void fft_forward(int dim, int n, std::vector<cplx>& data);
void fft_inverse(int dim, int n, std::vector<cplx>& data);

} // namespace modkam
