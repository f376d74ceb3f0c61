#pragma once

#include "modkam/kernel.hpp"
#include "modkam/modulus.hpp"
#include "modkam/torus_function.hpp"

#include <vector>

namespace modkam {

// S_r f: coefficient at k times Khat(2 pi r |k|)
TorusFunction smooth(const TorusFunction& f, double r);

// S_r f at real points by quadrature of the convolution with r^{-1} K(./r), n = 1
std::vector<double> smooth_by_convolution(const Kernel& kernel, const TorusFunction& f, double r,
                                          const std::vector<double>& x);

// sum_j d^j f(u) (i v)^j / j! along axis 0, j <= order, on the grid
std::vector<cplx> taylor_comparator(const TorusFunction& f, int order, double v);

// n = 1 cosine series with coefficients |m|^{-(k+1+alpha_hat)}, 1 <= |m| < n/2
TorusFunction synthesize_ck_function(int k, double alpha_hat, int n = 8192);

struct SmoothErrorRow {
    double r = 0.0;
    int order = 0;               // |alpha|
    double error = 0.0;          // sup over the real grid
    double strip_error = 0.0;    // sup over Im x = r against the Taylor comparator
    double bound = 0.0;          // r^{k-|alpha|} w(r)
    double ratio = 0.0;          // error / bound
};

struct SmoothErrorFit {
    int order = 0;
    double slope_vs_r = 0.0;
    double slope_vs_bound = 0.0;
    double offset = 0.0;     // intercept of ln error against ln bound
    bool exact = false;      // every error is zero
    bool non_monotone = false;
};

struct SmoothErrorReport {
    std::vector<SmoothErrorRow> rows;
    std::vector<SmoothErrorFit> fits;  // one per order in {0, k}
};

SmoothErrorReport smooth_error_report(const TorusFunction& f, const ModulusSpec& m, int k, const std::vector<double>& r_list);

} // namespace modkam
