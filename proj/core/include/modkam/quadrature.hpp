#pragma once

#include <functional>
#include <vector>

namespace modkam {

using LogIntegrand = std::function<double(double)>;

// ln of the integral of exp(h(s)) over [a, b]. -inf for an empty interval.
double log_integral(const LogIntegrand& h, double a, double b);

double log_sum_exp(double a, double b);

struct TailPoint {
    double upper;     // truncation point T_j
    double log_partial; // ln of the integral over [s0, T_j]
};

struct TailIntegral {
    bool converges = false;
    double log_value = 0.0;   // extrapolated when convergent, last partial otherwise
    double rate = 0.0;        // d ln I / d T over the last doublings
    double decay_power = 0.0; // fitted p of increments ~ j^{-p} (algebraic regime)
    std::vector<TailPoint> trace;
};

// integral of exp(h(s)) over [s0, inf), decided on doubling truncations T_j = T_0 2^j
TailIntegral tail_integral(const LogIntegrand& h, double s0, int doublings = 60);

// least-squares slope and intercept
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// y = c0 + c1 x1 + c2 x2
struct PlaneFit {
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
};
PlaneFit fit_plane(const std::vector<double>& x1, const std::vector<double>& x2, const std::vector<double>& y);

} // namespace modkam
