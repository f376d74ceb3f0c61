#pragma once

#include "modkam/modulus.hpp"
#include "modkam/quadrature.hpp"

#include <optional>
#include <string>
#include <vector>

namespace modkam {

// phi(x) = x^p w(x)
struct PhiFunction {
    ModulusSpec base_modulus;
    double power_shift = 0.0;
    int label = 0;  // i in {1,2} when built from k, tau; 0 otherwise
};

struct IntegralVerdict {
    bool converges = false;
    double value = 0.0;            // NaN when divergent
    double log_value = 0.0;
    double divergence_rate = 0.0;  // d ln I_j / d ln(1/a_j); ~0 for log-type divergence
    double decay_power = 0.0;
    // (ln 1/a_j, ln I_j)
    std::vector<TailPoint> truncation_trace;
};

struct RegularityReport {
    bool analytic_limit = false;   // all deltas zero: no finite k*
    int k_star = 0;
    double epsilon = 0.5;
    std::vector<double> log_gamma;      // decreasing
    std::vector<double> log_omega_star; // ln of remaining modulus per gamma
    std::vector<double> log_L;
    std::vector<double> balance_mismatch;
    double balance_residual = 0.0;
    double tolerance = 0.1;
    ModulusSpec remaining_modulus;      // tabulated over the gamma grid
    // fitted phi when built from deltas
    std::optional<ModulusSpec> phi_fit;
};

// integral of w(x) x^q over (0, U], U = min(1, delta)
IntegralVerdict weighted_integral(const ModulusSpec& m, double q);

IntegralVerdict dini_integral(const ModulusSpec& m, int k, double tau);
IntegralVerdict classical_dini(const ModulusSpec& m);

PhiFunction phi_from_modulus(const ModulusSpec& m, int k, double tau, int i);

// order-j integral of phi against x^{-j}
IntegralVerdict phi_order_integral(const PhiFunction& phi, int order);

int critical_exponent(const PhiFunction& phi);

struct RemainingOptions {
    double tolerance = 0.1;
};

RegularityReport remaining_modulus(const PhiFunction& phi, int k_star, double eps, const std::vector<double>& gamma_grid,
                                   const RemainingOptions& opt = {});
RegularityReport remaining_modulus_log(const PhiFunction& phi, int k_star, double eps,
                                       const std::vector<double>& log_gamma_grid, const RemainingOptions& opt = {});

// ln gamma from ln(eps) - 3 down to the given floor, evenly spaced in ln ln(1/gamma)
std::vector<double> default_log_gamma_grid(double eps, double log_gamma_floor = -1e6, int count = 16);

struct ExponentFit {
    double power = 0.0;       // a in gamma^a (ln 1/gamma)^{-b}
    double log_power = 0.0;   // b
    double power_only = 0.0;  // slope of ln w* against ln gamma
    double log_only = 0.0;    // minus slope of ln w* against ln ln(1/gamma)
};
ExponentFit fit_remaining_exponents(const RegularityReport& rep);

RegularityReport regularity_from_deltas(const std::vector<double>& r_seq, const std::vector<double>& deltas);

} // namespace modkam
