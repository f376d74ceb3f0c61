#pragma once

#include "modkam/diophantine.hpp"
#include "modkam/hamiltonian.hpp"
#include "modkam/regularity.hpp"
#include "modkam/torus_function.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace modkam {

// x = xi + u_minus_id(xi), y = v(xi)
struct TorusMap {
    int n = 0;
    int lattice = 0;
    std::vector<TorusFunction> u_minus_id;
    std::vector<TorusFunction> v;
    double strip = 0.0;

    static TorusMap identity(int n, int lattice);
    double min_jacobian_det() const;  // of u_xi on the grid
};

// One accepted step psi: xi = xi' + a(xi'), eta = vt(xi') + (I + a_xi)^{-T} eta'
struct StepTransform {
    double r_nu = 0.0;
    TorusFunction U;                 // accumulated solution of DU = -(H(.,0) - mean)
    std::vector<TorusFunction> V;    // angle displacement a
    std::vector<TorusFunction> vt;   // action shift at eta' = 0
    std::vector<TorusFunction> Q;    // n*n, K_etaeta(., 0) after the step
    std::vector<double> c;           // constant frequency adjustment, summed
    int inner_iterations = 0;
};

struct StepRecord {
    int nu = 0;
    double r_nu = 0.0;
    double psi_minus_id = 0.0;
    double psi_jac_minus_id = 0.0;
    double freq_error_in = 0.0;
    double angle_error_in = 0.0;
    double freq_error = 0.0;
    double angle_error = 0.0;
    double u_delta = 0.0;
    double w_delta = 0.0;
    double q_diff = 0.0;
    double ux_sup = 0.0;
    double jac_sum = 0.0;  // partial sum of sup|u_xi^nu - u_xi^{nu-1}|
    // measured / (r^p w(r)) for the step bounds
    double ratio_psi = 0.0;  // p = k - 2 tau - 1
    double ratio_jac = 0.0;  // p = k - 2 tau - 2
    double ratio_q = 0.0;    // p = k - 2 tau - 2, divided by 2M
    double ratio_ux = 0.0;   // p = k - tau - 1
    double ratio_u = 0.0;    // u-delta, p = k - 2 tau - 1
    double ratio_w = 0.0;    // w-delta, p = k - tau - 1
    double residual_y = 0.0; // against the unsmoothed H
    double residual_x = 0.0;
    double min_det = 0.0;
    int inner_iterations = 0;
};

struct IterationTrace {
    std::vector<StepRecord> records;
    std::vector<StepTransform> steps;  // composition chain psi^0, psi^1, ...
    std::string stop_reason;
    int k = 0;
    double tau = 0.0;
    double epsilon = 0.0;
};

struct KamConfig {
    double theta = 1.0 / std::sqrt(2.0);
    int nu_max = 8;
    int min_steps = 5;
    int lattice = 64;
    double newton_tol = 1e-12;
    int max_inner = 30;
    double accept_tol = 1e-8;      // frequency error a step must reach
    double delta_floor = 1e-13;    // divergence test ignores deltas below this
    double stop_floor = 1e-14;
    double inversion_tol = 1e-12;
    double gate = 1.0;             // input errors above this are refused
};

struct KamResult {
    TorusMap torus;
    IterationTrace trace;
};

// D phi = g with D = sum omega_j d_j; coefficient phi_k = g_k / (2 pi i <k, omega>)
TorusFunction solve_homological(const TorusFunction& g, const std::vector<double>& omega, double divisor_floor = 0.0);
TorusFunction apply_D(const TorusFunction& f, const std::vector<double>& omega);
double homological_residual(const TorusFunction& phi, const TorusFunction& g, const std::vector<double>& omega);

struct StepOutcome {
    StepTransform step;
    TorusMap next;
    double freq_error_in = 0.0, angle_error_in = 0.0;
    double freq_error = 0.0, angle_error = 0.0;
};

// one frequency-preserving step on the smoothed data, starting from the embedding `current`
StepOutcome kam_step(const HamiltonianModel& Hnu, const TorusMap& current, const std::vector<double>& omega, double theta,
                     double r_star, const KamConfig& config = {});

// throws HypothesisError before iterating; DivergenceError leaves the partial trace in *partial
KamResult run_kam(const HamiltonianModel& model, const Frequency& freq, const KamConfig& config = {},
                  IterationTrace* partial = nullptr);

// sup |Du - H_y(u,v)|, sup |Dv + H_x(u,v)| on the torus grid
std::pair<double, double> invariance_residual(const HamiltonianModel& model, const TorusMap& torus,
                                              const std::vector<double>& omega);

// w = v o u^{-1} on the grid, Newton per point
std::vector<TorusFunction> graph_of(const TorusMap& torus, double tol = 1e-12);

// phi^nu(xi, 0) evaluated through the stored chain; rows of n angles then n actions
std::vector<double> evaluate_chain(const std::vector<StepTransform>& steps, const std::vector<double>& pts);
// sup difference between the flattened torus and the chain on the grid
double composition_gap(const KamResult& result);

struct ConjugacyRegularity {
    RegularityReport measured_u;
    RegularityReport measured_w;
    int k1_star = 0;
    int k2_star = 0;
    RegularityReport theoretical_u;
    RegularityReport theoretical_w;
};

// theoretical reports for i = 1 (u) and i = 2 (v o u^{-1})
std::pair<RegularityReport, RegularityReport> theoretical_regularity(const ModulusSpec& w, int k, double tau, double eps,
                                                                    int* k1 = nullptr, int* k2 = nullptr);
ConjugacyRegularity conjugacy_regularity(const IterationTrace& trace, const HamiltonianModel& model);

} // namespace modkam
