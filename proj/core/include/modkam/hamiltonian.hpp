#pragma once

#include "modkam/diophantine.hpp"
#include "modkam/modulus.hpp"
#include "modkam/torus_function.hpp"

#include <memory>
#include <string>
#include <vector>

namespace modkam {

// Even action profile with P^{(6)}(s) = (1 - ln|s|)^{-lambda} and P^{(j)}(0) = 0 for j <= 5.
// Lower derivatives by cumulative quadrature on [0, 1].
class ActionProfile {
public:
    explicit ActionProfile(double lambda, int samples = 1 << 15);

    double lambda() const { return lambda_; }
    int samples() const { return static_cast<int>(nodes_); }
    // P^{(order)}(s), 0 <= order <= 6, |s| <= 1
    double derivative(int order, double s) const;
    double value(double s) const { return derivative(0, s); }

    static double top(double lambda, double s);

private:
    double lambda_;
    std::size_t nodes_;
    double h_;
    std::vector<double> d_[7];
};

enum class ModelKind { integrable, hoelder_test, log_hoelder_example, custom };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

// H(x,y) = h0(x) + <h1(x), y> + y^T h2(x) y / 2 + p_scale * sum_j P(y_j)
struct HamiltonianModel {
    int n = 2;
    ModelKind kind = ModelKind::custom;
    double rho = 1.0;        // action radius
    int k = 6;
    ModulusSpec modulus = ModulusSpec::hoelder(1.0);
    double M = 1.0;
    double epsilon = 0.1;
    std::vector<double> omega;

    TorusFunction h0;
    std::vector<TorusFunction> h1;  // n
    std::vector<TorusFunction> h2;  // n*n row-major, symmetric
    double p_scale = 0.0;
    std::shared_ptr<const ActionProfile> P;

    int lattice() const { return h0.n(); }
};

struct ExampleParams {
    std::vector<double> omega;
    double M = 1e7;
    double epsilon = 0.1;
    double lambda = 1.5;
    double ell = 7.5;      // hoelder_test: regularity of the angle term
    int k = 6;
    int lattice = 8;       // angle lattice of the model data
};

HamiltonianModel build_example_hamiltonian(ModelKind kind, const ExampleParams& p);

// values at a batch of points; x and y row-major with n entries per point
struct HamiltonianValues {
    std::vector<double> H;    // np
    std::vector<double> Hx;   // np * n
    std::vector<double> Hy;   // np * n
    std::vector<double> Hyy;  // np * n * n
};

// Precomputed angle derivatives for repeated batch evaluation
class HamiltonianEvaluator {
public:
    explicit HamiltonianEvaluator(const HamiltonianModel& model);
    const HamiltonianModel& model() const { return model_; }
    HamiltonianValues operator()(const std::vector<double>& x, const std::vector<double>& y) const;

private:
    HamiltonianModel model_;
    std::vector<const TorusFunction*> fns_;
    std::vector<TorusFunction> store_;
};

HamiltonianValues evaluate(const HamiltonianModel& model, const std::vector<double>& x, const std::vector<double>& y);

// S_{r_nu} applied to every angle coefficient function, r_nu = eps 2^{-nu}
HamiltonianModel approximate_sequence(const HamiltonianModel& model, int nu);
double step_scale(const HamiltonianModel& model, int nu);

struct HypothesisCheck {
    std::string name;  // H1..H4
    bool passed = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;   // rhs - lhs, or log ratio for H1
    std::string detail;
};

struct HypothesisReport {
    std::vector<HypothesisCheck> checks;
    bool all_passed() const;
    const HypothesisCheck* first_failure() const;
};

HypothesisReport check_hypotheses(const HamiltonianModel& model, const Frequency& freq);
// throws HypothesisError for the first failing hypothesis
void require_hypotheses(const HamiltonianModel& model, const Frequency& freq);

} // namespace modkam
