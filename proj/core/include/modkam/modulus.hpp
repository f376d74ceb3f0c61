#pragma once

#include <string>
#include <utility>
#include <vector>

namespace modkam {

enum class ModulusKind { hoelder, log_hoelder, gen_log_hoelder, power_log, tabulated };

std::string to_string(ModulusKind k);
ModulusKind modulus_kind_from_string(const std::string& s);

// x^a (ln 1/x)^{-b}, used below the smallest tabulated abscissa.
struct TailLaw {
    double a = 0.0;
    double b = 0.0;
};

// Modulus of continuity on (0, delta].
//   hoelder          x^alpha
//   log_hoelder      (ln 1/x)^{-lambda}
//   gen_log_hoelder  1 / (L1 L2 ... L_rho^lambda), L_i the i-fold iterated ln 1/x
//   power_log        x^alpha (ln 1/x)^{-lambda}
//   tabulated        samples (ln x_j, ln w_j), interpolated linearly in log-log
struct ModulusSpec {
    ModulusKind kind = ModulusKind::hoelder;
    double alpha = 1.0;
    double lambda = 1.0;
    int depth = 1;
    double delta = 1.0;

    std::vector<double> log_x;  // strictly increasing
    std::vector<double> log_w;  // nondecreasing
    bool has_tail = false;
    TailLaw tail;

    static ModulusSpec hoelder(double alpha, double delta = 1.0);
    static ModulusSpec log_hoelder(double lambda, double delta = 0.5);
    static ModulusSpec gen_log_hoelder(int depth, double lambda);
    static ModulusSpec gen_log_hoelder(int depth, double lambda, double delta);
    static ModulusSpec power_log(double a, double lambda, double delta = 0.5);
    static ModulusSpec tabulated(const std::vector<std::pair<double, double>>& samples);
    static ModulusSpec tabulated_log(std::vector<double> log_x, std::vector<double> log_w);

    double log_delta() const;
};

// Default delta for gen_log_hoelder: L_rho(delta) = ln 2.
double gen_log_default_delta(int depth);
double gen_log_default_log_delta(int depth);

double eval(const ModulusSpec& m, double x);

// ln w(e^{-s}); s >= ln(1/delta). Works where e^{-s} underflows.
double log_eval(const ModulusSpec& m, double s);

enum class Property { semi_separable, weak_homogeneous, convex, comparison };
std::string to_string(Property p);

struct WitnessPoint {
    double x;
    double value;
};

struct PropertyReport {
    Property property = Property::semi_separable;
    bool verdict = false;
    std::vector<WitnessPoint> witness;
    double bound_constant = 0.0;
    // filled by convexity_check when verdict holds
    std::vector<Property> implied;
    double second_difference_extreme = 0.0;
    // weak_homogeneity: tail ratios extrapolated to x -> 0+ in 1/ln(1/x)
    double limit_estimate = 0.0;
};

enum class Ordering { weaker, strictly_weaker, equivalent, stronger, strictly_stronger, incomparable };
std::string to_string(Ordering o);

// x_j = hi * (lo/hi)^{j/(count-1)}
std::vector<double> geometric_grid(double hi, double lo, int count);

PropertyReport semi_separability(const ModulusSpec& m, const std::vector<double>& x_grid, int r_resolution);
PropertyReport weak_homogeneity(const ModulusSpec& m, double a, const std::vector<double>& x_grid);
Ordering compare(const ModulusSpec& m1, const ModulusSpec& m2, const std::vector<double>& x_grid);
PropertyReport convexity_check(const ModulusSpec& m, const std::vector<double>& x_grid);

// default grids
std::vector<double> default_semi_grid();
std::vector<double> default_tail_grid(const ModulusSpec& m);

} // namespace modkam
