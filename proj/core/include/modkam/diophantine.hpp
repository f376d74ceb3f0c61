#pragma once

#include <optional>
#include <vector>

namespace modkam {

struct Frequency {
    std::vector<double> omega;
    double tau = 1.0;
    std::optional<double> alpha_star;
    int k_max = 0;
};

struct DioResult {
    double value = 0.0;               // min over 0 < |k|_1 <= k_max of |<k,omega>| |k|^tau
    std::vector<int> witness;         // minimizing k, first nonzero entry positive
    bool resonant = false;
};

DioResult dio_search(const std::vector<double>& omega, double tau, int k_max);
double dio_constant(const std::vector<double>& omega, double tau, int k_max);

// throws ResonanceError naming the witness on a zero minimum
Frequency certify(const std::vector<double>& omega, double tau, int k_max = 200);

std::vector<double> golden_frequency();  // (1, (1+sqrt 5)/2)

} // namespace modkam
