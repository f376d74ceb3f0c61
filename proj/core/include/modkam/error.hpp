#pragma once

#include <stdexcept>
#include <string>

namespace modkam {

// Bad caller input (usage-level).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Evaluation point outside (0, delta].
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Analysis could not produce an answer (bracket failure, degenerate phi, ...).
struct AnalysisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResonanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolvabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NondegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HypothesisError : std::runtime_error {
    HypothesisError(std::string which, double margin, const std::string& what)
        : std::runtime_error(what), hypothesis(std::move(which)), margin(margin) {}
    std::string hypothesis;
    double margin;
};

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace modkam
