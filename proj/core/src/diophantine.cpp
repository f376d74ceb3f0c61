#include "modkam/diophantine.hpp"

#include "modkam/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace modkam {

namespace {

struct Search {
    const std::vector<double>& w;
    double tau;
    int kmax;
    std::vector<int> k;
    DioResult best;
    std::vector<double> pow_cache;

    void visit() {
        int norm = 0;
        double dot = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) {
            norm += std::abs(k[i]);
            dot += k[i] * w[i];
            scale += std::fabs(k[i] * w[i]);
        }
        if (norm == 0) return;
        // half lattice: first nonzero entry positive
        for (int v : k) {
            if (v > 0) break;
            if (v < 0) return;
        }
        double ad = std::fabs(dot);
        bool exact = ad <= 8.0 * std::numeric_limits<double>::epsilon() * scale;
        double val = exact ? 0.0 : ad * pow_cache[static_cast<std::size_t>(norm)];
        if (val < best.value || (val == best.value && best.witness.empty())) {
            best.value = val;
            best.witness = k;
            best.resonant = exact;
        }
    }

    void rec(std::size_t i, int budget) {
        if (i + 1 == k.size()) {
            for (int v = -budget; v <= budget; ++v) {
                k[i] = v;
                visit();
            }
            return;
        }
        for (int v = -budget; v <= budget; ++v) {
            k[i] = v;
            rec(i + 1, budget - std::abs(v));
        }
    }
};

} // namespace

DioResult dio_search(const std::vector<double>& omega, double tau, int k_max) {
    if (omega.empty()) throw ArgumentError("dio_constant: omega must be nonempty");
    bool nonzero = false;
    for (double v : omega) {
        if (!std::isfinite(v)) throw ArgumentError("dio_constant: omega must be finite");
        if (v != 0.0) nonzero = true;
    }
    if (!nonzero) throw ArgumentError("dio_constant: omega must be nonzero");
    if (k_max < 1) throw ArgumentError("dio_constant: k_max must be >= 1");
    if (!(tau >= 0.0)) throw ArgumentError("dio_constant: tau must be nonnegative");
    Search s{omega, tau, k_max, std::vector<int>(omega.size(), 0), {}, {}};
    s.best.value = std::numeric_limits<double>::infinity();
    s.pow_cache.resize(static_cast<std::size_t>(k_max) + 1);
    for (int j = 0; j <= k_max; ++j) s.pow_cache[static_cast<std::size_t>(j)] = std::pow(static_cast<double>(j), tau);
    s.rec(0, k_max);
    return s.best;
}

double dio_constant(const std::vector<double>& omega, double tau, int k_max) { return dio_search(omega, tau, k_max).value; }

Frequency certify(const std::vector<double>& omega, double tau, int k_max) {
    DioResult r = dio_search(omega, tau, k_max);
    if (!(r.value > 0.0)) {
        std::ostringstream os;
        os << "resonance: <k, omega> = 0 at k = (";
        for (std::size_t i = 0; i < r.witness.size(); ++i) os << (i ? ", " : "") << r.witness[i];
        os << ")";
        throw ResonanceError(os.str());
    }
    Frequency f;
    f.omega = omega;
    f.tau = tau;
    f.alpha_star = r.value;
    f.k_max = k_max;
    return f;
}

std::vector<double> golden_frequency() { return {1.0, 0.5 * (1.0 + std::sqrt(5.0))}; }

} // namespace modkam
