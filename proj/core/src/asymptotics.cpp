#include "modkam/asymptotics.hpp"

#include "modkam/error.hpp"
#include "modkam/quadrature.hpp"

#include <cmath>

namespace modkam {

namespace {

// ln of (ln z)(ln ln z)...(ln..ln z)^lambda at ln z = u
double log_iterated(int rho, double lambda, double u) {
    double L = u, acc = 0.0;
    for (int i = 1; i < rho; ++i) {
        acc += std::log(L);
        L = std::log(L);
    }
    return acc + lambda * std::log(L);
}

} // namespace

double iterated_log_ratio(int rho, double lambda, double M, double X) {
    if (rho < 1 || !(lambda > 0.0) || !(X > M)) throw ArgumentError("iterated_log_ratio: bad arguments");
    double L = std::log(M);
    for (int i = 1; i < rho; ++i) {
        if (!(L > 1.0)) throw ArgumentError("iterated_log_ratio: M too small for rho");
        L = std::log(L);
    }
    if (!(L > 0.0)) throw ArgumentError("iterated_log_ratio: M too small for rho");
    auto h = [=](double u) { return u - log_iterated(rho, lambda, u); };
    double lnI = log_integral(h, std::log(M), std::log(X));
    double lnB = std::log(X) - log_iterated(rho, lambda, std::log(X));
    return std::exp(lnI - lnB);
}

double power_log_head_ratio(double sigma, double lambda, double M, double X) {
    if (!(sigma > 0.0 && sigma < 1.0) || !(M > 1.0) || !(X > M)) throw ArgumentError("power_log_head_ratio: bad arguments");
    auto h = [=](double u) { return (1.0 - sigma) * u - lambda * std::log(u); };
    double lnI = log_integral(h, std::log(M), std::log(X));
    double lnB = (1.0 - sigma) * std::log(X) - lambda * std::log(std::log(X));
    return std::exp(lnI - lnB);
}

double power_log_tail_ratio(double sigma, double lambda, double X) {
    if (!(sigma > 0.0) || !(X > 1.0)) throw ArgumentError("power_log_tail_ratio: bad arguments");
    auto h = [=](double u) { return -sigma * u - lambda * std::log(u); };
    TailIntegral t = tail_integral(h, std::log(X));
    if (!t.converges) throw NumericError("power_log_tail_ratio: tail integral did not converge");
    double lnB = -sigma * std::log(X) - lambda * std::log(std::log(X));
    return std::exp(t.log_value - lnB);
}

} // namespace modkam
