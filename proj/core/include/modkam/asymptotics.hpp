#pragma once

namespace modkam {

// integral over [M, X] of 1/((ln z)...(ln..ln z)^lambda) divided by X/((ln X)...(ln..ln X)^lambda)
double iterated_log_ratio(int rho, double lambda, double M, double X);

// integral over [M, X] of z^{-sigma} (ln z)^{-lambda} divided by X^{1-sigma} (ln X)^{-lambda}
double power_log_head_ratio(double sigma, double lambda, double M, double X);

// integral over [X, inf) of z^{-1-sigma} (ln z)^{-lambda} divided by X^{-sigma} (ln X)^{-lambda}
double power_log_tail_ratio(double sigma, double lambda, double X);

} // namespace modkam
