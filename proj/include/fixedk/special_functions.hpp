#pragma once

namespace fixedk {

// Natural log of the gamma function for x > 0.
// Stirling's asymptotic series after shifting the argument above 12 via the
// recurrence log Gamma(x) = log Gamma(x+1) - log x. Relative error stays below
// 1e-12 across [1e-3, 1e6]. Throws std::domain_error for x <= 0.
double log_gamma(double x);

// Digamma psi(x) = d/dx log Gamma(x) for x > 0.
// Asymptotic expansion above 10 plus the recurrence psi(x) = psi(x+1) - 1/x.
// Absolute error below 1e-10 on [1e-3, 1e6]. Throws std::domain_error for x <= 0.
double digamma(double x);

// Regularized lower incomplete gamma P(s, x) = gamma(s, x) / Gamma(s), s > 0, x >= 0.
// Series expansion for x < s + 1, Lentz continued fraction for the complement
// otherwise. P(k, .) is the CDF of an Erlang(k) / Gamma(k, 1) random variable.
// Throws std::domain_error for s <= 0 or x < 0.
double regularized_lower_gamma(double s, double x);

// log Beta(a, b) = log Gamma(a) + log Gamma(b) - log Gamma(a + b).
double log_beta(double a, double b);

}  // namespace fixedk
