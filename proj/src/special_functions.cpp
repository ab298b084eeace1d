#include "fixedk/special_functions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fixedk {

namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178;  // log(2*pi)/2

// Stirling coefficients B_{2n} / (2n (2n-1)) for the log-gamma tail series.
constexpr double kStirling[] = {
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
};

// Coefficients B_{2n} / (2n) for the digamma tail series.
constexpr double kDigammaTail[] = {
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    691.0 / 32760.0,
    -1.0 / 12.0,
};

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("log_gamma requires x > 0, got " + std::to_string(x));
    }
    // Shift into the asymptotic regime.
    double shift = 0.0;
    while (x < 12.0) {
        shift -= std::log(x);
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = 0.0;
    double power = inv;
    for (double c : kStirling) {
        series += c * power;
        power *= inv2;
    }
    return shift + (x - 0.5) * std::log(x) - x + kHalfLogTwoPi + series;
}

double digamma(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("digamma requires x > 0, got " + std::to_string(x));
    }
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = 0.0;
    double power = inv2;
    for (double c : kDigammaTail) {
        series -= c * power;
        power *= inv2;
    }
    return acc + std::log(x) - 0.5 * inv + series;
}

double regularized_lower_gamma(double s, double x) {
    if (!(s > 0.0)) {
        throw std::domain_error("regularized_lower_gamma requires s > 0, got " + std::to_string(s));
    }
    if (!(x >= 0.0)) {
        throw std::domain_error("regularized_lower_gamma requires x >= 0, got " + std::to_string(x));
    }
    if (x == 0.0) {
        return 0.0;
    }
    const double log_prefactor = s * std::log(x) - x - log_gamma(s);
    if (x < s + 1.0) {
        // P(s,x) = x^s e^-x / Gamma(s) * sum_n x^n / (s (s+1) ... (s+n)).
        double term = 1.0 / s;
        double sum = term;
        for (int n = 1; n < 500; ++n) {
            term *= x / (s + n);
            sum += term;
            if (term < sum * 1e-16) {
                break;
            }
        }
        return std::exp(log_prefactor) * sum;
    }
    // Complement Q(s,x) via the Lentz continued fraction, then P = 1 - Q.
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) {
            break;
        }
    }
    return 1.0 - std::exp(log_prefactor) * h;
}

double log_beta(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

}  // namespace fixedk
