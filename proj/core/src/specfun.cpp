#include "flockdyn/specfun.hpp"

#include <cmath>
#include <limits>

#include "flockdyn/error.hpp"
#include "flockdyn/numerics.hpp"

namespace flockdyn {

namespace {

// Regime crossovers. Calibrated once against an extended-precision series
// and boost::math; see tests/specfun_test.cpp for the accuracy sweep.
constexpr double kJSeriesMax = 12.0;
constexpr double kJMillerMax = 40.0;
constexpr double kISeriesMax = 30.0;
constexpr double kKSeriesMax = 2.0;
constexpr double kKAsymptoticMin = 30.0;
constexpr double kTrapezoidStep = 0.05;

// exp(x) overflows just above this.
constexpr double kMaxExpArgument = 709.782712893384;

void require_supported(BesselOrder nu) {
    if (!nu.is_supported()) {
        throw Error(ErrorCode::UnsupportedOrder, "unsupported Bessel order " + nu.str());
    }
}

void require_nonnegative(double x, const char* fn) {
    if (!(x >= 0.0)) {
        throw Error(ErrorCode::DomainError, std::string(fn) + ": argument must be >= 0");
    }
}

void require_positive(double x, const char* fn) {
    if (!(x > 0.0)) {
        throw Error(ErrorCode::DomainError, std::string(fn) + ": argument must be > 0");
    }
}

long double gamma_of_order_plus_one(BesselOrder nu) {
    return std::tgamma(static_cast<long double>(nu.value()) + 1.0L);
}

// x^{-nu} J_nu(x) (sign = -1) or x^{-nu} I_nu(x) (sign = +1) by the
// ascending series, nu >= 0.
long double reduced_series(BesselOrder nu, double x, int sign) {
    const long double v = nu.value();
    const long double q = static_cast<long double>(x) * x / 4.0L;
    long double term = std::pow(0.5L, v) / gamma_of_order_plus_one(nu);
    long double sum = term;
    for (int m = 1; m < 500; ++m) {
        term *= sign * q / (m * (m + v));
        sum += term;
        if (std::abs(term) <= 1e-21L * std::abs(sum)) break;
    }
    return sum;
}

// Coefficients of the Hankel expansions: a_k(nu) = prod_{j=1..k}(4nu^2-(2j-1)^2) / (k! 8^k).
// Returns sum_k s_k a_k / x^k with s_k = sign^k, truncated at the smallest term.
struct AsymptoticSums {
    long double even;
    long double odd;
};

AsymptoticSums hankel_sums(BesselOrder nu, double x, bool alternate_pairs) {
    const long double mu = 4.0L * nu.value() * nu.value();
    long double term = 1.0L;
    long double even = 1.0L;
    long double odd = 0.0L;
    long double prev_abs = std::numeric_limits<long double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const long double odd_factor = 2.0L * k - 1.0L;
        term *= (mu - odd_factor * odd_factor) / (k * 8.0L * x);
        if (term == 0.0L) break;
        const long double abs_term = std::abs(term);
        if (abs_term > prev_abs) break;
        prev_abs = abs_term;
        // For J: P = sum (-1)^j a_{2j}/x^{2j}, Q = sum (-1)^j a_{2j+1}/x^{2j+1}.
        const long double sign = (alternate_pairs && ((k / 2) % 2 == 1)) ? -1.0L : 1.0L;
        if (k % 2 == 0) {
            even += sign * term;
        } else {
            odd += sign * term;
        }
        if (abs_term < 1e-20L) break;
    }
    return {even, odd};
}

double j_asymptotic(BesselOrder nu, double x) {
    const AsymptoticSums s = hankel_sums(nu, x, true);
    const long double chi = x - (0.5L * nu.value() + 0.25L) * static_cast<long double>(kPi);
    return static_cast<double>(std::sqrt(2.0L / (static_cast<long double>(kPi) * x)) *
                               (s.even * std::cos(chi) - s.odd * std::sin(chi)));
}

// Miller's downward recurrence for integer orders, normalised by
// J_0 + 2 sum J_{2k} = 1.
double j_miller(int order, double x) {
    const int start = 2 * ((static_cast<int>(x) + 60) / 2);
    long double above = 0.0L;
    long double cur = 1e-30L;
    long double norm = 0.0L;
    long double wanted = 0.0L;
    for (int m = start; m >= 1; --m) {
        const long double below = 2.0L * m / x * cur - above;
        above = cur;
        cur = below;
        const int idx = m - 1;
        if (idx == order) wanted = cur;
        if (idx > 0 && idx % 2 == 0) norm += 2.0L * cur;
        if (std::abs(cur) > 1e300L) {
            above *= 1e-300L;
            cur *= 1e-300L;
            norm *= 1e-300L;
            wanted *= 1e-300L;
        }
    }
    norm += cur;
    return static_cast<double>(wanted / norm);
}

double j_half_integer(BesselOrder nu, double x) {
    const double pref = std::sqrt(2.0 / (kPi * x));
    const double j_minus = pref * std::cos(x);
    const double j_plus = pref * std::sin(x);
    if (nu.twice() == -1) return j_minus;
    if (nu.twice() == 1) return j_plus;
    // Upward recurrence J_{v+1} = (2v/x) J_v - J_{v-1}; stable for x > v.
    double lower = j_minus;
    double upper = j_plus;
    for (int twice = 1; twice < nu.twice(); twice += 2) {
        const double next = (twice / x) * upper - lower;
        lower = upper;
        upper = next;
    }
    return upper;
}

double i_scaled_nonnegative(BesselOrder nu, double x) {
    if (x == 0.0) return nu.twice() == 0 ? 1.0 : 0.0;
    if (nu.twice() == 1) {
        return std::sqrt(2.0 / (kPi * x)) * (-0.5 * std::expm1(-2.0 * x));
    }
    if (x <= kISeriesMax) {
        const long double reduced = reduced_series(nu, x, +1);
        return static_cast<double>(reduced * std::pow(static_cast<long double>(x), nu.value()) *
                                   std::exp(-static_cast<long double>(x)));
    }
    // e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum (-1)^k a_k / x^k.
    const long double mu = 4.0L * nu.value() * nu.value();
    long double term = 1.0L;
    long double sum = 1.0L;
    long double prev_abs = std::numeric_limits<long double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const long double odd_factor = 2.0L * k - 1.0L;
        term *= -(mu - odd_factor * odd_factor) / (k * 8.0L * x);
        const long double abs_term = std::abs(term);
        if (term == 0.0L || abs_term > prev_abs) break;
        prev_abs = abs_term;
        sum += term;
        if (abs_term < 1e-20L) break;
    }
    return static_cast<double>(sum / std::sqrt(2.0L * static_cast<long double>(kPi) * x));
}

// e^x K_0 and e^x K_1 for x <= kKSeriesMax from the logarithmic series.
void k01_series(double x, double& k0, double& k1) {
    const long double lx = x;
    const long double t = lx * lx / 4.0L;
    const long double log_half = std::log(lx / 2.0L);
    const long double gamma = kEulerGamma;

    long double i0 = 0.0L, i1 = 0.0L, s0 = 0.0L, s1 = 0.0L;
    long double tk = 1.0L;  // t^k / (k!)^2
    long double harmonic = 0.0L;
    for (int k = 0; k < 60; ++k) {
        if (k > 0) {
            tk *= t / (static_cast<long double>(k) * k);
            harmonic += 1.0L / k;
        }
        const long double tk1 = tk / (k + 1);  // t^k / (k! (k+1)!)
        i0 += tk;
        i1 += tk1;
        s0 += harmonic * tk;
        s1 += (-2.0L * gamma + 2.0L * harmonic + 1.0L / (k + 1)) * tk1;
        if (tk < 1e-22L * i0) break;
    }
    i1 *= lx / 2.0L;
    const long double raw_k0 = -(log_half + gamma) * i0 + s0;
    const long double raw_k1 = 1.0L / lx + log_half * i1 - (lx / 4.0L) * s1;
    const long double scale = std::exp(lx);
    k0 = static_cast<double>(raw_k0 * scale);
    k1 = static_cast<double>(raw_k1 * scale);
}

// e^x K_nu(x) = int_0^inf exp(-x (cosh t - 1)) cosh(nu t) dt by the
// trapezoidal rule, which converges geometrically for this analytic integrand.
void k01_trapezoid(double x, double& k0, double& k1) {
    const long double h = kTrapezoidStep;
    long double sum0 = 0.5L;
    long double sum1 = 0.5L;
    for (int j = 1; j < 100000; ++j) {
        const long double t = j * h;
        const long double w = std::exp(-x * (std::cosh(t) - 1.0L));
        sum0 += w;
        sum1 += w * std::cosh(t);
        if (w < 1e-22L * sum0) break;
    }
    k0 = static_cast<double>(h * sum0);
    k1 = static_cast<double>(h * sum1);
}

double k_asymptotic_scaled(BesselOrder nu, double x) {
    const long double mu = 4.0L * nu.value() * nu.value();
    long double term = 1.0L;
    long double sum = 1.0L;
    long double prev_abs = std::numeric_limits<long double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const long double odd_factor = 2.0L * k - 1.0L;
        term *= (mu - odd_factor * odd_factor) / (k * 8.0L * x);
        const long double abs_term = std::abs(term);
        if (term == 0.0L || abs_term > prev_abs) break;
        prev_abs = abs_term;
        sum += term;
        if (abs_term < 1e-20L) break;
    }
    return static_cast<double>(std::sqrt(static_cast<long double>(kPi) / (2.0L * x)) * sum);
}

double k_scaled_nonnegative(BesselOrder nu, double x) {
    if (!nu.is_integer()) {
        // K_{1/2} closed form, then K_{v+1} = K_{v-1} + (2v/x) K_v upward.
        const double k_half = std::sqrt(kPi / (2.0 * x));
        double lower = k_half;           // K_{-1/2}
        double upper = k_half;           // K_{1/2}
        for (int twice = 1; twice < nu.twice(); twice += 2) {
            const double next = lower + (twice / x) * upper;
            lower = upper;
            upper = next;
        }
        return upper;
    }
    double k0 = 0.0;
    double k1 = 0.0;
    if (x <= kKSeriesMax) {
        k01_series(x, k0, k1);
    } else if (x < kKAsymptoticMin) {
        k01_trapezoid(x, k0, k1);
    } else {
        k0 = k_asymptotic_scaled(BesselOrder::integer(0), x);
        k1 = k_asymptotic_scaled(BesselOrder::integer(1), x);
    }
    const int order = nu.twice() / 2;
    if (order == 0) return k0;
    double lower = k0;
    double upper = k1;
    for (int m = 1; m < order; ++m) {
        const double next = lower + (2.0 * m / x) * upper;
        lower = upper;
        upper = next;
    }
    return upper;
}

// Reflection for negative orders: J_{-1} = -J_1, I_{-1} = I_1, K_{-v} = K_v.
BesselOrder reflect(BesselOrder nu) {
    return nu.twice() < 0 ? BesselOrder::from_twice(-nu.twice()) : nu;
}

}  // namespace

BesselOrder BesselOrder::from_value(double v) {
    const double twice = 2.0 * v;
    const double rounded = std::round(twice);
    if (!std::isfinite(v) || std::abs(twice - rounded) > 1e-12 || std::abs(rounded) > 1e6) {
        throw Error(ErrorCode::UnsupportedOrder,
                    "Bessel order must be an integer or half-integer, got " + std::to_string(v));
    }
    return BesselOrder(static_cast<int>(rounded));
}

std::string BesselOrder::str() const {
    if (is_integer()) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
}

double bessel_j(BesselOrder nu, double x) {
    require_supported(nu);
    require_nonnegative(x, "bessel_j");
    if (!nu.is_integer()) {
        if (x == 0.0) {
            if (nu.twice() < 0) throw Error(ErrorCode::DomainError, "J_{-1/2} is singular at 0");
            return 0.0;
        }
        if (nu.twice() == -1 || nu.twice() == 1) return j_half_integer(nu, x);
        if (nu.twice() < 0) {
            throw Error(ErrorCode::UnsupportedOrder, "unsupported Bessel order " + nu.str());
        }
        if (x < nu.value() + 1.0) {
            return static_cast<double>(reduced_series(nu, x, -1) *
                                       std::pow(static_cast<long double>(x), nu.value()));
        }
        return j_half_integer(nu, x);
    }
    if (nu.twice() < 0) return -bessel_j(reflect(nu), x);
    if (x == 0.0) return nu.twice() == 0 ? 1.0 : 0.0;
    if (x <= kJSeriesMax) {
        return static_cast<double>(reduced_series(nu, x, -1) *
                                   std::pow(static_cast<long double>(x), nu.value()));
    }
    if (x < kJMillerMax) return j_miller(nu.twice() / 2, x);
    return j_asymptotic(nu, x);
}

double bessel_i_scaled(BesselOrder nu, double x) {
    require_supported(nu);
    require_nonnegative(x, "bessel_i");
    if (nu.twice() == -1) {
        if (x == 0.0) throw Error(ErrorCode::DomainError, "I_{-1/2} is singular at 0");
        return std::sqrt(2.0 / (kPi * x)) * 0.5 * (1.0 + std::exp(-2.0 * x));
    }
    if (nu.twice() == -2) return i_scaled_nonnegative(reflect(nu), x);
    if (nu.twice() < 0) throw Error(ErrorCode::UnsupportedOrder, "unsupported Bessel order " + nu.str());
    return i_scaled_nonnegative(nu, x);
}

double bessel_i(BesselOrder nu, double x) {
    const double scaled = bessel_i_scaled(nu, x);
    if (x > kMaxExpArgument) {
        throw Error(ErrorCode::Overflow, "I_" + nu.str() + "(" + std::to_string(x) +
                                             ") exceeds double range; use bessel_i_scaled");
    }
    const double raw = scaled * std::exp(x);
    if (!std::isfinite(raw)) {
        throw Error(ErrorCode::Overflow, "I_" + nu.str() + " overflow");
    }
    return raw;
}

double bessel_k_scaled(BesselOrder nu, double x) {
    require_supported(nu);
    require_positive(x, "bessel_k");
    return k_scaled_nonnegative(reflect(nu), x);
}

double bessel_k(BesselOrder nu, double x) {
    return bessel_k_scaled(nu, x) * std::exp(-x);
}

double bessel_j_reduced(BesselOrder nu, double x) {
    require_supported(nu);
    require_nonnegative(x, "bessel_j_reduced");
    if (nu.twice() < 0) {
        throw Error(ErrorCode::UnsupportedOrder, "reduced J needs a nonnegative order");
    }
    if (nu.twice() == 0) return bessel_j(nu, x);
    if (x <= kJSeriesMax) return static_cast<double>(reduced_series(nu, x, -1));
    return bessel_j(nu, x) / std::pow(x, nu.value());
}

double bessel_i_reduced_scaled(BesselOrder nu, double x) {
    require_supported(nu);
    require_nonnegative(x, "bessel_i_reduced_scaled");
    if (nu.twice() < 0) {
        throw Error(ErrorCode::UnsupportedOrder, "reduced I needs a nonnegative order");
    }
    if (nu.twice() == 0) return bessel_i_scaled(nu, x);
    if (x <= kISeriesMax) {
        return static_cast<double>(reduced_series(nu, x, +1) * std::exp(-static_cast<long double>(x)));
    }
    return bessel_i_scaled(nu, x) / std::pow(x, nu.value());
}

double ratio_k(BesselOrder nu, double x) {
    require_positive(x, "ratio_k");
    return bessel_k_scaled(nu + 1, x) / bessel_k_scaled(nu, x);
}

double ratio_k_over_xk(BesselOrder nu, double x) {
    return ratio_k(nu, x) / x;
}

double ratio_k_inverse_over_x(BesselOrder nu, double x) {
    require_positive(x, "ratio_k_inverse_over_x");
    return bessel_k_scaled(nu, x) / (x * bessel_k_scaled(nu + 1, x));
}

double bessel_j_zero(BesselOrder nu, int s) {
    if (s < 1 || nu.twice() < 0) {
        throw Error(ErrorCode::DomainError, "bessel_j_zero needs s >= 1 and nu >= 0");
    }
    // McMahon's estimate lies within a fraction of the spacing pi.
    const double beta = (s + 0.5 * nu.value() - 0.25) * kPi;
    const double mu = 4.0 * nu.value() * nu.value();
    const double guess = beta - (mu - 1.0) / (8.0 * beta);
    auto f = [nu](double x) { return bessel_j(nu, x); };
    double lo = std::max(guess - 0.8, 1e-3);
    double hi = guess + 0.8;
    return numerics::refine_root(f, lo, hi, 1e-15);
}

double first_tan_fixed_point() {
    // sin x - x cos x changes sign once on (pi, 3pi/2).
    static const double root = numerics::refine_root(
        [](double x) { return std::sin(x) - x * std::cos(x); }, kPi + 1e-9, 1.5 * kPi - 1e-9, 1e-16);
    return root;
}

}  // namespace flockdyn
