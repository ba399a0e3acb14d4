#pragma once

// Bessel J, modified Bessel I and K for the small set of integer and
// half-integer orders that the Quasi-Morse formulas need in two and three
// dimensions. Exponentially scaled values (e^{-x} I, e^{x} K) are the
// internal currency; raw values are reconstructed at the API boundary.

#include <string>

namespace flockdyn {

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kPi = 3.14159265358979323846;

/// Order of a Bessel function, stored as twice its value so that integers
/// and half-integers are exact.
class BesselOrder {
public:
    constexpr BesselOrder() = default;

    static constexpr BesselOrder integer(int n) { return BesselOrder(2 * n); }
    static constexpr BesselOrder from_twice(int twice) { return BesselOrder(twice); }
    /// Throws UnsupportedOrder unless `v` is an integer or half-integer.
    static BesselOrder from_value(double v);
    /// Order n/2 + shift used throughout the dimension-generic formulas.
    static constexpr BesselOrder half_dim(int n, int shift) { return BesselOrder(n + 2 * shift); }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }
    constexpr bool is_supported() const { return twice_ >= -2 && twice_ <= 7; }

    constexpr BesselOrder operator+(int k) const { return BesselOrder(twice_ + 2 * k); }
    constexpr BesselOrder operator-(int k) const { return BesselOrder(twice_ - 2 * k); }
    constexpr bool operator==(const BesselOrder&) const = default;

    std::string str() const;

private:
    constexpr explicit BesselOrder(int twice) : twice_(twice) {}
    int twice_ = 0;
};

double bessel_j(BesselOrder nu, double x);

double bessel_i(BesselOrder nu, double x);
double bessel_i_scaled(BesselOrder nu, double x);

double bessel_k(BesselOrder nu, double x);
double bessel_k_scaled(BesselOrder nu, double x);

/// x^{-nu} J_nu(x); finite at x = 0 for nu >= 0.
double bessel_j_reduced(BesselOrder nu, double x);
/// e^{-x} x^{-nu} I_nu(x); finite at x = 0 for nu >= 0.
double bessel_i_reduced_scaled(BesselOrder nu, double x);

/// K_{nu+1}(x) / (x K_nu(x)).
double ratio_k_over_xk(BesselOrder nu, double x);
/// K_{nu+1}(x) / K_nu(x).
double ratio_k(BesselOrder nu, double x);
/// K_nu(x) / (x K_{nu+1}(x)).
double ratio_k_inverse_over_x(BesselOrder nu, double x);

/// s-th positive zero of J_nu (s >= 1), nu >= 0.
double bessel_j_zero(BesselOrder nu, int s);

/// First positive root of tan x = x.
double first_tan_fixed_point();

}  // namespace flockdyn
