#pragma once

// Quasi-Morse, Morse and Morse-like pair potentials U(r), their radial
// derivatives, the aggregate parameter A and the (C, ell) phase diagram.

#include <string>
#include <string_view>
#include <variant>

namespace flockdyn {

/// Quasi-Morse parameters with attraction strength and length set to one.
struct ModelParams {
    int n = 3;         ///< dimension, 2 or 3
    double C = 1.0;    ///< repulsion strength
    double ell = 1.0;  ///< repulsion length scale
    double k = 1.0;    ///< decay rate of the screened kernel

    /// Throws InvalidConfig unless n is 2 or 3 and C, ell, k are positive.
    void validate() const;
    /// C ell^n, the quantity whose distance from one decides H-stability.
    double c_ell_n() const;
};

inline constexpr double kAggregateZeroTolerance = 1e-10;
inline constexpr double kDenominatorTolerance = 1e-12;

enum class Sign { Negative = -1, Zero = 0, Positive = 1 };

enum class Region { RegionI, RegionII, Separatrix, Outside };

struct RegimeClass {
    bool biologically_relevant = false;
    bool h_stable = false;
    Region region = Region::Outside;
    Sign A_sign = Sign::Zero;
};

const char* to_string(Region region);
const char* to_string(Sign sign);

struct QuasiMorse {
    ModelParams params;
};

/// C_R e^{-r/ell_R} - C_A e^{-r/ell_A}.
struct Morse {
    double C_R = 1.0;
    double C_A = 1.0;
    double ell_R = 1.0;
    double ell_A = 1.0;
};

/// V(r) - C V(r/ell) with V(r) = -exp(-r^p / p).
struct MorseLike {
    double p = 1.0;
    double C = 1.0;
    double ell = 1.0;
};

using PotentialSpec = std::variant<QuasiMorse, Morse, MorseLike>;

void validate(const PotentialSpec& spec);

/// U(r) for the Quasi-Morse potential; DomainError for r <= 0.
double quasi_morse_u(const ModelParams& params, double r);
/// U'(r) for the Quasi-Morse potential.
double quasi_morse_du(const ModelParams& params, double r);

double potential_value(const PotentialSpec& spec, double r);
/// U'(r), so that grad W(x) = U'(|x|) x / |x|.
double potential_force_magnitude(const PotentialSpec& spec, double r);

/// Radius of the first sign change of U' from negative to positive, i.e. the
/// first local minimum of U. Throws NoRoot when none is found in [1e-4, 1e3].
double potential_minimum_radius(const PotentialSpec& spec);

struct Aggregate {
    double A = 0.0;
    double a = 0.0;  ///< sqrt(|A|)
};

/// A = k^2 (1 - C ell^n) / (C ell^n - ell^2). A is snapped to exactly zero
/// when |C ell^n - 1| <= kAggregateZeroTolerance, so sign(A) always agrees
/// with classify(). Throws DegenerateDenominator when
/// |C ell^n - ell^2| < kDenominatorTolerance * k^2.
Aggregate aggregate_param(const ModelParams& params);

RegimeClass classify(const ModelParams& params);
/// Morse-like family: relevance is ell < 1 and C > ell^p; only the
/// inequalities are reported, no minimum-existence proof is attempted.
RegimeClass classify(const MorseLike& spec, int n);

std::string potential_to_json(const PotentialSpec& spec);
PotentialSpec potential_from_json(std::string_view text);

}  // namespace flockdyn
