#pragma once

// Flock profiles of the Quasi-Morse potential: boundary coefficients B~(xi),
// det M = B~(ell) - B~(1), support radius brackets, the (mu1, mu2) null
// vector with unit-mass normalisation, and leading-order radius asymptotics.

#include <string>
#include <string_view>
#include <vector>

#include "flockdyn/potentials.hpp"

namespace flockdyn {

inline constexpr double kTolRoot = 1e-12;
inline constexpr double kTolNull = 1e-9;
inline constexpr double kTolPos = 1e-10;

/// Radial density mu1 r^{-nu} Z_nu(a r) + mu2 on B(0, R), nu = n/2 - 1, where
/// Z is J for a positive branch and I for a negative one; the zero branch is
/// mu1 r^2 + mu2.
struct RadialDensity {
    int n = 3;
    Sign branch = Sign::Positive;
    double a = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double R = 1.0;

    /// Value at r >= 0; zero outside the support.
    double operator()(double r) const;
    /// d rho / dr inside the support.
    double derivative(double r) const;
    /// Integral of rho over the ball B(0, R) in R^n.
    double mass() const;
};

struct RootBracket {
    double lo = 0.0;
    double hi = 0.0;
    int index = 1;
};

struct RootResult {
    double R_star = 0.0;
    RootBracket bracket;
    /// Set when more than one sign change was seen in the first bracket (2D).
    bool ambiguous = false;
};

struct SolveFlags {
    bool ambiguous_first_root = false;
    bool non_biological = false;
};

struct FlockProfile {
    ModelParams params;
    double A = 0.0;
    double a = 0.0;
    double R_star = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double D = 0.0;
    int root_index = 1;
    SolveFlags flags;

    RadialDensity density() const;
};

struct LambdaCoefficients {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    double lambda4 = 0.0;
};

struct SolveOptions {
    int root_index = 1;
    /// Permit ell > 1, C ell^{n-2} > 1, C ell^n < 1 where existence is not established.
    bool allow_non_biological = false;
    /// Samples per bracket when roots are located by scanning.
    int scan_points = 512;
};

/// B~(xi) for an explicit branch and frequency a, without consistency checks.
/// The negative branch is returned multiplied by e^{-aR} when `scaled` is set.
double b_tilde_raw(int n, double k, Sign branch, double a, double xi, double R, bool scaled = false);

/// Dimension-generic B~ written with K_{n/2-2}, J_{n/2-2} and I_{n/2-2};
/// for n = 2 these are resolved through K_{-1} = K_1, J_{-1} = -J_1 and
/// I_{-1} = I_1. Kept as an independent cross-check of b_tilde_raw.
double b_tilde_general(int n, double k, Sign branch, double a, double xi, double R);

/// B~(xi) at radius R. Throws CaseMismatch if `branch` disagrees with the
/// sign of A, DomainError if R <= 0.
double b_tilde(const ModelParams& params, Sign branch, double xi, double R);

/// B~(ell) - B~(1) in the branch selected by the sign of A.
double det_m(const ModelParams& params, double R);
/// det M scaled by e^{-aR} when A < 0 (identical to det_m otherwise); keeps
/// the sign computable for large aR.
double det_m_scaled(const ModelParams& params, double R);

/// Three-dimensional auxiliary function g(R) with det M / cos(aR)
/// proportional to tan(aR) + g(R). Throws CaseMismatch unless n = 3, A > 0.
double aux_g(const ModelParams& params, double R);

/// First positive root of det M (or the root with the requested index).
/// Throws NoRoot when A <= 0, RegimeViolation outside the biologically
/// relevant region unless allowed, BracketFailure when the sign pattern
/// required by the bracket is absent.
RootResult find_support_radius(const ModelParams& params, const SolveOptions& options = {});

/// The first `count` positive roots of det M in increasing order.
std::vector<RootResult> enumerate_roots(const ModelParams& params, int count,
                                        const SolveOptions& options = {});

/// Solves the homogeneous system at the selected root, fixes mu1 > 0 and
/// scales to unit mass. Throws PositivityFailure if a first-root density is
/// negative somewhere on its support.
FlockProfile solve_profile(const ModelParams& params, const SolveOptions& options = {});

/// Builds a profile at an arbitrary radius R from the second row of the
/// homogeneous system; no root condition is imposed.
FlockProfile profile_at_radius(const ModelParams& params, double R, int root_index = 1);

double density_eval(const FlockProfile& profile, double r);
double mass(const FlockProfile& profile);

LambdaCoefficients lambda_coeffs(const ModelParams& params, double R, double mu1, double mu2);

/// sigma_min / sigma_max of the 2x2 homogeneous matrix at radius R.
double homogeneous_singular_ratio(const ModelParams& params, double R);

enum class AsymptoticLimit { UpperEll, LowerEll };

struct AsymptoticEstimate {
    double R_star = 0.0;
    /// Parameters are not close to the requested limit; the value is still
    /// the formula's.
    bool limit_mismatch = false;
};

/// Leading-order support radius. n = 3: UpperEll is ell -> C^{-1/3},
/// LowerEll is ell -> C^{-1}. n = 2: UpperEll is ell -> C^{-1/2} (first zero
/// of J_1(a r) over a), LowerEll is ell -> 0 (ell R_0).
AsymptoticEstimate asymptotic_radius(const ModelParams& params, AsymptoticLimit limit);

/// Relative distance to the limit below which parameters count as near it.
inline constexpr double kLimitWindow = 0.05;

const char* to_string(AsymptoticLimit limit);

std::string profile_to_json(const FlockProfile& profile);
FlockProfile profile_from_json(std::string_view text);

}  // namespace flockdyn
