#pragma once

// W * rho for radial densities on a ball, by the closed form in terms of the
// boundary coefficients and independently by quadrature of the radially
// reduced kernel; verification of W * rho = D on the support.

#include <functional>
#include <string>
#include <vector>

#include "flockdyn/error.hpp"
#include "flockdyn/numerics.hpp"
#include "flockdyn/solver.hpp"

namespace flockdyn {

/// Closed-form W * rho at 0 <= r <= density.R. The density may use any
/// frequency a on its branch; when a^2 = |A| the oscillatory remainder
/// vanishes and the constant is mu2 (C ell^n - 1) / k^2. Throws OutOfSupport
/// for r > R.
double convolution_closed(const ModelParams& params, const RadialDensity& density, double r);
double convolution_closed(const FlockProfile& profile, double r);

struct ConvolutionQuadratureOptions {
    numerics::QuadratureOptions quadrature{1e-15, 1e-12, 48};
};

/// W * rho at any r >= 0 by adaptive quadrature of
/// -T_1 + C ell^{n-2} T_ell with
/// T_xi(r) = int_0^R s^{n-1} rho(s) (rs)^{-nu} I_nu(k min/xi) K_nu(k max/xi) ds,
/// split at s = r.
double convolution_quadrature(const std::function<double(double)>& density, const ModelParams& params,
                              double R, double r, const ConvolutionQuadratureOptions& options = {});
double convolution_quadrature(const RadialDensity& density, const ModelParams& params, double r,
                              const ConvolutionQuadratureOptions& options = {});

/// The screened kernel (rs)^{-nu} I_nu(kappa min(r,s)) K_nu(kappa max(r,s)),
/// which is minus the angular average of the attractive part of U over the
/// sphere of radius s centred at distance r from the origin.
double radial_kernel(int n, double kappa, double r, double s);

struct ConvolutionReport {
    std::vector<double> r_grid;
    std::vector<double> closed_form;
    std::vector<double> quadrature;
    double D = 0.0;
    double scale = 0.0;  ///< max(|D|, max|rho| |C ell^n - 1| / k^2)
    double sup_dev_closed = 0.0;
    double sup_dev_quad = 0.0;
    double cross_dev = 0.0;
    bool passed = false;

    std::string to_json() const;
    /// Columns r, closed, quadrature, D.
    std::string to_csv() const;
};

inline constexpr double kVerifyClosedTol = 1e-9;
inline constexpr double kVerifyQuadTol = 1e-6;

class VerificationError : public Error {
public:
    explicit VerificationError(ConvolutionReport report);
    const ConvolutionReport& report() const noexcept { return report_; }

private:
    ConvolutionReport report_;
};

/// Evaluates both routes on a uniform grid of [0, R*] and compares against D.
/// The report is always filled; VerificationError is thrown when a deviation
/// exceeds its threshold and `throw_on_failure` is set.
ConvolutionReport verify_flock(const FlockProfile& profile, int grid_size, int threads = 1,
                               bool throw_on_failure = true);

}  // namespace flockdyn
