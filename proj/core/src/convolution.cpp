#include "flockdyn/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "flockdyn/io.hpp"
#include "flockdyn/parallel.hpp"
#include "flockdyn/specfun.hpp"

namespace flockdyn {

namespace {

// r^{-nu} I_nu(kappa r) K_{n/2}(kappa R) with the exponentials combined.
double growing_mode(int n, double kappa, double r, double R) {
    const BesselOrder nu = BesselOrder::half_dim(n, -1);
    const BesselOrder half = BesselOrder::half_dim(n, 0);
    return std::pow(kappa, nu.value()) * bessel_i_reduced_scaled(nu, kappa * r) *
           bessel_k_scaled(half, kappa * R) * std::exp(kappa * (r - R));
}

}  // namespace

double convolution_closed(const ModelParams& params, const RadialDensity& density, double r) {
    params.validate();
    if (density.n != params.n) throw Error(ErrorCode::InvalidConfig, "density and potential dimensions differ");
    if (r < 0.0) throw Error(ErrorCode::DomainError, "convolution needs r >= 0");
    if (r > density.R) {
        throw Error(ErrorCode::OutOfSupport, "closed form holds only for r <= R; use quadrature outside");
    }
    const int n = params.n;
    const double k = params.k;
    const double k2 = k * k;
    const double ell = params.ell;
    const double C = params.C;
    const double R = density.R;
    const double cln = params.c_ell_n();
    const double mu1 = density.mu1;
    const double mu2 = density.mu2;
    const double a = density.a;
    const double a2 = a * a;

    double constant = mu2 * (cln - 1.0) / k2;
    switch (density.branch) {
    case Sign::Positive: {
        const double eigen = density(r) - mu2;
        constant += (cln / (a2 * ell * ell + k2) - 1.0 / (a2 + k2)) * eigen;
        break;
    }
    case Sign::Negative: {
        const double eigen = density(r) - mu2;
        constant += (cln / (k2 - a2 * ell * ell) - 1.0 / (k2 - a2)) * eigen;
        break;
    }
    case Sign::Zero:
        constant += mu1 * (cln - 1.0) * r * r / k2 +
                    2.0 * n * mu1 * (C * std::pow(ell, n + 2) - 1.0) / (k2 * k2);
        break;
    }

    const double pref = std::pow(R, 0.5 * n) / k;
    const double b_one = b_tilde_raw(n, k, density.branch, a, 1.0, R) * mu1 + mu2;
    const double b_ell = b_tilde_raw(n, k, density.branch, a, ell, R) * mu1 + mu2;
    const double attraction = pref * b_one * growing_mode(n, k, r, R);
    const double repulsion = pref * C * std::pow(ell, n - 1) * b_ell * growing_mode(n, k / ell, r, R);
    return constant + attraction - repulsion;
}

double convolution_closed(const FlockProfile& profile, double r) {
    return convolution_closed(profile.params, profile.density(), r);
}

double radial_kernel(int n, double kappa, double r, double s) {
    const BesselOrder nu = BesselOrder::half_dim(n, -1);
    const double lo = std::min(r, s);
    const double hi = std::max(r, s);
    const double inner = bessel_i_reduced_scaled(nu, kappa * lo);
    const double outer = bessel_k_scaled(nu, kappa * hi) * std::pow(kappa * hi, -nu.value());
    return std::pow(kappa, 2.0 * nu.value()) * inner * outer * std::exp(kappa * (lo - hi));
}

double convolution_quadrature(const std::function<double(double)>& density, const ModelParams& params,
                              double R, double r, const ConvolutionQuadratureOptions& options) {
    params.validate();
    if (r < 0.0) throw Error(ErrorCode::DomainError, "convolution needs r >= 0");
    if (!(R > 0.0)) throw Error(ErrorCode::DomainError, "support radius must be positive");
    const int n = params.n;
    const double k = params.k;
    const double ell = params.ell;
    const double weight = params.C * std::pow(ell, n - 2);
    auto integrand = [&](double s) {
        const double rho = density(s);
        if (rho == 0.0) return 0.0;
        const double kernel = weight * radial_kernel(n, k / ell, r, s) - radial_kernel(n, k, r, s);
        return std::pow(s, n - 1) * rho * kernel;
    };
    const double split = std::min(r, R);
    double total = 0.0;
    if (split > 0.0) total += numerics::integrate(integrand, 0.0, split, options.quadrature);
    if (R > split) total += numerics::integrate(integrand, split, R, options.quadrature);
    return total;
}

double convolution_quadrature(const RadialDensity& density, const ModelParams& params, double r,
                              const ConvolutionQuadratureOptions& options) {
    if (density.n != params.n) throw Error(ErrorCode::InvalidConfig, "density and potential dimensions differ");
    return convolution_quadrature([&density](double s) { return density(s); }, params, density.R, r, options);
}

std::string ConvolutionReport::to_json() const {
    nlohmann::ordered_json j;
    j["D"] = D;
    j["scale"] = scale;
    j["sup_dev_closed"] = sup_dev_closed;
    j["sup_dev_quad"] = sup_dev_quad;
    j["cross_dev"] = cross_dev;
    j["passed"] = passed;
    j["r_grid"] = r_grid;
    j["closed_form"] = closed_form;
    j["quadrature"] = quadrature;
    return j.dump(2);
}

std::string ConvolutionReport::to_csv() const {
    std::string out = "r,closed,quadrature,D\n";
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        out += io::csv_row({r_grid[i], closed_form[i], quadrature[i], D});
    }
    return out;
}

VerificationError::VerificationError(ConvolutionReport report)
    : Error(ErrorCode::VerificationFailure,
            "flock condition violated: closed dev " + io::format_double(report.sup_dev_closed) +
                ", quadrature dev " + io::format_double(report.sup_dev_quad) + ", scale " +
                io::format_double(report.scale)),
      report_(std::move(report)) {}

ConvolutionReport verify_flock(const FlockProfile& profile, int grid_size, int threads, bool throw_on_failure) {
    if (grid_size < 2) throw Error(ErrorCode::InvalidConfig, "verification grid needs at least two points");
    const RadialDensity rho = profile.density();
    ConvolutionReport report;
    report.D = profile.D;
    report.r_grid.resize(grid_size);
    report.closed_form.resize(grid_size);
    report.quadrature.resize(grid_size);
    for (int i = 0; i < grid_size; ++i) {
        report.r_grid[i] = profile.R_star * i / (grid_size - 1);
    }
    report.r_grid.back() = profile.R_star;
    parallel_for(static_cast<std::size_t>(grid_size), threads, [&](std::size_t i) {
        report.closed_form[i] = convolution_closed(profile.params, rho, report.r_grid[i]);
        report.quadrature[i] = convolution_quadrature(rho, profile.params, report.r_grid[i]);
    });
    double rho_peak = 0.0;
    for (double r : report.r_grid) rho_peak = std::max(rho_peak, std::abs(rho(r)));
    const double k2 = profile.params.k * profile.params.k;
    report.scale = std::max(std::abs(report.D), rho_peak * std::abs(profile.params.c_ell_n() - 1.0) / k2);
    for (int i = 0; i < grid_size; ++i) {
        report.sup_dev_closed = std::max(report.sup_dev_closed, std::abs(report.closed_form[i] - report.D));
        report.sup_dev_quad = std::max(report.sup_dev_quad, std::abs(report.quadrature[i] - report.D));
        report.cross_dev = std::max(report.cross_dev, std::abs(report.closed_form[i] - report.quadrature[i]));
    }
    report.passed = report.sup_dev_closed <= kVerifyClosedTol * report.scale &&
                    report.sup_dev_quad <= kVerifyQuadTol * report.scale &&
                    report.cross_dev <= kVerifyQuadTol * report.scale;
    if (!report.passed && throw_on_failure) throw VerificationError(report);
    return report;
}

}  // namespace flockdyn
