#include "flockdyn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "flockdyn/error.hpp"
#include "flockdyn/geometry.hpp"
#include "flockdyn/numerics.hpp"
#include "flockdyn/specfun.hpp"

namespace flockdyn {

namespace {

Sign sign_of(double A) {
    if (A > 0.0) return Sign::Positive;
    if (A < 0.0) return Sign::Negative;
    return Sign::Zero;
}

void require_dimension(int n) {
    if (n != 2 && n != 3) throw Error(ErrorCode::InvalidConfig, "dimension must be 2 or 3");
}

// Order n/2 - 1 of the radial Bessel factors.
BesselOrder radial_order(int n) { return BesselOrder::half_dim(n, -1); }

// K_nu(x) / K_{nu+1}(x) for nu = 0.
double k0_over_k1(double x) { return 1.0 / ratio_k(BesselOrder::integer(0), x); }

double amplitude_factor(Sign branch, double a, double xi, double k) {
    const double t = a * xi / k;
    const double denominator = branch == Sign::Positive ? 1.0 + t * t : 1.0 - t * t;
    if (std::abs(denominator) < 1e-14) {
        throw Error(ErrorCode::DomainError, "B~ is singular: a xi equals k on the negative branch");
    }
    return 1.0 / denominator;
}

struct Branch {
    Aggregate agg;
    Sign sign;
};

Branch branch_of(const ModelParams& params) {
    const Aggregate agg = aggregate_param(params);
    return {agg, sign_of(agg.A)};
}

// det M = k sqrt(2/(a pi)) c_s(R) F(R) in three dimensions with A > 0.
double three_d_oscillator(const ModelParams& params, double R) {
    const double a = aggregate_param(params).a;
    return std::sin(a * R) + aux_g(params, R) * std::cos(a * R);
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);
    grid.back() = hi;
    return grid;
}

// Boundary of the j-th scanning cell: zeros of cos(aR) in 3D, of J_1(aR) in
// 2D; cell 0 starts just above the origin.
double cell_edge(int n, double a, int j) {
    if (j == 0) return 1e-8 / a;
    if (n == 3) return (j - 0.5) * kPi / a;
    return bessel_j_zero(BesselOrder::integer(1), j) / a;
}

std::vector<RootResult> scan_roots(const ModelParams& params, int count, int scan_points) {
    const Aggregate agg = aggregate_param(params);
    const double a = agg.a;
    auto f = [&params](double R) { return det_m(params, R); };
    std::vector<RootResult> roots;
    const int max_cells = count + 64;
    if (params.n == 2 && !(f(cell_edge(2, a, 0)) > 0.0)) {
        throw Error(ErrorCode::BracketFailure, "det M is not positive near R = 0");
    }
    for (int cell = 0; cell < max_cells && static_cast<int>(roots.size()) < count; ++cell) {
        const double lo = cell_edge(params.n, a, cell);
        const double hi = cell_edge(params.n, a, cell + 1);
        const auto changes = numerics::scan_sign_changes(f, uniform_grid(lo, hi, scan_points));
        for (const auto& [left, right] : changes) {
            if (static_cast<int>(roots.size()) == count) break;
            RootResult res;
            res.R_star = numerics::refine_root(f, left, right, 1e-13);
            res.bracket = {lo, hi, static_cast<int>(roots.size()) + 1};
            res.ambiguous = cell == 0 && changes.size() > 1;
            roots.push_back(res);
        }
        if (cell == 0 && params.n == 2 && changes.empty()) {
            throw Error(ErrorCode::BracketFailure,
                        "det M has no sign change before the first zero of J_1(aR)");
        }
    }
    if (static_cast<int>(roots.size()) < count) {
        throw Error(ErrorCode::NoRoot, "found only " + std::to_string(roots.size()) + " roots of det M");
    }
    return roots;
}

std::vector<RootResult> three_d_roots(const ModelParams& params, int count) {
    const double a = aggregate_param(params).a;
    auto F = [&params](double R) { return three_d_oscillator(params, R); };
    std::vector<RootResult> roots;
    for (int j = 1; j <= count; ++j) {
        const double lo = (j - 0.5) * kPi / a;
        const double hi = (j + 0.5) * kPi / a;
        RootResult res;
        res.R_star = numerics::refine_root(F, lo, hi, 1e-13);
        res.bracket = {lo, hi, j};
        roots.push_back(res);
    }
    return roots;
}

void require_existence(const ModelParams& params, const SolveOptions& options) {
    params.validate();
    const RegimeClass rc = classify(params);
    const Branch br = branch_of(params);
    if (br.sign != Sign::Positive) {
        throw Error(ErrorCode::NoRoot,
                    "no flock profiles exist for A <= 0 (A = " + std::to_string(br.agg.A) +
                        ", C ell^n = " + std::to_string(params.c_ell_n()) + " >= 1)");
    }
    if (!rc.biologically_relevant && !options.allow_non_biological) {
        throw Error(ErrorCode::RegimeViolation,
                    "parameters outside the biologically relevant regime C ell^(n-2) > 1, ell < 1");
    }
    if (options.root_index < 1) throw Error(ErrorCode::InvalidConfig, "root index must be >= 1");
}

}  // namespace

double RadialDensity::operator()(double r) const {
    if (r > R) return 0.0;
    r = std::abs(r);
    const BesselOrder nu = radial_order(n);
    switch (branch) {
    case Sign::Positive:
        return mu1 * std::pow(a, nu.value()) * bessel_j_reduced(nu, a * r) + mu2;
    case Sign::Negative:
        return mu1 * std::pow(a, nu.value()) * bessel_i_reduced_scaled(nu, a * r) * std::exp(a * r) + mu2;
    case Sign::Zero:
        return mu1 * r * r + mu2;
    }
    return 0.0;
}

double RadialDensity::derivative(double r) const {
    const BesselOrder next = radial_order(n) + 1;
    const double scale = mu1 * std::pow(a, next.value() + 1.0) * r;
    switch (branch) {
    case Sign::Positive:
        return -scale * bessel_j_reduced(next, a * r);
    case Sign::Negative:
        return scale * bessel_i_reduced_scaled(next, a * r) * std::exp(a * r);
    case Sign::Zero:
        return 2.0 * mu1 * r;
    }
    return 0.0;
}

double RadialDensity::mass() const {
    const BesselOrder next = radial_order(n) + 1;
    const double Rn = std::pow(R, n);
    double first = 0.0;
    switch (branch) {
    case Sign::Positive:
        first = Rn * std::pow(a, next.value() - 1.0) * bessel_j_reduced(next, a * R);
        break;
    case Sign::Negative:
        first = Rn * std::pow(a, next.value() - 1.0) * bessel_i_reduced_scaled(next, a * R) * std::exp(a * R);
        break;
    case Sign::Zero:
        first = Rn * R * R / (n + 2);
        break;
    }
    return unit_sphere_area(n) * (mu1 * first + mu2 * Rn / n);
}

RadialDensity FlockProfile::density() const {
    RadialDensity d;
    d.n = params.n;
    d.branch = sign_of(A);
    d.a = a;
    d.mu1 = mu1;
    d.mu2 = mu2;
    d.R = R_star;
    return d;
}

double b_tilde_raw(int n, double k, Sign branch, double a, double xi, double R, bool scaled) {
    require_dimension(n);
    if (!(R > 0.0)) throw Error(ErrorCode::DomainError, "B~ needs R > 0");
    if (!(xi > 0.0) || !(k > 0.0)) throw Error(ErrorCode::DomainError, "B~ needs xi > 0 and k > 0");
    const double x = k * R / xi;
    if (branch == Sign::Zero) {
        return R * R + (2.0 * xi / k) * R * ratio_k(BesselOrder::half_dim(n, 0), x);
    }
    if (!(a > 0.0)) throw Error(ErrorCode::DomainError, "B~ needs a > 0 off the zero branch");
    const double amp = amplitude_factor(branch, a, xi, k);
    const double t = a * xi / k;
    const double aR = a * R;
    if (n == 3) {
        double s, c;
        if (branch == Sign::Positive) {
            s = std::sin(aR);
            c = std::cos(aR);
        } else if (scaled) {
            const double e = std::exp(-2.0 * aR);
            s = 0.5 * (1.0 - e);
            c = 0.5 * (1.0 + e);
        } else {
            s = std::sinh(aR);
            c = std::cosh(aR);
        }
        return std::sqrt(2.0 / (a * kPi)) * amp * (s + t * c) * k / (k * R + xi);
    }
    const BesselOrder zero = BesselOrder::integer(0);
    const BesselOrder one = BesselOrder::integer(1);
    if (branch == Sign::Positive) {
        return amp * (bessel_j(zero, aR) - t * bessel_j(one, aR) * k0_over_k1(x));
    }
    if (scaled) {
        return amp * (bessel_i_scaled(zero, aR) + t * bessel_i_scaled(one, aR) * k0_over_k1(x));
    }
    return amp * (bessel_i(zero, aR) + t * bessel_i(one, aR) * k0_over_k1(x));
}

double b_tilde_general(int n, double k, Sign branch, double a, double xi, double R) {
    require_dimension(n);
    if (!(R > 0.0)) throw Error(ErrorCode::DomainError, "B~ needs R > 0");
    const double x = k * R / xi;
    const BesselOrder nu = radial_order(n);
    if (branch == Sign::Zero) {
        return R * R + (2.0 * xi / k) * R * bessel_k_scaled(nu + 2, x) / bessel_k_scaled(nu + 1, x);
    }
    const double amp = amplitude_factor(branch, a, xi, k);
    const double k_upper = bessel_k_scaled(nu + 1, x);
    const double ratio_lower = bessel_k_scaled(nu - 1, x) / k_upper;
    const double ratio_mid = bessel_k_scaled(nu, x) / k_upper;
    const double aR = a * R;
    const double z_nu = branch == Sign::Positive ? bessel_j(nu, aR) : bessel_i(nu, aR);
    const double z_lower = branch == Sign::Positive ? bessel_j(nu - 1, aR) : bessel_i(nu - 1, aR);
    return std::pow(R, -nu.value()) * amp * (z_nu * ratio_lower + (a * xi / k) * z_lower * ratio_mid);
}

double b_tilde(const ModelParams& params, Sign branch, double xi, double R) {
    params.validate();
    const Branch br = branch_of(params);
    if (br.sign != branch) {
        throw Error(ErrorCode::CaseMismatch, std::string("requested ") + to_string(branch) +
                                                 " branch but A is " + to_string(br.sign));
    }
    return b_tilde_raw(params.n, params.k, branch, br.agg.a, xi, R);
}

double det_m(const ModelParams& params, double R) {
    params.validate();
    const Branch br = branch_of(params);
    return b_tilde_raw(params.n, params.k, br.sign, br.agg.a, params.ell, R) -
           b_tilde_raw(params.n, params.k, br.sign, br.agg.a, 1.0, R);
}

double det_m_scaled(const ModelParams& params, double R) {
    params.validate();
    const Branch br = branch_of(params);
    if (br.sign != Sign::Negative) return det_m(params, R);
    return b_tilde_raw(params.n, params.k, br.sign, br.agg.a, params.ell, R, true) -
           b_tilde_raw(params.n, params.k, br.sign, br.agg.a, 1.0, R, true);
}

double aux_g(const ModelParams& params, double R) {
    params.validate();
    const Branch br = branch_of(params);
    if (params.n != 3 || br.sign != Sign::Positive) {
        throw Error(ErrorCode::CaseMismatch, "g(R) is defined for n = 3 and A > 0 only");
    }
    const double a = br.agg.a;
    const double a2 = a * a;
    const double k = params.k;
    const double ell = params.ell;
    const double numerator = (a2 * ell - k * k) * k * R + a2 * ell * (ell + 1.0);
    const double denominator = a2 * (ell + 1.0) * k * R + k * k + a2 * (ell * ell + ell + 1.0);
    return (a / k) * numerator / denominator;
}

RootResult find_support_radius(const ModelParams& params, const SolveOptions& options) {
    return enumerate_roots(params, options.root_index, options).back();
}

std::vector<RootResult> enumerate_roots(const ModelParams& params, int count, const SolveOptions& options) {
    SolveOptions opts = options;
    opts.root_index = std::max(1, count);
    require_existence(params, opts);
    const bool relevant = classify(params).biologically_relevant;
    if (params.n == 3 && relevant) return three_d_roots(params, count);
    return scan_roots(params, count, std::max(16, options.scan_points));
}

FlockProfile profile_at_radius(const ModelParams& params, double R, int root_index) {
    params.validate();
    const Branch br = branch_of(params);
    FlockProfile p;
    p.params = params;
    p.A = br.agg.A;
    p.a = br.agg.a;
    p.R_star = R;
    p.root_index = root_index;
    p.mu1 = 1.0;
    p.mu2 = -b_tilde_raw(params.n, params.k, br.sign, br.agg.a, 1.0, R);
    const double m = p.density().mass();
    if (!(std::abs(m) > 0.0) || !std::isfinite(m)) {
        throw Error(ErrorCode::NumericalBlowup, "profile mass is zero or not finite");
    }
    p.mu1 /= m;
    p.mu2 /= m;
    if (br.sign == Sign::Zero) {
        p.D = 2.0 * params.n * p.mu1 * (params.C * std::pow(params.ell, params.n + 2) - 1.0) /
              std::pow(params.k, 4);
    } else {
        p.D = p.mu2 * (params.c_ell_n() - 1.0) / (params.k * params.k);
    }
    return p;
}

FlockProfile solve_profile(const ModelParams& params, const SolveOptions& options) {
    require_existence(params, options);
    const std::vector<RootResult> roots = enumerate_roots(params, options.root_index, options);
    const RootResult& root = roots.back();
    FlockProfile p = profile_at_radius(params, root.R_star, options.root_index);
    p.flags.ambiguous_first_root = roots.front().ambiguous;
    p.flags.non_biological = !classify(params).biologically_relevant;
    if (options.root_index == 1) {
        const RadialDensity rho = p.density();
        double peak = 0.0;
        double lowest = std::numeric_limits<double>::infinity();
        const int samples = 1000;
        for (int i = 0; i <= samples; ++i) {
            const double v = rho(p.R_star * i / samples);
            peak = std::max(peak, std::abs(v));
            lowest = std::min(lowest, v);
        }
        if (lowest < -kTolPos * peak) {
            throw Error(ErrorCode::PositivityFailure,
                        "first-root density is negative on its support (min " + std::to_string(lowest) + ")");
        }
    }
    return p;
}

double density_eval(const FlockProfile& profile, double r) {
    return profile.density()(r);
}

double mass(const FlockProfile& profile) { return profile.density().mass(); }

LambdaCoefficients lambda_coeffs(const ModelParams& params, double R, double mu1, double mu2) {
    params.validate();
    if (!(R > 0.0)) throw Error(ErrorCode::DomainError, "lambda coefficients need R > 0");
    const Branch br = branch_of(params);
    const int n = params.n;
    const double k = params.k;
    const double ell = params.ell;
    const double pref = std::pow(R, 0.5 * n) / k;
    const BesselOrder half = BesselOrder::half_dim(n, 0);
    const double b_ell = b_tilde_raw(n, k, br.sign, br.agg.a, ell, R) * mu1 + mu2;
    const double b_one = b_tilde_raw(n, k, br.sign, br.agg.a, 1.0, R) * mu1 + mu2;
    LambdaCoefficients out;
    out.lambda1 = -params.C * pref * std::pow(ell, n - 1) * b_ell * bessel_k(half, k * R / ell);
    out.lambda2 = pref * b_one * bessel_k(half, k * R);
    return out;
}

double homogeneous_singular_ratio(const ModelParams& params, double R) {
    const Branch br = branch_of(params);
    const double b_ell = b_tilde_raw(params.n, params.k, br.sign, br.agg.a, params.ell, R);
    const double b_one = b_tilde_raw(params.n, params.k, br.sign, br.agg.a, 1.0, R);
    const double frob2 = b_ell * b_ell + b_one * b_one + 2.0;
    const double det = b_ell - b_one;
    const double disc = std::sqrt(std::max(0.0, frob2 * frob2 - 4.0 * det * det));
    const double s_max = std::sqrt(0.5 * (frob2 + disc));
    return std::abs(det) / (s_max * s_max);
}

AsymptoticEstimate asymptotic_radius(const ModelParams& params, AsymptoticLimit limit) {
    params.validate();
    const double C = params.C;
    const double ell = params.ell;
    const double k = params.k;
    AsymptoticEstimate out;
    if (params.n == 3) {
        if (!(C > 1.0)) throw Error(ErrorCode::DomainError, "three-dimensional asymptotics need C > 1");
        if (limit == AsymptoticLimit::UpperEll) {
            const double gap = 1.0 - C * ell * ell * ell;
            if (!(gap > 0.0)) throw Error(ErrorCode::DomainError, "upper-limit formula needs C ell^3 < 1");
            out.R_star = first_tan_fixed_point() * std::sqrt(1.0 - std::pow(C, -2.0 / 3.0)) / k / std::sqrt(gap);
            out.limit_mismatch = gap > kLimitWindow;
        } else {
            const double gap = C * ell - 1.0;
            if (!(gap > 0.0)) throw Error(ErrorCode::DomainError, "lower-limit formula needs C ell > 1");
            out.R_star = kPi / (2.0 * k * std::sqrt(C * C - 1.0)) * std::sqrt(gap);
            out.limit_mismatch = gap > kLimitWindow;
        }
        return out;
    }
    if (limit == AsymptoticLimit::UpperEll) {
        const Aggregate agg = aggregate_param(params);
        if (!(agg.A > 0.0)) throw Error(ErrorCode::DomainError, "upper-limit value needs A > 0");
        out.R_star = bessel_j_zero(BesselOrder::integer(1), 1) / agg.a;
        out.limit_mismatch = std::abs(1.0 - params.c_ell_n()) > kLimitWindow;
        return out;
    }
    if (!(C > 1.0)) throw Error(ErrorCode::DomainError, "two-dimensional lower limit needs C > 1");
    const double s = std::sqrt(C - 1.0);
    auto eq = [s](double x) {
        return bessel_j(BesselOrder::integer(0), x) -
               bessel_j(BesselOrder::integer(1), x) * k0_over_k1(x * s) / s;
    };
    const double x = numerics::refine_root(eq, 1e-12, bessel_j_zero(BesselOrder::integer(0), 1), 1e-15);
    const double R0 = x * s / k;
    out.R_star = ell * R0;
    out.limit_mismatch = ell > kLimitWindow;
    return out;
}

const char* to_string(AsymptoticLimit limit) {
    return limit == AsymptoticLimit::UpperEll ? "upper" : "lower";
}

std::string profile_to_json(const FlockProfile& p) {
    nlohmann::ordered_json j;
    j["n"] = p.params.n;
    j["C"] = p.params.C;
    j["ell"] = p.params.ell;
    j["k"] = p.params.k;
    j["A"] = p.A;
    j["a"] = p.a;
    j["R_star"] = p.R_star;
    j["mu1"] = p.mu1;
    j["mu2"] = p.mu2;
    j["D"] = p.D;
    j["root_index"] = p.root_index;
    return j.dump(2);
}

FlockProfile profile_from_json(std::string_view text) {
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        FlockProfile p;
        p.params.n = j.at("n").get<int>();
        p.params.C = j.at("C").get<double>();
        p.params.ell = j.at("ell").get<double>();
        p.params.k = j.at("k").get<double>();
        p.params.validate();
        p.A = j.at("A").get<double>();
        p.a = j.at("a").get<double>();
        p.R_star = j.at("R_star").get<double>();
        p.mu1 = j.at("mu1").get<double>();
        p.mu2 = j.at("mu2").get<double>();
        p.D = j.at("D").get<double>();
        p.root_index = j.value("root_index", 1);
        if (!(p.R_star > 0.0)) throw Error(ErrorCode::InvalidConfig, "R_star must be positive");
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("bad profile JSON: ") + e.what());
    }
}

}  // namespace flockdyn
