#pragma once

// Scalar root bracketing and adaptive quadrature shared by the solver and
// the convolution checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "flockdyn/error.hpp"

namespace flockdyn::numerics {

inline bool opposite_signs(double a, double b) { return (a < 0.0) != (b < 0.0); }

/// Bisection on [lo, hi] until the bracket is narrower than
/// `rel_width * (hi - lo)`, followed by one secant step that is kept only if
/// it stays inside the final bracket and does not increase |f|.
template <class F>
double refine_root(F&& f, double lo, double hi, double rel_width = 1e-13) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!opposite_signs(flo, fhi)) {
        throw Error(ErrorCode::BracketFailure,
                    "no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    const double width = rel_width * (hi - lo);
    for (int it = 0; it < 400 && hi - lo > width; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (opposite_signs(flo, fm)) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    double best = std::abs(flo) < std::abs(fhi) ? lo : hi;
    double fbest = std::min(std::abs(flo), std::abs(fhi));
    if (fhi != flo) {
        const double secant = hi - fhi * (hi - lo) / (fhi - flo);
        if (secant > lo && secant < hi) {
            const double fs = f(secant);
            if (std::abs(fs) <= fbest) best = secant;
        }
    }
    return best;
}

/// Sign changes of f sampled on `grid` (adjacent pairs), in increasing order.
template <class F>
std::vector<std::pair<double, double>> scan_sign_changes(F&& f, const std::vector<double>& grid) {
    std::vector<std::pair<double, double>> out;
    if (grid.size() < 2) return out;
    double prev = f(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = f(grid[i]);
        if (opposite_signs(prev, cur)) out.emplace_back(grid[i - 1], grid[i]);
        prev = cur;
    }
    return out;
}

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK values).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEstimate {
    double value;
    double error;
};

template <class F>
PanelEstimate gauss_kronrod_15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = kKronrodWeights[7] * fc;
    double gauss = kGaussWeights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[i] * sum;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * sum;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

struct QuadratureOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-12;
    int max_depth = 48;
};

/// Adaptive Gauss-Kronrod quadrature by interval bisection. Panels are
/// accepted in a fixed depth-first order so the result is deterministic.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
    if (!(b > a)) return 0.0;
    struct Panel {
        double lo, hi;
        int depth;
    };
    const double total = b - a;
    std::vector<Panel> stack{{a, b, 0}};
    double sum = 0.0;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const PanelEstimate est = gauss_kronrod_15(f, p.lo, p.hi);
        const double share = (p.hi - p.lo) / total;
        const double tol = std::max(opts.abs_tol * share, opts.rel_tol * std::abs(est.value));
        if (est.error <= tol || !std::isfinite(est.error)) {
            if (!std::isfinite(est.value)) {
                throw Error(ErrorCode::QuadratureNonConvergence, "non-finite integrand");
            }
            sum += est.value;
            continue;
        }
        if (p.depth >= opts.max_depth) {
            throw Error(ErrorCode::QuadratureNonConvergence,
                        "adaptive quadrature exceeded maximum refinement depth near s = " +
                            std::to_string(0.5 * (p.lo + p.hi)));
        }
        const double mid = 0.5 * (p.lo + p.hi);
        // Right half pushed first so the left half is processed first.
        stack.push_back({mid, p.hi, p.depth + 1});
        stack.push_back({p.lo, mid, p.depth + 1});
    }
    return sum;
}

}  // namespace flockdyn::numerics
