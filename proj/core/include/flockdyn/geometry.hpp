#pragma once

#include <cmath>

#include "flockdyn/specfun.hpp"

namespace flockdyn {

/// Surface area of the unit sphere in R^n.
inline double unit_sphere_area(int n) {
    return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Volume of the ball of radius r in R^n.
inline double ball_volume(int n, double r) {
    return unit_sphere_area(n) * std::pow(r, n) / n;
}

inline double shell_volume(int n, double r_in, double r_out) {
    return ball_volume(n, r_out) - ball_volume(n, r_in);
}

}  // namespace flockdyn
