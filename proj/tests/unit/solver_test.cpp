#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "flockdyn/error.hpp"
#include "flockdyn/numerics.hpp"
#include "flockdyn/solver.hpp"
#include "flockdyn/specfun.hpp"
#include "support/params.hpp"

using namespace flockdyn;
using flockdyn::test_support::reference_3d;
using flockdyn::test_support::reference_2d;
using flockdyn::test_support::make;
using flockdyn::test_support::rel_err;

namespace {

double bracket_point(double a, int j) { return (j - 0.5) * kPi / a; }

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    return g;
}

}  // namespace

TEST(Aggregate, ReferenceParameters) {
    const Aggregate ref3d = aggregate_param(reference_3d());
    EXPECT_NEAR(ref3d.A, 5.585, 1e-3);
    const Aggregate ref2d = aggregate_param(reference_2d());
    EXPECT_NEAR(ref2d.A, 1.5, 1e-12);
}

TEST(BTilde, ZeroBranchExample) {
    const ModelParams p = make(3, 8.0, 0.5, 1.0);
    ASSERT_EQ(aggregate_param(p).A, 0.0);
    EXPECT_NEAR(b_tilde(p, Sign::Zero, 1.0, 1.0), 8.0, 1e-13);
}

TEST(BTilde, ThreeDimensionalSmallRadiusLimit) {
    const ModelParams p = reference_3d();
    const double a = aggregate_param(p).a;
    const double k = p.k;
    for (double xi : {1.0, p.ell}) {
        const double limit = std::sqrt(2.0 / (a * kPi)) * a / (1.0 + a * a * xi * xi / (k * k));
        EXPECT_NEAR(b_tilde(p, Sign::Positive, xi, 1e-10), limit, 1e-9 * limit);
    }
    const double det0 = std::sqrt(2.0 * a / kPi) *
                        (1.0 / (1.0 + a * a * p.ell * p.ell / (k * k)) - 1.0 / (1.0 + a * a / (k * k)));
    EXPECT_GT(det0, 0.0);
    EXPECT_NEAR(det_m(p, 1e-10), det0, 1e-9 * det0);
}

TEST(BTilde, TwoDimensionalAtZeroOfJ0) {
    const ModelParams p = reference_2d();
    const double a = aggregate_param(p).a;
    const double j01 = bessel_j_zero(BesselOrder::integer(0), 1);
    const double R = j01 / a;
    const double k = p.k;
    const double x = k * R;
    const double want = -(a / k) / (1.0 + a * a / (k * k)) * bessel_j(BesselOrder::integer(1), j01) *
                        bessel_k(BesselOrder::integer(0), x) / bessel_k(BesselOrder::integer(1), x);
    const double got = b_tilde(p, Sign::Positive, 1.0, R);
    EXPECT_LT(got, 0.0);
    EXPECT_NEAR(got, want, 1e-13 * std::abs(want));
}

TEST(BTilde, GeneralFormAgreesOnAllBranches) {
    for (int n : {2, 3}) {
        for (Sign s : {Sign::Positive, Sign::Negative, Sign::Zero}) {
            for (double R : {0.05, 0.7, 3.0, 11.0}) {
                for (double xi : {1.0, 0.6}) {
                    const double raw = b_tilde_raw(n, 0.8, s, 1.3, xi, R);
                    const double gen = b_tilde_general(n, 0.8, s, 1.3, xi, R);
                    EXPECT_NEAR(raw, gen, 1e-11 * std::max(1.0, std::abs(raw)))
                        << "n=" << n << " sign=" << to_string(s) << " R=" << R;
                }
            }
        }
    }
}

TEST(BTilde, Errors) {
    const ModelParams p = reference_3d();
    EXPECT_THROW(b_tilde(p, Sign::Negative, 1.0, 1.0), Error);
    try {
        b_tilde(p, Sign::Zero, 1.0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CaseMismatch);
    }
    try {
        b_tilde(p, Sign::Positive, 1.0, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DomainError);
    }
}

TEST(DetM, AlternatesAtCosineZeros) {
    const ModelParams p = reference_3d();
    const double a = aggregate_param(p).a;
    double prev = det_m(p, bracket_point(a, 1));
    for (int j = 2; j <= 4; ++j) {
        const double cur = det_m(p, bracket_point(a, j));
        EXPECT_LT(prev * cur, 0.0) << "j=" << j;
        prev = cur;
    }
}

TEST(DetM, NegativeWithoutAggregation) {
    std::mt19937_64 rng(11);
    for (int n : {2, 3}) {
        for (int t = 0; t < 10; ++t) {
            for (const ModelParams& p : {test_support::sample_negative(n, rng), test_support::sample_zero(n, rng)}) {
                const RegimeClass cls = classify(p);
                ASSERT_TRUE(cls.biologically_relevant);
                ASSERT_NE(cls.A_sign, Sign::Positive);
                const double scale = std::max(std::sqrt(std::abs(aggregate_param(p).A)), p.k);
                for (double R : log_grid(1e-3 / scale, 1e3 / scale, 200)) {
                    ASSERT_LT(det_m_scaled(p, R), 0.0) << "n=" << n << " C=" << p.C << " ell=" << p.ell
                                                       << " k=" << p.k << " R=" << R;
                }
            }
        }
    }
}

TEST(AuxG, ValueAtOrigin) {
    const ModelParams p = reference_3d();
    const double a = aggregate_param(p).a;
    const double k = p.k;
    const double l = p.ell;
    const double want = (a / k) * a * a * l * (l + 1.0) / (k * k + a * a * (l * l + l + 1.0));
    EXPECT_NEAR(aux_g(p, 0.0), want, 1e-14 * want);
}

TEST(AuxG, SlopeBoundedBelow) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const ModelParams p = test_support::sample_region_one(3, rng);
        const double a = aggregate_param(p).a;
        for (double R : log_grid(1e-3 / a, 50.0 / a, 200)) {
            const double h = 1e-5 * R;
            const double slope = (aux_g(p, R + h) - aux_g(p, R - h)) / (2.0 * h);
            EXPECT_GT(slope, -a);
        }
    }
}

TEST(AuxG, CaseMismatchOutsideThreeDimensionalAggregation) {
    EXPECT_THROW(aux_g(reference_2d(), 1.0), Error);
    EXPECT_THROW(aux_g(make(3, 1.255, 0.95, 0.2), 1.0), Error);
}

TEST(AuxG, LimitForms) {
    const double C = 1.255;
    const ModelParams upper = make(3, C, std::pow((1.0 - 1e-6) / C, 1.0 / 3.0), 0.2);
    const double au = aggregate_param(upper).a;
    for (double x = 0.5; x <= 3.0; x += 0.25) {
        EXPECT_NEAR(aux_g(upper, x / au), -x, 0.05 * x);
    }
    const ModelParams lower = make(3, C, 1.0001 / C, 0.2);
    const double al = aggregate_param(lower).a;
    const double cbar = (C + 1.0) / (C * C + C + 1.0);
    EXPECT_NEAR(aux_g(lower, 1e-3 / al), al / lower.k * cbar, 0.05 * al / lower.k * cbar);
}

TEST(DetM, FactorsThroughTanPlusG) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 10; ++t) {
        const ModelParams p = test_support::sample_region_one(3, rng);
        const double a = aggregate_param(p).a;
        const double k = p.k;
        auto weight = [&](double xi, double R) { return k / ((1.0 + a * a * xi * xi / (k * k)) * (k * R + xi)); };
        for (double R : {0.3 / a, 1.1 / a, 2.0 / a, 5.3 / a, 9.0 / a}) {
            const double F = std::sin(a * R) + aux_g(p, R) * std::cos(a * R);
            const double factor = std::sqrt(2.0 / (a * kPi)) * (weight(p.ell, R) - weight(1.0, R));
            EXPECT_NEAR(det_m(p, R), factor * F, 1e-12 * std::abs(factor));
        }
    }
}

TEST(Roots, InterlaceInThreeDimensions) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 20; ++t) {
        const ModelParams p = test_support::sample_region_one(3, rng);
        ASSERT_EQ(classify(p).region, Region::RegionI);
        const double a = aggregate_param(p).a;
        const auto roots = enumerate_roots(p, 4);
        ASSERT_EQ(roots.size(), 4u);
        for (int j = 1; j <= 4; ++j) {
            const double R = roots[j - 1].R_star;
            EXPECT_GT(R, bracket_point(a, j));
            EXPECT_LT(R, bracket_point(a, j + 1));
            EXPECT_EQ(roots[j - 1].bracket.index, j);
            const double F = std::sin(a * R) + aux_g(p, R) * std::cos(a * R);
            EXPECT_LE(std::abs(F), 1e-10);
        }
        for (double R : log_grid(1e-4 / a, bracket_point(a, 1), 200)) EXPECT_GT(det_m(p, R), 0.0);
        EXPECT_EQ(find_support_radius(p).R_star, roots[0].R_star);
    }
}

TEST(Roots, TwoDimensionalRootsIncrease) {
    const ModelParams p = reference_2d();
    const auto roots = enumerate_roots(p, 4);
    ASSERT_EQ(roots.size(), 4u);
    for (std::size_t j = 1; j < roots.size(); ++j) EXPECT_GT(roots[j].R_star, roots[j - 1].R_star);
    const double a = aggregate_param(p).a;
    EXPECT_LT(roots[0].R_star, bessel_j_zero(BesselOrder::integer(1), 1) / a);
    EXPECT_FALSE(roots[0].ambiguous);
    for (const auto& r : roots) EXPECT_LE(std::abs(det_m(p, r.R_star)), 1e-10);
}

TEST(Roots, NoRootWithoutAggregation) {
    for (const ModelParams& p : {make(2, 1.5, 0.9, 0.5), make(3, 1.255, 0.95, 0.2), make(3, 8.0, 0.5, 1.0)}) {
        try {
            find_support_radius(p);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::NoRoot);
        }
    }
}

TEST(Roots, NonBiologicalRequiresOptIn) {
    const ModelParams p = make(3, 0.5, 1.5, 1.0);
    ASSERT_FALSE(classify(p).biologically_relevant);
    ASSERT_EQ(classify(p).A_sign, Sign::Positive);
    try {
        solve_profile(p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RegimeViolation);
    }
    SolveOptions opts;
    opts.allow_non_biological = true;
    const FlockProfile prof = solve_profile(p, opts);
    EXPECT_TRUE(prof.flags.non_biological);
    EXPECT_LE(std::abs(det_m(p, prof.R_star)), 1e-9);
}

TEST(Roots, ScaleCovariance) {
    std::mt19937_64 rng(29);
    for (int n : {2, 3}) {
        for (int t = 0; t < 5; ++t) {
            const ModelParams p = test_support::sample_region_one(n, rng);
            for (double lambda : {0.5, 3.0}) {
                ModelParams q = p;
                q.k *= lambda;
                EXPECT_NEAR(find_support_radius(q).R_star * lambda, find_support_radius(p).R_star,
                            1e-10 * find_support_radius(p).R_star);
            }
        }
    }
}

TEST(Profile, Reference3dInvariants) {
    const FlockProfile prof = solve_profile(reference_3d());
    EXPECT_NEAR(prof.A, 5.585, 1e-3);
    EXPECT_GT(prof.mu1, 0.0);
    EXPECT_GT(prof.mu2, 0.0);
    EXPECT_NEAR(mass(prof), 1.0, 1e-10);
    const double bl = b_tilde(prof.params, Sign::Positive, prof.params.ell, prof.R_star);
    const double b1 = b_tilde(prof.params, Sign::Positive, 1.0, prof.R_star);
    EXPECT_LE(std::abs(bl * prof.mu1 + prof.mu2), kTolNull);
    EXPECT_LE(std::abs(b1 * prof.mu1 + prof.mu2), kTolNull);
    const double k2 = prof.params.k * prof.params.k;
    EXPECT_NEAR(prof.D, prof.mu2 * (prof.params.c_ell_n() - 1.0) / k2, 1e-15);
    const double a = prof.a;
    EXPECT_NEAR(density_eval(prof, 0.0), std::sqrt(2.0 * a / kPi) * prof.mu1 + prof.mu2, 1e-14);
    EXPECT_GT(density_eval(prof, prof.R_star), 0.0);
    EXPECT_EQ(density_eval(prof, prof.R_star * 1.0001), 0.0);
    EXPECT_LE(homogeneous_singular_ratio(prof.params, prof.R_star), 1e-8);
}

TEST(Profile, Reference2dInvariants) {
    const FlockProfile prof = solve_profile(reference_2d());
    EXPECT_NEAR(prof.A, 1.5, 1e-12);
    EXPECT_NEAR(mass(prof), 1.0, 1e-10);
    EXPECT_NEAR(density_eval(prof, 0.0), prof.mu1 + prof.mu2, 1e-14);
    EXPECT_EQ(density_eval(prof, 2.0 * prof.R_star), 0.0);
    EXPECT_LE(homogeneous_singular_ratio(prof.params, prof.R_star), 1e-8);
}

TEST(Profile, PositiveAndMonotoneOnFirstRoot) {
    std::mt19937_64 rng(31);
    for (int n : {2, 3}) {
        for (int t = 0; t < 15; ++t) {
            const ModelParams p = test_support::sample_region_one(n, rng);
            const FlockProfile prof = solve_profile(p);
            const RadialDensity rho = prof.density();
            double prev = rho(0.0);
            for (int i = 0; i <= 1000; ++i) {
                const double r = std::min(prof.R_star, prof.R_star * i / 1000.0);
                const double v = rho(r);
                EXPECT_GT(v, 0.0);
                EXPECT_LE(v, prev + 1e-14 * std::abs(prev));
                EXPECT_LE(rho.derivative(r), 1e-14);
                prev = v;
            }
        }
    }
}

TEST(Profile, MassMatchesQuadrature) {
    for (const ModelParams& p : {reference_3d(), reference_2d()}) {
        const FlockProfile prof = solve_profile(p);
        const RadialDensity rho = prof.density();
        const int n = p.n;
        const double area = n == 3 ? 4.0 * kPi : 2.0 * kPi;
        const double q = numerics::integrate([&](double r) { return area * std::pow(r, n - 1) * rho(r); }, 0.0,
                                             prof.R_star, {1e-15, 1e-14, 48});
        EXPECT_NEAR(q, 1.0, 1e-10);
    }
    RadialDensity flat;
    flat.n = 3;
    flat.mu1 = 0.0;
    flat.mu2 = 2.5;
    flat.a = 1.0;
    flat.R = 0.7;
    EXPECT_NEAR(flat.mass(), 2.5 * 4.0 / 3.0 * kPi * std::pow(0.7, 3), 1e-13);
    RadialDensity vanishing;
    vanishing.n = 2;
    vanishing.a = 1.7;
    vanishing.mu1 = 1.0;
    vanishing.mu2 = 0.0;
    vanishing.R = bessel_j_zero(BesselOrder::integer(1), 1) / 1.7;
    EXPECT_NEAR(vanishing.mass(), 0.0, 1e-14);
}

TEST(Profile, HigherRootChangesSign) {
    std::mt19937_64 rng(37);
    for (int t = 0; t < 10; ++t) {
        const ModelParams p = test_support::sample_region_one(3, rng);
        const double a = aggregate_param(p).a;
        for (int j : {2, 3}) {
            const FlockProfile prof = profile_at_radius(p, enumerate_roots(p, j).back().R_star, j);
            const RadialDensity rho = prof.density();
            EXPECT_LT(rho(0.0) * rho(bracket_point(a, 2)), 0.0);
            EXPECT_NEAR(mass(prof), 1.0, 1e-10);
        }
    }
    SolveOptions opts;
    opts.root_index = 2;
    const FlockProfile second = solve_profile(reference_3d(), opts);
    EXPECT_EQ(second.root_index, 2);
    EXPECT_LT(second.density()(0.0) * second.density()(bracket_point(second.a, 2)), 0.0);
}

TEST(Lambda, VanishAtRootOnly) {
    const FlockProfile prof = solve_profile(reference_3d());
    const LambdaCoefficients at = lambda_coeffs(prof.params, prof.R_star, prof.mu1, prof.mu2);
    EXPECT_LE(std::abs(at.lambda1), kTolNull);
    EXPECT_LE(std::abs(at.lambda2), kTolNull);
    EXPECT_EQ(at.lambda3, 0.0);
    EXPECT_EQ(at.lambda4, 0.0);

    const LambdaCoefficients zero = lambda_coeffs(prof.params, prof.R_star, 0.0, 0.0);
    EXPECT_EQ(zero.lambda1, 0.0);
    EXPECT_EQ(zero.lambda2, 0.0);

    const double mid = 0.5 * (bracket_point(prof.a, 1) + prof.R_star);
    const FlockProfile off = profile_at_radius(prof.params, mid);
    const LambdaCoefficients away = lambda_coeffs(prof.params, mid, off.mu1, off.mu2);
    EXPECT_GT(std::max(std::abs(away.lambda1), std::abs(away.lambda2)), 1e3 * kTolNull);
}

TEST(Asymptotics, ThreeDimensionalLimitsConverge) {
    const double C = 1.255;
    const double upper = std::pow(C, -1.0 / 3.0);
    const double lower = 1.0 / C;
    for (AsymptoticLimit lim : {AsymptoticLimit::UpperEll, AsymptoticLimit::LowerEll}) {
        double prev = 1e300;
        for (int m = 1; m <= 5; ++m) {
            const double gap = std::pow(10.0, -1 - m);
            const double ell = lim == AsymptoticLimit::UpperEll ? upper * (1.0 - gap) : lower * (1.0 + gap);
            const ModelParams p = make(3, C, ell, 0.2);
            const double err = rel_err(asymptotic_radius(p, lim).R_star, find_support_radius(p).R_star);
            EXPECT_LT(err, prev) << to_string(lim) << " m=" << m;
            prev = err;
        }
        EXPECT_LE(prev, 0.02) << to_string(lim);
    }
}

// The leading-order radii carry a relative error of order |1 - C ell^3|^{1/2}
// (upper) and |C ell - 1|^{1/2} (lower): a tenfold smaller gap shrinks the
// error by sqrt(10).
TEST(Asymptotics, RelativeErrorOrder) {
    const double C = 1.255;
    for (AsymptoticLimit lim : {AsymptoticLimit::UpperEll, AsymptoticLimit::LowerEll}) {
        std::vector<double> errs;
        for (double gap : {1e-5, 1e-6, 1e-7}) {
            const double ell = lim == AsymptoticLimit::UpperEll ? std::pow((1.0 - gap) / C, 1.0 / 3.0) : (1.0 + gap) / C;
            const ModelParams p = make(3, C, ell, 0.2);
            errs.push_back(rel_err(asymptotic_radius(p, lim).R_star, find_support_radius(p).R_star));
        }
        EXPECT_NEAR(errs[0] / errs[1], std::sqrt(10.0), 0.05 * std::sqrt(10.0)) << to_string(lim);
        EXPECT_NEAR(errs[1] / errs[2], std::sqrt(10.0), 0.02 * std::sqrt(10.0)) << to_string(lim);
    }
}

TEST(Asymptotics, NearLimitExamples) {
    const double C = 1.255;
    const ModelParams up = make(3, C, 0.999 * std::pow(C, -1.0 / 3.0), 0.2);
    EXPECT_LT(rel_err(asymptotic_radius(up, AsymptoticLimit::UpperEll).R_star, find_support_radius(up).R_star),
              0.08);
    const ModelParams up_close = make(3, C, (1.0 - 1e-5) * std::pow(C, -1.0 / 3.0), 0.2);
    EXPECT_LT(rel_err(asymptotic_radius(up_close, AsymptoticLimit::UpperEll).R_star,
                      find_support_radius(up_close).R_star),
              0.02);
    const ModelParams up_limit = make(3, C, std::pow((1.0 - 1e-9) / C, 1.0 / 3.0), 0.2);
    EXPECT_NEAR(find_support_radius(up_limit).R_star * aggregate_param(up_limit).a, first_tan_fixed_point(), 1e-3);

    const ModelParams lo = make(3, C, 1.001 / C, 0.2);
    EXPECT_LT(rel_err(asymptotic_radius(lo, AsymptoticLimit::LowerEll).R_star, find_support_radius(lo).R_star),
              0.05);
    const ModelParams lo_close = make(3, C, 1.0001 / C, 0.2);
    EXPECT_LT(rel_err(asymptotic_radius(lo_close, AsymptoticLimit::LowerEll).R_star,
                      find_support_radius(lo_close).R_star),
              0.02);
    double prev = 1e300;
    for (double gap : {1e-2, 1e-3, 1e-4, 1e-5}) {
        const ModelParams p = make(3, C, (1.0 + gap) / C, 0.2);
        const double aR = find_support_radius(p).R_star * aggregate_param(p).a;
        EXPECT_GT(aR, kPi / 2.0);
        EXPECT_LT(aR, prev);
        prev = aR;
    }
}

TEST(Asymptotics, TwoDimensionalLimits) {
    const double C = 10.0 / 9.0;
    const ModelParams p = make(2, C, (1.0 - 1e-5) * std::pow(C, -0.5), 0.5);
    const double a = aggregate_param(p).a;
    const AsymptoticEstimate est = asymptotic_radius(p, AsymptoticLimit::UpperEll);
    EXPECT_NEAR(est.R_star, bessel_j_zero(BesselOrder::integer(1), 1) / a, 1e-12 * est.R_star);
    EXPECT_FALSE(est.limit_mismatch);
    EXPECT_LT(rel_err(est.R_star, find_support_radius(p).R_star), 0.02);

    double prev = 1e300;
    for (double ell : {0.05, 0.0125, 0.003125}) {
        const ModelParams q = make(2, C, ell, 0.5);
        const AsymptoticEstimate low = asymptotic_radius(q, AsymptoticLimit::LowerEll);
        EXPECT_FALSE(low.limit_mismatch);
        const double err = rel_err(low.R_star, find_support_radius(q).R_star);
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 1e-4);
    const double x = asymptotic_radius(make(2, C, 0.01, 0.5), AsymptoticLimit::LowerEll).R_star / 0.01 * 0.5 /
                     std::sqrt(C - 1.0);
    EXPECT_LT(x, bessel_j_zero(BesselOrder::integer(0), 1));
}

TEST(Asymptotics, FlagsDistantParameters) {
    EXPECT_TRUE(asymptotic_radius(reference_3d(), AsymptoticLimit::UpperEll).limit_mismatch);
    EXPECT_FALSE(asymptotic_radius(reference_3d(), AsymptoticLimit::LowerEll).limit_mismatch);
    EXPECT_TRUE(asymptotic_radius(make(3, 1.255, 0.9, 0.2), AsymptoticLimit::LowerEll).limit_mismatch);
    EXPECT_TRUE(asymptotic_radius(reference_2d(), AsymptoticLimit::LowerEll).limit_mismatch);
}

TEST(Profile, JsonRoundTrip) {
    const FlockProfile prof = solve_profile(reference_2d());
    const FlockProfile back = profile_from_json(profile_to_json(prof));
    EXPECT_EQ(back.params.n, prof.params.n);
    EXPECT_EQ(back.params.C, prof.params.C);
    EXPECT_EQ(back.params.ell, prof.params.ell);
    EXPECT_EQ(back.params.k, prof.params.k);
    EXPECT_EQ(back.A, prof.A);
    EXPECT_EQ(back.a, prof.a);
    EXPECT_EQ(back.R_star, prof.R_star);
    EXPECT_EQ(back.mu1, prof.mu1);
    EXPECT_EQ(back.mu2, prof.mu2);
    EXPECT_EQ(back.D, prof.D);
    EXPECT_EQ(back.root_index, prof.root_index);
    EXPECT_THROW(profile_from_json("{\"n\": 3}"), Error);
}
