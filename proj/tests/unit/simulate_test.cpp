#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "flockdyn/error.hpp"
#include "flockdyn/geometry.hpp"
#include "flockdyn/io.hpp"
#include "flockdyn/simulate.hpp"
#include "flockdyn/solver.hpp"
#include "support/params.hpp"

using namespace flockdyn;
using flockdyn::test_support::reference_3d;
using flockdyn::test_support::reference_2d;

namespace {

SimConfig quasi_morse_config(const ModelParams& p, int N) {
    SimConfig c;
    c.dimension = p.n;
    c.potential = QuasiMorse{p};
    c.N = N;
    c.init.radius = solve_profile(p).R_star;
    return c;
}

// Far-apart particles under a short-range Morse potential feel no force.
SimConfig free_flight_config(int N) {
    SimConfig c;
    c.model = Model::SecondOrder;
    c.dimension = 2;
    c.potential = Morse{1.0, 1.0, 1e-3, 2e-3};
    c.N = N;
    c.init.radius = 1e3;
    c.alpha = 1.5;
    c.beta = 0.5;
    c.dt = 0.05;
    return c;
}

double rayleigh_rk4(double s, double alpha, double beta, double t, int steps) {
    const double h = t / steps;
    auto f = [&](double v) { return alpha * v - beta * v * v * v; };
    for (int i = 0; i < steps; ++i) {
        const double k1 = f(s);
        const double k2 = f(s + 0.5 * h * k1);
        const double k3 = f(s + 0.5 * h * k2);
        const double k4 = f(s + h * k3);
        s += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return s;
}

ParticleState sample_profile(const FlockProfile& prof, int count, std::uint64_t seed) {
    const RadialDensity rho = prof.density();
    const int n = prof.params.n;
    const int grid = 20001;
    std::vector<double> r(grid), cdf(grid, 0.0);
    const double area = unit_sphere_area(n);
    for (int i = 0; i < grid; ++i) r[i] = prof.R_star * i / (grid - 1);
    for (int i = 1; i < grid; ++i) {
        auto w = [&](double s) { return area * std::pow(s, n - 1) * rho(std::min(s, prof.R_star)); };
        const double m = 0.5 * (r[i - 1] + r[i]);
        cdf[i] = cdf[i - 1] + (r[i] - r[i - 1]) / 6.0 * (w(r[i - 1]) + 4.0 * w(m) + w(r[i]));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, cdf.back());
    std::normal_distribution<double> normal(0.0, 1.0);
    ParticleState s;
    s.N = count;
    s.n = n;
    s.positions.resize(static_cast<std::size_t>(count) * n);
    for (int p = 0; p < count; ++p) {
        const double u = uniform(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t hi = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - cdf.begin(), 1), grid - 1);
        const double t = (u - cdf[hi - 1]) / (cdf[hi] - cdf[hi - 1]);
        const double radius = r[hi - 1] + t * (r[hi] - r[hi - 1]);
        double q = 0.0;
        double* x = s.x(p);
        for (int d = 0; d < n; ++d) {
            x[d] = normal(rng);
            q += x[d] * x[d];
        }
        for (int d = 0; d < n; ++d) x[d] *= radius / std::sqrt(q);
    }
    return s;
}

}  // namespace

TEST(Rayleigh, MatchesIntegratedOde) {
    for (double s0 : {1e-3, 0.2, 1.0, 3.0}) {
        for (double t : {0.01, 0.5, 4.0}) {
            EXPECT_NEAR(rayleigh_speed(s0, 1.5, 0.5, t), rayleigh_rk4(s0, 1.5, 0.5, t, 20000), 1e-11);
        }
    }
    EXPECT_EQ(rayleigh_speed(0.0, 1.0, 1.0, 5.0), 0.0);
    EXPECT_NEAR(rayleigh_speed(2.0, 1.0, 1.0, 1e4), 1.0, 1e-15);
    EXPECT_NEAR(rayleigh_speed(2.0, 0.0, 1.0, 1.0), rayleigh_rk4(2.0, 0.0, 1.0, 1.0, 20000), 1e-11);
}

TEST(SecondOrder, SpeedsSaturate) {
    SimConfig c = free_flight_config(20);
    c.velocity_noise = 0.3;
    c.steps = 400;
    Simulator sim(c);
    ParticleState s = sim.initial_state();
    for (long i = 0; i < c.steps; ++i) sim.step(s);
    const double target = std::sqrt(c.alpha / c.beta);
    for (int i = 0; i < s.N; ++i) {
        const double vx = s.velocities[2 * i];
        const double vy = s.velocities[2 * i + 1];
        EXPECT_NEAR(std::hypot(vx, vy), target, 1e-6);
    }
}

TEST(SecondOrder, RestIsUnstable) {
    SimConfig c = free_flight_config(1);
    Simulator sim(c);
    ParticleState s = sim.initial_state();
    for (int i = 0; i < 100; ++i) sim.step(s);
    EXPECT_EQ(s.velocities[0], 0.0);
    EXPECT_EQ(s.velocities[1], 0.0);
    s.velocities[0] = 1e-8;
    for (int i = 0; i < 1000; ++i) sim.step(s);
    EXPECT_NEAR(std::hypot(s.velocities[0], s.velocities[1]), std::sqrt(c.alpha / c.beta), 1e-9);
}

TEST(SecondOrder, CommonVelocityTranslatesRigidly) {
    SimConfig c = free_flight_config(10);
    c.initial_velocity = {std::sqrt(3.0) * 0.6, std::sqrt(3.0) * 0.8};
    Simulator sim(c);
    const ParticleState start = sim.initial_state();
    ParticleState s = start;
    for (int i = 0; i < 200; ++i) sim.step(s);
    for (int i = 0; i < s.N; ++i) {
        EXPECT_NEAR(s.x(i)[0] - start.x(i)[0], c.initial_velocity[0] * s.time, 1e-9);
        EXPECT_NEAR(s.x(i)[1] - start.x(i)[1], c.initial_velocity[1] * s.time, 1e-9);
    }
}

TEST(FirstOrder, CenterOfMassInvariant) {
    for (const ModelParams& p : {reference_3d(), reference_2d()}) {
        SimConfig c = quasi_morse_config(p, 300);
        c.dt = p.n == 3 ? 2.0 : 0.5;
        Simulator sim(c);
        ParticleState s = sim.initial_state();
        const double R = c.init.radius;
        std::vector<double> prev = s.center_of_mass();
        for (int i = 0; i < 50; ++i) {
            sim.step(s);
            const std::vector<double> cur = s.center_of_mass();
            for (int d = 0; d < p.n; ++d) EXPECT_LE(std::abs(cur[d] - prev[d]), 1e-12 * R);
            prev = cur;
        }
    }
}

TEST(FirstOrder, EnergyDescends) {
    for (const ModelParams& p : {reference_3d(), reference_2d()}) {
        SimConfig c = quasi_morse_config(p, 150);
        c.dt = p.n == 3 ? 1.0 : 0.2;
        Simulator sim(c);
        ParticleState s = sim.initial_state();
        double prev = sim.interaction_energy(s);
        for (int i = 0; i < 1000; ++i) {
            sim.step(s);
            const double e = sim.interaction_energy(s);
            ASSERT_LE(e, prev) << "step " << i;
            prev = e;
        }
    }
}

TEST(FirstOrder, StepFunctionsMatchSimulator) {
    SimConfig c = quasi_morse_config(reference_2d(), 40);
    Simulator sim(c);
    ParticleState s = sim.initial_state();
    const ParticleState next = step_first_order(s, c);
    sim.step(s);
    EXPECT_EQ(next.positions, s.positions);
    EXPECT_EQ(next.time, s.time);
}

TEST(Forces, TableMatchesExactEvaluation) {
    for (const PotentialSpec& spec : {PotentialSpec{QuasiMorse{reference_3d()}}, PotentialSpec{QuasiMorse{reference_2d()}},
                                      PotentialSpec{MorseLike{0.5, 0.6, 0.2}}, PotentialSpec{MorseLike{1.5, 0.6, 0.68}},
                                      PotentialSpec{Morse{2.0, 1.0, 0.5, 1.5}}}) {
        SimConfig c;
        c.potential = spec;
        c.dimension = std::holds_alternative<QuasiMorse>(spec) ? std::get<QuasiMorse>(spec).params.n : 2;
        c.N = 60;
        c.init.radius = std::holds_alternative<MorseLike>(spec) ? 0.05 : 1.0;
        Simulator tab(c);
        c.force_mode = ForceMode::Exact;
        Simulator exact(c);
        const ParticleState s = tab.initial_state();
        std::vector<double> ft, fe;
        tab.forces(s, ft);
        exact.forces(s, fe);
        double scale = 0.0;
        for (double v : fe) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < ft.size(); ++i) EXPECT_NEAR(ft[i], fe[i], 1e-8 * scale);
        EXPECT_NEAR(tab.interaction_energy(s), exact.interaction_energy(s), 1e-9 * std::abs(exact.interaction_energy(s)));
    }
}

TEST(Forces, PairTableReproducesPotential) {
    const PotentialSpec spec = QuasiMorse{reference_2d()};
    const PairTable table(spec, 1e-6, potential_range(spec), 512);
    for (double r : {2e-6, 1e-4, 0.013, 0.5, 1.7, 25.0, 119.0}) {
        const double q = r * r;
        const double f = potential_force_magnitude(spec, r) / r;
        EXPECT_NEAR(table.force_over_r(q), f, 1e-8 * std::abs(f)) << r;
        const double u = potential_value(spec, r);
        EXPECT_NEAR(table.energy(q), u, 1e-8 * std::abs(u)) << r;
    }
    const double far = 2.0 * potential_range(spec);
    EXPECT_EQ(table.force_over_r(far * far), potential_force_magnitude(spec, far) / far);
}

TEST(Forces, CloseApproachUsesClampedMagnitude) {
    SimConfig c = quasi_morse_config(reference_2d(), 2);
    c.min_separation = 1e-3;
    Simulator sim(c);
    ParticleState s;
    s.N = 2;
    s.n = 2;
    s.positions = {0.0, 0.0, 1e-5, 0.0};
    std::vector<double> f;
    sim.forces(s, f);
    const double want = potential_force_magnitude(c.potential, 1e-3) / 2.0;
    EXPECT_NEAR(f[0], want, 1e-12 * std::abs(want));
    EXPECT_NEAR(f[2], -want, 1e-12 * std::abs(want));
    s.positions = {0.3, 0.3, 0.3, 0.3};
    sim.forces(s, f);
    for (double v : f) EXPECT_EQ(v, 0.0);
}

TEST(Determinism, SeedAndThreadCountDoNotChangeTrajectories) {
    for (Model model : {Model::FirstOrder, Model::SecondOrder}) {
        SimConfig c = quasi_morse_config(reference_3d(), 257);
        c.model = model;
        c.dt = model == Model::FirstOrder ? 2.0 : 0.05;
        c.velocity_noise = 0.1;
        c.steps = 25;
        c.stop_at_convergence = false;
        c.threads = 1;
        const RunResult one = run(c);
        const RunResult again = run(c);
        c.threads = 3;
        const RunResult three = run(c);
        EXPECT_EQ(one.final_state.positions, again.final_state.positions);
        EXPECT_EQ(one.final_state.positions, three.final_state.positions);
        EXPECT_EQ(one.final_state.velocities, three.final_state.velocities);
        ASSERT_EQ(one.trajectory.size(), three.trajectory.size());
        for (std::size_t i = 0; i < one.trajectory.size(); ++i) {
            EXPECT_EQ(one.trajectory[i].potential, three.trajectory[i].potential);
        }
    }
}

TEST(Determinism, CachedAndUncachedPairLoopsAgree) {
    SimConfig c = quasi_morse_config(reference_2d(), static_cast<int>(kPairCacheLimit) + 1);
    Simulator sim(c);
    const ParticleState big = sim.initial_state();
    std::vector<double> full;
    sim.forces(big, full);
    ParticleState head = big;
    head.N = static_cast<int>(kPairCacheLimit);
    head.positions.resize(kPairCacheLimit * 2);
    std::vector<double> cached;
    sim.forces(head, cached);
    // Removing the last particle changes each sum by exactly its own term.
    std::vector<double> reference(cached.size());
    ParticleState pair;
    pair.n = 2;
    pair.N = 2;
    for (std::size_t i = 0; i < kPairCacheLimit; ++i) {
        const double* xi = big.x(static_cast<int>(i));
        const double* xl = big.x(big.N - 1);
        double d[2] = {xi[0] - xl[0], xi[1] - xl[1]};
        const double q = d[0] * d[0] + d[1] * d[1];
        const double w = potential_force_magnitude(c.potential, std::sqrt(q)) / std::sqrt(q);
        for (int k = 0; k < 2; ++k) {
            const double with_last = full[2 * i + k] * big.N;
            const double without = cached[2 * i + k] * head.N;
            EXPECT_NEAR(with_last - without, -w * d[k], 1e-9 * (std::abs(with_last) + std::abs(w * d[k])));
        }
    }
}

TEST(Performance, ForceCostScalesQuadratically) {
    auto time_forces = [](int N) {
        SimConfig c = quasi_morse_config(reference_3d(), N);
        Simulator sim(c);
        const ParticleState s = sim.initial_state();
        std::vector<double> f;
        sim.forces(s, f);
        double best = 1e300;
        for (int rep = 0; rep < 7; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            sim.forces(s, f);
            best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
        return best;
    };
    const double small = time_forces(500);
    const double large = time_forces(1000);
    const double ratio = large / small;
    EXPECT_GT(ratio, 4.0 * 0.7);
    EXPECT_LT(ratio, 4.0 * 1.3);
}

TEST(Histogram, SingleShell) {
    ParticleState s;
    s.n = 2;
    s.N = 64;
    for (int i = 0; i < s.N; ++i) {
        const double t = 2.0 * kPi * i / s.N;
        s.positions.push_back(0.7 * std::cos(t));
        s.positions.push_back(0.7 * std::sin(t));
    }
    const RadialHistogram h = radial_histogram(s, 8);
    int nonzero = 0;
    for (double d : h.density) nonzero += d > 0.0;
    EXPECT_EQ(nonzero, 1);
    EXPECT_GT(h.density.back(), 0.0);
    EXPECT_NEAR(h.total_mass(), 1.0, 1e-12);
    EXPECT_NEAR(h.max_radius, 0.7, 1e-12);
}

TEST(Histogram, UniformBallIsFlat) {
    SimConfig c = quasi_morse_config(reference_3d(), 100000);
    c.init.radius = 1.0;
    const ParticleState s = Simulator(c).initial_state();
    const RadialHistogram h = radial_histogram(s, 3);
    const double flat = 1.0 / ball_volume(3, h.max_radius);
    for (double d : h.density) EXPECT_NEAR(d, flat, 0.05 * flat);
    EXPECT_NEAR(h.total_mass(), 1.0, 1e-12);
}

TEST(Compare, SampledProfileIsClose) {
    for (const ModelParams& p : {reference_3d(), reference_2d()}) {
        const FlockProfile prof = solve_profile(p);
        const ParticleState s = sample_profile(prof, 1000000, 3);
        const ProfileComparison cmp = compare_profile(radial_histogram(s, 50), prof);
        EXPECT_LE(cmp.l1_error, 0.02) << "n=" << p.n;
        EXPECT_LE(cmp.support_error, 5e-3) << "n=" << p.n;
    }
}

TEST(Compare, UniformBallBoundedBelowByProfileVariation) {
    const FlockProfile prof = solve_profile(reference_3d());
    const RadialDensity rho = prof.density();
    const double mean = 1.0 / ball_volume(3, prof.R_star);
    double floor = 0.0;
    const int m = 20000;
    for (int i = 0; i < m; ++i) {
        const double r = prof.R_star * (i + 0.5) / m;
        floor += std::abs(rho(r) - mean) * 4.0 * kPi * r * r * prof.R_star / m;
    }
    SimConfig c = quasi_morse_config(reference_3d(), 100000);
    const ParticleState s = Simulator(c).initial_state();
    const ProfileComparison cmp = compare_profile(radial_histogram(s, 20), prof);
    EXPECT_GE(cmp.l1_error, floor - 0.02);
    EXPECT_GT(floor, 0.1);
}

TEST(Io, StateCsvRoundTrip) {
    SimConfig c = free_flight_config(7);
    c.velocity_noise = 0.5;
    const ParticleState s = Simulator(c).initial_state();
    const std::string text = state_to_csv(s);
    EXPECT_EQ(text.substr(0, text.find('\n')), "x1,x2,v1,v2");
    const ParticleState back = state_from_csv(text, 2, true);
    EXPECT_EQ(back.N, s.N);
    EXPECT_EQ(back.positions, s.positions);
    EXPECT_EQ(back.velocities, s.velocities);
    EXPECT_THROW(state_from_csv("1,2,3\n", 2, false), Error);
    EXPECT_THROW(state_from_csv("1,abc\n", 2, false), Error);
}

TEST(Io, InitialStateFromFile) {
    const std::string path = (std::filesystem::temp_directory_path() / "flockdyn_state_test.csv").string();
    ParticleState s;
    s.n = 3;
    s.N = 2;
    s.positions = {0.1, 0.2, 0.3, -0.1, 0.0, 0.5};
    io::write_file(path, state_to_csv(s));
    SimConfig c = quasi_morse_config(reference_3d(), 2);
    c.init.kind = InitKind::FromFile;
    c.init.path = path;
    const ParticleState loaded = Simulator(c).initial_state();
    EXPECT_EQ(loaded.positions, s.positions);
    c.N = 3;
    EXPECT_THROW(Simulator(c).initial_state(), Error);
    std::filesystem::remove(path);
}

TEST(Io, ConfigJsonRoundTrip) {
    SimConfig c = quasi_morse_config(reference_2d(), 123);
    c.model = Model::SecondOrder;
    c.initial_velocity = {0.5, -0.25};
    c.seed = 99;
    c.force_mode = ForceMode::Exact;
    const SimConfig back = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(back), config_to_json(c));
    EXPECT_EQ(back.N, 123);
    EXPECT_EQ(back.seed, 99u);
    EXPECT_EQ(back.model, Model::SecondOrder);
    EXPECT_THROW(config_from_json("{\"model\": \"third\"}"), Error);
    EXPECT_THROW(config_from_json("{\"dimension\": 4}"), Error);
}

TEST(Io, DiagnosticsAsJsonLines) {
    SimConfig c = quasi_morse_config(reference_2d(), 30);
    c.steps = 10;
    c.diagnostic_stride = 5;
    const RunResult r = run(c);
    const std::string text = diagnostics_to_jsonl(r.trajectory);
    std::istringstream lines(text);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_TRUE(j.contains("potential"));
        ++count;
    }
    EXPECT_EQ(count, 3);
    EXPECT_EQ(r.steps_taken, 10);
}

TEST(Errors, BlowupAndConfigValidation) {
    SimConfig c = quasi_morse_config(reference_2d(), 20);
    c.blowup_bound = 1e-3;
    Simulator sim(c);
    ParticleState s = sim.initial_state();
    try {
        sim.step(s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NumericalBlowup);
    }
    SimConfig bad = quasi_morse_config(reference_2d(), 20);
    bad.dimension = 3;
    EXPECT_THROW(Simulator{bad}, Error);
    bad = quasi_morse_config(reference_2d(), 20);
    bad.dt = -1.0;
    EXPECT_THROW(Simulator{bad}, Error);
    bad = quasi_morse_config(reference_2d(), 20);
    bad.initial_velocity = {1.0};
    EXPECT_THROW(Simulator{bad}, Error);
}

TEST(FirstOrder, ConvergenceIsDetected) {
    // Two particles relax to the potential minimum separation.
    SimConfig c = quasi_morse_config(reference_2d(), 2);
    c.init.radius = 0.5;
    c.dt = 0.5;
    c.steps = 200000;
    const RunResult r = run(c);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(r.steps_taken, c.steps);
    const ParticleState& s = r.final_state;
    const double sep = std::hypot(s.x(0)[0] - s.x(1)[0], s.x(0)[1] - s.x(1)[1]);
    EXPECT_NEAR(sep, potential_minimum_radius(c.potential), 1e-6);
}
