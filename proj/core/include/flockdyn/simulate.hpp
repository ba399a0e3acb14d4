#pragma once

// N-body integration of the first-order aggregation system and the
// second-order self-propelled system, radial histograms and comparison with
// analytic flock profiles.

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "flockdyn/potentials.hpp"
#include "flockdyn/solver.hpp"

namespace flockdyn {

enum class Model { FirstOrder, SecondOrder };
enum class InitKind { UniformBall, Gaussian, FromFile };
enum class ForceMode { Tabulated, Exact };

struct InitSpec {
    InitKind kind = InitKind::UniformBall;
    double radius = 1.0;  ///< UniformBall
    double sigma = 1.0;   ///< Gaussian
    std::string path;     ///< FromFile: CSV rows x1..xn[, v1..vn]
};

struct SimConfig {
    Model model = Model::FirstOrder;
    int N = 1000;
    int dimension = 3;
    double dt = 0.01;
    long steps = 1000;
    double alpha = 1.0;
    double beta = 1.0;
    PotentialSpec potential = QuasiMorse{};
    std::uint64_t seed = 1;
    InitSpec init;
    /// Pairs closer than this feel the force at this distance; <= 0 selects
    /// 1e-6 times the potential's repulsion length.
    double min_separation = 0.0;
    /// Common initial velocity for the second-order model (empty: zero).
    std::vector<double> initial_velocity;
    /// Standard deviation of Gaussian noise added to initial velocities.
    double velocity_noise = 0.0;
    double blowup_bound = 1e8;
    int diagnostic_stride = 100;
    int threads = 1;
    ForceMode force_mode = ForceMode::Tabulated;
    /// Table nodes per doubling of r^2.
    int table_resolution = 512;
    /// First-order runs stop once the largest single-step displacement stays
    /// below convergence_tol times the cloud radius for convergence_window
    /// consecutive steps.
    bool stop_at_convergence = true;
    double convergence_tol = 1e-9;
    int convergence_window = 100;

    /// Throws InvalidConfig on violated invariants.
    void validate() const;
    double effective_min_separation() const;
};

struct ParticleState {
    int N = 0;
    int n = 0;
    std::vector<double> positions;   ///< N x n, row-major
    std::vector<double> velocities;  ///< N x n or empty for first order
    double time = 0.0;

    const double* x(int i) const { return positions.data() + static_cast<std::size_t>(i) * n; }
    double* x(int i) { return positions.data() + static_cast<std::size_t>(i) * n; }
    std::vector<double> center_of_mass() const;
    double max_radius_about_center() const;
};

struct Diagnostics {
    long step = 0;
    double time = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double max_displacement = 0.0;
    double radius = 0.0;
    std::vector<double> center;
};

struct RunResult {
    ParticleState final_state;
    std::vector<Diagnostics> trajectory;
    long steps_taken = 0;
    bool converged = false;
};

/// U'(r)/r and U(r) tabulated in q = r^2 on octaves [q0 2^o, q0 2^{o+1}) with
/// uniform nodes inside each octave and 4-point Lagrange interpolation.
/// Arguments beyond the last octave are evaluated directly.
class PairTable {
public:
    PairTable(const PotentialSpec& spec, double min_separation, double max_distance, int per_octave);

    /// Coefficient c with grad W(d) = c d, for q = |d|^2 >= min_separation^2.
    double force_over_r(double q) const {
        double v;
        return lookup(force_, q, v) ? v : exact_force_over_r(q);
    }
    double energy(double q) const {
        double v;
        return lookup(energy_, q, v) ? v : exact_energy(q);
    }

    double q_min() const { return q_min_; }
    double q_max() const { return q_max_; }

private:
    bool lookup(const std::vector<double>& table, double q, double& value) const {
        const double t = q * inv_q_min_ < 1.0 ? 1.0 : q * inv_q_min_;
        std::uint64_t bits = 0;
        std::memcpy(&bits, &t, sizeof bits);
        const int octave = static_cast<int>((bits >> 52) & 0x7ff) - 1023;
        if (octave >= octaves_) return false;
        const double pos = static_cast<double>(bits & 0xfffffffffffffULL) * 0x1p-52 * per_octave_;
        const int j = static_cast<int>(pos);
        const double s = pos - j;
        const double* p = table.data() + static_cast<std::size_t>(octave) * (per_octave_ + 3) + j;
        const double sm = s - 1.0;
        const double s2 = s - 2.0;
        const double sp = s + 1.0;
        value = (-s * sm * s2 * p[0] + sp * s * sm * p[3]) * (1.0 / 6.0) +
                (sp * sm * s2 * p[1] - sp * s * s2 * p[2]) * 0.5;
        return true;
    }
    double exact_force_over_r(double q) const;
    double exact_energy(double q) const;

    PotentialSpec spec_;
    double q_min_;
    double inv_q_min_;
    double q_max_;
    int per_octave_;
    int octaves_;
    std::vector<double> force_;
    std::vector<double> energy_;
};

/// Distance beyond which the potential's force is below double precision
/// relevance; used as the table's upper end.
double potential_range(const PotentialSpec& spec);

/// Particle count up to which pair coefficients are evaluated once per pair
/// and cached; larger systems evaluate every ordered pair.
inline constexpr std::size_t kPairCacheLimit = 3000;

class Simulator {
public:
    explicit Simulator(SimConfig config);

    const SimConfig& config() const { return config_; }

    ParticleState initial_state() const;

    /// Velocity field -(1/N) sum_{j != i} grad W(x_i - x_j), N x n.
    void forces(const ParticleState& state, std::vector<double>& out) const;
    /// (1 / 2N^2) sum_{i != j} W(x_i - x_j).
    double interaction_energy(const ParticleState& state) const;

    /// One step of the configured model; returns the largest displacement.
    double step(ParticleState& state);
    double step_first_order(ParticleState& state);
    double step_second_order(ParticleState& state);

    RunResult run(ParticleState state);

private:
    double pair_coefficient(double q) const;
    template <int N_DIM>
    void cached_forces(const ParticleState& state, std::vector<double>& out) const;
    Diagnostics diagnose(const ParticleState& state, long step, double displacement) const;
    void check_finite(const ParticleState& state) const;

    SimConfig config_;
    double min_sep_;
    PairTable table_;
    std::vector<double> force_buffer_;
    mutable std::vector<double> pair_buffer_;
};

/// Exact speed after time t of v' = alpha v - beta |v|^2 v starting at s0.
double rayleigh_speed(double s0, double alpha, double beta, double t);

ParticleState step_first_order(const ParticleState& state, const SimConfig& config);
ParticleState step_second_order(const ParticleState& state, const SimConfig& config);
RunResult run(const SimConfig& config);

struct RadialHistogram {
    std::vector<double> bin_edges;
    std::vector<double> density;
    std::vector<double> center;
    int n = 3;
    double max_radius = 0.0;

    double total_mass() const;
    std::string to_csv() const;
};

/// Histogram about the center of mass on `bins` equal-width shells up to the
/// outermost particle (or `r_max` when positive); particles carry mass 1/N.
RadialHistogram radial_histogram(const ParticleState& state, int bins, double r_max = 0.0);

struct ProfileComparison {
    double l1_error = 0.0;
    double support_error = 0.0;
};

/// L1 distance in R^n between the piecewise-constant histogram density and
/// the analytic profile over the histogram range [0, max particle radius],
/// and |r_max - R*| / R*.
ProfileComparison compare_profile(const RadialHistogram& hist, const FlockProfile& profile);

std::string state_to_csv(const ParticleState& state);
ParticleState state_from_csv(std::string_view text, int n, bool with_velocities);
std::string config_to_json(const SimConfig& config);
SimConfig config_from_json(std::string_view text);
std::string diagnostics_to_jsonl(const std::vector<Diagnostics>& trajectory);

const char* to_string(Model model);

}  // namespace flockdyn
