#include "flockdyn/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include <json.hpp>

#include "flockdyn/error.hpp"
#include "flockdyn/geometry.hpp"
#include "flockdyn/io.hpp"
#include "flockdyn/numerics.hpp"
#include "flockdyn/parallel.hpp"

namespace flockdyn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double repulsion_length(const PotentialSpec& spec) {
    return std::visit(Overloaded{
                          [](const QuasiMorse& q) { return q.params.ell / q.params.k; },
                          [](const Morse& m) { return m.ell_R; },
                          [](const MorseLike& m) { return m.ell; },
                      },
                      spec);
}

int potential_dimension(const PotentialSpec& spec) {
    if (const auto* q = std::get_if<QuasiMorse>(&spec)) return q->params.n;
    return 0;
}

template <int N_DIM, class F>
void accumulate_forces(const ParticleState& state, std::size_t i, const F& coef, double* out) {
    const int count = state.N;
    const double* xi = state.x(static_cast<int>(i));
    double acc[N_DIM] = {};
    for (int j = 0; j < count; ++j) {
        if (static_cast<std::size_t>(j) == i) continue;
        const double* xj = state.x(j);
        double d[N_DIM];
        double q = 0.0;
        for (int c = 0; c < N_DIM; ++c) {
            d[c] = xi[c] - xj[c];
            q += d[c] * d[c];
        }
        if (q == 0.0) continue;
        const double w = coef(q);
        for (int c = 0; c < N_DIM; ++c) acc[c] += w * d[c];
    }
    for (int c = 0; c < N_DIM; ++c) out[c] = -acc[c] / count;
}

}  // namespace

void SimConfig::validate() const {
    flockdyn::validate(potential);
    if (dimension != 2 && dimension != 3) throw Error(ErrorCode::InvalidConfig, "dimension must be 2 or 3");
    const int pn = potential_dimension(potential);
    if (pn != 0 && pn != dimension) {
        throw Error(ErrorCode::InvalidConfig, "potential dimension differs from simulation dimension");
    }
    if (init.kind != InitKind::FromFile && N < 1) throw Error(ErrorCode::InvalidConfig, "N must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidConfig, "dt must be positive");
    if (steps < 0) throw Error(ErrorCode::InvalidConfig, "steps must be non-negative");
    if (alpha < 0.0 || beta < 0.0) throw Error(ErrorCode::InvalidConfig, "alpha and beta must be non-negative");
    if (model == Model::SecondOrder && beta == 0.0 && alpha > 0.0) {
        throw Error(ErrorCode::InvalidConfig, "beta must be positive when alpha is");
    }
    if (!initial_velocity.empty() && static_cast<int>(initial_velocity.size()) != dimension) {
        throw Error(ErrorCode::InvalidConfig, "initial velocity needs one entry per dimension");
    }
    if (velocity_noise < 0.0) throw Error(ErrorCode::InvalidConfig, "velocity noise must be non-negative");
    if (init.kind == InitKind::UniformBall && !(init.radius > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "initial radius must be positive");
    }
    if (init.kind == InitKind::Gaussian && !(init.sigma > 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "initial sigma must be positive");
    }
    if (init.kind == InitKind::FromFile && init.path.empty()) {
        throw Error(ErrorCode::InvalidConfig, "initial state file missing");
    }
    if (!(blowup_bound > 0.0)) throw Error(ErrorCode::InvalidConfig, "blowup bound must be positive");
    if (diagnostic_stride < 1) throw Error(ErrorCode::InvalidConfig, "diagnostic stride must be positive");
    if (table_resolution < 4) throw Error(ErrorCode::InvalidConfig, "table resolution must be at least 4");
    if (!(convergence_tol > 0.0) || convergence_window < 1) {
        throw Error(ErrorCode::InvalidConfig, "convergence criteria must be positive");
    }
}

double SimConfig::effective_min_separation() const {
    return min_separation > 0.0 ? min_separation : 1e-6 * repulsion_length(potential);
}

std::vector<double> ParticleState::center_of_mass() const {
    std::vector<double> c(n, 0.0);
    for (int i = 0; i < N; ++i) {
        for (int d = 0; d < n; ++d) c[d] += x(i)[d];
    }
    for (double& v : c) v /= std::max(N, 1);
    return c;
}

double ParticleState::max_radius_about_center() const {
    const std::vector<double> c = center_of_mass();
    double best = 0.0;
    for (int i = 0; i < N; ++i) {
        double q = 0.0;
        for (int d = 0; d < n; ++d) q += (x(i)[d] - c[d]) * (x(i)[d] - c[d]);
        best = std::max(best, q);
    }
    return std::sqrt(best);
}

double potential_range(const PotentialSpec& spec) {
    return std::visit(Overloaded{
                          [](const QuasiMorse& q) { return 60.0 * std::max(1.0, q.params.ell) / q.params.k; },
                          [](const Morse& m) { return 60.0 * std::max(m.ell_R, m.ell_A); },
                          [](const MorseLike& m) {
                              return std::pow(60.0 * m.p, 1.0 / m.p) * std::max(1.0, m.ell);
                          },
                      },
                      spec);
}

PairTable::PairTable(const PotentialSpec& spec, double min_separation, double max_distance, int per_octave)
    : spec_(spec), q_min_(min_separation * min_separation), inv_q_min_(1.0 / q_min_), per_octave_(per_octave) {
    if (!(min_separation > 0.0) || !(max_distance > min_separation) || per_octave < 4) {
        throw Error(ErrorCode::InvalidConfig, "invalid pair table range");
    }
    octaves_ = std::max(1, static_cast<int>(std::ceil(std::log2(max_distance * max_distance / q_min_))));
    q_max_ = std::ldexp(q_min_, octaves_);
    const int stride = per_octave_ + 3;
    force_.resize(static_cast<std::size_t>(octaves_) * stride);
    energy_.resize(force_.size());
    for (int o = 0; o < octaves_; ++o) {
        const double base = std::ldexp(q_min_, o);
        for (int j = -1; j <= per_octave_ + 1; ++j) {
            const double q = base * (1.0 + static_cast<double>(j) / per_octave_);
            const double r = std::sqrt(q);
            const std::size_t slot = static_cast<std::size_t>(o) * stride + (j + 1);
            force_[slot] = potential_force_magnitude(spec_, r) / r;
            energy_[slot] = potential_value(spec_, r);
        }
    }
}

double PairTable::exact_force_over_r(double q) const {
    const double r = std::sqrt(q);
    return potential_force_magnitude(spec_, r) / r;
}

double PairTable::exact_energy(double q) const { return potential_value(spec_, std::sqrt(q)); }

Simulator::Simulator(SimConfig config)
    : config_((config.validate(), std::move(config))),
      min_sep_(config_.effective_min_separation()),
      table_(config_.potential, min_sep_, std::max(potential_range(config_.potential), 2.0 * min_sep_),
             config_.table_resolution) {}

double Simulator::pair_coefficient(double q) const {
    if (q < table_.q_min()) {
        return potential_force_magnitude(config_.potential, min_sep_) / std::sqrt(q);
    }
    if (config_.force_mode == ForceMode::Exact) {
        const double r = std::sqrt(q);
        return potential_force_magnitude(config_.potential, r) / r;
    }
    return table_.force_over_r(q);
}

ParticleState Simulator::initial_state() const {
    ParticleState s;
    const int n = config_.dimension;
    s.n = n;
    std::mt19937_64 rng(config_.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    switch (config_.init.kind) {
    case InitKind::UniformBall:
    case InitKind::Gaussian: {
        s.N = config_.N;
        s.positions.resize(static_cast<std::size_t>(s.N) * n);
        for (int i = 0; i < s.N; ++i) {
            double* xi = s.x(i);
            double q = 0.0;
            for (int d = 0; d < n; ++d) {
                xi[d] = normal(rng);
                q += xi[d] * xi[d];
            }
            if (config_.init.kind == InitKind::Gaussian) {
                for (int d = 0; d < n; ++d) xi[d] *= config_.init.sigma;
            } else {
                const double radius = config_.init.radius * std::pow(uniform(rng), 1.0 / n) / std::sqrt(q);
                for (int d = 0; d < n; ++d) xi[d] *= radius;
            }
        }
        break;
    }
    case InitKind::FromFile: {
        const std::string text = io::read_file(config_.init.path);
        std::istringstream lines(text);
        std::string line;
        int columns = 0;
        while (std::getline(lines, line)) {
            if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
            columns = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
            break;
        }
        if (columns != n && columns != 2 * n) {
            throw Error(ErrorCode::InvalidConfig, "initial state file must have n or 2n columns");
        }
        s = state_from_csv(text, n, columns == 2 * n);
        if (config_.N > 0 && s.N != config_.N) {
            throw Error(ErrorCode::InvalidConfig, "initial state file particle count differs from N");
        }
        break;
    }
    }
    if (config_.model == Model::SecondOrder && s.velocities.empty()) {
        s.velocities.assign(s.positions.size(), 0.0);
        for (int i = 0; i < s.N; ++i) {
            for (int d = 0; d < n; ++d) {
                double v = config_.initial_velocity.empty() ? 0.0 : config_.initial_velocity[d];
                if (config_.velocity_noise > 0.0) v += config_.velocity_noise * normal(rng);
                s.velocities[static_cast<std::size_t>(i) * n + d] = v;
            }
        }
    }
    if (config_.model == Model::FirstOrder) s.velocities.clear();
    return s;
}

void Simulator::forces(const ParticleState& state, std::vector<double>& out) const {
    if (state.n != config_.dimension) throw Error(ErrorCode::InvalidConfig, "state dimension mismatch");
    out.assign(state.positions.size(), 0.0);
    const auto coef = [this](double q) { return pair_coefficient(q); };
    const std::size_t count = static_cast<std::size_t>(state.N);
    if (count > kPairCacheLimit) {
        parallel_for(count, config_.threads, [&](std::size_t i) {
            double* slot = out.data() + i * state.n;
            if (state.n == 2) {
                accumulate_forces<2>(state, i, coef, slot);
            } else {
                accumulate_forces<3>(state, i, coef, slot);
            }
        });
        return;
    }
    if (state.n == 2) {
        cached_forces<2>(state, out);
    } else {
        cached_forces<3>(state, out);
    }
}

template <int N_DIM>
void Simulator::cached_forces(const ParticleState& state, std::vector<double>& out) const {
    const std::size_t count = static_cast<std::size_t>(state.N);
    auto row = [count](std::size_t i) { return i * count - i * (i + 1) / 2; };
    pair_buffer_.resize(count * (count - 1) / 2);
    // Rows i and count-1-i share a task so that tasks carry equal work.
    auto fill_row = [&](std::size_t i) {
        const double* xi = state.x(static_cast<int>(i));
        double* c = pair_buffer_.data() + row(i);
        for (std::size_t j = i + 1; j < count; ++j) {
            const double* xj = state.x(static_cast<int>(j));
            double q = 0.0;
            for (int d = 0; d < N_DIM; ++d) q += (xi[d] - xj[d]) * (xi[d] - xj[d]);
            c[j - i - 1] = q == 0.0 ? 0.0 : pair_coefficient(q);
        }
    };
    parallel_for((count + 1) / 2, config_.threads, [&](std::size_t t) {
        fill_row(t);
        if (count - 1 - t != t) fill_row(count - 1 - t);
    });
    // Each particle sums its partners in ascending index order, exactly as
    // the uncached loop does.
    const std::size_t blocks = static_cast<std::size_t>(std::max(1, resolve_thread_count(config_.threads)));
    parallel_for(blocks, config_.threads, [&](std::size_t b) {
        const std::size_t lo = count * b / blocks;
        const std::size_t hi = count * (b + 1) / blocks;
        if (lo == hi) return;
        std::vector<double> acc((hi - lo) * N_DIM, 0.0);
        for (std::size_t j = 0; j + 1 < hi; ++j) {
            const double* xj = state.x(static_cast<int>(j));
            const double* c = pair_buffer_.data() + row(j);
            for (std::size_t i = std::max(lo, j + 1); i < hi; ++i) {
                const double w = c[i - j - 1];
                const double* xi = state.x(static_cast<int>(i));
                double* a = acc.data() + (i - lo) * N_DIM;
                for (int d = 0; d < N_DIM; ++d) a[d] += w * (xi[d] - xj[d]);
            }
        }
        for (std::size_t i = lo; i < hi; ++i) {
            const double* xi = state.x(static_cast<int>(i));
            const double* c = pair_buffer_.data() + row(i);
            double* a = acc.data() + (i - lo) * N_DIM;
            for (std::size_t j = i + 1; j < count; ++j) {
                const double w = c[j - i - 1];
                const double* xj = state.x(static_cast<int>(j));
                for (int d = 0; d < N_DIM; ++d) a[d] += w * (xi[d] - xj[d]);
            }
            for (int d = 0; d < N_DIM; ++d) out[i * N_DIM + d] = -a[d] / state.N;
        }
    });
}

double Simulator::interaction_energy(const ParticleState& state) const {
    const std::size_t count = static_cast<std::size_t>(state.N);
    std::vector<double> partial(count, 0.0);
    const double q_floor = table_.q_min();
    auto row_sum = [&](std::size_t i) {
        const double* xi = state.x(static_cast<int>(i));
        double sum = 0.0;
        for (std::size_t j = i + 1; j < count; ++j) {
            const double* xj = state.x(static_cast<int>(j));
            double q = 0.0;
            for (int d = 0; d < state.n; ++d) q += (xi[d] - xj[d]) * (xi[d] - xj[d]);
            q = std::max(q, q_floor);
            sum += config_.force_mode == ForceMode::Exact ? potential_value(config_.potential, std::sqrt(q))
                                                         : table_.energy(q);
        }
        partial[i] = sum;
    };
    parallel_for((count + 1) / 2, config_.threads, [&](std::size_t t) {
        row_sum(t);
        if (count - 1 - t != t) row_sum(count - 1 - t);
    });
    double total = 0.0;
    for (double v : partial) total += v;
    const double n = static_cast<double>(count);
    return total / (n * n);
}

double rayleigh_speed(double s0, double alpha, double beta, double t) {
    if (s0 == 0.0) return 0.0;
    const double s2 = s0 * s0;
    if (alpha == 0.0) return s0 / std::sqrt(1.0 + 2.0 * beta * s2 * t);
    const double x = 2.0 * alpha * t;
    if (x > 700.0) return std::sqrt(alpha / beta);
    return std::sqrt(alpha * s2 * std::exp(x) / (alpha + beta * s2 * std::expm1(x)));
}

void Simulator::check_finite(const ParticleState& state) const {
    auto bad = [&](const std::vector<double>& v) {
        return std::any_of(v.begin(), v.end(),
                           [&](double x) { return !std::isfinite(x) || std::abs(x) > config_.blowup_bound; });
    };
    if (bad(state.positions) || bad(state.velocities)) {
        throw Error(ErrorCode::NumericalBlowup,
                    "state left the bounded region at t = " + io::format_double(state.time));
    }
}

double Simulator::step_first_order(ParticleState& state) {
    forces(state, force_buffer_);
    double largest = 0.0;
    for (int i = 0; i < state.N; ++i) {
        double q = 0.0;
        for (int d = 0; d < state.n; ++d) {
            const double dx = config_.dt * force_buffer_[static_cast<std::size_t>(i) * state.n + d];
            state.x(i)[d] += dx;
            q += dx * dx;
        }
        largest = std::max(largest, q);
    }
    state.time += config_.dt;
    check_finite(state);
    return std::sqrt(largest);
}

double Simulator::step_second_order(ParticleState& state) {
    const int n = state.n;
    const double dt = config_.dt;
    if (state.velocities.size() != state.positions.size()) state.velocities.assign(state.positions.size(), 0.0);
    auto self_propel = [&](double t) {
        for (int i = 0; i < state.N; ++i) {
            double* v = state.velocities.data() + static_cast<std::size_t>(i) * n;
            double s = 0.0;
            for (int d = 0; d < n; ++d) s += v[d] * v[d];
            s = std::sqrt(s);
            if (s == 0.0) continue;
            const double factor = rayleigh_speed(s, config_.alpha, config_.beta, t) / s;
            for (int d = 0; d < n; ++d) v[d] *= factor;
        }
    };
    auto kick = [&](double t) {
        for (std::size_t c = 0; c < state.velocities.size(); ++c) state.velocities[c] += t * force_buffer_[c];
    };
    self_propel(0.5 * dt);
    forces(state, force_buffer_);
    kick(0.5 * dt);
    double largest = 0.0;
    for (int i = 0; i < state.N; ++i) {
        double q = 0.0;
        for (int d = 0; d < n; ++d) {
            const double dx = dt * state.velocities[static_cast<std::size_t>(i) * n + d];
            state.x(i)[d] += dx;
            q += dx * dx;
        }
        largest = std::max(largest, q);
    }
    forces(state, force_buffer_);
    kick(0.5 * dt);
    self_propel(0.5 * dt);
    state.time += dt;
    check_finite(state);
    return std::sqrt(largest);
}

double Simulator::step(ParticleState& state) {
    return config_.model == Model::FirstOrder ? step_first_order(state) : step_second_order(state);
}

Diagnostics Simulator::diagnose(const ParticleState& state, long step, double displacement) const {
    Diagnostics d;
    d.step = step;
    d.time = state.time;
    double kinetic = 0.0;
    for (double v : state.velocities) kinetic += v * v;
    d.kinetic = kinetic / (2.0 * std::max(state.N, 1));
    d.potential = interaction_energy(state);
    d.max_displacement = displacement;
    d.radius = state.max_radius_about_center();
    d.center = state.center_of_mass();
    return d;
}

RunResult Simulator::run(ParticleState state) {
    RunResult result;
    result.trajectory.push_back(diagnose(state, 0, 0.0));
    int quiet = 0;
    double displacement = 0.0;
    long s = 0;
    while (s < config_.steps) {
        displacement = step(state);
        ++s;
        if (config_.model == Model::FirstOrder) {
            const double radius = std::max(state.max_radius_about_center(), min_sep_);
            quiet = displacement < config_.convergence_tol * radius ? quiet + 1 : 0;
            if (quiet >= config_.convergence_window) result.converged = true;
        }
        const bool stop = result.converged && config_.stop_at_convergence;
        if (s % config_.diagnostic_stride == 0 || stop || s == config_.steps) {
            result.trajectory.push_back(diagnose(state, s, displacement));
        }
        if (stop) break;
    }
    result.steps_taken = s;
    result.final_state = std::move(state);
    return result;
}

ParticleState step_first_order(const ParticleState& state, const SimConfig& config) {
    SimConfig c = config;
    c.model = Model::FirstOrder;
    Simulator sim(c);
    ParticleState next = state;
    sim.step_first_order(next);
    return next;
}

ParticleState step_second_order(const ParticleState& state, const SimConfig& config) {
    SimConfig c = config;
    c.model = Model::SecondOrder;
    Simulator sim(c);
    ParticleState next = state;
    sim.step_second_order(next);
    return next;
}

RunResult run(const SimConfig& config) {
    Simulator sim(config);
    return sim.run(sim.initial_state());
}

double RadialHistogram::total_mass() const {
    double total = 0.0;
    for (std::size_t b = 0; b < density.size(); ++b) {
        total += density[b] * shell_volume(n, bin_edges[b], bin_edges[b + 1]);
    }
    return total;
}

std::string RadialHistogram::to_csv() const {
    std::string out = "r_lo,r_hi,density\n";
    for (std::size_t b = 0; b < density.size(); ++b) {
        out += io::csv_row({bin_edges[b], bin_edges[b + 1], density[b]});
    }
    return out;
}

RadialHistogram radial_histogram(const ParticleState& state, int bins, double r_max) {
    if (bins < 1) throw Error(ErrorCode::InvalidConfig, "histogram needs at least one bin");
    if (state.N < 1) throw Error(ErrorCode::InvalidConfig, "histogram of an empty state");
    RadialHistogram h;
    h.n = state.n;
    h.center = state.center_of_mass();
    std::vector<double> radii(state.N);
    for (int i = 0; i < state.N; ++i) {
        double q = 0.0;
        for (int d = 0; d < state.n; ++d) q += (state.x(i)[d] - h.center[d]) * (state.x(i)[d] - h.center[d]);
        radii[i] = std::sqrt(q);
    }
    h.max_radius = *std::max_element(radii.begin(), radii.end());
    const double top = r_max > 0.0 ? r_max : h.max_radius;
    if (!(top > 0.0)) throw Error(ErrorCode::DomainError, "all particles coincide");
    h.bin_edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) h.bin_edges[b] = top * b / bins;
    std::vector<long> counts(bins, 0);
    for (double r : radii) {
        if (r > top) continue;
        counts[std::min(bins - 1, static_cast<int>(r / top * bins))] += 1;
    }
    h.density.resize(bins);
    for (int b = 0; b < bins; ++b) {
        h.density[b] = counts[b] / static_cast<double>(state.N) / shell_volume(state.n, h.bin_edges[b], h.bin_edges[b + 1]);
    }
    return h;
}

ProfileComparison compare_profile(const RadialHistogram& hist, const FlockProfile& profile) {
    if (hist.n != profile.params.n) throw Error(ErrorCode::InvalidConfig, "histogram and profile dimensions differ");
    const RadialDensity rho = profile.density();
    const int n = hist.n;
    const double area = unit_sphere_area(n);
    const numerics::QuadratureOptions opts{1e-12, 1e-9, 30};
    auto piece = [&](double lo, double hi, double level) {
        if (!(hi > lo)) return 0.0;
        auto f = [&](double r) { return std::abs(level - rho(r)) * area * std::pow(r, n - 1); };
        double total = 0.0;
        const double R = profile.R_star;
        if (lo < R && R < hi) {
            total += numerics::integrate(f, lo, R, opts) + numerics::integrate(f, R, hi, opts);
        } else {
            total += numerics::integrate(f, lo, hi, opts);
        }
        return total;
    };
    ProfileComparison out;
    for (std::size_t b = 0; b < hist.density.size(); ++b) {
        out.l1_error += piece(hist.bin_edges[b], hist.bin_edges[b + 1], hist.density[b]);
    }
    out.support_error = std::abs(hist.max_radius - profile.R_star) / profile.R_star;
    return out;
}

std::string state_to_csv(const ParticleState& state) {
    std::string out;
    for (int d = 0; d < state.n; ++d) out += (d ? ",x" : "x") + std::to_string(d + 1);
    const bool with_v = !state.velocities.empty();
    if (with_v) {
        for (int d = 0; d < state.n; ++d) out += ",v" + std::to_string(d + 1);
    }
    out += "\n";
    std::vector<double> row;
    for (int i = 0; i < state.N; ++i) {
        row.assign(state.x(i), state.x(i) + state.n);
        if (with_v) {
            const double* v = state.velocities.data() + static_cast<std::size_t>(i) * state.n;
            row.insert(row.end(), v, v + state.n);
        }
        out += io::csv_row(row);
    }
    return out;
}

ParticleState state_from_csv(std::string_view text, int n, bool with_velocities) {
    if (n != 2 && n != 3) throw Error(ErrorCode::InvalidConfig, "state dimension must be 2 or 3");
    ParticleState s;
    s.n = n;
    const int columns = with_velocities ? 2 * n : n;
    std::istringstream lines{std::string(text)};
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        std::vector<double> values;
        const char* p = line.c_str();
        while (*p) {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end == p) throw Error(ErrorCode::Io, "malformed state row: " + line);
            values.push_back(v);
            p = end;
            while (*p == ' ' || *p == '\t') ++p;
            if (*p == ',') ++p;
            else if (*p) throw Error(ErrorCode::Io, "malformed state row: " + line);
        }
        if (static_cast<int>(values.size()) != columns) {
            throw Error(ErrorCode::Io, "state row has " + std::to_string(values.size()) + " columns, expected " +
                                           std::to_string(columns));
        }
        s.positions.insert(s.positions.end(), values.begin(), values.begin() + n);
        if (with_velocities) s.velocities.insert(s.velocities.end(), values.begin() + n, values.end());
        ++s.N;
    }
    return s;
}

const char* to_string(Model model) {
    return model == Model::FirstOrder ? "first_order" : "second_order";
}

std::string config_to_json(const SimConfig& c) {
    nlohmann::ordered_json j;
    j["model"] = to_string(c.model);
    j["N"] = c.N;
    j["dimension"] = c.dimension;
    j["dt"] = c.dt;
    j["steps"] = c.steps;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["potential"] = nlohmann::json::parse(potential_to_json(c.potential));
    j["seed"] = c.seed;
    nlohmann::ordered_json init;
    switch (c.init.kind) {
    case InitKind::UniformBall:
        init["kind"] = "uniform_ball";
        init["radius"] = c.init.radius;
        break;
    case InitKind::Gaussian:
        init["kind"] = "gaussian";
        init["sigma"] = c.init.sigma;
        break;
    case InitKind::FromFile:
        init["kind"] = "file";
        init["path"] = c.init.path;
        break;
    }
    j["init"] = init;
    j["min_separation"] = c.effective_min_separation();
    j["initial_velocity"] = c.initial_velocity;
    j["velocity_noise"] = c.velocity_noise;
    j["blowup_bound"] = c.blowup_bound;
    j["diagnostic_stride"] = c.diagnostic_stride;
    j["threads"] = c.threads;
    j["force_mode"] = c.force_mode == ForceMode::Tabulated ? "tabulated" : "exact";
    j["table_resolution"] = c.table_resolution;
    j["stop_at_convergence"] = c.stop_at_convergence;
    j["convergence_tol"] = c.convergence_tol;
    j["convergence_window"] = c.convergence_window;
    return j.dump(2);
}

SimConfig config_from_json(std::string_view text) {
    SimConfig c;
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        if (j.contains("model")) {
            const std::string m = j.at("model").get<std::string>();
            if (m == "first_order") c.model = Model::FirstOrder;
            else if (m == "second_order") c.model = Model::SecondOrder;
            else throw Error(ErrorCode::InvalidConfig, "unknown model " + m);
        }
        c.N = j.value("N", c.N);
        c.dimension = j.value("dimension", c.dimension);
        c.dt = j.value("dt", c.dt);
        c.steps = j.value("steps", c.steps);
        c.alpha = j.value("alpha", c.alpha);
        c.beta = j.value("beta", c.beta);
        if (j.contains("potential")) c.potential = potential_from_json(j.at("potential").dump());
        c.seed = j.value("seed", c.seed);
        if (j.contains("init")) {
            const auto& init = j.at("init");
            const std::string kind = init.at("kind").get<std::string>();
            if (kind == "uniform_ball") {
                c.init.kind = InitKind::UniformBall;
                c.init.radius = init.value("radius", c.init.radius);
            } else if (kind == "gaussian") {
                c.init.kind = InitKind::Gaussian;
                c.init.sigma = init.value("sigma", c.init.sigma);
            } else if (kind == "file") {
                c.init.kind = InitKind::FromFile;
                c.init.path = init.at("path").get<std::string>();
            } else {
                throw Error(ErrorCode::InvalidConfig, "unknown init kind " + kind);
            }
        }
        c.min_separation = j.value("min_separation", c.min_separation);
        if (j.contains("initial_velocity")) c.initial_velocity = j.at("initial_velocity").get<std::vector<double>>();
        c.velocity_noise = j.value("velocity_noise", c.velocity_noise);
        c.blowup_bound = j.value("blowup_bound", c.blowup_bound);
        c.diagnostic_stride = j.value("diagnostic_stride", c.diagnostic_stride);
        c.threads = j.value("threads", c.threads);
        if (j.contains("force_mode")) {
            const std::string f = j.at("force_mode").get<std::string>();
            if (f == "tabulated") c.force_mode = ForceMode::Tabulated;
            else if (f == "exact") c.force_mode = ForceMode::Exact;
            else throw Error(ErrorCode::InvalidConfig, "unknown force mode " + f);
        }
        c.table_resolution = j.value("table_resolution", c.table_resolution);
        c.stop_at_convergence = j.value("stop_at_convergence", c.stop_at_convergence);
        c.convergence_tol = j.value("convergence_tol", c.convergence_tol);
        c.convergence_window = j.value("convergence_window", c.convergence_window);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("simulation config: ") + e.what());
    }
    c.validate();
    return c;
}

std::string diagnostics_to_jsonl(const std::vector<Diagnostics>& trajectory) {
    std::string out;
    for (const Diagnostics& d : trajectory) {
        nlohmann::ordered_json j;
        j["step"] = d.step;
        j["time"] = d.time;
        j["kinetic"] = d.kinetic;
        j["potential"] = d.potential;
        j["max_displacement"] = d.max_displacement;
        j["radius"] = d.radius;
        j["center"] = d.center;
        out += j.dump() + "\n";
    }
    return out;
}

}  // namespace flockdyn
