#include "flockdyn/potentials.hpp"

#include <cmath>
#include <string>

#include <json.hpp>

#include "flockdyn/error.hpp"
#include "flockdyn/numerics.hpp"
#include "flockdyn/specfun.hpp"

namespace flockdyn {

namespace {

void require_positive_r(double r) {
    if (!(r > 0.0)) throw Error(ErrorCode::DomainError, "potential evaluated at r <= 0");
}

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double morse_like_v(double p, double r) { return -std::exp(-std::pow(r, p) / p); }

}  // namespace

void ModelParams::validate() const {
    if (n != 2 && n != 3) throw Error(ErrorCode::InvalidConfig, "dimension must be 2 or 3");
    if (!(C > 0.0) || !(ell > 0.0) || !(k > 0.0) || !std::isfinite(C) || !std::isfinite(ell) ||
        !std::isfinite(k)) {
        throw Error(ErrorCode::InvalidConfig, "C, ell and k must be positive and finite");
    }
}

double ModelParams::c_ell_n() const { return C * std::pow(ell, n); }

const char* to_string(Region region) {
    switch (region) {
    case Region::RegionI: return "I";
    case Region::RegionII: return "II";
    case Region::Separatrix: return "separatrix";
    case Region::Outside: return "outside";
    }
    return "?";
}

const char* to_string(Sign sign) {
    switch (sign) {
    case Sign::Negative: return "negative";
    case Sign::Zero: return "zero";
    case Sign::Positive: return "positive";
    }
    return "?";
}

void validate(const PotentialSpec& spec) {
    std::visit(Overloaded{
                   [](const QuasiMorse& q) { q.params.validate(); },
                   [](const Morse& m) {
                       if (!(m.C_R > 0 && m.C_A > 0 && m.ell_R > 0 && m.ell_A > 0)) {
                           throw Error(ErrorCode::InvalidConfig, "Morse strengths and scales must be positive");
                       }
                   },
                   [](const MorseLike& m) {
                       if (!(m.p > 0 && m.C > 0 && m.ell > 0)) {
                           throw Error(ErrorCode::InvalidConfig, "Morse-like p, C and ell must be positive");
                       }
                   },
               },
               spec);
}

double quasi_morse_u(const ModelParams& params, double r) {
    require_positive_r(r);
    const int n = params.n;
    const BesselOrder nu = BesselOrder::half_dim(n, -1);
    const double v = nu.value();
    const double pref = std::pow(2.0 * kPi, -0.5 * n) * std::pow(r, -v) * std::pow(params.k, v);
    const double kr = params.k * r;
    const double repulsive = params.C * std::pow(params.ell, v) * bessel_k(nu, kr / params.ell);
    return pref * (repulsive - bessel_k(nu, kr));
}

double quasi_morse_du(const ModelParams& params, double r) {
    require_positive_r(r);
    const int n = params.n;
    const BesselOrder nu = BesselOrder::half_dim(n, -1);
    const double v = nu.value();
    const double k = params.k;
    const double pref = std::pow(2.0 * kPi, -0.5 * n) * std::pow(r, -v) * std::pow(k, v);
    const double repulsive =
        params.C * std::pow(params.ell, v) * (k / params.ell) * bessel_k(nu + 1, k * r / params.ell);
    return pref * (k * bessel_k(nu + 1, k * r) - repulsive);
}

double potential_value(const PotentialSpec& spec, double r) {
    require_positive_r(r);
    return std::visit(Overloaded{
                          [r](const QuasiMorse& q) { return quasi_morse_u(q.params, r); },
                          [r](const Morse& m) {
                              return m.C_R * std::exp(-r / m.ell_R) - m.C_A * std::exp(-r / m.ell_A);
                          },
                          [r](const MorseLike& m) {
                              return morse_like_v(m.p, r) - m.C * morse_like_v(m.p, r / m.ell);
                          },
                      },
                      spec);
}

double potential_force_magnitude(const PotentialSpec& spec, double r) {
    require_positive_r(r);
    return std::visit(
        Overloaded{
            [r](const QuasiMorse& q) { return quasi_morse_du(q.params, r); },
            [r](const Morse& m) {
                return -m.C_R / m.ell_R * std::exp(-r / m.ell_R) + m.C_A / m.ell_A * std::exp(-r / m.ell_A);
            },
            [r](const MorseLike& m) {
                // d/dr[-exp(-r^p/p)] = r^{p-1} exp(-r^p/p)
                const double s = r / m.ell;
                const double attractive = std::pow(r, m.p - 1.0) * std::exp(-std::pow(r, m.p) / m.p);
                const double repulsive =
                    m.C / m.ell * std::pow(s, m.p - 1.0) * std::exp(-std::pow(s, m.p) / m.p);
                return attractive - repulsive;
            },
        },
        spec);
}

double potential_minimum_radius(const PotentialSpec& spec) {
    auto du = [&spec](double r) { return potential_force_magnitude(spec, r); };
    const int samples = 4000;
    const double lo = std::log(1e-4);
    const double hi = std::log(1e3);
    double prev_r = std::exp(lo);
    double prev = du(prev_r);
    for (int i = 1; i <= samples; ++i) {
        const double r = std::exp(lo + (hi - lo) * i / samples);
        const double cur = du(r);
        if (prev < 0.0 && cur >= 0.0) return numerics::refine_root(du, prev_r, r, 1e-15);
        prev = cur;
        prev_r = r;
    }
    throw Error(ErrorCode::NoRoot, "potential has no local minimum in [1e-4, 1e3]");
}

Aggregate aggregate_param(const ModelParams& params) {
    params.validate();
    const double cln = params.c_ell_n();
    const double ell2 = params.ell * params.ell;
    const double k2 = params.k * params.k;
    const double denominator = cln - ell2;
    if (std::abs(denominator) < kDenominatorTolerance * k2) {
        throw Error(ErrorCode::DegenerateDenominator,
                    "C ell^n equals ell^2: the aggregate parameter A is undefined");
    }
    if (std::abs(cln - 1.0) <= kAggregateZeroTolerance) return {0.0, 0.0};
    const double A = k2 * (1.0 - cln) / denominator;
    return {A, std::sqrt(std::abs(A))};
}

RegimeClass classify(const ModelParams& params) {
    params.validate();
    RegimeClass out;
    const double cln = params.c_ell_n();
    out.biologically_relevant = params.C * std::pow(params.ell, params.n - 2) > 1.0 && params.ell < 1.0;
    out.h_stable = cln - 1.0 > kAggregateZeroTolerance;
    const bool on_separatrix = std::abs(cln - 1.0) <= kAggregateZeroTolerance;
    if (out.biologically_relevant) {
        out.region = on_separatrix ? Region::Separatrix : (cln < 1.0 ? Region::RegionI : Region::RegionII);
    }
    if (on_separatrix) {
        out.A_sign = Sign::Zero;
    } else {
        const double numerator = 1.0 - cln;
        const double denominator = cln - params.ell * params.ell;
        const double product = denominator == 0.0 ? numerator : numerator * denominator;
        out.A_sign = product > 0.0 ? Sign::Positive : Sign::Negative;
    }
    return out;
}

RegimeClass classify(const MorseLike& spec, int n) {
    RegimeClass out;
    const double cln = spec.C * std::pow(spec.ell, n);
    out.biologically_relevant = spec.ell < 1.0 && spec.C > std::pow(spec.ell, spec.p);
    out.h_stable = cln - 1.0 > kAggregateZeroTolerance;
    const bool on_separatrix = std::abs(cln - 1.0) <= kAggregateZeroTolerance;
    if (out.biologically_relevant) {
        out.region = on_separatrix ? Region::Separatrix : (cln < 1.0 ? Region::RegionI : Region::RegionII);
    }
    out.A_sign = on_separatrix ? Sign::Zero : (cln < 1.0 ? Sign::Positive : Sign::Negative);
    return out;
}

std::string potential_to_json(const PotentialSpec& spec) {
    nlohmann::json j = std::visit(
        Overloaded{
            [](const QuasiMorse& q) {
                return nlohmann::json{{"kind", "quasi_morse"}, {"n", q.params.n}, {"C", q.params.C},
                                      {"ell", q.params.ell}, {"k", q.params.k}};
            },
            [](const Morse& m) {
                return nlohmann::json{{"kind", "morse"}, {"C_R", m.C_R}, {"C_A", m.C_A},
                                      {"ell_R", m.ell_R}, {"ell_A", m.ell_A}};
            },
            [](const MorseLike& m) {
                return nlohmann::json{{"kind", "morse_like"}, {"p", m.p}, {"C", m.C}, {"ell", m.ell}};
            },
        },
        spec);
    return j.dump();
}

PotentialSpec potential_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        const std::string kind = j.at("kind").get<std::string>();
        PotentialSpec spec;
        if (kind == "quasi_morse") {
            ModelParams p;
            p.n = j.at("n").get<int>();
            p.C = j.at("C").get<double>();
            p.ell = j.at("ell").get<double>();
            p.k = j.at("k").get<double>();
            spec = QuasiMorse{p};
        } else if (kind == "morse") {
            spec = Morse{j.at("C_R").get<double>(), j.at("C_A").get<double>(), j.at("ell_R").get<double>(),
                         j.at("ell_A").get<double>()};
        } else if (kind == "morse_like") {
            spec = MorseLike{j.at("p").get<double>(), j.at("C").get<double>(), j.at("ell").get<double>()};
        } else {
            throw Error(ErrorCode::InvalidConfig, "unknown potential kind '" + kind + "'");
        }
        validate(spec);
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("bad potential JSON: ") + e.what());
    }
}

}  // namespace flockdyn
