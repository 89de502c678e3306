#pragma once

// Two-point shock laws matched to moments and seeded per-shock draw streams.

#include "capflow/errors.hpp"
#include "capflow/model_config.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace capflow {

/// Takes value 1 with probability p_hi and lo otherwise.
struct TwoPointDist {
    double lo = 1;
    double p_hi = 0;

    double hi() const { return 1.0; }
    double mean() const { return p_hi + (1 - p_hi) * lo; }
    double variance() const { return p_hi * (1 - p_hi) * (1 - lo) * (1 - lo); }
    /// u uniform on [0,1).
    double sample(double u) const { return u < p_hi ? 1.0 : lo; }
};

/// Solves p + (1-p) lo = mean, p(1-p)(1-lo)^2 = variance on the support {lo, 1}.
inline TwoPointDist two_point_from_moments(double mean, double variance) {
    if (!(mean > 0 && mean <= 1) || !(variance >= 0))
        throw Error(Errc::InvalidParameter, "two-point law needs 0 < mean <= 1 and variance >= 0");
    if (variance == 0) return {mean, 0.0};
    if (mean == 1)
        throw Error(Errc::InfeasibleMoments, "mean 1 admits only zero variance on {lo, 1}");
    // (1-p)(1-lo) = 1-mean and p(1-p)(1-lo)^2 = variance give p/(1-p) = variance/(1-mean)^2.
    const double q = 1 - mean;
    const double lo = (mean * q - variance) / q;
    if (!(lo >= 0 && lo < 1))
        throw Error(Errc::InfeasibleMoments,
                    "moments (" + std::to_string(mean) + ", " + std::to_string(variance) +
                        ") need lo = " + std::to_string(lo) + " outside [0,1)");
    const double p = 1 - q / (1 - lo);
    return {lo, p};
}

enum class RealizationMode { DeterministicMean, Sampled };

inline std::string_view mode_name(RealizationMode m) {
    return m == RealizationMode::Sampled ? "sampled" : "deterministic-mean";
}

struct ShockDraw {
    double eps = 1;
    double eta = 1;
    double N0 = 0;
    double N1 = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a_u64(std::uint64_t v, std::uint64_t h) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xFF;
        h *= 0x100000001b3ULL;
    }
    return h;
}
} // namespace detail

/// One mt19937_64 stream, seeded from (seed, name).
class NamedStream {
public:
    NamedStream(std::uint64_t seed, std::string_view name)
        : eng_(detail::splitmix64(seed ^ detail::fnv1a(name))) {}

    /// Uniform on [0,1) with 53 random bits. Platform independent.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 eng_;
};

/// Independent streams for eps, eta, N0, N1. Changing the shock moments never
/// changes the N0/N1 sequence, so paired runs share trade shocks.
class ShockStreams {
public:
    ShockStreams(std::uint64_t seed, const ShockMoments& s, RealizationMode mode)
        : moments_(s), mode_(mode), eps_(seed, "eps"), eta_(seed, "eta"), n0_(seed, "N0"),
          n1_(seed, "N1") {
        if (mode_ == RealizationMode::Sampled) {
            eps_law_ = two_point_from_moments(s.eps_mean, s.eps_var);
            eta_law_ = two_point_from_moments(s.eta_mean, s.eta_var);
        }
    }

    ShockDraw draw_period() {
        ShockDraw d;
        const double ue = eps_.uniform(), uh = eta_.uniform();
        if (mode_ == RealizationMode::Sampled) {
            d.eps = eps_law_.sample(ue);
            d.eta = eta_law_.sample(uh);
        } else {
            d.eps = moments_.eps_mean;
            d.eta = moments_.eta_mean;
        }
        d.N0 = n0_.uniform(moments_.N0_lo, moments_.N0_hi);
        d.N1 = n1_.uniform(moments_.N1_lo, moments_.N1_hi);
        trade_hash_ = detail::fnv1a_u64(std::bit_cast<std::uint64_t>(d.N0), trade_hash_);
        trade_hash_ = detail::fnv1a_u64(std::bit_cast<std::uint64_t>(d.N1), trade_hash_);
        return d;
    }

    /// Hash of every N0/N1 value drawn so far.
    std::uint64_t trade_fingerprint() const { return trade_hash_; }
    RealizationMode mode() const { return mode_; }

private:
    ShockMoments moments_;
    RealizationMode mode_;
    NamedStream eps_, eta_, n0_, n1_;
    TwoPointDist eps_law_{}, eta_law_{};
    std::uint64_t trade_hash_ = 0xcbf29ce484222325ULL;
};

} // namespace capflow
