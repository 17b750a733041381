#pragma once

#include <cstdint>
#include <random>

#include "patsim/angle.hpp"

namespace patsim {

using Rng = std::mt19937_64;

// Each stochastic subsystem of a run draws from its own stream so that
// enabling a device in one algorithm variant never shifts the draws seen by
// another. Values are part of the determinism contract; do not renumber.
enum class StreamId : std::uint64_t {
    AircraftDisturbance = 1,
    GatewayDisturbance = 2,
    UplinkBeaconFade = 3,
    DownlinkBeaconFade = 4,
    CcrFade = 5,
    UplinkCommFade = 6,
    DownlinkCommFade = 7,
    GatewayGimbal = 8,
    AircraftGimbal = 9,
    GatewayFsm = 10,
    AircraftFsm = 11,
    GatewayQuadcell = 12,
    AircraftQuadcell = 13,
    GatewayFpa = 14,
    AircraftFpa = 15,
    Gnss = 16,
    Aoa = 17,
    BeamWander = 18,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the substream for `id` within the run seeded by `seed`.
constexpr std::uint64_t substream_seed(std::uint64_t seed, StreamId id) {
    return mix64(mix64(seed) ^ mix64(0xa5a5a5a5ULL + static_cast<std::uint64_t>(id)));
}

inline Rng make_stream(std::uint64_t seed, StreamId id) { return Rng{substream_seed(seed, id)}; }

inline double draw_normal(Rng& rng, double sigma = 1.0) {
    return std::normal_distribution<double>{0.0, sigma}(rng);
}

inline double draw_uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>{lo, hi}(rng);
}

/// Isotropic two-axis Gaussian with per-axis standard deviation `sigma`.
/// sigma == 0 returns zero without consuming the stream.
inline Angle2 draw_angle2(Rng& rng, double sigma) {
    if (sigma == 0.0) {
        return {};
    }
    const double az = draw_normal(rng, sigma);
    const double el = draw_normal(rng, sigma);
    return {az, el};
}

}  // namespace patsim
