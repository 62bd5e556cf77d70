#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "geomon/gnss.hpp"

namespace geomon::gnss {

inline constexpr double kDefaultElevationMaskDeg = 10.0;

// Deterministic pseudo-almanac: circular orbits on per-system shells, plane
// geometry jittered once from the seed. Reproducibility is the point; these
// are not real ephemerides.
class PseudoAlmanac {
public:
    explicit PseudoAlmanac(std::uint64_t seed);

    /// Every satellite of the requested systems at the epoch.
    std::vector<SatelliteEpochState> states_at(std::int64_t epoch_ms,
                                               std::span<const ConstellationId> systems) const;

    /// Satellites above the elevation mask as seen from the receiver.
    std::vector<SatelliteEpochState> visible_at(std::int64_t epoch_ms,
                                                const EcefPosition& receiver,
                                                std::span<const ConstellationId> systems,
                                                double mask_deg = kDefaultElevationMaskDeg) const;

    std::size_t satellite_count() const { return orbits_.size(); }

private:
    struct Orbit {
        int sat_id;
        ConstellationId system;
        double radius_m;
        double inclination_rad;
        double raan_rad;
        double phase0_rad;
        double mean_motion_rad_s;
        double clock_error_s;
    };

    SatelliteEpochState propagate(const Orbit& o, std::int64_t epoch_ms) const;

    std::vector<Orbit> orbits_;
};

/// All four systems, in a fixed order.
std::span<const ConstellationId> all_systems();
/// Just GPS.
std::span<const ConstellationId> gps_only();

}  // namespace geomon::gnss
