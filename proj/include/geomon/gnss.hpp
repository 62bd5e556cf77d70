#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "geomon/geodesy.hpp"
#include "geomon/rng.hpp"

namespace geomon::gnss {

/// Radio propagation speed, m/s.
inline constexpr double kSpeedOfLight = 299'792'458.0;
/// GPS L1 carrier, Hz. Used as the default simulation carrier.
inline constexpr double kL1FreqHz = 1'575.42e6;

enum class ConstellationId { Gps, Bds, Glonass, Galileo };

const char* to_string(ConstellationId c);

struct SatelliteEpochState {
    int sat_id = 0;
    ConstellationId constellation = ConstellationId::Gps;
    EcefPosition position;      // meters
    double clock_error_s = 0.0; // satellite clock error
};

enum class StationRole { Reference, Monitoring };

struct StationState {
    int station_id = 0;
    StationRole role = StationRole::Monitoring;
    EcefPosition position;      // meters
    double clock_error_s = 0.0; // receiver clock error
};

struct AtmosphericDelays {
    double tropo_s = 0.0;
    double iono_s = 0.0;
};

/// A carrier phase measurement for one station/satellite/epoch, in cycles,
/// together with everything that went into it.
struct CarrierPhaseObservation {
    int station_id = 0;
    int sat_id = 0;
    std::int64_t epoch_ms = 0;
    double phase_cycles = 0.0;
    double carrier_freq_hz = kL1FreqHz;
    std::int64_t ambiguity_cycles = 0;
    double tropo_delay_s = 0.0;
    double iono_delay_s = 0.0;
    double noise_sigma_cycles = 0.0;
};

// phase = (f0/c) rho + f0 (dt_station - dt_sat) - N + f0 (tropo + iono) + noise,
// rho the straight-line station-satellite range. Throws std::invalid_argument
// on a non-positive carrier or coincident positions.
CarrierPhaseObservation synthesize_observation(const StationState& station,
                                               const SatelliteEpochState& sat,
                                               std::int64_t epoch_ms,
                                               double carrier_freq_hz,
                                               std::int64_t ambiguity_cycles,
                                               const AtmosphericDelays& delays,
                                               double noise_sigma_cycles, Rng& rng);

/// Between-station difference for one satellite; the satellite clock term
/// cancels. Tagged with the satellite so the between-satellite step can
/// check its preconditions.
struct SingleDifference {
    int sat_id = 0;
    std::int64_t epoch_ms = 0;
    double carrier_freq_hz = 0.0;
    double value_cycles = 0.0;
};

// monitoring-minus-reference for the same satellite/epoch/carrier.
SingleDifference single_difference(const CarrierPhaseObservation& monitoring,
                                   const CarrierPhaseObservation& reference);

// Between-satellite difference sd_k - sd_ref (reference satellite
// subtracted); the receiver clock term cancels. Throws when the two single
// differences share a satellite or disagree on epoch/carrier.
double double_difference(const SingleDifference& sd_k, const SingleDifference& sd_ref);

struct DopReport {
    int n_sats = 0;
    double gdop = 0.0;
    double pdop = 0.0;
    double hdop = 0.0;
    double vdop = 0.0;
};

// Dilution of precision from unit line-of-sight rows plus the clock column,
// evaluated in the receiver's ENU frame so HDOP/VDOP split naturally.
// Requires >= 4 satellites and a non-degenerate geometry.
DopReport compute_dop(std::span<const SatelliteEpochState> sats, const EcefPosition& receiver);

}  // namespace geomon::gnss
