#include "geomon/gnss.hpp"

#include <cmath>
#include <stdexcept>

#include "geomon/linalg.hpp"

namespace geomon::gnss {

const char* to_string(ConstellationId c) {
    switch (c) {
        case ConstellationId::Gps: return "gps";
        case ConstellationId::Bds: return "bds";
        case ConstellationId::Glonass: return "glonass";
        case ConstellationId::Galileo: return "galileo";
    }
    return "unknown";
}

CarrierPhaseObservation synthesize_observation(const StationState& station,
                                               const SatelliteEpochState& sat,
                                               std::int64_t epoch_ms,
                                               double carrier_freq_hz,
                                               std::int64_t ambiguity_cycles,
                                               const AtmosphericDelays& delays,
                                               double noise_sigma_cycles, Rng& rng) {
    if (!(carrier_freq_hz > 0.0)) throw std::invalid_argument("carrier frequency must be > 0");
    const double rho = distance(station.position, sat.position);
    if (!(rho > 0.0)) throw std::invalid_argument("station and satellite positions coincide");

    double phase = (carrier_freq_hz / kSpeedOfLight) * rho;
    phase += carrier_freq_hz * (station.clock_error_s - sat.clock_error_s);
    phase -= static_cast<double>(ambiguity_cycles);
    phase += carrier_freq_hz * (delays.tropo_s + delays.iono_s);
    if (noise_sigma_cycles > 0.0) phase += rng.gaussian(0.0, noise_sigma_cycles);

    CarrierPhaseObservation obs;
    obs.station_id = station.station_id;
    obs.sat_id = sat.sat_id;
    obs.epoch_ms = epoch_ms;
    obs.phase_cycles = phase;
    obs.carrier_freq_hz = carrier_freq_hz;
    obs.ambiguity_cycles = ambiguity_cycles;
    obs.tropo_delay_s = delays.tropo_s;
    obs.iono_delay_s = delays.iono_s;
    obs.noise_sigma_cycles = noise_sigma_cycles;
    return obs;
}

SingleDifference single_difference(const CarrierPhaseObservation& monitoring,
                                   const CarrierPhaseObservation& reference) {
    if (monitoring.sat_id != reference.sat_id)
        throw std::invalid_argument("single difference requires a common satellite");
    if (monitoring.epoch_ms != reference.epoch_ms)
        throw std::invalid_argument("single difference requires a common epoch");
    if (monitoring.carrier_freq_hz != reference.carrier_freq_hz)
        throw std::invalid_argument("single difference requires a common carrier");
    return {monitoring.sat_id, monitoring.epoch_ms, monitoring.carrier_freq_hz,
            monitoring.phase_cycles - reference.phase_cycles};
}

double double_difference(const SingleDifference& sd_k, const SingleDifference& sd_ref) {
    if (sd_k.sat_id == sd_ref.sat_id)
        throw std::invalid_argument("double difference requires two distinct satellites");
    if (sd_k.epoch_ms != sd_ref.epoch_ms || sd_k.carrier_freq_hz != sd_ref.carrier_freq_hz)
        throw std::invalid_argument("double difference requires matching epoch and carrier");
    return sd_k.value_cycles - sd_ref.value_cycles;
}

DopReport compute_dop(std::span<const SatelliteEpochState> sats, const EcefPosition& receiver) {
    if (sats.size() < 4) throw std::invalid_argument("DOP needs at least 4 satellites");

    const EnuFrame frame = EnuFrame::at(receiver);
    linalg::Matrix g(sats.size(), 4);
    for (std::size_t i = 0; i < sats.size(); ++i) {
        const EcefPosition d = sats[i].position - receiver;
        const double r = d.norm();
        if (!(r > 0.0)) throw std::invalid_argument("satellite coincides with receiver");
        double e, n, u;
        frame.rotate(d, e, n, u);
        g(i, 0) = e / r;
        g(i, 1) = n / r;
        g(i, 2) = u / r;
        g(i, 3) = 1.0;
    }

    const linalg::Matrix q = linalg::invert(g.transposed() * g);
    DopReport rep;
    rep.n_sats = static_cast<int>(sats.size());
    rep.hdop = std::sqrt(q(0, 0) + q(1, 1));
    rep.vdop = std::sqrt(q(2, 2));
    rep.pdop = std::sqrt(q(0, 0) + q(1, 1) + q(2, 2));
    rep.gdop = std::sqrt(q(0, 0) + q(1, 1) + q(2, 2) + q(3, 3));
    if (!std::isfinite(rep.gdop)) throw std::runtime_error("degenerate DOP geometry");
    return rep;
}

}  // namespace geomon::gnss
