#include "geomon/constellation.hpp"

#include <cmath>
#include <numbers>

#include "geomon/rng.hpp"

namespace geomon::gnss {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMuEarth = 3.986004418e14;      // m^3/s^2
constexpr double kEarthRotRadS = 7.2921151467e-5;

struct Shell {
    ConstellationId system;
    int id_base;
    int count;
    int planes;
    double radius_m;       // kept inside the simulation's satellite band
    double inclination_deg;
};

// Shell radii are pseudo-almanac values, compressed to stay within the
// simulation's satellite radius band [6.2e6, 2.7e7] m.
constexpr Shell kShells[] = {
    {ConstellationId::Gps, 1, 32, 6, 26'560e3, 55.0},
    {ConstellationId::Bds, 101, 24, 3, 26'650e3, 55.0},
    {ConstellationId::Glonass, 201, 24, 3, 25'510e3, 64.8},
    {ConstellationId::Galileo, 301, 24, 3, 26'950e3, 56.0},
};

constexpr ConstellationId kAllSystems[] = {ConstellationId::Gps, ConstellationId::Bds,
                                           ConstellationId::Glonass, ConstellationId::Galileo};
constexpr ConstellationId kGpsOnly[] = {ConstellationId::Gps};

}  // namespace

std::span<const ConstellationId> all_systems() { return kAllSystems; }
std::span<const ConstellationId> gps_only() { return kGpsOnly; }

PseudoAlmanac::PseudoAlmanac(std::uint64_t seed) {
    Rng rng(seed ^ 0xA1A1A1A1'5EED5EEDULL);
    for (const Shell& shell : kShells) {
        const int per_plane = shell.count / shell.planes;
        for (int i = 0; i < shell.count; ++i) {
            const int plane = i / per_plane;
            const int slot = i % per_plane;
            Orbit o;
            o.sat_id = shell.id_base + i;
            o.system = shell.system;
            o.radius_m = shell.radius_m;
            o.inclination_rad = shell.inclination_deg * kPi / 180.0;
            o.raan_rad = 2.0 * kPi * plane / shell.planes + rng.uniform(-0.05, 0.05);
            o.phase0_rad = 2.0 * kPi * slot / per_plane + rng.uniform(-0.10, 0.10);
            o.mean_motion_rad_s = std::sqrt(kMuEarth / std::pow(o.radius_m, 3));
            o.clock_error_s = rng.uniform(-1e-4, 1e-4);
            orbits_.push_back(o);
        }
    }
}

SatelliteEpochState PseudoAlmanac::propagate(const Orbit& o, std::int64_t epoch_ms) const {
    const double t = static_cast<double>(epoch_ms) * 1e-3;
    const double u = o.phase0_rad + o.mean_motion_rad_s * t;
    // Earth rotation shows up as a slow RAAN drift in the fixed frame.
    const double raan = o.raan_rad - kEarthRotRadS * t;

    const double xo = o.radius_m * std::cos(u);
    const double yo = o.radius_m * std::sin(u);
    const double ci = std::cos(o.inclination_rad), si = std::sin(o.inclination_rad);
    const double cr = std::cos(raan), sr = std::sin(raan);

    SatelliteEpochState s;
    s.sat_id = o.sat_id;
    s.constellation = o.system;
    s.position = {cr * xo - sr * ci * yo, sr * xo + cr * ci * yo, si * yo};
    s.clock_error_s = o.clock_error_s;
    return s;
}

std::vector<SatelliteEpochState> PseudoAlmanac::states_at(
    std::int64_t epoch_ms, std::span<const ConstellationId> systems) const {
    std::vector<SatelliteEpochState> out;
    for (const Orbit& o : orbits_) {
        for (ConstellationId sys : systems) {
            if (o.system == sys) {
                out.push_back(propagate(o, epoch_ms));
                break;
            }
        }
    }
    return out;
}

std::vector<SatelliteEpochState> PseudoAlmanac::visible_at(
    std::int64_t epoch_ms, const EcefPosition& receiver,
    std::span<const ConstellationId> systems, double mask_deg) const {
    const EnuFrame frame = EnuFrame::at(receiver);
    const double mask_rad = mask_deg * kPi / 180.0;
    std::vector<SatelliteEpochState> out;
    for (const SatelliteEpochState& s : states_at(epoch_ms, systems)) {
        if (frame.elevation_rad(s.position) >= mask_rad) out.push_back(s);
    }
    return out;
}

}  // namespace geomon::gnss
