#pragma once

#include <cmath>

namespace geomon {

/// Earth-centered Earth-fixed position, meters.
struct EcefPosition {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline EcefPosition operator-(const EcefPosition& a, const EcefPosition& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}

inline EcefPosition operator+(const EcefPosition& a, const EcefPosition& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}

inline double distance(const EcefPosition& a, const EcefPosition& b) {
    return (a - b).norm();
}

/// Displacement in the local East-North-Up frame of a station, millimeters.
struct EnuDisplacement {
    double east_mm = 0.0;
    double north_mm = 0.0;
    double up_mm = 0.0;

    double horizontal_mm() const { return std::hypot(east_mm, north_mm); }
};

struct Geodetic {
    double lat_rad = 0.0;
    double lon_rad = 0.0;
    double height_m = 0.0;
};

Geodetic to_geodetic(const EcefPosition& p);
EcefPosition to_ecef(const Geodetic& g);

/// Local tangent frame at a reference point: rows of the ECEF->ENU rotation.
class EnuFrame {
public:
    static EnuFrame at(const EcefPosition& origin);

    const EcefPosition& origin() const { return origin_; }

    // ECEF delta -> local ENU components, meters
    void rotate(const EcefPosition& delta, double& e, double& n, double& u) const;

    EnuDisplacement displacement_mm(const EcefPosition& p) const;

    // Point at a metric ENU offset from the origin.
    EcefPosition offset_m(double east_m, double north_m, double up_m) const;

    // Elevation angle (radians) of a target as seen from the origin.
    double elevation_rad(const EcefPosition& target) const;

private:
    EcefPosition origin_;
    double e_[3] = {0, 0, 0};
    double n_[3] = {0, 0, 0};
    double u_[3] = {0, 0, 0};
};

}  // namespace geomon
