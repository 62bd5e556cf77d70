#include "geomon/geodesy.hpp"

namespace geomon {

namespace {
// WGS84
constexpr double kSemiMajorM = 6378137.0;
constexpr double kFlattening = 1.0 / 298.257223563;
constexpr double kEcc2 = kFlattening * (2.0 - kFlattening);
}  // namespace

Geodetic to_geodetic(const EcefPosition& p) {
    const double lon = std::atan2(p.y, p.x);
    const double rho = std::hypot(p.x, p.y);

    double lat = std::atan2(p.z, rho * (1.0 - kEcc2));
    double height = 0.0;
    for (int i = 0; i < 6; ++i) {
        const double s = std::sin(lat);
        const double nu = kSemiMajorM / std::sqrt(1.0 - kEcc2 * s * s);
        height = rho / std::cos(lat) - nu;
        lat = std::atan2(p.z, rho * (1.0 - kEcc2 * nu / (nu + height)));
    }
    return {lat, lon, height};
}

EcefPosition to_ecef(const Geodetic& g) {
    const double s = std::sin(g.lat_rad);
    const double c = std::cos(g.lat_rad);
    const double nu = kSemiMajorM / std::sqrt(1.0 - kEcc2 * s * s);
    return {(nu + g.height_m) * c * std::cos(g.lon_rad),
            (nu + g.height_m) * c * std::sin(g.lon_rad),
            (nu * (1.0 - kEcc2) + g.height_m) * s};
}

EnuFrame EnuFrame::at(const EcefPosition& origin) {
    const Geodetic g = to_geodetic(origin);
    const double sl = std::sin(g.lat_rad), cl = std::cos(g.lat_rad);
    const double so = std::sin(g.lon_rad), co = std::cos(g.lon_rad);

    EnuFrame f;
    f.origin_ = origin;
    f.e_[0] = -so;      f.e_[1] = co;       f.e_[2] = 0.0;
    f.n_[0] = -sl * co; f.n_[1] = -sl * so; f.n_[2] = cl;
    f.u_[0] = cl * co;  f.u_[1] = cl * so;  f.u_[2] = sl;
    return f;
}

void EnuFrame::rotate(const EcefPosition& d, double& e, double& n, double& u) const {
    e = e_[0] * d.x + e_[1] * d.y + e_[2] * d.z;
    n = n_[0] * d.x + n_[1] * d.y + n_[2] * d.z;
    u = u_[0] * d.x + u_[1] * d.y + u_[2] * d.z;
}

EnuDisplacement EnuFrame::displacement_mm(const EcefPosition& p) const {
    double e, n, u;
    rotate(p - origin_, e, n, u);
    return {e * 1000.0, n * 1000.0, u * 1000.0};
}

EcefPosition EnuFrame::offset_m(double east_m, double north_m, double up_m) const {
    return {origin_.x + e_[0] * east_m + n_[0] * north_m + u_[0] * up_m,
            origin_.y + e_[1] * east_m + n_[1] * north_m + u_[1] * up_m,
            origin_.z + e_[2] * east_m + n_[2] * north_m + u_[2] * up_m};
}

double EnuFrame::elevation_rad(const EcefPosition& target) const {
    const EcefPosition d = target - origin_;
    const double r = d.norm();
    double e, n, u;
    rotate(d, e, n, u);
    return std::asin(u / r);
}

}  // namespace geomon
