#include "geomon/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "geomon/linalg.hpp"

namespace geomon::gnss {

namespace {

struct MatchedPair {
    const SatelliteEpochState* sat;
    const CarrierPhaseObservation* ref;
    const CarrierPhaseObservation* mon;
};

}  // namespace

BaselineSolution solve_baseline(std::span<const SatelliteEpochState> sats,
                                std::span<const CarrierPhaseObservation> reference_obs,
                                std::span<const CarrierPhaseObservation> monitoring_obs,
                                const EcefPosition& reference_station,
                                const EcefPosition& monitoring_nominal) {
    std::map<int, MatchedPair> by_sat;
    for (const auto& s : sats) by_sat[s.sat_id].sat = &s;
    for (const auto& o : reference_obs)
        if (auto it = by_sat.find(o.sat_id); it != by_sat.end()) it->second.ref = &o;
    for (const auto& o : monitoring_obs)
        if (auto it = by_sat.find(o.sat_id); it != by_sat.end()) it->second.mon = &o;

    std::vector<MatchedPair> pairs;
    for (const auto& [id, p] : by_sat)
        if (p.sat && p.ref && p.mon) pairs.push_back(p);
    if (pairs.size() < 4)
        throw std::invalid_argument("baseline solve needs >= 4 common satellites");

    const double freq = pairs.front().mon->carrier_freq_hz;
    const std::int64_t epoch = pairs.front().mon->epoch_ms;
    for (const auto& p : pairs) {
        if (p.ref->carrier_freq_hz != freq || p.mon->carrier_freq_hz != freq)
            throw std::invalid_argument("mixed carriers in one baseline epoch");
        if (p.ref->epoch_ms != epoch || p.mon->epoch_ms != epoch)
            throw std::invalid_argument("mixed epochs in one baseline solve");
    }

    // Reference satellite: highest elevation at the monitoring station,
    // ties broken by lowest id (the map ordering makes ids ascending).
    const EnuFrame mon_frame = EnuFrame::at(monitoring_nominal);
    std::size_t ref_idx = 0;
    double best_el = -10.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double el = mon_frame.elevation_rad(pairs[i].sat->position);
        if (el > best_el) {
            best_el = el;
            ref_idx = i;
        }
    }
    std::swap(pairs[ref_idx], pairs.back());
    const MatchedPair pivot = pairs.back();
    pairs.pop_back();

    const std::size_t n_dd = pairs.size();
    const double lambda_inv = freq / kSpeedOfLight;  // cycles per meter

    // Observed double differences and their known ambiguity part.
    const SingleDifference sd_pivot = single_difference(*pivot.mon, *pivot.ref);
    std::vector<double> dd_obs(n_dd), dd_amb(n_dd);
    for (std::size_t i = 0; i < n_dd; ++i) {
        const SingleDifference sd = single_difference(*pairs[i].mon, *pairs[i].ref);
        dd_obs[i] = double_difference(sd, sd_pivot);
        dd_amb[i] = static_cast<double>((pairs[i].mon->ambiguity_cycles -
                                         pairs[i].ref->ambiguity_cycles) -
                                        (pivot.mon->ambiguity_cycles -
                                         pivot.ref->ambiguity_cycles));
    }

    // DD covariance is sigma_sd^2 (I + 1 1^T); its inverse is
    // I - 1 1^T / (n + 1), applied without forming the full matrix.
    const auto weighted_normal = [n_dd](const linalg::Matrix& h, const std::vector<double>& y,
                                        linalg::Matrix& ntn, std::vector<double>& nty) {
        const std::size_t cols = h.cols();
        ntn = linalg::Matrix(cols, cols);
        nty.assign(cols, 0.0);
        std::vector<double> col_sums(cols, 0.0);
        double y_sum = 0.0;
        for (std::size_t r = 0; r < n_dd; ++r) {
            y_sum += y[r];
            for (std::size_t c = 0; c < cols; ++c) col_sums[c] += h(r, c);
        }
        for (std::size_t r = 0; r < n_dd; ++r)
            for (std::size_t a = 0; a < cols; ++a) {
                nty[a] += h(r, a) * y[r];
                for (std::size_t b = 0; b < cols; ++b) ntn(a, b) += h(r, a) * h(r, b);
            }
        const double scale = 1.0 / (static_cast<double>(n_dd) + 1.0);
        for (std::size_t a = 0; a < cols; ++a) {
            nty[a] -= scale * col_sums[a] * y_sum;
            for (std::size_t b = 0; b < cols; ++b) ntn(a, b) -= scale * col_sums[a] * col_sums[b];
        }
    };

    EcefPosition est = monitoring_nominal;
    // Phase-domain terms, rounded per observation exactly like the
    // synthesized measurements; on noiseless input the residual at the true
    // position is then identically zero instead of a few ulps of 1e8 cycles.
    const double ref_phase_pivot = lambda_inv * distance(reference_station, pivot.sat->position);
    std::vector<double> ref_phase(n_dd);
    for (std::size_t i = 0; i < n_dd; ++i)
        ref_phase[i] = lambda_inv * distance(reference_station, pairs[i].sat->position);

    constexpr int kMaxIter = 15;
    // The step floor is the float resolution of the observables: phases and
    // ranges round at ~range * 2^-52, and the least-squares step wanders at
    // that scale once the residuals hit their quantization.
    double mean_range = 0.0;
    for (std::size_t i = 0; i < n_dd; ++i)
        mean_range += distance(monitoring_nominal, pairs[i].sat->position);
    mean_range /= static_cast<double>(n_dd);
    const double step_tol_m = std::max(1e-9, mean_range * 1e-15);
    int iter = 0;
    linalg::Matrix ntn;
    std::vector<double> nty;
    bool converged = false;
    for (; iter < kMaxIter; ++iter) {
        const double mon_phase_pivot = lambda_inv * distance(est, pivot.sat->position);
        linalg::Matrix h(n_dd, 3);
        std::vector<double> resid(n_dd);
        for (std::size_t i = 0; i < n_dd; ++i) {
            const double mon_phase = lambda_inv * distance(est, pairs[i].sat->position);
            const double predicted =
                ((mon_phase - ref_phase[i]) - (mon_phase_pivot - ref_phase_pivot)) - dd_amb[i];
            resid[i] = dd_obs[i] - predicted;

            const EcefPosition dk = pairs[i].sat->position - est;
            const EcefPosition dj = pivot.sat->position - est;
            const double rk = dk.norm(), rj = dj.norm();
            // d(rho_mon)/d(est) = -(sat - est)/rho
            h(i, 0) = lambda_inv * (dj.x / rj - dk.x / rk);
            h(i, 1) = lambda_inv * (dj.y / rj - dk.y / rk);
            h(i, 2) = lambda_inv * (dj.z / rj - dk.z / rk);
        }

        weighted_normal(h, resid, ntn, nty);
        std::vector<double> step;
        try {
            step = linalg::solve(ntn, nty);
        } catch (const std::runtime_error&) {
            throw std::runtime_error("rank-deficient baseline geometry");
        }
        est.x += step[0];
        est.y += step[1];
        est.z += step[2];
        if (std::sqrt(step[0] * step[0] + step[1] * step[1] + step[2] * step[2]) < step_tol_m) {
            converged = true;
            ++iter;
            break;
        }
    }
    if (!converged) throw std::runtime_error("baseline solve did not converge");

    // Formal covariance: sigma_dd-scaled inverse normal matrix, rotated into
    // ENU at the monitoring station. sigma_sd^2 = 2 sigma_phase^2.
    double sigma_phase = 0.0;
    for (const auto& p : pairs)
        sigma_phase = std::max({sigma_phase, p.mon->noise_sigma_cycles, p.ref->noise_sigma_cycles});
    sigma_phase = std::max({sigma_phase, pivot.mon->noise_sigma_cycles,
                            pivot.ref->noise_sigma_cycles});

    BaselineSolution sol;
    sol.position = est;
    sol.displacement_mm = mon_frame.displacement_mm(est);
    sol.n_satellites = static_cast<int>(n_dd + 1);
    sol.reference_sat_id = pivot.sat->sat_id;
    sol.iterations = iter;

    const linalg::Matrix cov_ecef = linalg::invert(ntn);
    const double var_sd = 2.0 * sigma_phase * sigma_phase;
    // rows of the ECEF->ENU rotation via unit offsets
    double rot[3][3];
    {
        const EnuFrame f = mon_frame;
        const EcefPosition ex{1, 0, 0}, ey{0, 1, 0}, ez{0, 0, 1};
        f.rotate(ex, rot[0][0], rot[1][0], rot[2][0]);
        f.rotate(ey, rot[0][1], rot[1][1], rot[2][1]);
        f.rotate(ez, rot[0][2], rot[1][2], rot[2][2]);
    }
    double cov_enu_diag[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                cov_enu_diag[a] += rot[a][i] * cov_ecef(i, j) * rot[a][j];
    sol.sigma_east_mm = std::sqrt(std::max(0.0, var_sd * cov_enu_diag[0])) * 1000.0;
    sol.sigma_north_mm = std::sqrt(std::max(0.0, var_sd * cov_enu_diag[1])) * 1000.0;
    sol.sigma_up_mm = std::sqrt(std::max(0.0, var_sd * cov_enu_diag[2])) * 1000.0;
    return sol;
}

}  // namespace geomon::gnss
