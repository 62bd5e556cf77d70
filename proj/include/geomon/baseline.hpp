#pragma once

#include <span>
#include <vector>

#include "geomon/gnss.hpp"

namespace geomon::gnss {

struct BaselineSolution {
    EcefPosition position;            // estimated monitoring station position
    EnuDisplacement displacement_mm;  // relative to the nominal monitoring position
    double sigma_east_mm = 0.0;       // formal 1-sigma, from the DD covariance
    double sigma_north_mm = 0.0;
    double sigma_up_mm = 0.0;
    int n_satellites = 0;
    int reference_sat_id = 0;
    int iterations = 0;
};

// Double-difference least squares for one epoch.
//
// Observations from both stations are matched by satellite, differenced
// against the highest-elevation reference satellite (ties to the lowest id),
// and the monitoring position correction is solved iteratively from the
// linearized residuals. Ambiguities are taken as known from the observation
// records. The weight matrix accounts for the common reference satellite in
// every double difference.
//
// Throws std::invalid_argument on < 4 common satellites and
// std::runtime_error on rank-deficient geometry or non-convergence.
BaselineSolution solve_baseline(std::span<const SatelliteEpochState> sats,
                                std::span<const CarrierPhaseObservation> reference_obs,
                                std::span<const CarrierPhaseObservation> monitoring_obs,
                                const EcefPosition& reference_station,
                                const EcefPosition& monitoring_nominal);

}  // namespace geomon::gnss
