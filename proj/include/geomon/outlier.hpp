#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace geomon::outlier {

/// One displacement sample on a single axis.
struct Sample {
    std::int64_t epoch_ms = 0;
    double value_mm = 0.0;
};

/// Classic 3-sigma (Raida) criterion over a whole batch: arithmetic mean,
/// residuals, standard deviation with the n-1 divisor. Returns the indices
/// whose absolute residual exceeds k*sigma. Requires at least 3 values.
std::vector<std::size_t> batch_raida(std::span<const double> values, double k = 3.0);

/// Batch mean / standard deviation used by batch_raida, exposed so callers
/// can reuse the same definitions.
double batch_mean(std::span<const double> values);
double batch_sigma(std::span<const double> values);

// Compensated running sum: Neumaier update, O(1) per add. Subtraction is
// addition of the negated value.
struct CompensatedSum {
    double hi = 0.0;
    double c = 0.0;

    void add(double v) {
        const double t = hi + v;
        if (std::abs(hi) >= std::abs(v))
            c += (hi - t) + v;
        else
            c += (v - t) + hi;
        hi = t;
    }
    double value() const { return hi + c; }
    void reset() { hi = c = 0.0; }
};

// Running statistics over a bounded slice of recent samples. Values are
// stored relative to a fixed offset t0 chosen near the data, and only the
// count, the sum and the sum of squares are maintained: adding or removing
// a sample touches the two sums and nothing else, so eliminating a gross
// error never triggers a recomputation over the retained data.
//
// The sums carry Neumaier compensation and the squares keep their fma
// remainders, so the sigma read stays accurate to ~1e-12 relative even when
// t0 sits 1e6 away from the data and the variance term cancels ten digits.
class SliceAccumulator {
public:
    // capacity is the slice length T in samples; must be >= 8
    SliceAccumulator(double t0_mm, std::size_t capacity);

    // Adds one sample. When the slice is full the oldest retained sample is
    // evicted first through the same removal path (sliding window).
    void add(double value_mm);

    // Removes one retained sample equal to value_mm (oldest first).
    // Throws std::invalid_argument when no such sample is retained.
    void remove(double value_mm);

    double mean_mm() const;   // requires n >= 1
    double sigma_mm() const;  // requires n >= 2

    std::size_t size() const { return ring_.size(); }
    std::size_t capacity() const { return capacity_; }
    double offset_mm() const { return t0_; }
    bool empty() const { return ring_.empty(); }

    // Oldest-to-newest view of the retained raw samples.
    const std::deque<double>& retained() const { return ring_; }

private:
    void apply(double value_mm, double sign);

    double t0_;
    std::size_t capacity_;
    CompensatedSum sum_x_;
    CompensatedSum sum_x2_;
    std::deque<double> ring_;
};

struct ClassifierConfig {
    std::size_t slice_len = 64;            // T, samples
    double sigma_multiplier = 3.0;         // k
    double deformation_threshold_mm = 20.0;  // W, expert plausibility bound
    std::size_t confirm_count = 5;         // m consistent samples confirm deformation
    double min_sigma_mm = 0.1;             // sigma floor for classification

    void validate() const;  // throws std::invalid_argument
};

enum class Verdict {
    Accept,
    GrossError,
    DeformationPending,
    DeformationConfirmed,
};

const char* to_string(Verdict v);

// Streaming gross-error / deformation discriminator. Per sample:
//
//   |V| <= k*sigma            -> Accept, sample joins the slice
//   |V| >  k*sigma, |V| >= W  -> GrossError, sample discarded, sums untouched
//   k*sigma < |V| < W         -> deformation candidate; confirmed when m
//                                consecutive samples deviate from the old
//                                mean the same way, at which point the slice
//                                is reseeded from those samples
//
// Before the slice reaches half of its length every sample is accepted and
// added (warm-up). One classifier per axis per station; plain value type,
// single writer.
class StreamClassifier {
public:
    explicit StreamClassifier(ClassifierConfig cfg);

    Verdict classify(double value_mm);

    bool warmed_up() const;
    // Statistics of the current slice; floor applied to sigma.
    double slice_mean_mm() const;
    double slice_sigma_mm() const;
    const ClassifierConfig& config() const { return cfg_; }
    const SliceAccumulator* slice() const { return acc_ ? &*acc_ : nullptr; }

private:
    Verdict classify_steady(double value_mm);
    Verdict start_pending(double value_mm, double old_mean, double old_sigma);
    Verdict confirm_deformation();

    ClassifierConfig cfg_;
    std::optional<SliceAccumulator> acc_;
    std::vector<double> pending_;
    double pending_mean_mm_ = 0.0;   // slice mean frozen when the candidate opened
    double pending_sigma_mm_ = 0.0;  // floored sigma frozen when the candidate opened
    int pending_sign_ = 0;
};

}  // namespace geomon::outlier
