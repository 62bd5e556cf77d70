#include "geomon/outlier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace geomon::outlier {

double batch_mean(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("mean of empty batch");
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double batch_sigma(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("sigma needs at least 2 values");
    const double m = batch_mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::vector<std::size_t> batch_raida(std::span<const double> values, double k) {
    if (values.size() < 3) throw std::invalid_argument("batch_raida needs at least 3 values");
    if (!(k > 0.0)) throw std::invalid_argument("batch_raida multiplier must be positive");
    const double m = batch_mean(values);
    const double s = batch_sigma(values);
    std::vector<std::size_t> flagged;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::fabs(values[i] - m) > k * s) flagged.push_back(i);
    }
    return flagged;
}

SliceAccumulator::SliceAccumulator(double t0_mm, std::size_t capacity)
    : t0_(t0_mm), capacity_(capacity) {
    if (capacity < 8) throw std::invalid_argument("slice capacity must be >= 8");
    if (!std::isfinite(t0_mm)) throw std::invalid_argument("slice offset must be finite");
}

void SliceAccumulator::apply(double value_mm, double sign) {
    const double x = value_mm - t0_;
    sum_x_.add(sign * x);
    const double sq = x * x;
    sum_x2_.add(sign * sq);
    sum_x2_.add(sign * std::fma(x, x, -sq));  // keep the square's remainder
}

void SliceAccumulator::add(double value_mm) {
    if (!std::isfinite(value_mm)) throw std::invalid_argument("sample must be finite");
    if (ring_.size() == capacity_) remove(ring_.front());
    apply(value_mm, +1.0);
    ring_.push_back(value_mm);
}

void SliceAccumulator::remove(double value_mm) {
    auto it = std::find(ring_.begin(), ring_.end(), value_mm);
    if (it == ring_.end()) throw std::invalid_argument("sample not retained in slice");
    apply(value_mm, -1.0);
    ring_.erase(it);
    if (ring_.empty()) {
        // re-zero so round-off cannot linger in an empty accumulator
        sum_x_.reset();
        sum_x2_.reset();
    }
}

double SliceAccumulator::mean_mm() const {
    if (ring_.empty()) throw std::logic_error("mean of empty slice");
    return t0_ + sum_x_.value() / static_cast<double>(ring_.size());
}

double SliceAccumulator::sigma_mm() const {
    if (ring_.size() < 2) throw std::logic_error("sigma needs at least 2 samples");
    const double n = static_cast<double>(ring_.size());
    // (sum x)^2 / n, split into a leading part and an exact remainder so the
    // subtraction below can cancel ten digits without losing the result
    const double p1 = sum_x_.hi * sum_x_.hi;
    const double e1 = std::fma(sum_x_.hi, sum_x_.hi, -p1);
    const double p2 = 2.0 * sum_x_.hi * sum_x_.c;
    const double lead = p1 / n;
    const double lead_rem = std::fma(-lead, n, p1);  // p1 - lead*n, exact
    const double tail = (lead_rem + e1 + p2) / n;

    const double num = (sum_x2_.hi - lead) + (sum_x2_.c - tail);
    return std::sqrt(std::max(0.0, num) / (n - 1.0));
}

void ClassifierConfig::validate() const {
    if (slice_len < 8) throw std::invalid_argument("slice_len must be >= 8");
    if (!(sigma_multiplier > 0.0)) throw std::invalid_argument("sigma_multiplier must be > 0");
    if (!(deformation_threshold_mm > 0.0)) throw std::invalid_argument("deformation threshold must be > 0");
    if (confirm_count < 1) throw std::invalid_argument("confirm_count must be >= 1");
    if (min_sigma_mm < 0.0) throw std::invalid_argument("sigma floor must be >= 0");
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Accept: return "accept";
        case Verdict::GrossError: return "gross_error";
        case Verdict::DeformationPending: return "deformation_pending";
        case Verdict::DeformationConfirmed: return "deformation_confirmed";
    }
    return "unknown";
}

StreamClassifier::StreamClassifier(ClassifierConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    pending_.reserve(cfg_.confirm_count);
}

bool StreamClassifier::warmed_up() const {
    return acc_ && acc_->size() >= cfg_.slice_len / 2;
}

double StreamClassifier::slice_mean_mm() const {
    if (!acc_) throw std::logic_error("no samples seen yet");
    return acc_->mean_mm();
}

double StreamClassifier::slice_sigma_mm() const {
    if (!acc_ || acc_->size() < 2) throw std::logic_error("sigma needs at least 2 samples");
    return std::max(acc_->sigma_mm(), cfg_.min_sigma_mm);
}

Verdict StreamClassifier::classify(double value_mm) {
    if (!acc_) {
        // t0 = first sample entering a (re)seeded slice
        acc_.emplace(value_mm, cfg_.slice_len);
        acc_->add(value_mm);
        return Verdict::Accept;
    }
    if (!warmed_up()) {
        acc_->add(value_mm);
        return Verdict::Accept;
    }
    return classify_steady(value_mm);
}

Verdict StreamClassifier::classify_steady(double value_mm) {
    const double k = cfg_.sigma_multiplier;
    const double w = cfg_.deformation_threshold_mm;

    if (!pending_.empty()) {
        const double dev = value_mm - pending_mean_mm_;
        const int sign = dev > 0.0 ? 1 : -1;
        if (std::fabs(dev) > k * pending_sigma_mm_ && std::fabs(dev) < w &&
            sign == pending_sign_) {
            pending_.push_back(value_mm);
            if (pending_.size() >= cfg_.confirm_count) return confirm_deformation();
            return Verdict::DeformationPending;
        }
        // Run broken: the held samples are dropped without ever touching the
        // slice sums, and the current sample is judged on its own.
        pending_.clear();
        pending_sign_ = 0;
    }

    const double mean = acc_->mean_mm();
    const double sigma = std::max(acc_->sigma_mm(), cfg_.min_sigma_mm);
    const double dev = value_mm - mean;  // residual against the slice mean

    if (std::fabs(dev) <= k * sigma) {
        acc_->add(value_mm);
        return Verdict::Accept;
    }
    if (std::fabs(dev) >= w) {
        // beyond the plausibility bound: physically implausible, eliminate
        return Verdict::GrossError;
    }
    return start_pending(value_mm, mean, sigma);
}

Verdict StreamClassifier::start_pending(double value_mm, double old_mean, double old_sigma) {
    pending_.clear();
    pending_.push_back(value_mm);
    pending_mean_mm_ = old_mean;
    pending_sigma_mm_ = old_sigma;
    pending_sign_ = value_mm > old_mean ? 1 : -1;
    if (pending_.size() >= cfg_.confirm_count) return confirm_deformation();
    return Verdict::DeformationPending;
}

Verdict StreamClassifier::confirm_deformation() {
    // Deformation accepted: the confidence interval is rebuilt around the new
    // level by reseeding the slice from the confirming samples.
    acc_.emplace(pending_.front(), cfg_.slice_len);
    for (double v : pending_) acc_->add(v);
    pending_.clear();
    pending_sign_ = 0;
    return Verdict::DeformationConfirmed;
}

}  // namespace geomon::outlier
