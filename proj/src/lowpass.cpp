#include "geomon/lowpass.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geomon::lowpass {

namespace {
constexpr double kPi = std::numbers::pi;
}

FilterDesignSpec FilterDesignSpec::defaults(double sample_rate_hz) {
    FilterDesignSpec s;
    s.sample_rate_hz = sample_rate_hz;
    s.passband_edge_hz = 0.1 * sample_rate_hz;
    s.stopband_edge_hz = 0.2 * sample_rate_hz;
    s.passband_atten_db = 1.0;
    s.stopband_atten_db = 20.0;
    s.cutoff_hz = 0.1 * sample_rate_hz;
    return s;
}

void FilterDesignSpec::validate() const {
    if (!(passband_edge_hz > 0.0) || !(stopband_edge_hz > passband_edge_hz))
        throw std::invalid_argument("need 0 < passband edge < stopband edge");
    if (!(stopband_edge_hz < sample_rate_hz / 2.0))
        throw std::invalid_argument("stopband edge must be below Nyquist");
    if (!(passband_atten_db > 0.0) || passband_atten_db > stopband_atten_db)
        throw std::invalid_argument("need 0 < passband attenuation <= stopband attenuation");
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0))
        throw std::invalid_argument("cutoff must lie in (0, Nyquist)");
}

int required_order(double passband_atten_db, double stopband_atten_db, double edge_ratio) {
    if (!(edge_ratio > 1.0)) throw std::invalid_argument("stopband edge must exceed passband edge");
    if (!(passband_atten_db > 0.0)) throw std::invalid_argument("passband attenuation must be > 0");
    if (stopband_atten_db < passband_atten_db)
        throw std::invalid_argument("stopband attenuation must be >= passband attenuation");

    const double num = std::pow(10.0, 0.1 * stopband_atten_db) - 1.0;
    const double den = std::pow(10.0, 0.1 * passband_atten_db) - 1.0;
    const double n = std::log10(std::sqrt(num / den)) / std::log10(edge_ratio);
    return std::max(1, static_cast<int>(std::ceil(n)));
}

int required_order(const FilterDesignSpec& spec) {
    spec.validate();
    return required_order(spec.passband_atten_db, spec.stopband_atten_db,
                          spec.stopband_edge_hz / spec.passband_edge_hz);
}

double butterworth_gain(int order, double w_hz, double cutoff_hz) {
    if (order < 1) throw std::invalid_argument("order must be >= 1");
    if (!(cutoff_hz > 0.0)) throw std::invalid_argument("cutoff must be > 0");
    if (w_hz < 0.0) throw std::invalid_argument("frequency must be >= 0");
    return 1.0 / std::sqrt(1.0 + std::pow(w_hz / cutoff_hz, 2.0 * order));
}

DigitalFilter DigitalFilter::design(int order, double cutoff_hz, double sample_rate_hz) {
    if (order < 1 || order > 20) throw std::invalid_argument("order must lie in [1, 20]");
    if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample rate must be > 0");
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0))
        throw std::invalid_argument("cutoff must lie in (0, Nyquist)");

    DigitalFilter f;
    f.order_ = order;
    f.cutoff_hz_ = cutoff_hz;
    f.sample_rate_hz_ = sample_rate_hz;

    // Pre-warp the cutoff so the realized -3 dB point lands exactly on
    // cutoff_hz after the bilinear mapping s = 2 fs (z-1)/(z+1).
    const double k = 2.0 * sample_rate_hz;
    const double wa = k * std::tan(kPi * cutoff_hz / sample_rate_hz);

    const auto bilinear = [k](std::complex<double> s) {
        return (k + s) / (k - s);
    };

    // Conjugate prototype pole pairs, scaled by the warped cutoff.
    for (int i = 1; 2 * i <= order; ++i) {
        const double theta = kPi / 2.0 + kPi * (2.0 * i - 1.0) / (2.0 * order);
        const std::complex<double> s = wa * std::complex<double>(std::cos(theta), std::sin(theta));
        const std::complex<double> zp = bilinear(s);

        Biquad q;
        q.a1 = -2.0 * zp.real();
        q.a2 = std::norm(zp);
        // zeros at z = -1, section scaled to unit DC gain
        const double g = (1.0 + q.a1 + q.a2) / 4.0;
        q.b0 = g;
        q.b1 = 2.0 * g;
        q.b2 = g;
        f.sections_.push_back(q);
        f.poles_.push_back(zp);
        f.poles_.push_back(std::conj(zp));
    }
    if (order % 2 != 0) {
        const std::complex<double> zp = bilinear({-wa, 0.0});
        Biquad q;
        q.a1 = -zp.real();
        q.a2 = 0.0;
        const double g = (1.0 + q.a1) / 2.0;
        q.b0 = g;
        q.b1 = g;
        q.b2 = 0.0;
        f.sections_.push_back(q);
        f.poles_.push_back(zp);
    }
    return f;
}

double DigitalFilter::magnitude(double w_hz) const {
    const std::complex<double> zi =
        std::exp(std::complex<double>(0.0, -2.0 * kPi * w_hz / sample_rate_hz_));
    const std::complex<double> zi2 = zi * zi;
    double mag = 1.0;
    for (const Biquad& q : sections_) {
        const std::complex<double> num = q.b0 + q.b1 * zi + q.b2 * zi2;
        const std::complex<double> den = 1.0 + q.a1 * zi + q.a2 * zi2;
        mag *= std::abs(num) / std::abs(den);
    }
    return mag;
}

StreamState DigitalFilter::make_state() const { return StreamState(sections_.size()); }

void StreamState::reset() {
    for (auto& r : regs_) r = {0.0, 0.0};
}

void StreamState::prime(const DigitalFilter& filter, double level) {
    if (regs_.size() != filter.sections().size())
        throw std::invalid_argument("state does not belong to this filter");
    // Every section has unit DC gain, so a constant input `level` flows
    // through unchanged; solve the register fixed point per section.
    for (std::size_t i = 0; i < regs_.size(); ++i) {
        const Biquad& q = filter.sections()[i];
        regs_[i][0] = (1.0 - q.b0) * level;
        regs_[i][1] = (q.b2 - q.a2) * level;
    }
}

double process_sample(const DigitalFilter& filter, StreamState& state, double x) {
    if (state.regs_.size() != filter.sections().size())
        throw std::invalid_argument("state does not belong to this filter");
    double v = x;
    for (std::size_t i = 0; i < state.regs_.size(); ++i) {
        const Biquad& q = filter.sections()[i];
        auto& r = state.regs_[i];
        const double y = q.b0 * v + r[0];
        r[0] = q.b1 * v - q.a1 * y + r[1];
        r[1] = q.b2 * v - q.a2 * y;
        v = y;
    }
    return v;
}

std::vector<double> process(const DigitalFilter& filter, StreamState& state,
                            std::span<const double> xs) {
    std::vector<double> ys;
    ys.reserve(xs.size());
    for (double x : xs) ys.push_back(process_sample(filter, state, x));
    return ys;
}

}  // namespace geomon::lowpass
