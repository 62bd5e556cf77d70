#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace geomon::lowpass {

/// Attenuation targets a low-pass design has to meet.
struct FilterDesignSpec {
    double passband_edge_hz = 0.5;   // Omega_p
    double stopband_edge_hz = 1.0;   // Omega_s
    double passband_atten_db = 1.0;  // alpha_p, max loss inside the passband
    double stopband_atten_db = 20.0; // alpha_s, min loss at the stopband edge
    double sample_rate_hz = 5.0;
    double cutoff_hz = 0.5;          // realized -3 dB point

    // Default monitoring spec: 5 Hz stream, 0.5 Hz cutoff, one octave
    // transition, 1/20 dB targets. Yields a 5th-order design.
    static FilterDesignSpec defaults(double sample_rate_hz = 5.0);

    void validate() const;  // throws std::invalid_argument
};

/// Smallest Butterworth order meeting the spec's attenuation targets:
/// N = ceil( lg sqrt((10^(0.1 as) - 1) / (10^(0.1 ap) - 1)) / lg(Ws/Wp) ),
/// clamped to at least 1.
int required_order(const FilterDesignSpec& spec);
int required_order(double passband_atten_db, double stopband_atten_db, double edge_ratio);

/// Analytic Butterworth amplitude |H(w)| = 1 / sqrt(1 + (w/wc)^(2N)).
double butterworth_gain(int order, double w_hz, double cutoff_hz);

/// One second-order section, a0 normalized to 1.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

class StreamState;

// Realized digital Butterworth low-pass: analog prototype poles, cutoff
// pre-warped for the bilinear mapping, cascaded into ceil(N/2) second-order
// sections each normalized to unit DC gain.
class DigitalFilter {
public:
    // order in [1, 20], 0 < cutoff < sample_rate/2; throws otherwise
    static DigitalFilter design(int order, double cutoff_hz, double sample_rate_hz);

    int order() const { return order_; }
    double cutoff_hz() const { return cutoff_hz_; }
    double sample_rate_hz() const { return sample_rate_hz_; }
    std::span<const Biquad> sections() const { return sections_; }
    std::span<const std::complex<double>> poles() const { return poles_; }

    /// Cascade magnitude on the unit circle at frequency w (Hz).
    double magnitude(double w_hz) const;

    StreamState make_state() const;

private:
    DigitalFilter() = default;

    int order_ = 0;
    double cutoff_hz_ = 0.0;
    double sample_rate_hz_ = 0.0;
    std::vector<Biquad> sections_;
    std::vector<std::complex<double>> poles_;
};

/// Per-channel delay registers (two per section), transposed direct form II.
class StreamState {
public:
    StreamState() = default;
    explicit StreamState(std::size_t n_sections) : regs_(n_sections, {0.0, 0.0}) {}

    void reset();

    // Preload the registers to the steady state for a constant input, so the
    // next output is already `level` instead of a transient from zero.
    void prime(const DigitalFilter& filter, double level);

    std::size_t n_sections() const { return regs_.size(); }

private:
    friend double process_sample(const DigitalFilter&, StreamState&, double);
    std::vector<std::array<double, 2>> regs_;
};

/// Causal single-sample step through the cascade.
double process_sample(const DigitalFilter& filter, StreamState& state, double x);

/// Convenience whole-sequence form; identical arithmetic to sample-at-a-time.
std::vector<double> process(const DigitalFilter& filter, StreamState& state,
                            std::span<const double> xs);

}  // namespace geomon::lowpass
