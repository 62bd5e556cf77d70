#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "geomon/rng.hpp"

namespace geomon::wire {

struct LinkSimConfig {
    double loss_prob = 0.0;       // [0, 1)
    double duplicate_prob = 0.0;  // [0, 1)
    double corrupt_prob = 0.0;    // [0, 1)
    std::size_t reorder_window = 0;  // frames a delivery may jump ahead of
    std::uint64_t seed = 1;

    void validate() const;  // throws std::invalid_argument
};

struct LinkCounters {
    std::uint64_t sent = 0;
    std::uint64_t dropped = 0;
    std::uint64_t duplicated = 0;
    std::uint64_t corrupted = 0;
    std::uint64_t delivered = 0;
};

// Deterministic lossy byte-packet channel. Packets go in submission order;
// each may be dropped, duplicated, bit-flipped, or inserted up to
// reorder_window slots ahead of earlier undelivered packets. Identical seeds
// reproduce identical delivery traces.
class LossyLink {
public:
    explicit LossyLink(const LinkSimConfig& cfg);

    void send(std::vector<std::uint8_t> packet);

    /// All currently pending deliveries, in delivery order; clears the queue.
    std::vector<std::vector<std::uint8_t>> drain();

    bool pending() const { return !queue_.empty(); }
    const LinkCounters& counters() const { return counters_; }

private:
    void enqueue(std::vector<std::uint8_t> packet);

    LinkSimConfig cfg_;
    Rng rng_;
    std::deque<std::vector<std::uint8_t>> queue_;
    LinkCounters counters_;
};

}  // namespace geomon::wire
