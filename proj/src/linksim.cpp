#include "geomon/linksim.hpp"

#include <stdexcept>

namespace geomon::wire {

void LinkSimConfig::validate() const {
    const auto ok = [](double p) { return p >= 0.0 && p < 1.0; };
    if (!ok(loss_prob) || !ok(duplicate_prob) || !ok(corrupt_prob))
        throw std::invalid_argument("link probabilities must lie in [0, 1)");
}

LossyLink::LossyLink(const LinkSimConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    cfg_.validate();
}

void LossyLink::send(std::vector<std::uint8_t> packet) {
    ++counters_.sent;
    if (rng_.chance(cfg_.loss_prob)) {
        ++counters_.dropped;
        return;
    }
    const bool dup = rng_.chance(cfg_.duplicate_prob);
    enqueue(packet);
    if (dup) {
        ++counters_.duplicated;
        enqueue(std::move(packet));
    }
}

void LossyLink::enqueue(std::vector<std::uint8_t> packet) {
    if (!packet.empty() && rng_.chance(cfg_.corrupt_prob)) {
        ++counters_.corrupted;
        const std::size_t bit = rng_.uniform_index(packet.size() * 8);
        packet[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    }
    // Insert up to reorder_window slots before the back of the queue.
    const std::size_t max_jump = std::min(cfg_.reorder_window, queue_.size());
    const std::size_t jump = rng_.uniform_index(max_jump + 1);
    queue_.insert(queue_.end() - static_cast<std::ptrdiff_t>(jump), std::move(packet));
}

std::vector<std::vector<std::uint8_t>> LossyLink::drain() {
    std::vector<std::vector<std::uint8_t>> out(queue_.begin(), queue_.end());
    counters_.delivered += out.size();
    queue_.clear();
    return out;
}

}  // namespace geomon::wire
