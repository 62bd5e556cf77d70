#include "geomon/telemetry.hpp"

#include <algorithm>
#include <charconv>

#include "geomon/base64.hpp"

namespace geomon::wire {

namespace {

std::vector<std::uint8_t> to_bytes(const std::string& s) {
    return {s.begin(), s.end()};
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

std::string encode_pub_line(const TelemetryEnvelope& env) {
    std::string line = "PUB ";
    line += env.topic;
    line += ' ';
    line += std::to_string(env.message_id);
    line += ' ';
    line += base64_encode(env.payload);
    line += '\n';
    return line;
}

std::optional<TelemetryEnvelope> parse_pub_line(std::string_view line) {
    if (line.empty() || line.back() != '\n') return std::nullopt;
    line.remove_suffix(1);
    if (!line.starts_with("PUB ")) return std::nullopt;
    line.remove_prefix(4);

    const auto sp1 = line.find(' ');
    if (sp1 == std::string_view::npos || sp1 == 0) return std::nullopt;
    const auto sp2 = line.find(' ', sp1 + 1);
    if (sp2 == std::string_view::npos) return std::nullopt;

    TelemetryEnvelope env;
    env.topic = std::string(line.substr(0, sp1));
    const auto id = parse_u64(line.substr(sp1 + 1, sp2 - sp1 - 1));
    if (!id) return std::nullopt;
    env.message_id = *id;
    auto payload = base64_decode(line.substr(sp2 + 1));
    if (!payload) return std::nullopt;
    env.payload = std::move(*payload);
    return env;
}

std::string encode_ack_line(std::uint64_t message_id) {
    return "ACK " + std::to_string(message_id) + "\n";
}

std::optional<std::uint64_t> parse_ack_line(std::string_view line) {
    if (line.empty() || line.back() != '\n') return std::nullopt;
    line.remove_suffix(1);
    if (!line.starts_with("ACK ")) return std::nullopt;
    return parse_u64(line.substr(4));
}

TelemetryReceiver::TelemetryReceiver(Sink sink) : sink_(std::move(sink)) {}

std::vector<std::string> TelemetryReceiver::on_packet(std::span<const std::uint8_t> packet) {
    const std::string_view line(reinterpret_cast<const char*>(packet.data()), packet.size());
    auto env = parse_pub_line(line);
    if (!env) {
        ++counters_.malformed;
        return {};
    }
    const std::uint64_t id = env->message_id;
    accept(std::move(*env));
    // every well-formed delivery is acknowledged, duplicates included
    return {encode_ack_line(id)};
}

ReceiveOutcome TelemetryReceiver::accept(TelemetryEnvelope env) {
    TopicState& ts = topics_[env.topic];
    if (env.message_id < ts.next_release || ts.seen.contains(env.message_id)) {
        ++counters_.duplicates;
        return ReceiveOutcome::Duplicate;
    }
    ts.seen.insert(env.message_id);
    ts.holdback.emplace(env.message_id, std::move(env));
    ++counters_.accepted;
    release_ready(ts);
    return ReceiveOutcome::Accepted;
}

void TelemetryReceiver::release_ready(TopicState& ts) {
    while (!ts.holdback.empty() && ts.holdback.begin()->first == ts.next_release) {
        auto node = ts.holdback.extract(ts.holdback.begin());
        ts.seen.erase(node.key());
        if (sink_) sink_(node.mapped());
        ++counters_.released;
        ++ts.next_release;
    }
}

void TelemetryReceiver::flush() {
    for (auto& [topic, ts] : topics_) {
        while (!ts.holdback.empty()) {
            auto node = ts.holdback.extract(ts.holdback.begin());
            ts.seen.erase(node.key());
            if (sink_) sink_(node.mapped());
            ++counters_.released;
            ts.next_release = node.key() + 1;
        }
    }
}

TelemetrySession::TelemetrySession(std::string topic, TelemetryReceiver& receiver,
                                   const LinkSimConfig& link_cfg, PublisherConfig pub_cfg)
    : topic_(std::move(topic)),
      receiver_(receiver),
      data_link_([&] {
          LinkSimConfig c = link_cfg;
          return LossyLink(c);
      }()),
      ack_link_([&] {
          LinkSimConfig c = link_cfg;
          c.seed = link_cfg.seed ^ 0x9E3779B97F4A7C15ULL;  // independent ack stream
          return LossyLink(c);
      }()),
      cfg_(pub_cfg) {
    if (cfg_.max_tries < 1) cfg_.max_tries = 1;
    if (cfg_.window < 1) cfg_.window = 1;
    if (cfg_.timeout_ticks < 1) cfg_.timeout_ticks = 1;
}

TelemetryEnvelope TelemetrySession::make_envelope(std::vector<std::uint8_t> payload) {
    return {topic_, next_id_++, std::move(payload)};
}

PublishResult TelemetrySession::publish(TelemetryEnvelope env) {
    auto results = publish_stream({std::move(env)});
    return std::move(results.front());
}

void TelemetrySession::pump() {
    for (auto& pkt : data_link_.drain()) {
        for (const std::string& ack : receiver_.on_packet(pkt)) {
            ack_link_.send(to_bytes(ack));
        }
    }
}

std::vector<PublishResult> TelemetrySession::publish_stream(
    std::vector<TelemetryEnvelope> envelopes) {
    struct Flight {
        std::size_t result_idx;
        int tries = 0;
        std::uint64_t deadline = 0;
    };

    std::vector<PublishResult> results(envelopes.size());
    for (std::size_t i = 0; i < envelopes.size(); ++i) {
        results[i].envelope = std::move(envelopes[i]);
    }

    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < results.size(); ++i) queue.push_back(i);

    std::map<std::uint64_t, Flight> inflight;  // message id -> flight
    std::uint64_t now = 0;

    const auto send = [&](std::size_t idx, Flight& f) {
        data_link_.send(to_bytes(encode_pub_line(results[idx].envelope)));
        ++f.tries;
        ++results[idx].tries;
        // bounded exponential backoff between tries
        f.deadline = now + (cfg_.timeout_ticks << (f.tries - 1));
        if (f.tries > 1) ++retransmissions_;
    };

    while (!queue.empty() || !inflight.empty()) {
        while (inflight.size() < cfg_.window && !queue.empty()) {
            const std::size_t idx = queue.front();
            queue.pop_front();
            Flight f{idx};
            send(idx, f);
            inflight.emplace(results[idx].envelope.message_id, f);
        }

        pump();

        for (auto& pkt : ack_link_.drain()) {
            const std::string_view line(reinterpret_cast<const char*>(pkt.data()), pkt.size());
            const auto id = parse_ack_line(line);
            if (!id) continue;  // corrupted ack; the retry path covers it
            auto it = inflight.find(*id);
            if (it == inflight.end()) continue;  // ack for an already-settled try
            results[it->second.result_idx].delivered = true;
            inflight.erase(it);
        }

        ++now;
        for (auto it = inflight.begin(); it != inflight.end();) {
            Flight& f = it->second;
            if (f.deadline > now) {
                ++it;
                continue;
            }
            if (f.tries >= cfg_.max_tries) {
                // exhausted: surface the failure, payload intact
                it = inflight.erase(it);
                continue;
            }
            send(f.result_idx, f);
            ++it;
        }
    }
    return results;
}

}  // namespace geomon::wire
