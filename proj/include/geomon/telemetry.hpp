#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "geomon/linksim.hpp"

namespace geomon::wire {

// Edge -> cloud telemetry: QoS-1 style publish/acknowledge over a lossy
// byte channel, one text line per packet:
//
//   PUB <topic> <message_id> <base64 payload>\n
//   ACK <message_id>\n
//
// Message ids are dense per topic, starting at zero, strictly increasing;
// a redelivery carries the same id. The receiver acknowledges every
// delivery, accepts each id at most once, and hands payloads to its sink in
// id order per topic.

struct TelemetryEnvelope {
    std::string topic;
    std::uint64_t message_id = 0;
    std::vector<std::uint8_t> payload;
};

std::string encode_pub_line(const TelemetryEnvelope& env);
std::optional<TelemetryEnvelope> parse_pub_line(std::string_view line);
std::string encode_ack_line(std::uint64_t message_id);
std::optional<std::uint64_t> parse_ack_line(std::string_view line);

enum class ReceiveOutcome { Accepted, Duplicate };

// The dedup store plus ordered release. Shared by every publisher session of
// a deployment; this is the single serialization point on the receive side.
class TelemetryReceiver {
public:
    using Sink = std::function<void(const TelemetryEnvelope&)>;

    explicit TelemetryReceiver(Sink sink);

    /// One inbound packet (one line). Returns the ack lines to send back;
    /// malformed packets produce no ack and are counted.
    std::vector<std::string> on_packet(std::span<const std::uint8_t> packet);

    /// Dedup decision for a well-formed envelope; accepted payloads are
    /// released to the sink once every lower id of the topic has arrived.
    ReceiveOutcome accept(TelemetryEnvelope env);

    /// Releases everything still held back (in id order, skipping gaps).
    /// Call when a stream is known to be complete.
    void flush();

    struct Counters {
        std::uint64_t accepted = 0;
        std::uint64_t duplicates = 0;
        std::uint64_t malformed = 0;
        std::uint64_t released = 0;
    };
    const Counters& counters() const { return counters_; }

private:
    struct TopicState {
        std::uint64_t next_release = 0;
        std::map<std::uint64_t, TelemetryEnvelope> holdback;
        std::set<std::uint64_t> seen;  // ids >= next_release already accepted
    };

    void release_ready(TopicState& ts);

    Sink sink_;
    std::map<std::string, TopicState> topics_;
    Counters counters_;
};

struct PublisherConfig {
    int max_tries = 5;             // per publish call
    std::size_t window = 16;       // in-flight messages
    std::uint64_t timeout_ticks = 2;  // virtual ticks before a retransmit
};

struct PublishResult {
    bool delivered = false;
    int tries = 0;
    TelemetryEnvelope envelope;  // carries the undelivered payload on failure
};

// One publisher session: a window of in-flight messages pushed through a
// seeded lossy data link, acks returning over a second lossy link, bounded
// exponential backoff between tries. Time is virtual, so runs are
// deterministic and instant.
class TelemetrySession {
public:
    TelemetrySession(std::string topic, TelemetryReceiver& receiver,
                     const LinkSimConfig& link_cfg, PublisherConfig pub_cfg = {});

    /// Next envelope for this session's topic (dense id assignment).
    TelemetryEnvelope make_envelope(std::vector<std::uint8_t> payload);

    /// At-least-once delivery of one message; blocks (virtually) until acked
    /// or the try budget is exhausted.
    PublishResult publish(TelemetryEnvelope env);

    /// Pipelined delivery of a batch; results in submission order.
    std::vector<PublishResult> publish_stream(std::vector<TelemetryEnvelope> envelopes);

    const std::string& topic() const { return topic_; }
    const LinkCounters& data_link_counters() const { return data_link_.counters(); }
    const LinkCounters& ack_link_counters() const { return ack_link_.counters(); }
    std::uint64_t retransmissions() const { return retransmissions_; }
    std::uint64_t next_message_id() const { return next_id_; }

private:
    void pump();

    std::string topic_;
    TelemetryReceiver& receiver_;
    LossyLink data_link_;
    LossyLink ack_link_;
    PublisherConfig cfg_;
    std::uint64_t next_id_ = 0;
    std::uint64_t retransmissions_ = 0;
};

}  // namespace geomon::wire
