#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "geomon/base64.hpp"
#include "geomon/crc16.hpp"
#include "geomon/frame.hpp"
#include "geomon/linksim.hpp"
#include "geomon/rng.hpp"
#include "geomon/telemetry.hpp"

using namespace geomon;
using namespace geomon::wire;

namespace {

// Independent CRC-16/CCITT-FALSE: table-driven, built from the polynomial.
// Reference oracle for the bitwise implementation under test.
std::uint16_t crc16_reference(std::span<const std::uint8_t> data) {
    static const auto table = [] {
        std::array<std::uint16_t, 256> t{};
        for (int i = 0; i < 256; ++i) {
            std::uint16_t c = static_cast<std::uint16_t>(i << 8);
            for (int b = 0; b < 8; ++b)
                c = (c & 0x8000) ? static_cast<std::uint16_t>((c << 1) ^ 0x1021)
                                 : static_cast<std::uint16_t>(c << 1);
            t[static_cast<std::size_t>(i)] = c;
        }
        return t;
    }();
    std::uint16_t crc = 0xFFFF;
    for (std::uint8_t byte : data)
        crc = static_cast<std::uint16_t>((crc << 8) ^ table[((crc >> 8) ^ byte) & 0xFF]);
    return crc;
}

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("crc16 check value and oracle agreement") {
    const std::string check = "123456789";
    const auto data = bytes_of(check);
    CHECK(crc16_ccitt_false(data) == 0x29B1);
    CHECK(crc16_reference(data) == 0x29B1);

    Rng rng(6);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::uint8_t> buf(rng.uniform_index(64));
        for (auto& b : buf) b = static_cast<std::uint8_t>(rng.uniform_index(256));
        CHECK(crc16_ccitt_false(buf) == crc16_reference(buf));
    }
}

TEST_CASE("golden frame bytes") {
    StationFrame f;
    f.station_id = 7;
    f.sequence = 1;
    f.epoch_ms = 1'700'000'000'000ULL;
    f.east_um = 800'000;  // the 0.8 m baseline, in micrometers
    f.north_um = 0;
    f.up_um = 0;
    f.fix_quality = 2;  // fixed

    const auto bytes = encode_frame(f);
    const std::vector<std::uint8_t> expected = {
        0xA5, 0x5A,              // magic
        0x01,                    // version
        0x00, 0x07,              // station
        0x00, 0x01,              // sequence
        0x00, 0x00, 0x01, 0x8B, 0xCF, 0xE5, 0x68, 0x00,  // epoch 1700000000000
        0x00, 0x0C, 0x35, 0x00,  // east  +800000
        0x00, 0x00, 0x00, 0x00,  // north
        0x00, 0x00, 0x00, 0x00,  // up
        0x02,                    // fix
    };
    REQUIRE(bytes.size() == kStationFrameSize);
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(bytes[i] == expected[i]);
    // CRC from the independent reference implementation
    const std::uint16_t crc = crc16_reference({bytes.data(), 28});
    CHECK(bytes[28] == static_cast<std::uint8_t>(crc >> 8));
    CHECK(bytes[29] == static_cast<std::uint8_t>(crc & 0xFF));
}

TEST_CASE("frame round trip over random field sets") {
    Rng rng(9);
    for (int i = 0; i < 500; ++i) {
        StationFrame f;
        f.station_id = static_cast<std::uint16_t>(rng.uniform_index(65536));
        f.sequence = static_cast<std::uint16_t>(rng.uniform_index(65536));
        f.epoch_ms = rng.next_u64();
        f.east_um = static_cast<std::int32_t>(rng.next_u64());
        f.north_um = static_cast<std::int32_t>(rng.next_u64());
        f.up_um = static_cast<std::int32_t>(rng.next_u64());
        f.fix_quality = static_cast<std::uint8_t>(rng.uniform_index(3));

        StationFrame back;
        REQUIRE(decode_frame(encode_frame(f), back) == DecodeStatus::Ok);
        CHECK(back == f);
    }
}

TEST_CASE("frame decode distinguishes its failure modes") {
    StationFrame f;
    f.station_id = 3;
    auto bytes = encode_frame(f);
    StationFrame out;

    CHECK(decode_frame({bytes.data(), 29}, out) == DecodeStatus::Truncated);
    CHECK(decode_frame({}, out) == DecodeStatus::Truncated);

    auto bad_magic = bytes;
    bad_magic[0] ^= 0xFF;
    CHECK(decode_frame(bad_magic, out) == DecodeStatus::BadMagic);

    auto bad_version = bytes;
    bad_version[2] = 9;
    CHECK(decode_frame(bad_version, out) == DecodeStatus::BadVersion);

    auto bad_crc = bytes;
    bad_crc[17] ^= 0x01;
    CHECK(decode_frame(bad_crc, out) == DecodeStatus::BadCrc);
}

TEST_CASE("exhaustive single-bit fuzz on 100 frames rejects every mutation") {
    Rng rng(31);
    for (int n = 0; n < 100; ++n) {
        StationFrame f;
        f.station_id = static_cast<std::uint16_t>(rng.uniform_index(65536));
        f.sequence = static_cast<std::uint16_t>(rng.uniform_index(65536));
        f.epoch_ms = rng.next_u64();
        f.east_um = static_cast<std::int32_t>(rng.next_u64());
        f.north_um = static_cast<std::int32_t>(rng.next_u64());
        f.up_um = static_cast<std::int32_t>(rng.next_u64());
        f.fix_quality = static_cast<std::uint8_t>(rng.uniform_index(3));
        const auto bytes = encode_frame(f);

        for (std::size_t bit = 0; bit < kStationFrameSize * 8; ++bit) {
            auto mutated = bytes;
            mutated[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            StationFrame out;
            const DecodeStatus status = decode_frame(mutated, out);
            CHECK(status != DecodeStatus::Ok);
            if (bit >= 3 * 8) {
                // everything beyond magic/version is CRC-protected
                CHECK(status == DecodeStatus::BadCrc);
            }
        }
    }
}

TEST_CASE("base64 round trip and rejection") {
    Rng rng(2);
    for (int i = 0; i < 300; ++i) {
        std::vector<std::uint8_t> buf(rng.uniform_index(100));
        for (auto& b : buf) b = static_cast<std::uint8_t>(rng.uniform_index(256));
        const auto text = base64_encode(buf);
        const auto back = base64_decode(text);
        REQUIRE(back.has_value());
        CHECK(*back == buf);
    }
    CHECK_FALSE(base64_decode("a").has_value());
    CHECK_FALSE(base64_decode("ab=c").has_value());
    CHECK_FALSE(base64_decode("!!!!").has_value());
    CHECK(base64_decode("")->empty());
}

TEST_CASE("lossless link delivers in order") {
    LinkSimConfig cfg;
    cfg.seed = 1;
    LossyLink link(cfg);
    for (int i = 0; i < 10; ++i) link.send({static_cast<std::uint8_t>(i)});
    const auto out = link.drain();
    REQUIRE(out.size() == 10);
    for (int i = 0; i < 10; ++i) CHECK(out[static_cast<std::size_t>(i)][0] == i);
}

TEST_CASE("link simulation is deterministic per seed") {
    LinkSimConfig cfg;
    cfg.loss_prob = 0.2;
    cfg.duplicate_prob = 0.2;
    cfg.corrupt_prob = 0.1;
    cfg.reorder_window = 4;
    cfg.seed = 77;

    const auto run = [&] {
        LossyLink link(cfg);
        std::vector<std::vector<std::uint8_t>> got;
        for (int i = 0; i < 200; ++i) {
            link.send({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(i * 7)});
            if (i % 5 == 0)
                for (auto& p : link.drain()) got.push_back(std::move(p));
        }
        for (auto& p : link.drain()) got.push_back(std::move(p));
        return got;
    };
    CHECK(run() == run());
}

TEST_CASE("pub/ack line round trip") {
    TelemetryEnvelope env{"site/1/station/7/displacement", 42, bytes_of("hello")};
    const auto line = encode_pub_line(env);
    const auto back = parse_pub_line(line);
    REQUIRE(back.has_value());
    CHECK(back->topic == env.topic);
    CHECK(back->message_id == 42);
    CHECK(back->payload == env.payload);

    CHECK(parse_ack_line(encode_ack_line(42)) == 42);
    CHECK_FALSE(parse_pub_line("PUB broken\n").has_value());
    CHECK_FALSE(parse_ack_line("ACK x\n").has_value());
    CHECK_FALSE(parse_pub_line("PUB t 1 aGk=").has_value());  // missing newline
}

TEST_CASE("receiver dedup accepts each id once and acks every delivery") {
    std::vector<std::uint64_t> delivered;
    TelemetryReceiver rx([&](const TelemetryEnvelope& env) { delivered.push_back(env.message_id); });

    TelemetryEnvelope e0{"t", 0, bytes_of("a")};
    TelemetryEnvelope e1{"t", 1, bytes_of("b")};
    CHECK(rx.accept(e0) == ReceiveOutcome::Accepted);
    CHECK(rx.accept(e0) == ReceiveOutcome::Duplicate);
    CHECK(rx.accept(e1) == ReceiveOutcome::Accepted);
    CHECK(rx.accept(e0) == ReceiveOutcome::Duplicate);
    CHECK(delivered == std::vector<std::uint64_t>{0, 1});

    const auto acks = rx.on_packet(bytes_of(encode_pub_line(e1)));
    REQUIRE(acks.size() == 1);
    CHECK(acks[0] == encode_ack_line(1));
    CHECK(rx.counters().duplicates == 3);
}

TEST_CASE("receiver releases payloads in id order per topic") {
    std::vector<std::uint64_t> order;
    TelemetryReceiver rx([&](const TelemetryEnvelope& env) { order.push_back(env.message_id); });
    rx.accept({"t", 2, {}});
    rx.accept({"t", 0, {}});
    CHECK(order == std::vector<std::uint64_t>{0});  // 2 held back
    rx.accept({"t", 1, {}});
    CHECK(order == std::vector<std::uint64_t>{0, 1, 2});
}

TEST_CASE("publish over a clean link delivers exactly once, first try") {
    TelemetryReceiver rx([](const TelemetryEnvelope&) {});
    LinkSimConfig clean;
    clean.seed = 3;
    TelemetrySession session("site/1/station/7/displacement", rx, clean);

    for (int i = 0; i < 20; ++i) {
        auto res = session.publish(session.make_envelope(bytes_of("x" + std::to_string(i))));
        CHECK(res.delivered);
        CHECK(res.tries == 1);
    }
    CHECK(rx.counters().accepted == 20);
    CHECK(rx.counters().duplicates == 0);
    CHECK(session.retransmissions() == 0);
}

TEST_CASE("duplicating link still stores each message once") {
    std::vector<std::uint64_t> ids;
    TelemetryReceiver rx([&](const TelemetryEnvelope& env) { ids.push_back(env.message_id); });
    LinkSimConfig cfg;
    cfg.duplicate_prob = 0.5;
    cfg.seed = 11;
    TelemetrySession session("t", rx, cfg);

    std::vector<TelemetryEnvelope> batch;
    for (int i = 0; i < 200; ++i) batch.push_back(session.make_envelope(bytes_of("p")));
    for (const auto& r : session.publish_stream(std::move(batch))) CHECK(r.delivered);

    CHECK(ids.size() == 200);
    std::set<std::uint64_t> unique(ids.begin(), ids.end());
    CHECK(unique.size() == 200);
}

TEST_CASE("lossy reordering link: effectively-once storage, order restored") {
    std::vector<std::uint64_t> ids;
    TelemetryReceiver rx([&](const TelemetryEnvelope& env) { ids.push_back(env.message_id); });
    LinkSimConfig cfg;
    cfg.loss_prob = 0.10;
    cfg.duplicate_prob = 0.05;
    cfg.reorder_window = 4;
    cfg.seed = 21;
    TelemetrySession session("t", rx, cfg);

    const int total = 10'000;
    std::vector<TelemetryEnvelope> batch;
    for (int i = 0; i < total; ++i) batch.push_back(session.make_envelope(bytes_of("d")));

    auto results = session.publish_stream(std::move(batch));
    // at-least-once: the caller requeues surfaced failures until done
    for (int round = 0; round < 20; ++round) {
        std::vector<TelemetryEnvelope> retry;
        for (auto& r : results)
            if (!r.delivered) retry.push_back(std::move(r.envelope));
        if (retry.empty()) break;
        results = session.publish_stream(std::move(retry));
    }
    rx.flush();

    REQUIRE(ids.size() == static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) CHECK(ids[static_cast<std::size_t>(i)] == i);
    CHECK(session.retransmissions() > 0);
}

TEST_CASE("publisher gives up after its try budget and surfaces the payload") {
    TelemetryReceiver rx([](const TelemetryEnvelope&) {});
    LinkSimConfig dead;
    dead.loss_prob = 0.999999;  // effectively never delivers
    dead.seed = 5;
    PublisherConfig pcfg;
    pcfg.max_tries = 5;
    TelemetrySession session("t", rx, dead, pcfg);

    auto res = session.publish(session.make_envelope(bytes_of("payload")));
    CHECK_FALSE(res.delivered);
    CHECK(res.tries == 5);
    CHECK(res.envelope.payload == bytes_of("payload"));
}
