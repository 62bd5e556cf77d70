#include "geomon/service.hpp"

#include <charconv>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace geomon::store {

namespace {

std::optional<std::int64_t> parse_i64(const std::string& s) {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

void reply_json(httplib::Response& res, int status, const nlohmann::json& j) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
    reply_json(res, status, nlohmann::json{{"error", message}});
}

}  // namespace

struct QueryService::Impl {
    const LogStore& store;
    httplib::Server server;
    std::thread thread;

    explicit Impl(const LogStore& s) : store(s) { install_routes(); }

    void install_routes() {
        server.Get("/api/stations", [this](const httplib::Request&, httplib::Response& res) {
            try {
                nlohmann::json stations = nlohmann::json::array();
                for (int id : store.stations()) {
                    stations.push_back({{"station_id", id},
                                        {"displacement_records", store.displacement_count(id)}});
                }
                reply_json(res, 200, {{"stations", stations}});
            } catch (const std::exception& e) {
                reply_error(res, 500, e.what());
            }
        });

        server.Get(R"(/api/stations/(\d+)/displacements)",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       const auto id = parse_i64(req.matches[1]);
                       if (!id) return reply_error(res, 400, "bad station id");
                       if (!req.has_param("from") || !req.has_param("to"))
                           return reply_error(res, 400, "from and to (ms) are required");
                       const auto from = parse_i64(req.get_param_value("from"));
                       const auto to = parse_i64(req.get_param_value("to"));
                       if (!from || !to) return reply_error(res, 400, "from/to must be integer ms");
                       if (*from > *to) return reply_error(res, 400, "from exceeds to");
                       try {
                           const auto recs = store.query_range(static_cast<int>(*id), *from, *to);
                           reply_json(res, 200,
                                      {{"station_id", *id},
                                       {"from_ms", *from},
                                       {"to_ms", *to},
                                       {"displacements", recs}});
                       } catch (const std::exception& e) {
                           reply_error(res, 500, e.what());
                       }
                   });

        server.Get(R"(/api/stations/(\d+)/latest)",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       const auto id = parse_i64(req.matches[1]);
                       if (!id) return reply_error(res, 400, "bad station id");
                       try {
                           const auto rec = store.latest(static_cast<int>(*id));
                           if (!rec) return reply_error(res, 404, "no records for station");
                           reply_json(res, 200, *rec);
                       } catch (const std::exception& e) {
                           reply_error(res, 500, e.what());
                       }
                   });

        server.Get("/api/alerts", [this](const httplib::Request& req, httplib::Response& res) {
            std::int64_t since = 0;
            if (req.has_param("since")) {
                const auto v = parse_i64(req.get_param_value("since"));
                if (!v) return reply_error(res, 400, "since must be integer ms");
                since = *v;
            }
            try {
                reply_json(res, 200, {{"since_ms", since}, {"alerts", store.alerts_since(since)}});
            } catch (const std::exception& e) {
                reply_error(res, 500, e.what());
            }
        });
    }
};

QueryService::QueryService(const LogStore& store) : impl_(std::make_unique<Impl>(store)) {}

QueryService::~QueryService() { stop(); }

int QueryService::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) return -1;
    } else if (!impl_->server.bind_to_port(host, port)) {
        return -1;
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

bool QueryService::run(const std::string& host, int port) {
    return impl_->server.listen(host, port);
}

void QueryService::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace geomon::store
