#pragma once

#include <memory>
#include <string>

#include "geomon/datastore.hpp"

namespace geomon::store {

// Read-only query endpoints over a LogStore:
//
//   GET /api/stations
//   GET /api/stations/{id}/displacements?from=<ms>&to=<ms>
//   GET /api/stations/{id}/latest
//   GET /api/alerts?since=<ms>
//
// JSON bodies, units spelled out in the keys. Malformed queries get a 400
// with an error body; internal failures a 500.
class QueryService {
public:
    explicit QueryService(const LogStore& store);
    ~QueryService();

    QueryService(const QueryService&) = delete;
    QueryService& operator=(const QueryService&) = delete;

    /// Starts serving on a background thread. port 0 picks a free port.
    /// Returns the bound port, or -1 on bind failure.
    int start(const std::string& host, int port);

    /// Serves on the calling thread until stop() (CLI path).
    bool run(const std::string& host, int port);

    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace geomon::store
