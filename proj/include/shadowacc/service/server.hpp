#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "shadowacc/oracle/march.hpp"
#include "shadowacc/service/whatif.hpp"

namespace shadowacc::service {

struct ServerConfig {
    std::filesystem::path data_root = ".";  ///< one subdirectory per city
    std::string host = "127.0.0.1";
    int port = 8080;                        ///< 0 picks an ephemeral port
    int scenario_cap = kDefaultScenarioCap;
    unsigned threads = 0;                   ///< what-if worker pool size
};

/// HTTP front end:
///   GET  /tiles/{city}/{season}/{z}/{x}/{y}.png   (?source=ge for surrogate tiles)
///   GET  /heights/{city}/{z}/{x}/{y}.png
///   GET  /meta/{city}
///   POST /whatif
class Server {
public:
    explicit Server(ServerConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds the listening socket and returns the bound port.
    int bind();
    /// Serves until stop(); bind() must have succeeded.
    void listen();
    void stop();
    void wait_until_ready() const;
    const ServerConfig& config() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace shadowacc::service
