#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "epcgate/registry.hpp"

namespace epcgate {

struct ResolverConfig {
    std::optional<NetId> default_net_id;
    // When set, the registry is rewritten after every successful
    // registration, so the on-disk file stays valid at all times.
    std::optional<std::filesystem::path> registry_path;
};

// Line protocol: one request per line, verbs MAP / RESOLVE / REVERSE /
// STATS / QUIT with key=value arguments. Every request yields exactly one
// response line starting "OK " or "ERR "; the connection survives ERR.
// Positions in wire-level error details are 1-based (human-facing), while
// the library reports 0-based indices.
class ResolverService {
  public:
    explicit ResolverService(Registry registry = {}, ResolverConfig config = {});

    struct Reply {
        std::string text;
        bool close = false;
    };

    Reply handle_line(std::string_view line);

    // Snapshot accessors (lock internally).
    std::size_t entry_count() const;
    void save_registry(const std::filesystem::path& path) const;
    Registry registry_copy() const;

  private:
    std::string handle_map(const std::vector<std::pair<std::string, std::string>>& args);
    std::string handle_resolve(const std::vector<std::pair<std::string, std::string>>& args);
    std::string handle_reverse(const std::vector<std::pair<std::string, std::string>>& args);
    std::string handle_stats();

    mutable std::mutex mu_;
    Registry registry_;
    ResolverConfig config_;
    std::uint64_t maps_ = 0;
    std::uint64_t collisions_ = 0;
    std::vector<std::uint64_t> map_us_;
};

// TCP front end. start() binds and spawns the accept loop; stop() shuts
// everything down and joins. Port 0 binds an ephemeral port, readable via
// port() afterwards.
class ResolverServer {
  public:
    explicit ResolverServer(ResolverService& service);
    ~ResolverServer();

    ResolverServer(const ResolverServer&) = delete;
    ResolverServer& operator=(const ResolverServer&) = delete;

    void start(const std::string& host, std::uint16_t port);  // throws on bind failure
    void stop();

    std::uint16_t port() const { return port_; }

  private:
    void accept_loop();
    void serve_connection(int fd);

    ResolverService& service_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::thread accept_thread_;
    std::mutex workers_mu_;
    std::vector<std::thread> workers_;
};

}  // namespace epcgate
