#include "epcgate/resolver.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cctype>
#include <chrono>
#include <cstring>
#include <algorithm>

#include "epcgate/batch.hpp"

namespace epcgate {

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

struct ParseFailure {
    std::string detail;
};

using Args = std::vector<std::pair<std::string, std::string>>;

Args parse_args(const std::vector<std::string_view>& tokens,
                const std::vector<std::string_view>& allowed) {
    Args args;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        auto token = tokens[i];
        auto eq = token.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw ParseFailure{"malformed-token=" + std::string(token)};
        }
        std::string key(token.substr(0, eq));
        std::string value(token.substr(eq + 1));
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ParseFailure{"unknown-key=" + key};
        }
        for (const auto& [k, v] : args) {
            if (k == key) {
                throw ParseFailure{"duplicate-key=" + key};
            }
        }
        args.emplace_back(std::move(key), std::move(value));
    }
    return args;
}

const std::string* find_arg(const Args& args, std::string_view key) {
    for (const auto& [k, v] : args) {
        if (k == key) return &v;
    }
    return nullptr;
}

// Wire spelling of a library error. Positions go out 1-based.
std::string wire_error(const Error& e) {
    if (e.code() == Errc::AddressCollision) {
        return "ERR collision " + e.detail();
    }
    std::string out = "ERR " + std::string(e.name());
    if (e.position()) {
        out += " position=" + std::to_string(*e.position() + 1);
    }
    return out;
}

}  // namespace

ResolverService::ResolverService(Registry registry, ResolverConfig config)
    : registry_(std::move(registry)), config_(std::move(config)) {}

ResolverService::Reply ResolverService::handle_line(std::string_view line) {
    auto tokens = tokenize(line);
    if (tokens.empty()) {
        return {"ERR parse empty-request", false};
    }
    std::string_view verb = tokens[0];
    try {
        if (verb == "MAP") {
            static const std::vector<std::string_view> allowed = {
                "source", "mode", "netid", "tag", "toggle",
                "epc",    "epcform", "epcbits", "serial", "radix", "mb10"};
            return {handle_map(parse_args(tokens, allowed)), false};
        }
        if (verb == "RESOLVE") {
            static const std::vector<std::string_view> allowed = {"address"};
            return {handle_resolve(parse_args(tokens, allowed)), false};
        }
        if (verb == "REVERSE") {
            static const std::vector<std::string_view> allowed = {"tag"};
            return {handle_reverse(parse_args(tokens, allowed)), false};
        }
        if (verb == "STATS") {
            if (tokens.size() > 1) {
                return {"ERR parse unexpected-args", false};
            }
            return {handle_stats(), false};
        }
        if (verb == "QUIT") {
            if (tokens.size() > 1) {
                return {"ERR parse unexpected-args", false};
            }
            return {"OK bye", true};
        }
        return {"ERR parse unknown-verb=" + std::string(verb), false};
    } catch (const ParseFailure& f) {
        return {"ERR parse " + f.detail, false};
    }
}

std::string ResolverService::handle_map(const Args& args) {
    const std::string* source = find_arg(args, "source");
    if (!source) throw ParseFailure{"missing-key=source"};
    if (*source != "uii" && *source != "tid") {
        throw ParseFailure{"bad-source=" + *source};
    }

    MappingMode mode = MappingMode::canonical;
    if (const std::string* m = find_arg(args, "mode")) {
        auto parsed = mode_from_string(*m);
        if (!parsed) throw ParseFailure{"bad-mode=" + *m};
        mode = *parsed;
    }

    NetId net_id;
    if (const std::string* n = find_arg(args, "netid")) {
        try {
            net_id = parse_netid(*n);
        } catch (const Error& e) {
            return wire_error(e);
        }
    } else if (config_.default_net_id) {
        net_id = *config_.default_net_id;
    } else {
        throw ParseFailure{"missing-key=netid"};
    }

    BatchRecord record;
    record.kind =
        *source == "uii" ? BatchRecord::Kind::uii : BatchRecord::Kind::tid;
    if (const std::string* v = find_arg(args, "toggle")) {
        if (*v == "0") record.toggle = 0;
        else if (*v == "1") record.toggle = 1;
        else throw ParseFailure{"bad-toggle=" + *v};
    }
    if (const std::string* v = find_arg(args, "epc")) record.epc = *v;
    if (const std::string* v = find_arg(args, "epcform")) {
        if (*v != "decimal" && *v != "hex") throw ParseFailure{"bad-epcform=" + *v};
        record.epcform = *v;
    }
    if (const std::string* v = find_arg(args, "epcbits")) {
        std::size_t bits = 0;
        for (char c : *v) {
            if (c < '0' || c > '9' || bits > 100000) throw ParseFailure{"bad-epcbits=" + *v};
            bits = bits * 10 + static_cast<std::size_t>(c - '0');
        }
        record.epcbits = bits;
    }
    if (const std::string* v = find_arg(args, "serial")) record.serial = *v;
    if (const std::string* v = find_arg(args, "radix")) {
        if (*v == "10") record.radix = 10;
        else if (*v == "16") record.radix = 16;
        else return "ERR InvalidRadix radix=" + *v;
    }
    if (const std::string* v = find_arg(args, "mb10")) record.mb10 = *v;
    if (const std::string* v = find_arg(args, "tag")) record.tag = *v;

    auto t0 = std::chrono::steady_clock::now();
    MappedAddress mapped;
    std::string formatted;
    try {
        mapped = map_record(record, net_id, mode);
        formatted = format_ipv6(mapped.address);
    } catch (const Error& e) {
        return wire_error(e);
    }
    auto elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();

    std::lock_guard<std::mutex> lock(mu_);
    if (!record.tag.empty()) {
        try {
            registry_.register_entry(make_entry(mapped, now_utc()));
        } catch (const Error& e) {
            if (e.code() == Errc::AddressCollision) {
                ++collisions_;
            }
            return wire_error(e);
        }
        if (config_.registry_path) {
            registry_.save_file(*config_.registry_path);
        }
    }
    ++maps_;
    map_us_.push_back(static_cast<std::uint64_t>(elapsed));
    return "OK " + formatted;
}

std::string ResolverService::handle_resolve(const Args& args) {
    const std::string* address = find_arg(args, "address");
    if (!address) throw ParseFailure{"missing-key=address"};
    Ipv6Address addr;
    try {
        addr = parse_ipv6(*address);
    } catch (const Error&) {
        throw ParseFailure{"bad-address=" + *address};
    }
    std::lock_guard<std::mutex> lock(mu_);
    const RegistryEntry* entry = registry_.lookup_by_address(addr);
    if (!entry) {
        return "ERR not-found";
    }
    return "OK tag=" + entry->tag_key + " dispatch=" + std::string(to_string(entry->dispatch)) +
           " mode=" + std::string(to_string(entry->mode));
}

std::string ResolverService::handle_reverse(const Args& args) {
    const std::string* tag = find_arg(args, "tag");
    if (!tag) throw ParseFailure{"missing-key=tag"};
    std::lock_guard<std::mutex> lock(mu_);
    const RegistryEntry* entry = registry_.lookup_by_tag(*tag);
    if (!entry) {
        return "ERR not-found";
    }
    return "OK address=" + format_ipv6(entry->address) +
           " dispatch=" + std::string(to_string(entry->dispatch)) +
           " mode=" + std::string(to_string(entry->mode));
}

std::string ResolverService::handle_stats() {
    std::lock_guard<std::mutex> lock(mu_);
    std::uint64_t median = 0;
    if (!map_us_.empty()) {
        std::vector<std::uint64_t> sorted = map_us_;
        std::sort(sorted.begin(), sorted.end());
        std::size_t n = sorted.size();
        median = n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2;
    }
    return "OK entries=" + std::to_string(registry_.size()) +
           " maps=" + std::to_string(maps_) +
           " collisions=" + std::to_string(collisions_) +
           " median_map_us=" + std::to_string(median);
}

std::size_t ResolverService::entry_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return registry_.size();
}

void ResolverService::save_registry(const std::filesystem::path& path) const {
    std::lock_guard<std::mutex> lock(mu_);
    registry_.save_file(path);
}

Registry ResolverService::registry_copy() const {
    std::lock_guard<std::mutex> lock(mu_);
    return registry_;
}

ResolverServer::ResolverServer(ResolverService& service) : service_(service) {}

ResolverServer::~ResolverServer() {
    stop();
}

void ResolverServer::start(const std::string& host, std::uint16_t port) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) {
        throw std::runtime_error("socket: " + std::string(std::strerror(errno)));
    }
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw std::runtime_error("bad listen host '" + host + "'");
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        std::string err = std::strerror(errno);
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw std::runtime_error("bind " + host + ":" + std::to_string(port) + ": " + err);
    }
    if (::listen(listen_fd_, 16) != 0) {
        std::string err = std::strerror(errno);
        ::close(listen_fd_);
        listen_fd_ = -1;
        throw std::runtime_error("listen: " + err);
    }
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);

    stopping_ = false;
    accept_thread_ = std::thread([this] { accept_loop(); });
}

void ResolverServer::stop() {
    if (listen_fd_ < 0 && !accept_thread_.joinable()) {
        return;
    }
    stopping_ = true;
    if (accept_thread_.joinable()) {
        accept_thread_.join();
    }
    if (listen_fd_ >= 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    std::vector<std::thread> workers;
    {
        std::lock_guard<std::mutex> lock(workers_mu_);
        workers.swap(workers_);
    }
    for (auto& w : workers) {
        if (w.joinable()) w.join();
    }
}

void ResolverServer::accept_loop() {
    while (!stopping_) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        int rc = ::poll(&pfd, 1, 100);
        if (rc <= 0) {
            continue;
        }
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            continue;
        }
        std::lock_guard<std::mutex> lock(workers_mu_);
        workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
}

void ResolverServer::serve_connection(int fd) {
    std::string buffer;
    char chunk[4096];
    bool open = true;
    while (open && !stopping_) {
        pollfd pfd{fd, POLLIN, 0};
        int rc = ::poll(&pfd, 1, 100);
        if (rc < 0) break;
        if (rc == 0) continue;
        ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
        if (n <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t pos;
        while (open && (pos = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, pos);
            buffer.erase(0, pos + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            auto reply = service_.handle_line(line);
            reply.text.push_back('\n');
            const char* data = reply.text.data();
            std::size_t remaining = reply.text.size();
            while (remaining > 0) {
                ssize_t sent = ::send(fd, data, remaining, MSG_NOSIGNAL);
                if (sent <= 0) {
                    open = false;
                    break;
                }
                data += sent;
                remaining -= static_cast<std::size_t>(sent);
            }
            if (reply.close) {
                open = false;
            }
        }
    }
    ::close(fd);
}

}  // namespace epcgate
