#include "epcgate/registry.hpp"

#include <cctype>
#include <cstdio>
#include <ctime>
#include <fstream>

namespace epcgate {

std::string format_timestamp(Timestamp t) {
    std::time_t secs = std::chrono::system_clock::to_time_t(
        std::chrono::time_point_cast<std::chrono::system_clock::duration>(t));
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[80];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    int y, mo, d, h, mi, s;
    char z;
    if (text.size() != 20) return std::nullopt;
    if (std::sscanf(std::string(text).c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d,
                    &h, &mi, &s, &z) != 7 ||
        z != 'Z') {
        return std::nullopt;
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) {
        return std::nullopt;
    }
    std::tm tm{};
    tm.tm_year = y - 1900;
    tm.tm_mon = mo - 1;
    tm.tm_mday = d;
    tm.tm_hour = h;
    tm.tm_min = mi;
    tm.tm_sec = s;
    std::time_t secs = timegm(&tm);
    if (secs == static_cast<std::time_t>(-1)) return std::nullopt;
    return Timestamp{std::chrono::seconds{secs}};
}

Timestamp now_utc() {
    return std::chrono::time_point_cast<std::chrono::seconds>(
        std::chrono::system_clock::now());
}

void validate_tag_key(std::string_view tag_key) {
    if (tag_key.empty()) {
        throw Error(Errc::InvalidTagKey, "empty tag key");
    }
    for (char c : tag_key) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            throw Error(Errc::InvalidTagKey, "tag key contains whitespace");
        }
    }
}

RegistryEntry make_entry(const MappedAddress& mapped, Timestamp created_at) {
    validate_tag_key(mapped.tag_key);
    return RegistryEntry{mapped.address, mapped.tag_key, mapped.dispatch, mapped.mode,
                         created_at};
}

void Registry::register_entry(const RegistryEntry& entry) {
    validate_tag_key(entry.tag_key);
    auto by_addr = by_address_.find(entry.address);
    auto by_tag = by_tag_.find(entry.tag_key);
    if (by_addr != by_address_.end() && by_addr->second.tag_key == entry.tag_key) {
        return;  // identical (address, tag_key) pair
    }
    if (by_addr != by_address_.end()) {
        throw Error(Errc::AddressCollision, by_addr->second.tag_key);
    }
    if (by_tag != by_tag_.end()) {
        throw Error(Errc::DuplicateTagKey, format_ipv6(by_tag->second));
    }
    by_tag_.emplace(entry.tag_key, entry.address);
    by_address_.emplace(entry.address, entry);
}

bool Registry::force_register(const RegistryEntry& entry) {
    validate_tag_key(entry.tag_key);
    bool evicted = false;
    auto by_addr = by_address_.find(entry.address);
    if (by_addr != by_address_.end()) {
        if (by_addr->second.tag_key == entry.tag_key) {
            return false;
        }
        audit_.push_back("# force-replaced " + format_ipv6(entry.address) + " tag " +
                         by_addr->second.tag_key + " -> " + entry.tag_key + " at " +
                         format_timestamp(entry.created_at));
        by_tag_.erase(by_addr->second.tag_key);
        by_address_.erase(by_addr);
        evicted = true;
    }
    auto by_tag = by_tag_.find(entry.tag_key);
    if (by_tag != by_tag_.end()) {
        audit_.push_back("# force-replaced tag " + entry.tag_key + " address " +
                         format_ipv6(by_tag->second) + " -> " + format_ipv6(entry.address) +
                         " at " + format_timestamp(entry.created_at));
        by_address_.erase(by_tag->second);
        by_tag_.erase(by_tag);
        evicted = true;
    }
    by_tag_.emplace(entry.tag_key, entry.address);
    by_address_.emplace(entry.address, entry);
    return evicted;
}

const RegistryEntry* Registry::lookup_by_address(const Ipv6Address& address) const {
    auto it = by_address_.find(address);
    return it == by_address_.end() ? nullptr : &it->second;
}

const RegistryEntry* Registry::lookup_by_tag(std::string_view tag_key) const {
    auto it = by_tag_.find(std::string(tag_key));
    return it == by_tag_.end() ? nullptr : &by_address_.at(it->second);
}

std::vector<RegistryEntry> Registry::entries() const {
    std::vector<RegistryEntry> out;
    out.reserve(by_address_.size());
    for (const auto& [addr, entry] : by_address_) {
        out.push_back(entry);
    }
    return out;
}

bool Registry::operator==(const Registry& other) const {
    return by_address_ == other.by_address_;
}

void Registry::save(std::ostream& out) const {
    out << kRegistryHeader << '\n';
    for (const auto& note : audit_) {
        out << note << '\n';
    }
    for (const auto& [addr, entry] : by_address_) {
        out << format_ipv6(addr) << '\t' << entry.tag_key << '\t'
            << to_string(entry.dispatch) << '\t' << to_string(entry.mode) << '\t'
            << format_timestamp(entry.created_at) << '\n';
    }
}

void Registry::save_file(const std::filesystem::path& path) const {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        save(out);
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        if (pos == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

Registry Registry::load(std::istream& in) {
    Registry reg;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) {
        throw Error::at_line(Errc::CorruptLine, 1, "missing header");
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kRegistryHeader) {
        throw Error::at_line(Errc::CorruptLine, 1,
                             "bad header, expected '" + std::string(kRegistryHeader) + "'");
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto fields = split_tabs(line);
        if (fields.size() != 5) {
            throw Error::at_line(Errc::CorruptLine, line_no,
                                 "expected 5 tab-separated fields, got " +
                                     std::to_string(fields.size()));
        }
        RegistryEntry entry;
        try {
            entry.address = parse_ipv6(fields[0]);
        } catch (const Error&) {
            throw Error::at_line(Errc::CorruptLine, line_no, "malformed address");
        }
        entry.tag_key = std::string(fields[1]);
        try {
            validate_tag_key(entry.tag_key);
        } catch (const Error&) {
            throw Error::at_line(Errc::CorruptLine, line_no, "invalid tag key");
        }
        auto dispatch = dispatch_from_string(fields[2]);
        if (!dispatch) {
            throw Error::at_line(Errc::CorruptLine, line_no,
                                 "unknown dispatch '" + std::string(fields[2]) + "'");
        }
        entry.dispatch = *dispatch;
        auto mode = mode_from_string(fields[3]);
        if (!mode) {
            throw Error::at_line(Errc::CorruptLine, line_no,
                                 "unknown mode '" + std::string(fields[3]) + "'");
        }
        entry.mode = *mode;
        auto ts = parse_timestamp(fields[4]);
        if (!ts) {
            throw Error::at_line(Errc::CorruptLine, line_no, "malformed timestamp");
        }
        entry.created_at = *ts;
        try {
            reg.register_entry(entry);
        } catch (const Error& e) {
            throw Error::at_line(Errc::DuplicateOnLoad, line_no,
                                 std::string(e.name()) + " " + e.detail());
        }
    }
    return reg;
}

Registry Registry::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    return load(in);
}

}  // namespace epcgate
