#pragma once

#include <chrono>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "epcgate/mapper.hpp"

namespace epcgate {

using Timestamp = std::chrono::time_point<std::chrono::system_clock, std::chrono::seconds>;

std::string format_timestamp(Timestamp t);                    // ISO-8601 UTC, "Z" suffix
std::optional<Timestamp> parse_timestamp(std::string_view t);
Timestamp now_utc();

struct RegistryEntry {
    Ipv6Address address;
    std::string tag_key;
    Dispatch dispatch = Dispatch::uii_epc;
    MappingMode mode = MappingMode::canonical;
    Timestamp created_at;

    bool operator==(const RegistryEntry&) const = default;
};

// Throws InvalidTagKey when empty or containing whitespace.
void validate_tag_key(std::string_view tag_key);

RegistryEntry make_entry(const MappedAddress& mapped, Timestamp created_at);

// Bidirectional tag-key/address store. Addresses and tag keys are both
// unique; collisions are hard errors. Single-writer, multi-reader: callers
// serialize mutation (the resolver service holds a mutex around it).
class Registry {
  public:
    // Throws AddressCollision (detail = existing tag key) or
    // DuplicateTagKey (detail = existing address). Re-registering an
    // identical (address, tag_key) pair is a no-op.
    void register_entry(const RegistryEntry& entry);

    // Replaces whatever the entry collides with and leaves an audit
    // comment for the next save. Returns true when something was evicted.
    bool force_register(const RegistryEntry& entry);

    const RegistryEntry* lookup_by_address(const Ipv6Address& address) const;
    const RegistryEntry* lookup_by_tag(std::string_view tag_key) const;

    std::size_t size() const { return by_address_.size(); }
    bool empty() const { return by_address_.empty(); }

    // Entries in address order (the save order).
    std::vector<RegistryEntry> entries() const;

    const std::vector<std::string>& audit_notes() const { return audit_; }

    bool operator==(const Registry& other) const;

    // File format: first line "epcgate-registry v1", then one tab-separated
    // entry per line: address, tag key, dispatch, mode, timestamp.
    // '#' lines are comments.
    void save(std::ostream& out) const;
    void save_file(const std::filesystem::path& path) const;  // atomic replace

    // Throws CorruptLine (1-based line number) and DuplicateOnLoad.
    static Registry load(std::istream& in);
    static Registry load_file(const std::filesystem::path& path);

  private:
    std::map<Ipv6Address, RegistryEntry> by_address_;
    std::unordered_map<std::string, Ipv6Address> by_tag_;
    std::vector<std::string> audit_;
};

inline constexpr std::string_view kRegistryHeader = "epcgate-registry v1";

}  // namespace epcgate
