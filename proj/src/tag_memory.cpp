#include "epcgate/tag_memory.hpp"

#include <cctype>
#include <sstream>
#include <unordered_set>

namespace epcgate {

std::string_view bank_name(BankId id) {
    switch (id) {
        case BankId::reserved: return "MB00";
        case BankId::uii: return "MB01";
        case BankId::tid: return "MB10";
        case BankId::user: return "MB11";
    }
    return "MB??";
}

std::optional<BankId> bank_from_name(std::string_view name) {
    if (name == "MB00") return BankId::reserved;
    if (name == "MB01") return BankId::uii;
    if (name == "MB10") return BankId::tid;
    if (name == "MB11") return BankId::user;
    return std::nullopt;
}

MemoryBank parse_bank_dump(std::string_view hex_text, BankId id) {
    if (hex_text.empty()) {
        throw Error(Errc::EmptyDump);
    }
    if (hex_text.size() % 2 != 0) {
        throw Error(Errc::OddLengthDump,
                    std::to_string(hex_text.size()) + " hex digits");
    }
    return MemoryBank{id, BitString::from_hex(hex_text)};
}

BitString read_field(const MemoryBank& bank, std::size_t start, std::size_t len) {
    if (start + len > bank.data.size()) {
        throw Error(Errc::RangeExceedsBank,
                    "[" + std::to_string(start) + ", +" + std::to_string(len) +
                        ") exceeds " + std::to_string(bank.data.size()) + " bits");
    }
    return bank.data.slice(start, len);
}

namespace {

void require_bank(const MemoryBank& bank, BankId expected) {
    if (bank.id != expected) {
        throw Error(Errc::WrongBank, std::string("expected ") +
                                         std::string(bank_name(expected)) + ", got " +
                                         std::string(bank_name(bank.id)));
    }
}

void require_bits(const MemoryBank& bank, std::size_t needed) {
    if (bank.data.size() < needed) {
        throw Error(Errc::TruncatedBank, "need " + std::to_string(needed) +
                                             " bits, bank has " +
                                             std::to_string(bank.data.size()));
    }
}

}  // namespace

bool read_toggle(const MemoryBank& mb01) {
    require_bank(mb01, BankId::uii);
    require_bits(mb01, kToggleBit + 1);
    return mb01.data.bit(kToggleBit);
}

std::uint8_t read_afi(const MemoryBank& mb01) {
    require_bank(mb01, BankId::uii);
    require_bits(mb01, kAfiStart + 8);
    return static_cast<std::uint8_t>(read_field(mb01, kAfiStart, 8).to_uint64());
}

bool is_supply_chain_afi(std::uint8_t afi) {
    return afi >= 0xA1 && afi <= 0xA5;
}

BitString read_uii_payload(const MemoryBank& mb01) {
    require_bank(mb01, BankId::uii);
    require_bits(mb01, kUiiPayloadStart);
    std::size_t words =
        read_field(mb01, kUiiLengthFieldStart, kUiiLengthFieldBits).to_uint64();
    if (words == 0) {
        throw Error(Errc::EmptyUii);
    }
    std::size_t payload_bits = words * 16;
    if (kUiiPayloadStart + payload_bits > mb01.data.size()) {
        throw Error(Errc::TruncatedBank,
                    "length field declares " + std::to_string(payload_bits) +
                        " payload bits, bank has " +
                        std::to_string(mb01.data.size() - kUiiPayloadStart));
    }
    return read_field(mb01, kUiiPayloadStart, payload_bits);
}

std::uint8_t read_ac(const MemoryBank& mb10) {
    require_bank(mb10, BankId::tid);
    require_bits(mb10, 8);
    return static_cast<std::uint8_t>(read_field(mb10, 0, 8).to_uint64());
}

void TagMemory::add(MemoryBank bank) {
    auto& slot = banks_[static_cast<std::size_t>(bank.id)];
    if (slot.has_value()) {
        throw Error(Errc::DuplicateBank, std::string(bank_name(bank.id)));
    }
    slot = std::move(bank);
}

bool TagMemory::has(BankId id) const {
    return banks_[static_cast<std::size_t>(id)].has_value();
}

const MemoryBank& TagMemory::bank(BankId id) const {
    const auto& slot = banks_[static_cast<std::size_t>(id)];
    if (!slot.has_value()) {
        throw Error(Errc::WrongBank, std::string(bank_name(id)) + " not present");
    }
    return *slot;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

bool has_whitespace(std::string_view s) {
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) return true;
    }
    return false;
}

}  // namespace

std::vector<TagDump> parse_tag_dumps(std::istream& in) {
    std::vector<TagDump> dumps;
    std::unordered_set<std::string> seen_keys;

    bool in_block = false;
    TagDump current;

    auto finish_block = [&](std::size_t line_no) {
        if (!in_block) return;
        if (!current.memory.has(BankId::uii) && !current.memory.has(BankId::tid)) {
            throw Error::at_line(Errc::MalformedDump, line_no,
                                 "tag '" + current.key + "' has neither MB01 nor MB10");
        }
        dumps.push_back(std::move(current));
        current = TagDump{};
        in_block = false;
    };

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty()) {
            finish_block(line_no);
            continue;
        }
        if (line.front() == '#') {
            continue;
        }
        if (line.substr(0, 4) == "tag ") {
            finish_block(line_no);
            std::string_view key = trim(line.substr(4));
            if (key.empty() || has_whitespace(key)) {
                throw Error::at_line(Errc::MalformedDump, line_no,
                                     "tag key must be a single non-empty token");
            }
            if (!seen_keys.insert(std::string(key)).second) {
                throw Error::at_line(Errc::DuplicateTagKey, line_no, std::string(key));
            }
            current.key = std::string(key);
            in_block = true;
            continue;
        }
        auto eq = line.find('=');
        if (eq != std::string_view::npos) {
            auto id = bank_from_name(line.substr(0, eq));
            if (id) {
                if (!in_block) {
                    throw Error::at_line(Errc::MalformedDump, line_no,
                                         "bank line outside a tag block");
                }
                try {
                    current.memory.add(parse_bank_dump(line.substr(eq + 1), *id));
                } catch (const Error& e) {
                    throw e.with_line(line_no);
                }
                continue;
            }
        }
        throw Error::at_line(Errc::MalformedDump, line_no,
                             "unrecognized line '" + std::string(line) + "'");
    }
    finish_block(line_no + 1);
    return dumps;
}

std::vector<TagDump> parse_tag_dumps(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_tag_dumps(in);
}

}  // namespace epcgate
