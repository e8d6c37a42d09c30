#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epcgate/bitstring.hpp"

namespace epcgate {

// The four EPC Gen2 / ISO 18000-6 memory banks. Bank 01 holds the UII,
// bank 10 the TID; banks 00 and 11 are stored but never decoded.
enum class BankId : std::uint8_t {
    reserved = 0,  // 00b
    uii = 1,       // 01b
    tid = 2,       // 10b
    user = 3,      // 11b
};

std::string_view bank_name(BankId id);  // "MB00" .. "MB11"
std::optional<BankId> bank_from_name(std::string_view name);

struct MemoryBank {
    BankId id = BankId::reserved;
    BitString data;
};

// Bit addresses of the MB01 fields. The toggle and AFI addresses are the
// load-bearing ones; the length field delimits the UII payload.
inline constexpr std::size_t kUiiLengthFieldStart = 0x10;
inline constexpr std::size_t kUiiLengthFieldBits = 5;
inline constexpr std::size_t kToggleBit = 0x17;
inline constexpr std::size_t kAfiStart = 0x18;
inline constexpr std::size_t kUiiPayloadStart = 0x20;

// Ingests a raw hex dump: 4 bits per digit, bit 0 = most significant bit
// of the first digit. Throws EmptyDump, OddLengthDump, InvalidHexDigit.
MemoryBank parse_bank_dump(std::string_view hex_text, BankId id);

// Bits [start, start+len) of the bank. Throws RangeExceedsBank.
BitString read_field(const MemoryBank& bank, std::size_t start, std::size_t len);

// Toggle bit at 17h of MB01: 0 = EPC-format UII, 1 = ISO-format UII.
// MB01 layout: 00h-0Fh stored CRC (opaque), 10h-1Fh protocol-control word,
// payload from 20h. Throws WrongBank, TruncatedBank.
bool read_toggle(const MemoryBank& mb01);

// AFI byte at 18h-1Fh of MB01. Meaningful only when the toggle is 1.
std::uint8_t read_afi(const MemoryBank& mb01);

// True for the supply-chain AFI values A1h-A5h.
bool is_supply_chain_afi(std::uint8_t afi);

// UII payload: the length field at 10h-14h counts 16-bit words; the
// payload is bits [20h, 20h + 16*L). Throws EmptyUii, TruncatedBank.
BitString read_uii_payload(const MemoryBank& mb01);

// Allocation Class byte at 00h-07h of MB10.
std::uint8_t read_ac(const MemoryBank& mb10);

inline constexpr std::uint8_t kAcEpc = 0xE2;
inline constexpr std::uint8_t kAcIso = 0xE0;

// Up to one bank per bank id; decoding only ever touches MB01 and MB10.
class TagMemory {
  public:
    void add(MemoryBank bank);  // throws DuplicateBank
    bool has(BankId id) const;
    const MemoryBank& bank(BankId id) const;  // throws WrongBank when absent

  private:
    std::array<std::optional<MemoryBank>, 4> banks_;
};

struct TagDump {
    std::string key;
    TagMemory memory;
};

// Tag dump text format, one tag per block:
//   tag <tag-key>
//   MB01=<hex>
//   MB10=<hex>
// '#' starts a comment line; a blank line ends a block. Each block needs
// at least one of MB01/MB10; tag keys must be unique.
std::vector<TagDump> parse_tag_dumps(std::istream& in);
std::vector<TagDump> parse_tag_dumps(std::string_view text);

}  // namespace epcgate
