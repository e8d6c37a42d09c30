#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "epcgate/mapper.hpp"

namespace epcgate {

// One batch input line: whitespace-separated key=value tokens. `kind`
// selects the mechanism; the other keys carry the payload.
//
//   kind=uii toggle=0 epc=<text> [epcform=decimal|hex] [epcbits=<n>] [tag=<key>]
//   kind=uii toggle=1 serial=<text> [radix=10|16] [tag=<key>]
//   kind=uii mb01=<hex> [toggle=..] [afi=<hex byte>] [serial=.. radix=..] [tag=..]
//   kind=tid mb10=<hex> [tag=<key>]
//
// Unknown keys are errors; required keys per kind are enforced before
// mapping.
struct BatchRecord {
    enum class Kind { uii, tid };

    Kind kind = Kind::uii;
    std::optional<int> toggle;
    std::optional<std::string> epc;
    std::optional<std::string> epcform;  // "decimal" (default) or "hex"
    std::optional<std::size_t> epcbits;  // hex form only; default 4 * digits
    std::optional<std::string> serial;
    std::optional<int> radix;  // default 10
    std::optional<std::uint8_t> afi;
    std::optional<std::string> mb01;
    std::optional<std::string> mb10;
    std::string tag;  // empty = untagged
};

// Throws UnknownKey, DuplicateKey, BadValue, MissingKey, InvalidRadix.
BatchRecord parse_batch_record(std::string_view line);

// Validates the record's key combination and runs the mapping. With mb01
// the toggle comes from the bank: toggle 0 maps the UII payload bits,
// toggle 1 needs an explicit serial (raw ISO payloads carry no delimited
// serial field). A declared toggle or afi is cross-checked against the
// bank. Throws the codec and mapper errors plus ConflictingKeys,
// MissingKey, ToggleMismatch, AfiMismatch, IsoSerialUnavailable.
MappedAddress map_record(const BatchRecord& record, const NetId& net_id,
                         MappingMode mode);

}  // namespace epcgate
