#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace epcgate {

// Error codes shared by the codecs, the mapper, the registry and the wire
// protocol. Enumerator spelling is the wire-visible name.
enum class Errc {
    // bank dumps / bit fields
    EmptyDump,
    OddLengthDump,
    InvalidHexDigit,
    RangeExceedsBank,
    TruncatedBank,
    WrongBank,
    EmptyUii,
    DuplicateBank,
    MalformedDump,
    // identifier codecs
    UnknownAllocationClass,
    UnsupportedDataIdentifier,
    MalformedIdentifier,
    NonNumericCin,
    InvalidDigit,
    EmptyIdentifier,
    LengthMismatch,
    InvalidRadix,
    // address mapping
    PayloadKindMismatch,
    SerialTooLong,
    CompatRequiresDecimal,
    CompatUnsupportedForTid,
    MalformedNetId,
    PrefixNot64,
    MalformedAddress,
    NonDecimalDigit,
    WrongLength,
    // registry
    AddressCollision,
    DuplicateTagKey,
    NotFound,
    CorruptLine,
    DuplicateOnLoad,
    InvalidTagKey,
    // batch records / request arguments
    MissingKey,
    UnknownKey,
    DuplicateKey,
    BadValue,
    ConflictingKeys,
    ToggleMismatch,
    AfiMismatch,
    IsoSerialUnavailable,
};

std::string_view errc_name(Errc code);

// Single exception type for all domain errors. `position` is a 0-based
// character index into the offending input; `line` is a 1-based file line.
class Error : public std::runtime_error {
  public:
    explicit Error(Errc code, std::string detail = {});

    static Error at_position(Errc code, std::size_t position, std::string detail = {});
    static Error at_line(Errc code, std::size_t line, std::string detail = {});

    Errc code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }
    std::optional<std::size_t> position() const noexcept { return position_; }
    std::optional<std::size_t> line() const noexcept { return line_; }

    std::string_view name() const noexcept { return errc_name(code_); }

    // Same error annotated with a file line number.
    Error with_line(std::size_t line) const;

  private:
    Error(Errc code, std::string detail, std::optional<std::size_t> position,
          std::optional<std::size_t> line);

    Errc code_;
    std::string detail_;
    std::optional<std::size_t> position_;
    std::optional<std::size_t> line_;
};

}  // namespace epcgate
