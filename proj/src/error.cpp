#include "epcgate/error.hpp"

namespace epcgate {

std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::EmptyDump: return "EmptyDump";
        case Errc::OddLengthDump: return "OddLengthDump";
        case Errc::InvalidHexDigit: return "InvalidHexDigit";
        case Errc::RangeExceedsBank: return "RangeExceedsBank";
        case Errc::TruncatedBank: return "TruncatedBank";
        case Errc::WrongBank: return "WrongBank";
        case Errc::EmptyUii: return "EmptyUii";
        case Errc::DuplicateBank: return "DuplicateBank";
        case Errc::MalformedDump: return "MalformedDump";
        case Errc::UnknownAllocationClass: return "UnknownAllocationClass";
        case Errc::UnsupportedDataIdentifier: return "UnsupportedDataIdentifier";
        case Errc::MalformedIdentifier: return "MalformedIdentifier";
        case Errc::NonNumericCin: return "NonNumericCin";
        case Errc::InvalidDigit: return "InvalidDigit";
        case Errc::EmptyIdentifier: return "EmptyIdentifier";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::InvalidRadix: return "InvalidRadix";
        case Errc::PayloadKindMismatch: return "PayloadKindMismatch";
        case Errc::SerialTooLong: return "SerialTooLong";
        case Errc::CompatRequiresDecimal: return "CompatRequiresDecimal";
        case Errc::CompatUnsupportedForTid: return "CompatUnsupportedForTid";
        case Errc::MalformedNetId: return "MalformedNetId";
        case Errc::PrefixNot64: return "PrefixNot64";
        case Errc::MalformedAddress: return "MalformedAddress";
        case Errc::NonDecimalDigit: return "NonDecimalDigit";
        case Errc::WrongLength: return "WrongLength";
        case Errc::AddressCollision: return "AddressCollision";
        case Errc::DuplicateTagKey: return "DuplicateTagKey";
        case Errc::NotFound: return "NotFound";
        case Errc::CorruptLine: return "CorruptLine";
        case Errc::DuplicateOnLoad: return "DuplicateOnLoad";
        case Errc::InvalidTagKey: return "InvalidTagKey";
        case Errc::MissingKey: return "MissingKey";
        case Errc::UnknownKey: return "UnknownKey";
        case Errc::DuplicateKey: return "DuplicateKey";
        case Errc::BadValue: return "BadValue";
        case Errc::ConflictingKeys: return "ConflictingKeys";
        case Errc::ToggleMismatch: return "ToggleMismatch";
        case Errc::AfiMismatch: return "AfiMismatch";
        case Errc::IsoSerialUnavailable: return "IsoSerialUnavailable";
    }
    return "UnknownError";
}

namespace {

std::string build_message(Errc code, const std::string& detail,
                          std::optional<std::size_t> position,
                          std::optional<std::size_t> line) {
    std::string msg(errc_name(code));
    if (line) {
        msg += " at line " + std::to_string(*line);
    }
    if (position) {
        msg += " at position " + std::to_string(*position);
    }
    if (!detail.empty()) {
        msg += ": " + detail;
    }
    return msg;
}

}  // namespace

Error::Error(Errc code, std::string detail)
    : Error(code, std::move(detail), std::nullopt, std::nullopt) {}

Error::Error(Errc code, std::string detail, std::optional<std::size_t> position,
             std::optional<std::size_t> line)
    : std::runtime_error(build_message(code, detail, position, line)),
      code_(code),
      detail_(std::move(detail)),
      position_(position),
      line_(line) {}

Error Error::at_position(Errc code, std::size_t position, std::string detail) {
    return Error(code, std::move(detail), position, std::nullopt);
}

Error Error::at_line(Errc code, std::size_t line, std::string detail) {
    return Error(code, std::move(detail), std::nullopt, line);
}

Error Error::with_line(std::size_t line) const {
    return Error(code_, detail_, position_, line);
}

}  // namespace epcgate
