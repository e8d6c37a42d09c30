#include "epcgate/batch.hpp"

#include <cctype>
#include <vector>

#include "epcgate/tag_memory.hpp"

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

int parse_int_value(std::string_view key, std::string_view value) {
    if (value.empty() || value.size() > 9) {
        throw Error(Errc::BadValue, std::string(key) + "=" + std::string(value));
    }
    int out = 0;
    for (char c : value) {
        if (c < '0' || c > '9') {
            throw Error(Errc::BadValue, std::string(key) + "=" + std::string(value));
        }
        out = out * 10 + (c - '0');
    }
    return out;
}

std::uint8_t parse_hex_byte(std::string_view key, std::string_view value) {
    if (value.size() != 2) {
        throw Error(Errc::BadValue, std::string(key) + "=" + std::string(value));
    }
    unsigned out = 0;
    for (char c : value) {
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else throw Error(Errc::BadValue, std::string(key) + "=" + std::string(value));
        out = (out << 4) | static_cast<unsigned>(v);
    }
    return static_cast<std::uint8_t>(out);
}

}  // namespace

BatchRecord parse_batch_record(std::string_view line) {
    BatchRecord rec;
    bool kind_seen = false;
    std::vector<std::string_view> seen;

    for (auto token : tokenize(line)) {
        auto eq = token.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw Error(Errc::BadValue, "token '" + std::string(token) + "'");
        }
        std::string_view key = token.substr(0, eq);
        std::string_view value = token.substr(eq + 1);
        for (auto prior : seen) {
            if (prior == key) {
                throw Error(Errc::DuplicateKey, std::string(key));
            }
        }
        seen.push_back(key);

        if (key == "kind") {
            if (value == "uii") rec.kind = BatchRecord::Kind::uii;
            else if (value == "tid") rec.kind = BatchRecord::Kind::tid;
            else throw Error(Errc::BadValue, "kind=" + std::string(value));
            kind_seen = true;
        } else if (key == "toggle") {
            int t = parse_int_value(key, value);
            if (t != 0 && t != 1) {
                throw Error(Errc::BadValue, "toggle=" + std::string(value));
            }
            rec.toggle = t;
        } else if (key == "epc") {
            rec.epc = std::string(value);
        } else if (key == "epcform") {
            if (value != "decimal" && value != "hex") {
                throw Error(Errc::BadValue, "epcform=" + std::string(value));
            }
            rec.epcform = std::string(value);
        } else if (key == "epcbits") {
            rec.epcbits = static_cast<std::size_t>(parse_int_value(key, value));
        } else if (key == "serial") {
            rec.serial = std::string(value);
        } else if (key == "radix") {
            int r = parse_int_value(key, value);
            if (r != 10 && r != 16) {
                throw Error(Errc::InvalidRadix, "radix=" + std::string(value));
            }
            rec.radix = r;
        } else if (key == "afi") {
            rec.afi = parse_hex_byte(key, value);
        } else if (key == "mb01") {
            rec.mb01 = std::string(value);
        } else if (key == "mb10") {
            rec.mb10 = std::string(value);
        } else if (key == "tag") {
            rec.tag = std::string(value);
        } else {
            throw Error(Errc::UnknownKey, std::string(key));
        }
    }
    if (!kind_seen) {
        throw Error(Errc::MissingKey, "kind");
    }
    return rec;
}

namespace {

void forbid(bool present, const char* key, const char* why) {
    if (present) {
        throw Error(Errc::ConflictingKeys, std::string(key) + " " + why);
    }
}

UiiPayload epc_payload(const BatchRecord& record) {
    const std::string& form = record.epcform.value_or("decimal");
    if (form == "decimal") {
        forbid(record.epcbits.has_value(), "epcbits", "applies to hex EPC input only");
        return epc_from_decimal(*record.epc);
    }
    std::size_t bits = record.epcbits.value_or(record.epc->size() * 4);
    return epc_from_hex(*record.epc, bits);
}

MappedAddress map_uii_record(const BatchRecord& record, const NetId& net_id,
                             MappingMode mode) {
    forbid(record.mb10.has_value(), "mb10", "is a tid-kind key");

    if (record.mb01) {
        MemoryBank bank = parse_bank_dump(*record.mb01, BankId::uii);
        bool toggle = read_toggle(bank);
        if (record.toggle && *record.toggle != static_cast<int>(toggle)) {
            throw Error(Errc::ToggleMismatch,
                        "bank toggle is " + std::to_string(static_cast<int>(toggle)));
        }
        if (record.afi) {
            std::uint8_t afi = read_afi(bank);
            if (afi != *record.afi) {
                throw Error(Errc::AfiMismatch, "bank AFI differs from declared value");
            }
        }
        if (!toggle) {
            forbid(record.epc.has_value(), "epc", "conflicts with mb01 (payload comes from the bank)");
            forbid(record.epcform.has_value(), "epcform", "conflicts with mb01");
            forbid(record.epcbits.has_value(), "epcbits", "conflicts with mb01");
            forbid(record.serial.has_value(), "serial", "is an ISO-path key");
            forbid(record.radix.has_value(), "radix", "is an ISO-path key");
            EpcIdentifier epc{read_uii_payload(bank), std::nullopt};
            return map_from_uii(false, epc, net_id, mode, record.tag);
        }
        forbid(record.epc.has_value(), "epc", "is an EPC-path key");
        forbid(record.epcform.has_value(), "epcform", "is an EPC-path key");
        forbid(record.epcbits.has_value(), "epcbits", "is an EPC-path key");
        if (!record.serial) {
            // A raw ISO payload has no delimited serial field to extract.
            throw Error(Errc::IsoSerialUnavailable,
                        "ISO-format UII needs an explicit serial");
        }
        return map_from_uii(true, IsoSerial{*record.serial, record.radix.value_or(10)},
                            net_id, mode, record.tag);
    }

    forbid(record.afi.has_value(), "afi", "needs mb01 to check against");
    if (!record.toggle) {
        throw Error(Errc::MissingKey, "toggle");
    }
    if (*record.toggle == 0) {
        forbid(record.serial.has_value(), "serial", "is an ISO-path key");
        forbid(record.radix.has_value(), "radix", "is an ISO-path key");
        if (!record.epc) {
            throw Error(Errc::MissingKey, "epc");
        }
        return map_from_uii(false, epc_payload(record), net_id, mode, record.tag);
    }
    forbid(record.epc.has_value(), "epc", "is an EPC-path key");
    forbid(record.epcform.has_value(), "epcform", "is an EPC-path key");
    forbid(record.epcbits.has_value(), "epcbits", "is an EPC-path key");
    if (!record.serial) {
        throw Error(Errc::MissingKey, "serial");
    }
    return map_from_uii(true, IsoSerial{*record.serial, record.radix.value_or(10)},
                        net_id, mode, record.tag);
}

MappedAddress map_tid_record(const BatchRecord& record, const NetId& net_id,
                             MappingMode mode) {
    forbid(record.toggle.has_value(), "toggle", "is a uii-kind key");
    forbid(record.epc.has_value(), "epc", "is a uii-kind key");
    forbid(record.epcform.has_value(), "epcform", "is a uii-kind key");
    forbid(record.epcbits.has_value(), "epcbits", "is a uii-kind key");
    forbid(record.serial.has_value(), "serial", "is a uii-kind key");
    forbid(record.radix.has_value(), "radix", "is a uii-kind key");
    forbid(record.afi.has_value(), "afi", "is a uii-kind key");
    forbid(record.mb01.has_value(), "mb01", "is a uii-kind key");
    if (!record.mb10) {
        throw Error(Errc::MissingKey, "mb10");
    }
    MemoryBank bank = parse_bank_dump(*record.mb10, BankId::tid);
    return map_from_tid(parse_tid(bank), net_id, mode, record.tag);
}

}  // namespace

MappedAddress map_record(const BatchRecord& record, const NetId& net_id,
                         MappingMode mode) {
    if (record.kind == BatchRecord::Kind::uii) {
        return map_uii_record(record, net_id, mode);
    }
    return map_tid_record(record, net_id, mode);
}

}  // namespace epcgate
