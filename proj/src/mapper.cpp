#include "epcgate/mapper.hpp"

#include <cstdio>
#include <vector>

namespace epcgate {

std::string_view to_string(MappingMode mode) {
    return mode == MappingMode::canonical ? "canonical" : "figure-compat";
}

std::string_view to_string(Dispatch dispatch) {
    switch (dispatch) {
        case Dispatch::uii_epc: return "uii-epc";
        case Dispatch::uii_iso: return "uii-iso";
        case Dispatch::tid_epc: return "tid-epc";
        case Dispatch::tid_iso: return "tid-iso";
    }
    return "?";
}

std::optional<MappingMode> mode_from_string(std::string_view text) {
    if (text == "canonical") return MappingMode::canonical;
    if (text == "figure-compat") return MappingMode::figure_compat;
    return std::nullopt;
}

std::optional<Dispatch> dispatch_from_string(std::string_view text) {
    if (text == "uii-epc") return Dispatch::uii_epc;
    if (text == "uii-iso") return Dispatch::uii_iso;
    if (text == "tid-epc") return Dispatch::tid_epc;
    if (text == "tid-iso") return Dispatch::tid_iso;
    return std::nullopt;
}

BitString fit64(const BitString& bits) {
    if (bits.empty()) {
        throw Error(Errc::EmptyIdentifier);
    }
    if (bits.size() > 64) {
        return bits.slice(bits.size() - 64, 64);
    }
    if (bits.size() == 64) {
        return bits;
    }
    BitString out = BitString::from_uint(0, 64 - bits.size());
    out.append(bits);
    return out;
}

std::string select_digits16(std::string_view digits) {
    if (digits.empty()) {
        throw Error(Errc::EmptyIdentifier);
    }
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (digits[i] < '0' || digits[i] > '9') {
            throw Error::at_position(Errc::NonDecimalDigit, i,
                                     std::string("'") + digits[i] + "'");
        }
    }
    if (digits.size() > 16) {
        return std::string(digits.substr(digits.size() - 16));
    }
    std::string out(16 - digits.size(), '0');
    out += digits;
    return out;
}

std::uint64_t digits_to_hextets(std::string_view digits16) {
    if (digits16.size() != 16) {
        throw Error(Errc::WrongLength,
                    std::to_string(digits16.size()) + " digits, expected 16");
    }
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < 16; ++i) {
        char c = digits16[i];
        if (c < '0' || c > '9') {
            throw Error::at_position(Errc::NonDecimalDigit, i, std::string("'") + c + "'");
        }
        value = (value << 4) | static_cast<std::uint64_t>(c - '0');
    }
    return value;
}

namespace {

Ipv6Address assemble(MappingMode mode, const NetId& net_id, std::uint64_t tag_half) {
    if (mode == MappingMode::canonical) {
        return Ipv6Address{net_id.prefix, tag_half};
    }
    return Ipv6Address{tag_half, net_id.prefix};
}

}  // namespace

MappedAddress map_from_uii(bool toggle, const UiiPayload& payload, const NetId& net_id,
                           MappingMode mode, std::string tag_key) {
    std::uint64_t tag_half = 0;
    Dispatch dispatch;
    if (!toggle) {
        const auto* epc = std::get_if<EpcIdentifier>(&payload);
        if (!epc) {
            throw Error(Errc::PayloadKindMismatch, "toggle 0 expects an EPC identifier");
        }
        dispatch = Dispatch::uii_epc;
        if (mode == MappingMode::canonical) {
            tag_half = fit64(epc->bits).to_uint64();
        } else {
            if (!epc->decimal_form) {
                throw Error(Errc::CompatRequiresDecimal,
                            "figure-compat needs a decimal EPC form");
            }
            tag_half = digits_to_hextets(select_digits16(*epc->decimal_form));
        }
    } else {
        const auto* iso = std::get_if<IsoSerial>(&payload);
        if (!iso) {
            throw Error(Errc::PayloadKindMismatch, "toggle 1 expects an ISO serial");
        }
        dispatch = Dispatch::uii_iso;
        if (mode == MappingMode::canonical) {
            BitString bits = serial_to_bits(iso->text, iso->radix);
            if (bits.size() > 64) {
                throw Error(Errc::SerialTooLong,
                            std::to_string(bits.size()) + " bits, ISO serials are at most 64");
            }
            tag_half = fit64(bits).to_uint64();
        } else {
            if (iso->radix != 10) {
                throw Error(Errc::CompatRequiresDecimal,
                            "figure-compat needs a radix-10 serial");
            }
            tag_half = digits_to_hextets(select_digits16(iso->text));
        }
    }
    return MappedAddress{assemble(mode, net_id, tag_half), mode, dispatch, net_id,
                         std::move(tag_key)};
}

MappedAddress map_from_tid(const TidRecord& record, const NetId& net_id,
                           MappingMode mode, std::string tag_key) {
    if (mode == MappingMode::figure_compat) {
        throw Error(Errc::CompatUnsupportedForTid);
    }
    BitString bits;
    Dispatch dispatch;
    if (const auto* epc = std::get_if<EpcClassTid>(&record)) {
        bits = BitString::from_uint(epc->mdid, 12);
        bits.append(BitString::from_uint(epc->model_number, 12));
        if (epc->xtid_serial) {
            bits.append(BitString::from_uint(*epc->xtid_serial, 48));
        }
        dispatch = Dispatch::tid_epc;
    } else {
        const auto& iso = std::get<IsoClassTid>(record);
        bits = BitString::from_uint(iso.serial_number, 48);
        dispatch = Dispatch::tid_iso;
    }
    std::uint64_t tag_half = fit64(bits).to_uint64();
    return MappedAddress{assemble(mode, net_id, tag_half), mode, dispatch, net_id,
                         std::move(tag_key)};
}

namespace {

std::optional<std::uint16_t> parse_hextet(std::string_view text) {
    if (text.empty() || text.size() > 4) return std::nullopt;
    std::uint32_t value = 0;
    for (char c : text) {
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else return std::nullopt;
        value = (value << 4) | static_cast<std::uint32_t>(v);
    }
    return static_cast<std::uint16_t>(value);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

Ipv6Address parse_ipv6(std::string_view text) {
    auto malformed = [&](const char* why) {
        return Error(Errc::MalformedAddress, std::string(why) + " in '" + std::string(text) + "'");
    };
    if (text.empty()) throw malformed("empty address");

    auto gap = text.find("::");
    std::vector<std::uint16_t> head, tail;
    if (gap == std::string_view::npos) {
        auto parts = split(text, ':');
        if (parts.size() != 8) throw malformed("expected 8 hextets");
        for (auto part : parts) {
            auto h = parse_hextet(part);
            if (!h) throw malformed("bad hextet");
            head.push_back(*h);
        }
    } else {
        if (text.find("::", gap + 1) != std::string_view::npos) {
            throw malformed("more than one '::'");
        }
        std::string_view left = text.substr(0, gap);
        std::string_view right = text.substr(gap + 2);
        if (!left.empty()) {
            for (auto part : split(left, ':')) {
                auto h = parse_hextet(part);
                if (!h) throw malformed("bad hextet");
                head.push_back(*h);
            }
        }
        if (!right.empty()) {
            for (auto part : split(right, ':')) {
                auto h = parse_hextet(part);
                if (!h) throw malformed("bad hextet");
                tail.push_back(*h);
            }
        }
        if (head.size() + tail.size() > 7) {
            throw malformed("'::' must stand for at least one zero group");
        }
    }
    std::vector<std::uint16_t> groups = head;
    groups.resize(8 - tail.size(), 0);
    groups.insert(groups.end(), tail.begin(), tail.end());

    Ipv6Address addr;
    for (int i = 0; i < 4; ++i) addr.hi = (addr.hi << 16) | groups[i];
    for (int i = 4; i < 8; ++i) addr.lo = (addr.lo << 16) | groups[i];
    return addr;
}

NetId parse_netid(std::string_view text) {
    if (text.empty()) {
        throw Error(Errc::MalformedNetId, "empty net id");
    }
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        std::string_view len_text = text.substr(slash + 1);
        if (len_text.empty()) {
            throw Error(Errc::MalformedNetId, "missing prefix length");
        }
        std::uint32_t len = 0;
        for (char c : len_text) {
            if (c < '0' || c > '9' || len > 128) {
                throw Error(Errc::MalformedNetId,
                            "bad prefix length '" + std::string(len_text) + "'");
            }
            len = len * 10 + static_cast<std::uint32_t>(c - '0');
        }
        if (len != 64) {
            throw Error(Errc::PrefixNot64, "/" + std::string(len_text));
        }
        Ipv6Address addr;
        try {
            addr = parse_ipv6(text.substr(0, slash));
        } catch (const Error& e) {
            throw Error(Errc::MalformedNetId, e.detail());
        }
        if (addr.lo != 0) {
            throw Error(Errc::MalformedNetId, "nonzero bits past /64 in '" +
                                                  std::string(text) + "'");
        }
        return NetId{addr.hi, std::string(text)};
    }
    auto parts = split(text, ':');
    if (parts.size() != 4) {
        throw Error(Errc::MalformedNetId,
                    "expected four hextets or a /64 prefix, got '" + std::string(text) + "'");
    }
    std::uint64_t prefix = 0;
    for (auto part : parts) {
        auto h = parse_hextet(part);
        if (!h) {
            throw Error(Errc::MalformedNetId, "bad hextet in '" + std::string(text) + "'");
        }
        prefix = (prefix << 16) | *h;
    }
    return NetId{prefix, std::string(text)};
}

std::string format_ipv6(const Ipv6Address& addr, const Ipv6Format& options) {
    std::uint16_t groups[8];
    for (int i = 0; i < 4; ++i) {
        groups[i] = static_cast<std::uint16_t>(addr.hi >> (48 - 16 * i));
        groups[4 + i] = static_cast<std::uint16_t>(addr.lo >> (48 - 16 * i));
    }
    std::string out;
    if (!options.compress) {
        char buf[6];
        for (int i = 0; i < 8; ++i) {
            std::snprintf(buf, sizeof buf, "%04x", groups[i]);
            if (i) out.push_back(':');
            out += buf;
        }
    } else {
        // RFC 5952: replace the longest run of two or more zero groups,
        // leftmost on ties.
        int best_start = -1, best_len = 0;
        for (int i = 0; i < 8;) {
            if (groups[i] != 0) {
                ++i;
                continue;
            }
            int j = i;
            while (j < 8 && groups[j] == 0) ++j;
            if (j - i > best_len) {
                best_start = i;
                best_len = j - i;
            }
            i = j;
        }
        if (best_len < 2) best_start = -1;
        char buf[6];
        for (int i = 0; i < 8;) {
            if (i == best_start) {
                out += "::";
                i += best_len;
                continue;
            }
            if (!out.empty() && out.back() != ':') out.push_back(':');
            std::snprintf(buf, sizeof buf, "%x", groups[i]);
            out += buf;
            ++i;
        }
    }
    if (options.suffix_128) {
        out += " /128";
    }
    return out;
}

}  // namespace epcgate
