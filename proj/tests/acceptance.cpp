// Acceptance gate: nine criteria, one verdict line each, exit 0 only when
// every criterion passes. Takes the epcgate binary path as argv[1] (the
// timing criterion runs the real bench subcommand).

#include <sys/wait.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "epcgate/batch.hpp"
#include "epcgate/bitstring.hpp"
#include "epcgate/error.hpp"
#include "epcgate/identifier.hpp"
#include "epcgate/mapper.hpp"
#include "epcgate/registry.hpp"
#include "epcgate/resolver.hpp"
#include "epcgate/tag_memory.hpp"

namespace fs = std::filesystem;
using namespace epcgate;

namespace {

std::string g_cli;

const NetId kFigNet = parse_netid("6789:1011:1213:1415");

std::string fmt(const Ipv6Address& addr) {
    return format_ipv6(addr, {.suffix_128 = true});
}

BitString random_bits(std::mt19937_64& rng, std::size_t len) {
    BitString bits;
    for (std::size_t i = 0; i < len; ++i) {
        bits.append_bit((rng() & 1) != 0);
    }
    return bits;
}

// Low 64 bits of the string-as-integer, by Horner with natural wraparound.
std::uint64_t mod64_value(const BitString& bits) {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        acc = (acc << 1) | (bits.bit(i) ? 1u : 0u);
    }
    return acc;
}

std::string decimal_u128(unsigned __int128 value) {
    if (value == 0) return "0";
    std::string digits;
    while (value > 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
        value /= 10;
    }
    return {digits.rbegin(), digits.rend()};
}

// ------------------------------------------------------------ criteria ----

bool c1_fig5_epc(std::string& detail) {
    auto mapped = map_from_uii(
        false, epc_from_decimal("961186085415459865490825641692369"), kFigNet,
        MappingMode::figure_compat);
    std::string got = fmt(mapped.address);
    if (got != "5490:8256:4169:2369:6789:1011:1213:1415 /128") {
        detail = "got '" + got + "'";
        return false;
    }
    return true;
}

bool c2_fig5_iso(std::string& detail) {
    auto mapped = map_from_uii(true, IsoSerial{"9611860854", 10}, kFigNet,
                               MappingMode::figure_compat);
    std::string got = fmt(mapped.address);
    if (got != "0000:0096:1186:0854:6789:1011:1213:1415 /128") {
        detail = "got '" + got + "'";
        return false;
    }
    return true;
}

bool c3_fig1_urns(std::string& detail) {
    const std::pair<const char*, const char*> cases[] = {
        {"25S.UN.15849561.6920001026",
         "urn:iso:std:iso-iec:15459:25S.UN.15849561.6920001026"},
        {"25S.UN.11639768.MH26231276",
         "urn:iso:std:iso-iec:15459:25S.UN.11639768.MH26231276"},
    };
    for (const auto& [input, expected] : cases) {
        std::string got = render_urn(parse_iso_uii(input));
        if (got != expected) {
            detail = "got '" + got + "'";
            return false;
        }
    }
    return true;
}

bool c4_timing(std::string& detail) {
    fs::path out = fs::temp_directory_path() / "epcgate-acceptance-bench.txt";
    std::string cmd =
        "'" + g_cli + "' bench --iterations 10000 >'" + out.string() + "' 2>&1";
    int status = std::system(cmd.c_str());
    std::ifstream in(out);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        detail = "bench exit " + std::to_string(WEXITSTATUS(status)) + "; " + text;
        return false;
    }
    auto pos = text.find("median_us=");
    detail = pos == std::string::npos
                 ? std::string{}
                 : "median_us=" + text.substr(pos + 10, text.find('\n', pos) - pos - 10);
    return true;
}

bool c5_fit64(std::string& detail) {
    std::mt19937_64 rng(501);
    std::uniform_int_distribution<std::size_t> len_dist(1, 256);
    for (int i = 0; i < 10000; ++i) {
        BitString bits = random_bits(rng, len_dist(rng));
        BitString fitted = fit64(bits);
        if (fitted.size() != 64) {
            detail = "output length " + std::to_string(fitted.size());
            return false;
        }
        if (fitted.to_uint64() != mod64_value(bits)) {
            detail = "value mismatch at iteration " + std::to_string(i) +
                     " (input length " + std::to_string(bits.size()) + ")";
            return false;
        }
        if (!(fit64(fitted) == fitted)) {
            detail = "not idempotent at iteration " + std::to_string(i);
            return false;
        }
    }
    return true;
}

bool c6_structure(std::string& detail) {
    std::mt19937_64 rng(601);
    char buf[40];
    for (int i = 0; i < 2000; ++i) {
        std::snprintf(buf, sizeof buf, "%04llx:%04llx:%04llx:%04llx",
                      static_cast<unsigned long long>(rng() & 0xFFFF),
                      static_cast<unsigned long long>(rng() & 0xFFFF),
                      static_cast<unsigned long long>(rng() & 0xFFFF),
                      static_cast<unsigned long long>(rng() & 0xFFFF));
        NetId net = parse_netid(buf);

        MappedAddress mapped;
        Dispatch want{};
        bool compat_ok = false;
        switch (i % 4) {
            case 0: {
                unsigned __int128 value =
                    (static_cast<unsigned __int128>(rng() & 0xFFFFFFFFu) << 64) |
                    rng();
                mapped = map_from_uii(false, epc_from_decimal(decimal_u128(value)),
                                      net, MappingMode::canonical);
                want = Dispatch::uii_epc;
                compat_ok = true;
                break;
            }
            case 1:
                mapped = map_from_uii(true,
                                      IsoSerial{std::to_string(rng()), 10}, net,
                                      MappingMode::canonical);
                want = Dispatch::uii_iso;
                compat_ok = true;
                break;
            case 2: {
                std::snprintf(buf, sizeof buf, "E2%06llX%012llX",
                              static_cast<unsigned long long>(rng() & 0xFFFFFFu),
                              static_cast<unsigned long long>(rng() &
                                                              0xFFFFFFFFFFFFull));
                auto bank = parse_bank_dump(buf, BankId::tid);
                mapped = map_from_tid(parse_tid(bank), net, MappingMode::canonical);
                want = Dispatch::tid_epc;
                break;
            }
            default: {
                std::snprintf(buf, sizeof buf, "E0%014llX",
                              static_cast<unsigned long long>(
                                  rng() & 0xFFFFFFFFFFFFFFull));
                auto bank = parse_bank_dump(buf, BankId::tid);
                mapped = map_from_tid(parse_tid(bank), net, MappingMode::canonical);
                want = Dispatch::tid_iso;
                break;
            }
        }
        if (mapped.address.hi != net.prefix) {
            detail = "canonical bits 0-63 are not the Net ID (iteration " +
                     std::to_string(i) + ")";
            return false;
        }
        if (mapped.dispatch != want) {
            detail = "dispatch mismatch (iteration " + std::to_string(i) + ")";
            return false;
        }
        if (!compat_ok) continue;

        // A fresh decimal payload through figure-compat: Net ID moves to
        // bits 64-127 and the tag half holds only decimal nibbles.
        bool toggle = i % 4 == 1;
        unsigned __int128 value =
            (static_cast<unsigned __int128>(rng() & 0xFFFFFFFFu) << 64) | rng();
        std::string digits = decimal_u128(value);
        auto compat =
            toggle ? map_from_uii(true, IsoSerial{digits.substr(0, 18), 10}, net,
                                  MappingMode::figure_compat)
                   : map_from_uii(false, epc_from_decimal(digits), net,
                                  MappingMode::figure_compat);
        if (compat.address.lo != net.prefix) {
            detail = "figure-compat bits 64-127 are not the Net ID (iteration " +
                     std::to_string(i) + ")";
            return false;
        }
        for (int nibble = 0; nibble < 16; ++nibble) {
            if (((compat.address.hi >> (60 - 4 * nibble)) & 0xF) > 9) {
                detail = "figure-compat tag half has a nibble above 9 (iteration " +
                         std::to_string(i) + ")";
                return false;
            }
        }
    }
    return true;
}

bool c7_decimal_oracle(std::string& detail) {
    const NetId net = parse_netid("2001:0db8:0000:0001");

    // The witness from the worked example first.
    auto witness = map_from_uii(true, IsoSerial{"9611860854", 10}, net,
                                MappingMode::canonical);
    if (witness.address.lo != 0x23CE95B76ull) {
        detail = "witness 9611860854 mapped to a different interface id";
        return false;
    }

    std::mt19937_64 rng(701);
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t value = rng();
        // The oracle side converts integer -> decimal text with the
        // standard library; the mapper parses that text back on its own.
        auto mapped = map_from_uii(true, IsoSerial{std::to_string(value), 10},
                                   net, MappingMode::canonical);
        if (mapped.address.lo != value) {
            detail = "serial " + std::to_string(value) + " mapped to lo=" +
                     std::to_string(mapped.address.lo);
            return false;
        }
    }
    return true;
}

bool c8_tid_roundtrip(std::string& detail) {
    std::mt19937_64 rng(801);
    char buf[40];
    for (int i = 0; i < 1000; ++i) {
        if (i % 2 == 0) {
            auto mdid = static_cast<std::uint16_t>(rng() & 0xFFF);
            auto model = static_cast<std::uint16_t>(rng() & 0xFFF);
            bool with_xtid = (i % 4) == 0;
            std::uint64_t xtid = rng() & 0xFFFFFFFFFFFFull;
            if (with_xtid) {
                std::snprintf(buf, sizeof buf, "E2%03X%03X%012llX", mdid, model,
                              static_cast<unsigned long long>(xtid));
            } else {
                std::snprintf(buf, sizeof buf, "E2%03X%03X", mdid, model);
            }
            auto record = parse_tid(parse_bank_dump(buf, BankId::tid));
            const auto* epc = std::get_if<EpcClassTid>(&record);
            EpcClassTid expected{mdid, model,
                                 with_xtid ? std::optional<std::uint64_t>(xtid)
                                           : std::nullopt,
                                 false};
            if (!epc || !(*epc == expected)) {
                detail = "E2 round-trip mismatch for bank " + std::string(buf);
                return false;
            }
        } else {
            auto manufacturer = static_cast<std::uint8_t>(rng() & 0xFF);
            std::uint64_t serial = rng() & 0xFFFFFFFFFFFFull;
            std::snprintf(buf, sizeof buf, "E0%02X%012llX", manufacturer,
                          static_cast<unsigned long long>(serial));
            auto record = parse_tid(parse_bank_dump(buf, BankId::tid));
            const auto* iso = std::get_if<IsoClassTid>(&record);
            if (!iso || !(*iso == IsoClassTid{manufacturer, serial})) {
                detail = "E0 round-trip mismatch for bank " + std::string(buf);
                return false;
            }
        }
    }

    // Every other allocation class byte is rejected by name.
    for (int ac = 0; ac <= 0xFF; ++ac) {
        if (ac == 0xE2 || ac == 0xE0) continue;
        std::snprintf(buf, sizeof buf, "%02X00000000000000", ac);
        try {
            parse_tid(parse_bank_dump(buf, BankId::tid));
            detail = "allocation class " + std::to_string(ac) + " was accepted";
            return false;
        } catch (const Error& e) {
            if (e.code() != Errc::UnknownAllocationClass) {
                detail = "wrong error for unknown class: " + std::string(e.name());
                return false;
            }
        }
    }
    return true;
}

bool c9_registry_service(std::string& detail) {
    const NetId net = parse_netid("2001:0db8:0000:0001");

    // Save/load round-trip over 1,000 generated entries.
    Registry registry;
    Timestamp ts = parse_timestamp("2026-08-15T12:00:00Z").value();
    std::mt19937_64 rng(901);
    for (int i = 0; i < 1000; ++i) {
        char prefix[24];
        std::snprintf(prefix, sizeof prefix, "%04llx:%04llx:0:%04llx",
                      static_cast<unsigned long long>(rng() & 0xFFFF),
                      static_cast<unsigned long long>(rng() & 0xFFFF),
                      static_cast<unsigned long long>(rng() & 0xFFFF));
        auto mapped = map_from_uii(
            true, IsoSerial{std::to_string(i), 10}, parse_netid(prefix),
            i % 2 == 0 ? MappingMode::canonical : MappingMode::figure_compat,
            "entry-" + std::to_string(i));
        registry.register_entry(make_entry(mapped, ts));
    }
    std::ostringstream saved;
    registry.save(saved);
    std::istringstream reread(saved.str());
    if (!(Registry::load(reread) == registry)) {
        detail = "reloaded registry differs from the saved one";
        return false;
    }

    // The constructed 64-bit-suffix collision: 1 and 2^64 + 1.
    auto small = map_from_uii(false, epc_from_decimal("1"), net,
                              MappingMode::canonical, "small");
    auto large = map_from_uii(false, epc_from_decimal("18446744073709551617"),
                              net, MappingMode::canonical, "large");
    if (small.address != large.address) {
        detail = "expected the two payloads to share an address";
        return false;
    }
    Registry collide;
    collide.register_entry(make_entry(small, ts));
    bool threw = false;
    try {
        collide.register_entry(make_entry(large, ts));
    } catch (const Error& e) {
        threw = e.code() == Errc::AddressCollision;
    }
    if (!threw) {
        detail = "library did not raise AddressCollision";
        return false;
    }

    // The same collision over the wire, plus Fig. 5 byte-match.
    ResolverService service;
    const std::string base =
        " netid=2001:0db8:0000:0001 mode=canonical source=uii toggle=0";
    auto first = service.handle_line("MAP" + base + " epc=1 tag=small");
    if (first.text != "OK " + format_ipv6(small.address)) {
        detail = "service MAP reply '" + first.text + "' differs from library";
        return false;
    }
    auto second =
        service.handle_line("MAP" + base + " epc=18446744073709551617 tag=large");
    if (second.text.rfind("ERR collision small", 0) != 0) {
        detail = "service reply was '" + second.text + "'";
        return false;
    }

    const std::pair<std::string, Ipv6Address> fig5[] = {
        {"MAP source=uii toggle=0 epc=961186085415459865490825641692369 "
         "mode=figure-compat netid=6789:1011:1213:1415",
         map_from_uii(false,
                      epc_from_decimal("961186085415459865490825641692369"),
                      kFigNet, MappingMode::figure_compat)
             .address},
        {"MAP source=uii toggle=1 serial=9611860854 radix=10 "
         "mode=figure-compat netid=6789:1011:1213:1415",
         map_from_uii(true, IsoSerial{"9611860854", 10}, kFigNet,
                      MappingMode::figure_compat)
             .address},
    };
    for (const auto& [request, address] : fig5) {
        auto reply = service.handle_line(request);
        if (reply.text != "OK " + format_ipv6(address)) {
            detail = "Fig. 5 wire reply '" + reply.text + "' differs from library";
            return false;
        }
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-epcgate>\n";
        return 2;
    }
    g_cli = argv[1];

    struct Criterion {
        const char* title;
        bool (*run)(std::string&);
    };
    const Criterion criteria[] = {
        {"Fig. 5 EPC reproduction (figure-compat, byte equality)", c1_fig5_epc},
        {"Fig. 5 ISO reproduction (figure-compat, byte equality)", c2_fig5_iso},
        {"Fig. 1 URN reproduction (byte equality)", c3_fig1_urns},
        {"timing: 10,000-mapping bench, median < 10 ms", c4_timing},
        {"property: fit64 selection/padding vs mod-2^64 oracle", c5_fit64},
        {"property: dispatch and address structure", c6_structure},
        {"oracle: decimal serial conversion", c7_decimal_oracle},
        {"TID synthesis round-trip and allocation-class rejection",
         c8_tid_roundtrip},
        {"registry round-trip, collision via library and wire", c9_registry_service},
    };

    int failures = 0;
    int index = 0;
    for (const auto& criterion : criteria) {
        ++index;
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("unexpected exception: ") + e.what();
        }
        if (ok) {
            std::cout << "PASS " << index << ": " << criterion.title;
            if (!detail.empty()) std::cout << " [" << detail << "]";
            std::cout << '\n';
        } else {
            ++failures;
            std::cout << "FAIL " << index << ": " << criterion.title << " — "
                      << detail << '\n';
        }
    }
    return failures == 0 ? 0 : 1;
}
