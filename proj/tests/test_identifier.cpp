#include <doctest.h>

#include <cinttypes>
#include <cstdio>
#include <random>
#include <string>

#include "epcgate/identifier.hpp"
#include "test_util.hpp"

using namespace epcgate;

namespace {

// Assembles an E2-class TID image by plain integer arithmetic: AC byte,
// then mdid(12) || model(12), then the optional 48-bit XTID. Kept free of
// BitString so round-trip tests have an independent reference.
std::string synth_epc_tid(std::uint16_t mdid, std::uint16_t model,
                          const std::uint64_t* xtid) {
    char buf[32];
    std::uint32_t packed = (static_cast<std::uint32_t>(mdid) << 12) | model;
    std::snprintf(buf, sizeof buf, "e2%06" PRIx32, packed);
    std::string out = buf;
    if (xtid) {
        std::snprintf(buf, sizeof buf, "%012" PRIx64, *xtid);
        out += buf;
    }
    return out;
}

std::string synth_iso_tid(std::uint8_t manufacturer, std::uint64_t serial) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "e0%02x%012" PRIx64, manufacturer, serial);
    return buf;
}

MemoryBank tid_bank(const std::string& hex) {
    return parse_bank_dump(hex, BankId::tid);
}

}  // namespace

TEST_CASE("parse_tid decodes the E2 layout") {
    TidRecord record = parse_tid(tid_bank("E2801AB20000AABBCCDD"));
    auto* epc = std::get_if<EpcClassTid>(&record);
    REQUIRE(epc);
    CHECK(epc->mdid == 0x801);
    CHECK(epc->model_number == 0xAB2);
    REQUIRE(epc->xtid_serial.has_value());
    CHECK(*epc->xtid_serial == 0x0000AABBCCDDull);
    CHECK_FALSE(epc->xtid_truncated);
}

TEST_CASE("parse_tid decodes the E0 layout") {
    TidRecord record = parse_tid(tid_bank("E031AABBCCDDEEFF"));
    auto* iso = std::get_if<IsoClassTid>(&record);
    REQUIRE(iso);
    CHECK(iso->manufacturer_id == 0x31);
    CHECK(iso->serial_number == 0xAABBCCDDEEFFull);
}

TEST_CASE("parse_tid handles XTID presence structurally") {
    // 32-bit bank: mandatory fields only, no XTID region.
    TidRecord record = parse_tid(tid_bank("E2801AB2"));
    auto* epc = std::get_if<EpcClassTid>(&record);
    REQUIRE(epc);
    CHECK_FALSE(epc->xtid_serial.has_value());

    // Bank extends past 20h but stops short of a whole XTID.
    auto err = capture_error([] { parse_tid(tid_bank("E2801AB20000")); });
    REQUIRE(err);
    CHECK(err->code() == Errc::TruncatedBank);

    // Longer-than-48-bit XTID region: first 48 bits, flagged.
    record = parse_tid(tid_bank("E2801AB20000AABBCCDD0123"));
    epc = std::get_if<EpcClassTid>(&record);
    REQUIRE(epc);
    CHECK(*epc->xtid_serial == 0x0000AABBCCDDull);
    CHECK(epc->xtid_truncated);
}

TEST_CASE("parse_tid rejects unknown allocation classes") {
    auto err = capture_error([] { parse_tid(tid_bank("FF00")); });
    REQUIRE(err);
    CHECK(err->code() == Errc::UnknownAllocationClass);
    CHECK(err->detail() == "AC=FFh");

    err = capture_error([] { parse_tid(tid_bank("E031AABBCCDDEE")); });
    REQUIRE(err);
    CHECK(err->code() == Errc::TruncatedBank);
}

TEST_CASE("parse_tid round-trips synthesized records") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 500; ++i) {
        if (rng() % 2 == 0) {
            EpcClassTid expect;
            expect.mdid = static_cast<std::uint16_t>(rng() & 0xFFF);
            expect.model_number = static_cast<std::uint16_t>(rng() & 0xFFF);
            std::string hex;
            if (rng() % 4 != 0) {
                expect.xtid_serial = rng() & 0xFFFFFFFFFFFFull;
                hex = synth_epc_tid(expect.mdid, expect.model_number,
                                    &*expect.xtid_serial);
            } else {
                hex = synth_epc_tid(expect.mdid, expect.model_number, nullptr);
            }
            TidRecord record = parse_tid(tid_bank(hex));
            REQUIRE(std::holds_alternative<EpcClassTid>(record));
            CHECK(std::get<EpcClassTid>(record) == expect);
        } else {
            IsoClassTid expect;
            expect.manufacturer_id = static_cast<std::uint8_t>(rng() & 0xFF);
            expect.serial_number = rng() & 0xFFFFFFFFFFFFull;
            TidRecord record = parse_tid(
                tid_bank(synth_iso_tid(expect.manufacturer_id, expect.serial_number)));
            REQUIRE(std::holds_alternative<IsoClassTid>(record));
            CHECK(std::get<IsoClassTid>(record) == expect);
        }
    }
}

TEST_CASE("parse_iso_uii splits DI.IAC.CIN.SERIAL") {
    IsoUii uii = parse_iso_uii("25S.UN.15849561.6920001026");
    CHECK(uii.di == "25S");
    CHECK(uii.iac == "UN");
    CHECK(uii.cin == "15849561");
    CHECK(uii.serial == "6920001026");

    uii = parse_iso_uii("25S.UN.11639768.MH26231276");
    CHECK(uii.serial == "MH26231276");

    // RTI identifiers use DI 25B.
    uii = parse_iso_uii("25B.LE.847295.RT0042");
    CHECK(uii.di == "25B");
}

TEST_CASE("parse_iso_uii keeps dots inside the serial payload") {
    IsoUii uii = parse_iso_uii("25S.UN.123.PART.LOT7.99");
    CHECK(uii.serial == "PART.LOT7.99");
}

TEST_CASE("parse_iso_uii validation") {
    auto err = capture_error([] { parse_iso_uii("99Z.UN.1.1"); });
    REQUIRE(err);
    CHECK(err->code() == Errc::UnsupportedDataIdentifier);

    err = capture_error([] { parse_iso_uii("25S.UN.123"); });
    REQUIRE(err);
    CHECK(err->code() == Errc::MalformedIdentifier);

    err = capture_error([] { parse_iso_uii("25S..123.X"); });
    REQUIRE(err);
    CHECK(err->code() == Errc::MalformedIdentifier);

    err = capture_error([] { parse_iso_uii("25S.UN.12A4.X"); });
    REQUIRE(err);
    CHECK(err->code() == Errc::NonNumericCin);

    err = capture_error([] { parse_iso_uii("25S.ABCD.123.X"); });
    REQUIRE(err);
    CHECK(err->code() == Errc::MalformedIdentifier);
}

TEST_CASE("render_urn prefixes the ISO namespace") {
    CHECK(render_urn(parse_iso_uii("25S.UN.15849561.6920001026")) ==
          "urn:iso:std:iso-iec:15459:25S.UN.15849561.6920001026");
    CHECK(render_urn(parse_iso_uii("25S.UN.11639768.MH26231276")) ==
          "urn:iso:std:iso-iec:15459:25S.UN.11639768.MH26231276");
}

TEST_CASE("render_urn round-trips any parsed identifier") {
    const char* inputs[] = {
        "25S.UN.15849561.6920001026",
        "25B.XY.99.SER.WITH.DOTS",
        "25S.A.0.z",
    };
    for (const char* text : inputs) {
        CHECK(render_urn(parse_iso_uii(text)) ==
              std::string("urn:iso:std:iso-iec:15459:") + text);
    }
}

TEST_CASE("serial_to_bits converts by radix") {
    BitString bits = serial_to_bits("9611860854", 10);
    CHECK(bits.size() == 34);
    CHECK(bits.to_uint64() == 0x23CE95B76ull);

    CHECK(serial_to_bits("FF", 16).to_binary() == "11111111");
    CHECK(serial_to_bits("0", 10).to_binary() == "0");

    auto err = capture_error([] { serial_to_bits("12G4", 16); });
    REQUIRE(err);
    CHECK(err->code() == Errc::InvalidDigit);
    CHECK(err->position() == 2u);

    err = capture_error([] { serial_to_bits("", 10); });
    REQUIRE(err);
    CHECK(err->code() == Errc::EmptyIdentifier);

    err = capture_error([] { serial_to_bits("123", 8); });
    REQUIRE(err);
    CHECK(err->code() == Errc::InvalidRadix);
}

TEST_CASE("serial_to_bits is monotone and minimal") {
    std::mt19937_64 rng(17);
    std::uint64_t prev_value = 0;
    BitString prev_bits = serial_to_bits("0", 10);
    for (int i = 0; i < 500; ++i) {
        std::uint64_t value = prev_value + 1 + rng() % 1000;
        BitString bits = serial_to_bits(std::to_string(value), 10);
        // Strictly more bits, or equal length and lexicographically later.
        bool longer = bits.size() > prev_bits.size();
        bool same_len_greater =
            bits.size() == prev_bits.size() && bits.to_uint64() > prev_bits.to_uint64();
        CHECK((longer || same_len_greater));
        CHECK(bits.bit(0));  // no leading zero on nonzero values
        prev_value = value;
        prev_bits = bits;
    }
}

TEST_CASE("epc_from_hex takes bits verbatim at the declared length") {
    EpcIdentifier epc = epc_from_hex("301122334455667788990011", 96);
    CHECK(epc.bits.size() == 96);
    CHECK(epc.bits.to_hex() == "301122334455667788990011");
    CHECK_FALSE(epc.decimal_form.has_value());

    // Lengths that are not nibble multiples: pad bits must be zero.
    EpcIdentifier short_epc = epc_from_hex("f8", 5);
    CHECK(short_epc.bits.to_binary() == "11111");

    auto err = capture_error([] { epc_from_hex("ff", 5); });
    REQUIRE(err);
    CHECK(err->code() == Errc::LengthMismatch);

    err = capture_error([] { epc_from_hex("301122334455667788990011", 92); });
    REQUIRE(err);
    CHECK(err->code() == Errc::LengthMismatch);

    err = capture_error([] { epc_from_hex("", 0); });
    REQUIRE(err);
    CHECK(err->code() == Errc::EmptyIdentifier);
}

TEST_CASE("epc_from_decimal keeps the digit spelling") {
    EpcIdentifier epc = epc_from_decimal("961186085415459865490825641692369");
    CHECK(epc.decimal_form == "961186085415459865490825641692369");
    CHECK(epc.bits.size() == 110);  // minimal width of the 33-digit value
    CHECK(epc.bits.bit(0));

    auto err = capture_error([] { epc_from_decimal("12A3"); });
    REQUIRE(err);
    CHECK(err->code() == Errc::InvalidDigit);
}

TEST_CASE("decimal EPC bits equal the integer value of the digits") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t value = rng();
        EpcIdentifier epc = epc_from_decimal(std::to_string(value));
        CHECK(epc.bits.to_uint64() == value);
    }
}
