#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "maltls/errors.hpp"
#include "maltls/x509.hpp"
#include "oracles.hpp"

using namespace maltls;

TEST_CASE("decode_pem: empty input yields no blocks") {
    CHECK(decode_pem("").empty());
    CHECK(decode_pem("no pem here\n").empty());
}

TEST_CASE("decode_pem: round-trips a block built with an independent encoder") {
    Bytes payload;
    std::mt19937 rng(7);
    for (int i = 0; i < 321; ++i) payload.push_back(static_cast<uint8_t>(rng()));

    std::string encoded = oracle::base64_encode(payload);
    std::string pem = "-----BEGIN CERTIFICATE-----\n";
    for (size_t i = 0; i < encoded.size(); i += 64) pem += encoded.substr(i, 64) + "\n";
    pem += "-----END CERTIFICATE-----\n";

    auto blocks = decode_pem(pem);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0] == payload);

    auto two = decode_pem(pem + pem);
    REQUIRE(two.size() == 2);
    CHECK(two[1] == payload);
}

TEST_CASE("decode_pem: truncated base64 and unterminated blocks are rejected") {
    CHECK_THROWS_AS(decode_pem("-----BEGIN CERTIFICATE-----\nAB!\n-----END CERTIFICATE-----\n"),
                    MalformedPem);
    CHECK_THROWS_AS(decode_pem("-----BEGIN CERTIFICATE-----\nABCDE\n-----END CERTIFICATE-----\n"),
                    MalformedPem);
    CHECK_THROWS_AS(decode_pem("-----BEGIN CERTIFICATE-----\nQUJD\n"), MalformedPem);
}

TEST_CASE("decode_certificate: recovers generator-known fields exactly") {
    auto manifest = testutil::manifest();
    for (const auto& entry : manifest["decode"]) {
        if (!entry.contains("key_usage_bits")) continue;
        CAPTURE(entry["file"].get<std::string>());
        auto blocks = decode_pem(testutil::read_fixture(entry["file"]));
        REQUIRE(!blocks.empty());
        CertificateView view = decode_certificate(as_span(blocks[0]));

        REQUIRE(view.key_usage.has_value());
        uint16_t expect_bits = 0;
        for (int b : entry["key_usage_bits"]) expect_bits |= static_cast<uint16_t>(1 << b);
        CHECK(view.key_usage->bits == expect_bits);

        if (entry["basic_constraints"].is_null()) {
            CHECK(!view.basic_constraints.has_value());
        } else {
            REQUIRE(view.basic_constraints.has_value());
            CHECK(view.basic_constraints->is_ca == entry["basic_constraints"]["is_ca"].get<bool>());
            if (entry["basic_constraints"]["path_len"].is_null())
                CHECK(!view.basic_constraints->path_len.has_value());
            else
                CHECK(view.basic_constraints->path_len ==
                      entry["basic_constraints"]["path_len"].get<int64_t>());
        }

        CHECK(view.san_dns_names == entry["san"].get<std::vector<std::string>>());
        CHECK(view.subject_cn == entry["subject_cn"].get<std::string>());
        CHECK(to_hex(as_span(view.serial)) == entry["serial_hex"].get<std::string>());
        CHECK(view.not_before == entry["not_before"].get<int64_t>());
        CHECK(view.not_after == entry["not_after"].get<int64_t>());
        REQUIRE(view.ski.has_value());
        REQUIRE(view.aki.has_value());
        CHECK(to_hex(as_span(*view.ski)) == entry["ski_hex"].get<std::string>());
        CHECK(to_hex(as_span(*view.aki)) == entry["aki_hex"].get<std::string>());
        CHECK(view.version == 3);
        CHECK(view.parse_warnings.empty());
    }
}

TEST_CASE("decode_certificate: name constraints") {
    auto manifest = testutil::manifest();
    for (const auto& entry : manifest["decode"]) {
        if (!entry.contains("name_constraints")) continue;
        CAPTURE(entry["file"].get<std::string>());
        auto blocks = decode_pem(testutil::read_fixture(entry["file"]));
        size_t idx = entry["cert_index"].get<size_t>();
        REQUIRE(blocks.size() > idx);
        CertificateView view = decode_certificate(as_span(blocks[idx]));
        REQUIRE(view.name_constraints.has_value());
        CHECK(view.name_constraints->permitted_dns ==
              entry["name_constraints"]["permitted"].get<std::vector<std::string>>());
        CHECK(view.name_constraints->excluded_dns ==
              entry["name_constraints"]["excluded"].get<std::vector<std::string>>());
    }
}

TEST_CASE("decode_certificate: self-signed fixture has equal subject and issuer") {
    auto blocks = decode_pem(testutil::read_fixture("decode_selfsigned.pem"));
    CertificateView view = decode_certificate(as_span(blocks[0]));
    CHECK(dn_equal(view.subject_dn, view.issuer_dn));

    auto other = decode_pem(testutil::read_fixture("decode_ku.pem"));
    CertificateView leaf = decode_certificate(as_span(other[0]));
    CHECK(!dn_equal(leaf.subject_dn, leaf.issuer_dn));
}

TEST_CASE("decode_certificate: deterministic") {
    auto blocks = decode_pem(testutil::read_fixture("decode_ku.pem"));
    CertificateView a = decode_certificate(as_span(blocks[0]));
    CertificateView b = decode_certificate(as_span(blocks[0]));
    CHECK(a.subject_dn == b.subject_dn);
    CHECK(a.serial == b.serial);
    CHECK(a.extensions == b.extensions);
    CHECK(certificate_fingerprint(a) == certificate_fingerprint(b));
}

TEST_CASE("decode_certificate: arbitrary bytes never crash, they throw") {
    std::mt19937 rng(99);
    auto blocks = decode_pem(testutil::read_fixture("decode_ku.pem"));
    Bytes der = blocks[0];

    for (int trial = 0; trial < 500; ++trial) {
        Bytes fuzz = der;
        size_t n_mut = 1 + rng() % 16;
        for (size_t i = 0; i < n_mut; ++i)
            fuzz[rng() % fuzz.size()] ^= static_cast<uint8_t>(1 + rng() % 255);
        if (rng() % 4 == 0) fuzz.resize(rng() % (fuzz.size() + 1));
        try {
            CertificateView v = decode_certificate(as_span(fuzz));
            (void)v;
        } catch (const Error&) {
            // MalformedDer or UnsupportedVersion are the only acceptable outcomes
        }
    }
    CHECK(true);

    for (int trial = 0; trial < 200; ++trial) {
        Bytes junk(rng() % 64);
        for (auto& b : junk) b = static_cast<uint8_t>(rng());
        CHECK_THROWS_AS(decode_certificate(as_span(junk)), Error);
    }
}

TEST_CASE("canonical_dns_name lowercases and strips the trailing dot") {
    CHECK(canonical_dns_name("WWW.Example.COM.") == "www.example.com");
    CHECK(canonical_dns_name("plain") == "plain");
}
