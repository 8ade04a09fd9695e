#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "maltls/cert_validation.hpp"
#include "maltls/errors.hpp"
#include "oracles.hpp"

using namespace maltls;

namespace {

CertificateView make_cert(std::string cn, std::vector<std::string> san = {}) {
    CertificateView c;
    c.subject_dn = {{oid::kCommonName, cn}};
    c.issuer_dn = {{oid::kCommonName, "Test CA"}};
    if (!cn.empty()) c.subject_cn = cn;
    c.san_dns_names = std::move(san);
    c.not_before = 0;
    c.not_after = 4102444800;  // far future
    return c;
}

CertificateView with_ku(CertificateView c, std::initializer_list<unsigned> bits) {
    KeyUsageBits ku;
    for (unsigned b : bits) ku.bits |= static_cast<uint16_t>(1 << b);
    c.key_usage = ku;
    return c;
}

CertificateView with_bc(CertificateView c, bool is_ca, std::optional<int64_t> path_len = {}) {
    c.basic_constraints = BasicConstraintsInfo{is_ca, path_len};
    return c;
}

const int64_t kNow = 1767225600;  // 2026-01-01T00:00:00Z

}  // namespace

TEST_CASE("check_key_usage") {
    auto ca = with_bc(with_ku(make_cert("Test CA"), {kKeyCertSign}), true);

    SUBCASE("leaf with digitalSignature passes") {
        auto leaf = with_ku(make_cert("a", {"a"}), {kDigitalSignature});
        CHECK(!check_key_usage({leaf, ca}).failed);
    }
    SUBCASE("leaf with only cRLSign fails") {
        auto leaf = with_ku(make_cert("a", {"a"}), {kCrlSign});
        CHECK(check_key_usage({leaf, ca}).failed);
    }
    SUBCASE("issuer without keyCertSign fails") {
        auto leaf = with_ku(make_cert("a", {"a"}), {kDigitalSignature});
        auto bad_ca = with_bc(with_ku(make_cert("Test CA"), {kDigitalSignature}), true);
        CHECK(check_key_usage({leaf, bad_ca}).failed);
    }
    SUBCASE("absent key usage everywhere is not evaluated") {
        auto r = check_key_usage({make_cert("a"), make_cert("b")});
        CHECK(!r.failed);
        CHECK(r.detail.find("not evaluated") != std::string::npos);
    }
}

TEST_CASE("check_validity is a closed interval with day-resolution expiry detail") {
    CertificateView c = make_cert("a");
    c.not_before = 1000000;
    c.not_after = 2000000;

    CHECK(!check_validity(c, 1500000).failed);
    CHECK(!check_validity(c, 1000000).failed);  // boundary included
    CHECK(!check_validity(c, 2000000).failed);
    CHECK(check_validity(c, 999999).failed);

    auto r = check_validity(c, 2000000 + 86400);
    CHECK(r.failed);
    CHECK(r.detail.find("days_expired=1") != std::string::npos);

    // monotone over time: failure exactly outside [not_before, not_after]
    for (int64_t t : {0ll, 999999ll, 1000000ll, 1234567ll, 2000000ll, 2000001ll, 9999999ll}) {
        bool inside = t >= c.not_before && t <= c.not_after;
        CHECK(check_validity(c, t).failed == !inside);
    }
}

TEST_CASE("check_critical_extensions") {
    auto recognized = ValidationConfig::defaults().recognized_critical_oids;
    CertificateView c = make_cert("a");
    c.extensions.push_back({oid::kKeyUsage, true, {}});
    c.extensions.push_back({"1.2.3.55", false, {}});  // unknown but not critical
    CHECK(!check_critical_extensions(c, recognized).failed);

    c.extensions.push_back({"1.2.3.4", true, {}});
    auto r = check_critical_extensions(c, recognized);
    CHECK(r.failed);
    CHECK(r.detail.find("1.2.3.4") != std::string::npos);
}

TEST_CASE("check_hostname") {
    SUBCASE("exact SAN match") {
        auto c = make_cert("x", {"www.example.com"});
        CHECK(!check_hostname(c, "www.example.com").failed);
        CHECK(check_hostname(c, "evil.com").failed);
    }
    SUBCASE("suffix tricks do not match") {
        auto c = make_cert("x", {"mywebsite.com"});
        CHECK(check_hostname(c, "mywebsite.com.evil.com").failed);
    }
    SUBCASE("double wildcard never matches and is called out") {
        auto c = make_cert("x", {"*.*.example.com"});
        auto r = check_hostname(c, "a.b.example.com");
        CHECK(r.failed);
        CHECK(r.detail.find("*.*.example.com") != std::string::npos);
    }
    SUBCASE("single wildcard covers exactly one label") {
        auto c = make_cert("x", {"*.example.com"});
        CHECK(!check_hostname(c, "a.example.com").failed);
        CHECK(check_hostname(c, "a.b.example.com").failed);
        CHECK(check_hostname(c, "example.com").failed);
    }
    SUBCASE("CN fallback only when SAN has no dNSName") {
        auto with_cn_only = make_cert("www.example.com");
        CHECK(!check_hostname(with_cn_only, "www.example.com").failed);
        auto san_beats_cn = make_cert("www.example.com", {"other.net"});
        CHECK(check_hostname(san_beats_cn, "www.example.com").failed);
    }
}

TEST_CASE("wildcard matcher agrees with the brute-force oracle") {
    std::mt19937 rng(4242);
    const std::vector<std::string> label_pool = {"a",   "b",  "abc", "example", "com",
                                                 "net", "*",  "a*",  "*b",      "xn--q",
                                                 "Www", "COM"};
    auto gen_name = [&](bool allow_star) {
        size_t n = 1 + rng() % 4;
        std::string out;
        for (size_t i = 0; i < n; ++i) {
            if (i) out += ".";
            std::string lab = label_pool[rng() % label_pool.size()];
            if (!allow_star)
                while (lab.find('*') != std::string::npos) lab = label_pool[rng() % label_pool.size()];
            out += lab;
        }
        return out;
    };

    size_t agreements = 0;
    const size_t total = 1000;
    for (size_t i = 0; i < total; ++i) {
        std::string pattern = gen_name(true);
        std::string hostname = gen_name(false);
        // half the time, derive the hostname from the pattern so matches occur
        if (rng() % 2) {
            hostname = pattern;
            size_t star = hostname.find('*');
            while (star != std::string::npos) {
                hostname.replace(star, 1, "sub");
                star = hostname.find('*');
            }
        }
        bool got = hostname_matches(pattern, hostname);
        bool want = oracle::wildcard_match(pattern, hostname);
        CAPTURE(pattern);
        CAPTURE(hostname);
        CHECK(got == want);
        if (got == want) ++agreements;
    }
    CHECK(agreements == total);
}

TEST_CASE("check_basic_constraints") {
    auto leaf = make_cert("leaf", {"www.example.com"});

    SUBCASE("CA without path length passes") {
        auto ca = with_bc(make_cert("Test CA"), true);
        CHECK(!check_basic_constraints({leaf, ca}).failed);
    }
    SUBCASE("non-CA issuer fails") {
        auto mid = with_bc(make_cert("mid"), false);
        auto ca = with_bc(make_cert("Test CA"), true);
        CHECK(check_basic_constraints({leaf, mid, ca}).failed);
    }
    SUBCASE("missing basic constraints on an issuer fails") {
        CHECK(check_basic_constraints({leaf, make_cert("naked issuer")}).failed);
    }
    SUBCASE("path length counts the intermediates below the CA") {
        auto int1 = with_bc(make_cert("int1"), true);
        auto int2_pl0 = with_bc(make_cert("int2"), true, 0);
        auto root = with_bc(make_cert("root"), true);
        // pl=0 directly above the leaf is satisfied
        CHECK(!check_basic_constraints({leaf, int2_pl0, root}).failed);
        // pl=0 with one more intermediate below is violated
        CHECK(check_basic_constraints({leaf, int1, int2_pl0, root}).failed);
        // pl=1 tolerates exactly one
        auto int2_pl1 = with_bc(make_cert("int2"), true, 1);
        CHECK(!check_basic_constraints({leaf, int1, int2_pl1, root}).failed);
        // root pl=1 sees two intermediates below
        auto root_pl1 = with_bc(make_cert("root"), true, 1);
        CHECK(check_basic_constraints({leaf, int1, int2_pl1, root_pl1, }).failed);
    }
    SUBCASE("single-certificate chain passes") {
        CHECK(!check_basic_constraints({leaf}).failed);
    }
}

TEST_CASE("check_name_constraints") {
    auto leaf = [](std::string san) { return make_cert("leaf", {std::move(san)}); };
    auto ca_permit = [](std::string subtree) {
        auto c = with_bc(make_cert("CA"), true);
        c.name_constraints = NameConstraintsInfo{{std::move(subtree)}, {}, false};
        return c;
    };
    auto ca_exclude = [](std::string subtree) {
        auto c = with_bc(make_cert("CA"), true);
        c.name_constraints = NameConstraintsInfo{{}, {std::move(subtree)}, false};
        return c;
    };

    CHECK(!check_name_constraints({leaf("www.example.com"), ca_permit("example.com")}).failed);
    CHECK(check_name_constraints({leaf("mail.google.com"), ca_exclude("google.com")}).failed);
    CHECK(check_name_constraints({leaf("evil.com"), ca_permit("corp.local")}).failed);
    // subtree match is on label boundaries, not substrings
    CHECK(check_name_constraints({leaf("notexample.com"), ca_permit("example.com")}).failed);
    // no constraints anywhere: not evaluated
    auto r = check_name_constraints({leaf("x.y"), with_bc(make_cert("CA"), true)});
    CHECK(!r.failed);
    CHECK(r.detail.find("not evaluated") != std::string::npos);
}

TEST_CASE("is_self_signed") {
    CertificateView c = make_cert("self");
    c.issuer_dn = c.subject_dn;
    CHECK(is_self_signed(c));

    c.ski = Bytes{1, 2, 3};
    c.aki = Bytes{1, 2, 3};
    CHECK(is_self_signed(c));

    c.aki = Bytes{9, 9, 9};
    CHECK(!is_self_signed(c));  // same DN but the issuer key is someone else's

    CertificateView d = make_cert("a");
    CHECK(!is_self_signed(d));
}

TEST_CASE("validate: report shape and exhaustiveness") {
    auto leaf = with_ku(make_cert("leaf", {"www.example.com"}), {kDigitalSignature});
    auto ca = with_bc(with_ku(make_cert("Test CA"), {kKeyCertSign}), true);
    ValidationReport report = validate({leaf, ca}, "www.example.com", kNow,
                                       ValidationConfig::defaults());
    CHECK(report.passed());
    CHECK(!report.self_signed);
    REQUIRE(report.results.size() == 6);
    for (size_t i = 0; i < 6; ++i) {
        CHECK(report.results[i].criterion == kAllCriteria[i]);
        CHECK(!report.results[i].detail.empty());
    }
    CHECK_THROWS_AS(validate({}, "x", kNow, ValidationConfig::defaults()), Error);
}

TEST_CASE("validate: fixture corpus matches the construction matrix") {
    auto manifest = testutil::manifest();
    int64_t eval_at = manifest["eval_at"].get<int64_t>();
    auto config = ValidationConfig::defaults();

    auto run_case = [&](const nlohmann::json& entry) {
        CAPTURE(entry["name"].get<std::string>());
        auto blocks = decode_pem(testutil::read_fixture(entry["file"]));
        std::vector<CertificateView> chain;
        for (const Bytes& der : blocks) chain.push_back(decode_certificate(as_span(der)));
        ValidationReport report =
            validate(chain, entry["hostname"].get<std::string>(), eval_at, config);
        const auto& expected = entry["expected"];
        for (Criterion c : kAllCriteria) {
            CAPTURE(criterion_name(c));
            CHECK(report.result(c).failed == expected[criterion_name(c)].get<bool>());
        }
        CHECK(report.self_signed == expected["self_signed"].get<bool>());
    };

    for (const auto& entry : manifest["corpus"]) run_case(entry);
    for (const auto& entry : manifest["extra"]) run_case(entry);
}

TEST_CASE("validate: criterion independence over the single-fault corpus") {
    // each single-fault fixture flips exactly its own criterion
    auto manifest = testutil::manifest();
    int64_t eval_at = manifest["eval_at"].get<int64_t>();
    auto config = ValidationConfig::defaults();
    for (const auto& entry : manifest["corpus"]) {
        const auto& expected = entry["expected"];
        int faults = 0;
        for (Criterion c : kAllCriteria) faults += expected[criterion_name(c)].get<bool>() ? 1 : 0;
        if (faults != 1) continue;

        auto blocks = decode_pem(testutil::read_fixture(entry["file"]));
        std::vector<CertificateView> chain;
        for (const Bytes& der : blocks) chain.push_back(decode_certificate(as_span(der)));
        ValidationReport report =
            validate(chain, entry["hostname"].get<std::string>(), eval_at, config);
        int flipped = 0;
        for (const auto& r : report.results) flipped += r.failed ? 1 : 0;
        CAPTURE(entry["name"].get<std::string>());
        CHECK(flipped == 1);
    }
}

TEST_CASE("ValidationReport JSON round-trip with stable key order") {
    auto leaf = make_cert("leaf", {"www.example.com"});
    ValidationReport report =
        validate({leaf}, "www.example.com", kNow, ValidationConfig::defaults());
    auto j = report.to_json();
    std::string s = j.dump();
    CHECK(s.find("\"hostname\"") < s.find("\"evaluated_at\""));
    CHECK(s.find("\"evaluated_at\"") < s.find("\"results\""));
    ValidationReport back = ValidationReport::from_json(nlohmann::json::parse(s));
    CHECK(back == report);
}
