#include <doctest.h>

#include "maltls/errors.hpp"
#include "maltls/tls.hpp"

using namespace maltls;

namespace {

Bytes concat(std::initializer_list<Bytes> parts) {
    Bytes out;
    for (const Bytes& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

FlowPacket seg(bool from_client, uint32_t seq, Bytes payload) {
    return {0.0, from_client, kTcpAck, seq, std::move(payload), 0};
}

}  // namespace

TEST_CASE("parse_records: splitting and truncation") {
    Bytes one = wrap_record(kHandshake, 0x0303, as_span(Bytes{1, 2, 3}));
    RecordStream rs = parse_records(as_span(one));
    REQUIRE(rs.records.size() == 1);
    CHECK(rs.records[0].content_type == kHandshake);
    CHECK(rs.records[0].version == 0x0303);
    CHECK(rs.records[0].fragment == Bytes{1, 2, 3});
    CHECK(!rs.truncated);

    Bytes two = concat({one, wrap_record(kApplicationData, 0x0303, as_span(Bytes{9}))});
    rs = parse_records(as_span(two));
    REQUIRE(rs.records.size() == 2);
    CHECK(rs.records[1].content_type == kApplicationData);

    Bytes cut(two.begin(), two.end() - 1);
    rs = parse_records(as_span(cut));
    CHECK(rs.records.size() == 1);
    CHECK(rs.truncated);

    // record claiming an oversized fragment
    Bytes bad = {22, 3, 3, 0x50, 0x00};
    CHECK_THROWS_AS(parse_records(as_span(bad)), MalformedRecord);
}

TEST_CASE("parse_records concatenation property on record boundaries") {
    Bytes r1 = concat({wrap_record(kHandshake, 0x0303, as_span(Bytes{1})),
                       wrap_record(kAlert, 0x0303, as_span(Bytes{2, 2}))});
    Bytes r2 = wrap_record(kApplicationData, 0x0303, as_span(Bytes{3, 3, 3}));
    auto a = parse_records(as_span(r1));
    auto b = parse_records(as_span(r2));
    auto both = parse_records(as_span(concat({r1, r2})));
    REQUIRE(both.records.size() == a.records.size() + b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i)
        CHECK(both.records[i].fragment == a.records[i].fragment);
    for (size_t i = 0; i < b.records.size(); ++i)
        CHECK(both.records[a.records.size() + i].fragment == b.records[i].fragment);
}

TEST_CASE("reassemble_streams") {
    SUBCASE("in-order segments concatenate") {
        Flow flow;
        flow.packets = {seg(true, 1000, {'A', 'B'}), seg(true, 1002, {'C', 'D'})};
        CHECK(reassemble_streams(flow).c2s == Bytes{'A', 'B', 'C', 'D'});
    }
    SUBCASE("retransmission counts once") {
        Flow flow;
        flow.packets = {seg(true, 1000, {'A', 'B'}), seg(true, 1000, {'A', 'B'}),
                        seg(true, 1002, {'C'})};
        CHECK(reassemble_streams(flow).c2s == Bytes{'A', 'B', 'C'});
    }
    SUBCASE("out-of-order arrival is reordered") {
        Flow flow;
        flow.packets = {seg(true, 1002, {'C', 'D'}), seg(true, 1000, {'A', 'B'})};
        CHECK(reassemble_streams(flow).c2s == Bytes{'A', 'B', 'C', 'D'});
    }
    SUBCASE("a gap truncates the stream") {
        Flow flow;
        flow.packets = {seg(true, 1000, {'A'}), seg(true, 1005, {'Z'})};
        CHECK(reassemble_streams(flow).c2s == Bytes{'A'});
    }
    SUBCASE("overlapping segment contributes only its tail") {
        Flow flow;
        flow.packets = {seg(true, 1000, {'A', 'B', 'C'}), seg(true, 1001, {'B', 'C', 'D'})};
        CHECK(reassemble_streams(flow).c2s == Bytes{'A', 'B', 'C', 'D'});
    }
    SUBCASE("directions are independent") {
        Flow flow;
        flow.packets = {seg(true, 10, {'a'}), seg(false, 99, {'x', 'y'}), seg(true, 11, {'b'})};
        StreamPair sp = reassemble_streams(flow);
        CHECK(sp.c2s == Bytes{'a', 'b'});
        CHECK(sp.s2c == Bytes{'x', 'y'});
    }
}

TEST_CASE("parse_server_hello: round-trips the built handshake") {
    for (uint16_t suite : {0x000a, 0x0004, 0x006b, 0x0005, 0xc02f}) {
        CAPTURE(suite);
        std::vector<uint16_t> exts = {0xff01, 0x000b};
        Bytes s2c = concat({wrap_record(kHandshake, 0x0303, as_span(build_server_hello(suite, exts))),
                            wrap_record(kChangeCipherSpec, 0x0303, as_span(Bytes{1}))});
        Bytes c2s = wrap_record(kHandshake, 0x0301,
                                as_span(build_client_hello("sni.example", {suite})));
        TlsServerInfo info = parse_server_hello(parse_records(as_span(s2c)),
                                                parse_records(as_span(c2s)));
        CHECK(info.selected_ciphersuite == suite);
        CHECK(info.server_extensions == exts);
        CHECK(info.sni == "sni.example");
        CHECK(info.handshake_complete);
        CHECK(info.tls_version == 0x0303);
        CHECK(!info.tls13);
    }
}

TEST_CASE("parse_server_hello: no ServerHello raises") {
    Bytes c2s = wrap_record(kHandshake, 0x0301, as_span(build_client_hello("x", {0x002f})));
    RecordStream empty;
    CHECK_THROWS_AS(parse_server_hello(empty, parse_records(as_span(c2s))), NoServerHello);
}

TEST_CASE("parse_server_hello: zero extensions and incomplete handshakes") {
    Bytes sh = wrap_record(kHandshake, 0x0303, as_span(build_server_hello(0x0004, {})));
    TlsServerInfo info = parse_server_hello(parse_records(as_span(sh)), RecordStream{});
    CHECK(info.server_extensions.empty());
    CHECK(!info.handshake_complete);  // nothing after the hello
    CHECK(!info.sni.has_value());
}

TEST_CASE("parse_server_hello: handshake message split across records") {
    Bytes msg = build_server_hello(0x006b, {0xff01});
    Bytes first(msg.begin(), msg.begin() + 9);
    Bytes rest(msg.begin() + 9, msg.end());
    Bytes s2c = concat({wrap_record(kHandshake, 0x0303, as_span(first)),
                        wrap_record(kHandshake, 0x0303, as_span(rest)),
                        wrap_record(kApplicationData, 0x0303, as_span(Bytes{0}))});
    TlsServerInfo info = parse_server_hello(parse_records(as_span(s2c)), RecordStream{});
    CHECK(info.selected_ciphersuite == 0x006b);
    CHECK(info.server_extensions == std::vector<uint16_t>{0xff01});
    CHECK(info.handshake_complete);  // application data followed
}

TEST_CASE("extension_vector") {
    ExtensionRegistry reg = ExtensionRegistry::defaults();
    REQUIRE(reg.ids.size() == 21);

    TlsServerInfo info;
    SUBCASE("named extensions set exactly their bits") {
        info.server_extensions = {0xff01, 0x000b};
        ExtensionVector vec = extension_vector(info, reg);
        CHECK(vec.popcount() == 2);
        CHECK(vec.bits[static_cast<size_t>(reg.index_of(0xff01))] == 1);
        CHECK(vec.bits[static_cast<size_t>(reg.index_of(0x000b))] == 1);
        CHECK(vec.overflow == 0);
        CHECK(vec.registry_version == reg.version);
    }
    SUBCASE("empty extension list gives the zero vector") {
        ExtensionVector vec = extension_vector(info, reg);
        CHECK(vec.popcount() == 0);
        CHECK(vec.overflow == 0);
    }
    SUBCASE("unknown extensions overflow instead of disappearing") {
        info.server_extensions = {0xabcd};
        ExtensionVector vec = extension_vector(info, reg);
        CHECK(vec.popcount() == 0);
        CHECK(vec.overflow == 1);
    }
    SUBCASE("popcount never exceeds the extension count") {
        info.server_extensions = {0xff01, 0x000b, 0xdead, 0x0010};
        ExtensionVector vec = extension_vector(info, reg);
        CHECK(vec.popcount() <= info.server_extensions.size());
        CHECK(vec.popcount() + vec.overflow == info.server_extensions.size());
    }
}

TEST_CASE("registry JSON round-trip") {
    ExtensionRegistry reg = ExtensionRegistry::defaults();
    ExtensionRegistry back = ExtensionRegistry::from_json(reg.to_json());
    CHECK(back.ids == reg.ids);
    CHECK(back.version == reg.version);

    auto j = reg.to_json();
    j["ids"].erase(0);
    CHECK_THROWS_AS(ExtensionRegistry::from_json(j), Error);
}

TEST_CASE("ciphersuite classifications") {
    CHECK(is_weak_ciphersuite(0x0004));
    CHECK(is_weak_ciphersuite(0x0005));
    CHECK(!is_weak_ciphersuite(0x000a));
    CHECK(!is_weak_ciphersuite(0x1301));

    for (uint16_t favored : {0x000a, 0x0004, 0x006b, 0x0005}) CHECK(is_malware_favored(favored));
    CHECK(!is_malware_favored(0x1301));
    CHECK(!is_malware_favored(0xc02f));

    CHECK(is_weak_ciphersuite(0x0004) == is_malware_favored(0x0004));
    CHECK(is_weak_ciphersuite(0x006b) == false);
}
