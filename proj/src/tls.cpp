#include "maltls/tls.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "maltls/errors.hpp"

namespace maltls {

namespace {

constexpr size_t kMaxFragment = (1u << 14) + 2048;  // ciphertext expansion allowance
constexpr uint16_t kExtSupportedVersions = 0x002b;
constexpr uint16_t kExtServerName = 0x0000;

void put_u8(Bytes& b, uint8_t v) { b.push_back(v); }
void put_u16(Bytes& b, uint16_t v) {
    b.push_back(static_cast<uint8_t>(v >> 8));
    b.push_back(static_cast<uint8_t>(v));
}
void put_u24(Bytes& b, uint32_t v) {
    b.push_back(static_cast<uint8_t>(v >> 16));
    b.push_back(static_cast<uint8_t>(v >> 8));
    b.push_back(static_cast<uint8_t>(v));
}

struct HandshakeMessage {
    uint8_t type = 0;
    Bytes body;
};

// Handshake messages may span record boundaries; concatenate handshake
// fragments first, then split on the 4-byte message headers.
std::vector<HandshakeMessage> handshake_messages(const RecordStream& stream) {
    Bytes joined;
    for (const TlsRecord& rec : stream.records) {
        if (rec.content_type == kHandshake)
            joined.insert(joined.end(), rec.fragment.begin(), rec.fragment.end());
    }
    std::vector<HandshakeMessage> out;
    ByteReader r(as_span(joined));
    while (r.remaining() >= 4) {
        uint8_t type = 0;
        uint32_t len = 0;
        r.read_u8(type);
        r.read_u24be(len);
        ByteSpan body;
        if (!r.read_bytes(len, body)) break;  // truncated message
        out.push_back({type, Bytes(body.begin(), body.end())});
    }
    return out;
}

std::vector<uint16_t> parse_extension_ids(ByteReader& r, std::optional<std::string>* sni_out) {
    std::vector<uint16_t> ids;
    uint16_t total = 0;
    if (!r.read_u16be(total)) return ids;
    ByteSpan block;
    if (!r.read_bytes(total, block)) return ids;
    ByteReader er(block);
    while (er.remaining() >= 4) {
        uint16_t id = 0, len = 0;
        er.read_u16be(id);
        er.read_u16be(len);
        ByteSpan data;
        if (!er.read_bytes(len, data)) break;
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
        if (sni_out && id == kExtServerName && data.size() >= 5) {
            // ServerNameList: u16 list len, then type(0) + u16 len + name
            ByteReader sr(data);
            uint16_t list_len = 0;
            sr.read_u16be(list_len);
            uint8_t name_type = 0;
            uint16_t name_len = 0;
            if (sr.read_u8(name_type) && sr.read_u16be(name_len) && name_type == 0) {
                ByteSpan name;
                if (sr.read_bytes(name_len, name))
                    *sni_out = std::string(name.begin(), name.end());
            }
        }
    }
    return ids;
}

}  // namespace

RecordStream parse_records(ByteSpan stream) {
    RecordStream out;
    ByteReader r(stream);
    while (!r.empty()) {
        if (r.remaining() < 5) {
            out.truncated = true;
            break;
        }
        TlsRecord rec;
        r.read_u8(rec.content_type);
        r.read_u16be(rec.version);
        uint16_t len = 0;
        r.read_u16be(len);
        if (len > kMaxFragment)
            throw MalformedRecord("record length " + std::to_string(len) + " exceeds maximum");
        ByteSpan frag;
        if (!r.read_bytes(len, frag)) {
            out.truncated = true;
            break;
        }
        rec.fragment.assign(frag.begin(), frag.end());
        out.records.push_back(std::move(rec));
    }
    return out;
}

StreamPair reassemble_streams(const Flow& flow) {
    auto reassemble = [](const Flow& f, bool from_client) {
        // keep the longest payload seen per sequence number
        std::map<uint32_t, const Bytes*> segments;
        for (const FlowPacket& p : f.packets) {
            if (p.from_client != from_client || p.payload.empty()) continue;
            auto [it, inserted] = segments.try_emplace(p.tcp_seq, &p.payload);
            if (!inserted && p.payload.size() > it->second->size()) it->second = &p.payload;
        }
        Bytes out;
        bool first = true;
        uint64_t expected = 0;
        for (const auto& [seq, payload] : segments) {
            if (first) {
                expected = seq;
                first = false;
            }
            if (seq > expected) break;  // gap: stream truncates here
            uint64_t skip = expected - seq;  // overlap with already-emitted bytes
            if (skip >= payload->size()) continue;
            out.insert(out.end(), payload->begin() + static_cast<ptrdiff_t>(skip), payload->end());
            expected = seq + payload->size();
        }
        return out;
    };
    return {reassemble(flow, true), reassemble(flow, false)};
}

TlsServerInfo parse_server_hello(const RecordStream& s2c, const RecordStream& c2s) {
    TlsServerInfo info;

    for (const HandshakeMessage& msg : handshake_messages(c2s)) {
        if (msg.type != kClientHello) continue;
        ByteReader r(as_span(msg.body));
        uint16_t version = 0;
        uint8_t sess_len = 0;
        uint16_t suites_len = 0;
        uint8_t comp_len = 0;
        if (!r.read_u16be(version) || !r.skip(32) || !r.read_u8(sess_len) || !r.skip(sess_len) ||
            !r.read_u16be(suites_len) || !r.skip(suites_len) || !r.read_u8(comp_len) ||
            !r.skip(comp_len))
            break;
        parse_extension_ids(r, &info.sni);
        break;
    }

    bool found = false;
    for (const HandshakeMessage& msg : handshake_messages(s2c)) {
        if (msg.type != kServerHello) continue;
        ByteReader r(as_span(msg.body));
        uint16_t version = 0;
        uint8_t sess_len = 0;
        uint16_t suite = 0;
        uint8_t comp = 0;
        if (!r.read_u16be(version) || !r.skip(32) || !r.read_u8(sess_len) || !r.skip(sess_len) ||
            !r.read_u16be(suite) || !r.read_u8(comp))
            break;
        info.selected_ciphersuite = suite;
        info.tls_version = version;
        std::optional<std::string> unused;
        info.server_extensions = parse_extension_ids(r, &unused);
        found = true;
        break;
    }
    if (!found) throw NoServerHello("flow has no ServerHello");

    if (std::find(info.server_extensions.begin(), info.server_extensions.end(),
                  kExtSupportedVersions) != info.server_extensions.end())
        info.tls13 = true;

    // handshake completion: the server either sent ChangeCipherSpec before
    // Finished (pre-1.3) or moved on to encrypted traffic
    for (const TlsRecord& rec : s2c.records) {
        if (rec.content_type == kChangeCipherSpec || rec.content_type == kApplicationData) {
            info.handshake_complete = true;
            break;
        }
    }
    return info;
}

TlsServerInfo inspect_flow(const Flow& flow) {
    StreamPair streams = reassemble_streams(flow);
    RecordStream s2c = parse_records(as_span(streams.s2c));
    RecordStream c2s = parse_records(as_span(streams.c2s));
    return parse_server_hello(s2c, c2s);
}

int ExtensionRegistry::index_of(uint16_t id) const {
    for (size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == id) return static_cast<int>(i);
    return -1;
}

ExtensionRegistry ExtensionRegistry::defaults() {
    ExtensionRegistry reg;
    reg.version = "iana-21-v1";
    reg.ids = {0x0000, 0x0001, 0x0005, 0x000a, 0x000b, 0x000d, 0x000e, 0x000f, 0x0010, 0x0012,
               0x0015, 0x0016, 0x0017, 0x001c, 0x0023, 0x0029, 0x002b, 0x002d, 0x0031, 0x0033,
               0xff01};
    return reg;
}

ExtensionRegistry ExtensionRegistry::from_json(const nlohmann::json& j) {
    ExtensionRegistry reg;
    reg.version = j.at("version").get<std::string>();
    const auto& ids = j.at("ids");
    if (ids.size() != reg.ids.size())
        throw Error("extension registry must list exactly 21 ids");
    for (size_t i = 0; i < reg.ids.size(); ++i) {
        std::string s = ids[i].get<std::string>();
        reg.ids[i] = static_cast<uint16_t>(std::stoul(s, nullptr, 16));
    }
    return reg;
}

nlohmann::ordered_json ExtensionRegistry::to_json() const {
    nlohmann::ordered_json j;
    j["version"] = version;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    char buf[8];
    for (uint16_t id : ids) {
        std::snprintf(buf, sizeof buf, "0x%04x", id);
        arr.push_back(std::string(buf));
    }
    j["ids"] = std::move(arr);
    return j;
}

size_t ExtensionVector::popcount() const {
    size_t n = 0;
    for (uint8_t b : bits) n += b;
    return n;
}

ExtensionVector extension_vector(const TlsServerInfo& info, const ExtensionRegistry& registry) {
    ExtensionVector vec;
    vec.registry_version = registry.version;
    for (uint16_t id : info.server_extensions) {
        int idx = registry.index_of(id);
        if (idx >= 0) {
            vec.bits[static_cast<size_t>(idx)] = 1;
        } else {
            ++vec.overflow;
        }
    }
    return vec;
}

bool is_weak_ciphersuite(uint16_t code) {
    return code == 0x0004 || code == 0x0005;  // RC4-MD5, RC4-128-SHA
}

bool is_malware_favored(uint16_t code) {
    return code == 0x000a || code == 0x0004 || code == 0x006b || code == 0x0005;
}

Bytes build_client_hello(const std::string& sni, const std::vector<uint16_t>& ciphersuites) {
    Bytes body;
    put_u16(body, 0x0303);
    for (int i = 0; i < 32; ++i) put_u8(body, static_cast<uint8_t>(i * 7 + 1));  // "random"
    put_u8(body, 0);  // empty session id
    put_u16(body, static_cast<uint16_t>(ciphersuites.size() * 2));
    for (uint16_t cs : ciphersuites) put_u16(body, cs);
    put_u8(body, 1);  // one compression method
    put_u8(body, 0);  // null

    Bytes exts;
    if (!sni.empty()) {
        Bytes sni_data;
        put_u16(sni_data, static_cast<uint16_t>(sni.size() + 3));
        put_u8(sni_data, 0);  // host_name
        put_u16(sni_data, static_cast<uint16_t>(sni.size()));
        sni_data.insert(sni_data.end(), sni.begin(), sni.end());
        put_u16(exts, 0x0000);
        put_u16(exts, static_cast<uint16_t>(sni_data.size()));
        exts.insert(exts.end(), sni_data.begin(), sni_data.end());
    }
    put_u16(body, static_cast<uint16_t>(exts.size()));
    body.insert(body.end(), exts.begin(), exts.end());

    Bytes msg;
    put_u8(msg, kClientHello);
    put_u24(msg, static_cast<uint32_t>(body.size()));
    msg.insert(msg.end(), body.begin(), body.end());
    return msg;
}

Bytes build_server_hello(uint16_t ciphersuite, const std::vector<uint16_t>& extensions) {
    Bytes body;
    put_u16(body, 0x0303);
    for (int i = 0; i < 32; ++i) put_u8(body, static_cast<uint8_t>(255 - i * 3));  // "random"
    put_u8(body, 0);  // empty session id
    put_u16(body, ciphersuite);
    put_u8(body, 0);  // null compression

    Bytes exts;
    for (uint16_t id : extensions) {
        put_u16(exts, id);
        put_u16(exts, 0);  // empty payload is enough for identification
    }
    put_u16(body, static_cast<uint16_t>(exts.size()));
    body.insert(body.end(), exts.begin(), exts.end());

    Bytes msg;
    put_u8(msg, kServerHello);
    put_u24(msg, static_cast<uint32_t>(body.size()));
    msg.insert(msg.end(), body.begin(), body.end());
    return msg;
}

Bytes wrap_record(uint8_t content_type, uint16_t version, ByteSpan fragment) {
    Bytes out;
    put_u8(out, content_type);
    put_u16(out, version);
    put_u16(out, static_cast<uint16_t>(fragment.size()));
    out.insert(out.end(), fragment.begin(), fragment.end());
    return out;
}

}  // namespace maltls
