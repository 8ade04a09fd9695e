#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "maltls/bytes.hpp"
#include "maltls/flow.hpp"

namespace maltls {

enum TlsContentType : uint8_t {
    kChangeCipherSpec = 20,
    kAlert = 21,
    kHandshake = 22,
    kApplicationData = 23,
};

enum TlsHandshakeType : uint8_t {
    kClientHello = 1,
    kServerHello = 2,
};

struct TlsRecord {
    uint8_t content_type = 0;
    uint16_t version = 0;
    Bytes fragment;
};

struct RecordStream {
    std::vector<TlsRecord> records;
    bool truncated = false;  // a partial record was left at the tail
};

// Splits a byte stream on 5-byte TLS record headers. A fragment length
// beyond 2^14 + 2048 raises MalformedRecord; a partial trailing record
// only sets the truncated flag.
RecordStream parse_records(ByteSpan stream);

struct StreamPair {
    Bytes c2s;
    Bytes s2c;
};

// In-order, de-duplicated TCP payload per direction; a sequence gap
// truncates the stream at the gap.
StreamPair reassemble_streams(const Flow& flow);

struct TlsServerInfo {
    std::optional<uint16_t> selected_ciphersuite;
    std::vector<uint16_t> server_extensions;  // order preserved, no duplicates
    uint16_t tls_version = 0;
    bool tls13 = false;  // negotiated via supported_versions
    std::optional<std::string> sni;
    bool handshake_complete = false;
};

// Extracts the ServerHello parameters from the server-to-client records;
// the client-to-server records contribute the SNI. Throws NoServerHello
// when the flow never produced one.
TlsServerInfo parse_server_hello(const RecordStream& s2c, const RecordStream& c2s);

// reassemble + parse in one step
TlsServerInfo inspect_flow(const Flow& flow);

struct ExtensionRegistry {
    std::string version;
    std::array<uint16_t, 21> ids{};

    int index_of(uint16_t id) const;  // -1 when absent
    static ExtensionRegistry defaults();
    static ExtensionRegistry from_json(const nlohmann::json& j);
    nlohmann::ordered_json to_json() const;
};

struct ExtensionVector {
    std::array<uint8_t, 21> bits{};
    std::string registry_version;
    size_t overflow = 0;  // server extensions not covered by the registry

    size_t popcount() const;
};

ExtensionVector extension_vector(const TlsServerInfo& info, const ExtensionRegistry& registry);

bool is_weak_ciphersuite(uint16_t code);
bool is_malware_favored(uint16_t code);

// Handshake synthesis for the corpus generator and the round-trip tests.
Bytes build_client_hello(const std::string& sni, const std::vector<uint16_t>& ciphersuites);
Bytes build_server_hello(uint16_t ciphersuite, const std::vector<uint16_t>& extensions);
Bytes wrap_record(uint8_t content_type, uint16_t version, ByteSpan fragment);

}  // namespace maltls
