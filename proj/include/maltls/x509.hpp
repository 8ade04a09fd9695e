#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maltls/bytes.hpp"

namespace maltls {

struct NameAttribute {
    std::string oid;    // dotted-decimal attribute type
    std::string value;  // decoded string value
    bool operator==(const NameAttribute&) const = default;
};

// Ordered RDN sequence, flattened one attribute per entry.
using DistinguishedName = std::vector<NameAttribute>;

enum KeyUsageBit : unsigned {
    kDigitalSignature = 0,
    kNonRepudiation = 1,
    kKeyEncipherment = 2,
    kDataEncipherment = 3,
    kKeyAgreement = 4,
    kKeyCertSign = 5,
    kCrlSign = 6,
    kEncipherOnly = 7,
    kDecipherOnly = 8,
};

struct KeyUsageBits {
    uint16_t bits = 0;  // bit i corresponds to KeyUsageBit i
    bool has(unsigned bit) const { return (bits >> bit & 1) != 0; }
    bool any() const { return bits != 0; }
    bool operator==(const KeyUsageBits&) const = default;
};

struct BasicConstraintsInfo {
    bool is_ca = false;
    std::optional<int64_t> path_len;
    bool operator==(const BasicConstraintsInfo&) const = default;
};

struct NameConstraintsInfo {
    std::vector<std::string> permitted_dns;
    std::vector<std::string> excluded_dns;
    bool base_distance_present = false;  // minimum/maximum decoded but ignored
    bool operator==(const NameConstraintsInfo&) const = default;
};

struct ExtensionRecord {
    std::string oid;
    bool critical = false;
    Bytes raw_value;
    bool operator==(const ExtensionRecord&) const = default;
};

// Well-known extension OIDs.
namespace oid {
inline constexpr const char* kSubjectKeyIdentifier = "2.5.29.14";
inline constexpr const char* kKeyUsage = "2.5.29.15";
inline constexpr const char* kSubjectAltName = "2.5.29.17";
inline constexpr const char* kBasicConstraints = "2.5.29.19";
inline constexpr const char* kNameConstraints = "2.5.29.30";
inline constexpr const char* kCertificatePolicies = "2.5.29.32";
inline constexpr const char* kAuthorityKeyIdentifier = "2.5.29.35";
inline constexpr const char* kExtendedKeyUsage = "2.5.29.37";
inline constexpr const char* kCommonName = "2.5.4.3";
}  // namespace oid

struct CertificateView {
    int version = 1;  // 1..3
    DistinguishedName subject_dn;
    DistinguishedName issuer_dn;
    Bytes serial;
    int64_t not_before = 0;  // epoch seconds, UTC
    int64_t not_after = 0;
    std::optional<std::string> subject_cn;
    std::vector<std::string> san_dns_names;
    std::optional<KeyUsageBits> key_usage;
    std::optional<BasicConstraintsInfo> basic_constraints;
    std::optional<NameConstraintsInfo> name_constraints;
    std::vector<ExtensionRecord> extensions;
    std::optional<Bytes> ski;
    std::optional<Bytes> aki;
    std::vector<std::string> parse_warnings;  // lenient-decode notes
    Bytes der;                                // original encoding
};

// Splits PEM text into the DER payloads of its CERTIFICATE blocks.
std::vector<Bytes> decode_pem(std::string_view text);

// Decodes one DER certificate. Structurally broken optional extensions are
// kept raw with a warning; a certificate whose TBS cannot be traversed at
// all raises MalformedDer (or UnsupportedVersion for an unknown version).
CertificateView decode_certificate(ByteSpan der);

// Loads a chain from PEM or raw-DER file contents, leaf first.
std::vector<CertificateView> decode_chain(ByteSpan file_bytes);

// Name handling, shared with the validator.
std::string canonical_dns_name(std::string_view name);  // lowercase, trailing dot stripped
DistinguishedName canonical_dn(const DistinguishedName& dn);
bool dn_equal(const DistinguishedName& a, const DistinguishedName& b);
std::string dn_to_string(const DistinguishedName& dn);

uint64_t certificate_fingerprint(const CertificateView& cert);

}  // namespace maltls
