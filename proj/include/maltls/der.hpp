#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "maltls/bytes.hpp"

// Minimal DER walker. Only what X.509 traversal needs: definite-length
// TLV parsing plus decoders for the primitive types the certificate
// fields use. All entry points throw MalformedDer on structural
// violations; nothing here reads out of bounds.
namespace maltls::der {

enum TagClass : uint8_t {
    kUniversal = 0,
    kApplication = 1,
    kContext = 2,
    kPrivate = 3,
};

enum UniversalTag : uint32_t {
    kBoolean = 1,
    kInteger = 2,
    kBitString = 3,
    kOctetString = 4,
    kNull = 5,
    kOid = 6,
    kUtf8String = 12,
    kSequence = 16,
    kSet = 17,
    kPrintableString = 19,
    kT61String = 20,
    kIa5String = 22,
    kUtcTime = 23,
    kGeneralizedTime = 24,
    kBmpString = 30,
};

struct Node {
    uint8_t tag_class = kUniversal;
    bool constructed = false;
    uint32_t tag = 0;
    ByteSpan content;  // value bytes
    ByteSpan encoded;  // full TLV, including header

    bool is(uint8_t cls, uint32_t t) const { return tag_class == cls && tag == t; }
    bool is_universal(uint32_t t) const { return is(kUniversal, t); }
    bool is_context(uint32_t t) const { return tag_class == kContext && tag == t; }
};

// Parses the TLV at the front of `in`; `rest`, when non-null, receives the
// bytes that follow it.
Node parse(ByteSpan in, ByteSpan* rest = nullptr);

// Parses the full content of a constructed node into its child TLVs.
std::vector<Node> children(const Node& node);

// Primitive decoders.
bool to_bool(const Node& node);
int64_t to_small_int(const Node& node);        // INTEGER that fits in int64
Bytes to_integer_bytes(const Node& node);      // big-endian magnitude incl. sign byte
std::string to_oid(const Node& node);          // dotted-decimal
std::string to_text(const Node& node);         // character string types
int64_t to_time(const Node& node);             // UTCTime / GeneralizedTime -> epoch seconds
std::pair<Bytes, unsigned> to_bit_string(const Node& node);  // {bytes, unused bits}

// Midnight of the given civil date as epoch seconds (proleptic Gregorian).
int64_t epoch_from_civil(int64_t year, unsigned month, unsigned day);

}  // namespace maltls::der
