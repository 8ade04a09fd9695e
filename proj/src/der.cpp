#include "maltls/der.hpp"

#include "maltls/errors.hpp"

namespace maltls::der {

namespace {

// Howard Hinnant's civil-date algorithm.
int64_t days_from_civil(int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

unsigned parse_digits(ByteSpan s, size_t pos, size_t count) {
    unsigned v = 0;
    for (size_t i = pos; i < pos + count; ++i) {
        if (i >= s.size() || s[i] < '0' || s[i] > '9')
            throw MalformedDer("time: expected digit");
        v = v * 10 + static_cast<unsigned>(s[i] - '0');
    }
    return v;
}

}  // namespace

int64_t epoch_from_civil(int64_t year, unsigned month, unsigned day) {
    return days_from_civil(year, month, day) * 86400;
}

Node parse(ByteSpan in, ByteSpan* rest) {
    ByteReader r(in);
    uint8_t head = 0;
    if (!r.read_u8(head)) throw MalformedDer("tag: empty input");

    Node node;
    node.tag_class = head >> 6;
    node.constructed = (head & 0x20) != 0;
    uint32_t tag = head & 0x1f;
    if (tag == 0x1f) {
        // high-tag-number form
        tag = 0;
        uint8_t b = 0;
        do {
            if (!r.read_u8(b)) throw MalformedDer("tag: truncated high tag number");
            if (tag > 0xffffff) throw MalformedDer("tag: number too large");
            tag = tag << 7 | (b & 0x7f);
        } while (b & 0x80);
    }
    node.tag = tag;

    uint8_t len0 = 0;
    if (!r.read_u8(len0)) throw MalformedDer("length: truncated");
    size_t length = 0;
    if (len0 < 0x80) {
        length = len0;
    } else if (len0 == 0x80) {
        throw MalformedDer("length: indefinite form not allowed in DER");
    } else {
        unsigned nbytes = len0 & 0x7f;
        if (nbytes > 4) throw MalformedDer("length: too many length octets");
        for (unsigned i = 0; i < nbytes; ++i) {
            uint8_t b = 0;
            if (!r.read_u8(b)) throw MalformedDer("length: truncated long form");
            length = length << 8 | b;
        }
    }
    ByteSpan content;
    if (!r.read_bytes(length, content)) throw MalformedDer("value: truncated content");

    node.content = content;
    node.encoded = in.subspan(0, in.size() - r.remaining());
    if (rest) *rest = ByteSpan{r.data(), r.remaining()};
    return node;
}

std::vector<Node> children(const Node& node) {
    std::vector<Node> out;
    ByteSpan cursor = node.content;
    while (!cursor.empty()) {
        ByteSpan rest;
        out.push_back(parse(cursor, &rest));
        cursor = rest;
    }
    return out;
}

bool to_bool(const Node& node) {
    if (node.content.size() != 1) throw MalformedDer("boolean: bad length");
    return node.content[0] != 0;
}

int64_t to_small_int(const Node& node) {
    if (node.content.empty()) throw MalformedDer("integer: empty");
    if (node.content.size() > 8) throw MalformedDer("integer: too wide for int64");
    int64_t v = (node.content[0] & 0x80) ? -1 : 0;
    for (uint8_t b : node.content) v = v << 8 | b;
    return v;
}

Bytes to_integer_bytes(const Node& node) {
    if (node.content.empty()) throw MalformedDer("integer: empty");
    return Bytes(node.content.begin(), node.content.end());
}

std::string to_oid(const Node& node) {
    if (node.content.empty()) throw MalformedDer("oid: empty");
    std::string out;
    ByteReader r(node.content);
    uint8_t b = 0;

    uint64_t component = 0;
    bool first_done = false;
    int subidentifier_len = 0;
    while (r.read_u8(b)) {
        if (++subidentifier_len > 9) throw MalformedDer("oid: component too large");
        component = component << 7 | (b & 0x7f);
        if (b & 0x80) continue;
        if (!first_done) {
            // first subidentifier packs the first two arcs
            unsigned arc1 = component < 80 ? static_cast<unsigned>(component / 40) : 2;
            uint64_t arc2 = component - arc1 * 40ull;
            out = std::to_string(arc1) + "." + std::to_string(arc2);
            first_done = true;
        } else {
            out += "." + std::to_string(component);
        }
        component = 0;
        subidentifier_len = 0;
    }
    if (subidentifier_len != 0) throw MalformedDer("oid: truncated component");
    return out;
}

std::string to_text(const Node& node) {
    switch (node.tag) {
        case kUtf8String:
        case kPrintableString:
        case kIa5String:
        case kT61String:
            return std::string(node.content.begin(), node.content.end());
        case kBmpString: {
            // UTF-16BE; map BMP code units to UTF-8 (surrogate pairs not expected in names)
            if (node.content.size() % 2 != 0) throw MalformedDer("bmpstring: odd length");
            std::string out;
            for (size_t i = 0; i + 1 < node.content.size(); i += 2) {
                uint32_t cu = static_cast<uint32_t>(node.content[i]) << 8 | node.content[i + 1];
                if (cu < 0x80) {
                    out.push_back(static_cast<char>(cu));
                } else if (cu < 0x800) {
                    out.push_back(static_cast<char>(0xc0 | cu >> 6));
                    out.push_back(static_cast<char>(0x80 | (cu & 0x3f)));
                } else {
                    out.push_back(static_cast<char>(0xe0 | cu >> 12));
                    out.push_back(static_cast<char>(0x80 | (cu >> 6 & 0x3f)));
                    out.push_back(static_cast<char>(0x80 | (cu & 0x3f)));
                }
            }
            return out;
        }
        default:
            throw MalformedDer("string: unsupported string tag " + std::to_string(node.tag));
    }
}

int64_t to_time(const Node& node) {
    ByteSpan s = node.content;
    int64_t year;
    size_t pos;
    if (node.tag == kUtcTime) {
        unsigned yy = parse_digits(s, 0, 2);
        year = yy < 50 ? 2000 + yy : 1900 + yy;  // two-digit year convention
        pos = 2;
    } else if (node.tag == kGeneralizedTime) {
        year = parse_digits(s, 0, 4);
        pos = 4;
    } else {
        throw MalformedDer("time: not a time tag");
    }
    unsigned month = parse_digits(s, pos, 2);
    unsigned day = parse_digits(s, pos + 2, 2);
    unsigned hour = parse_digits(s, pos + 4, 2);
    unsigned minute = parse_digits(s, pos + 6, 2);
    pos += 8;
    unsigned second = 0;
    if (pos + 1 < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        second = parse_digits(s, pos, 2);
        pos += 2;
    }
    // fractional seconds (GeneralizedTime only) are ignored
    while (pos < s.size() && (s[pos] == '.' || (s[pos] >= '0' && s[pos] <= '9'))) ++pos;

    int64_t offset = 0;
    if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
        int sign = s[pos] == '+' ? 1 : -1;
        unsigned oh = parse_digits(s, pos + 1, 2);
        unsigned om = parse_digits(s, pos + 3, 2);
        offset = sign * (static_cast<int64_t>(oh) * 3600 + om * 60);
        pos += 5;
    } else if (pos < s.size() && s[pos] == 'Z') {
        ++pos;
    }
    if (pos != s.size()) throw MalformedDer("time: trailing characters");
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
        throw MalformedDer("time: field out of range");

    int64_t days = days_from_civil(year, month, day);
    return days * 86400 + hour * 3600 + minute * 60 + second - offset;
}

std::pair<Bytes, unsigned> to_bit_string(const Node& node) {
    if (node.content.empty()) throw MalformedDer("bitstring: empty");
    unsigned unused = node.content[0];
    if (unused > 7) throw MalformedDer("bitstring: unused bits out of range");
    Bytes bits(node.content.begin() + 1, node.content.end());
    if (bits.empty() && unused != 0) throw MalformedDer("bitstring: unused bits without content");
    return {std::move(bits), unused};
}

}  // namespace maltls::der
