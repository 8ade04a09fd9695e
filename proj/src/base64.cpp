#include "maltls/base64.hpp"

#include <array>
#include <cctype>

#include "maltls/errors.hpp"

namespace maltls {

namespace {

std::array<int8_t, 256> build_rev_table() {
    std::array<int8_t, 256> t{};
    t.fill(-1);
    const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    for (int i = 0; i < 64; ++i) t[static_cast<uint8_t>(alphabet[i])] = static_cast<int8_t>(i);
    return t;
}

}  // namespace

Bytes base64_decode(std::string_view text) {
    static const std::array<int8_t, 256> rev = build_rev_table();

    Bytes out;
    out.reserve(text.size() / 4 * 3);
    uint32_t acc = 0;
    int have = 0;
    size_t pad = 0;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '=') {
            ++pad;
            continue;
        }
        if (pad > 0) throw MalformedPem("base64: data after padding");
        int8_t v = rev[static_cast<uint8_t>(c)];
        if (v < 0) throw MalformedPem(std::string("base64: invalid character '") + c + "'");
        acc = acc << 6 | static_cast<uint32_t>(v);
        if (++have == 4) {
            out.push_back(static_cast<uint8_t>(acc >> 16));
            out.push_back(static_cast<uint8_t>(acc >> 8));
            out.push_back(static_cast<uint8_t>(acc));
            acc = 0;
            have = 0;
        }
    }
    if (pad > 2) throw MalformedPem("base64: too much padding");
    if (have == 0) {
        if (pad != 0) throw MalformedPem("base64: stray padding");
        return out;
    }
    if (have == 1 || have + pad != 4) throw MalformedPem("base64: truncated group");
    if (have == 2) {
        out.push_back(static_cast<uint8_t>(acc >> 4));
    } else {  // have == 3
        out.push_back(static_cast<uint8_t>(acc >> 10));
        out.push_back(static_cast<uint8_t>(acc >> 2));
    }
    return out;
}

}  // namespace maltls
