#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace maltls {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

inline ByteSpan as_span(const Bytes& b) { return ByteSpan{b.data(), b.size()}; }
inline ByteSpan as_span(std::string_view s) {
    return ByteSpan{reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

// Bounded forward cursor. Every read is range-checked and reports failure
// instead of walking past the end, so parsers stay total on arbitrary input.
class ByteReader {
public:
    explicit ByteReader(ByteSpan data) : p_(data.data()), end_(data.data() + data.size()) {}

    size_t remaining() const { return static_cast<size_t>(end_ - p_); }
    bool empty() const { return p_ == end_; }
    const uint8_t* data() const { return p_; }

    bool read_u8(uint8_t& out) {
        if (remaining() < 1) return false;
        out = *p_++;
        return true;
    }

    bool read_u16be(uint16_t& out) {
        if (remaining() < 2) return false;
        out = static_cast<uint16_t>(p_[0] << 8 | p_[1]);
        p_ += 2;
        return true;
    }

    bool read_u24be(uint32_t& out) {
        if (remaining() < 3) return false;
        out = static_cast<uint32_t>(p_[0]) << 16 | static_cast<uint32_t>(p_[1]) << 8 | p_[2];
        p_ += 3;
        return true;
    }

    bool read_u32be(uint32_t& out) {
        if (remaining() < 4) return false;
        out = static_cast<uint32_t>(p_[0]) << 24 | static_cast<uint32_t>(p_[1]) << 16 |
              static_cast<uint32_t>(p_[2]) << 8 | p_[3];
        p_ += 4;
        return true;
    }

    bool read_u16le(uint16_t& out) {
        if (remaining() < 2) return false;
        out = static_cast<uint16_t>(p_[1] << 8 | p_[0]);
        p_ += 2;
        return true;
    }

    bool read_u32le(uint32_t& out) {
        if (remaining() < 4) return false;
        out = static_cast<uint32_t>(p_[3]) << 24 | static_cast<uint32_t>(p_[2]) << 16 |
              static_cast<uint32_t>(p_[1]) << 8 | p_[0];
        p_ += 4;
        return true;
    }

    bool read_u16(uint16_t& out, bool big_endian) {
        return big_endian ? read_u16be(out) : read_u16le(out);
    }
    bool read_u32(uint32_t& out, bool big_endian) {
        return big_endian ? read_u32be(out) : read_u32le(out);
    }

    bool read_bytes(size_t n, ByteSpan& out) {
        if (remaining() < n) return false;
        out = ByteSpan{p_, n};
        p_ += n;
        return true;
    }

    bool skip(size_t n) {
        if (remaining() < n) return false;
        p_ += n;
        return true;
    }

private:
    const uint8_t* p_;
    const uint8_t* end_;
};

inline std::string to_hex(ByteSpan data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

// 64-bit FNV-1a; used for certificate fingerprints in the verdict cache.
inline uint64_t fnv1a64(ByteSpan data) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (uint8_t b : data) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace maltls
