#include "maltls/pcap.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "maltls/errors.hpp"

namespace maltls {

namespace {

constexpr uint32_t kMagicNative = 0xa1b2c3d4;
constexpr uint32_t kMagicSwapped = 0xd4c3b2a1;
constexpr uint16_t kEthertypeIpv4 = 0x0800;
constexpr size_t kEthernetHeaderLen = 14;

void put_u16be(Bytes& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_u32be(Bytes& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_u32le(Bytes& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
}

void put_u16le(Bytes& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

// Attempts to decode one captured Ethernet frame into a TCP PacketRecord.
bool parse_frame(ByteSpan frame, PacketRecord& rec) {
    ByteReader r(frame);
    if (!r.skip(12)) return false;  // MAC addresses
    uint16_t ethertype = 0;
    if (!r.read_u16be(ethertype)) return false;
    if (ethertype != kEthertypeIpv4) return false;

    if (r.remaining() < 20) return false;
    const uint8_t* ip = r.data();
    uint8_t version = ip[0] >> 4;
    uint8_t ihl = (ip[0] & 0x0f) * 4u;
    if (version != 4 || ihl < 20) return false;
    uint16_t total_len = static_cast<uint16_t>(ip[2] << 8 | ip[3]);
    uint8_t protocol = ip[9];
    if (protocol != 6) return false;
    if (total_len < ihl || r.remaining() < ihl) return false;

    rec.src_ip = static_cast<uint32_t>(ip[12]) << 24 | static_cast<uint32_t>(ip[13]) << 16 |
                 static_cast<uint32_t>(ip[14]) << 8 | ip[15];
    rec.dst_ip = static_cast<uint32_t>(ip[16]) << 24 | static_cast<uint32_t>(ip[17]) << 16 |
                 static_cast<uint32_t>(ip[18]) << 8 | ip[19];
    if (!r.skip(ihl)) return false;

    size_t ip_payload = std::min<size_t>(total_len - ihl, r.remaining());
    if (ip_payload < 20) return false;
    const uint8_t* tcp = r.data();
    rec.src_port = static_cast<uint16_t>(tcp[0] << 8 | tcp[1]);
    rec.dst_port = static_cast<uint16_t>(tcp[2] << 8 | tcp[3]);
    rec.tcp_seq = static_cast<uint32_t>(tcp[4]) << 24 | static_cast<uint32_t>(tcp[5]) << 16 |
                  static_cast<uint32_t>(tcp[6]) << 8 | tcp[7];
    uint8_t data_offset = (tcp[12] >> 4) * 4u;
    rec.tcp_flags = tcp[13] & 0x3f;
    if (data_offset < 20 || ip_payload < data_offset) return false;
    rec.payload.assign(tcp + data_offset, tcp + ip_payload);
    return true;
}

}  // namespace

Capture read_pcap(ByteSpan file_bytes) {
    ByteReader r(file_bytes);
    uint32_t magic = 0;
    if (!r.read_u32le(magic)) throw BadMagic("pcap: file shorter than magic");
    bool swapped;
    if (magic == kMagicNative) {
        swapped = false;
    } else if (magic == kMagicSwapped) {
        swapped = true;
    } else {
        throw BadMagic("pcap: unknown magic");
    }
    // host-endian files store fields little-endian here; a swapped file flips them
    const bool le = !swapped;

    uint16_t vmaj = 0, vmin = 0;
    uint32_t thiszone = 0, sigfigs = 0, snaplen = 0, linktype = 0;
    if (!r.read_u16(vmaj, !le) || !r.read_u16(vmin, !le) || !r.read_u32(thiszone, !le) ||
        !r.read_u32(sigfigs, !le) || !r.read_u32(snaplen, !le) || !r.read_u32(linktype, !le))
        throw TruncatedRecord("pcap: truncated global header");
    if (linktype != 1) throw BadMagic("pcap: only Ethernet link type supported");

    Capture cap;
    while (!r.empty()) {
        uint32_t ts_sec = 0, ts_usec = 0, incl_len = 0, orig_len = 0;
        if (!r.read_u32(ts_sec, !le) || !r.read_u32(ts_usec, !le) || !r.read_u32(incl_len, !le) ||
            !r.read_u32(orig_len, !le))
            throw TruncatedRecord("pcap: truncated record header");
        ByteSpan frame;
        if (!r.read_bytes(incl_len, frame))
            throw TruncatedRecord("pcap: record claims more bytes than remain");

        PacketRecord rec;
        rec.ts = static_cast<double>(ts_sec) + static_cast<double>(ts_usec) / 1e6;
        rec.wire_len = orig_len;
        if (parse_frame(frame, rec)) {
            cap.packets.push_back(std::move(rec));
        } else {
            ++cap.skipped;
        }
    }
    return cap;
}

Capture read_pcap_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open pcap file: " + path);
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return read_pcap(as_span(data));
}

std::string ipv4_to_string(uint32_t ip) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", ip >> 24 & 0xff, ip >> 16 & 0xff, ip >> 8 & 0xff,
                  ip & 0xff);
    return buf;
}

Bytes build_tcp_frame(uint32_t src_ip, uint32_t dst_ip, uint16_t src_port, uint16_t dst_port,
                      uint8_t tcp_flags, uint32_t seq, uint32_t ack, ByteSpan payload) {
    Bytes f;
    f.reserve(kEthernetHeaderLen + 40 + payload.size());
    // Ethernet: fixed dummy MACs
    for (int i = 0; i < 6; ++i) f.push_back(0x02);
    for (int i = 0; i < 6; ++i) f.push_back(0x04);
    put_u16be(f, kEthertypeIpv4);
    // IPv4 header, 20 bytes, checksum left zero
    uint16_t total_len = static_cast<uint16_t>(20 + 20 + payload.size());
    f.push_back(0x45);
    f.push_back(0);
    put_u16be(f, total_len);
    put_u16be(f, 0);       // identification
    put_u16be(f, 0x4000);  // don't fragment
    f.push_back(64);       // ttl
    f.push_back(6);        // tcp
    put_u16be(f, 0);       // checksum
    put_u32be(f, src_ip);
    put_u32be(f, dst_ip);
    // TCP header, 20 bytes
    put_u16be(f, src_port);
    put_u16be(f, dst_port);
    put_u32be(f, seq);
    put_u32be(f, ack);
    f.push_back(5 << 4);  // data offset
    f.push_back(tcp_flags);
    put_u16be(f, 0xffff);  // window
    put_u16be(f, 0);       // checksum
    put_u16be(f, 0);       // urgent pointer
    f.insert(f.end(), payload.begin(), payload.end());
    return f;
}

Bytes write_pcap(const std::vector<FrameSpec>& frames, bool byte_swapped) {
    Bytes out;
    auto put_u16 = [&](uint16_t v) { byte_swapped ? put_u16be(out, v) : put_u16le(out, v); };
    auto put_u32 = [&](uint32_t v) { byte_swapped ? put_u32be(out, v) : put_u32le(out, v); };

    // writing the magic with the chosen byte order is what marks the file as
    // native or swapped for the reader
    put_u32(kMagicNative);
    put_u16(2);
    put_u16(4);
    put_u32(0);
    put_u32(0);
    put_u32(65535);
    put_u32(1);  // Ethernet
    for (const FrameSpec& fs : frames) {
        uint32_t ts_sec = static_cast<uint32_t>(fs.ts);
        uint32_t ts_usec = static_cast<uint32_t>(std::llround((fs.ts - ts_sec) * 1e6));
        if (ts_usec >= 1000000) {
            ts_sec += 1;
            ts_usec -= 1000000;
        }
        put_u32(ts_sec);
        put_u32(ts_usec);
        put_u32(static_cast<uint32_t>(fs.frame.size()));
        put_u32(static_cast<uint32_t>(fs.frame.size()));  // orig_len == incl_len
        out.insert(out.end(), fs.frame.begin(), fs.frame.end());
    }
    return out;
}

void write_pcap_file(const std::string& path, const std::vector<FrameSpec>& frames) {
    Bytes data = write_pcap(frames);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write pcap file: " + path);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

}  // namespace maltls
