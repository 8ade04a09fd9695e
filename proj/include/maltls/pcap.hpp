#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maltls/bytes.hpp"

namespace maltls {

// TCP flag bits as they appear on the wire.
enum TcpFlag : uint8_t {
    kTcpFin = 0x01,
    kTcpSyn = 0x02,
    kTcpRst = 0x04,
    kTcpPsh = 0x08,
    kTcpAck = 0x10,
    kTcpUrg = 0x20,
};

struct PacketRecord {
    double ts = 0.0;  // ts_sec + ts_usec / 1e6
    uint32_t src_ip = 0;
    uint32_t dst_ip = 0;
    uint16_t src_port = 0;
    uint16_t dst_port = 0;
    uint8_t tcp_flags = 0;
    uint32_t tcp_seq = 0;
    Bytes payload;          // TCP payload as captured
    uint32_t wire_len = 0;  // original frame length on the wire
};

struct Capture {
    std::vector<PacketRecord> packets;
    size_t skipped = 0;  // frames that were not Ethernet/IPv4/TCP
};

// Classic pcap only: magic 0xa1b2c3d4 native or 0xd4c3b2a1 byte-swapped,
// microsecond timestamps, Ethernet link type.
Capture read_pcap(ByteSpan file_bytes);
Capture read_pcap_file(const std::string& path);

std::string ipv4_to_string(uint32_t ip);

// --- synthesis side, used by the corpus generator and the tests ---

struct FrameSpec {
    double ts = 0.0;
    Bytes frame;  // full Ethernet frame
};

// Builds an Ethernet/IPv4/TCP frame around `payload`. Checksums are not
// filled in; the reader does not verify them.
Bytes build_tcp_frame(uint32_t src_ip, uint32_t dst_ip, uint16_t src_port, uint16_t dst_port,
                      uint8_t tcp_flags, uint32_t seq, uint32_t ack, ByteSpan payload);

Bytes write_pcap(const std::vector<FrameSpec>& frames, bool byte_swapped = false);
void write_pcap_file(const std::string& path, const std::vector<FrameSpec>& frames);

}  // namespace maltls
