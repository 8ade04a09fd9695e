#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "maltls/pcap.hpp"

namespace maltls {

// Direction-normalized 5-tuple; the client is the initiator.
struct FlowKey {
    uint32_t client_ip = 0;
    uint32_t server_ip = 0;
    uint16_t client_port = 0;
    uint16_t server_port = 0;
    // protocol is always TCP

    auto operator<=>(const FlowKey&) const = default;
};

struct FlowPacket {
    double ts = 0.0;
    bool from_client = false;
    uint8_t tcp_flags = 0;
    uint32_t tcp_seq = 0;
    Bytes payload;
    uint32_t wire_len = 0;
};

struct Flow {
    FlowKey key;
    std::vector<FlowPacket> packets;  // capture order
};

// Groups packets into bidirectional flows. The client is the sender of the
// flow's first pure SYN, or of its first packet when no SYN was captured.
// Flows come back in order of first appearance.
std::vector<Flow> assemble_flows(const std::vector<PacketRecord>& packets);

struct FlowFeatures {
    uint64_t in_bytes = 0;    // toward the client
    uint64_t out_bytes = 0;   // from the client
    uint64_t in_packets = 0;
    uint64_t out_packets = 0;
    uint16_t src_port = 0;  // client side
    uint16_t dst_port = 0;  // server side
    double duration_s = 0.0;
    double len_min = 0.0, len_max = 0.0, len_mean = 0.0, len_std = 0.0;
    double iat_min = 0.0, iat_max = 0.0, iat_mean = 0.0, iat_std = 0.0;
};

// Streaming accumulator; compute_flow_features is a thin wrapper over it.
// Lengths are wire lengths over both directions; IATs are consecutive
// timestamp deltas over all packets; std is the population form.
class FlowStatsAccumulator {
public:
    void add(double ts, uint32_t wire_len, bool from_client);
    FlowFeatures finish(const FlowKey& key) const;  // EmptyFlow when nothing added

private:
    uint64_t n_ = 0;
    uint64_t in_bytes_ = 0, out_bytes_ = 0, in_packets_ = 0, out_packets_ = 0;
    double first_ts_ = 0.0, last_ts_ = 0.0;
    double len_min_ = 0.0, len_max_ = 0.0, len_sum_ = 0.0, len_sumsq_ = 0.0;
    double iat_min_ = 0.0, iat_max_ = 0.0, iat_sum_ = 0.0, iat_sumsq_ = 0.0;
    uint64_t iat_n_ = 0;
};

FlowFeatures compute_flow_features(const Flow& flow);

}  // namespace maltls
