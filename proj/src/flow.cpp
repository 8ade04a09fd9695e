#include "maltls/flow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "maltls/errors.hpp"

namespace maltls {

namespace {

using Endpoint = std::pair<uint32_t, uint16_t>;  // (ip, port)

// Symmetric key: the two endpoints in sorted order.
using SymKey = std::pair<Endpoint, Endpoint>;

SymKey symmetric_key(const PacketRecord& p) {
    Endpoint a{p.src_ip, p.src_port}, b{p.dst_ip, p.dst_port};
    return a <= b ? SymKey{a, b} : SymKey{b, a};
}

}  // namespace

std::vector<Flow> assemble_flows(const std::vector<PacketRecord>& packets) {
    struct Pending {
        Endpoint client;
        bool client_known = false;
        std::vector<const PacketRecord*> packets;
    };
    std::map<SymKey, size_t> index;
    std::vector<Pending> pending;

    for (const PacketRecord& p : packets) {
        SymKey key = symmetric_key(p);
        auto [it, inserted] = index.try_emplace(key, pending.size());
        if (inserted) pending.emplace_back();
        Pending& f = pending[it->second];
        if (f.packets.empty()) f.client = {p.src_ip, p.src_port};  // fallback: first sender
        if (!f.client_known && (p.tcp_flags & kTcpSyn) && !(p.tcp_flags & kTcpAck)) {
            f.client = {p.src_ip, p.src_port};
            f.client_known = true;
        }
        f.packets.push_back(&p);
    }

    std::vector<Flow> flows;
    flows.reserve(pending.size());
    for (const Pending& f : pending) {
        Flow flow;
        flow.key.client_ip = f.client.first;
        flow.key.client_port = f.client.second;
        for (const PacketRecord* p : f.packets) {
            bool from_client = Endpoint{p->src_ip, p->src_port} == f.client;
            if (!from_client) {
                flow.key.server_ip = p->src_ip;
                flow.key.server_port = p->src_port;
            } else {
                flow.key.server_ip = p->dst_ip;
                flow.key.server_port = p->dst_port;
            }
            flow.packets.push_back(
                {p->ts, from_client, p->tcp_flags, p->tcp_seq, p->payload, p->wire_len});
        }
        flows.push_back(std::move(flow));
    }
    return flows;
}

void FlowStatsAccumulator::add(double ts, uint32_t wire_len, bool from_client) {
    if (n_ == 0) {
        first_ts_ = ts;
        len_min_ = len_max_ = wire_len;
    } else {
        double iat = ts - last_ts_;
        if (iat_n_ == 0) {
            iat_min_ = iat_max_ = iat;
        } else {
            iat_min_ = std::min(iat_min_, iat);
            iat_max_ = std::max(iat_max_, iat);
        }
        iat_sum_ += iat;
        iat_sumsq_ += iat * iat;
        ++iat_n_;
        len_min_ = std::min(len_min_, static_cast<double>(wire_len));
        len_max_ = std::max(len_max_, static_cast<double>(wire_len));
    }
    last_ts_ = ts;
    len_sum_ += wire_len;
    len_sumsq_ += static_cast<double>(wire_len) * wire_len;
    ++n_;
    if (from_client) {
        out_bytes_ += wire_len;
        ++out_packets_;
    } else {
        in_bytes_ += wire_len;
        ++in_packets_;
    }
}

FlowFeatures FlowStatsAccumulator::finish(const FlowKey& key) const {
    if (n_ == 0) throw EmptyFlow("flow has no packets");
    FlowFeatures f;
    f.in_bytes = in_bytes_;
    f.out_bytes = out_bytes_;
    f.in_packets = in_packets_;
    f.out_packets = out_packets_;
    f.src_port = key.client_port;
    f.dst_port = key.server_port;
    f.duration_s = last_ts_ - first_ts_;

    double n = static_cast<double>(n_);
    f.len_min = len_min_;
    f.len_max = len_max_;
    f.len_mean = len_sum_ / n;
    f.len_std = std::sqrt(std::max(0.0, len_sumsq_ / n - f.len_mean * f.len_mean));
    if (iat_n_ > 0) {
        double m = static_cast<double>(iat_n_);
        f.iat_min = iat_min_;
        f.iat_max = iat_max_;
        f.iat_mean = iat_sum_ / m;
        f.iat_std = std::sqrt(std::max(0.0, iat_sumsq_ / m - f.iat_mean * f.iat_mean));
    }
    return f;
}

FlowFeatures compute_flow_features(const Flow& flow) {
    FlowStatsAccumulator acc;
    for (const FlowPacket& p : flow.packets) acc.add(p.ts, p.wire_len, p.from_client);
    return acc.finish(flow.key);
}

}  // namespace maltls
