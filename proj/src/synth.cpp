#include "maltls/synth.hpp"

#include <algorithm>
#include <cmath>

#include "maltls/errors.hpp"

namespace maltls {

namespace {

const std::vector<uint16_t> kFavoredSuites = {0x000a, 0x0004, 0x006b, 0x0005};
const std::vector<uint16_t> kBenignSuites = {0x002f, 0x0035, 0x003c, 0x009c, 0x009d,
                                             0xc013, 0xc014, 0xc02f, 0xc030, 0x1301};

double uniform(std::mt19937& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

size_t uniform_int(std::mt19937& rng, size_t lo, size_t hi) {
    return std::uniform_int_distribution<size_t>(lo, hi)(rng);
}

double exponential(std::mt19937& rng, double mean) {
    return std::exponential_distribution<double>(1.0 / mean)(rng);
}

uint32_t payload_len(std::mt19937& rng, double mean, double sd) {
    double v = std::normal_distribution<double>(mean, sd)(rng);
    return static_cast<uint32_t>(std::clamp(v, 16.0, 1400.0));
}

Bytes random_payload(std::mt19937& rng, uint32_t len) {
    Bytes b(len);
    for (auto& x : b) x = static_cast<uint8_t>(rng() & 0xff);
    return b;
}

Phase1Features sample_phase1(std::mt19937& rng, bool malicious) {
    double fail_p = malicious ? 0.40 : 0.03;
    double self_signed_p = malicious ? 0.70 : 0.09;
    Phase1Features f;
    f.fail_key_usage = uniform(rng) < fail_p;
    f.fail_validity = uniform(rng) < fail_p;
    f.fail_critical_ext = uniform(rng) < fail_p;
    f.fail_hostname = uniform(rng) < fail_p;
    f.fail_basic_constraints = uniform(rng) < fail_p;
    f.fail_name_constraints = uniform(rng) < fail_p;
    f.self_signed = uniform(rng) < self_signed_p;
    return f;
}

}  // namespace

SessionTraits sample_traits(std::mt19937& rng, bool malicious, const ExtensionRegistry& registry) {
    SessionTraits t;
    t.malicious = malicious;

    if (malicious) {
        t.ciphersuite = uniform(rng) < 0.9
                            ? kFavoredSuites[uniform_int(rng, 0, kFavoredSuites.size() - 1)]
                            : kBenignSuites[uniform_int(rng, 0, kBenignSuites.size() - 1)];
        size_t n_ext = uniform_int(rng, 0, 1);
        std::vector<uint16_t> pool(registry.ids.begin(), registry.ids.end());
        std::shuffle(pool.begin(), pool.end(), rng);
        t.extensions.assign(pool.begin(), pool.begin() + static_cast<ptrdiff_t>(n_ext));
        t.server_port = uniform(rng) < 0.55 ? 443 : static_cast<uint16_t>(uniform_int(rng, 1024, 65000));
        t.client_appdata = uniform_int(rng, 2, 6);
        t.server_appdata = uniform_int(rng, 2, 10);
        t.mean_iat = 0.15 + uniform(rng) * 0.35;
        t.mean_len_client = 150.0;
        t.mean_len_server = 420.0;
    } else {
        t.ciphersuite = kBenignSuites[uniform_int(rng, 0, kBenignSuites.size() - 1)];
        size_t n_ext = uniform_int(rng, 3, 8);
        std::vector<uint16_t> pool(registry.ids.begin(), registry.ids.end());
        std::shuffle(pool.begin(), pool.end(), rng);
        t.extensions.assign(pool.begin(), pool.begin() + static_cast<ptrdiff_t>(n_ext));
        t.server_port = 443;
        t.client_appdata = uniform_int(rng, 8, 40);
        t.server_appdata = uniform_int(rng, 20, 80);
        t.mean_iat = 0.005 + uniform(rng) * 0.04;
        t.mean_len_client = 320.0;
        t.mean_len_server = 980.0;
    }
    return t;
}

SynthSession synth_session(std::mt19937& rng, bool malicious, const ExtensionRegistry& registry) {
    SynthSession session;
    session.malicious = malicious;
    session.p1 = sample_phase1(rng, malicious);

    SessionTraits t = sample_traits(rng, malicious, registry);

    uint32_t client_ip = 0x0a000002;  // 10.0.0.2
    uint32_t server_ip = static_cast<uint32_t>(rng());
    uint16_t client_port = static_cast<uint16_t>(uniform_int(rng, 20000, 60000));

    double ts = uniform(rng) * 10.0;
    uint32_t cseq = rng(), sseq = rng();
    auto push = [&](bool from_client, uint8_t flags, ByteSpan payload) {
        uint32_t& seq = from_client ? cseq : sseq;
        Bytes frame = from_client
                          ? build_tcp_frame(client_ip, server_ip, client_port, t.server_port,
                                            flags, seq, 0, payload)
                          : build_tcp_frame(server_ip, client_ip, t.server_port, client_port,
                                            flags, seq, 0, payload);
        session.frames.push_back({ts, std::move(frame)});
        seq += static_cast<uint32_t>(payload.size());
        ts += exponential(rng, t.mean_iat);
    };

    // TCP open
    push(true, kTcpSyn, {});
    cseq += 1;
    push(false, kTcpSyn | kTcpAck, {});
    sseq += 1;
    push(true, kTcpAck, {});

    // handshake
    Bytes ch = wrap_record(kHandshake, 0x0301, as_span(build_client_hello("server.test", {t.ciphersuite, 0x002f})));
    push(true, kTcpAck | kTcpPsh, as_span(ch));

    Bytes sh = wrap_record(kHandshake, 0x0303, as_span(build_server_hello(t.ciphersuite, t.extensions)));
    Bytes ccs = wrap_record(kChangeCipherSpec, 0x0303, as_span(Bytes{1}));
    Bytes fin = wrap_record(kHandshake, 0x0303, as_span(random_payload(rng, 40)));
    Bytes server_flight = sh;
    server_flight.insert(server_flight.end(), ccs.begin(), ccs.end());
    server_flight.insert(server_flight.end(), fin.begin(), fin.end());
    push(false, kTcpAck | kTcpPsh, as_span(server_flight));

    Bytes client_ccs = wrap_record(kChangeCipherSpec, 0x0303, as_span(Bytes{1}));
    Bytes client_fin = wrap_record(kHandshake, 0x0303, as_span(random_payload(rng, 40)));
    Bytes client_flight = client_ccs;
    client_flight.insert(client_flight.end(), client_fin.begin(), client_fin.end());
    push(true, kTcpAck | kTcpPsh, as_span(client_flight));

    // encrypted application data
    for (size_t i = 0; i < t.client_appdata + t.server_appdata; ++i) {
        bool from_client;
        if (i < 1) {
            from_client = true;  // a request comes first
        } else {
            double p_client = static_cast<double>(t.client_appdata) /
                              static_cast<double>(t.client_appdata + t.server_appdata);
            from_client = uniform(rng) < p_client;
        }
        double mean = from_client ? t.mean_len_client : t.mean_len_server;
        Bytes rec = wrap_record(kApplicationData, 0x0303,
                                as_span(random_payload(rng, payload_len(rng, mean, mean * 0.45))));
        push(from_client, kTcpAck | kTcpPsh, as_span(rec));
    }
    // close
    push(true, kTcpFin | kTcpAck, {});
    push(false, kTcpFin | kTcpAck, {});
    return session;
}

Corpus synth_corpus(const SynthConfig& config, const ExtensionRegistry& registry,
                    const std::vector<uint16_t>& weak_suites) {
    std::mt19937 rng(config.seed);

    Corpus corpus;
    corpus.phase1.schema = phase1_schema();
    corpus.phase2.schema = phase2_schema();

    std::vector<std::vector<std::string>> p2_cells;
    std::vector<uint8_t> p2_labels;

    for (size_t i = 0; i < config.sessions; ++i) {
        bool malicious = uniform(rng) < config.malicious_fraction;
        SynthSession session = synth_session(rng, malicious, registry);

        uint8_t label = malicious ? 1 : 0;
        corpus.phase1.rows.push_back(cells_to_row(corpus.phase1.schema, phase1_cells(session.p1)));
        corpus.phase1.labels.push_back(label);

        // run the session through the real capture path
        Bytes pcap = write_pcap(session.frames);
        if (i < config.pcap_count) {
            char name[48];
            std::snprintf(name, sizeof name, "session_%04zu_%s", i,
                          malicious ? "malicious" : "benign");
            corpus.pcaps.push_back({name, pcap});
        }
        Capture cap = read_pcap(as_span(pcap));
        std::vector<Flow> flows = assemble_flows(cap.packets);
        if (flows.size() != 1) throw Error("synth session did not form a single flow");
        FlowFeatures ff = compute_flow_features(flows[0]);
        TlsServerInfo tls = inspect_flow(flows[0]);
        Phase2Features p2 = build_phase2(session.p1, ff, tls, registry, weak_suites);
        p2_cells.push_back(phase2_cells(p2));
        p2_labels.push_back(label);
    }

    // close the open ciphersuite universe over the observed codes
    int cs_attr = corpus.phase2.schema.index_of("ciphersuite_code");
    Attribute& cs = corpus.phase2.schema.attributes[static_cast<size_t>(cs_attr)];
    for (const auto& cells : p2_cells) {
        const std::string& code = cells[static_cast<size_t>(cs_attr)];
        if (cs.value_index(code) < 0) cs.values.push_back(code);
    }
    std::sort(cs.values.begin(), cs.values.end());
    cs.values.push_back(kOtherValue);

    for (size_t i = 0; i < p2_cells.size(); ++i) {
        corpus.phase2.rows.push_back(cells_to_row(corpus.phase2.schema, p2_cells[i]));
        corpus.phase2.labels.push_back(p2_labels[i]);
    }
    return corpus;
}

}  // namespace maltls
