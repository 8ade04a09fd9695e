#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "maltls/dataset.hpp"
#include "maltls/features.hpp"
#include "maltls/flow.hpp"
#include "maltls/pcap.hpp"
#include "maltls/tls.hpp"

namespace maltls {

// Seeded session generator. Benign sessions pick ciphersuites outside the
// malware-favored list and 3-8 registry extensions; malicious sessions
// pick a favored suite 90% of the time, 0-1 extensions, and are
// self-signed with probability 0.7 (vs 0.09 benign). Sessions are
// materialized as full TCP/TLS packet sequences so the feature rows come
// out of the same capture path the classifier sees in production.
struct SynthConfig {
    size_t sessions = 1000;
    uint32_t seed = 42;
    double malicious_fraction = 0.5;
    size_t pcap_count = 0;  // materialize the first N sessions as pcap bytes
};

struct SynthSession {
    bool malicious = false;
    Phase1Features p1;
    std::vector<FrameSpec> frames;  // the session's packets, pcap-ready
};

struct SessionTraits {
    bool malicious = false;
    uint16_t ciphersuite = 0;
    std::vector<uint16_t> extensions;
    uint16_t server_port = 443;
    size_t client_appdata = 0;   // appdata packets client -> server
    size_t server_appdata = 0;
    double mean_iat = 0.02;      // seconds
    double mean_len_client = 0.0;
    double mean_len_server = 0.0;
};

SessionTraits sample_traits(std::mt19937& rng, bool malicious, const ExtensionRegistry& registry);
SynthSession synth_session(std::mt19937& rng, bool malicious, const ExtensionRegistry& registry);

struct Corpus {
    Dataset phase1;
    Dataset phase2;
    struct SessionPcap {
        std::string name;  // session_<index>_<label>
        Bytes pcap;
    };
    std::vector<SessionPcap> pcaps;
};

// Generates the full corpus; the phase-2 schema's open ciphersuite_code
// universe is closed over the observed codes plus "other".
Corpus synth_corpus(const SynthConfig& config, const ExtensionRegistry& registry,
                    const std::vector<uint16_t>& weak_suites);

}  // namespace maltls
