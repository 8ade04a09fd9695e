#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "maltls/c45.hpp"
#include "maltls/cert_validation.hpp"
#include "maltls/features.hpp"
#include "maltls/tan.hpp"

namespace maltls {

struct PipelineConfig {
    ValidationConfig validation;
    ExtensionRegistry registry;
    std::vector<uint16_t> weak_suites;
    std::vector<uint16_t> favored_suites;

    static PipelineConfig defaults();
    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig from_file(const std::string& path);
    nlohmann::ordered_json to_json() const;
};

// Model files: classifier plus everything needed to featurize consistently.
struct Phase1Model {
    DecisionTreeModel tree;

    nlohmann::ordered_json to_json() const;
    static Phase1Model from_json(const nlohmann::json& j);
    static Phase1Model from_file(const std::string& path);
};

struct Phase2Model {
    TanBayesModel net;
    Discretizer discretizer;
    std::string registry_version;

    // The raw featurization schema: the TAN schema with the discretized
    // attributes restored to numeric.
    Schema base_schema() const;

    nlohmann::ordered_json to_json() const;
    static Phase2Model from_json(const nlohmann::json& j);
    static Phase2Model from_file(const std::string& path);
};

enum class Decision {
    Accepted,
    RejectedPhase1,
    RejectedPhase2,
    IndeterminateNoHandshake,
};

const char* decision_name(Decision d);

struct Verdict {
    Decision decision = Decision::Accepted;
    double confidence = 0.0;
    ValidationReport report;
    bool phase1_classifier_ran = false;
    std::optional<std::vector<std::string>> phase2_evidence;  // cells of the deciding flow

    nlohmann::ordered_json to_json() const;
    static Verdict from_json(const nlohmann::json& j);
    bool operator==(const Verdict&) const = default;
};

// Phase-1 outcomes keyed by (server identity, certificate fingerprint), so
// resumed sessions skip re-classification.
class VerdictCache {
public:
    struct Entry {
        bool rejected = false;
        double confidence = 0.0;
        bool classifier_ran = false;
    };
    std::optional<Entry> lookup(const std::string& server, uint64_t fingerprint) const;
    void store(const std::string& server, uint64_t fingerprint, const Entry& entry);
    size_t size() const { return entries_.size(); }

private:
    std::map<std::pair<std::string, uint64_t>, Entry> entries_;
};

// Lazily provides the sandbox capture; only invoked when phase 2 runs, so
// a phase-1 rejection never touches the pcap.
using CaptureProvider = std::function<Capture()>;

Verdict run_verdict(const std::vector<CertificateView>& chain, const std::string& hostname,
                    int64_t now, const CaptureProvider& capture_provider, const Phase1Model& m1,
                    const Phase2Model& m2, const PipelineConfig& config,
                    VerdictCache* cache = nullptr);

}  // namespace maltls
