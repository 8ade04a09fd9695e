#include "maltls/pipeline.hpp"

#include <algorithm>
#include <fstream>

#include "maltls/errors.hpp"

namespace maltls {

namespace {

std::vector<uint16_t> hex_list(const nlohmann::json& arr) {
    std::vector<uint16_t> out;
    for (const auto& v : arr)
        out.push_back(static_cast<uint16_t>(std::stoul(v.get<std::string>(), nullptr, 16)));
    return out;
}

nlohmann::ordered_json hex_list_json(const std::vector<uint16_t>& codes) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (uint16_t c : codes) arr.push_back(ciphersuite_label(c));
    return arr;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

}  // namespace

PipelineConfig PipelineConfig::defaults() {
    PipelineConfig c;
    c.validation = ValidationConfig::defaults();
    c.registry = ExtensionRegistry::defaults();
    c.weak_suites = {0x0004, 0x0005};
    c.favored_suites = {0x000a, 0x0004, 0x006b, 0x0005};
    return c;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    PipelineConfig c = defaults();
    if (j.contains("recognized_critical_oids")) {
        c.validation.recognized_critical_oids.clear();
        for (const auto& o : j.at("recognized_critical_oids"))
            c.validation.recognized_critical_oids.insert(o.get<std::string>());
    }
    if (j.contains("extension_registry"))
        c.registry = ExtensionRegistry::from_json(j.at("extension_registry"));
    if (j.contains("weak_ciphersuites")) c.weak_suites = hex_list(j.at("weak_ciphersuites"));
    if (j.contains("malware_favored_ciphersuites"))
        c.favored_suites = hex_list(j.at("malware_favored_ciphersuites"));
    return c;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    return from_json(load_json_file(path));
}

nlohmann::ordered_json PipelineConfig::to_json() const {
    nlohmann::ordered_json j;
    j["recognized_critical_oids"] =
        std::vector<std::string>(validation.recognized_critical_oids.begin(),
                                 validation.recognized_critical_oids.end());
    j["extension_registry"] = registry.to_json();
    j["weak_ciphersuites"] = hex_list_json(weak_suites);
    j["malware_favored_ciphersuites"] = hex_list_json(favored_suites);
    return j;
}

nlohmann::ordered_json Phase1Model::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = tree.schema.version;
    j["phase"] = 1;
    j["classifier"] = tree.to_json();
    return j;
}

Phase1Model Phase1Model::from_json(const nlohmann::json& j) {
    Phase1Model m;
    m.tree = DecisionTreeModel::from_json(j.at("classifier"));
    if (j.at("schema_version").get<std::string>() != m.tree.schema.version)
        throw Error("phase-1 model: schema_version mismatch");
    return m;
}

Phase1Model Phase1Model::from_file(const std::string& path) {
    return from_json(load_json_file(path));
}

nlohmann::ordered_json Phase2Model::to_json() const {
    nlohmann::ordered_json j;
    j["schema_version"] = net.schema.version;
    j["phase"] = 2;
    j["registry_version"] = registry_version;
    j["discretizer"] = discretizer.to_json();
    j["classifier"] = net.to_json();
    return j;
}

Phase2Model Phase2Model::from_json(const nlohmann::json& j) {
    Phase2Model m;
    m.net = TanBayesModel::from_json(j.at("classifier"));
    m.discretizer = Discretizer::from_json(j.at("discretizer"));
    m.registry_version = j.at("registry_version").get<std::string>();
    if (j.at("schema_version").get<std::string>() != m.net.schema.version)
        throw Error("phase-2 model: schema_version mismatch");
    return m;
}

Phase2Model Phase2Model::from_file(const std::string& path) {
    return from_json(load_json_file(path));
}

Schema Phase2Model::base_schema() const {
    Schema base = net.schema;
    for (const auto& [attr, cuts] : discretizer.cutpoints) {
        Attribute& a = base.attributes[static_cast<size_t>(attr)];
        a.kind = AttrKind::Numeric;
        a.values.clear();
    }
    return base;
}

const char* decision_name(Decision d) {
    switch (d) {
        case Decision::Accepted: return "Accepted";
        case Decision::RejectedPhase1: return "RejectedPhase1";
        case Decision::RejectedPhase2: return "RejectedPhase2";
        case Decision::IndeterminateNoHandshake: return "IndeterminateNoHandshake";
    }
    return "?";
}

namespace {

Decision decision_from_name(const std::string& name) {
    for (Decision d : {Decision::Accepted, Decision::RejectedPhase1, Decision::RejectedPhase2,
                       Decision::IndeterminateNoHandshake})
        if (name == decision_name(d)) return d;
    throw Error("unknown decision: " + name);
}

}  // namespace

nlohmann::ordered_json Verdict::to_json() const {
    nlohmann::ordered_json j;
    j["decision"] = decision_name(decision);
    j["confidence"] = confidence;
    j["phase1_classifier_ran"] = phase1_classifier_ran;
    j["validation_report"] = report.to_json();
    if (phase2_evidence) j["phase2_evidence"] = *phase2_evidence;
    return j;
}

Verdict Verdict::from_json(const nlohmann::json& j) {
    Verdict v;
    v.decision = decision_from_name(j.at("decision").get<std::string>());
    v.confidence = j.at("confidence").get<double>();
    v.phase1_classifier_ran = j.at("phase1_classifier_ran").get<bool>();
    v.report = ValidationReport::from_json(j.at("validation_report"));
    if (j.contains("phase2_evidence"))
        v.phase2_evidence = j.at("phase2_evidence").get<std::vector<std::string>>();
    return v;
}

std::optional<VerdictCache::Entry> VerdictCache::lookup(const std::string& server,
                                                        uint64_t fingerprint) const {
    auto it = entries_.find({server, fingerprint});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void VerdictCache::store(const std::string& server, uint64_t fingerprint, const Entry& entry) {
    entries_[{server, fingerprint}] = entry;
}

Verdict run_verdict(const std::vector<CertificateView>& chain, const std::string& hostname,
                    int64_t now, const CaptureProvider& capture_provider, const Phase1Model& m1,
                    const Phase2Model& m2, const PipelineConfig& config, VerdictCache* cache) {
    if (chain.empty()) throw Error("run_verdict: empty certificate chain");
    if (m1.tree.schema.version != kPhase1SchemaVersion)
        throw Error("phase-1 model schema " + m1.tree.schema.version + " unsupported");
    if (m2.net.schema.version != kPhase2SchemaVersion)
        throw Error("phase-2 model schema " + m2.net.schema.version + " unsupported");
    if (m2.registry_version != config.registry.version)
        throw Error("phase-2 model was trained against extension registry " +
                    m2.registry_version + ", config has " + config.registry.version);

    Verdict verdict;
    verdict.report = validate(chain, hostname, now, config.validation);
    Phase1Features p1 = build_phase1(verdict.report);

    // The phase-1 classifier only weighs in when traditional validation
    // failed; a clean certificate goes straight to traffic inspection.
    if (!verdict.report.passed()) {
        uint64_t fp = certificate_fingerprint(chain.front());
        std::optional<VerdictCache::Entry> cached =
            cache ? cache->lookup(hostname, fp) : std::nullopt;

        VerdictCache::Entry entry;
        if (cached) {
            entry = *cached;
        } else {
            Prediction pred = c45_predict(m1.tree, cells_to_row(m1.tree.schema, phase1_cells(p1)));
            entry.rejected = pred.label == 1;
            entry.confidence = pred.confidence;
            entry.classifier_ran = true;
            if (cache) cache->store(hostname, fp, entry);
        }
        verdict.phase1_classifier_ran = true;
        if (entry.rejected) {
            verdict.decision = Decision::RejectedPhase1;
            verdict.confidence = entry.confidence;
            return verdict;  // the capture is never opened
        }
    }

    Capture capture = capture_provider();
    std::vector<Flow> flows = assemble_flows(capture.packets);

    struct FlowResult {
        bool ok = false;
        Posterior posterior;
        std::vector<std::string> cells;
    };
    std::vector<FlowResult> results(flows.size());
    Schema base = m2.base_schema();
    std::string deferred_error;  // exceptions must not escape the parallel region

#pragma omp parallel for schedule(dynamic)
    for (size_t i = 0; i < flows.size(); ++i) {
        try {
            TlsServerInfo tls = inspect_flow(flows[i]);
            FlowFeatures ff = compute_flow_features(flows[i]);
            Phase2Features p2 = build_phase2(p1, ff, tls, config.registry, config.weak_suites);
            FlowResult res;
            res.cells = phase2_cells(p2);
            std::vector<double> row = cells_to_row(base, res.cells);
            // discretize numeric columns with the model's cut points
            for (const auto& [attr, cuts] : m2.discretizer.cutpoints)
                row[static_cast<size_t>(attr)] = discretize_value(cuts, row[static_cast<size_t>(attr)]);
            res.posterior = tan_predict(m2.net, row);
            res.ok = true;
            results[i] = std::move(res);
        } catch (const NoServerHello&) {
            // flow without a handshake: skip
        } catch (const NoHandshake&) {
        } catch (const std::exception& e) {
#pragma omp critical
            if (deferred_error.empty()) deferred_error = e.what();
        }
    }
    if (!deferred_error.empty()) throw Error("phase-2 flow classification: " + deferred_error);

    // deterministic reduction in flow order: first malicious flow decides,
    // otherwise the least confident benign flow does
    int deciding = -1;
    for (size_t i = 0; i < results.size(); ++i) {
        if (!results[i].ok) continue;
        if (results[i].posterior.label == 1) {
            deciding = static_cast<int>(i);
            break;
        }
        if (deciding < 0 ||
            results[i].posterior.posterior[0] < results[static_cast<size_t>(deciding)].posterior.posterior[0])
            deciding = static_cast<int>(i);
    }

    if (deciding < 0) {
        verdict.decision = Decision::IndeterminateNoHandshake;
        verdict.confidence = 0.0;
        return verdict;
    }
    const FlowResult& res = results[static_cast<size_t>(deciding)];
    verdict.phase2_evidence = res.cells;
    if (res.posterior.label == 1) {
        verdict.decision = Decision::RejectedPhase2;
        verdict.confidence = res.posterior.posterior[1];
    } else {
        verdict.decision = Decision::Accepted;
        verdict.confidence = res.posterior.posterior[0];
    }
    return verdict;
}

}  // namespace maltls
