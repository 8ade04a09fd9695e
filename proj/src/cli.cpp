#include "maltls/cli.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "maltls/der.hpp"
#include "maltls/errors.hpp"
#include "maltls/evaluate.hpp"
#include "maltls/pipeline.hpp"
#include "maltls/synth.hpp"

namespace maltls {

namespace {

enum ExitCode { kOk = 0, kOperationalError = 1, kRejected = 2, kIndeterminate = 3 };

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

// epoch seconds, or ISO-8601 "YYYY-MM-DDTHH:MM:SS[Z]"
int64_t parse_timestamp(const std::string& s) {
    bool digits = !s.empty() && s.find_first_not_of("0123456789-") == std::string::npos;
    if (digits) return std::stoll(s);
    int y, mo, d, h, mi, sec;
    if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &sec) != 6)
        throw Error("cannot parse timestamp '" + s + "' (epoch seconds or ISO-8601 expected)");
    return der::epoch_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) + h * 3600 +
           mi * 60 + sec;
}

int64_t now_epoch() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::vector<CertificateView> load_chain_file(const std::string& path) {
    std::string bytes = read_file(path);
    std::vector<CertificateView> chain = decode_chain(as_span(std::string_view(bytes)));
    if (chain.empty()) throw Error(path + " contains no certificates");
    return chain;
}

PipelineConfig load_config(const std::string& path) {
    if (path.empty()) return PipelineConfig::defaults();
    return PipelineConfig::from_file(path);
}

void print_report(const ValidationReport& report) {
    std::cout << "hostname: " << report.hostname << "\n";
    for (const CriterionResult& r : report.results)
        std::cout << (r.failed ? "FAIL " : "ok   ") << criterion_name(r.criterion) << ": "
                  << r.detail << "\n";
    std::cout << (report.self_signed ? "self-signed: yes" : "self-signed: no") << "\n";
    std::cout << (report.passed() ? "verdict: passed" : "verdict: failed") << "\n";
}

std::vector<int> numeric_attrs_of(const Schema& schema) {
    std::vector<int> out;
    for (size_t i = 0; i < schema.attributes.size(); ++i)
        if (schema.attributes[i].kind == AttrKind::Numeric) out.push_back(static_cast<int>(i));
    return out;
}

int cmd_validate(const std::string& chain_path, const std::string& hostname,
                 const std::string& at, bool as_json, const std::string& config_path) {
    PipelineConfig config = load_config(config_path);
    std::vector<CertificateView> chain = load_chain_file(chain_path);
    int64_t now = at.empty() ? now_epoch() : parse_timestamp(at);
    ValidationReport report = validate(chain, hostname, now, config.validation);
    if (as_json)
        std::cout << report.to_json().dump(2) << "\n";
    else
        print_report(report);
    return report.passed() ? kOk : kRejected;
}

int cmd_featurize(const std::string& phase, const std::string& chain_path,
                  const std::string& hostname, const std::string& pcap_path,
                  const std::string& out_path, const std::string& at,
                  const std::string& config_path) {
    PipelineConfig config = load_config(config_path);
    std::vector<CertificateView> chain = load_chain_file(chain_path);
    int64_t now = at.empty() ? now_epoch() : parse_timestamp(at);
    ValidationReport report = validate(chain, hostname, now, config.validation);
    Phase1Features p1 = build_phase1(report);

    if (phase == "phase1") {
        write_file(out_path, cells_to_csv(phase1_schema(), {phase1_cells(p1)}));
        std::cout << "wrote 1 phase-1 row to " << out_path << "\n";
        return kOk;
    }

    if (pcap_path.empty()) throw Error("featurize phase2 requires --pcap");
    Capture capture = read_pcap_file(pcap_path);
    std::vector<Flow> flows = assemble_flows(capture.packets);
    std::vector<std::vector<std::string>> rows;
    for (const Flow& flow : flows) {
        try {
            TlsServerInfo tls = inspect_flow(flow);
            FlowFeatures ff = compute_flow_features(flow);
            rows.push_back(phase2_cells(build_phase2(p1, ff, tls, config.registry, config.weak_suites)));
        } catch (const NoServerHello&) {
            continue;
        }
    }
    if (rows.empty())
        throw NoHandshake("no flow in " + pcap_path + " completed a TLS handshake");
    write_file(out_path, cells_to_csv(phase2_schema(), rows));
    std::cout << "wrote " << rows.size() << " phase-2 row(s) to " << out_path << "\n";
    return kOk;
}

int cmd_train(const std::string& phase, const std::string& data_path, const std::string& out_path,
              uint32_t seed, double split, int bins) {
    std::string csv = read_file(data_path);

    if (phase == "phase1") {
        Dataset ds = dataset_from_csv(csv, phase1_schema());
        SplitIndices idx = split_train_test(ds, split, seed);
        Dataset train = subset(ds, idx.train), test = subset(ds, idx.test);
        C45Params params;
        params.seed = seed;
        Phase1Model model{c45_train(train, params)};
        write_file(out_path, model.to_json().dump(2) + "\n");
        Metrics m = evaluate_c45(model.tree, test);
        std::cout << "trained phase-1 tree on " << train.n_rows() << " rows; held-out metrics: "
                  << m.to_json().dump() << "\n";
        return kOk;
    }

    Dataset ds = dataset_from_csv(csv, phase2_schema());
    // close the ciphersuite universe as observed, plus a catch-all
    int cs_attr = ds.schema.index_of("ciphersuite_code");
    ds.schema.attributes[static_cast<size_t>(cs_attr)].values.push_back(kOtherValue);

    SplitIndices idx = split_train_test(ds, split, seed);
    Dataset train = subset(ds, idx.train), test = subset(ds, idx.test);

    Discretizer disc = fit_discretizer(train, numeric_attrs_of(ds.schema), bins);
    for (const std::string& w : disc.warnings) std::cerr << "warning: " << w << "\n";
    Dataset train_d = apply_discretizer(train, disc);
    Dataset test_d = apply_discretizer(test, disc);

    TanParams params;
    params.seed = seed;
    Phase2Model model{tan_train(train_d, params), disc, ExtensionRegistry::defaults().version};
    write_file(out_path, model.to_json().dump(2) + "\n");
    Metrics m = evaluate_tan(model.net, test_d);
    std::cout << "trained phase-2 net on " << train.n_rows() << " rows; held-out metrics: "
              << m.to_json().dump() << "\n";
    return kOk;
}

int cmd_evaluate(const std::string& phase, const std::string& data_path,
                 const std::string& model_path, uint32_t seed, double split) {
    std::string csv = read_file(data_path);

    if (phase == "phase1") {
        Phase1Model model = Phase1Model::from_file(model_path);
        Dataset ds = dataset_from_csv(csv, model.tree.schema);
        SplitIndices idx = split_train_test(ds, split, seed);
        Metrics m = evaluate_c45(model.tree, subset(ds, idx.test));
        std::cout << m.to_json().dump(2) << "\n";
        return kOk;
    }

    Phase2Model model = Phase2Model::from_file(model_path);
    Schema base = model.base_schema();
    Dataset ds = dataset_from_csv(csv, base);
    SplitIndices idx = split_train_test(ds, split, seed);
    Dataset test_d = apply_discretizer(subset(ds, idx.test), model.discretizer);
    Metrics m = evaluate_tan(model.net, test_d);
    std::cout << m.to_json().dump(2) << "\n";
    return kOk;
}

int cmd_classify(const std::string& chain_path, const std::string& hostname,
                 const std::string& pcap_path, const std::string& m1_path,
                 const std::string& m2_path, const std::string& at, bool as_json,
                 const std::string& config_path) {
    PipelineConfig config = load_config(config_path);
    std::vector<CertificateView> chain = load_chain_file(chain_path);
    int64_t now = at.empty() ? now_epoch() : parse_timestamp(at);
    Phase1Model m1 = Phase1Model::from_file(m1_path);
    Phase2Model m2 = Phase2Model::from_file(m2_path);

    Verdict verdict = run_verdict(chain, hostname, now,
                                  [&] { return read_pcap_file(pcap_path); }, m1, m2, config);
    if (as_json)
        std::cout << verdict.to_json().dump(2) << "\n";
    else
        std::cout << decision_name(verdict.decision) << " (confidence "
                  << verdict.confidence << ")\n";
    switch (verdict.decision) {
        case Decision::Accepted: return kOk;
        case Decision::RejectedPhase1:
        case Decision::RejectedPhase2: return kRejected;
        case Decision::IndeterminateNoHandshake: return kIndeterminate;
    }
    return kOperationalError;
}

int cmd_synth(const std::string& out_dir, size_t sessions, uint32_t seed,
              const std::string& config_path) {
    PipelineConfig config = load_config(config_path);
    SynthConfig sc;
    sc.sessions = sessions;
    sc.seed = seed;
    Corpus corpus = synth_corpus(sc, config.registry, config.weak_suites);
    write_file(out_dir + "/phase1.csv", dataset_to_csv(corpus.phase1));
    write_file(out_dir + "/phase2.csv", dataset_to_csv(corpus.phase2));
    std::cout << "wrote " << corpus.phase1.n_rows() << " sessions to " << out_dir
              << "/phase1.csv and " << out_dir << "/phase2.csv\n";
    return kOk;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"two-phase malignant TLS server detector"};
    app.require_subcommand(1);

    std::string chain_path, hostname, at, config_path, pcap_path, out_path, data_path;
    std::string model_path, m1_path, m2_path, phase, out_dir;
    bool as_json = false;
    uint32_t seed = 42;
    double split = 0.66;
    int bins = 10;
    size_t sessions = 1000;

    CLI::App* c_validate = app.add_subcommand("validate", "run traditional certificate validation");
    c_validate->add_option("--cert-chain", chain_path, "PEM or DER chain, leaf first")->required();
    c_validate->add_option("--hostname", hostname, "hostname to match")->required();
    c_validate->add_option("--at", at, "evaluation time (epoch seconds or ISO-8601)");
    c_validate->add_flag("--json", as_json, "emit the report as JSON");
    c_validate->add_option("--config", config_path, "pipeline config JSON");

    CLI::App* c_featurize = app.add_subcommand("featurize", "extract feature rows to CSV");
    c_featurize->add_option("phase", phase, "phase1 or phase2")
        ->required()
        ->check(CLI::IsMember({"phase1", "phase2"}));
    c_featurize->add_option("--cert-chain", chain_path)->required();
    c_featurize->add_option("--hostname", hostname)->required();
    c_featurize->add_option("--pcap", pcap_path, "sandbox capture (phase2)");
    c_featurize->add_option("--out", out_path, "output CSV")->required();
    c_featurize->add_option("--at", at);
    c_featurize->add_option("--config", config_path);

    CLI::App* c_train = app.add_subcommand("train", "train a classifier from labeled CSV");
    c_train->add_option("phase", phase)->required()->check(CLI::IsMember({"phase1", "phase2"}));
    c_train->add_option("--data", data_path, "labeled CSV")->required();
    c_train->add_option("--out", out_path, "model JSON output")->required();
    c_train->add_option("--seed", seed, "split seed");
    c_train->add_option("--split", split, "training fraction");
    c_train->add_option("--bins", bins, "discretizer bins (phase2)");

    CLI::App* c_classify = app.add_subcommand("classify", "run the two-phase verdict");
    c_classify->add_option("--cert-chain", chain_path)->required();
    c_classify->add_option("--hostname", hostname)->required();
    c_classify->add_option("--pcap", pcap_path)->required();
    c_classify->add_option("--phase1-model", m1_path)->required();
    c_classify->add_option("--phase2-model", m2_path)->required();
    c_classify->add_option("--at", at);
    c_classify->add_flag("--json", as_json, "emit the verdict as JSON");
    c_classify->add_option("--config", config_path);

    CLI::App* c_evaluate = app.add_subcommand("evaluate", "score a model on held-out data");
    c_evaluate->add_option("phase", phase)->required()->check(CLI::IsMember({"phase1", "phase2"}));
    c_evaluate->add_option("--data", data_path)->required();
    c_evaluate->add_option("--model", model_path)->required();
    c_evaluate->add_option("--seed", seed, "split seed (must match training)");

    CLI::App* c_synth = app.add_subcommand("synth", "generate the synthetic session corpus");
    c_synth->add_option("--out", out_dir, "output directory")->required();
    c_synth->add_option("--sessions", sessions);
    c_synth->add_option("--seed", seed);
    c_synth->add_option("--config", config_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kOperationalError;
    }

    try {
        if (app.got_subcommand(c_validate))
            return cmd_validate(chain_path, hostname, at, as_json, config_path);
        if (app.got_subcommand(c_featurize))
            return cmd_featurize(phase, chain_path, hostname, pcap_path, out_path, at, config_path);
        if (app.got_subcommand(c_train))
            return cmd_train(phase, data_path, out_path, seed, split, bins);
        if (app.got_subcommand(c_classify))
            return cmd_classify(chain_path, hostname, pcap_path, m1_path, m2_path, at, as_json,
                                config_path);
        if (app.got_subcommand(c_evaluate))
            return cmd_evaluate(phase, data_path, model_path, seed, split);
        if (app.got_subcommand(c_synth)) return cmd_synth(out_dir, sessions, seed, config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOperationalError;
    }
    return kOperationalError;
}

}  // namespace maltls
