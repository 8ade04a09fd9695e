#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "maltls/errors.hpp"
#include "maltls/evaluate.hpp"
#include "maltls/pipeline.hpp"
#include "maltls/synth.hpp"

using namespace maltls;

namespace {

struct TrainedModels {
    Phase1Model m1;
    Phase2Model m2;
};

// small seeded corpus shared by the pipeline tests
const TrainedModels& models() {
    static TrainedModels trained = [] {
        PipelineConfig config = PipelineConfig::defaults();
        SynthConfig sc;
        sc.sessions = 400;
        sc.seed = 1234;
        Corpus corpus = synth_corpus(sc, config.registry, config.weak_suites);

        C45Params c45p;
        TrainedModels t;
        t.m1.tree = c45_train(corpus.phase1, c45p);

        Discretizer disc;
        std::vector<int> numeric;
        for (size_t i = 0; i < corpus.phase2.schema.attributes.size(); ++i)
            if (corpus.phase2.schema.attributes[i].kind == AttrKind::Numeric)
                numeric.push_back(static_cast<int>(i));
        disc = fit_discretizer(corpus.phase2, numeric, 10);
        Dataset disc_ds = apply_discretizer(corpus.phase2, disc);
        t.m2.net = tan_train(disc_ds, {});
        t.m2.discretizer = disc;
        t.m2.registry_version = config.registry.version;
        return t;
    }();
    return trained;
}

std::vector<CertificateView> load_chain(const std::string& fixture) {
    auto blocks = decode_pem(testutil::read_fixture(fixture));
    std::vector<CertificateView> chain;
    for (const Bytes& der : blocks) chain.push_back(decode_certificate(as_span(der)));
    return chain;
}

Capture capture_of(const SynthSession& session) {
    return read_pcap(as_span(write_pcap(session.frames)));
}

const int64_t kEvalAt = 1767225600;

SynthSession make_session(bool malicious, uint32_t seed) {
    std::mt19937 rng(seed);
    return synth_session(rng, malicious, ExtensionRegistry::defaults());
}

}  // namespace

TEST_CASE("run_verdict: clean certificate and benign traffic is accepted") {
    SynthSession benign = make_session(false, 9001);
    Verdict v = run_verdict(load_chain("allpass.pem"), "www.example.com", kEvalAt,
                            [&] { return capture_of(benign); }, models().m1, models().m2,
                            PipelineConfig::defaults());
    CHECK(v.decision == Decision::Accepted);
    CHECK(!v.phase1_classifier_ran);  // traditional validation passed outright
    CHECK(v.report.passed());
    CHECK(v.confidence > 0.5);
    REQUIRE(v.phase2_evidence.has_value());
    CHECK(v.phase2_evidence->size() == 45);
}

TEST_CASE("run_verdict: failed validation plus malicious phase-1 never opens the capture") {
    size_t opens = 0;
    Verdict v = run_verdict(load_chain("multifault_expired_selfsigned.pem"), "www.example.com",
                            kEvalAt,
                            [&] {
                                ++opens;
                                return Capture{};
                            },
                            models().m1, models().m2, PipelineConfig::defaults());
    CHECK(v.decision == Decision::RejectedPhase1);
    CHECK(v.phase1_classifier_ran);
    CHECK(opens == 0);  // short-circuit: the pcap is never read
}

TEST_CASE("run_verdict: accepted certificate with malicious-looking traffic is rejected in phase 2") {
    SynthSession malicious = make_session(true, 777);
    Verdict v = run_verdict(load_chain("allpass.pem"), "www.example.com", kEvalAt,
                            [&] { return capture_of(malicious); }, models().m1, models().m2,
                            PipelineConfig::defaults());
    CHECK(v.decision == Decision::RejectedPhase2);
    REQUIRE(v.phase2_evidence.has_value());
    // the deciding flow carries the malware-favored ciphersuite trait 90% of
    // the time; at this seed it does
    CHECK((*v.phase2_evidence)[43] != "0xc02f");
}

TEST_CASE("run_verdict: capture without a handshake is indeterminate") {
    Verdict v = run_verdict(load_chain("allpass.pem"), "www.example.com", kEvalAt,
                            [] { return Capture{}; }, models().m1, models().m2,
                            PipelineConfig::defaults());
    CHECK(v.decision == Decision::IndeterminateNoHandshake);
    CHECK(v.confidence == 0.0);
    CHECK(!v.phase2_evidence.has_value());
}

TEST_CASE("run_verdict: innocently failing certificate still reaches phase 2") {
    // expired but otherwise clean and not self-signed: phase-1 classifier
    // runs and typically clears it
    SynthSession benign = make_session(false, 31415);
    Verdict v = run_verdict(load_chain("validity_expired.pem"), "www.example.com", kEvalAt,
                            [&] { return capture_of(benign); }, models().m1, models().m2,
                            PipelineConfig::defaults());
    CHECK(v.phase1_classifier_ran);
    CHECK((v.decision == Decision::Accepted || v.decision == Decision::RejectedPhase1));
    if (v.decision == Decision::Accepted) CHECK(v.phase2_evidence.has_value());
}

TEST_CASE("verdict cache: phase-1 outcome is reused per (server, fingerprint)") {
    VerdictCache cache;
    auto chain = load_chain("multifault_expired_selfsigned.pem");
    size_t opens = 0;
    auto provider = [&] {
        ++opens;
        return Capture{};
    };
    Verdict first = run_verdict(chain, "www.example.com", kEvalAt, provider, models().m1,
                                models().m2, PipelineConfig::defaults(), &cache);
    CHECK(first.decision == Decision::RejectedPhase1);
    CHECK(cache.size() == 1);

    Verdict second = run_verdict(chain, "www.example.com", kEvalAt, provider, models().m1,
                                 models().m2, PipelineConfig::defaults(), &cache);
    CHECK(second.decision == Decision::RejectedPhase1);
    CHECK(second.confidence == first.confidence);
    CHECK(cache.size() == 1);
    CHECK(opens == 0);

    // distinct server identity gets its own entry
    uint64_t fp = certificate_fingerprint(chain.front());
    CHECK(cache.lookup("www.example.com", fp).has_value());
    CHECK(!cache.lookup("other.example.com", fp).has_value());
}

TEST_CASE("verdict JSON round-trips exactly") {
    SynthSession malicious = make_session(true, 31337);
    Verdict v = run_verdict(load_chain("allpass.pem"), "www.example.com", kEvalAt,
                            [&] { return capture_of(malicious); }, models().m1, models().m2,
                            PipelineConfig::defaults());
    std::string dumped = v.to_json().dump();
    Verdict back = Verdict::from_json(nlohmann::json::parse(dumped));
    CHECK(back == v);
    CHECK(back.to_json().dump() == dumped);
}

TEST_CASE("run_verdict: model/config registry mismatch is a hard error") {
    Phase2Model wrong = models().m2;
    wrong.registry_version = "custom-registry";
    CHECK_THROWS_AS(run_verdict(load_chain("allpass.pem"), "www.example.com", kEvalAt,
                                [] { return Capture{}; }, models().m1, wrong,
                                PipelineConfig::defaults()),
                    Error);
}

TEST_CASE("pipeline config JSON round-trip and defaults") {
    PipelineConfig config = PipelineConfig::defaults();
    CHECK(config.weak_suites == std::vector<uint16_t>{0x0004, 0x0005});
    CHECK(config.favored_suites == std::vector<uint16_t>{0x000a, 0x0004, 0x006b, 0x0005});
    CHECK(config.registry.ids.size() == 21);
    CHECK(config.validation.recognized_critical_oids.size() == 6);

    PipelineConfig back = PipelineConfig::from_json(config.to_json());
    CHECK(back.weak_suites == config.weak_suites);
    CHECK(back.favored_suites == config.favored_suites);
    CHECK(back.registry.ids == config.registry.ids);
    CHECK(back.validation.recognized_critical_oids == config.validation.recognized_critical_oids);
}

TEST_CASE("synthetic corpus is reproducible and learnable at desk scale") {
    PipelineConfig config = PipelineConfig::defaults();
    SynthConfig sc;
    sc.sessions = 300;
    sc.seed = 5150;
    Corpus a = synth_corpus(sc, config.registry, config.weak_suites);
    Corpus b = synth_corpus(sc, config.registry, config.weak_suites);
    CHECK(a.phase2.rows == b.phase2.rows);
    CHECK(a.phase1.rows == b.phase1.rows);
    CHECK(a.phase2.labels == b.phase2.labels);
    CHECK(a.phase2.n_rows() == 300);
    CHECK(a.phase2.n_attrs() == 45);
}
