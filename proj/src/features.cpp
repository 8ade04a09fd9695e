#include "maltls/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "maltls/errors.hpp"

namespace maltls {

namespace {

const std::array<const char*, 7> kPhase1Columns = {
    "fail_key_usage",        "fail_validity",         "fail_critical_ext", "fail_hostname",
    "fail_basic_constraints", "fail_name_constraints", "self_signed",
};

std::string bool_cell(bool b) { return b ? "1" : "0"; }

std::string num_cell(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15)
        return std::to_string(static_cast<long long>(v));
    return nlohmann::json(v).dump();
}

}  // namespace

Phase1Features build_phase1(const ValidationReport& report) {
    Phase1Features f;
    f.fail_key_usage = report.result(Criterion::KeyUsage).failed;
    f.fail_validity = report.result(Criterion::ValidityDates).failed;
    f.fail_critical_ext = report.result(Criterion::CriticalExtensions).failed;
    f.fail_hostname = report.result(Criterion::HostnameValidation).failed;
    f.fail_basic_constraints = report.result(Criterion::BasicConstraints).failed;
    f.fail_name_constraints = report.result(Criterion::NameConstraints).failed;
    f.self_signed = report.self_signed;
    return f;
}

Phase2Features build_phase2(const Phase1Features& p1, const FlowFeatures& flow,
                            const TlsServerInfo& tls, const ExtensionRegistry& registry,
                            const std::vector<uint16_t>& weak_suites) {
    if (!tls.selected_ciphersuite)
        throw NoHandshake("flow has no ServerHello; phase-2 features unavailable");
    Phase2Features f;
    f.p1 = p1;
    f.flow = flow;
    f.ext = extension_vector(tls, registry);
    f.ciphersuite = *tls.selected_ciphersuite;
    f.weak_ciphersuite = std::find(weak_suites.begin(), weak_suites.end(), f.ciphersuite) !=
                         weak_suites.end();
    return f;
}

Schema phase1_schema() {
    Schema s;
    s.version = kPhase1SchemaVersion;
    for (const char* name : kPhase1Columns)
        s.attributes.push_back({name, AttrKind::Nominal, {"0", "1"}});
    return s;
}

Schema phase2_schema() {
    Schema s;
    s.version = kPhase2SchemaVersion;
    for (const char* name : kPhase1Columns)
        s.attributes.push_back({name, AttrKind::Nominal, {"0", "1"}});
    for (const char* name : {"in_bytes", "out_bytes", "in_packets", "out_packets", "src_port",
                             "dst_port", "duration_s", "len_min", "len_max", "len_mean", "len_std",
                             "iat_min", "iat_max", "iat_mean", "iat_std"})
        s.attributes.push_back({name, AttrKind::Numeric, {}});
    for (int i = 0; i < 21; ++i)
        s.attributes.push_back({"ext_bit_" + std::to_string(i), AttrKind::Nominal, {"0", "1"}});
    s.attributes.push_back({"ciphersuite_code", AttrKind::Nominal, {}});  // open universe
    s.attributes.push_back({"weak_ciphersuite", AttrKind::Nominal, {"0", "1"}});
    return s;
}

std::string ciphersuite_label(uint16_t code) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "0x%04x", code);
    return buf;
}

std::vector<std::string> phase1_cells(const Phase1Features& f) {
    std::vector<std::string> cells;
    cells.reserve(7);
    for (bool b : f.as_array()) cells.push_back(bool_cell(b));
    return cells;
}

std::vector<std::string> phase2_cells(const Phase2Features& f) {
    std::vector<std::string> cells = phase1_cells(f.p1);
    cells.reserve(45);
    const FlowFeatures& fl = f.flow;
    for (double v : {static_cast<double>(fl.in_bytes), static_cast<double>(fl.out_bytes),
                     static_cast<double>(fl.in_packets), static_cast<double>(fl.out_packets),
                     static_cast<double>(fl.src_port), static_cast<double>(fl.dst_port),
                     fl.duration_s, fl.len_min, fl.len_max, fl.len_mean, fl.len_std, fl.iat_min,
                     fl.iat_max, fl.iat_mean, fl.iat_std})
        cells.push_back(num_cell(v));
    for (uint8_t b : f.ext.bits) cells.push_back(bool_cell(b != 0));
    cells.push_back(ciphersuite_label(f.ciphersuite));
    cells.push_back(bool_cell(f.weak_ciphersuite));
    return cells;
}

std::vector<double> cells_to_row(const Schema& schema, const std::vector<std::string>& cells) {
    if (cells.size() != schema.attributes.size())
        throw SchemaMismatch("cell count does not match schema");
    std::vector<double> row(cells.size());
    for (size_t i = 0; i < cells.size(); ++i) {
        const Attribute& attr = schema.attributes[i];
        if (attr.kind == AttrKind::Numeric) {
            try {
                row[i] = std::stod(cells[i]);
            } catch (...) {
                throw SchemaMismatch("attribute " + attr.name + ": '" + cells[i] + "' not numeric");
            }
        } else {
            int idx = attr.value_index(cells[i]);
            if (idx < 0) idx = attr.value_index(kOtherValue);
            if (idx < 0)
                throw SchemaMismatch("attribute " + attr.name + ": unknown value '" + cells[i] + "'");
            row[i] = idx;
        }
    }
    return row;
}

}  // namespace maltls
