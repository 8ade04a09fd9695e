#pragma once

#include <array>
#include <string>
#include <vector>

#include "maltls/cert_validation.hpp"
#include "maltls/dataset.hpp"
#include "maltls/flow.hpp"
#include "maltls/tls.hpp"

namespace maltls {

// The 7 phase-1 booleans, in their fixed column order.
struct Phase1Features {
    bool fail_key_usage = false;
    bool fail_validity = false;
    bool fail_critical_ext = false;
    bool fail_hostname = false;
    bool fail_basic_constraints = false;
    bool fail_name_constraints = false;
    bool self_signed = false;

    std::array<bool, 7> as_array() const {
        return {fail_key_usage,     fail_validity,          fail_critical_ext, fail_hostname,
                fail_basic_constraints, fail_name_constraints, self_signed};
    }
    bool operator==(const Phase1Features&) const = default;
};

Phase1Features build_phase1(const ValidationReport& report);

struct Phase2Features {
    Phase1Features p1;
    FlowFeatures flow;
    ExtensionVector ext;
    uint16_t ciphersuite = 0;
    bool weak_ciphersuite = false;
};

// Requires a parsed ServerHello; throws NoHandshake otherwise.
Phase2Features build_phase2(const Phase1Features& p1, const FlowFeatures& flow,
                            const TlsServerInfo& tls, const ExtensionRegistry& registry,
                            const std::vector<uint16_t>& weak_suites);

// Fixed, versioned schemas. ciphersuite_code ships with an open value
// universe that training closes (plus an "other" bucket for codes unseen
// at training time).
inline constexpr const char* kPhase1SchemaVersion = "p1-7-v1";
inline constexpr const char* kPhase2SchemaVersion = "p2-45-v1";
Schema phase1_schema();
Schema phase2_schema();

std::string ciphersuite_label(uint16_t code);

// String cells in schema column order (no label).
std::vector<std::string> phase1_cells(const Phase1Features& f);
std::vector<std::string> phase2_cells(const Phase2Features& f);

// Maps string cells onto a concrete (trained) schema; nominal values not in
// the schema fall into "other" when present, else raise SchemaMismatch.
std::vector<double> cells_to_row(const Schema& schema, const std::vector<std::string>& cells);

inline constexpr const char* kOtherValue = "other";

}  // namespace maltls
