#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "maltls/x509.hpp"

namespace maltls {

enum class Criterion {
    KeyUsage = 0,
    ValidityDates = 1,
    CriticalExtensions = 2,
    HostnameValidation = 3,
    BasicConstraints = 4,
    NameConstraints = 5,
};

inline constexpr std::array<Criterion, 6> kAllCriteria = {
    Criterion::KeyUsage,           Criterion::ValidityDates,   Criterion::CriticalExtensions,
    Criterion::HostnameValidation, Criterion::BasicConstraints, Criterion::NameConstraints,
};

const char* criterion_name(Criterion c);
Criterion criterion_from_name(const std::string& name);

struct CriterionResult {
    Criterion criterion = Criterion::KeyUsage;
    bool failed = false;
    std::string detail;
    bool operator==(const CriterionResult&) const = default;
};

struct ValidationConfig {
    std::set<std::string> recognized_critical_oids;
    static ValidationConfig defaults();
};

struct ValidationReport {
    std::array<CriterionResult, 6> results;  // fixed order, one per criterion
    bool self_signed = false;
    int64_t evaluated_at = 0;
    std::string hostname;

    bool passed() const;
    const CriterionResult& result(Criterion c) const {
        return results[static_cast<size_t>(c)];
    }
    nlohmann::ordered_json to_json() const;
    static ValidationReport from_json(const nlohmann::json& j);
    bool operator==(const ValidationReport&) const = default;
};

// Individual criteria. Chains are ordered leaf first.
CriterionResult check_key_usage(const std::vector<CertificateView>& chain);
CriterionResult check_validity(const CertificateView& cert, int64_t now);
CriterionResult check_critical_extensions(const CertificateView& cert,
                                          const std::set<std::string>& recognized_oids);
CriterionResult check_hostname(const CertificateView& cert, const std::string& hostname);
CriterionResult check_basic_constraints(const std::vector<CertificateView>& chain);
CriterionResult check_name_constraints(const std::vector<CertificateView>& chain);
bool is_self_signed(const CertificateView& cert);

// Runs all six criteria plus the self-signed flag; never short-circuits.
ValidationReport validate(const std::vector<CertificateView>& chain, const std::string& hostname,
                          int64_t now, const ValidationConfig& config);

// Hostname matching, exposed for the property tests.
//
// A pattern with no '*' matches by exact label comparison. A wildcard
// pattern is only honored when the single '*' is the entire leftmost label
// and at least one label follows; it then matches exactly one label.
// Anything else (multiple '*', '*' embedded in a label, '*' not leftmost,
// bare "*") never matches.
bool hostname_matches(std::string_view pattern, std::string_view hostname);
bool wildcard_pattern_invalid(std::string_view pattern);

// dNSNames the validator scores for a leaf: SAN entries, or the subject CN
// when the SAN carries no dNSName at all.
std::vector<std::string> leaf_dns_names(const CertificateView& cert);

}  // namespace maltls
