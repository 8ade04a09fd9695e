#include "maltls/cert_validation.hpp"

#include <algorithm>
#include <sstream>

#include "maltls/errors.hpp"

namespace maltls {

namespace {

std::vector<std::string> split_labels(std::string_view name) {
    std::vector<std::string> labels;
    std::string cur;
    for (char c : name) {
        if (c == '.') {
            labels.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    labels.push_back(cur);
    return labels;
}

bool subtree_contains(const std::string& name, const std::string& subtree) {
    std::string n = canonical_dns_name(name);
    std::string s = canonical_dns_name(subtree);
    if (s.empty()) return false;
    if (n == s) return true;
    return n.size() > s.size() + 1 && n.compare(n.size() - s.size() - 1, s.size() + 1, "." + s) == 0;
}

CriterionResult pass(Criterion c, std::string detail) {
    return {c, false, std::move(detail)};
}

CriterionResult fail(Criterion c, std::string detail) {
    return {c, true, std::move(detail)};
}

std::string ku_bits_to_string(const KeyUsageBits& ku) {
    static const char* names[9] = {"digitalSignature", "nonRepudiation",  "keyEncipherment",
                                   "dataEncipherment", "keyAgreement",    "keyCertSign",
                                   "cRLSign",          "encipherOnly",    "decipherOnly"};
    std::string out;
    for (unsigned i = 0; i < 9; ++i) {
        if (!ku.has(i)) continue;
        if (!out.empty()) out += ",";
        out += names[i];
    }
    return out.empty() ? "(none)" : out;
}

}  // namespace

const char* criterion_name(Criterion c) {
    switch (c) {
        case Criterion::KeyUsage: return "KeyUsage";
        case Criterion::ValidityDates: return "ValidityDates";
        case Criterion::CriticalExtensions: return "CriticalExtensions";
        case Criterion::HostnameValidation: return "HostnameValidation";
        case Criterion::BasicConstraints: return "BasicConstraints";
        case Criterion::NameConstraints: return "NameConstraints";
    }
    return "?";
}

Criterion criterion_from_name(const std::string& name) {
    for (Criterion c : kAllCriteria)
        if (name == criterion_name(c)) return c;
    throw Error("unknown criterion name: " + name);
}

ValidationConfig ValidationConfig::defaults() {
    // the extensions the validator itself understands
    return {{oid::kBasicConstraints, oid::kKeyUsage, oid::kSubjectAltName, oid::kNameConstraints,
             oid::kExtendedKeyUsage, oid::kCertificatePolicies}};
}

bool ValidationReport::passed() const {
    return std::none_of(results.begin(), results.end(),
                        [](const CriterionResult& r) { return r.failed; });
}

CriterionResult check_key_usage(const std::vector<CertificateView>& chain) {
    const Criterion c = Criterion::KeyUsage;
    bool evaluated = false;
    for (size_t i = 0; i < chain.size(); ++i) {
        const CertificateView& cert = chain[i];
        if (!cert.key_usage) continue;
        evaluated = true;
        if (i == 0) {
            if (!cert.key_usage->has(kDigitalSignature) && !cert.key_usage->has(kKeyEncipherment))
                return fail(c, "leaf key usage " + ku_bits_to_string(*cert.key_usage) +
                                   " allows neither digitalSignature nor keyEncipherment");
        } else {
            if (!cert.key_usage->has(kKeyCertSign))
                return fail(c, "issuer at depth " + std::to_string(i) + " has key usage " +
                                   ku_bits_to_string(*cert.key_usage) + " without keyCertSign");
        }
    }
    if (!evaluated) return pass(c, "absent - not evaluated");
    return pass(c, "key usage permits TLS server authentication");
}

CriterionResult check_validity(const CertificateView& cert, int64_t now) {
    const Criterion c = Criterion::ValidityDates;
    if (now < cert.not_before)
        return fail(c, "certificate not valid before " + std::to_string(cert.not_before) +
                           " (now " + std::to_string(now) + ")");
    if (now > cert.not_after) {
        int64_t days_expired = (now - cert.not_after) / 86400;
        return fail(c, "certificate expired, days_expired=" + std::to_string(days_expired));
    }
    return pass(c, "within validity period");
}

CriterionResult check_critical_extensions(const CertificateView& cert,
                                          const std::set<std::string>& recognized_oids) {
    const Criterion c = Criterion::CriticalExtensions;
    for (const ExtensionRecord& ext : cert.extensions) {
        if (ext.critical && !recognized_oids.contains(ext.oid))
            return fail(c, "unrecognized critical extension " + ext.oid);
    }
    return pass(c, "no unrecognized critical extensions");
}

bool wildcard_pattern_invalid(std::string_view pattern) {
    size_t stars = static_cast<size_t>(std::count(pattern.begin(), pattern.end(), '*'));
    if (stars == 0) return false;
    if (stars > 1) return true;
    auto labels = split_labels(pattern);
    // the single '*' must be the whole leftmost label, with labels after it
    return labels.size() < 2 || labels[0] != "*";
}

bool hostname_matches(std::string_view pattern, std::string_view hostname) {
    std::string p = canonical_dns_name(pattern);
    std::string h = canonical_dns_name(hostname);
    if (p.empty() || h.empty()) return false;

    bool has_star = p.find('*') != std::string::npos;
    if (has_star && wildcard_pattern_invalid(p)) return false;

    auto pl = split_labels(p);
    auto hl = split_labels(h);
    if (std::any_of(pl.begin(), pl.end(), [](const std::string& l) { return l.empty(); }))
        return false;
    if (std::any_of(hl.begin(), hl.end(), [](const std::string& l) { return l.empty(); }))
        return false;
    if (pl.size() != hl.size()) return false;  // '*' covers exactly one label
    for (size_t i = 0; i < pl.size(); ++i) {
        if (i == 0 && has_star) continue;  // validated leftmost '*'
        if (pl[i] != hl[i]) return false;
    }
    return true;
}

std::vector<std::string> leaf_dns_names(const CertificateView& cert) {
    if (!cert.san_dns_names.empty()) return cert.san_dns_names;
    if (cert.subject_cn) return {*cert.subject_cn};
    return {};
}

CriterionResult check_hostname(const CertificateView& cert, const std::string& hostname) {
    const Criterion c = Criterion::HostnameValidation;
    std::vector<std::string> names = leaf_dns_names(cert);
    if (names.empty()) return fail(c, "certificate carries no dNSName and no subject CN");

    std::vector<std::string> bad_patterns;
    for (const std::string& name : names) {
        if (hostname_matches(name, hostname))
            return pass(c, "hostname matches " + name);
        if (wildcard_pattern_invalid(name)) bad_patterns.push_back(name);
    }
    std::string detail = "no certificate name matches host " + hostname;
    for (const std::string& p : bad_patterns) detail += "; invalid wildcard pattern " + p;
    return fail(c, detail);
}

CriterionResult check_basic_constraints(const std::vector<CertificateView>& chain) {
    const Criterion c = Criterion::BasicConstraints;
    for (size_t i = 1; i < chain.size(); ++i) {
        const CertificateView& cert = chain[i];
        if (!cert.basic_constraints || !cert.basic_constraints->is_ca)
            return fail(c, "issuer at depth " + std::to_string(i) +
                               " is not marked as a CA (basic constraints " +
                               (cert.basic_constraints ? "cA=FALSE" : "absent") + ")");
    }
    // pathLenConstraint bounds the non-leaf certificates below the CA
    for (size_t i = 1; i < chain.size(); ++i) {
        const auto& bc = chain[i].basic_constraints;
        if (!bc || !bc->path_len) continue;
        int64_t below = static_cast<int64_t>(i) - 1;
        if (below > *bc->path_len)
            return fail(c, "CA at depth " + std::to_string(i) + " permits " +
                               std::to_string(*bc->path_len) + " intermediates but " +
                               std::to_string(below) + " follow it");
    }
    if (chain.size() == 1) return pass(c, "single-certificate chain, no issuers to constrain");
    return pass(c, "issuer chain satisfies basic constraints");
}

CriterionResult check_name_constraints(const std::vector<CertificateView>& chain) {
    const Criterion c = Criterion::NameConstraints;
    std::vector<std::string> names = leaf_dns_names(chain.front());

    bool evaluated = false;
    std::string note;
    for (size_t i = 1; i < chain.size(); ++i) {
        const auto& nc = chain[i].name_constraints;
        if (!nc) continue;
        evaluated = true;
        if (nc->base_distance_present)
            note = " (BaseDistance fields present, ignored)";
        for (const std::string& name : names) {
            if (!nc->permitted_dns.empty()) {
                bool inside = std::any_of(nc->permitted_dns.begin(), nc->permitted_dns.end(),
                                          [&](const std::string& s) { return subtree_contains(name, s); });
                if (!inside)
                    return fail(c, "name " + name + " outside permitted subtrees of CA at depth " +
                                       std::to_string(i) + note);
            }
            for (const std::string& s : nc->excluded_dns) {
                if (subtree_contains(name, s))
                    return fail(c, "name " + name + " falls in excluded subtree " + s +
                                       " of CA at depth " + std::to_string(i) + note);
            }
        }
    }
    if (!evaluated) return pass(c, "absent - not evaluated");
    return pass(c, "leaf names satisfy all issuer name constraints" + note);
}

bool is_self_signed(const CertificateView& cert) {
    if (!dn_equal(cert.subject_dn, cert.issuer_dn)) return false;
    if (cert.aki) return cert.ski && *cert.aki == *cert.ski;
    return true;
}

ValidationReport validate(const std::vector<CertificateView>& chain, const std::string& hostname,
                          int64_t now, const ValidationConfig& config) {
    if (chain.empty()) throw Error("validate: empty certificate chain");
    ValidationReport report;
    report.hostname = hostname;
    report.evaluated_at = now;
    report.results[0] = check_key_usage(chain);
    report.results[1] = check_validity(chain.front(), now);
    report.results[2] = check_critical_extensions(chain.front(), config.recognized_critical_oids);
    report.results[3] = check_hostname(chain.front(), hostname);
    report.results[4] = check_basic_constraints(chain);
    report.results[5] = check_name_constraints(chain);
    report.self_signed = is_self_signed(chain.front());
    return report;
}

nlohmann::ordered_json ValidationReport::to_json() const {
    nlohmann::ordered_json j;
    j["hostname"] = hostname;
    j["evaluated_at"] = evaluated_at;
    j["passed"] = passed();
    j["self_signed"] = self_signed;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const CriterionResult& r : results) {
        arr.push_back({{"criterion", criterion_name(r.criterion)},
                       {"failed", r.failed},
                       {"detail", r.detail}});
    }
    j["results"] = std::move(arr);
    return j;
}

ValidationReport ValidationReport::from_json(const nlohmann::json& j) {
    ValidationReport report;
    report.hostname = j.at("hostname").get<std::string>();
    report.evaluated_at = j.at("evaluated_at").get<int64_t>();
    report.self_signed = j.at("self_signed").get<bool>();
    const auto& arr = j.at("results");
    if (arr.size() != report.results.size()) throw Error("report: wrong criterion count");
    for (size_t i = 0; i < report.results.size(); ++i) {
        CriterionResult r;
        r.criterion = criterion_from_name(arr[i].at("criterion").get<std::string>());
        if (r.criterion != kAllCriteria[i]) throw Error("report: criteria out of order");
        r.failed = arr[i].at("failed").get<bool>();
        r.detail = arr[i].at("detail").get<std::string>();
        report.results[i] = r;
    }
    return report;
}

}  // namespace maltls
