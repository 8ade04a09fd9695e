#include "maltls/x509.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "maltls/base64.hpp"
#include "maltls/der.hpp"
#include "maltls/errors.hpp"

namespace maltls {

namespace {

constexpr const char* kPemBegin = "-----BEGIN CERTIFICATE-----";
constexpr const char* kPemEnd = "-----END CERTIFICATE-----";

std::string trimmed(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

DistinguishedName parse_name(const der::Node& name) {
    DistinguishedName dn;
    for (const der::Node& rdn : der::children(name)) {
        if (!rdn.is_universal(der::kSet)) throw MalformedDer("name: RDN is not a SET");
        for (const der::Node& atv : der::children(rdn)) {
            auto parts = der::children(atv);
            if (parts.size() != 2) throw MalformedDer("name: bad AttributeTypeAndValue");
            dn.push_back({der::to_oid(parts[0]), der::to_text(parts[1])});
        }
    }
    return dn;
}

// GeneralName dNSName entries ([2] IMPLICIT IA5String) out of a GeneralNames
// sequence; other name forms are skipped.
std::vector<std::string> collect_dns_names(const der::Node& general_names) {
    std::vector<std::string> out;
    for (const der::Node& gn : der::children(general_names)) {
        if (gn.tag_class == der::kContext && gn.tag == 2)
            out.emplace_back(gn.content.begin(), gn.content.end());
    }
    return out;
}

void decode_key_usage(CertificateView& view, const der::Node& inner) {
    auto [bytes, unused] = der::to_bit_string(inner);
    KeyUsageBits ku;
    unsigned nbits = static_cast<unsigned>(bytes.size() * 8) - (bytes.empty() ? 0 : unused);
    for (unsigned i = 0; i < nbits && i < 9; ++i) {
        if (bytes[i / 8] & (0x80 >> (i % 8))) ku.bits |= static_cast<uint16_t>(1u << i);
    }
    if (!ku.any()) {
        view.parse_warnings.push_back("key usage extension present but no bits set");
        return;
    }
    view.key_usage = ku;
}

void decode_basic_constraints(CertificateView& view, const der::Node& inner) {
    BasicConstraintsInfo bc;
    auto parts = der::children(inner);
    size_t i = 0;
    if (i < parts.size() && parts[i].is_universal(der::kBoolean)) {
        bc.is_ca = der::to_bool(parts[i]);
        ++i;
    }
    if (i < parts.size() && parts[i].is_universal(der::kInteger)) {
        bc.path_len = der::to_small_int(parts[i]);
        ++i;
    }
    if (bc.path_len && !bc.is_ca)
        view.parse_warnings.push_back("basic constraints: pathLenConstraint without cA");
    if (bc.path_len && *bc.path_len < 0)
        view.parse_warnings.push_back("basic constraints: negative pathLenConstraint");
    view.basic_constraints = bc;
}

void decode_name_constraints(CertificateView& view, const der::Node& inner) {
    NameConstraintsInfo nc;
    for (const der::Node& part : der::children(inner)) {
        if (part.tag_class != der::kContext) continue;
        std::vector<std::string>* bucket =
            part.tag == 0 ? &nc.permitted_dns : (part.tag == 1 ? &nc.excluded_dns : nullptr);
        if (!bucket) continue;
        for (const der::Node& subtree : der::children(part)) {
            auto fields = der::children(subtree);
            if (fields.empty()) throw MalformedDer("name constraints: empty GeneralSubtree");
            const der::Node& base = fields[0];
            if (base.tag_class == der::kContext && base.tag == 2)
                bucket->emplace_back(base.content.begin(), base.content.end());
            if (fields.size() > 1) nc.base_distance_present = true;
        }
    }
    view.name_constraints = nc;
}

Bytes octet_string_bytes(const der::Node& inner) {
    if (!inner.is_universal(der::kOctetString)) throw MalformedDer("expected OCTET STRING");
    return Bytes(inner.content.begin(), inner.content.end());
}

void decode_one_extension(CertificateView& view, const ExtensionRecord& ext) {
    der::Node inner = der::parse(as_span(ext.raw_value));
    if (ext.oid == oid::kKeyUsage) {
        decode_key_usage(view, inner);
    } else if (ext.oid == oid::kBasicConstraints) {
        decode_basic_constraints(view, inner);
    } else if (ext.oid == oid::kSubjectAltName) {
        view.san_dns_names = collect_dns_names(inner);
    } else if (ext.oid == oid::kNameConstraints) {
        decode_name_constraints(view, inner);
    } else if (ext.oid == oid::kSubjectKeyIdentifier) {
        view.ski = octet_string_bytes(inner);
    } else if (ext.oid == oid::kAuthorityKeyIdentifier) {
        // AuthorityKeyIdentifier ::= SEQUENCE { keyIdentifier [0] IMPLICIT ... }
        for (const der::Node& part : der::children(inner)) {
            if (part.tag_class == der::kContext && part.tag == 0) {
                view.aki = Bytes(part.content.begin(), part.content.end());
                break;
            }
        }
    }
}

void decode_extensions(CertificateView& view, const der::Node& wrapper) {
    // wrapper is [3] EXPLICIT SEQUENCE OF Extension
    auto seqs = der::children(wrapper);
    if (seqs.size() != 1 || !seqs[0].is_universal(der::kSequence))
        throw MalformedDer("extensions: bad wrapper");
    std::map<std::string, int> seen;
    for (const der::Node& ext_node : der::children(seqs[0])) {
        auto fields = der::children(ext_node);
        if (fields.size() < 2 || !fields[0].is_universal(der::kOid))
            throw MalformedDer("extension: bad structure");
        ExtensionRecord rec;
        rec.oid = der::to_oid(fields[0]);
        size_t vi = 1;
        if (fields[vi].is_universal(der::kBoolean)) {
            rec.critical = der::to_bool(fields[vi]);
            ++vi;
        }
        if (vi >= fields.size() || !fields[vi].is_universal(der::kOctetString))
            throw MalformedDer("extension: missing extnValue");
        rec.raw_value.assign(fields[vi].content.begin(), fields[vi].content.end());

        if (++seen[rec.oid] == 2)
            view.parse_warnings.push_back("duplicate extension " + rec.oid);
        view.extensions.push_back(rec);
        if (seen[rec.oid] > 1) continue;  // typed fields stay with the first occurrence
        try {
            decode_one_extension(view, view.extensions.back());
        } catch (const Error&) {
            view.parse_warnings.push_back("extension " + rec.oid + " malformed, kept raw");
        }
    }
}

}  // namespace

std::vector<Bytes> decode_pem(std::string_view text) {
    std::vector<Bytes> out;
    size_t pos = 0;
    while (true) {
        size_t begin = text.find(kPemBegin, pos);
        if (begin == std::string_view::npos) break;
        size_t body = begin + std::char_traits<char>::length(kPemBegin);
        size_t end = text.find(kPemEnd, body);
        if (end == std::string_view::npos) throw MalformedPem("unterminated certificate block");
        out.push_back(base64_decode(text.substr(body, end - body)));
        pos = end + std::char_traits<char>::length(kPemEnd);
    }
    return out;
}

CertificateView decode_certificate(ByteSpan der_bytes) {
    CertificateView view;
    view.der.assign(der_bytes.begin(), der_bytes.end());

    der::Node root = der::parse(der_bytes);
    if (!root.is_universal(der::kSequence)) throw MalformedDer("certificate: not a SEQUENCE");
    auto top = der::children(root);
    if (top.empty() || !top[0].is_universal(der::kSequence))
        throw MalformedDer("certificate: missing tbsCertificate");

    auto tbs = der::children(top[0]);
    size_t i = 0;
    if (i < tbs.size() && tbs[i].is_context(0)) {
        auto vfields = der::children(tbs[i]);
        if (vfields.size() != 1 || !vfields[0].is_universal(der::kInteger))
            throw MalformedDer("certificate: bad version field");
        int64_t v = der::to_small_int(vfields[0]);
        if (v < 0 || v > 2) throw UnsupportedVersion("certificate version " + std::to_string(v + 1));
        view.version = static_cast<int>(v) + 1;
        ++i;
    }
    if (i + 5 >= tbs.size()) throw MalformedDer("certificate: tbs too short");

    view.serial = der::to_integer_bytes(tbs[i]);
    // tbs[i+1] is the signature AlgorithmIdentifier; not needed here
    view.issuer_dn = parse_name(tbs[i + 2]);

    auto validity = der::children(tbs[i + 3]);
    if (validity.size() != 2) throw MalformedDer("certificate: bad Validity");
    view.not_before = der::to_time(validity[0]);
    view.not_after = der::to_time(validity[1]);

    view.subject_dn = parse_name(tbs[i + 4]);
    // tbs[i+5] is subjectPublicKeyInfo; key material is out of scope

    for (size_t j = i + 6; j < tbs.size(); ++j) {
        if (tbs[j].is_context(3)) decode_extensions(view, tbs[j]);
        // [1]/[2] unique identifiers are skipped
    }

    for (const NameAttribute& attr : view.subject_dn) {
        if (attr.oid == oid::kCommonName) {
            view.subject_cn = trimmed(attr.value);
            break;
        }
    }
    return view;
}

std::vector<CertificateView> decode_chain(ByteSpan file_bytes) {
    std::string_view text{reinterpret_cast<const char*>(file_bytes.data()), file_bytes.size()};
    if (text.find(kPemBegin) != std::string_view::npos) {
        std::vector<CertificateView> chain;
        for (const Bytes& der_blob : decode_pem(text)) chain.push_back(decode_certificate(as_span(der_blob)));
        return chain;
    }
    // raw DER: a single certificate
    return {decode_certificate(file_bytes)};
}

std::string canonical_dns_name(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    while (!out.empty() && out.back() == '.') out.pop_back();
    return out;
}

DistinguishedName canonical_dn(const DistinguishedName& dn) {
    DistinguishedName out;
    out.reserve(dn.size());
    for (const NameAttribute& attr : dn) out.push_back({attr.oid, trimmed(attr.value)});
    return out;
}

bool dn_equal(const DistinguishedName& a, const DistinguishedName& b) {
    return canonical_dn(a) == canonical_dn(b);
}

std::string dn_to_string(const DistinguishedName& dn) {
    static const std::map<std::string, std::string> abbrev = {
        {"2.5.4.3", "CN"},  {"2.5.4.5", "serialNumber"},
        {"2.5.4.6", "C"},   {"2.5.4.7", "L"},
        {"2.5.4.8", "ST"},  {"2.5.4.10", "O"},
        {"2.5.4.11", "OU"}, {"1.2.840.113549.1.9.1", "emailAddress"},
        {"0.9.2342.19200300.100.1.25", "DC"},
    };
    std::string out;
    for (const NameAttribute& attr : dn) {
        if (!out.empty()) out += ", ";
        auto it = abbrev.find(attr.oid);
        out += (it != abbrev.end() ? it->second : attr.oid) + "=" + attr.value;
    }
    return out;
}

uint64_t certificate_fingerprint(const CertificateView& cert) {
    return fnv1a64(as_span(cert.der));
}

}  // namespace maltls
