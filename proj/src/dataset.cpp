#include "maltls/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "maltls/errors.hpp"

namespace maltls {

namespace {

std::string csv_escape(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

std::vector<std::string> csv_split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

bool parse_double(const std::string& s, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size() && std::isfinite(out);
    } catch (...) {
        return false;
    }
}

std::string format_double(double v) {
    // shortest representation that round-trips; integral values print bare
    if (v == std::floor(v) && std::abs(v) < 1e15)
        return std::to_string(static_cast<long long>(v));
    return nlohmann::json(v).dump();
}

}  // namespace

int Attribute::value_index(const std::string& v) const {
    for (size_t i = 0; i < values.size(); ++i)
        if (values[i] == v) return static_cast<int>(i);
    return -1;
}

int Schema::index_of(const std::string& name) const {
    for (size_t i = 0; i < attributes.size(); ++i)
        if (attributes[i].name == name) return static_cast<int>(i);
    return -1;
}

nlohmann::ordered_json Schema::to_json() const {
    nlohmann::ordered_json j;
    j["version"] = version;
    j["label_values"] = label_values;
    nlohmann::ordered_json attrs = nlohmann::ordered_json::array();
    for (const Attribute& a : attributes) {
        nlohmann::ordered_json aj;
        aj["name"] = a.name;
        aj["kind"] = a.kind == AttrKind::Nominal ? "nominal" : "numeric";
        if (a.kind == AttrKind::Nominal) aj["values"] = a.values;
        attrs.push_back(std::move(aj));
    }
    j["attributes"] = std::move(attrs);
    return j;
}

Schema Schema::from_json(const nlohmann::json& j) {
    Schema s;
    s.version = j.at("version").get<std::string>();
    auto lv = j.at("label_values");
    s.label_values = {lv.at(0).get<std::string>(), lv.at(1).get<std::string>()};
    for (const auto& aj : j.at("attributes")) {
        Attribute a;
        a.name = aj.at("name").get<std::string>();
        a.kind = aj.at("kind").get<std::string>() == "numeric" ? AttrKind::Numeric
                                                               : AttrKind::Nominal;
        if (a.kind == AttrKind::Nominal) a.values = aj.at("values").get<std::vector<std::string>>();
        s.attributes.push_back(std::move(a));
    }
    return s;
}

Dataset dataset_from_csv(const std::string& text, std::optional<Schema> expected) {
    std::vector<std::string> lines = split_lines(text);
    if (lines.empty()) throw EmptyDataset("csv has no header");
    std::vector<std::string> header = csv_split_line(lines[0]);
    if (header.size() < 2) throw SchemaMismatch("csv needs at least one attribute and a label");
    size_t n_attrs = header.size() - 1;

    Dataset ds;
    if (expected) {
        ds.schema = *expected;
        if (ds.schema.attributes.size() != n_attrs)
            throw SchemaMismatch("csv has " + std::to_string(n_attrs) + " attributes, schema has " +
                                 std::to_string(ds.schema.attributes.size()));
        for (size_t i = 0; i < n_attrs; ++i)
            if (ds.schema.attributes[i].name != header[i])
                throw SchemaMismatch("csv column '" + header[i] + "' does not match schema '" +
                                     ds.schema.attributes[i].name + "'");
    } else {
        // infer: numeric when every value parses as a number
        ds.schema.version = "inferred";
        for (size_t i = 0; i < n_attrs; ++i) ds.schema.attributes.push_back({header[i], AttrKind::Numeric, {}});
        for (size_t li = 1; li < lines.size(); ++li) {
            if (lines[li].empty()) continue;
            auto cells = csv_split_line(lines[li]);
            if (cells.size() != header.size()) throw SchemaMismatch("csv row width mismatch");
            for (size_t i = 0; i < n_attrs; ++i) {
                double d;
                if (!parse_double(cells[i], d)) ds.schema.attributes[i].kind = AttrKind::Nominal;
            }
        }
        // label universe: collect in order of first appearance
        std::vector<std::string> labels_seen;
        for (size_t li = 1; li < lines.size(); ++li) {
            if (lines[li].empty()) continue;
            auto cells = csv_split_line(lines[li]);
            const std::string& lab = cells.back();
            if (std::find(labels_seen.begin(), labels_seen.end(), lab) == labels_seen.end())
                labels_seen.push_back(lab);
        }
        if (labels_seen.size() > 2) throw SchemaMismatch("labels must be binary");
        for (size_t i = 0; i < labels_seen.size(); ++i) ds.schema.label_values[i] = labels_seen[i];
    }

    std::vector<bool> open_attr(n_attrs);
    for (size_t i = 0; i < n_attrs; ++i)
        open_attr[i] = !expected || ds.schema.attributes[i].values.empty();

    for (size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        auto cells = csv_split_line(lines[li]);
        if (cells.size() != header.size()) throw SchemaMismatch("csv row width mismatch");
        std::vector<double> row(n_attrs);
        for (size_t i = 0; i < n_attrs; ++i) {
            Attribute& attr = ds.schema.attributes[i];
            if (attr.kind == AttrKind::Numeric) {
                double d;
                if (!parse_double(cells[i], d))
                    throw SchemaMismatch("attribute " + attr.name + ": '" + cells[i] +
                                         "' is not numeric");
                row[i] = d;
            } else {
                int idx = attr.value_index(cells[i]);
                if (idx < 0) {
                    if (!open_attr[i])
                        throw SchemaMismatch("attribute " + attr.name + ": unknown value '" +
                                             cells[i] + "'");
                    attr.values.push_back(cells[i]);  // open universe: collect
                    idx = static_cast<int>(attr.values.size()) - 1;
                }
                row[i] = idx;
            }
        }
        const std::string& lab = cells.back();
        int li_idx = lab == ds.schema.label_values[0] ? 0 : (lab == ds.schema.label_values[1] ? 1 : -1);
        if (li_idx < 0) throw SchemaMismatch("unknown label '" + lab + "'");
        ds.rows.push_back(std::move(row));
        ds.labels.push_back(static_cast<uint8_t>(li_idx));
    }
    return ds;
}

std::string dataset_to_csv(const Dataset& ds) {
    std::string out;
    for (const Attribute& a : ds.schema.attributes) out += csv_escape(a.name) + ",";
    out += "label\n";
    for (size_t r = 0; r < ds.n_rows(); ++r) {
        for (size_t i = 0; i < ds.n_attrs(); ++i) {
            const Attribute& a = ds.schema.attributes[i];
            if (a.kind == AttrKind::Numeric)
                out += format_double(ds.rows[r][i]);
            else
                out += csv_escape(a.values[static_cast<size_t>(ds.rows[r][i])]);
            out += ",";
        }
        out += csv_escape(ds.schema.label_values[ds.labels[r]]) + "\n";
    }
    return out;
}

std::string cells_to_csv(const Schema& schema, const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (size_t i = 0; i < schema.attributes.size(); ++i) {
        if (i) out += ",";
        out += csv_escape(schema.attributes[i].name);
    }
    out += "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            out += csv_escape(row[i]);
        }
        out += "\n";
    }
    return out;
}

SplitIndices split_train_test(const Dataset& ds, double fraction, uint32_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw Error("split fraction must be in (0,1)");
    std::array<std::vector<size_t>, 2> by_class;
    for (size_t r = 0; r < ds.n_rows(); ++r) by_class[ds.labels[r]].push_back(r);
    for (const auto& cls : by_class)
        if (cls.size() < 2) throw TooFewRows("need at least 2 rows per class");

    std::mt19937 rng(seed);
    for (auto& cls : by_class) std::shuffle(cls.begin(), cls.end(), rng);

    size_t train_total = static_cast<size_t>(std::llround(fraction * static_cast<double>(ds.n_rows())));
    // floor per class, then hand remaining slots to the largest fractional parts
    std::array<size_t, 2> take{};
    std::array<double, 2> frac{};
    for (int c = 0; c < 2; ++c) {
        double exact = fraction * static_cast<double>(by_class[c].size());
        take[c] = static_cast<size_t>(std::floor(exact));
        frac[c] = exact - std::floor(exact);
    }
    while (take[0] + take[1] < train_total) {
        int c = frac[0] >= frac[1] ? 0 : 1;
        if (take[c] >= by_class[c].size()) c = 1 - c;
        ++take[c];
        frac[c] = -1.0;
    }

    SplitIndices split;
    for (int c = 0; c < 2; ++c) {
        for (size_t i = 0; i < by_class[c].size(); ++i) {
            (i < take[c] ? split.train : split.test).push_back(by_class[c][i]);
        }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

Dataset subset(const Dataset& ds, const std::vector<size_t>& indices) {
    Dataset out;
    out.schema = ds.schema;
    out.rows.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (size_t i : indices) {
        out.rows.push_back(ds.rows[i]);
        out.labels.push_back(ds.labels[i]);
    }
    return out;
}

Discretizer fit_discretizer(const Dataset& ds, const std::vector<int>& numeric_attrs, int bins) {
    if (bins < 2) throw Error("discretizer needs bins >= 2");
    if (ds.n_rows() == 0) throw EmptyDataset("cannot fit discretizer on empty data");
    Discretizer disc;
    for (int attr : numeric_attrs) {
        if (ds.schema.attributes[static_cast<size_t>(attr)].kind != AttrKind::Numeric)
            throw SchemaMismatch("attribute " + ds.schema.attributes[static_cast<size_t>(attr)].name +
                                 " is not numeric");
        std::vector<double> sorted;
        sorted.reserve(ds.n_rows());
        for (const auto& row : ds.rows) sorted.push_back(row[static_cast<size_t>(attr)]);
        std::sort(sorted.begin(), sorted.end());

        std::vector<double> cuts;
        size_t n = sorted.size();
        for (int j = 1; j < bins; ++j) {
            // linear-interpolation quantile at q = j/bins
            double h = (static_cast<double>(n) - 1.0) * static_cast<double>(j) / bins;
            size_t lo = static_cast<size_t>(std::floor(h));
            double fracpart = h - std::floor(h);
            double q = sorted[lo];
            if (lo + 1 < n) q += fracpart * (sorted[lo + 1] - sorted[lo]);
            // keep the cut only if it separates something: strictly increasing
            // and below the maximum (a cut at the max leaves its upper bin empty)
            if ((cuts.empty() || q > cuts.back()) && q < sorted.back()) cuts.push_back(q);
        }
        if (cuts.empty())
            disc.warnings.push_back("attribute " +
                                    ds.schema.attributes[static_cast<size_t>(attr)].name +
                                    " is constant; single bin");
        disc.cutpoints[attr] = std::move(cuts);
    }
    return disc;
}

int discretize_value(const std::vector<double>& cuts, double v) {
    int bin = 0;
    for (double c : cuts) {
        if (v > c) ++bin;
        else break;
    }
    return bin;
}

Dataset apply_discretizer(const Dataset& ds, const Discretizer& disc) {
    Dataset out = ds;
    for (const auto& [attr, cuts] : disc.cutpoints) {
        Attribute& a = out.schema.attributes[static_cast<size_t>(attr)];
        a.kind = AttrKind::Nominal;
        a.values.clear();
        for (size_t b = 0; b <= cuts.size(); ++b) a.values.push_back("b" + std::to_string(b));
        for (auto& row : out.rows)
            row[static_cast<size_t>(attr)] = discretize_value(cuts, row[static_cast<size_t>(attr)]);
    }
    return out;
}

nlohmann::ordered_json Discretizer::to_json() const {
    nlohmann::ordered_json j;
    nlohmann::ordered_json cp = nlohmann::ordered_json::object();
    for (const auto& [attr, cuts] : cutpoints) cp[std::to_string(attr)] = cuts;
    j["cutpoints"] = std::move(cp);
    j["warnings"] = warnings;
    return j;
}

Discretizer Discretizer::from_json(const nlohmann::json& j) {
    Discretizer d;
    for (const auto& [key, cuts] : j.at("cutpoints").items())
        d.cutpoints[std::stoi(key)] = cuts.get<std::vector<double>>();
    d.warnings = j.at("warnings").get<std::vector<std::string>>();
    return d;
}

}  // namespace maltls
