#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace maltls {

enum class AttrKind { Nominal, Numeric };

struct Attribute {
    std::string name;
    AttrKind kind = AttrKind::Nominal;
    // Nominal value universe in index order. An empty list on a nominal
    // attribute means "open": the CSV loader collects observed values.
    std::vector<std::string> values;

    int value_index(const std::string& v) const;
    bool operator==(const Attribute&) const = default;
};

struct Schema {
    std::string version;
    std::vector<Attribute> attributes;
    std::array<std::string, 2> label_values = {"benign", "malicious"};

    int index_of(const std::string& name) const;
    bool operator==(const Schema&) const = default;

    nlohmann::ordered_json to_json() const;
    static Schema from_json(const nlohmann::json& j);
};

// Rows are stored as doubles: numeric attributes hold the raw value,
// nominal attributes hold the value index.
struct Dataset {
    Schema schema;
    std::vector<std::vector<double>> rows;
    std::vector<uint8_t> labels;  // index into schema.label_values

    size_t n_rows() const { return rows.size(); }
    size_t n_attrs() const { return schema.attributes.size(); }
    int nominal_value(size_t row, size_t attr) const {
        return static_cast<int>(rows[row][attr]);
    }
};

// CSV: header row, one value per attribute, label column last. Values are
// quoted when they contain commas or quotes.
Dataset dataset_from_csv(const std::string& text, std::optional<Schema> expected = std::nullopt);
std::string dataset_to_csv(const Dataset& ds);

// Feature-only CSV (no label column), used by the featurize command.
std::string cells_to_csv(const Schema& schema, const std::vector<std::vector<std::string>>& rows);

struct SplitIndices {
    std::vector<size_t> train;
    std::vector<size_t> test;
};

// Seeded, label-stratified split; train gets round(fraction * n) rows and
// every class is represented within one row of its exact share.
SplitIndices split_train_test(const Dataset& ds, double fraction, uint32_t seed);
Dataset subset(const Dataset& ds, const std::vector<size_t>& indices);

struct Discretizer {
    // schema index -> strictly increasing cut points
    std::map<int, std::vector<double>> cutpoints;
    std::vector<std::string> warnings;

    nlohmann::ordered_json to_json() const;
    static Discretizer from_json(const nlohmann::json& j);
};

// Equal-frequency cut points learned from `ds` for the given attributes.
// A constant column degenerates to a single bin with a warning.
Discretizer fit_discretizer(const Dataset& ds, const std::vector<int>& numeric_attrs, int bins);

// Maps the discretized attributes to nominal bin labels b0..bk; values
// beyond the training extremes clamp into the first/last bin.
Dataset apply_discretizer(const Dataset& ds, const Discretizer& disc);
int discretize_value(const std::vector<double>& cuts, double v);

}  // namespace maltls
