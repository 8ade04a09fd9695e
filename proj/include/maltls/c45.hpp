#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "maltls/dataset.hpp"

namespace maltls {

struct C45Params {
    size_t min_leaf = 2;      // do not split below this many rows
    double pruning_cf = 0.0;  // pessimistic-error confidence factor; 0 disables pruning
    uint32_t seed = 0;        // recorded in the model for provenance
};

struct TreeNode {
    int split_attr = -1;  // -1 marks a leaf
    std::vector<std::unique_ptr<TreeNode>> children;  // one per nominal value
    int majority = 0;
    std::array<double, 2> class_counts{};  // rows that reached this node

    bool is_leaf() const { return split_attr < 0; }
};

struct DecisionTreeModel {
    Schema schema;
    std::unique_ptr<TreeNode> root;
    C45Params params;
    bool pruned = false;

    nlohmann::ordered_json to_json() const;
    static DecisionTreeModel from_json(const nlohmann::json& j);
};

struct Prediction {
    int label = 0;
    double confidence = 0.0;
};

// Recursive multiway C4.5: split on the best gain ratio among attributes
// with at least average gain; stop on purity, exhausted attributes or
// min_leaf. All attributes must be nominal (discretize first).
DecisionTreeModel c45_train(const Dataset& ds, const C45Params& params);

Prediction c45_predict(const DecisionTreeModel& model, std::span<const double> row);
std::vector<Prediction> c45_predict_all_serial(const DecisionTreeModel& model, const Dataset& ds);
std::vector<Prediction> c45_predict_all(const DecisionTreeModel& model, const Dataset& ds);

}  // namespace maltls
