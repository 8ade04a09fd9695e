#include "maltls/c45.hpp"

#include <algorithm>
#include <cmath>

#include "maltls/errors.hpp"
#include "maltls/kernels.hpp"

namespace maltls {

namespace {

constexpr double kGainEps = 1e-12;

std::array<double, 2> count_classes(const Dataset& ds, std::span<const size_t> rows) {
    std::array<double, 2> counts{};
    for (size_t r : rows) counts[ds.labels[r]] += 1.0;
    return counts;
}

int majority_of(const std::array<double, 2>& counts) {
    // ties break toward the positive class
    return counts[1] >= counts[0] ? 1 : 0;
}

std::unique_ptr<TreeNode> make_leaf(const std::array<double, 2>& counts, int fallback_majority) {
    auto leaf = std::make_unique<TreeNode>();
    leaf->class_counts = counts;
    leaf->majority = counts[0] + counts[1] > 0.0 ? majority_of(counts) : fallback_majority;
    if (counts[0] + counts[1] == 0.0) {
        // empty branch inherits the parent majority with a unit pseudo-count
        leaf->class_counts[static_cast<size_t>(fallback_majority)] = 1.0;
    }
    return leaf;
}

std::unique_ptr<TreeNode> build(const Dataset& ds, std::vector<size_t>& rows,
                                std::vector<int> active, const C45Params& params,
                                int parent_majority) {
    std::array<double, 2> counts = count_classes(ds, rows);
    if (rows.empty()) return make_leaf(counts, parent_majority);

    int majority = majority_of(counts);
    bool pure = counts[0] == 0.0 || counts[1] == 0.0;
    if (pure || active.empty() || rows.size() < params.min_leaf) return make_leaf(counts, majority);

    std::vector<SplitScore> scores = score_splits(ds, rows, active);
    double mean_gain = 0.0;
    for (const SplitScore& s : scores) mean_gain += s.gain;
    mean_gain /= static_cast<double>(scores.size());

    // best gain ratio among attributes with at least average gain; ties
    // resolve to the lowest schema index. Zero-gain splits stay allowed
    // (parity-style concepts only purify deeper down).
    int best = -1;
    double best_ratio = -1.0;
    for (size_t i = 0; i < active.size(); ++i) {
        if (scores[i].gain + kGainEps < mean_gain) continue;
        if (scores[i].gain_ratio > best_ratio + kGainEps) {
            best_ratio = scores[i].gain_ratio;
            best = static_cast<int>(i);
        }
    }
    if (best < 0) return make_leaf(counts, majority);

    int attr = active[static_cast<size_t>(best)];
    std::vector<int> remaining;
    for (int a : active)
        if (a != attr) remaining.push_back(a);

    size_t k = ds.schema.attributes[static_cast<size_t>(attr)].values.size();
    std::vector<std::vector<size_t>> partitions(k);
    for (size_t r : rows)
        partitions[static_cast<size_t>(ds.nominal_value(r, static_cast<size_t>(attr)))].push_back(r);

    auto node = std::make_unique<TreeNode>();
    node->split_attr = attr;
    node->majority = majority;
    node->class_counts = counts;
    for (size_t v = 0; v < k; ++v)
        node->children.push_back(build(ds, partitions[v], remaining, params, majority));
    return node;
}

// C4.5-style pessimistic error: upper confidence bound on the error rate
// of a leaf observing e errors out of n, at confidence factor cf.
double inverse_normal_upper(double cf) {
    // z with P(Z > z) = cf, via bisection on the complementary error function
    double lo = 0.0, hi = 8.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double tail = 0.5 * std::erfc(mid / std::sqrt(2.0));
        (tail > cf ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double pessimistic_errors(double n, double e, double z) {
    if (n <= 0.0) return 0.0;
    double f = e / n;
    double z2 = z * z;
    double ucb = (f + z2 / (2.0 * n) + z * std::sqrt(f / n - f * f / n + z2 / (4.0 * n * n))) /
                 (1.0 + z2 / n);
    return ucb * n;
}

// Replaces subtrees whose estimated error is no better than a leaf.
double prune(TreeNode& node, double z) {
    double n = node.class_counts[0] + node.class_counts[1];
    double leaf_errors =
        pessimistic_errors(n, n - node.class_counts[static_cast<size_t>(node.majority)], z);
    if (node.is_leaf()) return leaf_errors;

    double subtree_errors = 0.0;
    for (auto& child : node.children) subtree_errors += prune(*child, z);
    if (leaf_errors <= subtree_errors + 0.1) {
        node.split_attr = -1;
        node.children.clear();
        return leaf_errors;
    }
    return subtree_errors;
}

void node_to_json(const TreeNode& node, nlohmann::ordered_json& j) {
    j["counts"] = node.class_counts;
    j["majority"] = node.majority;
    if (node.is_leaf()) return;
    j["split_attr"] = node.split_attr;
    nlohmann::ordered_json children = nlohmann::ordered_json::array();
    for (const auto& child : node.children) {
        nlohmann::ordered_json cj;
        node_to_json(*child, cj);
        children.push_back(std::move(cj));
    }
    j["children"] = std::move(children);
}

std::unique_ptr<TreeNode> node_from_json(const nlohmann::json& j) {
    auto node = std::make_unique<TreeNode>();
    auto counts = j.at("counts");
    node->class_counts = {counts.at(0).get<double>(), counts.at(1).get<double>()};
    node->majority = j.at("majority").get<int>();
    if (j.contains("split_attr")) {
        node->split_attr = j.at("split_attr").get<int>();
        for (const auto& cj : j.at("children")) node->children.push_back(node_from_json(cj));
    }
    return node;
}

}  // namespace

DecisionTreeModel c45_train(const Dataset& ds, const C45Params& params) {
    if (ds.n_rows() == 0) throw EmptyDataset("cannot train on empty dataset");
    for (const Attribute& a : ds.schema.attributes)
        if (a.kind != AttrKind::Nominal)
            throw SchemaMismatch("attribute " + a.name + " must be nominal; discretize first");

    std::vector<size_t> rows(ds.n_rows());
    for (size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    std::vector<int> active(ds.n_attrs());
    for (size_t i = 0; i < active.size(); ++i) active[i] = static_cast<int>(i);

    DecisionTreeModel model;
    model.schema = ds.schema;
    model.params = params;
    std::array<double, 2> counts = count_classes(ds, rows);
    model.root = build(ds, rows, active, params, majority_of(counts));
    if (params.pruning_cf > 0.0) {
        prune(*model.root, inverse_normal_upper(params.pruning_cf));
        model.pruned = true;
    }
    return model;
}

Prediction c45_predict(const DecisionTreeModel& model, std::span<const double> row) {
    if (row.size() != model.schema.attributes.size())
        throw SchemaMismatch("instance width does not match schema");
    const TreeNode* node = model.root.get();
    while (!node->is_leaf()) {
        size_t attr = static_cast<size_t>(node->split_attr);
        int v = static_cast<int>(row[attr]);
        if (v < 0 || static_cast<size_t>(v) >= node->children.size()) break;  // unseen value
        node = node->children[static_cast<size_t>(v)].get();
    }
    double total = node->class_counts[0] + node->class_counts[1];
    double conf = total > 0.0 ? node->class_counts[static_cast<size_t>(node->majority)] / total : 0.5;
    return {node->majority, conf};
}

std::vector<Prediction> c45_predict_all_serial(const DecisionTreeModel& model, const Dataset& ds) {
    std::vector<Prediction> out(ds.n_rows());
    for (size_t r = 0; r < ds.n_rows(); ++r) out[r] = c45_predict(model, ds.rows[r]);
    return out;
}

std::vector<Prediction> c45_predict_all(const DecisionTreeModel& model, const Dataset& ds) {
    std::vector<Prediction> out(ds.n_rows());
#pragma omp parallel for schedule(static)
    for (size_t r = 0; r < ds.n_rows(); ++r) out[r] = c45_predict(model, ds.rows[r]);
    return out;
}

nlohmann::ordered_json DecisionTreeModel::to_json() const {
    nlohmann::ordered_json j;
    j["model_type"] = "c45";
    j["schema"] = schema.to_json();
    j["min_leaf"] = params.min_leaf;
    j["pruning_cf"] = params.pruning_cf;
    j["seed"] = params.seed;
    j["pruned"] = pruned;
    nlohmann::ordered_json tree;
    node_to_json(*root, tree);
    j["tree"] = std::move(tree);
    return j;
}

DecisionTreeModel DecisionTreeModel::from_json(const nlohmann::json& j) {
    if (j.at("model_type").get<std::string>() != "c45") throw Error("not a c45 model");
    DecisionTreeModel model;
    model.schema = Schema::from_json(j.at("schema"));
    model.params.min_leaf = j.at("min_leaf").get<size_t>();
    model.params.pruning_cf = j.at("pruning_cf").get<double>();
    model.params.seed = j.at("seed").get<uint32_t>();
    model.pruned = j.at("pruned").get<bool>();
    model.root = node_from_json(j.at("tree"));
    return model;
}

}  // namespace maltls
