#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "maltls/dataset.hpp"

namespace maltls {

struct TanParams {
    double alpha = 1.0;  // Laplace smoothing
    uint32_t seed = 0;   // recorded in the model for provenance
};

// Tree-augmented naive Bayes: every attribute is conditioned on the class
// and on at most one other attribute; the attribute tree is the maximum
// spanning tree over class-conditional mutual information (Chow-Liu),
// rooted at the first attribute. The model stores raw counts; the
// probabilities are re-derived with Laplace smoothing at prediction time.
struct TanBayesModel {
    Schema schema;
    double alpha = 1.0;
    uint32_t seed = 0;
    std::vector<int> parent;                 // -1: class is the only parent
    std::array<double, 2> class_counts{};
    // counts[attr][(pv * arity + v) * 2 + c]; pv = 0 when parent is -1
    std::vector<std::vector<double>> counts;

    double class_prior(size_t c) const;
    // P(v | parent value pv, class c), Laplace-smoothed over the attribute arity
    double cpt(size_t attr, size_t pv, size_t v, size_t c) const;

    nlohmann::ordered_json to_json() const;
    static TanBayesModel from_json(const nlohmann::json& j);
};

struct Posterior {
    int label = 0;
    std::array<double, 2> posterior{};  // normalized, sums to 1
};

TanBayesModel tan_train(const Dataset& ds, const TanParams& params);

// Maximum-weight spanning tree over a symmetric weight matrix (Prim's,
// deterministic tie-breaking toward lower indices). Exposed for the
// brute-force equivalence tests.
std::vector<std::pair<int, int>> max_spanning_tree(const std::vector<std::vector<double>>& w);

Posterior tan_predict(const TanBayesModel& model, std::span<const double> row);
std::vector<Posterior> tan_predict_all_serial(const TanBayesModel& model, const Dataset& ds);
std::vector<Posterior> tan_predict_all(const TanBayesModel& model, const Dataset& ds);

}  // namespace maltls
