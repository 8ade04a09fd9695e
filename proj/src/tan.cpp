#include "maltls/tan.hpp"

#include <algorithm>
#include <cmath>

#include "maltls/errors.hpp"
#include "maltls/kernels.hpp"

namespace maltls {

namespace {

size_t arity_of(const Schema& schema, size_t attr) {
    return schema.attributes[attr].values.size();
}

}  // namespace

std::vector<std::pair<int, int>> max_spanning_tree(const std::vector<std::vector<double>>& w) {
    size_t k = w.size();
    std::vector<std::pair<int, int>> edges;
    if (k < 2) return edges;

    std::vector<bool> in_tree(k, false);
    std::vector<double> best_w(k, -1.0);
    std::vector<int> best_from(k, -1);
    in_tree[0] = true;
    for (size_t j = 1; j < k; ++j) {
        best_w[j] = w[0][j];
        best_from[j] = 0;
    }
    for (size_t step = 1; step < k; ++step) {
        int pick = -1;
        for (size_t j = 0; j < k; ++j) {
            if (in_tree[j]) continue;
            if (pick < 0 || best_w[j] > best_w[static_cast<size_t>(pick)]) pick = static_cast<int>(j);
        }
        in_tree[static_cast<size_t>(pick)] = true;
        edges.emplace_back(best_from[static_cast<size_t>(pick)], pick);
        for (size_t j = 0; j < k; ++j) {
            if (in_tree[j]) continue;
            if (w[static_cast<size_t>(pick)][j] > best_w[j]) {
                best_w[j] = w[static_cast<size_t>(pick)][j];
                best_from[j] = pick;
            }
        }
    }
    return edges;
}

TanBayesModel tan_train(const Dataset& ds, const TanParams& params) {
    if (ds.n_rows() == 0) throw EmptyDataset("cannot train on empty dataset");
    for (const Attribute& a : ds.schema.attributes)
        if (a.kind != AttrKind::Nominal)
            throw SchemaMismatch("attribute " + a.name + " must be nominal; discretize first");
    if (!(params.alpha > 0.0)) throw Error("alpha must be positive");

    size_t k = ds.n_attrs();
    TanBayesModel model;
    model.schema = ds.schema;
    model.alpha = params.alpha;
    model.seed = params.seed;
    model.parent.assign(k, -1);

    // attribute tree: maximum spanning tree over CMI, rooted at attribute 0
    if (k >= 2) {
        auto cmi = cmi_matrix(ds);
        for (auto [a, b] : max_spanning_tree(cmi)) {
            // Prim's grows from the root, so `a` is already in the tree
            model.parent[static_cast<size_t>(b)] = a;
        }
    }

    for (size_t c = 0; c < 2; ++c) model.class_counts[c] = 0.0;
    for (uint8_t lab : ds.labels) model.class_counts[lab] += 1.0;

    model.counts.resize(k);
    for (size_t a = 0; a < k; ++a) {
        size_t ar = arity_of(model.schema, a);
        size_t par = model.parent[a] >= 0 ? arity_of(model.schema, static_cast<size_t>(model.parent[a])) : 1;
        model.counts[a].assign(par * ar * 2, 0.0);
    }
    for (size_t r = 0; r < ds.n_rows(); ++r) {
        size_t c = ds.labels[r];
        for (size_t a = 0; a < k; ++a) {
            size_t ar = arity_of(model.schema, a);
            size_t v = static_cast<size_t>(ds.nominal_value(r, a));
            size_t pv = model.parent[a] >= 0
                            ? static_cast<size_t>(ds.nominal_value(r, static_cast<size_t>(model.parent[a])))
                            : 0;
            model.counts[a][(pv * ar + v) * 2 + c] += 1.0;
        }
    }
    return model;
}

double TanBayesModel::class_prior(size_t c) const {
    double total = class_counts[0] + class_counts[1];
    return (class_counts[c] + alpha) / (total + 2.0 * alpha);
}

double TanBayesModel::cpt(size_t attr, size_t pv, size_t v, size_t c) const {
    size_t ar = arity_of(schema, attr);
    double denom = 0.0;
    for (size_t x = 0; x < ar; ++x) denom += counts[attr][(pv * ar + x) * 2 + c];
    return (counts[attr][(pv * ar + v) * 2 + c] + alpha) / (denom + alpha * static_cast<double>(ar));
}

Posterior tan_predict(const TanBayesModel& model, std::span<const double> row) {
    size_t k = model.schema.attributes.size();
    if (row.size() != k) throw SchemaMismatch("instance width does not match schema");

    std::array<double, 2> logp{};
    for (size_t c = 0; c < 2; ++c) logp[c] = std::log(model.class_prior(c));
    for (size_t a = 0; a < k; ++a) {
        size_t ar = arity_of(model.schema, a);
        double dv = row[a];
        if (!(dv >= 0.0) || static_cast<size_t>(dv) >= ar)
            throw SchemaMismatch("attribute " + model.schema.attributes[a].name +
                                 ": value index out of range");
        size_t v = static_cast<size_t>(dv);
        size_t pv = 0;
        if (model.parent[a] >= 0) {
            size_t pa = static_cast<size_t>(model.parent[a]);
            pv = static_cast<size_t>(row[pa]);
            if (pv >= arity_of(model.schema, pa))
                throw SchemaMismatch("parent value index out of range");
        }
        for (size_t c = 0; c < 2; ++c) logp[c] += std::log(model.cpt(a, pv, v, c));
    }

    // normalize in log space
    double mx = std::max(logp[0], logp[1]);
    double e0 = std::exp(logp[0] - mx);
    double e1 = std::exp(logp[1] - mx);
    Posterior post;
    post.posterior = {e0 / (e0 + e1), e1 / (e0 + e1)};
    // ties break toward the positive (malicious) class
    post.label = post.posterior[1] >= post.posterior[0] ? 1 : 0;
    return post;
}

std::vector<Posterior> tan_predict_all_serial(const TanBayesModel& model, const Dataset& ds) {
    std::vector<Posterior> out(ds.n_rows());
    for (size_t r = 0; r < ds.n_rows(); ++r) out[r] = tan_predict(model, ds.rows[r]);
    return out;
}

std::vector<Posterior> tan_predict_all(const TanBayesModel& model, const Dataset& ds) {
    std::vector<Posterior> out(ds.n_rows());
#pragma omp parallel for schedule(static)
    for (size_t r = 0; r < ds.n_rows(); ++r) out[r] = tan_predict(model, ds.rows[r]);
    return out;
}

nlohmann::ordered_json TanBayesModel::to_json() const {
    nlohmann::ordered_json j;
    j["model_type"] = "tan";
    j["schema"] = schema.to_json();
    j["alpha"] = alpha;
    j["seed"] = seed;
    j["parent"] = parent;
    j["class_counts"] = class_counts;
    j["counts"] = counts;
    return j;
}

TanBayesModel TanBayesModel::from_json(const nlohmann::json& j) {
    if (j.at("model_type").get<std::string>() != "tan") throw Error("not a tan model");
    TanBayesModel model;
    model.schema = Schema::from_json(j.at("schema"));
    model.alpha = j.at("alpha").get<double>();
    model.seed = j.at("seed").get<uint32_t>();
    model.parent = j.at("parent").get<std::vector<int>>();
    auto cc = j.at("class_counts");
    model.class_counts = {cc.at(0).get<double>(), cc.at(1).get<double>()};
    model.counts = j.at("counts").get<std::vector<std::vector<double>>>();
    return model;
}

}  // namespace maltls
