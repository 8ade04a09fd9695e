#include "maltls/evaluate.hpp"

#include "maltls/errors.hpp"

namespace maltls {

Metrics metrics_from_confusion(const Confusion& c) {
    Metrics m;
    m.confusion = c;
    double total = static_cast<double>(c.tp + c.fp + c.fn + c.tn);
    if (total == 0.0) throw EmptyDataset("cannot evaluate on empty test set");
    m.accuracy = static_cast<double>(c.tp + c.tn) / total;
    m.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    m.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                        : 0.0;
    return m;
}

Metrics evaluate_predictions(const std::vector<int>& predicted, const std::vector<uint8_t>& actual) {
    if (predicted.size() != actual.size()) throw Error("prediction/label size mismatch");
    Confusion c;
    for (size_t i = 0; i < predicted.size(); ++i) {
        bool pred_pos = predicted[i] == 1;
        bool is_pos = actual[i] == 1;
        if (pred_pos && is_pos) ++c.tp;
        else if (pred_pos && !is_pos) ++c.fp;
        else if (!pred_pos && is_pos) ++c.fn;
        else ++c.tn;
    }
    return metrics_from_confusion(c);
}

Metrics evaluate_c45(const DecisionTreeModel& model, const Dataset& test) {
    std::vector<int> pred;
    pred.reserve(test.n_rows());
    for (const Prediction& p : c45_predict_all(model, test)) pred.push_back(p.label);
    return evaluate_predictions(pred, test.labels);
}

Metrics evaluate_tan(const TanBayesModel& model, const Dataset& test) {
    std::vector<int> pred;
    pred.reserve(test.n_rows());
    for (const Posterior& p : tan_predict_all(model, test)) pred.push_back(p.label);
    return evaluate_predictions(pred, test.labels);
}

nlohmann::ordered_json Metrics::to_json() const {
    nlohmann::ordered_json j;
    j["accuracy"] = accuracy;
    j["precision"] = precision;
    j["recall"] = recall;
    j["f1"] = f1;
    j["confusion"] = {{"tp", confusion.tp}, {"fp", confusion.fp}, {"fn", confusion.fn}, {"tn", confusion.tn}};
    return j;
}

}  // namespace maltls
