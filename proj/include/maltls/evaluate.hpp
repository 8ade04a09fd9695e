#pragma once

#include <cstddef>

#include <json.hpp>

#include "maltls/c45.hpp"
#include "maltls/tan.hpp"

namespace maltls {

// malicious (label index 1) is the positive class
struct Confusion {
    size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    Confusion confusion;

    nlohmann::ordered_json to_json() const;
};

Metrics metrics_from_confusion(const Confusion& c);
Metrics evaluate_predictions(const std::vector<int>& predicted, const std::vector<uint8_t>& actual);
Metrics evaluate_c45(const DecisionTreeModel& model, const Dataset& test);
Metrics evaluate_tan(const TanBayesModel& model, const Dataset& test);

}  // namespace maltls
