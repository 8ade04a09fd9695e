#pragma once

#include <span>
#include <vector>

#include "maltls/dataset.hpp"

// Counting kernels shared by the two classifiers. Each kernel exists in a
// serial reference form and an OpenMP form; the parallel form computes
// every cell with the same inner loop, so results are bit-identical and
// the tests compare them exactly. The unsuffixed entry points dispatch to
// the parallel form when OpenMP is compiled in.
namespace maltls {

// -sum p log2 p over a histogram
double entropy_bits(std::span<const double> counts);

struct SplitScore {
    double gain = 0.0;
    double split_info = 0.0;
    double gain_ratio = 0.0;  // 0 when split_info is 0
};

// C4.5 split statistics of one nominal attribute over the given rows.
SplitScore score_split(const Dataset& ds, std::span<const size_t> rows, int attr);

std::vector<SplitScore> score_splits_serial(const Dataset& ds, std::span<const size_t> rows,
                                            const std::vector<int>& attrs);
std::vector<SplitScore> score_splits_parallel(const Dataset& ds, std::span<const size_t> rows,
                                              const std::vector<int>& attrs);
std::vector<SplitScore> score_splits(const Dataset& ds, std::span<const size_t> rows,
                                     const std::vector<int>& attrs);

// Class-conditional mutual information I(Xi; Xj | C) in bits, from
// empirical frequencies (no smoothing). Symmetric; diagonal is zero.
double conditional_mutual_information(const Dataset& ds, int a, int b);

std::vector<std::vector<double>> cmi_matrix_serial(const Dataset& ds);
std::vector<std::vector<double>> cmi_matrix_parallel(const Dataset& ds);
std::vector<std::vector<double>> cmi_matrix(const Dataset& ds);

}  // namespace maltls
