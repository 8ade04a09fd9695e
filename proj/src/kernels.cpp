#include "maltls/kernels.hpp"

#include <cmath>

#include "maltls/errors.hpp"

namespace maltls {

namespace {

size_t arity(const Dataset& ds, int attr) {
    const Attribute& a = ds.schema.attributes[static_cast<size_t>(attr)];
    if (a.kind != AttrKind::Nominal)
        throw SchemaMismatch("attribute " + a.name + " must be nominal here");
    return a.values.size();
}

}  // namespace

double entropy_bits(std::span<const double> counts) {
    double total = 0.0;
    for (double c : counts) total += c;
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (double c : counts) {
        if (c <= 0.0) continue;
        double p = c / total;
        h -= p * std::log2(p);
    }
    return h;
}

SplitScore score_split(const Dataset& ds, std::span<const size_t> rows, int attr) {
    size_t k = arity(ds, attr);
    std::vector<double> class_counts(2, 0.0);
    std::vector<double> value_counts(k, 0.0);
    std::vector<double> joint(k * 2, 0.0);  // value-major

    for (size_t r : rows) {
        int v = ds.nominal_value(r, static_cast<size_t>(attr));
        int c = ds.labels[r];
        class_counts[static_cast<size_t>(c)] += 1.0;
        value_counts[static_cast<size_t>(v)] += 1.0;
        joint[static_cast<size_t>(v) * 2 + static_cast<size_t>(c)] += 1.0;
    }
    double n = static_cast<double>(rows.size());
    if (n == 0.0) return {};

    double base = entropy_bits(class_counts);
    double cond = 0.0;
    for (size_t v = 0; v < k; ++v) {
        if (value_counts[v] <= 0.0) continue;
        cond += value_counts[v] / n * entropy_bits(std::span<const double>{&joint[v * 2], 2});
    }
    SplitScore s;
    s.gain = base - cond;
    s.split_info = entropy_bits(value_counts);
    s.gain_ratio = s.split_info > 0.0 ? s.gain / s.split_info : 0.0;
    return s;
}

std::vector<SplitScore> score_splits_serial(const Dataset& ds, std::span<const size_t> rows,
                                            const std::vector<int>& attrs) {
    std::vector<SplitScore> out(attrs.size());
    for (size_t i = 0; i < attrs.size(); ++i) out[i] = score_split(ds, rows, attrs[i]);
    return out;
}

std::vector<SplitScore> score_splits_parallel(const Dataset& ds, std::span<const size_t> rows,
                                              const std::vector<int>& attrs) {
    std::vector<SplitScore> out(attrs.size());
#pragma omp parallel for schedule(dynamic)
    for (size_t i = 0; i < attrs.size(); ++i) out[i] = score_split(ds, rows, attrs[i]);
    return out;
}

std::vector<SplitScore> score_splits(const Dataset& ds, std::span<const size_t> rows,
                                     const std::vector<int>& attrs) {
#ifdef _OPENMP
    return score_splits_parallel(ds, rows, attrs);
#else
    return score_splits_serial(ds, rows, attrs);
#endif
}

double conditional_mutual_information(const Dataset& ds, int a, int b) {
    if (a == b) return 0.0;
    size_t ka = arity(ds, a), kb = arity(ds, b);
    size_t n = ds.n_rows();
    if (n == 0) return 0.0;

    std::vector<double> joint(ka * kb * 2, 0.0);   // [va][vb][c]
    std::vector<double> ac(ka * 2, 0.0);           // [va][c]
    std::vector<double> bc(kb * 2, 0.0);           // [vb][c]
    std::vector<double> cc(2, 0.0);

    for (size_t r = 0; r < n; ++r) {
        size_t va = static_cast<size_t>(ds.nominal_value(r, static_cast<size_t>(a)));
        size_t vb = static_cast<size_t>(ds.nominal_value(r, static_cast<size_t>(b)));
        size_t c = ds.labels[r];
        joint[(va * kb + vb) * 2 + c] += 1.0;
        ac[va * 2 + c] += 1.0;
        bc[vb * 2 + c] += 1.0;
        cc[c] += 1.0;
    }

    double total = static_cast<double>(n);
    double cmi = 0.0;
    for (size_t va = 0; va < ka; ++va) {
        for (size_t vb = 0; vb < kb; ++vb) {
            for (size_t c = 0; c < 2; ++c) {
                double nabc = joint[(va * kb + vb) * 2 + c];
                if (nabc <= 0.0) continue;
                // I += P(a,b,c) log2( P(a,b|c) / (P(a|c) P(b|c)) )
                double ratio = nabc * cc[c] / (ac[va * 2 + c] * bc[vb * 2 + c]);
                cmi += nabc / total * std::log2(ratio);
            }
        }
    }
    return cmi;
}

std::vector<std::vector<double>> cmi_matrix_serial(const Dataset& ds) {
    size_t k = ds.n_attrs();
    std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = i + 1; j < k; ++j) {
            double v = conditional_mutual_information(ds, static_cast<int>(i), static_cast<int>(j));
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    return m;
}

std::vector<std::vector<double>> cmi_matrix_parallel(const Dataset& ds) {
    size_t k = ds.n_attrs();
    // flatten the upper triangle so the loop balances across threads
    std::vector<std::pair<size_t, size_t>> pairs;
    pairs.reserve(k * (k - 1) / 2);
    for (size_t i = 0; i < k; ++i)
        for (size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);

    std::vector<double> values(pairs.size(), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (size_t p = 0; p < pairs.size(); ++p)
        values[p] = conditional_mutual_information(ds, static_cast<int>(pairs[p].first),
                                                   static_cast<int>(pairs[p].second));

    std::vector<std::vector<double>> m(k, std::vector<double>(k, 0.0));
    for (size_t p = 0; p < pairs.size(); ++p) {
        m[pairs[p].first][pairs[p].second] = values[p];
        m[pairs[p].second][pairs[p].first] = values[p];
    }
    return m;
}

std::vector<std::vector<double>> cmi_matrix(const Dataset& ds) {
#ifdef _OPENMP
    return cmi_matrix_parallel(ds);
#else
    return cmi_matrix_serial(ds);
#endif
}

}  // namespace maltls
