// Compares the serial reference kernels against their OpenMP versions on a
// synthetic nominal dataset sized like a large phase-2 corpus.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "maltls/kernels.hpp"
#include "maltls/tan.hpp"

using namespace maltls;

namespace {

Dataset make_dataset(size_t rows, size_t attrs, size_t arity, uint32_t seed) {
    Dataset ds;
    ds.schema.version = "bench";
    for (size_t a = 0; a < attrs; ++a) {
        Attribute attr;
        attr.name = "a" + std::to_string(a);
        attr.kind = AttrKind::Nominal;
        for (size_t v = 0; v < arity; ++v) attr.values.push_back("v" + std::to_string(v));
        ds.schema.attributes.push_back(std::move(attr));
    }
    std::mt19937 rng(seed);
    std::uniform_int_distribution<size_t> val(0, arity - 1);
    for (size_t r = 0; r < rows; ++r) {
        std::vector<double> row(attrs);
        uint8_t label = static_cast<uint8_t>(rng() & 1);
        for (size_t a = 0; a < attrs; ++a) {
            // couple attributes to the label so the kernels do real work
            size_t v = (val(rng) + (label ? a % arity : 0)) % arity;
            row[a] = static_cast<double>(v);
        }
        ds.rows.push_back(std::move(row));
        ds.labels.push_back(label);
    }
    return ds;
}

template <typename F>
double time_ms(F&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-24s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
    size_t rows = argc > 1 ? std::stoul(argv[1]) : 20000;
    size_t attrs = argc > 2 ? std::stoul(argv[2]) : 45;

#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: not compiled in (both columns run serial code)\n");
#endif
    std::printf("dataset: %zu rows x %zu attributes\n\n", rows, attrs);
    std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    Dataset ds = make_dataset(rows, attrs, 8, 1234);
    std::vector<size_t> all_rows(ds.n_rows());
    for (size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;
    std::vector<int> all_attrs(ds.n_attrs());
    for (size_t i = 0; i < all_attrs.size(); ++i) all_attrs[i] = static_cast<int>(i);

    {
        std::vector<SplitScore> a, b;
        double s = time_ms([&] { a = score_splits_serial(ds, all_rows, all_attrs); });
        double p = time_ms([&] { b = score_splits_parallel(ds, all_rows, all_attrs); });
        report("score_splits", s, p);
    }
    {
        std::vector<std::vector<double>> a, b;
        double s = time_ms([&] { a = cmi_matrix_serial(ds); });
        double p = time_ms([&] { b = cmi_matrix_parallel(ds); });
        report("cmi_matrix", s, p);
    }
    {
        TanParams params;
        TanBayesModel model = tan_train(ds, params);
        std::vector<Posterior> a, b;
        double s = time_ms([&] { a = tan_predict_all_serial(model, ds); });
        double p = time_ms([&] { b = tan_predict_all(model, ds); });
        report("tan_predict_all", s, p);
    }
    return 0;
}
