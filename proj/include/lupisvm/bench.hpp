#ifndef LUPISVM_BENCH_HPP
#define LUPISVM_BENCH_HPP

#include "lupisvm/data.hpp"
#include "lupisvm/trainers.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace lupisvm {

struct BenchConfig {
    std::vector<std::size_t> sizes{ 100, 200, 400 };
    std::size_t seeds{ 5 };
    std::uint64_t base_seed{ 1 };
    /// Template for the synthetic data; n and seed are overridden per run.
    SynthSpec synth{ .n = 100, .n_test = 1000, .d = 10, .flip_probability = 0.15 };
    Hyperparameters hp{};
    std::vector<Method> methods{ Method::svm_hinge, Method::svm1plus, Method::svm2plus };
};

struct BenchRow {
    Method method{ Method::svm_hinge };
    std::size_t n{ 0 };
    std::uint64_t seed{ 0 };
    double cpu_seconds{ 0.0 };
    double wall_seconds{ 0.0 };
    double accuracy{ 0.0 };
    bool converged{ true };
};

struct BenchSummary {
    Method method{ Method::svm_hinge };
    std::size_t n{ 0 };
    std::size_t runs{ 0 };
    std::size_t converged_runs{ 0 };
    /// Timing statistics over converged runs only.
    double cpu_mean{ 0.0 };
    double cpu_stddev{ 0.0 };
    double wall_mean{ 0.0 };
    double wall_stddev{ 0.0 };
    double accuracy_mean{ 0.0 };
};

struct BenchSpeedup {
    std::size_t n{ 0 };
    Method slower{ Method::svm1plus };
    Method faster{ Method::svm2plus };
    /// mean CPU(slower) / mean CPU(faster); NaN when either has no converged run.
    double cpu_ratio{ 0.0 };
    double wall_ratio{ 0.0 };
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<BenchSummary> summaries;
    std::vector<BenchSpeedup> speedups;
};

/// Times one training run: kernel construction plus the solve; data generation excluded.
[[nodiscard]] BenchRow time_training(Method m, const SynthData &data, const Hyperparameters &hp);

[[nodiscard]] BenchReport run_bench(const BenchConfig &config);
[[nodiscard]] BenchReport summarize(std::vector<BenchRow> rows, const std::vector<Method> &methods);

/// Header line plus one line per run; 7 columns.
void write_bench_csv(std::ostream &out, const BenchReport &report);
void write_bench_table(std::ostream &out, const BenchReport &report);

}  // namespace lupisvm

#endif  // LUPISVM_BENCH_HPP
