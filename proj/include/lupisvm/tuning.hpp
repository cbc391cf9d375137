#ifndef LUPISVM_TUNING_HPP
#define LUPISVM_TUNING_HPP

#include "lupisvm/data.hpp"
#include "lupisvm/trainers.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace lupisvm {

/// {1e-3, 1e-2, ..., 1e3}
[[nodiscard]] std::vector<double> default_regularization_grid();

struct GridPoint {
    double c{ 0.0 };
    double lambda{ 0.0 };  ///< 0 for plain SVM
    double accuracy{ 0.0 };
    bool converged{ true };
};

struct TuneResult {
    Method method{ Method::svm_hinge };
    std::vector<GridPoint> grid;
    GridPoint best;
};

struct TuneOptions {
    double holdout{ 0.3 };
    std::uint64_t seed{ 1 };
    std::size_t jobs{ 1 };
    std::vector<double> grid{ default_regularization_grid() };
};

/// Grid search over C (and lambda for the privileged methods) on a stratified, seeded
/// holdout split. Highest holdout accuracy wins; ties go to smaller C, then smaller lambda.
[[nodiscard]] TuneResult tune(const LupiDataset &data, Method m, const Hyperparameters &base, const TuneOptions &options);

void write_tune_table(std::ostream &out, const TuneResult &result);

}  // namespace lupisvm

#endif  // LUPISVM_TUNING_HPP
