#include "lupisvm/tuning.hpp"

#include "lupisvm/format.hpp"

#include <cstdio>
#include <ostream>

namespace lupisvm {

std::vector<double> default_regularization_grid() {
    return { 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3 };
}

TuneResult tune(const LupiDataset &data, const Method m, const Hyperparameters &base, const TuneOptions &options) {
    const auto [train, held] = holdout_split(data, options.holdout, options.seed);
    const std::vector<double> lambdas = uses_privileged(m) ? options.grid : std::vector<double>{ 0.0 };

    TuneResult result;
    result.method = m;
    bool have_best = false;
    for (const double c : options.grid) {
        for (const double lambda : lambdas) {
            Hyperparameters hp = base;
            hp.c = c;
            if (uses_privileged(m)) {
                hp.lambda = lambda;
            }
            const auto model = train_one_vs_rest(train, hp, m, options.jobs);
            const auto predicted = predict(model, held.x);
            GridPoint point{ c, lambda, accuracy(predicted, held.y), model.converged() };
            result.grid.push_back(point);
            // ascending grids make "strictly better" implement the tie rule
            if (!have_best || point.accuracy > result.best.accuracy) {
                result.best = point;
                have_best = true;
            }
        }
    }
    return result;
}

void write_tune_table(std::ostream &out, const TuneResult &result) {
    out << "method " << to_string(result.method) << '\n';
    out << "C,lambda,holdout_accuracy,converged\n";
    for (const auto &p : result.grid) {
        char acc[32];
        std::snprintf(acc, sizeof acc, "%.2f", p.accuracy);
        out << format_double(p.c) << ',' << format_double(p.lambda) << ',' << acc << ',' << (p.converged ? 1 : 0) << '\n';
    }
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.2f", result.best.accuracy);
    out << "best C=" << format_double(result.best.c);
    if (uses_privileged(result.method)) {
        out << " lambda=" << format_double(result.best.lambda);
    }
    out << " accuracy=" << acc << '\n';
}

}  // namespace lupisvm
