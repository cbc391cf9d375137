#include "lupisvm/cli.hpp"

#include "lupisvm/bench.hpp"
#include "lupisvm/data.hpp"
#include "lupisvm/error.hpp"
#include "lupisvm/format.hpp"
#include "lupisvm/model_io.hpp"
#include "lupisvm/trainers.hpp"
#include "lupisvm/tuning.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lupisvm {

namespace {

struct CommonFlags {
    std::string method;
    std::string data;
    std::string priv;
    std::string test;
    std::string model;
    std::string output;
    std::string kernel{ "linear" };
    std::string kernel_priv{ "linear" };
    double c{ 1.0 };
    double lambda{ 1.0 };
    std::optional<double> tol;
    std::optional<std::size_t> max_iter;
    std::uint64_t seed{ 1 };
    double holdout{ 0.3 };
    std::size_t jobs{ 1 };
};

struct GenFlags {
    std::string output{ "synth" };
    std::size_t n{ 100 };
    std::size_t n_test{ 1000 };
    std::size_t d{ 10 };
    double flip{ 0.0 };
    double noise{ 0.0 };
    double margin{ 0.0 };
    std::size_t priv_dim{ 1 };
    std::uint64_t seed{ 1 };
};

struct BenchFlags {
    std::vector<std::size_t> sizes{ 100, 200, 400 };
    std::size_t seeds{ 5 };
    std::size_t d{ 10 };
    std::size_t n_test{ 1000 };
    double flip{ 0.15 };
};

class usage_error : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_for(const errc code) {
    switch (code) {
        case errc::invalid_spec:
        case errc::invalid_hyperparameter:
            return exit_usage;
        case errc::not_converged:
            return exit_not_converged;
        default:
            return exit_data;
    }
}

Hyperparameters hyperparameters_from(const CommonFlags &f) {
    Hyperparameters hp;
    hp.c = f.c;
    hp.lambda = f.lambda;
    hp.kernel_main = parse_kernel_spec(f.kernel);
    hp.kernel_priv = parse_kernel_spec(f.kernel_priv);
    if (f.tol) {
        hp.smo.tolerance = *f.tol;
        hp.svm1plus.tolerance = *f.tol;
    }
    if (f.max_iter) {
        hp.smo.max_iterations = *f.max_iter;
        hp.svm1plus.max_iterations = *f.max_iter;
    }
    return hp;
}

LupiDataset load_training(const CommonFlags &f, const Method m) {
    if (f.data.empty()) {
        throw usage_error{ "--data is required" };
    }
    if (uses_privileged(m) && f.priv.empty()) {
        throw usage_error{ "--priv is required for " + std::string{ to_string(m) } };
    }
    LupiDataset data = load_sparse(f.data);
    if (!f.priv.empty()) {
        data.z = load_privileged(f.priv, data.size());
        for (const auto &r : *data.z) {
            data.dim_z = std::max(data.dim_z, r.extent());
        }
    }
    return data;
}

Method method_from(const CommonFlags &f) {
    if (f.method.empty()) {
        throw usage_error{ "--method is required" };
    }
    try {
        return parse_method(f.method);
    } catch (const error &e) {
        throw usage_error{ e.what() };
    }
}

void print_training_summary(std::ostream &out, const MulticlassModel &model) {
    const std::size_t trained = model.classes.size() == 2 ? 1 : model.classes.size();
    for (std::size_t ci = 0; ci < trained; ++ci) {
        const auto &d = model.binaries[ci].diagnostics;
        out << "class " << model.classes[ci] << ": dual_objective " << format_double(d.dual_objective)
            << " iterations " << d.iterations << " nsv " << model.binaries[ci].support_vectors.size()
            << (d.converged ? "" : " NOT CONVERGED") << '\n';
    }
}

int cmd_train(const CommonFlags &f, std::ostream &out, std::ostream &err) {
    const Method m = method_from(f);
    if (f.model.empty()) {
        throw usage_error{ "--model is required" };
    }
    const Hyperparameters hp = hyperparameters_from(f);
    hp.validate(m);
    const LupiDataset data = load_training(f, m);
    const MulticlassModel model = train_one_vs_rest(data, hp, m, f.jobs);
    print_training_summary(out, model);
    save_model(f.model, model);
    if (!model.converged()) {
        err << "warning: solver did not converge; model written and flagged\n";
        return exit_not_converged;
    }
    return exit_ok;
}

LupiDataset load_test(const CommonFlags &f, const MulticlassModel &model) {
    if (f.test.empty()) {
        throw usage_error{ "--test is required" };
    }
    LupiDataset test = load_sparse(f.test);
    const std::size_t dim = model.binaries.front().dim;
    if (test.dim_x > dim) {
        throw error{ errc::dimension_mismatch, "test features reach index " + std::to_string(test.dim_x) +
                                                   " but the model has " + std::to_string(dim) };
    }
    return test;
}

int cmd_predict(const CommonFlags &f, std::ostream &out) {
    if (f.model.empty()) {
        throw usage_error{ "--model is required" };
    }
    const MulticlassModel model = load_model(f.model);
    const LupiDataset test = load_test(f, model);
    const auto labels = predict(model, test.x);
    if (f.output.empty()) {
        for (const int l : labels) {
            out << l << '\n';
        }
        return exit_ok;
    }
    std::ofstream file{ f.output, std::ios::binary };
    if (!file) {
        throw error{ errc::io_error, "cannot write '" + f.output + "'" };
    }
    for (const int l : labels) {
        file << l << '\n';
    }
    return exit_ok;
}

int cmd_eval(const CommonFlags &f, std::ostream &out) {
    if (f.model.empty()) {
        throw usage_error{ "--model is required" };
    }
    const MulticlassModel model = load_model(f.model);
    const LupiDataset test = load_test(f, model);
    for (const int l : test.y) {
        if (std::find(model.classes.begin(), model.classes.end(), l) == model.classes.end()) {
            throw error{ errc::invalid_label, "test label " + std::to_string(l) + " is not a model class" };
        }
    }
    const auto labels = predict(model, test.x);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", accuracy(labels, test.y));
    out << buf << '\n';
    return exit_ok;
}

int cmd_tune(const CommonFlags &f, std::ostream &out) {
    const Method m = method_from(f);
    const Hyperparameters hp = hyperparameters_from(f);
    const LupiDataset data = load_training(f, m);
    TuneOptions options;
    options.holdout = f.holdout;
    options.seed = f.seed;
    options.jobs = f.jobs;
    const TuneResult result = tune(data, m, hp, options);
    write_tune_table(out, result);
    return exit_ok;
}

int cmd_gen(const GenFlags &g, std::ostream &out) {
    SynthSpec spec;
    spec.n = g.n;
    spec.n_test = g.n_test;
    spec.d = g.d;
    spec.flip_probability = g.flip;
    spec.privileged_noise = g.noise;
    spec.margin = g.margin;
    spec.privileged_dim = g.priv_dim;
    spec.seed = g.seed;
    const SynthData data = synth_lupi(spec);
    const std::string train_path = g.output + ".train.sp";
    const std::string priv_path = g.output + ".train.pv";
    const std::string test_path = g.output + ".test.sp";
    save_sparse(train_path, data.train.x, data.train.y);
    save_privileged(priv_path, *data.train.z);
    save_sparse(test_path, data.test.x, data.test.y);
    out << train_path << '\n' << priv_path << '\n' << test_path << '\n';
    return exit_ok;
}

int cmd_bench(const CommonFlags &f, const BenchFlags &b, std::ostream &out) {
    BenchConfig config;
    config.sizes = b.sizes;
    config.seeds = b.seeds;
    config.base_seed = f.seed;
    config.synth.d = b.d;
    config.synth.n_test = b.n_test;
    config.synth.flip_probability = b.flip;
    config.hp = hyperparameters_from(f);
    config.hp.validate(Method::svm2plus);
    const BenchReport report = run_bench(config);
    write_bench_table(out, report);
    if (f.output.empty()) {
        write_bench_csv(out, report);
    } else {
        std::ofstream file{ f.output, std::ios::binary };
        if (!file) {
            throw error{ errc::io_error, "cannot write '" + f.output + "'" };
        }
        write_bench_csv(file, report);
    }
    return exit_ok;
}

void add_hyperparameter_flags(CLI::App *cmd, CommonFlags &f) {
    cmd->add_option("--kernel", f.kernel, "main kernel: linear | rbf:g | poly:deg:g:coef0")->capture_default_str();
    cmd->add_option("--kernel-priv", f.kernel_priv, "privileged kernel, same syntax")->capture_default_str();
    cmd->add_option("--c", f.c, "regularization C")->capture_default_str();
    cmd->add_option("--lambda", f.lambda, "privileged regularization lambda")->capture_default_str();
    cmd->add_option("--tol", f.tol, "solver tolerance (SMO default 1e-3; SVM1+ default 1e-9 relative change)");
    cmd->add_option("--max-iter", f.max_iter, "iteration cap (defaults: 1e7 SMO updates, 1e5 PG iterations)");
}

}  // namespace

int run_cli(const int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{ "lupisvm: SVM, SVM1+ and SVM2+ training with privileged information" };
    app.require_subcommand(1);
    CommonFlags f;
    GenFlags g;
    BenchFlags b;

    auto *train = app.add_subcommand("train", "train a model");
    train->add_option("--method", f.method, "svm | svm1plus | svm2plus");
    train->add_option("--data", f.data, "main-feature training file");
    train->add_option("--priv", f.priv, "privileged-feature file aligned with --data");
    train->add_option("--model", f.model, "output model file");
    train->add_option("--jobs", f.jobs, "threads for per-class training")->capture_default_str();
    add_hyperparameter_flags(train, f);

    auto *predict_cmd = app.add_subcommand("predict", "write one predicted label per line");
    predict_cmd->add_option("--model", f.model, "model file");
    predict_cmd->add_option("--test", f.test, "test file");
    predict_cmd->add_option("--output", f.output, "predictions file (stdout when omitted)");

    auto *eval = app.add_subcommand("eval", "print test accuracy in percent");
    eval->add_option("--model", f.model, "model file");
    eval->add_option("--test", f.test, "labeled test file");

    auto *tune_cmd = app.add_subcommand("tune", "grid search C (and lambda) on a holdout split");
    tune_cmd->add_option("--method", f.method, "svm | svm1plus | svm2plus");
    tune_cmd->add_option("--data", f.data, "main-feature training file");
    tune_cmd->add_option("--priv", f.priv, "privileged-feature file");
    tune_cmd->add_option("--holdout", f.holdout, "holdout fraction")->capture_default_str();
    tune_cmd->add_option("--seed", f.seed, "split seed")->capture_default_str();
    tune_cmd->add_option("--jobs", f.jobs, "threads for per-class training")->capture_default_str();
    add_hyperparameter_flags(tune_cmd, f);

    auto *gen = app.add_subcommand("gen", "write a synthetic LUPI dataset (3 files)");
    gen->add_option("--output", g.output, "path prefix")->capture_default_str();
    gen->add_option("--n", g.n, "training size")->capture_default_str();
    gen->add_option("--n-test", g.n_test, "test size")->capture_default_str();
    gen->add_option("--d", g.d, "main feature dimension")->capture_default_str();
    gen->add_option("--flip", g.flip, "training label flip probability")->capture_default_str();
    gen->add_option("--noise", g.noise, "privileged feature noise")->capture_default_str();
    gen->add_option("--margin", g.margin, "redraw points with |w.x| below this")->capture_default_str();
    gen->add_option("--priv-dim", g.priv_dim, "privileged dimension")->capture_default_str();
    gen->add_option("--seed", g.seed, "generator seed")->capture_default_str();

    auto *bench = app.add_subcommand("bench", "time svm, svm1plus and svm2plus on synthetic data");
    bench->add_option("--sizes", b.sizes, "training sizes")->delimiter(',');
    bench->add_option("--seeds", b.seeds, "seeds per size")->capture_default_str();
    bench->add_option("--seed", f.seed, "first seed")->capture_default_str();
    bench->add_option("--d", b.d, "main feature dimension")->capture_default_str();
    bench->add_option("--n-test", b.n_test, "test size")->capture_default_str();
    bench->add_option("--flip", b.flip, "label flip probability")->capture_default_str();
    bench->add_option("--output", f.output, "CSV path (stdout when omitted)");
    add_hyperparameter_flags(bench, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = e.get_exit_code();
        if (code == 0) {
            out << app.help();
            return exit_ok;
        }
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (*train) {
            return cmd_train(f, out, err);
        }
        if (*predict_cmd) {
            return cmd_predict(f, out);
        }
        if (*eval) {
            return cmd_eval(f, out);
        }
        if (*tune_cmd) {
            return cmd_tune(f, out);
        }
        if (*gen) {
            return cmd_gen(g, out);
        }
        if (*bench) {
            return cmd_bench(f, b, out);
        }
    } catch (const usage_error &e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const error &e) {
        err << "error: " << e.what() << '\n';
        return exit_for(e.code());
    }
    return exit_usage;
}

}  // namespace lupisvm
