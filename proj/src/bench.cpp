#include "lupisvm/bench.hpp"

#include "lupisvm/format.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <ostream>

namespace lupisvm {

namespace {

double process_cpu_seconds() {
    timespec ts{};
    clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

std::string fixed(const double v, const int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

BenchRow time_training(const Method m, const SynthData &data, const Hyperparameters &hp) {
    const DenseMatrix x = data.train.dense_x();
    const DenseMatrix z = data.train.dense_z();

    const double cpu0 = process_cpu_seconds();
    const auto wall0 = std::chrono::steady_clock::now();
    const TrainingKernels kernels = make_training_kernels(m, x, &z, hp);
    const BinaryModel model = train_binary(m, kernels, x, data.train.y, hp);
    const auto wall1 = std::chrono::steady_clock::now();
    const double cpu1 = process_cpu_seconds();

    const auto f = decision_values(model, data.test.x);
    std::vector<int> predicted(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        predicted[i] = f[i] > 0.0 ? 1 : -1;
    }

    BenchRow row;
    row.method = m;
    row.n = data.train.size();
    row.cpu_seconds = cpu1 - cpu0;
    row.wall_seconds = std::chrono::duration<double>(wall1 - wall0).count();
    row.accuracy = data.test.size() > 0 ? accuracy(predicted, data.test.y) : 0.0;
    row.converged = model.diagnostics.converged;
    return row;
}

BenchReport run_bench(const BenchConfig &config) {
    std::vector<BenchRow> rows;
    for (const std::size_t n : config.sizes) {
        for (std::size_t s = 0; s < config.seeds; ++s) {
            SynthSpec spec = config.synth;
            spec.n = n;
            spec.seed = config.base_seed + s;
            const SynthData data = synth_lupi(spec);
            for (const Method m : config.methods) {
                BenchRow row = time_training(m, data, config.hp);
                row.seed = spec.seed;
                rows.push_back(row);
            }
        }
    }
    return summarize(std::move(rows), config.methods);
}

BenchReport summarize(std::vector<BenchRow> rows, const std::vector<Method> &methods) {
    BenchReport report;
    report.rows = std::move(rows);

    std::vector<std::size_t> sizes;
    for (const auto &r : report.rows) {
        if (std::find(sizes.begin(), sizes.end(), r.n) == sizes.end()) {
            sizes.push_back(r.n);
        }
    }
    for (const std::size_t n : sizes) {
        for (const Method m : methods) {
            BenchSummary s;
            s.method = m;
            s.n = n;
            double cpu_sum = 0.0;
            double wall_sum = 0.0;
            double acc_sum = 0.0;
            for (const auto &r : report.rows) {
                if (r.n != n || r.method != m) {
                    continue;
                }
                ++s.runs;
                acc_sum += r.accuracy;
                if (r.converged) {
                    ++s.converged_runs;
                    cpu_sum += r.cpu_seconds;
                    wall_sum += r.wall_seconds;
                }
            }
            if (s.runs == 0) {
                continue;
            }
            s.accuracy_mean = acc_sum / static_cast<double>(s.runs);
            if (s.converged_runs > 0) {
                const double k = static_cast<double>(s.converged_runs);
                s.cpu_mean = cpu_sum / k;
                s.wall_mean = wall_sum / k;
                double cpu_ss = 0.0;
                double wall_ss = 0.0;
                for (const auto &r : report.rows) {
                    if (r.n == n && r.method == m && r.converged) {
                        cpu_ss += (r.cpu_seconds - s.cpu_mean) * (r.cpu_seconds - s.cpu_mean);
                        wall_ss += (r.wall_seconds - s.wall_mean) * (r.wall_seconds - s.wall_mean);
                    }
                }
                if (s.converged_runs > 1) {
                    s.cpu_stddev = std::sqrt(cpu_ss / (k - 1.0));
                    s.wall_stddev = std::sqrt(wall_ss / (k - 1.0));
                }
            }
            report.summaries.push_back(s);
        }
    }

    const auto find = [&](const std::size_t n, const Method m) -> const BenchSummary * {
        for (const auto &s : report.summaries) {
            if (s.n == n && s.method == m) {
                return &s;
            }
        }
        return nullptr;
    };
    const std::pair<Method, Method> pairs[] = { { Method::svm1plus, Method::svm2plus },
                                                { Method::svm1plus, Method::svm_hinge } };
    for (const std::size_t n : sizes) {
        for (const auto &[slower, faster] : pairs) {
            const auto *a = find(n, slower);
            const auto *b = find(n, faster);
            if (a == nullptr || b == nullptr) {
                continue;
            }
            BenchSpeedup sp{ n, slower, faster, std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN() };
            if (a->converged_runs > 0 && b->converged_runs > 0) {
                sp.cpu_ratio = a->cpu_mean / b->cpu_mean;
                sp.wall_ratio = a->wall_mean / b->wall_mean;
            }
            report.speedups.push_back(sp);
        }
    }
    return report;
}

void write_bench_csv(std::ostream &out, const BenchReport &report) {
    out << "method,n,seed,cpu_seconds,wall_seconds,accuracy,converged\n";
    for (const auto &r : report.rows) {
        out << to_string(r.method) << ',' << r.n << ',' << r.seed << ',' << format_double(r.cpu_seconds) << ','
            << format_double(r.wall_seconds) << ',' << format_double(r.accuracy) << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

void write_bench_table(std::ostream &out, const BenchReport &report) {
    out << "# training time per run: kernel construction and solve included, data generation excluded\n";
    out << "# CPU = process CPU time; means over converged runs only\n";
    out << "method      n      runs  conv  cpu_mean(s)  cpu_sd(s)  wall_mean(s)  wall_sd(s)  accuracy(%)\n";
    for (const auto &s : report.summaries) {
        char line[256];
        std::snprintf(line, sizeof line, "%-10s %5zu %6zu %5zu  %11.6f %10.6f %13.6f %11.6f %12.2f\n",
                      std::string{ to_string(s.method) }.c_str(), s.n, s.runs, s.converged_runs, s.cpu_mean,
                      s.cpu_stddev, s.wall_mean, s.wall_stddev, s.accuracy_mean);
        out << line;
    }
    out << "speedup (mean CPU of slower / mean CPU of faster)\n";
    for (const auto &sp : report.speedups) {
        out << "speedup " << to_string(sp.faster) << " vs " << to_string(sp.slower) << " n=" << sp.n
            << " cpu=" << fixed(sp.cpu_ratio, 2) << "x wall=" << fixed(sp.wall_ratio, 2) << "x\n";
    }
}

}  // namespace lupisvm
