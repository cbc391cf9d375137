#ifndef LUPISVM_DATA_HPP
#define LUPISVM_DATA_HPP

#include "lupisvm/linalg.hpp"
#include "lupisvm/sparse.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lupisvm {

/// Training triplets (x_i, z_i, y_i). Z is absent for test data.
struct LupiDataset {
    std::vector<SparseVector> x;
    std::size_t dim_x{ 0 };
    std::optional<std::vector<SparseVector>> z;
    std::size_t dim_z{ 0 };
    std::vector<int> y;

    [[nodiscard]] std::size_t size() const noexcept { return y.size(); }
    [[nodiscard]] bool has_privileged() const noexcept { return z.has_value(); }

    /// Checks row alignment and index bounds; throws errc::alignment_error / dimension_mismatch.
    void validate() const;

    [[nodiscard]] DenseMatrix dense_x() const;
    [[nodiscard]] DenseMatrix dense_z() const;
    /// Rows in the given order (privileged rows follow along).
    [[nodiscard]] LupiDataset subset(std::span<const std::size_t> rows) const;
    /// Distinct labels, ascending.
    [[nodiscard]] std::vector<int> classes() const;

    friend bool operator==(const LupiDataset &, const LupiDataset &) = default;
};

/// Parses "label idx:val ..." lines (1-based, strictly increasing indices).
/// Errors: errc::parse_error (with line number), errc::non_monotonic_indices, errc::empty_file.
[[nodiscard]] LupiDataset read_sparse(std::istream &in, const std::string &source_name = "<stream>");
[[nodiscard]] LupiDataset load_sparse(const std::filesystem::path &path);

/// Privileged rows in the same format without the label column; exactly n lines
/// (errc::line_count_mismatch otherwise). Blank lines are all-zero rows.
[[nodiscard]] std::vector<SparseVector> read_privileged(std::istream &in, std::size_t n,
                                                        const std::string &source_name = "<stream>");
[[nodiscard]] std::vector<SparseVector> load_privileged(const std::filesystem::path &path, std::size_t n);

/// Writes rows as "[label ]idx:val ..." with shortest round-trip numbers.
void write_sparse_row(std::ostream &out, const SparseVector &row);
void write_sparse(std::ostream &out, std::span<const SparseVector> rows, std::span<const int> labels);
void write_privileged(std::ostream &out, std::span<const SparseVector> rows);
void save_sparse(const std::filesystem::path &path, std::span<const SparseVector> rows, std::span<const int> labels);
void save_privileged(const std::filesystem::path &path, std::span<const SparseVector> rows);

enum class TermWeighting { tf, tfidf };

struct TfidfResult {
    DenseMatrix z;
    std::vector<std::string> vocabulary;
};

/// Vocabulary: the vocab_size most frequent tokens over the corpus (ties lexicographic).
/// tf(t, d) = count(t, d) / |d|,  idf(t) = ln(N / (1 + df(t))).
/// Throws errc::empty_corpus when no document has a token.
[[nodiscard]] TfidfResult tfidf_vectorize(std::span<const std::vector<std::string>> documents, std::size_t vocab_size,
                                          TermWeighting weighting = TermWeighting::tfidf);

/// Lower-cases, splits on non-alphanumerics and drops a small built-in stop-word list.
[[nodiscard]] std::vector<std::string> tokenize(std::string_view text);

/// xorshift64* seeded through splitmix64; normals by Box-Muller.
class Xorshift64Star {
  public:
    explicit Xorshift64Star(std::uint64_t seed);

    [[nodiscard]] std::uint64_t next() noexcept;
    /// Uniform in [0, 1) with 53 random bits.
    [[nodiscard]] double uniform() noexcept;
    [[nodiscard]] double normal() noexcept;
    /// Uniform integer in [0, bound).
    [[nodiscard]] std::uint64_t below(std::uint64_t bound) noexcept;

  private:
    std::uint64_t state_;
    std::optional<double> spare_normal_;
};

struct SynthSpec {
    std::size_t n{ 100 };
    std::size_t n_test{ 1000 };
    std::size_t d{ 10 };
    double flip_probability{ 0.0 };
    double privileged_noise{ 0.0 };
    /// Points with |w*.x| below this are redrawn (at least 1e-6).
    double margin{ 0.0 };
    /// Privileged dimension; coordinates past the first are noise.
    std::size_t privileged_dim{ 1 };
    std::uint64_t seed{ 1 };

    void validate() const;
};

struct SynthData {
    LupiDataset train;
    LupiDataset test;
    std::vector<double> teacher;  // w*, unit norm
};

/// Labels are +1 / -1. The privileged feature of training point i is the hinge slack
/// max(0, 1 - y_i w*.x_i) (plus noise) under the possibly flipped label.
[[nodiscard]] SynthData synth_lupi(const SynthSpec &spec);

/// Per class, draws k_train rows for training and up to k_test of the rest for testing.
[[nodiscard]] std::pair<LupiDataset, LupiDataset> sample_per_class(const LupiDataset &data, std::size_t k_train,
                                                                   std::size_t k_test, std::uint64_t seed);

/// Seeded split into (train, holdout) with round(fraction * n) rows held out.
[[nodiscard]] std::pair<LupiDataset, LupiDataset> holdout_split(const LupiDataset &data, double fraction,
                                                                std::uint64_t seed);

}  // namespace lupisvm

#endif  // LUPISVM_DATA_HPP
