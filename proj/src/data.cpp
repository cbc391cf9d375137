#include "lupisvm/data.hpp"

#include "lupisvm/error.hpp"
#include "lupisvm/format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string_view>
#include <unordered_map>

namespace lupisvm {

void LupiDataset::validate() const {
    if (x.size() != y.size()) {
        throw error{ errc::alignment_error, "feature rows (" + std::to_string(x.size()) + ") and labels (" +
                                                std::to_string(y.size()) + ") differ in count" };
    }
    if (z && z->size() != y.size()) {
        throw error{ errc::alignment_error, "privileged rows (" + std::to_string(z->size()) + ") and labels (" +
                                                std::to_string(y.size()) + ") differ in count" };
    }
    for (const auto &r : x) {
        if (r.extent() > dim_x) {
            throw error{ errc::dimension_mismatch, "feature index beyond dim_x" };
        }
    }
    if (z) {
        for (const auto &r : *z) {
            if (r.extent() > dim_z) {
                throw error{ errc::dimension_mismatch, "privileged index beyond dim_z" };
            }
        }
    }
}

DenseMatrix LupiDataset::dense_x() const {
    return to_dense(x, dim_x);
}

DenseMatrix LupiDataset::dense_z() const {
    if (!z) {
        throw error{ errc::alignment_error, "dataset has no privileged features" };
    }
    return to_dense(*z, dim_z);
}

LupiDataset LupiDataset::subset(std::span<const std::size_t> rows) const {
    LupiDataset out;
    out.dim_x = dim_x;
    out.dim_z = dim_z;
    if (z) {
        out.z.emplace();
    }
    for (const std::size_t r : rows) {
        out.x.push_back(x.at(r));
        out.y.push_back(y.at(r));
        if (z) {
            out.z->push_back(z->at(r));
        }
    }
    return out;
}

std::vector<int> LupiDataset::classes() const {
    std::vector<int> c(y.begin(), y.end());
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return c;
}

namespace {

[[noreturn]] void parse_fail(const std::string &source, const std::size_t line, const std::string &what) {
    throw error{ errc::parse_error, source + ":" + std::to_string(line) + ": " + what };
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) {
            ++j;
        }
        if (j > i) {
            out.push_back(text.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

// parses "idx:val" tokens into a row
SparseVector parse_features(std::span<const std::string_view> tokens, const std::string &source, const std::size_t line) {
    SparseVector row;
    for (const auto tok : tokens) {
        const auto colon = tok.find(':');
        if (colon == std::string_view::npos) {
            parse_fail(source, line, "expected index:value, got '" + std::string{ tok } + "'");
        }
        const auto idx = parse_integer(tok.substr(0, colon));
        const auto val = parse_double(tok.substr(colon + 1));
        if (!idx || *idx < 1 || *idx > static_cast<long long>(UINT32_MAX)) {
            parse_fail(source, line, "bad feature index in '" + std::string{ tok } + "'");
        }
        if (!val || !std::isfinite(*val)) {
            parse_fail(source, line, "bad feature value in '" + std::string{ tok } + "'");
        }
        const auto zero_based = static_cast<std::uint32_t>(*idx - 1);
        if (!row.index.empty() && zero_based <= row.index.back()) {
            throw error{ errc::non_monotonic_indices,
                         source + ":" + std::to_string(line) + ": indices must be strictly increasing" };
        }
        row.index.push_back(zero_based);
        row.value.push_back(*val);
    }
    return row;
}

std::ifstream open_input(const std::filesystem::path &path) {
    std::ifstream in{ path };
    if (!in) {
        throw error{ errc::io_error, "cannot open '" + path.string() + "'" };
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path &path) {
    std::ofstream out{ path, std::ios::binary };
    if (!out) {
        throw error{ errc::io_error, "cannot write '" + path.string() + "'" };
    }
    return out;
}

void strip_cr(std::string &line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
}

}  // namespace

LupiDataset read_sparse(std::istream &in, const std::string &source_name) {
    LupiDataset data;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        const auto tokens = split_whitespace(line);
        if (tokens.empty()) {
            parse_fail(source_name, line_no, "missing label");
        }
        int label = 0;
        if (const auto li = parse_integer(tokens[0])) {
            label = static_cast<int>(*li);
        } else if (const auto ld = parse_double(tokens[0]); ld && std::trunc(*ld) == *ld && std::abs(*ld) < 1e9) {
            label = static_cast<int>(*ld);
        } else {
            parse_fail(source_name, line_no, "bad label '" + std::string{ tokens[0] } + "'");
        }
        auto row = parse_features(std::span{ tokens }.subspan(1), source_name, line_no);
        data.dim_x = std::max(data.dim_x, row.extent());
        data.x.push_back(std::move(row));
        data.y.push_back(label);
    }
    if (line_no == 0) {
        throw error{ errc::empty_file, source_name + " contains no examples" };
    }
    return data;
}

LupiDataset load_sparse(const std::filesystem::path &path) {
    auto in = open_input(path);
    return read_sparse(in, path.string());
}

std::vector<SparseVector> read_privileged(std::istream &in, const std::size_t n, const std::string &source_name) {
    std::vector<SparseVector> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        const auto tokens = split_whitespace(line);
        rows.push_back(parse_features(tokens, source_name, line_no));
    }
    if (rows.size() != n) {
        throw error{ errc::line_count_mismatch,
                     source_name + " has " + std::to_string(rows.size()) + " lines, expected " + std::to_string(n) };
    }
    return rows;
}

std::vector<SparseVector> load_privileged(const std::filesystem::path &path, const std::size_t n) {
    auto in = open_input(path);
    return read_privileged(in, n, path.string());
}

void write_sparse_row(std::ostream &out, const SparseVector &row) {
    for (std::size_t k = 0; k < row.nnz(); ++k) {
        if (k > 0) {
            out << ' ';
        }
        out << (row.index[k] + 1) << ':' << format_double(row.value[k]);
    }
}

void write_sparse(std::ostream &out, std::span<const SparseVector> rows, std::span<const int> labels) {
    if (rows.size() != labels.size()) {
        throw error{ errc::alignment_error, "write_sparse: rows and labels differ in count" };
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << labels[i];
        if (rows[i].nnz() > 0) {
            out << ' ';
            write_sparse_row(out, rows[i]);
        }
        out << '\n';
    }
}

void write_privileged(std::ostream &out, std::span<const SparseVector> rows) {
    for (const auto &r : rows) {
        write_sparse_row(out, r);
        out << '\n';
    }
}

void save_sparse(const std::filesystem::path &path, std::span<const SparseVector> rows, std::span<const int> labels) {
    auto out = open_output(path);
    write_sparse(out, rows, labels);
    if (!out) {
        throw error{ errc::io_error, "failed writing '" + path.string() + "'" };
    }
}

void save_privileged(const std::filesystem::path &path, std::span<const SparseVector> rows) {
    auto out = open_output(path);
    write_privileged(out, rows);
    if (!out) {
        throw error{ errc::io_error, "failed writing '" + path.string() + "'" };
    }
}

TfidfResult tfidf_vectorize(std::span<const std::vector<std::string>> documents, const std::size_t vocab_size,
                            const TermWeighting weighting) {
    std::map<std::string, std::size_t> corpus_count;
    std::map<std::string, std::size_t> doc_freq;
    for (const auto &doc : documents) {
        std::set<std::string_view> seen;
        for (const auto &tok : doc) {
            ++corpus_count[tok];
            if (seen.insert(tok).second) {
                ++doc_freq[tok];
            }
        }
    }
    if (corpus_count.empty()) {
        throw error{ errc::empty_corpus, "tfidf_vectorize: no tokens in any document" };
    }

    std::vector<std::pair<std::string, std::size_t>> ranked(corpus_count.begin(), corpus_count.end());
    // map order is lexicographic, so a stable sort by count keeps ties lexicographic
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) { return a.second > b.second; });
    if (ranked.size() > vocab_size) {
        ranked.resize(vocab_size);
    }

    TfidfResult result;
    std::unordered_map<std::string, std::size_t> column;
    for (const auto &[tok, count] : ranked) {
        column.emplace(tok, result.vocabulary.size());
        result.vocabulary.push_back(tok);
    }

    const double n_docs = static_cast<double>(documents.size());
    std::vector<double> idf(result.vocabulary.size(), 1.0);
    if (weighting == TermWeighting::tfidf) {
        for (std::size_t c = 0; c < idf.size(); ++c) {
            idf[c] = std::log(n_docs / (1.0 + static_cast<double>(doc_freq.at(result.vocabulary[c]))));
        }
    }

    result.z = DenseMatrix{ documents.size(), result.vocabulary.size() };
    for (std::size_t i = 0; i < documents.size(); ++i) {
        const auto &doc = documents[i];
        if (doc.empty()) {
            continue;
        }
        const double len = static_cast<double>(doc.size());
        for (const auto &tok : doc) {
            if (const auto it = column.find(tok); it != column.end()) {
                result.z(i, it->second) += 1.0;
            }
        }
        for (std::size_t c = 0; c < idf.size(); ++c) {
            result.z(i, c) = result.z(i, c) / len * idf[c];
        }
    }
    return result;
}

std::vector<std::string> tokenize(std::string_view text) {
    static const std::set<std::string, std::less<>> stop_words{
        "a",  "an", "and", "are", "as",  "at",   "be",   "by",  "for", "from", "in",
        "is", "it", "of",  "on",  "or",  "that", "the",  "this", "to", "was",  "were", "with",
    };
    std::vector<std::string> tokens;
    std::string current;
    const auto flush = [&] {
        if (!current.empty() && !stop_words.contains(current)) {
            tokens.push_back(current);
        }
        current.clear();
    };
    for (const char ch : text) {
        const auto uc = static_cast<unsigned char>(ch);
        if (std::isalnum(uc)) {
            current.push_back(static_cast<char>(std::tolower(uc)));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

Xorshift64Star::Xorshift64Star(std::uint64_t seed) {
    // splitmix64 scrambles the seed so that 0 and nearby seeds give unrelated streams
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    state_ = z == 0 ? 0x2545F4914F6CDD1DULL : z;
}

std::uint64_t Xorshift64Star::next() noexcept {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
}

double Xorshift64Star::uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Xorshift64Star::normal() noexcept {
    if (spare_normal_) {
        const double v = *spare_normal_;
        spare_normal_.reset();
        return v;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_normal_ = r * std::sin(theta);
    return r * std::cos(theta);
}

std::uint64_t Xorshift64Star::below(const std::uint64_t bound) noexcept {
    // rejection keeps the draw unbiased
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = next();
    while (v >= limit) {
        v = next();
    }
    return v % bound;
}

void SynthSpec::validate() const {
    if (n < 2 || d < 1 || privileged_dim < 1) {
        throw error{ errc::invalid_spec, "synth: need n >= 2, d >= 1 and privileged_dim >= 1" };
    }
    if (!(flip_probability >= 0.0 && flip_probability < 1.0)) {
        throw error{ errc::invalid_spec, "synth: flip probability must lie in [0, 1)" };
    }
    if (!(privileged_noise >= 0.0) || !std::isfinite(privileged_noise)) {
        throw error{ errc::invalid_spec, "synth: privileged noise must be nonnegative" };
    }
    if (!(margin >= 0.0) || margin >= 3.0) {
        throw error{ errc::invalid_spec, "synth: margin must lie in [0, 3)" };
    }
}

namespace {

// x ~ N(0, I), redrawn until |w.x| clears the margin filter; returns w.x
double draw_point(Xorshift64Star &rng, std::span<const double> w, const double margin, std::vector<double> &x) {
    while (true) {
        double s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            x[k] = rng.normal();
            s += w[k] * x[k];
        }
        if (std::abs(s) >= std::max(1e-6, margin)) {
            return s;
        }
    }
}

}  // namespace

SynthData synth_lupi(const SynthSpec &spec) {
    spec.validate();
    Xorshift64Star rng{ spec.seed };
    SynthData out;

    auto &w = out.teacher;
    w.assign(spec.d, 0.0);
    double norm = 0.0;
    while (norm == 0.0) {
        norm = 0.0;
        for (auto &v : w) {
            v = rng.normal();
            norm += v * v;
        }
        norm = std::sqrt(norm);
    }
    for (auto &v : w) {
        v /= norm;
    }

    std::vector<double> x(spec.d);
    std::vector<double> z(spec.privileged_dim);

    out.train.dim_x = spec.d;
    out.train.dim_z = spec.privileged_dim;
    out.train.z.emplace();
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double s = draw_point(rng, w, spec.margin, x);
        int label = s > 0.0 ? 1 : -1;
        // draws are consumed unconditionally so x and y do not depend on the noise settings
        if (rng.uniform() < spec.flip_probability) {
            label = -label;
        }
        for (auto &v : z) {
            v = spec.privileged_noise * rng.normal();
        }
        z[0] += std::max(0.0, 1.0 - label * s);
        out.train.x.push_back(to_sparse(x));
        out.train.z->push_back(to_sparse(z));
        out.train.y.push_back(label);
    }

    out.test.dim_x = spec.d;
    for (std::size_t i = 0; i < spec.n_test; ++i) {
        const double s = draw_point(rng, w, spec.margin, x);
        out.test.x.push_back(to_sparse(x));
        out.test.y.push_back(s > 0.0 ? 1 : -1);
    }
    return out;
}

namespace {

void shuffle(std::vector<std::size_t> &v, Xorshift64Star &rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(v[i - 1], v[j]);
    }
}

std::map<int, std::vector<std::size_t>> rows_by_class(const LupiDataset &data) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < data.size(); ++i) {
        by_class[data.y[i]].push_back(i);
    }
    return by_class;
}

}  // namespace

std::pair<LupiDataset, LupiDataset> sample_per_class(const LupiDataset &data, const std::size_t k_train,
                                                     const std::size_t k_test, const std::uint64_t seed) {
    Xorshift64Star rng{ seed };
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (auto &[label, rows] : rows_by_class(data)) {
        if (rows.size() < k_train + 1) {
            throw error{ errc::insufficient_class_size, "class " + std::to_string(label) + " has " +
                                                            std::to_string(rows.size()) + " examples, need " +
                                                            std::to_string(k_train + 1) };
        }
        shuffle(rows, rng);
        train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(k_train));
        const std::size_t n_test = std::min(k_test, rows.size() - k_train);
        test_rows.insert(test_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(k_train),
                         rows.begin() + static_cast<std::ptrdiff_t>(k_train + n_test));
    }
    return { data.subset(train_rows), data.subset(test_rows) };
}

std::pair<LupiDataset, LupiDataset> holdout_split(const LupiDataset &data, const double fraction,
                                                  const std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw error{ errc::invalid_spec, "holdout fraction must lie in (0, 1)" };
    }
    Xorshift64Star rng{ seed };
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> held_rows;
    // stratified so both parts keep every class
    for (auto &[label, rows] : rows_by_class(data)) {
        shuffle(rows, rng);
        auto held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows.size())));
        held = std::min(held, rows.size() - 1);
        held_rows.insert(held_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(held));
        train_rows.insert(train_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(held), rows.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(held_rows.begin(), held_rows.end());
    return { data.subset(train_rows), data.subset(held_rows) };
}

}  // namespace lupisvm
