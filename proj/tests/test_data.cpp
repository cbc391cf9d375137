#include "lupisvm/data.hpp"
#include "lupisvm/error.hpp"
#include "lupisvm/trainers.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace lupisvm;

namespace {

LupiDataset parse(const std::string &text) {
    std::istringstream in{ text };
    return read_sparse(in, "mem");
}

std::vector<SparseVector> parse_priv(const std::string &text, std::size_t n) {
    std::istringstream in{ text };
    return read_privileged(in, n, "mem");
}

error caught(auto &&fn) {
    try {
        fn();
    } catch (const error &e) {
        return e;
    }
    ADD_FAILURE() << "no lupisvm::error thrown";
    return error{ errc::io_error, "" };
}

LupiDataset labelled(std::size_t classes, std::size_t per_class) {
    LupiDataset data;
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            const double row[1] = { static_cast<double>(c * per_class + i + 1) };
            data.x.push_back(to_sparse(row));
            data.y.push_back(static_cast<int>(c) + 1);
        }
    }
    data.dim_x = 1;
    return data;
}

std::map<int, std::size_t> counts(const LupiDataset &d) {
    std::map<int, std::size_t> m;
    for (const int l : d.y) {
        ++m[l];
    }
    return m;
}

std::vector<double> first_coordinates(const LupiDataset &d) {
    std::vector<double> v;
    for (const auto &row : d.x) {
        v.push_back(row.value.at(0));
    }
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST(ReadSparse, LabelAndIndexedValues) {
    const auto d = parse("1 1:0.5 3:2.0\n");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d.y[0], 1);
    EXPECT_EQ(d.x[0].index, (std::vector<std::uint32_t>{ 0, 2 }));
    EXPECT_EQ(d.x[0].value, (std::vector<double>{ 0.5, 2.0 }));
    EXPECT_GE(d.dim_x, 3u);
    EXPECT_FALSE(d.has_privileged());
}

TEST(ReadSparse, LabelOnlyLineIsZeroRow) {
    const auto d = parse("-1\n2 2:1\n");
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d.y[0], -1);
    EXPECT_EQ(d.x[0].nnz(), 0u);
    EXPECT_EQ(d.dim_x, 2u);
}

TEST(ReadSparse, MalformedValueReportsLine) {
    const auto e = caught([] { (void)parse("1 1:1\n1 3:x\n"); });
    EXPECT_EQ(e.code(), errc::parse_error);
    EXPECT_NE(std::string{ e.what() }.find("mem:2"), std::string::npos) << e.what();
}

TEST(ReadSparse, MalformedInputs) {
    for (const char *text : { "x 1:1\n", "1 0:1\n", "1 1\n", "1.5 1:1\n", "1 1:1e999\n" }) {
        EXPECT_EQ(caught([&] { (void)parse(text); }).code(), errc::parse_error) << text;
    }
}

TEST(ReadSparse, NonMonotonicIndices) {
    EXPECT_EQ(caught([] { (void)parse("1 3:1 2:1\n"); }).code(), errc::non_monotonic_indices);
    EXPECT_EQ(caught([] { (void)parse("1 2:1 2:1\n"); }).code(), errc::non_monotonic_indices);
}

TEST(ReadSparse, EmptyFile) {
    EXPECT_EQ(caught([] { (void)parse(""); }).code(), errc::empty_file);
}

TEST(ReadSparse, MissingFileIsIoError) {
    EXPECT_EQ(caught([] { (void)load_sparse("/nonexistent/none.sp"); }).code(), errc::io_error);
}

TEST(ReadPrivileged, ExactLineCount) {
    const auto z = parse_priv("1:1\n2:0.5\n1:2 2:3\n", 3);
    ASSERT_EQ(z.size(), 3u);
    EXPECT_EQ(z[2].value, (std::vector<double>{ 2.0, 3.0 }));
}

TEST(ReadPrivileged, ShortFileIsLineCountMismatch) {
    EXPECT_EQ(caught([] { (void)parse_priv("1:1\n2:0.5\n", 3); }).code(), errc::line_count_mismatch);
}

TEST(ReadPrivileged, BlankLinesAreZeroRows) {
    const auto z = parse_priv("1:1\n\n\n", 3);
    ASSERT_EQ(z.size(), 3u);
    EXPECT_EQ(z[1].nnz(), 0u);
    EXPECT_EQ(z[2].nnz(), 0u);
}

TEST(ReadPrivileged, ParseErrorReportsLine) {
    const auto e = caught([] { (void)parse_priv("1:1\n\n4:y\n", 3); });
    EXPECT_EQ(e.code(), errc::parse_error);
    EXPECT_NE(std::string{ e.what() }.find("mem:3"), std::string::npos) << e.what();
}

TEST(WriteSparse, RoundTripIsExact) {
    oracle::Rng rng{ 1 };
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.below(15);
        const std::size_t d = 1 + rng.below(8);
        DenseMatrix x = oracle::random_matrix(rng, n, d);
        DenseMatrix z = oracle::random_matrix(rng, n, 2);
        for (double &v : x.data()) {
            if (rng.uniform() < 0.3) {
                v = 0.0;
            } else {
                v *= std::pow(10.0, static_cast<double>(rng.below(20)) - 10.0);
            }
        }
        const auto rows = to_sparse_rows(x);
        const auto priv = to_sparse_rows(z);
        std::vector<int> y(n);
        for (int &l : y) {
            l = static_cast<int>(rng.below(7)) - 3;
        }
        std::ostringstream out;
        write_sparse(out, rows, y);
        const auto back = parse(out.str());
        EXPECT_EQ(back.x, rows);
        EXPECT_EQ(back.y, y);
        std::ostringstream pout;
        write_privileged(pout, priv);
        EXPECT_EQ(parse_priv(pout.str(), n), priv);
    }
}

TEST(Tfidf, HandComputedCorpus) {
    const std::vector<std::vector<std::string>> docs{ { "a", "a", "b" }, { "a", "c" } };
    const auto r = tfidf_vectorize(docs, 3);
    EXPECT_EQ(r.vocabulary, (std::vector<std::string>{ "a", "b", "c" }));
    ASSERT_EQ(r.z.rows(), 2u);
    ASSERT_EQ(r.z.cols(), 3u);
    // df(a) = 2, df(b) = df(c) = 1, N = 2
    const double idf_a = std::log(2.0 / 3.0);
    const double idf_bc = std::log(2.0 / 2.0);
    EXPECT_DOUBLE_EQ(r.z(0, 0), 2.0 / 3.0 * idf_a);
    EXPECT_DOUBLE_EQ(r.z(0, 1), 1.0 / 3.0 * idf_bc);
    EXPECT_DOUBLE_EQ(r.z(0, 2), 0.0);
    EXPECT_DOUBLE_EQ(r.z(1, 0), 0.5 * idf_a);
    EXPECT_DOUBLE_EQ(r.z(1, 1), 0.0);
    EXPECT_DOUBLE_EQ(r.z(1, 2), 0.5 * idf_bc);
}

TEST(Tfidf, SingleDocumentUsesLogOneHalf) {
    const std::vector<std::vector<std::string>> docs{ { "x", "y", "x" } };
    const auto r = tfidf_vectorize(docs, 10);
    EXPECT_EQ(r.vocabulary, (std::vector<std::string>{ "x", "y" }));
    EXPECT_DOUBLE_EQ(r.z(0, 0), 2.0 / 3.0 * std::log(0.5));
    EXPECT_DOUBLE_EQ(r.z(0, 1), 1.0 / 3.0 * std::log(0.5));
}

TEST(Tfidf, OutOfVocabularyTokensContributeNothing) {
    const std::vector<std::vector<std::string>> docs{ { "a", "a", "a", "b" }, { "a", "b", "b", "z" } };
    const auto r = tfidf_vectorize(docs, 2, TermWeighting::tf);
    EXPECT_EQ(r.vocabulary, (std::vector<std::string>{ "a", "b" }));
    EXPECT_DOUBLE_EQ(r.z(1, 0), 0.25);
    EXPECT_DOUBLE_EQ(r.z(1, 1), 0.5);
}

TEST(Tfidf, EmptyDocumentGivesZeroRowAndEmptyCorpusThrows) {
    const std::vector<std::vector<std::string>> docs{ { "a" }, {} };
    const auto r = tfidf_vectorize(docs, 5);
    EXPECT_EQ(r.z(1, 0), 0.0);
    const std::vector<std::vector<std::string>> empty{ {}, {} };
    EXPECT_EQ(caught([&] { (void)tfidf_vectorize(empty, 5); }).code(), errc::empty_corpus);
}

TEST(Tfidf, Deterministic) {
    const std::vector<std::vector<std::string>> docs{ tokenize("The cat sat on the mat"), tokenize("Cats, mats & hats!") };
    const auto a = tfidf_vectorize(docs, 4);
    const auto b = tfidf_vectorize(docs, 4);
    EXPECT_EQ(a.z, b.z);
    EXPECT_EQ(a.vocabulary, b.vocabulary);
}

TEST(Tokenize, LowerCasesAndSplits) {
    const auto t = tokenize("Hello, WORLD 42x");
    EXPECT_EQ(t, (std::vector<std::string>{ "hello", "world", "42x" }));
}

TEST(Xorshift, SeededStreamsRepeat) {
    Xorshift64Star a{ 99 };
    Xorshift64Star b{ 99 };
    Xorshift64Star c{ 100 };
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next();
        EXPECT_EQ(va, b.next());
        differs = differs || va != c.next();
    }
    EXPECT_TRUE(differs);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(a.below(7), 7u);
    }
}

TEST(SynthLupi, FixedSeedIsBitIdentical) {
    SynthSpec spec;
    spec.n = 50;
    spec.n_test = 30;
    spec.d = 4;
    spec.flip_probability = 0.2;
    spec.privileged_noise = 0.1;
    spec.seed = 17;
    const auto a = synth_lupi(spec);
    const auto b = synth_lupi(spec);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    EXPECT_EQ(a.teacher, b.teacher);
    spec.seed = 18;
    EXPECT_NE(synth_lupi(spec).train, a.train);
}

TEST(SynthLupi, ShapesAndUnitTeacher) {
    SynthSpec spec;
    spec.n = 40;
    spec.n_test = 25;
    spec.d = 6;
    spec.privileged_dim = 3;
    const auto s = synth_lupi(spec);
    EXPECT_EQ(s.train.size(), 40u);
    EXPECT_EQ(s.test.size(), 25u);
    EXPECT_EQ(s.train.dim_x, 6u);
    ASSERT_TRUE(s.train.has_privileged());
    EXPECT_EQ(s.train.dim_z, 3u);
    EXPECT_FALSE(s.test.has_privileged());
    double norm = 0.0;
    for (const double w : s.teacher) {
        norm += w * w;
    }
    EXPECT_NEAR(norm, 1.0, 1e-12);
    for (const int l : s.train.y) {
        EXPECT_TRUE(l == 1 || l == -1);
    }
}

TEST(SynthLupi, PrivilegedFeatureIsRealizedSlackWithoutNoise) {
    SynthSpec spec;
    spec.n = 200;
    spec.d = 5;
    spec.flip_probability = 0.3;
    spec.seed = 3;
    const auto s = synth_lupi(spec);
    const auto dz = s.train.dense_z();
    const auto dx = s.train.dense_x();
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < s.train.size(); ++i) {
        double m = 0.0;
        for (std::size_t j = 0; j < spec.d; ++j) {
            m += s.teacher[j] * dx(i, j);
        }
        const double slack = std::max(0.0, 1.0 - s.train.y[i] * m);
        EXPECT_NEAR(dz(i, 0), slack, 1e-15) << i;
        zeros += dz(i, 0) == 0.0 ? 1 : 0;
    }
    EXPECT_GT(zeros, 0u);
}

TEST(SynthLupi, NoFlipsMeansZeroSlackBeyondMargin) {
    SynthSpec spec;
    spec.n = 100;
    spec.d = 3;
    spec.margin = 1.0;
    spec.seed = 4;
    const auto s = synth_lupi(spec);
    for (const auto &row : *s.train.z) {
        EXPECT_EQ(row.nnz(), 0u);
    }
}

TEST(SynthLupi, SeparableConstructionIsLearnedPerfectly) {
    SynthSpec spec;
    spec.n = 100;
    spec.n_test = 1000;
    spec.d = 5;
    spec.margin = 0.5;
    spec.seed = 5;
    const auto s = synth_lupi(spec);
    Hyperparameters hp;
    hp.c = 10.0;
    const auto m = train_svm(s.train.dense_x(), s.train.y, hp);
    const auto f = decision_values(m, s.test.x);
    std::vector<int> pred(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        pred[i] = f[i] >= 0.0 ? 1 : -1;
    }
    EXPECT_DOUBLE_EQ(accuracy(pred, s.test.y), 100.0);
}

TEST(SynthLupi, InvalidSpec) {
    SynthSpec spec;
    spec.flip_probability = 1.0;
    EXPECT_EQ(caught([&] { (void)synth_lupi(spec); }).code(), errc::invalid_spec);
    spec = SynthSpec{};
    spec.privileged_noise = -0.1;
    EXPECT_EQ(caught([&] { (void)synth_lupi(spec); }).code(), errc::invalid_spec);
    spec = SynthSpec{};
    spec.d = 0;
    EXPECT_EQ(caught([&] { (void)synth_lupi(spec); }).code(), errc::invalid_spec);
}

TEST(SamplePerClass, TenPerClassOverHundredTwoClasses) {
    const auto data = labelled(102, 12);
    const auto [train, test] = sample_per_class(data, 10, 50, 1);
    EXPECT_EQ(train.size(), 1020u);
    EXPECT_EQ(test.size(), 204u);
    for (const auto &[label, count] : counts(train)) {
        EXPECT_EQ(count, 10u) << label;
    }
}

TEST(SamplePerClass, RemainderGoesToTest) {
    const auto data = labelled(3, 8);
    const auto [train, test] = sample_per_class(data, 7, 100, 2);
    EXPECT_EQ(counts(test), (std::map<int, std::size_t>{ { 1, 1 }, { 2, 1 }, { 3, 1 } }));
    auto all = first_coordinates(train);
    const auto rest = first_coordinates(test);
    all.insert(all.end(), rest.begin(), rest.end());
    std::sort(all.begin(), all.end());
    EXPECT_EQ(all, first_coordinates(data));
}

TEST(SamplePerClass, SeedsChangeSplitNotCounts) {
    const auto data = labelled(4, 10);
    const auto a = sample_per_class(data, 5, 3, 11);
    const auto b = sample_per_class(data, 5, 3, 12);
    EXPECT_EQ(counts(a.first), counts(b.first));
    EXPECT_EQ(counts(a.second), counts(b.second));
    EXPECT_NE(first_coordinates(a.first), first_coordinates(b.first));
    EXPECT_EQ(sample_per_class(data, 5, 3, 11).first, a.first);
}

TEST(SamplePerClass, InsufficientClassSize) {
    const auto data = labelled(2, 5);
    EXPECT_EQ(caught([&] { (void)sample_per_class(data, 5, 1, 1); }).code(), errc::insufficient_class_size);
}

TEST(HoldoutSplit, PartitionsAndKeepsClasses) {
    const auto data = labelled(3, 20);
    const auto [train, held] = holdout_split(data, 0.3, 7);
    EXPECT_EQ(train.size() + held.size(), data.size());
    EXPECT_EQ(held.size(), 18u);
    EXPECT_EQ(train.classes(), data.classes());
    EXPECT_EQ(held.classes(), data.classes());
    auto all = first_coordinates(train);
    const auto rest = first_coordinates(held);
    all.insert(all.end(), rest.begin(), rest.end());
    std::sort(all.begin(), all.end());
    EXPECT_EQ(all, first_coordinates(data));
    EXPECT_EQ(holdout_split(data, 0.3, 7).second, held);
    EXPECT_EQ(caught([&] { (void)holdout_split(data, 1.0, 7); }).code(), errc::invalid_spec);
}

TEST(LupiDataset, ValidateAlignment) {
    LupiDataset d = labelled(2, 2);
    d.z = std::vector<SparseVector>(3);
    EXPECT_EQ(caught([&] { d.validate(); }).code(), errc::alignment_error);
    d.z = std::vector<SparseVector>(4);
    EXPECT_NO_THROW(d.validate());
    const std::vector<std::size_t> rows{ 3, 0 };
    const auto sub = d.subset(rows);
    EXPECT_EQ(sub.y, (std::vector<int>{ 2, 1 }));
    EXPECT_EQ(sub.z->size(), 2u);
}
