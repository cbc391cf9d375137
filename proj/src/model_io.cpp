#include "lupisvm/model_io.hpp"

#include "lupisvm/data.hpp"
#include "lupisvm/error.hpp"
#include "lupisvm/format.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace lupisvm {

namespace {

constexpr const char *magic = "lupisvm-model v1";

void write_kernel(std::ostream &out, const KernelSpec &spec) {
    out << "kernel ";
    switch (spec.kind) {
        case KernelKind::linear:
            out << "linear";
            break;
        case KernelKind::rbf:
            out << "rbf " << format_double(spec.gamma);
            break;
        case KernelKind::polynomial:
            out << "poly " << spec.degree << ' ' << format_double(spec.gamma) << ' ' << format_double(spec.coef0);
            break;
    }
    out << '\n';
}

class LineReader {
  public:
    LineReader(std::istream &in, std::string source) :
        in_{ in },
        source_{ std::move(source) } {}

    // next line split on whitespace; the first word must equal `key` when given
    std::vector<std::string> expect(const std::string &key, const std::size_t n_values) {
        std::string line;
        if (!std::getline(in_, line)) {
            fail("unexpected end of file, expected '" + key + "'");
        }
        ++line_no_;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::istringstream ss{ line };
        std::vector<std::string> words;
        for (std::string w; ss >> w;) {
            words.push_back(w);
        }
        if (words.empty() || words[0] != key || (n_values != any && words.size() != n_values + 1)) {
            fail("expected '" + key + "' line, got '" + line + "'");
        }
        return words;
    }

    std::string raw_line(const std::string &expected) {
        std::string line;
        if (!std::getline(in_, line)) {
            fail("unexpected end of file, expected " + expected);
        }
        ++line_no_;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        return line;
    }

    [[noreturn]] void fail(const std::string &what) const {
        throw error{ errc::parse_error, source_ + ":" + std::to_string(line_no_) + ": " + what };
    }

    double number(const std::string &text) const {
        const auto v = parse_double(text);
        if (!v) {
            fail("bad number '" + text + "'");
        }
        return *v;
    }

    long long integer(const std::string &text) const {
        const auto v = parse_integer(text);
        if (!v) {
            fail("bad integer '" + text + "'");
        }
        return *v;
    }

    static constexpr std::size_t any = static_cast<std::size_t>(-1);

  private:
    std::istream &in_;
    std::string source_;
    std::size_t line_no_{ 0 };
};

}  // namespace

void write_model(std::ostream &out, const MulticlassModel &model) {
    if (model.binaries.size() != model.classes.size() || model.binaries.empty()) {
        throw error{ errc::invalid_spec, "write_model: one binary model per class required" };
    }
    out << magic << '\n';
    out << "method " << to_string(model.method) << '\n';
    write_kernel(out, model.binaries.front().kernel_main);
    out << "features " << model.binaries.front().dim << '\n';
    out << "classes " << model.classes.size() << '\n';
    for (std::size_t ci = 0; ci < model.classes.size(); ++ci) {
        const auto &b = model.binaries[ci];
        out << "class " << model.classes[ci] << '\n';
        out << "bias " << format_double(b.bias) << '\n';
        out << "nsv " << b.support_vectors.size() << '\n';
        for (std::size_t i = 0; i < b.support_vectors.size(); ++i) {
            out << format_double(b.coefficients[i]);
            if (b.support_vectors[i].nnz() > 0) {
                out << ' ';
                write_sparse_row(out, b.support_vectors[i]);
            }
            out << '\n';
        }
    }
}

MulticlassModel read_model(std::istream &in, const std::string &source_name) {
    LineReader reader{ in, source_name };
    if (reader.raw_line("header") != magic) {
        reader.fail(std::string{ "missing '" } + magic + "' header");
    }
    MulticlassModel model;
    try {
        model.method = parse_method(reader.expect("method", 1)[1]);
    } catch (const error &e) {
        reader.fail(e.what());
    }

    const auto kw = reader.expect("kernel", LineReader::any);
    KernelSpec spec;
    if (kw.size() == 2 && kw[1] == "linear") {
        spec = KernelSpec::linear();
    } else if (kw.size() == 3 && kw[1] == "rbf") {
        spec = KernelSpec::rbf(reader.number(kw[2]));
    } else if (kw.size() == 5 && kw[1] == "poly") {
        spec = KernelSpec::polynomial(static_cast<int>(reader.integer(kw[2])), reader.number(kw[3]), reader.number(kw[4]));
    } else {
        reader.fail("unknown kernel line");
    }
    try {
        spec.validate();
    } catch (const error &e) {
        reader.fail(e.what());
    }

    const auto dim = reader.integer(reader.expect("features", 1)[1]);
    const auto k = reader.integer(reader.expect("classes", 1)[1]);
    if (dim < 0 || k < 1) {
        reader.fail("feature and class counts must be positive");
    }
    for (long long ci = 0; ci < k; ++ci) {
        model.classes.push_back(static_cast<int>(reader.integer(reader.expect("class", 1)[1])));
        BinaryModel b;
        b.method = model.method;
        b.kernel_main = spec;
        b.dim = static_cast<std::size_t>(dim);
        b.bias = reader.number(reader.expect("bias", 1)[1]);
        const auto nsv = reader.integer(reader.expect("nsv", 1)[1]);
        if (nsv < 0) {
            reader.fail("negative support vector count");
        }
        for (long long s = 0; s < nsv; ++s) {
            std::istringstream row{ reader.raw_line("support vector") + "\n" };
            // a support-vector line is a labeled sparse row whose "label" is the coefficient
            std::string coeff;
            row >> coeff;
            b.coefficients.push_back(reader.number(coeff));
            std::string rest;
            std::getline(row, rest);
            std::istringstream features{ rest + "\n" };
            auto parsed = read_privileged(features, 1, source_name);
            if (parsed.front().extent() > b.dim) {
                reader.fail("support vector index beyond declared feature count");
            }
            b.support_vectors.push_back(std::move(parsed.front()));
        }
        model.binaries.push_back(std::move(b));
    }
    model.class_counts.assign(model.classes.size(), 0);
    return model;
}

void save_model(const std::filesystem::path &path, const MulticlassModel &model) {
    std::ofstream out{ path, std::ios::binary };
    if (!out) {
        throw error{ errc::io_error, "cannot write '" + path.string() + "'" };
    }
    write_model(out, model);
    if (!out) {
        throw error{ errc::io_error, "failed writing '" + path.string() + "'" };
    }
}

MulticlassModel load_model(const std::filesystem::path &path) {
    std::ifstream in{ path };
    if (!in) {
        throw error{ errc::io_error, "cannot open '" + path.string() + "'" };
    }
    return read_model(in, path.string());
}

}  // namespace lupisvm
