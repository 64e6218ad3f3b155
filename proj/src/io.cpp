#include "ldl/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ldl/maxent.hpp"
#include "ldl/neighbors.hpp"
#include "ldl/neural.hpp"
#include "ldl/standardize.hpp"
#include "ldl/transform.hpp"

namespace ldl::io {
namespace {

struct Token {
    std::string_view text;
    std::size_t column = 0;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        out.push_back({line.substr(start, i - start), start + 1});
    }
    return out;
}

/// Reads non-blank lines and tracks line numbers for error messages.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    bool next() {
        while (std::getline(in_, text_)) {
            ++line_;
            tokens_ = tokenize(text_);
            if (!tokens_.empty()) return true;
        }
        tokens_.clear();
        return false;
    }

    void require(std::string_view what) {
        if (!next()) throw FormatError(line_ + 1, 1, "unexpected end of file, expected " + std::string(what));
    }

    const std::vector<Token>& tokens() const noexcept { return tokens_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& text() const noexcept { return text_; }

    [[noreturn]] void fail(std::size_t column, const std::string& message) const {
        throw FormatError(line_, column, message);
    }
    [[noreturn]] void fail(const Token& t, const std::string& message) const {
        fail(t.column, message);
    }

    void expect_count(std::size_t count, std::string_view what) const {
        if (tokens_.size() != count) {
            const std::size_t col = tokens_.size() > count ? tokens_[count].column
                                                           : text_.size() + 1;
            fail(col, "expected " + std::to_string(count) + " fields for " + std::string(what) +
                          ", found " + std::to_string(tokens_.size()));
        }
    }

    void expect_word(std::size_t index, std::string_view word) const {
        if (index >= tokens_.size() || tokens_[index].text != word) {
            fail(index < tokens_.size() ? tokens_[index].column : 1,
                 "expected '" + std::string(word) + "'");
        }
    }

    double real(const Token& t) const {
        double v = 0.0;
        const char* first = t.text.data();
        const char* last = first + t.text.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) fail(t, "not a number: '" + std::string(t.text) + "'");
        return v;
    }

    std::uint64_t integer(const Token& t) const {
        std::uint64_t v = 0;
        const char* first = t.text.data();
        const char* last = first + t.text.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) {
            fail(t, "not a non-negative integer: '" + std::string(t.text) + "'");
        }
        return v;
    }

private:
    std::istream& in_;
    std::string text_;
    std::vector<Token> tokens_;
    std::size_t line_ = 0;
};

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_reals(std::ostream& out, std::span<const double> values) {
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) out << ' ';
        out << format_real(values[k]);
    }
}

void check_name(const std::string& s, std::string_view what) {
    if (s.empty() || s.find_first_of(" \t\r\n") != std::string::npos) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string(what) + " '" + s + "' must be non-empty without whitespace");
    }
}

// ---------------------------------------------------------------------------
// Dataset body shared by dataset files and kNN model files.

void write_dataset_body(std::ostream& out, const LdlDataset& ds) {
    out << ds.size() << ' ' << ds.num_features() << ' ' << ds.num_labels() << '\n';
    if (!ds.label_names().empty()) {
        out << "labels";
        for (const auto& name : ds.label_names()) {
            check_name(name, "label name");
            out << ' ' << name;
        }
        out << '\n';
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
        write_reals(out, ds.features(i));
        out << (ds.num_features() ? " | " : "| ");
        write_reals(out, ds.distribution(i).span());
        out << '\n';
    }
}

LdlDataset read_dataset_body(Reader& r) {
    r.require("'n q c'");
    r.expect_count(3, "'n q c'");
    const auto& dims = r.tokens();
    const auto n = static_cast<std::size_t>(r.integer(dims[0]));
    const auto q = static_cast<std::size_t>(r.integer(dims[1]));
    const auto c = static_cast<std::size_t>(r.integer(dims[2]));
    if (n == 0) r.fail(dims[0], "dataset must contain at least one example");
    if (c < 2) r.fail(dims[2], "need at least 2 labels");

    LdlDataset ds(q, c);
    r.require("an example row");
    if (r.tokens().front().text == "labels") {
        r.expect_count(c + 1, "label names");
        std::vector<std::string> names;
        for (std::size_t j = 1; j <= c; ++j) names.emplace_back(r.tokens()[j].text);
        ds.set_label_names(std::move(names));
        r.require("an example row");
    }

    std::vector<double> x(q), d(c);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) r.require("example row " + std::to_string(i + 1) + " of " + std::to_string(n));
        const auto& toks = r.tokens();
        if (toks.size() <= q || toks[q].text != "|") {
            std::size_t bar = 0;
            while (bar < toks.size() && toks[bar].text != "|") ++bar;
            if (bar == toks.size()) r.fail(1, "missing '|' separator");
            r.fail(toks[bar].column, "expected " + std::to_string(q) + " feature values before '|', found " +
                                         std::to_string(bar));
        }
        if (toks.size() != q + 1 + c) {
            const std::size_t col = toks.size() > q + 1 + c ? toks[q + 1 + c].column
                                                            : r.text().size() + 1;
            r.fail(col, "expected " + std::to_string(c) + " degrees after '|', found " +
                            std::to_string(toks.size() - q - 1));
        }
        for (std::size_t k = 0; k < q; ++k) x[k] = r.real(toks[k]);
        for (std::size_t j = 0; j < c; ++j) d[j] = r.real(toks[q + 1 + j]);
        try {
            check_finite(x);
            ds.add(x, validate_distribution(d));
        } catch (const Error& e) {
            throw Error(ErrorCode::InvariantViolation,
                        "example " + std::to_string(i + 1) + " (line " + std::to_string(r.line()) +
                            ") violates " + std::string(to_string(e.code())) + ": " + e.detail());
        }
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Model records

void write_matrix(std::ostream& out, std::string_view name, const Eigen::MatrixXd& m) {
    out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
        write_reals(out, row);
        out << '\n';
    }
}

/// Parses a matrix whose "name rows cols" header is the current line.
Eigen::MatrixXd read_matrix_here(Reader& r, std::string_view name) {
    r.expect_count(3, name);
    r.expect_word(0, name);
    const auto rows = static_cast<Eigen::Index>(r.integer(r.tokens()[1]));
    const auto cols = static_cast<Eigen::Index>(r.integer(r.tokens()[2]));
    Eigen::MatrixXd m(rows, cols);
    const std::string row_name = std::string(name) + " row";
    for (Eigen::Index i = 0; i < rows; ++i) {
        r.require(row_name);
        r.expect_count(static_cast<std::size_t>(cols), row_name);
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = r.real(r.tokens()[static_cast<std::size_t>(j)]);
    }
    return m;
}

Eigen::MatrixXd read_matrix(Reader& r, std::string_view name) {
    r.require(std::string(name));
    return read_matrix_here(r, name);
}

void write_vector(std::ostream& out, std::string_view name, std::span<const double> v) {
    out << name << ' ' << v.size();
    for (double x : v) out << ' ' << format_real(x);
    out << '\n';
}

std::vector<double> read_vector(Reader& r, std::string_view name) {
    r.require(std::string(name));
    r.expect_word(0, name);
    if (r.tokens().size() < 2) r.fail(1, "missing length");
    const auto len = static_cast<std::size_t>(r.integer(r.tokens()[1]));
    r.expect_count(len + 2, name);
    std::vector<double> v(len);
    for (std::size_t k = 0; k < len; ++k) v[k] = r.real(r.tokens()[k + 2]);
    return v;
}

void write_hyper(std::ostream& out, const Predictor& p) {
    for (const auto& [key, value] : p.hyperparameters()) {
        check_name(key, "hyperparameter key");
        check_name(value, "hyperparameter value");
        out << "hyper " << key << ' ' << value << '\n';
    }
}

/// Consumes "hyper" lines and leaves the reader on the record that follows.
std::map<std::string, std::string> read_hyper(Reader& r, std::string_view next_record) {
    std::map<std::string, std::string> h;
    r.require(std::string(next_record));
    while (r.tokens().front().text == "hyper") {
        r.expect_count(3, "hyper");
        h.emplace(std::string(r.tokens()[1].text), std::string(r.tokens()[2].text));
        r.require(std::string(next_record));
    }
    return h;
}

void save_body(std::ostream& out, const Predictor& p);
PredictorPtr load_body(Reader& r);

void save_body(std::ostream& out, const Predictor& p) {
    if (const auto* s = dynamic_cast<const StandardizedPredictor*>(&p)) {
        out << "algorithm standardized\n";
        write_vector(out, "mean", s->standardizer().mean());
        write_vector(out, "scale", s->standardizer().scale());
        save_body(out, s->inner());
        return;
    }
    if (const auto* m = dynamic_cast<const maxent::MaxEntModel*>(&p)) {
        out << "algorithm " << m->algorithm() << '\n';
        write_hyper(out, p);
        write_matrix(out, "theta", m->theta());
        return;
    }
    if (const auto* k = dynamic_cast<const neighbors::KnnModel*>(&p)) {
        out << "algorithm aa-knn\n";
        out << "k " << k->k() << '\n';
        write_dataset_body(out, k->training());
        return;
    }
    if (const auto* b = dynamic_cast<const neural::BpNetwork*>(&p)) {
        out << "algorithm aa-bp\n";
        write_hyper(out, p);
        write_matrix(out, "w_in", b->w_in());
        write_matrix(out, "w_out", b->w_out());
        return;
    }
    if (const auto* t = dynamic_cast<const transform::TransformedPredictor*>(&p)) {
        const auto* g = dynamic_cast<const transform::GaussianClassModel*>(&t->classifier());
        if (!g) {
            throw Error(ErrorCode::UnknownAlgorithmTag,
                        "no serializer for classifier behind " + p.algorithm());
        }
        out << "algorithm pt-bayes\n";
        write_hyper(out, p);
        out << "classes " << g->classes().size() << ' ' << g->num_features() << '\n';
        for (const auto& cls : g->classes()) {
            out << "prior " << format_real(cls.prior) << '\n';
            if (cls.prior == 0.0) continue;
            write_vector(out, "mean", std::span<const double>(cls.mean.data(), cls.mean.size()));
            write_matrix(out, "covariance", cls.covariance);
        }
        return;
    }
    throw Error(ErrorCode::UnknownAlgorithmTag, "no serializer for " + p.algorithm());
}

PredictorPtr load_body(Reader& r) {
    r.require("algorithm line");
    r.expect_count(2, "algorithm line");
    r.expect_word(0, "algorithm");
    const Token tag_token = r.tokens()[1];
    const std::string tag(tag_token.text);

    if (tag == "standardized") {
        auto mean = read_vector(r, "mean");
        auto scale = read_vector(r, "scale");
        auto inner = load_body(r);
        return std::make_unique<StandardizedPredictor>(
            Standardizer(std::move(mean), std::move(scale)), std::move(inner));
    }
    if (tag == "sa-iis" || tag == "sa-bfgs" || tag == "maxent") {
        auto hyper = read_hyper(r, "theta");
        Eigen::MatrixXd theta = read_matrix_here(r, "theta");
        auto model = std::make_unique<maxent::MaxEntModel>(std::move(theta), tag);
        model->set_hyperparameters(std::move(hyper));
        return model;
    }
    if (tag == "aa-knn") {
        r.require("k");
        r.expect_count(2, "k");
        r.expect_word(0, "k");
        const auto k = static_cast<std::size_t>(r.integer(r.tokens()[1]));
        return std::make_unique<neighbors::KnnModel>(read_dataset_body(r), k);
    }
    if (tag == "aa-bp") {
        auto hyper = read_hyper(r, "w_in");
        Eigen::MatrixXd w_in = read_matrix_here(r, "w_in");
        Eigen::MatrixXd w_out = read_matrix(r, "w_out");
        auto net = std::make_unique<neural::BpNetwork>(std::move(w_in), std::move(w_out));
        net->set_hyperparameters(std::move(hyper));
        return net;
    }
    if (tag == "pt-bayes") {
        auto hyper = read_hyper(r, "classes");
        r.expect_count(3, "classes");
        r.expect_word(0, "classes");
        const auto c = static_cast<std::size_t>(r.integer(r.tokens()[1]));
        const auto q = static_cast<std::size_t>(r.integer(r.tokens()[2]));
        std::vector<transform::GaussianClassModel::ClassDensity> classes(c);
        for (auto& cls : classes) {
            r.require("prior");
            r.expect_count(2, "prior");
            r.expect_word(0, "prior");
            cls.prior = r.real(r.tokens()[1]);
            if (cls.prior == 0.0) continue;
            const auto mean = read_vector(r, "mean");
            if (mean.size() != q) r.fail(1, "mean has wrong length");
            cls.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(q));
            cls.covariance = read_matrix(r, "covariance");
        }
        auto model = std::make_shared<transform::GaussianClassModel>(std::move(classes));
        return std::make_unique<transform::TransformedPredictor>(std::move(model), "bayes",
                                                                 std::move(hyper));
    }
    throw Error(ErrorCode::UnknownAlgorithmTag,
                "line " + std::to_string(r.line()) + ": unknown algorithm tag '" + tag + "'");
}

template <typename Fn>
auto with_file(const std::filesystem::path& path, std::ios::openmode mode, Fn&& fn) {
    std::fstream f(path, mode);
    if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    try {
        if constexpr (std::is_void_v<decltype(fn(f))>) {
            fn(f);
            f.flush();
            if (!f) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
        } else {
            return fn(f);
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::IoError) throw;
        if (const auto* fe = dynamic_cast<const FormatError*>(&e)) {
            throw FormatError(fe->line(), fe->column(), path.string() + ": " + fe->reason());
        }
        throw Error(e.code(), path.string() + ": " + e.detail());
    }
}

}  // namespace

void write_dataset(std::ostream& out, const LdlDataset& dataset) {
    dataset.require_nonempty();
    out << "LDL " << kDatasetVersion << '\n';
    write_dataset_body(out, dataset);
}

LdlDataset read_dataset(std::istream& in) {
    Reader r(in);
    r.require("'LDL 1' header");
    r.expect_word(0, "LDL");
    r.expect_count(2, "header");
    if (r.integer(r.tokens()[1]) != static_cast<std::uint64_t>(kDatasetVersion)) {
        throw Error(ErrorCode::VersionMismatch,
                    "dataset version " + std::string(r.tokens()[1].text) + " is not supported");
    }
    LdlDataset ds = read_dataset_body(r);
    if (r.next()) r.fail(1, "unexpected content after the last example");
    return ds;
}

void write_dataset(const std::filesystem::path& path, const LdlDataset& dataset) {
    with_file(path, std::ios::out | std::ios::trunc, [&](std::ostream& f) { write_dataset(f, dataset); });
}

LdlDataset read_dataset(const std::filesystem::path& path) {
    return with_file(path, std::ios::in, [&](std::istream& f) { return read_dataset(f); });
}

void save_model(std::ostream& out, const Predictor& predictor) {
    out << "LDLMODEL " << kModelVersion << '\n';
    save_body(out, predictor);
    out << "end\n";
}

PredictorPtr load_model(std::istream& in) {
    Reader r(in);
    r.require("'LDLMODEL 1' header");
    r.expect_word(0, "LDLMODEL");
    r.expect_count(2, "header");
    if (r.integer(r.tokens()[1]) != static_cast<std::uint64_t>(kModelVersion)) {
        throw Error(ErrorCode::VersionMismatch,
                    "model version " + std::string(r.tokens()[1].text) + " is not supported");
    }
    auto model = load_body(r);
    r.require("'end'");
    r.expect_count(1, "end");
    r.expect_word(0, "end");
    return model;
}

void save_model(const std::filesystem::path& path, const Predictor& predictor) {
    with_file(path, std::ios::out | std::ios::trunc, [&](std::ostream& f) { save_model(f, predictor); });
}

PredictorPtr load_model(const std::filesystem::path& path) {
    return with_file(path, std::ios::in, [&](std::istream& f) { return load_model(f); });
}

}  // namespace ldl::io
