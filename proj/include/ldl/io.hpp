#pragma once

#include <filesystem>
#include <istream>
#include <ostream>

#include "ldl/core.hpp"

namespace ldl::io {

/// ParseError carrying the 1-based position of the offending token.
class FormatError : public Error {
public:
    FormatError(std::size_t line, std::size_t column, const std::string& message)
        : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " +
                                           std::to_string(column) + ": " + message),
          line_(line),
          column_(column),
          reason_(message) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string reason_;
};

/// Text format:
///   LDL 1
///   n q c
///   labels name_1 ... name_c        (optional)
///   x_1 ... x_q | d_1 ... d_c       (n rows)
/// Values are written with 17 significant digits so reading them back is exact.
void write_dataset(std::ostream& out, const LdlDataset& dataset);
LdlDataset read_dataset(std::istream& in);

void write_dataset(const std::filesystem::path& path, const LdlDataset& dataset);
LdlDataset read_dataset(const std::filesystem::path& path);

/// Versioned model files: "LDLMODEL 1", an "algorithm <tag>" line, then
/// records specific to the algorithm. Loading restores a predictor whose
/// outputs are bit-identical to the saved one.
void save_model(std::ostream& out, const Predictor& predictor);
PredictorPtr load_model(std::istream& in);

void save_model(const std::filesystem::path& path, const Predictor& predictor);
PredictorPtr load_model(const std::filesystem::path& path);

inline constexpr int kDatasetVersion = 1;
inline constexpr int kModelVersion = 1;

}  // namespace ldl::io
