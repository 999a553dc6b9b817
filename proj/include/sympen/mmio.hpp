#pragma once

#include <filesystem>
#include <string>

#include "sympen/operators.hpp"

namespace sympen {

// Contents of one Matrix Market file. Exactly one of `dense` / `sparse` is
// populated depending on the layout (array / coordinate). Symmetric and
// skew-symmetric files are expanded to both triangles on read.
struct MarketMatrix {
    enum class Layout { Array, Coordinate };
    Layout layout = Layout::Array;
    Eigen::MatrixXd dense;
    SparseCsr sparse;

    Index rows() const { return layout == Layout::Array ? dense.rows() : sparse.rows(); }
    Index cols() const { return layout == Layout::Array ? dense.cols() : sparse.cols(); }
};

// Parse errors are reported as IoError("<path>:<line>: <reason>").
MarketMatrix read_market(const std::filesystem::path& path);

// Array files are column-major `general`; values are written with 17
// significant digits so a store/load cycle is bit-exact.
void write_market_array(const Eigen::MatrixXd& m, const std::filesystem::path& path,
                        const std::string& comment = {});
// Writes the lower triangle with the `symmetric` qualifier.
void write_market_symmetric(const SparseCsr& m, const std::filesystem::path& path,
                            const std::string& comment = {});

// Loads an operator. Array files give a Dense operator, coordinate files a
// SparseCsr operator. When `path` does not exist but `<stem>.B.mtx` and
// `<stem>.C.mtx` do, a SparsePlusLowRank operator is assembled from them.
SpdOperator load_matrix(const std::filesystem::path& path);

// Inverse of load_matrix. Low-rank operators are written to the two-file pair
// `<stem>.B.mtx` / `<stem>.C.mtx`, where stem is `path` without `.mtx`.
void store_matrix(const SpdOperator& op, const std::filesystem::path& path);

// `<stem>.B.mtx` and `<stem>.C.mtx` for a path `<stem>[.mtx]`.
std::pair<std::filesystem::path, std::filesystem::path>
low_rank_paths(const std::filesystem::path& path);

} // namespace sympen
