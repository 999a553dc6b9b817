#include "sympen/mmio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "sympen/errors.hpp"

namespace sympen {

namespace {

enum class Symmetry { General, Symmetric, SkewSymmetric };

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

class LineReader {
public:
    explicit LineReader(const std::filesystem::path& path) : path_(path), in_(path) {
        if (!in_) {
            throw IoError(path_.string() + ": cannot open file");
        }
    }

    bool next(std::string& line) {
        if (!std::getline(in_, line)) {
            return false;
        }
        ++line_no_;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        return true;
    }

    // Next line that is neither blank nor a comment.
    bool next_data(std::string& line) {
        while (next(line)) {
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '%') {
                continue;
            }
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw IoError(path_.string() + ":" + std::to_string(line_no_) + ": " + why);
    }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    int line_no_ = 0;
};

std::vector<std::string_view> split(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        if (i > start) {
            out.push_back(s.substr(start, i - start));
        }
    }
    return out;
}

template <typename T>
T parse_number(const LineReader& reader, std::string_view token, const char* what) {
    T value{};
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        reader.fail(std::string("invalid ") + what + " '" + std::string(token) + "'");
    }
    return value;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_comment(std::ofstream& out, const std::string& comment) {
    std::istringstream lines(comment);
    std::string line;
    while (std::getline(lines, line)) {
        out << '%' << line << '\n';
    }
}

} // namespace

MarketMatrix read_market(const std::filesystem::path& path) {
    LineReader reader(path);
    std::string line;
    if (!reader.next(line)) {
        reader.fail("empty file");
    }
    const auto header = split(line);
    if (header.size() != 5 || lower(std::string(header[0])) != "%%matrixmarket" ||
        lower(std::string(header[1])) != "matrix") {
        reader.fail("missing '%%MatrixMarket matrix <format> <field> <symmetry>' banner");
    }
    const std::string format = lower(std::string(header[2]));
    const std::string field = lower(std::string(header[3]));
    const std::string symmetry_name = lower(std::string(header[4]));

    if (format != "array" && format != "coordinate") {
        reader.fail("unsupported format '" + format + "'");
    }
    if (field != "real" && field != "integer" && field != "double") {
        reader.fail("unsupported field '" + field + "' (real or integer required)");
    }
    Symmetry symmetry = Symmetry::General;
    if (symmetry_name == "symmetric") {
        symmetry = Symmetry::Symmetric;
    } else if (symmetry_name == "skew-symmetric") {
        symmetry = Symmetry::SkewSymmetric;
    } else if (symmetry_name != "general") {
        reader.fail("unsupported symmetry '" + symmetry_name + "'");
    }

    if (!reader.next_data(line)) {
        reader.fail("missing size line");
    }
    const auto size_tokens = split(line);
    MarketMatrix result;

    if (format == "array") {
        if (size_tokens.size() != 2) {
            reader.fail("array size line must be '<rows> <cols>'");
        }
        const auto rows = parse_number<Index>(reader, size_tokens[0], "row count");
        const auto cols = parse_number<Index>(reader, size_tokens[1], "column count");
        if (rows <= 0 || cols <= 0) {
            reader.fail("non-positive dimensions");
        }
        if (symmetry != Symmetry::General && rows != cols) {
            reader.fail("symmetric array storage requires a square matrix");
        }
        result.layout = MarketMatrix::Layout::Array;
        result.dense = Eigen::MatrixXd::Zero(rows, cols);
        // Column-major; symmetric files hold the lower triangle only.
        for (Index j = 0; j < cols; ++j) {
            const Index first_row =
                symmetry == Symmetry::General ? 0 : (symmetry == Symmetry::Symmetric ? j : j + 1);
            for (Index i = first_row; i < rows; ++i) {
                if (!reader.next_data(line)) {
                    reader.fail("unexpected end of file in array data");
                }
                const auto tokens = split(line);
                if (tokens.size() != 1) {
                    reader.fail("expected one value per line");
                }
                const double v = parse_number<double>(reader, tokens[0], "value");
                result.dense(i, j) = v;
                if (symmetry == Symmetry::Symmetric) {
                    result.dense(j, i) = v;
                } else if (symmetry == Symmetry::SkewSymmetric) {
                    result.dense(j, i) = -v;
                }
            }
        }
    } else {
        if (size_tokens.size() != 3) {
            reader.fail("coordinate size line must be '<rows> <cols> <nnz>'");
        }
        const auto rows = parse_number<Index>(reader, size_tokens[0], "row count");
        const auto cols = parse_number<Index>(reader, size_tokens[1], "column count");
        const auto entries = parse_number<Index>(reader, size_tokens[2], "entry count");
        if (rows <= 0 || cols <= 0 || entries < 0) {
            reader.fail("invalid dimensions");
        }
        if (symmetry != Symmetry::General && rows != cols) {
            reader.fail("symmetric coordinate storage requires a square matrix");
        }
        std::vector<Eigen::Triplet<double, std::int64_t>> triplets;
        triplets.reserve(static_cast<std::size_t>(symmetry == Symmetry::General ? entries
                                                                                : 2 * entries));
        for (Index e = 0; e < entries; ++e) {
            if (!reader.next_data(line)) {
                reader.fail("unexpected end of file: expected " + std::to_string(entries) +
                            " entries, read " + std::to_string(e));
            }
            const auto tokens = split(line);
            if (tokens.size() != 3) {
                reader.fail("expected '<row> <col> <value>'");
            }
            const auto i = parse_number<Index>(reader, tokens[0], "row index") - 1;
            const auto j = parse_number<Index>(reader, tokens[1], "column index") - 1;
            const double v = parse_number<double>(reader, tokens[2], "value");
            if (i < 0 || i >= rows || j < 0 || j >= cols) {
                reader.fail("index out of range");
            }
            triplets.emplace_back(i, j, v);
            if (symmetry != Symmetry::General && i != j) {
                triplets.emplace_back(j, i, symmetry == Symmetry::Symmetric ? v : -v);
            }
        }
        result.layout = MarketMatrix::Layout::Coordinate;
        result.sparse.resize(rows, cols);
        result.sparse.setFromTriplets(triplets.begin(), triplets.end());
        result.sparse.makeCompressed();
    }
    return result;
}

void write_market_array(const Eigen::MatrixXd& m, const std::filesystem::path& path,
                        const std::string& comment) {
    std::ofstream out(path);
    if (!out) {
        throw IoError(path.string() + ": cannot open for writing");
    }
    out << "%%MatrixMarket matrix array real general\n";
    write_comment(out, comment);
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            out << format_double(m(i, j)) << '\n';
        }
    }
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

void write_market_symmetric(const SparseCsr& m, const std::filesystem::path& path,
                            const std::string& comment) {
    std::ofstream out(path);
    if (!out) {
        throw IoError(path.string() + ": cannot open for writing");
    }
    std::vector<Eigen::Triplet<double, std::int64_t>> lower_entries;
    for (Index i = 0; i < m.outerSize(); ++i) {
        for (SparseCsr::InnerIterator it(m, i); it; ++it) {
            if (it.col() <= it.row()) {
                lower_entries.emplace_back(it.row(), it.col(), it.value());
            }
        }
    }
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    write_comment(out, comment);
    out << m.rows() << ' ' << m.cols() << ' ' << lower_entries.size() << '\n';
    for (const auto& t : lower_entries) {
        out << t.row() + 1 << ' ' << t.col() + 1 << ' ' << format_double(t.value()) << '\n';
    }
    if (!out) {
        throw IoError(path.string() + ": write failed");
    }
}

std::pair<std::filesystem::path, std::filesystem::path>
low_rank_paths(const std::filesystem::path& path) {
    std::string stem = path.string();
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".mtx") {
        stem.resize(stem.size() - 4);
    }
    return {stem + ".B.mtx", stem + ".C.mtx"};
}

SpdOperator load_matrix(const std::filesystem::path& path) {
    auto to_operator = [&](MarketMatrix m, const std::filesystem::path& where) {
        if (m.rows() != m.cols()) {
            throw IoError(where.string() + ": matrix is not square (" + std::to_string(m.rows()) +
                          "x" + std::to_string(m.cols()) + ")");
        }
        if (m.rows() % 2 != 0) {
            throw IoError(where.string() + ": odd dimension " + std::to_string(m.rows()));
        }
        return m.layout == MarketMatrix::Layout::Array ? SpdOperator::dense(std::move(m.dense))
                                                       : SpdOperator::sparse(std::move(m.sparse));
    };

    if (std::filesystem::exists(path)) {
        return to_operator(read_market(path), path);
    }
    const auto [b_path, c_path] = low_rank_paths(path);
    if (!std::filesystem::exists(b_path) || !std::filesystem::exists(c_path)) {
        throw IoError(path.string() + ": no such file (and no " + b_path.string() + " / " +
                      c_path.string() + " pair)");
    }
    SpdOperator b = to_operator(read_market(b_path), b_path);
    MarketMatrix c = read_market(c_path);
    if (c.layout != MarketMatrix::Layout::Array) {
        throw IoError(c_path.string() + ": low-rank factor must use array format");
    }
    if (c.rows() != b.dim()) {
        throw IoError(c_path.string() + ": factor has " + std::to_string(c.rows()) +
                      " rows, expected " + std::to_string(b.dim()));
    }
    SparseCsr b_sparse = b.kind() == OperatorKind::Dense ? b.dense_matrix().sparseView()
                                                          : b.sparse_part();
    return SpdOperator::sparse_plus_low_rank(std::move(b_sparse), std::move(c.dense));
}

void store_matrix(const SpdOperator& op, const std::filesystem::path& path) {
    switch (op.kind()) {
    case OperatorKind::Dense:
        write_market_array(op.dense_matrix(), path);
        return;
    case OperatorKind::SparseCsr:
        write_market_symmetric(op.sparse_part(), path);
        return;
    case OperatorKind::SparsePlusLowRank: {
        const auto [b_path, c_path] = low_rank_paths(path);
        write_market_symmetric(op.sparse_part(), b_path, " sparse part B of A = B + C C^T");
        write_market_array(op.low_rank_factor(), c_path, " low-rank factor C of A = B + C C^T");
        return;
    }
    }
}

} // namespace sympen
