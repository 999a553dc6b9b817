#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "sympen/operators.hpp"
#include "sympen/rng.hpp"

namespace helpers {

using sympen::Basis;
using sympen::Index;
using sympen::Rng;
using sympen::SparseCsr;
using sympen::SpdOperator;

// J_k written out entry by entry, independent of the library's kernels.
inline Eigen::MatrixXd dense_j(Index k) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * k, 2 * k);
    for (Index i = 0; i < k; ++i) {
        j(i, k + i) = 1.0;
        j(k + i, i) = -1.0;
    }
    return j;
}

inline Eigen::MatrixXd random_spd(Index dim, Rng& rng) {
    const Eigen::MatrixXd u = rng.uniform_matrix(dim, dim);
    Eigen::MatrixXd m = u * u.transpose() / static_cast<double>(dim);
    m.diagonal().array() += 1.0;
    return 0.5 * (m + m.transpose());
}

// Symmetric sparse matrix with a dominant diagonal, so it is SPD.
inline SparseCsr random_spd_csr(Index dim, double density, Rng& rng) {
    std::vector<Eigen::Triplet<double, std::int64_t>> t;
    Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < i; ++j) {
            if (rng.uniform01() < density) {
                const double v = rng.uniform(-1.0, 1.0);
                t.emplace_back(i, j, v);
                t.emplace_back(j, i, v);
                row_sum(i) += std::abs(v);
                row_sum(j) += std::abs(v);
            }
        }
    }
    for (Index i = 0; i < dim; ++i) {
        t.emplace_back(i, i, row_sum(i) + 1.0 + rng.uniform01());
    }
    SparseCsr m(dim, dim);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

enum class Kind { Dense, Sparse, LowRank };

inline const char* kind_name(Kind k) {
    switch (k) {
    case Kind::Dense:
        return "dense";
    case Kind::Sparse:
        return "sparse";
    case Kind::LowRank:
        return "slr";
    }
    return "?";
}

inline SpdOperator random_operator(Kind kind, Index n, Rng& rng) {
    switch (kind) {
    case Kind::Dense:
        return SpdOperator::dense(random_spd(2 * n, rng));
    case Kind::Sparse:
        return SpdOperator::sparse(random_spd_csr(2 * n, 0.2, rng));
    case Kind::LowRank:
        return SpdOperator::sparse_plus_low_rank(random_spd_csr(2 * n, 0.2, rng),
                                                 rng.uniform_matrix(2 * n, 3));
    }
    return SpdOperator::dense(Eigen::MatrixXd::Identity(2 * n, 2 * n));
}

// diag(d, d): already in Williamson form with the canonical basis.
inline SpdOperator williamson_diagonal(const Eigen::VectorXd& d) {
    Eigen::VectorXd dd(2 * d.size());
    dd << d, d;
    return SpdOperator::dense(dd.asDiagonal().toDenseMatrix());
}

inline double symplectic_defect(const Basis& s) {
    const Index n = s.rows() / 2;
    const Index p = s.cols() / 2;
    return (s.transpose() * dense_j(n) * s - dense_j(p)).norm();
}

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double scale = std::max(a.norm(), b.norm());
    return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("sympen_test_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::filesystem::path data_dir() {
    if (const char* env = std::getenv("SYMPEN_TEST_DATA")) {
        return env;
    }
    return std::filesystem::path(__FILE__).parent_path() / "data";
}

} // namespace helpers
