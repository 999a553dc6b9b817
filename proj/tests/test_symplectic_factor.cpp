#include <doctest.h>

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "sympen/errors.hpp"
#include "sympen/oracle.hpp"
#include "sympen/penalty.hpp"
#include "sympen/symplectic_factor.hpp"

using namespace sympen;
using helpers::dense_j;

namespace {

// Moduli of the eigenvalues of J M, sorted ascending with each +/- pair kept once.
Eigen::VectorXd jm_moduli(const Eigen::MatrixXd& m) {
    const Index k = m.rows() / 2;
    Eigen::EigenSolver<Eigen::MatrixXd> es(dense_j(k) * m, false);
    std::vector<double> im;
    for (Index i = 0; i < 2 * k; ++i) {
        im.push_back(std::abs(es.eigenvalues()(i).imag()));
    }
    std::sort(im.begin(), im.end());
    Eigen::VectorXd d(k);
    for (Index i = 0; i < k; ++i) {
        d(i) = im[2 * i];
    }
    return d;
}

} // namespace

TEST_CASE("skew_block_form puts a skew matrix in canonical block form") {
    Rng rng(1);
    const Eigen::MatrixXd u = rng.uniform_matrix(8, 8);
    const Eigen::MatrixXd k = u - u.transpose();
    const SkewBlockForm f = skew_block_form(k);
    CHECK((f.q.transpose() * f.q - Eigen::MatrixXd::Identity(8, 8)).norm() <= 1e-12);
    Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(8, 8);
    expect.topRightCorner(4, 4) = f.d.asDiagonal();
    expect.bottomLeftCorner(4, 4) = -f.d.asDiagonal().toDenseMatrix();
    CHECK((f.q.transpose() * k * f.q - expect).norm() <= 1e-12 * k.norm());
    CHECK(std::is_sorted(f.d.data(), f.d.data() + f.d.size()));
    CHECK(f.d.minCoeff() >= 0.0);
    CHECK_THROWS_AS(skew_block_form(Eigen::MatrixXd::Zero(3, 3)), ArgumentError);
}

TEST_CASE("ssvd examples") {
    SUBCASE("canonical frame") {
        const SsvdFactors f = ssvd(canonical_frame(3, 2));
        CHECK((f.sigma - Eigen::Vector2d(1, 1)).norm() <= 1e-14);
        CHECK(helpers::symplectic_defect(f.s) <= 1e-14);
    }
    SUBCASE("scaled frame") {
        const SsvdFactors f = ssvd(3.0 * canonical_frame(3, 2));
        CHECK((f.sigma - Eigen::Vector2d(3, 3)).norm() <= 1e-13);
    }
    SUBCASE("a known symplectic frame times a known scaling") {
        Rng rng(2);
        const Basis s = random_symplectic_frame(5, 2, rng);
        const Eigen::MatrixXd t = random_orthosymplectic(2, rng);
        const Basis x = s * Eigen::Vector4d(0.5, 2.0, 0.5, 2.0).asDiagonal() * t.transpose();
        const SsvdFactors f = ssvd(x);
        CHECK((f.sigma - Eigen::Vector2d(0.5, 2.0)).norm() <= 1e-10);
    }
    SUBCASE("zero matrix is rank deficient") {
        CHECK_THROWS_AS(ssvd(Basis::Zero(6, 4)), RankDeficientError);
    }
    SUBCASE("repeated columns are rank deficient") {
        Rng rng(3);
        Basis x = rng.uniform_matrix(8, 4);
        x.col(3) = x.col(0);
        CHECK_THROWS_AS(ssvd(x), RankDeficientError);
    }
    SUBCASE("shape errors") {
        CHECK_THROWS_AS(ssvd(Basis::Zero(6, 3)), ArgumentError);
        CHECK_THROWS(ssvd(Basis::Zero(4, 6)));
    }
}

TEST_CASE("ssvd invariants on random full-rank inputs") {
    Rng rng(4);
    for (int draw = 0; draw < 25; ++draw) {
        const Index n = 3 + draw % 6;
        const Index p = 1 + draw % n;
        const Basis x = rng.uniform_matrix(2 * n, 2 * p);
        const SsvdFactors f = ssvd(x);
        const double scale = x.norm();
        CHECK(helpers::symplectic_defect(f.s) <= 1e-10 * (1.0 + f.s.squaredNorm()));
        CHECK((f.t.transpose() * f.t - Eigen::MatrixXd::Identity(2 * p, 2 * p)).norm() <= 1e-10);
        CHECK((f.s * f.sigma_doubled().asDiagonal() * f.t.transpose() - x).norm() <=
              1e-10 * scale);
        CHECK(f.sigma.minCoeff() > 0.0);
        CHECK(std::is_sorted(f.sigma.data(), f.sigma.data() + p));
    }
}

TEST_CASE("williamson_small") {
    SUBCASE("identity") {
        const WilliamsonForm w = williamson_small(Eigen::MatrixXd::Identity(6, 6));
        CHECK((w.d - Eigen::Vector3d::Ones()).norm() <= 1e-13);
        CHECK(helpers::symplectic_defect(w.s) <= 1e-12);
    }
    SUBCASE("diag(2, 8) has d = 4") {
        const WilliamsonForm w = williamson_small(Eigen::Vector2d(2, 8).asDiagonal());
        CHECK(w.d(0) == doctest::Approx(4.0).epsilon(1e-14));
        CHECK((w.s.transpose() * Eigen::Vector2d(2, 8).asDiagonal() * w.s -
               4.0 * Eigen::MatrixXd::Identity(2, 2))
                  .norm() <= 1e-12);
    }
    SUBCASE("random k = 10 agrees with the eigenvalues of J M") {
        Rng rng(5);
        const Eigen::MatrixXd m = helpers::random_spd(20, rng);
        const WilliamsonForm w = williamson_small(m);
        CHECK(helpers::rel_diff(w.d, jm_moduli(m)) <= 1e-10);
        CHECK(helpers::symplectic_defect(w.s) <= 1e-10 * w.s.squaredNorm());
        Eigen::VectorXd dd(20);
        dd << w.d, w.d;
        CHECK(helpers::rel_diff(w.s.transpose() * m * w.s, dd.asDiagonal().toDenseMatrix()) <=
              1e-10);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(williamson_small(Eigen::MatrixXd::Identity(3, 3)), ArgumentError);
        Eigen::MatrixXd indefinite = Eigen::MatrixXd::Identity(4, 4);
        indefinite(1, 1) = -2.0;
        CHECK_THROWS_AS(williamson_small(indefinite), NumericalError);
    }
}

TEST_CASE("srr") {
    SUBCASE("Williamson-diagonal A and the canonical frame") {
        const auto op = helpers::williamson_diagonal(Eigen::Vector4d(1, 2, 3, 4));
        const RitzPairs r = srr(op, canonical_frame(4, 2));
        CHECK((r.theta - Eigen::Vector2d(1, 2)).norm() <= 1e-13);
    }
    SUBCASE("Ritz values are invariant under a right symplectic factor") {
        Rng rng(6);
        const auto op = helpers::random_operator(helpers::Kind::Sparse, 6, rng);
        const Basis x = rng.uniform_matrix(12, 4);
        const Eigen::MatrixXd t = random_symplectic(2, rng, 0.5);
        const RitzPairs a = srr(op, x);
        const RitzPairs b = srr(op, x * t);
        CHECK(helpers::rel_diff(a.theta, b.theta) <= 1e-9);
    }
    SUBCASE("output is symplectic and diagonalizes A") {
        Rng rng(7);
        const auto op = helpers::random_operator(helpers::Kind::Dense, 8, rng);
        const RitzPairs r = srr(op, rng.uniform_matrix(16, 6));
        CHECK(helpers::symplectic_defect(r.s) <= 1e-10 * r.s.squaredNorm());
        Eigen::VectorXd tt(6);
        tt << r.theta, r.theta;
        CHECK(helpers::rel_diff(r.s.transpose() * op.densify() * r.s,
                                tt.asDiagonal().toDenseMatrix()) <= 1e-10);
    }
    SUBCASE("Ritz values bound the true ones from above") {
        Rng rng(8);
        const auto op = helpers::random_operator(helpers::Kind::Dense, 8, rng);
        const ReferenceSpectrum ref = reference(op, 3);
        for (int i = 0; i < 5; ++i) {
            const RitzPairs r = srr(op, rng.uniform_matrix(16, 6));
            for (Index j = 0; j < 3; ++j) {
                CHECK(r.theta(j) >= ref.d(j) * (1 - 1e-12));
            }
        }
    }
    SUBCASE("exact invariant subspace recovers the spectrum") {
        Rng rng(9);
        const auto op = helpers::random_operator(helpers::Kind::LowRank, 6, rng);
        const ReferenceSpectrum ref = reference(op, 2);
        const RitzPairs r = srr(op, ref.x_ref * random_symplectic(2, rng, 0.5));
        CHECK(helpers::rel_diff(r.theta, ref.d.head(2)) <= 1e-10);
    }
}

TEST_CASE("restart_point") {
    const Basis e = canonical_frame(3, 2);
    SUBCASE("scales each pair by sqrt(1 - d / beta)") {
        const Basis x = restart_point(e, Eigen::Vector2d(1, 3), 4.0);
        CHECK(x(0, 0) == doctest::Approx(std::sqrt(0.75)));
        CHECK(x(3, 2) == doctest::Approx(std::sqrt(0.75)));
        CHECK(x(1, 1) == doctest::Approx(0.5));
        CHECK(x(4, 3) == doctest::Approx(0.5));
    }
    SUBCASE("floors the factor when d >= beta") {
        const Basis x = restart_point(e, Eigen::Vector2d(5, 9), 4.0);
        CHECK(x(0, 0) == doctest::Approx(1e-6));
        CHECK(x.allFinite());
    }
    SUBCASE("d = beta / 2 halves the squared scale") {
        const Basis x = restart_point(e, Eigen::Vector2d(2, 2), 4.0);
        CHECK((x - e / std::sqrt(2.0)).norm() <= 1e-15);
    }
    SUBCASE("exact eigenpairs give a stationary point") {
        Rng rng(11);
        const auto op = helpers::random_operator(helpers::Kind::Dense, 7, rng);
        const ReferenceSpectrum ref = reference(op, 3);
        const double beta = 2.0 * ref.d(2);
        const Basis x = restart_point(ref.x_ref, ref.d.head(3), beta);
        CHECK(grad(op, x, beta).gradient.norm() <= 1e-9 * op.frobenius_norm());
        // SRR of that point returns the same values
        CHECK(helpers::rel_diff(srr(op, x).theta, ref.d.head(3)) <= 1e-10);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(restart_point(e, Eigen::Vector2d(1, 3), 0.0), ArgumentError);
        CHECK_THROWS_AS(restart_point(e, Eigen::Vector3d(1, 2, 3), 4.0), ArgumentError);
    }
}

TEST_CASE("symplectic singular values square to the skew values of X^T J X") {
    // X^T J X = T diag(s, s) J_p diag(s, s) T^T, so the block-form values are
    // sigma^2 and none exceeds ||X||_2^2.
    Rng rng(10);
    for (int i = 0; i < 10; ++i) {
        const Basis x = rng.uniform_matrix(10, 4);
        const SsvdFactors f = ssvd(x);
        const SkewBlockForm k = skew_block_form(x.transpose() * dense_j(5) * x);
        CHECK(helpers::rel_diff(k.d, f.sigma.cwiseAbs2()) <= 1e-10);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
        CHECK(f.sigma.maxCoeff() <= svd.singularValues()(0) * (1 + 1e-12));
    }
}

TEST_CASE("residual bound in terms of the penalty gradient") {
    // With X = S Sigma T^T and L = beta (Sigma^3 J T^T - Sigma T^T J) T Sigma^{-1},
    // ||A S - J S L||_F <= sqrt(2p d_n / sigma_min(X^T A X)) ||grad f(X)||_F.
    Rng rng(12);
    for (int draw = 0; draw < 20; ++draw) {
        const Index n = 6, p = 2;
        const auto op = helpers::random_operator(helpers::Kind::Dense, n, rng);
        const ReferenceSpectrum ref = reference(op, p);
        const double beta = rng.uniform(1.1, 5.0) * ref.d(n - 1);
        const Basis x = ref.x_ref + rng.uniform(0.01, 0.5) * rng.uniform_matrix(2 * n, 2 * p);
        const SsvdFactors f = ssvd(x);
        const Eigen::MatrixXd sig = f.sigma_doubled().asDiagonal();
        const Eigen::MatrixXd sig3 = f.sigma_doubled().array().cube().matrix().asDiagonal();
        const Eigen::MatrixXd jp = dense_j(p);
        const Eigen::MatrixXd l = beta * (sig3 * jp * f.t.transpose() - sig * f.t.transpose() * jp) *
                                  f.t * f.sigma_doubled().cwiseInverse().asDiagonal();
        const Eigen::MatrixXd a = op.densify();
        const double lhs = (a * f.s - dense_j(n) * f.s * l).norm();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> xax(x.transpose() * a * x,
                                                           Eigen::EigenvaluesOnly);
        const double rhs = std::sqrt(2.0 * p * ref.d(n - 1) / xax.eigenvalues().minCoeff()) *
                           grad(op, x, beta).gradient.norm();
        CHECK(lhs <= rhs * (1 + 1e-10));
    }
}
