#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "sympen/errors.hpp"
#include "sympen/oracle.hpp"
#include "sympen/testgen.hpp"

using namespace sympen;

namespace {

Eigen::VectorXd eigenvalues(const SpdOperator& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.densify(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

} // namespace

TEST_CASE("gen_dense maps the spectrum onto [1, n]") {
    for (Index n : {5, 40}) {
        const SpdOperator op = gen_dense(n, 1);
        CHECK(op.kind() == OperatorKind::Dense);
        CHECK(op.half_dim() == n);
        const Eigen::VectorXd ev = eigenvalues(op);
        CHECK(ev(0) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(ev(ev.size() - 1) == doctest::Approx(static_cast<double>(n)).epsilon(1e-8));
        CHECK(op.dense_matrix() == op.dense_matrix().transpose());
    }
}

TEST_CASE("gen_sparse maps the spectrum onto [1, n] and stays sparse") {
    const Index n = 60;
    const SpdOperator op = gen_sparse(n, 0.05, 2);
    CHECK(op.kind() == OperatorKind::SparseCsr);
    const Eigen::VectorXd ev = eigenvalues(op);
    CHECK(ev(0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(ev(ev.size() - 1) == doctest::Approx(60.0).epsilon(1e-8));
    // density 0.05 targets about 0.05 * (2n)^2 off-diagonal cells plus the diagonal
    const double cells = 0.05 * 4.0 * n * n;
    CHECK(static_cast<double>(op.nnz()) <= cells + 2.0 * n);
    CHECK(static_cast<double>(op.nnz()) >= 0.5 * cells);
    CHECK(symmetry_defect(op, 2) <= 1e-14);
}

TEST_CASE("gen_slr keeps the low-rank part factored and scaled") {
    const Index n = 30, m = 4;
    const SpdOperator op = gen_slr(n, 0.1, m, 3);
    CHECK(op.kind() == OperatorKind::SparsePlusLowRank);
    const Eigen::MatrixXd& c = op.low_rank_factor();
    CHECK(c.cols() == m);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c);
    CHECK(svd.singularValues()(0) * svd.singularValues()(0) ==
          doctest::Approx(static_cast<double>(n)).epsilon(1e-10));
    // the sparse part is the sparse family instance with the same seed
    CHECK(Eigen::MatrixXd(op.sparse_part()) == Eigen::MatrixXd(gen_sparse(n, 0.1, 3).sparse_part()));
    Rng rng(1);
    const Basis x = rng.uniform_matrix(2 * n, 6);
    CHECK(helpers::rel_diff(op.apply(x), op.densify() * x) <= 1e-12);
    CHECK(eigenvalues(op)(0) >= 1.0 - 1e-8);
}

TEST_CASE("gen_prescribed returns its exact Williamson form") {
    const Index n = 10;
    Rng rng(4);
    Eigen::VectorXd d(n);
    for (Index i = 0; i < n; ++i) {
        d(i) = rng.uniform(0.5, 5.0);
    }
    const GeneratedInstance inst = gen_prescribed(n, d, 5);
    REQUIRE(inst.reference);
    const ReferenceSpectrum& ref = *inst.reference;
    Eigen::VectorXd sorted = d;
    std::sort(sorted.data(), sorted.data() + n);
    CHECK(ref.d == sorted);
    CHECK(helpers::symplectic_defect(ref.s_full) <= 1e-10 * ref.s_full.squaredNorm());
    Eigen::VectorXd dd(2 * n);
    dd << ref.d, ref.d;
    CHECK(helpers::rel_diff(ref.s_full.transpose() * inst.op.densify() * ref.s_full,
                            dd.asDiagonal().toDenseMatrix()) <= 1e-10);
    // the dense oracle agrees
    const ReferenceSpectrum oracle = reference(inst.op, 3);
    CHECK((oracle.d - sorted).cwiseAbs().maxCoeff() <= 1e-8 * sorted.maxCoeff());
}

TEST_CASE("gen_prescribed with all-ones spectrum is S^{-T} S^{-1}") {
    const GeneratedInstance inst = gen_prescribed(4, Eigen::VectorXd::Ones(4), 6);
    const Eigen::MatrixXd& s = inst.reference->s_full;
    const Eigen::MatrixXd expect = (s * s.transpose()).inverse();
    CHECK(helpers::rel_diff(inst.op.densify(), expect) <= 1e-10);
}

TEST_CASE("generate dispatches and uses the defaults") {
    GeneratorSpec request;
    request.family = Family::PrescribedSpectrum;
    request.n = 6;
    request.seed = 1;
    const GeneratedInstance inst = generate(request);
    CHECK(inst.reference->d == Eigen::VectorXd::LinSpaced(6, 1, 6));

    request.family = Family::Sparse;
    request.n = 200;
    CHECK(request.resolved_density() == doctest::Approx(0.05));
    request.n = 5;
    CHECK(request.resolved_density() == 1.0);
    CHECK_FALSE(generate(request).reference);

    CHECK(parse_family("slr") == Family::SparsePlusLowRank);
    CHECK(to_string(Family::Dense) == "dense");
    CHECK_THROWS_AS(parse_family("banded"), ArgumentError);
}

TEST_CASE("generators are deterministic in the seed") {
    CHECK(gen_dense(8, 3).dense_matrix() == gen_dense(8, 3).dense_matrix());
    CHECK(gen_dense(8, 3).dense_matrix() != gen_dense(8, 4).dense_matrix());
    CHECK(Eigen::MatrixXd(gen_sparse(20, 0.2, 3).sparse_part()) ==
          Eigen::MatrixXd(gen_sparse(20, 0.2, 3).sparse_part()));
    CHECK(gen_slr(20, 0.2, 3, 3).low_rank_factor() == gen_slr(20, 0.2, 3, 3).low_rank_factor());
    const Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(5, 1, 5);
    CHECK(gen_prescribed(5, d, 9).op.dense_matrix() == gen_prescribed(5, d, 9).op.dense_matrix());
}

TEST_CASE("Lanczos extremes agree with the dense eigensolver") {
    for (auto kind : {helpers::Kind::Dense, helpers::Kind::Sparse, helpers::Kind::LowRank}) {
        CAPTURE(helpers::kind_name(kind));
        Rng rng(7);
        const auto op = helpers::random_operator(kind, 40, rng);
        const auto [lo, hi] = extreme_eigenvalues(op);
        const auto [llo, lhi] = lanczos_extremes(op, 3);
        CHECK(llo == doctest::Approx(lo).epsilon(1e-6));
        CHECK(lhi == doctest::Approx(hi).epsilon(1e-6));
    }
}

TEST_CASE("generator argument errors") {
    CHECK_THROWS_AS(gen_dense(0, 1), ArgumentError);
    CHECK_THROWS_AS(gen_dense(kDenseBudget, 1), ArgumentError);
    CHECK_THROWS_AS(gen_sparse(10, 0.0, 1), ArgumentError);
    CHECK_THROWS_AS(gen_sparse(10, 1.5, 1), ArgumentError);
    CHECK_THROWS_AS(gen_slr(10, 0.5, 0, 1), ArgumentError);
    CHECK_THROWS_AS(gen_slr(10, 0.5, 20, 1), ArgumentError);
    CHECK_THROWS_AS(gen_prescribed(3, Eigen::Vector2d(1, 2), 1), ArgumentError);
    CHECK_THROWS_AS(gen_prescribed(2, Eigen::Vector2d(1, -2), 1), ArgumentError);

    GeneratorSpec request;
    request.n = 0;
    CHECK_THROWS_AS(request.validate(), ArgumentError);
    request.n = 4;
    request.family = Family::PrescribedSpectrum;
    request.spectrum = Eigen::Vector3d(1, 2, 3);
    CHECK_THROWS_AS(generate(request), ArgumentError);
}
