#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "sympen/errors.hpp"
#include "sympen/mmio.hpp"
#include "sympen/symplectic_factor.hpp"

using namespace sympen;
namespace fs = std::filesystem;

namespace {

fs::path write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
    return path;
}

} // namespace

TEST_CASE("dense store/load round trip is bit-exact") {
    const auto dir = helpers::scratch_dir("mmio_dense");
    Rng rng(11);
    const Eigen::MatrixXd a = helpers::random_spd(10, rng);
    store_matrix(SpdOperator::dense(a), dir / "a.mtx");
    const SpdOperator back = load_matrix(dir / "a.mtx");
    CHECK(back.kind() == OperatorKind::Dense);
    CHECK(back.half_dim() == 5);
    CHECK(back.dense_matrix() == a);
}

TEST_CASE("sparse store/load round trip keeps every entry") {
    const auto dir = helpers::scratch_dir("mmio_sparse");
    Rng rng(12);
    const SparseCsr b = helpers::random_spd_csr(16, 0.3, rng);
    store_matrix(SpdOperator::sparse(b), dir / "b.mtx");
    const SpdOperator back = load_matrix(dir / "b.mtx");
    CHECK(back.kind() == OperatorKind::SparseCsr);
    CHECK(Eigen::MatrixXd(back.sparse_part()) == Eigen::MatrixXd(b));
}

TEST_CASE("low-rank operators use the two-file convention") {
    const auto dir = helpers::scratch_dir("mmio_slr");
    Rng rng(13);
    const SparseCsr b = helpers::random_spd_csr(12, 0.3, rng);
    const Eigen::MatrixXd c = rng.uniform_matrix(12, 3);
    store_matrix(SpdOperator::sparse_plus_low_rank(b, c), dir / "slr.mtx");
    CHECK(fs::exists(dir / "slr.B.mtx"));
    CHECK(fs::exists(dir / "slr.C.mtx"));
    CHECK_FALSE(fs::exists(dir / "slr.mtx"));
    const SpdOperator back = load_matrix(dir / "slr.mtx");
    CHECK(back.kind() == OperatorKind::SparsePlusLowRank);
    CHECK(back.low_rank_factor() == c);
    CHECK(Eigen::MatrixXd(back.sparse_part()) == Eigen::MatrixXd(b));
}

TEST_CASE("upper-triangle coordinate file is mirrored") {
    const auto dir = helpers::scratch_dir("mmio_upper");
    const auto path = write_text(dir / "u.mtx",
                                 "%%MatrixMarket matrix coordinate real symmetric\n"
                                 "2 2 3\n"
                                 "1 1 4\n"
                                 "1 2 1.5\n"
                                 "2 2 9\n");
    const SpdOperator op = load_matrix(path);
    const Eigen::MatrixXd a = op.densify();
    CHECK(a(0, 1) == 1.5);
    CHECK(a(1, 0) == 1.5);
    CHECK(a(0, 0) == 4.0);
    CHECK(a(1, 1) == 9.0);
}

TEST_CASE("general coordinate and array files with integer fields") {
    const auto dir = helpers::scratch_dir("mmio_general");
    const auto coo = write_text(dir / "g.mtx",
                                "%%MatrixMarket matrix coordinate integer general\n"
                                "% comment line\n"
                                "\n"
                                "2 2 2\n"
                                "1 1 3\n"
                                "2 2 5\n");
    CHECK(load_matrix(coo).densify() == Eigen::Vector2d(3, 5).asDiagonal().toDenseMatrix());
    const auto arr = write_text(dir / "a.mtx",
                                "%%MatrixMarket matrix array real general\n"
                                "2 2\n1\n0\n0\n2\n");
    CHECK(load_matrix(arr).dense_matrix() ==
          Eigen::Vector2d(1, 2).asDiagonal().toDenseMatrix());
}

TEST_CASE("4x4 sample fixture") {
    const SpdOperator op = load_matrix(helpers::data_dir() / "sample4.mtx");
    CHECK(op.half_dim() == 2);
    CHECK(op.kind() == OperatorKind::SparseCsr);
    Eigen::MatrixXd expect = Eigen::Vector4d(2, 3, 8, 12).asDiagonal();
    expect(0, 1) = expect(1, 0) = 0.5;
    CHECK(op.densify() == expect);
    // Block-diagonal A = B (+) C gives d^2 = eig(B C); by hand,
    // B C = [[16, 6], [4, 36]] so d^2 solves x^2 - 52 x + 552 = 0.
    const WilliamsonForm w = williamson_small(op.densify());
    const double r = std::sqrt(52.0 * 52.0 / 4.0 - 552.0);
    CHECK(w.d(0) == doctest::Approx(std::sqrt(26.0 - r)).epsilon(1e-12));
    CHECK(w.d(1) == doctest::Approx(std::sqrt(26.0 + r)).epsilon(1e-12));
}

TEST_CASE("parse errors carry file and line") {
    const auto dir = helpers::scratch_dir("mmio_errors");
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_matrix(dir / "nope.mtx"), IoError);
    }
    SUBCASE("bad banner") {
        const auto p = write_text(dir / "b.mtx", "hello\n2 2 1\n1 1 1\n");
        CHECK_THROWS_WITH_AS(read_market(p), doctest::Contains("b.mtx:1"), IoError);
    }
    SUBCASE("bad entry line") {
        const auto p = write_text(dir / "e.mtx",
                                  "%%MatrixMarket matrix coordinate real general\n"
                                  "2 2 2\n1 1 1\n2 x 1\n");
        CHECK_THROWS_WITH_AS(read_market(p), doctest::Contains("e.mtx:4"), IoError);
    }
    SUBCASE("index out of range") {
        const auto p = write_text(dir / "r.mtx",
                                  "%%MatrixMarket matrix coordinate real general\n"
                                  "2 2 1\n3 1 1\n");
        CHECK_THROWS_AS(read_market(p), IoError);
    }
    SUBCASE("too few entries") {
        const auto p = write_text(dir / "t.mtx",
                                  "%%MatrixMarket matrix coordinate real general\n"
                                  "2 2 3\n1 1 1\n");
        CHECK_THROWS_AS(read_market(p), IoError);
    }
    SUBCASE("non-square") {
        const auto p = write_text(dir / "n.mtx",
                                  "%%MatrixMarket matrix array real general\n"
                                  "2 1\n1\n2\n");
        CHECK_THROWS_WITH_AS(load_matrix(p), doctest::Contains("not square"), IoError);
    }
    SUBCASE("odd dimension") {
        const auto p = write_text(dir / "o.mtx",
                                  "%%MatrixMarket matrix array real general\n"
                                  "1 1\n1\n");
        CHECK_THROWS_WITH_AS(load_matrix(p), doctest::Contains("odd"), IoError);
    }
}

TEST_CASE("comments are written into the header") {
    const auto dir = helpers::scratch_dir("mmio_comment");
    write_market_array(Eigen::MatrixXd::Identity(2, 2), dir / "c.mtx", "seed=7\nfamily=dense");
    std::ifstream f(dir / "c.mtx");
    std::string banner, c1, c2;
    std::getline(f, banner);
    std::getline(f, c1);
    std::getline(f, c2);
    CHECK(banner.rfind("%%MatrixMarket matrix array real general", 0) == 0);
    CHECK(c1 == "%seed=7");
    CHECK(c2 == "%family=dense");
}
