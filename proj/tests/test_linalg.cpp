#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "wg/linalg.hpp"

using namespace wg;

namespace {

SparseMatrix dense_to_csr(const DenseMatrix& a) {
    SparseBuilder builder(a.rows());
    std::vector<int> cols;
    std::vector<double> vals;
    for (int i = 0; i < a.rows(); ++i) {
        cols.clear();
        vals.clear();
        for (int j = 0; j < a.cols(); ++j)
            if (a(i, j) != 0.0) {
                cols.push_back(j);
                vals.push_back(a(i, j));
            }
        builder.add_row(cols, vals);
    }
    return builder.finish();
}

}  // namespace

TEST_CASE("dense solve: identity and diagonal") {
    DenseMatrix eye(3, 3);
    for (int i = 0; i < 3; ++i) eye(i, i) = 1.0;
    const Vector b{1.0, -2.0, 0.5};
    const Vector x = solve_dense(eye, b);
    for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-15));

    DenseMatrix d(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 4.0;
    const Vector y = solve_dense(d, Vector{2.0, 4.0});
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(1.0));
}

TEST_CASE("dense solve: random 50x50 against a known solution") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int n = 50;
    DenseMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = dist(rng);
        a(i, i) += 5.0;  // keep it comfortably conditioned
    }
    Vector x_true(n);
    for (double& v : x_true) v = dist(rng);
    const Vector b = a.apply(x_true);
    const Vector x = solve_dense(a, b);
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
        err += (x[i] - x_true[i]) * (x[i] - x_true[i]);
        scale += x_true[i] * x_true[i];
    }
    CHECK(std::sqrt(err / scale) <= 1e-10);
}

TEST_CASE("dense solve: singular matrix reports an error") {
    DenseMatrix a(2, 2);
    a(0, 0) = 1.0;
    a(0, 1) = 2.0;
    a(1, 0) = 2.0;
    a(1, 1) = 4.0;
    CHECK_THROWS_WITH_AS(solve_dense(a, Vector{1.0, 1.0}), doctest::Contains("singular"), std::runtime_error);
}

TEST_CASE("cholesky matches lu on an spd system") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int n = 12;
    DenseMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = dist(rng);
    DenseMatrix spd(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += g(k, i) * g(k, j);
            spd(i, j) = s + (i == j ? 0.5 : 0.0);
        }
    Vector b(n);
    for (double& v : b) v = dist(rng);
    const Vector x1 = CholeskyFactor(spd).solve(b);
    const Vector x2 = solve_dense(spd, b);
    for (int i = 0; i < n; ++i) CHECK(x1[i] == doctest::Approx(x2[i]).epsilon(1e-11));
}

TEST_CASE("symmetric eigenvalues") {
    DenseMatrix d(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    d(2, 2) = 2.0;
    Vector ev = symmetric_eigenvalues(d);
    CHECK(ev[0] == doctest::Approx(1.0));
    CHECK(ev[1] == doctest::Approx(2.0));
    CHECK(ev[2] == doctest::Approx(3.0));

    DenseMatrix offdiag(2, 2);
    offdiag(0, 1) = offdiag(1, 0) = 1.0;
    ev = symmetric_eigenvalues(offdiag);
    CHECK(ev[0] == doctest::Approx(-1.0));
    CHECK(ev[1] == doctest::Approx(1.0));

    // 2D Maxwell boundary operator at n = (0.6, 0.8).
    DenseMatrix dn(3, 3);
    dn(0, 2) = dn(2, 0) = 0.8;
    dn(1, 2) = dn(2, 1) = -0.6;
    ev = symmetric_eigenvalues(dn);
    CHECK(ev[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ev[2] == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(spectral_radius_of_eigenvalues(symmetric_eigenvalues(DenseMatrix(3, 3))) == 0.0);

    DenseMatrix diag2(3, 3);
    diag2(0, 0) = 2.0;
    diag2(1, 1) = -5.0;
    diag2(2, 2) = 1.0;
    CHECK(spectral_radius_of_eigenvalues(symmetric_eigenvalues(diag2)) == doctest::Approx(5.0));

    DenseMatrix bad(2, 2);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(symmetric_eigenvalues(bad), std::invalid_argument);
}

TEST_CASE("solve_sparse: identity and dense fallback") {
    DenseMatrix eye(4, 4);
    for (int i = 0; i < 4; ++i) eye(i, i) = 1.0;
    const SparseMatrix a = dense_to_csr(eye);
    const Vector b{1.0, 2.0, 3.0, 4.0};
    const std::vector<std::size_t> blocks{0, 2, 4};
    SolveReport report;
    const Vector x = solve_sparse(a, b, 1e-12, blocks, &report);
    CHECK(report.used_dense);
    for (int i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("solve_sparse: zero row is reported singular") {
    DenseMatrix a(3, 3);
    a(0, 0) = 1.0;
    a(2, 2) = 1.0;  // row 1 left empty
    a(1, 0) = 0.0;
    SparseBuilder builder(3);
    const int c0[] = {0};
    const double v0[] = {1.0};
    builder.add_row(std::span<const int>(c0, 1), std::span<const double>(v0, 1));
    builder.add_row({}, {});
    const int c2[] = {2};
    builder.add_row(std::span<const int>(c2, 1), std::span<const double>(v0, 1));
    const SparseMatrix sp = builder.finish();
    const std::vector<std::size_t> blocks{0, 3};
    CHECK_THROWS_AS(solve_sparse(sp, Vector{1.0, 1.0, 1.0}, 1e-12, blocks), std::runtime_error);
}

TEST_CASE("gmres: non-convergence on an inconsistent singular system") {
    DenseMatrix a(2, 2);
    a(0, 0) = a(0, 1) = a(1, 0) = a(1, 1) = 1.0;
    const SparseMatrix sp = dense_to_csr(a);
    const std::vector<std::size_t> blocks{0, 1, 2};
    GmresOptions opt;
    opt.max_iterations = 50;
    CHECK_THROWS_WITH_AS(gmres_block_jacobi(sp, Vector{1.0, 0.0}, 1e-12, blocks, opt, nullptr),
                         doctest::Contains("no convergence"), std::runtime_error);
}

TEST_CASE("gmres with block jacobi solves a large nonsymmetric block system") {
    // Block tridiagonal convection-diffusion-like system, n > 3000 so the
    // iterative path is exercised.
    const int nb = 1500, bs = 3;
    const int n = nb * bs;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-0.3, 0.3);
    SparseBuilder builder(n);
    std::vector<int> cols;
    std::vector<double> vals;
    auto block_entry = [&](int bi, int bj, int r, int c) {
        double v = dist(rng);
        if (bi == bj && r == c) v += 4.0;
        if (bi < bj) v += 0.5;  // nonsymmetric coupling
        return v;
    };
    for (int bi = 0; bi < nb; ++bi)
        for (int r = 0; r < bs; ++r) {
            cols.clear();
            vals.clear();
            for (int bj = std::max(0, bi - 1); bj <= std::min(nb - 1, bi + 1); ++bj)
                for (int c = 0; c < bs; ++c) {
                    cols.push_back(bj * bs + c);
                    vals.push_back(block_entry(bi, bj, r, c));
                }
            builder.add_row(cols, vals);
        }
    const SparseMatrix a = builder.finish();
    std::vector<std::size_t> blocks(nb + 1);
    for (int i = 0; i <= nb; ++i) blocks[i] = static_cast<std::size_t>(i) * bs;

    Vector x_true(n);
    for (double& v : x_true) v = dist(rng);
    const Vector b = a.apply(x_true);
    SolveReport report;
    const Vector x = solve_sparse(a, b, 1e-12, blocks, &report);
    CHECK_FALSE(report.used_dense);
    CHECK(report.residual <= 1e-12);

    // matvec then solve round-trips the vector
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
        err += (x[i] - x_true[i]) * (x[i] - x_true[i]);
        scale += x_true[i] * x_true[i];
    }
    CHECK(std::sqrt(err / scale) <= 1e-9);
}
