#ifndef WG_LINALG_HPP
#define WG_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace wg {

using Vector = std::vector<double>;

/// Row-major dense matrix with the factorizations needed for local blocks.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    void resize(int rows, int cols);
    void set_zero();
    double max_abs() const;

    DenseMatrix transposed() const;

    /// this * x
    Vector apply(std::span<const double> x) const;
    /// this^T * x
    Vector apply_transposed(std::span<const double> x) const;

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

/// LU factorization with partial pivoting. Throws on (near-)singular input:
/// a pivot counts as singular when |pivot| < 1e-14 * max|A|.
class LuFactor {
public:
    explicit LuFactor(DenseMatrix a);
    Vector solve(std::span<const double> b) const;
    void solve_in_place(std::span<double> b) const;
    int size() const { return lu_.rows(); }

private:
    DenseMatrix lu_;
    std::vector<int> perm_;
};

/// Cholesky factorization for symmetric positive definite matrices (mass matrices).
class CholeskyFactor {
public:
    explicit CholeskyFactor(const DenseMatrix& a);
    Vector solve(std::span<const double> b) const;
    int size() const { return l_.rows(); }

private:
    DenseMatrix l_;
};

Vector solve_dense(const DenseMatrix& a, std::span<const double> b);

/// All eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi rotations.
/// Throws if the input is not symmetric to 1e-10 (relative to its magnitude).
Vector symmetric_eigenvalues(const DenseMatrix& s);

inline double spectral_radius_of_eigenvalues(const Vector& ev) {
    double r = 0.0;
    for (double v : ev) r = std::max(r, std::abs(v));
    return r;
}

/// Compressed sparse row matrix. Column indices are strictly increasing per row.
struct SparseMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> row_offsets;  // size n+1
    std::vector<int> cols;
    std::vector<double> vals;

    Vector apply(std::span<const double> x) const;
};

/// Row-by-row CSR assembly helper; rows must be finalized in order.
class SparseBuilder {
public:
    explicit SparseBuilder(std::size_t n);
    /// Append one row given (col, value) pairs sorted by column.
    void add_row(std::span<const int> cols, std::span<const double> vals);
    SparseMatrix finish();

private:
    SparseMatrix m_;
    std::size_t next_row_ = 0;
};

struct SolveReport {
    int iterations = 0;      // total Krylov iterations (0 for the dense path)
    double residual = 0.0;   // final true relative residual
    bool used_dense = false;
};

/// Solve A x = b to a relative residual <= tol. Systems with n <= 3000 go
/// through dense LU; larger ones use restarted GMRES(60) preconditioned by
/// block Jacobi on the given block partition (block_offsets = prefix array,
/// block_offsets.front() == 0, block_offsets.back() == n).
/// Throws SolverError on breakdown or when the iteration cap is reached.
Vector solve_sparse(const SparseMatrix& a, std::span<const double> b, double tol,
                    std::span<const std::size_t> block_offsets, SolveReport* report = nullptr);

struct GmresOptions {
    int restart = 60;
    int max_iterations = 40000;
};

Vector gmres_block_jacobi(const SparseMatrix& a, std::span<const double> b, double tol,
                          std::span<const std::size_t> block_offsets, const GmresOptions& opt,
                          SolveReport* report);

// Small helpers shared across modules.
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace wg

#endif
