#include "wg/linalg.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

namespace wg {

void DenseMatrix::resize(int rows, int cols) {
    rows_ = rows;
    cols_ = cols;
    a_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

void DenseMatrix::set_zero() { std::fill(a_.begin(), a_.end(), 0.0); }

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Vector DenseMatrix::apply(std::span<const double> x) const {
    assert(static_cast<int>(x.size()) == cols_);
    Vector y(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        const double* row = a_.data() + static_cast<std::size_t>(i) * cols_;
        double s = 0.0;
        for (int j = 0; j < cols_; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

Vector DenseMatrix::apply_transposed(std::span<const double> x) const {
    assert(static_cast<int>(x.size()) == rows_);
    Vector y(cols_, 0.0);
    for (int i = 0; i < rows_; ++i) {
        const double* row = a_.data() + static_cast<std::size_t>(i) * cols_;
        for (int j = 0; j < cols_; ++j) y[j] += row[j] * x[i];
    }
    return y;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    assert(a.cols() == b.rows());
    DenseMatrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

LuFactor::LuFactor(DenseMatrix a) : lu_(std::move(a)) {
    if (lu_.rows() != lu_.cols()) throw std::invalid_argument("LuFactor: matrix must be square");
    const int n = lu_.rows();
    const double tiny = 1e-14 * std::max(lu_.max_abs(), 1e-300);
    perm_.resize(n);
    for (int i = 0; i < n; ++i) perm_[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(lu_(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(lu_(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best < tiny) throw std::runtime_error("LuFactor: singular matrix (pivot " + std::to_string(best) + ")");
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
            std::swap(perm_[k], perm_[p]);
        }
        const double inv = 1.0 / lu_(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double l = lu_(i, k) * inv;
            lu_(i, k) = l;
            if (l == 0.0) continue;
            for (int j = k + 1; j < n; ++j) lu_(i, j) -= l * lu_(k, j);
        }
    }
}

void LuFactor::solve_in_place(std::span<double> b) const {
    const int n = lu_.rows();
    assert(static_cast<int>(b.size()) == n);
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = b[perm_[i]];
    for (int i = 0; i < n; ++i) {
        double s = y[i];
        for (int j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
        y[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int j = i + 1; j < n; ++j) s -= lu_(i, j) * y[j];
        y[i] = s / lu_(i, i);
    }
    std::copy(y.begin(), y.end(), b.begin());
}

Vector LuFactor::solve(std::span<const double> b) const {
    Vector x(b.begin(), b.end());
    solve_in_place(x);
    return x;
}

CholeskyFactor::CholeskyFactor(const DenseMatrix& a) : l_(a.rows(), a.cols()) {
    if (a.rows() != a.cols()) throw std::invalid_argument("CholeskyFactor: matrix must be square");
    const int n = a.rows();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("CholeskyFactor: matrix not positive definite");
                l_(i, i) = std::sqrt(s);
            } else {
                l_(i, j) = s / l_(j, j);
            }
        }
    }
}

Vector CholeskyFactor::solve(std::span<const double> b) const {
    const int n = l_.rows();
    assert(static_cast<int>(b.size()) == n);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int j = 0; j < i; ++j) s -= l_(i, j) * y[j];
        y[i] = s / l_(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int j = i + 1; j < n; ++j) s -= l_(j, i) * y[j];
        y[i] = s / l_(i, i);
    }
    return y;
}

Vector solve_dense(const DenseMatrix& a, std::span<const double> b) { return LuFactor(a).solve(b); }

Vector symmetric_eigenvalues(const DenseMatrix& s) {
    if (s.rows() != s.cols()) throw std::invalid_argument("symmetric_eigenvalues: matrix must be square");
    const int n = s.rows();
    const double scale = std::max(s.max_abs(), 1e-300);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(s(i, j) - s(j, i)) > 1e-10 * scale)
                throw std::invalid_argument("symmetric_eigenvalues: matrix is not symmetric");

    DenseMatrix a = s;
    auto off_norm = [&a, n]() {
        double t = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) t += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(t);
    };
    double full = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) full += a(i, j) * a(i, j);
    full = std::sqrt(full);
    const double target = 1e-13 * std::max(full, 1e-300);

    for (int sweep = 0; sweep < 100 && off_norm() > target; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
            }
        }
    }
    Vector ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

Vector SparseMatrix::apply(std::span<const double> x) const {
    assert(x.size() == n);
    Vector y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t p = row_offsets[i]; p < row_offsets[i + 1]; ++p) s += vals[p] * x[cols[p]];
        y[i] = s;
    }
    return y;
}

SparseBuilder::SparseBuilder(std::size_t n) {
    m_.n = n;
    m_.row_offsets.assign(1, 0);
    m_.row_offsets.reserve(n + 1);
}

void SparseBuilder::add_row(std::span<const int> cols, std::span<const double> vals) {
    assert(cols.size() == vals.size());
    assert(next_row_ < m_.n);
    for (std::size_t i = 1; i < cols.size(); ++i) assert(cols[i] > cols[i - 1]);
    m_.cols.insert(m_.cols.end(), cols.begin(), cols.end());
    m_.vals.insert(m_.vals.end(), vals.begin(), vals.end());
    m_.row_offsets.push_back(m_.cols.size());
    ++next_row_;
}

SparseMatrix SparseBuilder::finish() {
    if (next_row_ != m_.n) throw std::logic_error("SparseBuilder: not all rows were added");
    return std::move(m_);
}

double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

namespace {

// Factored diagonal blocks of the matrix, used as a right preconditioner.
class BlockJacobi {
public:
    BlockJacobi(const SparseMatrix& a, std::span<const std::size_t> offsets) : offsets_(offsets.begin(), offsets.end()) {
        if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != a.n)
            throw std::invalid_argument("BlockJacobi: block offsets must cover [0, n]");
        blocks_.reserve(offsets_.size() - 1);
        for (std::size_t b = 0; b + 1 < offsets_.size(); ++b) {
            const std::size_t lo = offsets_[b], hi = offsets_[b + 1];
            const int nb = static_cast<int>(hi - lo);
            DenseMatrix blk(nb, nb);
            for (std::size_t i = lo; i < hi; ++i) {
                for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
                    const std::size_t j = static_cast<std::size_t>(a.cols[p]);
                    if (j >= lo && j < hi) blk(static_cast<int>(i - lo), static_cast<int>(j - lo)) = a.vals[p];
                }
            }
            blocks_.emplace_back(std::move(blk));
        }
    }

    void apply(std::span<const double> x, std::span<double> y) const {
        std::copy(x.begin(), x.end(), y.begin());
        for (std::size_t b = 0; b < blocks_.size(); ++b)
            blocks_[b].solve_in_place(y.subspan(offsets_[b], offsets_[b + 1] - offsets_[b]));
    }

private:
    std::vector<std::size_t> offsets_;
    std::vector<LuFactor> blocks_;
};

}  // namespace

Vector gmres_block_jacobi(const SparseMatrix& a, std::span<const double> b, double tol,
                          std::span<const std::size_t> block_offsets, const GmresOptions& opt,
                          SolveReport* report) {
    const std::size_t n = a.n;
    const double bnorm = norm2(b);
    Vector x(n, 0.0);
    if (bnorm == 0.0) {
        if (report) *report = {0, 0.0, false};
        return x;
    }
    const BlockJacobi prec(a, block_offsets);
    const int m = opt.restart;
    std::vector<Vector> v(m + 1, Vector(n));
    std::vector<Vector> h(m + 1, Vector(m, 0.0));  // h[i][j], i row, j column
    Vector cs(m, 0.0), sn(m, 0.0), g(m + 1, 0.0);
    Vector tmp(n), residual_vec(n);
    int total_iters = 0;
    double true_rel = 1.0;

    while (total_iters < opt.max_iterations) {
        // r = b - A x
        residual_vec = a.apply(x);
        for (std::size_t i = 0; i < n; ++i) residual_vec[i] = b[i] - residual_vec[i];
        double beta = norm2(residual_vec);
        true_rel = beta / bnorm;
        if (true_rel <= tol) break;

        for (std::size_t i = 0; i < n; ++i) v[0][i] = residual_vec[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        int j = 0;
        for (; j < m && total_iters < opt.max_iterations; ++j, ++total_iters) {
            prec.apply(v[j], tmp);
            Vector w = a.apply(tmp);
            for (int i = 0; i <= j; ++i) {
                const double hij = dot(w, v[i]);
                h[i][j] = hij;
                axpy(-hij, v[i], w);
            }
            const double hnext = norm2(w);
            h[j + 1][j] = hnext;
            if (hnext > 0.0)
                for (std::size_t i = 0; i < n; ++i) v[j + 1][i] = w[i] / hnext;

            for (int i = 0; i < j; ++i) {
                const double t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            const double denom = std::hypot(h[j][j], h[j + 1][j]);
            if (denom == 0.0) {
                ++total_iters;  // breakdown: drop this direction, keep the cap ticking
                break;
            }
            cs[j] = h[j][j] / denom;
            sn[j] = h[j + 1][j] / denom;
            h[j][j] = denom;
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            if (std::abs(g[j + 1]) / bnorm <= 0.2 * tol) {
                ++j;
                ++total_iters;
                break;
            }
        }

        // y = H^{-1} g, x += M^{-1} (V y)
        Vector y(j, 0.0);
        for (int i = j - 1; i >= 0; --i) {
            double s = g[i];
            for (int k = i + 1; k < j; ++k) s -= h[i][k] * y[k];
            y[i] = s / h[i][i];
        }
        std::fill(tmp.begin(), tmp.end(), 0.0);
        for (int i = 0; i < j; ++i) axpy(y[i], v[i], tmp);
        Vector corr(n);
        prec.apply(tmp, corr);
        axpy(1.0, corr, std::span<double>(x));
    }

    residual_vec = a.apply(x);
    for (std::size_t i = 0; i < n; ++i) residual_vec[i] = b[i] - residual_vec[i];
    true_rel = norm2(residual_vec) / bnorm;
    if (report) *report = {total_iters, true_rel, false};
    if (!(true_rel <= tol))
        throw std::runtime_error("gmres_block_jacobi: no convergence after " + std::to_string(total_iters) +
                                 " iterations (residual " + std::to_string(true_rel) + ")");
    return x;
}

Vector solve_sparse(const SparseMatrix& a, std::span<const double> b, double tol,
                    std::span<const std::size_t> block_offsets, SolveReport* report) {
    if (a.n != b.size()) throw std::invalid_argument("solve_sparse: dimension mismatch");
    if (a.n <= 3000) {
        DenseMatrix dense(static_cast<int>(a.n), static_cast<int>(a.n));
        for (std::size_t i = 0; i < a.n; ++i)
            for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p)
                dense(static_cast<int>(i), a.cols[p]) = a.vals[p];
        Vector x = solve_dense(dense, b);
        if (report) {
            Vector r = a.apply(x);
            for (std::size_t i = 0; i < a.n; ++i) r[i] = b[i] - r[i];
            const double bn = norm2(b);
            *report = {0, bn > 0 ? norm2(r) / bn : 0.0, true};
        }
        return x;
    }
    return gmres_block_jacobi(a, b, tol, block_offsets, GmresOptions{}, report);
}

}  // namespace wg
