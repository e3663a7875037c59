#include "wg/assembly.hpp"

#include <cassert>
#include <cmath>
#include <map>
#include <stdexcept>

namespace wg {

namespace {

int poly_dim(int k) { return (k + 1) * (k + 2) / 2; }
int cell_exactness(int k) { return 2 * k + 2; }
int edge_exactness(int k) { return 2 * k + 3; }

struct CellData {
    CellBasis basis;
    QuadratureRule rule;
    DenseMatrix phi;    // npts x n_k
    DenseMatrix dphix;  // npts x n_k
    DenseMatrix dphiy;
};

CellData make_cell_data(const WeakMesh& mesh, int cell, int k) {
    CellData d{CellBasis(mesh, cell, k), cell_quadrature(mesh, cell, cell_exactness(k)), {}, {}, {}};
    const int nk = d.basis.dim();
    const int npts = static_cast<int>(d.rule.size());
    d.phi = d.basis.eval_at(d.rule.points);
    d.dphix.resize(npts, nk);
    d.dphiy.resize(npts, nk);
    std::vector<double> gx(nk), gy(nk);
    for (int p = 0; p < npts; ++p) {
        d.basis.eval_grad(d.rule.points[p], gx, gy);
        for (int i = 0; i < nk; ++i) {
            d.dphix(p, i) = gx[i];
            d.dphiy(p, i) = gy[i];
        }
    }
    return d;
}

struct EdgeData {
    EdgeBasis basis;
    QuadratureRule rule;
    DenseMatrix psi;  // npts x (k+1)
};

EdgeData make_edge_data(const WeakMesh& mesh, int edge, int k) {
    EdgeData d{EdgeBasis(mesh, edge, k), edge_quadrature(mesh, edge, edge_exactness(k)), {}};
    d.psi = d.basis.eval_at(d.rule.points);
    return d;
}

// Trace moments G(c, b) = integral over the edge of psi_c phi_b for the given
// cell's basis.
DenseMatrix trace_moments(const EdgeData& ed, const CellBasis& cell_basis) {
    const int nk = cell_basis.dim();
    const int ne = ed.basis.dim();
    const DenseMatrix tphi = cell_basis.eval_at(ed.rule.points);
    DenseMatrix g(ne, nk);
    for (std::size_t p = 0; p < ed.rule.size(); ++p) {
        const double w = ed.rule.weights[p];
        for (int c = 0; c < ne; ++c) {
            const double wc = w * ed.psi(static_cast<int>(p), c);
            for (int b = 0; b < nk; ++b) g(c, b) += wc * tphi(static_cast<int>(p), b);
        }
    }
    return g;
}

// Boundary-edge trace system S = <(1/2 (M - D_n) + mu I) ub, vb>_e as a dense
// m(k+1) matrix.
DenseMatrix boundary_trace_system(const FriedrichsSystem& sys, const WeakMesh& mesh, int edge,
                                  const EdgeData& ed) {
    const int m = sys.m;
    const int ne = ed.basis.dim();
    const Vec2 n = mesh.edges[edge].normal;  // outward on the boundary
    DenseMatrix s(m * ne, m * ne);
    DenseMatrix a1(m, m), a2(m, m), bm(m, m);
    for (std::size_t p = 0; p < ed.rule.size(); ++p) {
        const double w = ed.rule.weights[p];
        const Vec2 x = ed.rule.points[p];
        sys.coeff_a(x, a1, a2);
        sys.boundary_m(x, n, bm);
        for (int i = 0; i < m; ++i)
            for (int l = 0; l < m; ++l) {
                const double dn_il = a1(i, l) * n.x + a2(i, l) * n.y;
                const double coeff = 0.5 * (bm(i, l) - dn_il) + (i == l ? sys.mu : 0.0);
                if (coeff == 0.0) continue;
                for (int c = 0; c < ne; ++c)
                    for (int cc = 0; cc < ne; ++cc)
                        s(i * ne + c, l * ne + cc) +=
                            w * coeff * ed.psi(static_cast<int>(p), cc) * ed.psi(static_cast<int>(p), c);
            }
    }
    return s;
}

}  // namespace

DofMap DofMap::build(const WeakMesh& mesh, int m, int degree) {
    if (m < 1) throw std::invalid_argument("DofMap: m must be >= 1");
    if (degree < 0) throw std::invalid_argument("DofMap: degree must be >= 0");
    DofMap d;
    d.m = m;
    d.degree = degree;
    d.n_k = poly_dim(degree);
    d.cell_block = m * d.n_k;
    d.edge_block = m * (degree + 1);
    d.n_cells = mesh.cells.size();
    d.n_edges = mesh.edges.size();
    return d;
}

LocalCellBlocks local_cell_operator(const FriedrichsSystem& sys, const WeakMesh& mesh, int cell,
                                    int degree) {
    const int m = sys.m;
    const int nk = poly_dim(degree);
    const int ne = degree + 1;
    const CellData cd = make_cell_data(mesh, cell, degree);

    LocalCellBlocks out;
    out.self.resize(m * nk, m * nk);
    out.load.assign(m * nk, 0.0);
    const auto& edges = mesh.cell_edges[cell];
    out.edge_blocks.assign(edges.size(), DenseMatrix(m * nk, m * ne));

    DenseMatrix a1(m, m), a2(m, m), b(m, m), diva(m, m);
    Vector fval(m);

    // Volume terms: -(u0, A.grad v0) + ((B - divA) u0, v0) and the load.
    for (std::size_t p = 0; p < cd.rule.size(); ++p) {
        const double w = cd.rule.weights[p];
        const Vec2 x = cd.rule.points[p];
        const int pi = static_cast<int>(p);
        sys.coeff_a(x, a1, a2);
        sys.coeff_b(x, b);
        sys.coeff_div_a(x, diva);
        sys.source(x, fval);
        for (int i = 0; i < m; ++i) {
            for (int a = 0; a < nk; ++a) {
                const int row = i * nk + a;
                for (int l = 0; l < m; ++l) {
                    const double adv = a1(i, l) * cd.dphix(pi, a) + a2(i, l) * cd.dphiy(pi, a);
                    const double rea = (b(i, l) - diva(i, l)) * cd.phi(pi, a);
                    if (adv == 0.0 && rea == 0.0) continue;
                    for (int bb = 0; bb < nk; ++bb)
                        out.self(row, l * nk + bb) += w * (rea - adv) * cd.phi(pi, bb);
                }
                out.load[row] += w * fval[i] * cd.phi(pi, a);
            }
        }
    }

    // Edge terms: <D_n ub, v0> + mu <u0 - ub, v0> per edge of the cell.
    for (std::size_t j = 0; j < edges.size(); ++j) {
        const int e = edges[j];
        const EdgeData ed = make_edge_data(mesh, e, degree);
        const DenseMatrix tphi = cd.basis.eval_at(ed.rule.points);
        const Vec2 n = mesh.outward_normal(cell, e);
        DenseMatrix& eb = out.edge_blocks[j];
        for (std::size_t p = 0; p < ed.rule.size(); ++p) {
            const double w = ed.rule.weights[p];
            const int pi = static_cast<int>(p);
            sys.coeff_a(ed.rule.points[p], a1, a2);
            for (int i = 0; i < m; ++i) {
                for (int a = 0; a < nk; ++a) {
                    const int row = i * nk + a;
                    const double wphi = w * tphi(pi, a);
                    for (int bb = 0; bb < nk; ++bb)
                        out.self(row, i * nk + bb) += sys.mu * wphi * tphi(pi, bb);
                    for (int l = 0; l < m; ++l) {
                        const double dn_il = a1(i, l) * n.x + a2(i, l) * n.y;
                        const double coeff = dn_il - (i == l ? sys.mu : 0.0);
                        if (coeff == 0.0) continue;
                        for (int c = 0; c < ne; ++c) eb(row, l * ne + c) += wphi * coeff * ed.psi(pi, c);
                    }
                }
            }
        }
    }
    return out;
}

Vector weak_derivative_cell(const FriedrichsSystem& sys, const WeakMesh& mesh, int cell, int degree,
                            std::span<const double> v0,
                            const std::vector<std::span<const double>>& vb) {
    const int m = sys.m;
    const int nk = poly_dim(degree);
    const int ne = degree + 1;
    assert(static_cast<int>(v0.size()) == m * nk);
    assert(vb.size() == mesh.cell_edges[cell].size());

    const CellData cd = make_cell_data(mesh, cell, degree);
    Vector rhs(m * nk, 0.0);

    DenseMatrix a1(m, m), a2(m, m), diva(m, m);
    Vector vals(m);
    for (std::size_t p = 0; p < cd.rule.size(); ++p) {
        const double w = cd.rule.weights[p];
        const int pi = static_cast<int>(p);
        sys.coeff_a(cd.rule.points[p], a1, a2);
        sys.coeff_div_a(cd.rule.points[p], diva);
        for (int l = 0; l < m; ++l) {
            double s = 0.0;
            for (int b = 0; b < nk; ++b) s += cd.phi(pi, b) * v0[l * nk + b];
            vals[l] = s;
        }
        for (int i = 0; i < m; ++i)
            for (int a = 0; a < nk; ++a) {
                double s = 0.0;
                for (int l = 0; l < m; ++l)
                    s += vals[l] * (a1(l, i) * cd.dphix(pi, a) + a2(l, i) * cd.dphiy(pi, a) +
                                    diva(l, i) * cd.phi(pi, a));
                rhs[i * nk + a] -= w * s;
            }
    }

    const auto& edges = mesh.cell_edges[cell];
    for (std::size_t j = 0; j < edges.size(); ++j) {
        const int e = edges[j];
        const EdgeData ed = make_edge_data(mesh, e, degree);
        const DenseMatrix tphi = cd.basis.eval_at(ed.rule.points);
        const Vec2 n = mesh.outward_normal(cell, e);
        assert(static_cast<int>(vb[j].size()) == m * ne);
        for (std::size_t p = 0; p < ed.rule.size(); ++p) {
            const double w = ed.rule.weights[p];
            const int pi = static_cast<int>(p);
            sys.coeff_a(ed.rule.points[p], a1, a2);
            for (int l = 0; l < m; ++l) {
                double s = 0.0;
                for (int c = 0; c < ne; ++c) s += ed.psi(pi, c) * vb[j][l * ne + c];
                vals[l] = s;
            }
            for (int i = 0; i < m; ++i) {
                double s = 0.0;
                for (int l = 0; l < m; ++l) s += (a1(i, l) * n.x + a2(i, l) * n.y) * vals[l];
                for (int a = 0; a < nk; ++a) rhs[i * nk + a] += w * s * tphi(pi, a);
            }
        }
    }

    const CholeskyFactor mass(cell_mass_matrix(cd.basis, cd.rule));
    Vector result(m * nk);
    for (int i = 0; i < m; ++i) {
        const Vector sol = mass.solve(std::span<const double>(rhs).subspan(i * nk, nk));
        std::copy(sol.begin(), sol.end(), result.begin() + static_cast<std::ptrdiff_t>(i) * nk);
    }
    return result;
}

EdgeEliminationMap edge_elimination(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree) {
    if (sys.mu0 <= 0.0) throw std::invalid_argument("edge_elimination: system must have mu0 > 0");
    const int m = sys.m;
    const int nk = poly_dim(degree);
    const int ne = degree + 1;

    EdgeEliminationMap elim(mesh.edges.size());
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const MeshEdge& edge = mesh.edges[e];
        const EdgeData ed = make_edge_data(mesh, e, degree);
        EdgeElimination& em = elim[e];

        if (edge.right_cell >= 0) {
            // Interior edge: ub is the average of the two trace projections;
            // the stabilization parameter cancels (it is constant per edge).
            const DenseMatrix mass = edge_mass_matrix(ed.basis, ed.rule);
            const CholeskyFactor chol(mass);
            em.count = 2;
            em.cells = {edge.left_cell, edge.right_cell};
            for (int t = 0; t < 2; ++t) {
                const CellBasis cb(mesh, em.cells[t], degree);
                const DenseMatrix g = trace_moments(ed, cb);
                DenseMatrix r(m * ne, m * nk);
                for (int b = 0; b < nk; ++b) {
                    Vector col(ne);
                    for (int c = 0; c < ne; ++c) col[c] = g(c, b);
                    const Vector proj = chol.solve(col);
                    for (int i = 0; i < m; ++i)
                        for (int c = 0; c < ne; ++c) r(i * ne + c, i * nk + b) = 0.5 * proj[c];
                }
                em.maps[t] = std::move(r);
            }
        } else {
            // Boundary edge: solve <(1/2 (M - D_n) + mu) ub, vb> = <mu u0, vb>.
            const DenseMatrix s = boundary_trace_system(sys, mesh, e, ed);
            const LuFactor lu(s);
            em.count = 1;
            em.cells = {edge.left_cell, -1};
            const CellBasis cb(mesh, edge.left_cell, degree);
            const DenseMatrix g = trace_moments(ed, cb);
            DenseMatrix r(m * ne, m * nk);
            Vector col(m * ne);
            for (int l = 0; l < m; ++l)
                for (int b = 0; b < nk; ++b) {
                    std::fill(col.begin(), col.end(), 0.0);
                    for (int c = 0; c < ne; ++c) col[l * ne + c] = sys.mu * g(c, b);
                    const Vector sol = lu.solve(col);
                    for (int rr = 0; rr < m * ne; ++rr) r(rr, l * nk + b) = sol[rr];
                }
            em.maps[0] = std::move(r);
        }
    }
    return elim;
}

CondensedOperator assemble_condensed(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree) {
    CondensedOperator op;
    op.dofs = DofMap::build(mesh, sys.m, degree);
    op.elimination = edge_elimination(sys, mesh, degree);
    op.rhs.assign(op.dofs.n0(), 0.0);

    const int cb = op.dofs.cell_block;
    SparseBuilder builder(op.dofs.n0());
    std::vector<int> cols;
    std::vector<double> vals;
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const LocalCellBlocks local = local_cell_operator(sys, mesh, cell, degree);
        std::map<int, DenseMatrix> nbr;
        nbr.emplace(cell, local.self);
        const auto& edges = mesh.cell_edges[cell];
        for (std::size_t j = 0; j < edges.size(); ++j) {
            const EdgeElimination& em = op.elimination[edges[j]];
            for (int t = 0; t < em.count; ++t) {
                const DenseMatrix contrib = local.edge_blocks[j] * em.maps[t];
                auto [it, fresh] = nbr.try_emplace(em.cells[t], DenseMatrix(cb, cb));
                DenseMatrix& block = it->second;
                for (int r = 0; r < cb; ++r)
                    for (int c = 0; c < cb; ++c) block(r, c) += contrib(r, c);
            }
        }
        for (int r = 0; r < cb; ++r) {
            cols.clear();
            vals.clear();
            for (const auto& [other, block] : nbr)
                for (int c = 0; c < cb; ++c) {
                    cols.push_back(static_cast<int>(op.dofs.cell_offset(other)) + c);
                    vals.push_back(block(r, c));
                }
            builder.add_row(cols, vals);
        }
        std::copy(local.load.begin(), local.load.end(), op.rhs.begin() + op.dofs.cell_offset(cell));
    }
    op.matrix = builder.finish();
    op.block_offsets.resize(op.dofs.n_cells + 1);
    for (std::size_t i = 0; i <= op.dofs.n_cells; ++i) op.block_offsets[i] = i * cb;
    return op;
}

MonolithicOperator assemble_monolithic(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree) {
    MonolithicOperator op;
    op.dofs = DofMap::build(mesh, sys.m, degree);
    const std::size_t n0 = op.dofs.n0();
    const std::size_t ntot = n0 + op.dofs.nb();
    const int m = sys.m;
    const int nk = op.dofs.n_k;
    const int ne = degree + 1;
    const int cb = op.dofs.cell_block;
    const int eb = op.dofs.edge_block;

    op.rhs.assign(ntot, 0.0);
    SparseBuilder builder(ntot);
    std::vector<int> cols;
    std::vector<double> vals;

    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const LocalCellBlocks local = local_cell_operator(sys, mesh, cell, degree);
        const auto& edges = mesh.cell_edges[cell];
        std::vector<std::pair<int, const DenseMatrix*>> sorted_edges;
        for (std::size_t j = 0; j < edges.size(); ++j) sorted_edges.emplace_back(edges[j], &local.edge_blocks[j]);
        std::sort(sorted_edges.begin(), sorted_edges.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (int r = 0; r < cb; ++r) {
            cols.clear();
            vals.clear();
            for (int c = 0; c < cb; ++c) {
                cols.push_back(static_cast<int>(op.dofs.cell_offset(cell)) + c);
                vals.push_back(local.self(r, c));
            }
            for (const auto& [e, block] : sorted_edges)
                for (int c = 0; c < eb; ++c) {
                    cols.push_back(static_cast<int>(n0 + op.dofs.edge_offset(e)) + c);
                    vals.push_back((*block)(r, c));
                }
            builder.add_row(cols, vals);
        }
        std::copy(local.load.begin(), local.load.end(), op.rhs.begin() + op.dofs.cell_offset(cell));
    }

    for (int e = 0; e < mesh.num_edges(); ++e) {
        const MeshEdge& edge = mesh.edges[e];
        const EdgeData ed = make_edge_data(mesh, e, degree);
        DenseMatrix diag(eb, eb);
        std::vector<std::pair<int, DenseMatrix>> cell_blocks;
        if (edge.right_cell >= 0) {
            const DenseMatrix mass = edge_mass_matrix(ed.basis, ed.rule);
            for (int i = 0; i < m; ++i)
                for (int c = 0; c < ne; ++c)
                    for (int cc = 0; cc < ne; ++cc) diag(i * ne + c, i * ne + cc) = 2.0 * sys.mu * mass(c, cc);
            for (int t = 0; t < 2; ++t) {
                const int cellidx = t == 0 ? edge.left_cell : edge.right_cell;
                const CellBasis cbasis(mesh, cellidx, degree);
                const DenseMatrix g = trace_moments(ed, cbasis);
                DenseMatrix blk(eb, cb);
                for (int i = 0; i < m; ++i)
                    for (int c = 0; c < ne; ++c)
                        for (int b = 0; b < nk; ++b) blk(i * ne + c, i * nk + b) = -sys.mu * g(c, b);
                cell_blocks.emplace_back(cellidx, std::move(blk));
            }
        } else {
            diag = boundary_trace_system(sys, mesh, e, ed);
            const CellBasis cbasis(mesh, edge.left_cell, degree);
            const DenseMatrix g = trace_moments(ed, cbasis);
            DenseMatrix blk(eb, cb);
            for (int i = 0; i < m; ++i)
                for (int c = 0; c < ne; ++c)
                    for (int b = 0; b < nk; ++b) blk(i * ne + c, i * nk + b) = -sys.mu * g(c, b);
            cell_blocks.emplace_back(edge.left_cell, std::move(blk));
        }
        std::sort(cell_blocks.begin(), cell_blocks.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (int r = 0; r < eb; ++r) {
            cols.clear();
            vals.clear();
            for (const auto& [cellidx, blk] : cell_blocks)
                for (int c = 0; c < cb; ++c) {
                    cols.push_back(static_cast<int>(op.dofs.cell_offset(cellidx)) + c);
                    vals.push_back(blk(r, c));
                }
            for (int c = 0; c < eb; ++c) {
                cols.push_back(static_cast<int>(n0 + op.dofs.edge_offset(e)) + c);
                vals.push_back(diag(r, c));
            }
            builder.add_row(cols, vals);
        }
    }

    op.matrix = builder.finish();
    op.block_offsets.reserve(op.dofs.n_cells + op.dofs.n_edges + 1);
    for (std::size_t i = 0; i <= op.dofs.n_cells; ++i) op.block_offsets.push_back(i * cb);
    for (std::size_t i = 1; i <= op.dofs.n_edges; ++i) op.block_offsets.push_back(n0 + i * eb);
    return op;
}

WeakVector recover_edge_unknowns(const CondensedOperator& op, Vector u0) {
    WeakVector w;
    w.ub.assign(op.dofs.nb(), 0.0);
    const int eb = op.dofs.edge_block;
    for (std::size_t e = 0; e < op.elimination.size(); ++e) {
        const EdgeElimination& em = op.elimination[e];
        std::span<double> target(w.ub.data() + op.dofs.edge_offset(static_cast<int>(e)), eb);
        for (int t = 0; t < em.count; ++t) {
            const Vector part = em.maps[t].apply(
                std::span<const double>(u0).subspan(op.dofs.cell_offset(em.cells[t]), op.dofs.cell_block));
            for (int r = 0; r < eb; ++r) target[r] += part[r];
        }
    }
    w.u0 = std::move(u0);
    return w;
}

Vector solve_condensed(const CondensedOperator& op, double tol, SolveReport* report) {
    return solve_sparse(op.matrix, op.rhs, tol, op.block_offsets, report);
}

WeakVector solve_monolithic(const MonolithicOperator& op, double tol, SolveReport* report) {
    const Vector x = solve_sparse(op.matrix, op.rhs, tol, op.block_offsets, report);
    WeakVector w;
    w.u0.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(op.dofs.n0()));
    w.ub.assign(x.begin() + static_cast<std::ptrdiff_t>(op.dofs.n0()), x.end());
    return w;
}

std::pair<double, double> energy_forms(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree,
                                       const WeakVector& w, const WeakVector& v) {
    const DofMap dofs = DofMap::build(mesh, sys.m, degree);
    const int m = sys.m;
    const int nk = dofs.n_k;
    const int ne = degree + 1;
    double a_form = 0.0;
    double s_form = 0.0;

    DenseMatrix b(m, m), a1(m, m), a2(m, m), bm(m, m);
    Vector wvals(m), vvals(m), wb(m), vb(m);

    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const auto w0 = std::span<const double>(w.u0).subspan(dofs.cell_offset(cell), dofs.cell_block);
        const auto v0 = std::span<const double>(v.u0).subspan(dofs.cell_offset(cell), dofs.cell_block);
        const auto& edges = mesh.cell_edges[cell];
        std::vector<std::span<const double>> wtraces;
        wtraces.reserve(edges.size());
        for (int e : edges)
            wtraces.push_back(std::span<const double>(w.ub).subspan(dofs.edge_offset(e), dofs.edge_block));

        const Vector wd = weak_derivative_cell(sys, mesh, cell, degree, w0, wtraces);
        const CellData cd = make_cell_data(mesh, cell, degree);

        // (grad_w w, v0)_K + (B w0, v0)_K
        for (std::size_t p = 0; p < cd.rule.size(); ++p) {
            const double wq = cd.rule.weights[p];
            const int pi = static_cast<int>(p);
            sys.coeff_b(cd.rule.points[p], b);
            for (int i = 0; i < m; ++i) {
                double wdv = 0.0, w0v = 0.0, v0v = 0.0;
                for (int bb = 0; bb < nk; ++bb) {
                    wdv += cd.phi(pi, bb) * wd[i * nk + bb];
                    v0v += cd.phi(pi, bb) * v0[i * nk + bb];
                    w0v += cd.phi(pi, bb) * w0[i * nk + bb];
                }
                wvals[i] = w0v;
                vvals[i] = v0v;
                a_form += wq * wdv * v0v;
            }
            for (int i = 0; i < m; ++i)
                for (int l = 0; l < m; ++l) a_form += wq * b(i, l) * wvals[l] * vvals[i];
        }

        // Stabilizer over the cell boundary.
        for (std::size_t j = 0; j < edges.size(); ++j) {
            const int e = edges[j];
            const EdgeData ed = make_edge_data(mesh, e, degree);
            const DenseMatrix tphi = cd.basis.eval_at(ed.rule.points);
            const auto vtrace = std::span<const double>(v.ub).subspan(dofs.edge_offset(e), dofs.edge_block);
            for (std::size_t p = 0; p < ed.rule.size(); ++p) {
                const double wq = ed.rule.weights[p];
                const int pi = static_cast<int>(p);
                double acc = 0.0;
                for (int i = 0; i < m; ++i) {
                    double w0v = 0.0, v0v = 0.0, wbv = 0.0, vbv = 0.0;
                    for (int bb = 0; bb < nk; ++bb) {
                        w0v += tphi(pi, bb) * w0[i * nk + bb];
                        v0v += tphi(pi, bb) * v0[i * nk + bb];
                    }
                    for (int c = 0; c < ne; ++c) {
                        wbv += ed.psi(pi, c) * wtraces[j][i * ne + c];
                        vbv += ed.psi(pi, c) * vtrace[i * ne + c];
                    }
                    acc += (w0v - wbv) * (v0v - vbv);
                }
                s_form += wq * sys.mu * acc;
            }
        }
    }

    // (1/2) <(M - D_n) wb, vb> over the domain boundary.
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.boundary_edge(e)) continue;
        const EdgeData ed = make_edge_data(mesh, e, degree);
        const Vec2 n = mesh.edges[e].normal;
        const auto wtrace = std::span<const double>(w.ub).subspan(dofs.edge_offset(e), dofs.edge_block);
        const auto vtrace = std::span<const double>(v.ub).subspan(dofs.edge_offset(e), dofs.edge_block);
        for (std::size_t p = 0; p < ed.rule.size(); ++p) {
            const double wq = ed.rule.weights[p];
            const int pi = static_cast<int>(p);
            sys.coeff_a(ed.rule.points[p], a1, a2);
            sys.boundary_m(ed.rule.points[p], n, bm);
            for (int i = 0; i < m; ++i) {
                double wbv = 0.0, vbv = 0.0;
                for (int c = 0; c < ne; ++c) {
                    wbv += ed.psi(pi, c) * wtrace[i * ne + c];
                    vbv += ed.psi(pi, c) * vtrace[i * ne + c];
                }
                wb[i] = wbv;
                vb[i] = vbv;
            }
            for (int i = 0; i < m; ++i)
                for (int l = 0; l < m; ++l) {
                    const double dn_il = a1(i, l) * n.x + a2(i, l) * n.y;
                    a_form += 0.5 * wq * (bm(i, l) - dn_il) * wb[l] * vb[i];
                }
        }
    }

    return {a_form, s_form};
}

double triple_norm(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree, const WeakVector& v) {
    const DofMap dofs = DofMap::build(mesh, sys.m, degree);
    const int m = sys.m;
    const int nk = dofs.n_k;
    const int ne = degree + 1;
    double acc = 0.0;

    DenseMatrix bm(m, m);
    Vector vb(m);
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const auto v0 = std::span<const double>(v.u0).subspan(dofs.cell_offset(cell), dofs.cell_block);
        const CellData cd = make_cell_data(mesh, cell, degree);
        for (std::size_t p = 0; p < cd.rule.size(); ++p) {
            const int pi = static_cast<int>(p);
            double sq = 0.0;
            for (int i = 0; i < m; ++i) {
                double val = 0.0;
                for (int bb = 0; bb < nk; ++bb) val += cd.phi(pi, bb) * v0[i * nk + bb];
                sq += val * val;
            }
            acc += sys.sigma0 * cd.rule.weights[p] * sq;
        }
        for (int e : mesh.cell_edges[cell]) {
            const EdgeData ed = make_edge_data(mesh, e, degree);
            const DenseMatrix tphi = cd.basis.eval_at(ed.rule.points);
            const auto vtrace = std::span<const double>(v.ub).subspan(dofs.edge_offset(e), dofs.edge_block);
            for (std::size_t p = 0; p < ed.rule.size(); ++p) {
                const int pi = static_cast<int>(p);
                double sq = 0.0;
                for (int i = 0; i < m; ++i) {
                    double v0v = 0.0, vbv = 0.0;
                    for (int bb = 0; bb < nk; ++bb) v0v += tphi(pi, bb) * v0[i * nk + bb];
                    for (int c = 0; c < ne; ++c) vbv += ed.psi(pi, c) * vtrace[i * ne + c];
                    sq += (v0v - vbv) * (v0v - vbv);
                }
                acc += sys.mu0 * ed.rule.weights[p] * sq;
            }
        }
    }

    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.boundary_edge(e)) continue;
        const EdgeData ed = make_edge_data(mesh, e, degree);
        const Vec2 n = mesh.edges[e].normal;
        const auto vtrace = std::span<const double>(v.ub).subspan(dofs.edge_offset(e), dofs.edge_block);
        for (std::size_t p = 0; p < ed.rule.size(); ++p) {
            const int pi = static_cast<int>(p);
            sys.boundary_m(ed.rule.points[p], n, bm);
            for (int i = 0; i < m; ++i) {
                double val = 0.0;
                for (int c = 0; c < ne; ++c) val += ed.psi(pi, c) * vtrace[i * ne + c];
                vb[i] = val;
            }
            double sq = 0.0;
            for (int i = 0; i < m; ++i)
                for (int l = 0; l < m; ++l) sq += bm(i, l) * vb[l] * vb[i];
            acc += 0.5 * ed.rule.weights[p] * sq;
        }
    }
    return std::sqrt(std::max(0.0, acc));
}

double l2_norm_u0(const WeakMesh& mesh, const DofMap& dofs, std::span<const double> u0) {
    double acc = 0.0;
    const int m = dofs.m;
    const int nk = dofs.n_k;
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const CellData cd = make_cell_data(mesh, cell, dofs.degree);
        const auto block = u0.subspan(dofs.cell_offset(cell), dofs.cell_block);
        for (std::size_t p = 0; p < cd.rule.size(); ++p) {
            const int pi = static_cast<int>(p);
            double sq = 0.0;
            for (int i = 0; i < m; ++i) {
                double val = 0.0;
                for (int bb = 0; bb < nk; ++bb) val += cd.phi(pi, bb) * block[i * nk + bb];
                sq += val * val;
            }
            acc += cd.rule.weights[p] * sq;
        }
    }
    return std::sqrt(acc);
}

}  // namespace wg
