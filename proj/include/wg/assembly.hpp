#ifndef WG_ASSEMBLY_HPP
#define WG_ASSEMBLY_HPP

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "wg/friedrichs.hpp"
#include "wg/linalg.hpp"
#include "wg/mesh.hpp"
#include "wg/polyspace.hpp"

namespace wg {

/// Block layout of the weak finite element space [V_h]^m: one interior block
/// of size m*n_k per cell and one trace block of size m*(k+1) per edge.
/// Within a block, component i occupies the contiguous slice [i*n, (i+1)*n).
struct DofMap {
    int m = 1;
    int degree = 0;
    int n_k = 1;        // dim P_k in 2D
    int cell_block = 1; // m * n_k
    int edge_block = 1; // m * (k+1)
    std::size_t n_cells = 0;
    std::size_t n_edges = 0;

    static DofMap build(const WeakMesh& mesh, int m, int degree);

    std::size_t n0() const { return n_cells * cell_block; }
    std::size_t nb() const { return n_edges * edge_block; }
    std::size_t cell_offset(int c) const { return static_cast<std::size_t>(c) * cell_block; }
    std::size_t edge_offset(int e) const { return static_cast<std::size_t>(e) * edge_block; }
};

/// Coefficients of a weak function: u0 holds the cell-interior components,
/// ub the single-valued edge traces.
struct WeakVector {
    Vector u0;
    Vector ub;
};

/// Per-edge linear map expressing the trace unknowns through the interior
/// unknowns of the one or two incident cells.
struct EdgeElimination {
    std::array<int, 2> cells{-1, -1};
    std::array<DenseMatrix, 2> maps;  // edge_block x cell_block each
    int count = 0;
};
using EdgeEliminationMap = std::vector<EdgeElimination>;

/// Dense blocks of the hybridized cell equation for one cell: the self block
/// couples the cell's interior unknowns, one block per edge couples its trace
/// unknowns, and `load` is the tested source term.
struct LocalCellBlocks {
    DenseMatrix self;
    std::vector<DenseMatrix> edge_blocks;  // aligned with mesh.cell_edges[cell]
    Vector load;
};

LocalCellBlocks local_cell_operator(const FriedrichsSystem& sys, const WeakMesh& mesh, int cell,
                                    int degree);

/// Weak derivative of the local weak function {v0, vb} on a cell: the unique
/// element q_h of [P_k]^m with (q_h, q) = -(v0, A.grad q + divA q) + <D_n vb, q>
/// for all test polynomials q. `vb` holds one trace block per cell edge, in
/// mesh.cell_edges order.
Vector weak_derivative_cell(const FriedrichsSystem& sys, const WeakMesh& mesh, int cell, int degree,
                            std::span<const double> v0,
                            const std::vector<std::span<const double>>& vb);

EdgeEliminationMap edge_elimination(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree);

struct CondensedOperator {
    SparseMatrix matrix;  // couples interior unknowns only
    Vector rhs;
    EdgeEliminationMap elimination;
    DofMap dofs;
    std::vector<std::size_t> block_offsets;  // cell blocks, for the solver
};

CondensedOperator assemble_condensed(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree);

struct MonolithicOperator {
    SparseMatrix matrix;  // over (u0, ub); the uncondensed oracle system
    Vector rhs;
    DofMap dofs;
    std::vector<std::size_t> block_offsets;  // cell blocks then edge blocks
};

MonolithicOperator assemble_monolithic(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree);

/// Apply the elimination map edge by edge to a solved interior vector.
WeakVector recover_edge_unknowns(const CondensedOperator& op, Vector u0);

Vector solve_condensed(const CondensedOperator& op, double tol, SolveReport* report = nullptr);
WeakVector solve_monolithic(const MonolithicOperator& op, double tol, SolveReport* report = nullptr);

/// (a(w,v), s(w,v)): the bilinear form built on the weak derivative and the
/// interior/trace penalty, evaluated by quadrature.
std::pair<double, double> energy_forms(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree,
                                       const WeakVector& w, const WeakVector& v);

/// Energy norm |||v||| with  |||v|||^2 = sigma0 (v0,v0) + mu0 <v0-vb, v0-vb>
/// + (1/2) <M vb, vb> over the domain boundary.
double triple_norm(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree, const WeakVector& v);

/// L2 norm over the partition of the interior part of v, component-summed.
double l2_norm_u0(const WeakMesh& mesh, const DofMap& dofs, std::span<const double> u0);

}  // namespace wg

#endif
