#ifndef WG_STUDY_HPP
#define WG_STUDY_HPP

#include <string>
#include <vector>

#include "wg/assembly.hpp"
#include "wg/friedrichs.hpp"
#include "wg/mesh.hpp"

namespace wg {

/// A system together with a closed-form exact solution and the source derived
/// from it; the exact callbacks include analytic first derivatives so that
/// consistency can be checked without finite differences.
struct ManufacturedProblem {
    std::string name;
    FriedrichsSystem system;
};

/// Exact solution x(1-x)y(1-y) of the convection-diffusion-reaction equation,
/// written as the first-order system; no boundary layer.
ManufacturedProblem manufactured_cdr_smooth(double epsilon, Vec2 beta = {1.0, 2.0}, double alpha = 1.0);

/// Exact solution sin(pi x/2) sin(pi y/2) (1-e^{(x-1)/sqrt(eps)})(1-e^{(y-1)/sqrt(eps)})
/// with boundary layers along x = 1 and y = 1.
ManufacturedProblem manufactured_cdr_layer(double epsilon, Vec2 beta = {1.0, 1.0}, double alpha = 1.0);

/// 2D Maxwell system with E = 8x(1-x)y(1-y) and H = (-dE/dy, dE/dx).
ManufacturedProblem manufactured_maxwell(double nu = 1.0, double sigma = 1.0);

/// Scalar transport-reaction equation with exact solution x(1-x)y(1-y).
ManufacturedProblem manufactured_transport(Vec2 beta = {1.0, 2.0}, double alpha = 1.0);

/// Quadrature used for every integral of the exact solution (errors and
/// projections): k+2 Gauss points per direction. This keeps the nodes away
/// from the domain boundary, so unresolved layers are sampled consistently
/// across refinement levels, and still integrates products of P_k functions
/// exactly.
QuadratureRule study_cell_rule(const WeakMesh& mesh, int cell, int degree);
QuadratureRule study_edge_rule(const WeakMesh& mesh, int edge, int degree);

/// ||u - u_h^0|| summed over components, by cellwise quadrature.
double l2_error(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree, const WeakVector& u_h);

/// |||Q_h u - u_h||| where Q_h u projects the exact solution cell- and
/// edge-wise into the weak space.
double triple_error(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree, const WeakVector& u_h);

/// Q_h u = {Q0 u, Qb u} of the exact solution.
WeakVector project_exact(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree);

/// L2 norm of the exact solution (component-summed), with the study rule.
double exact_l2_norm(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree);

/// Residual of the exact solution in the strong equation A.grad(u) + B u - f
/// at one point, relative to max(1, |f|); uses the analytic gradient callbacks.
double consistency_residual(const FriedrichsSystem& sys, Vec2 x);

enum class MeshFamily { square, polygonal };

WeakMesh build_family_mesh(MeshFamily family, int level);

struct ConvergenceRow {
    int level = 0;
    double h = 0.0;
    std::size_t dofs = 0;
    double err_l2 = 0.0;
    double rate_l2 = 0.0;  // log2(previous/current); 0 on the first row
    double err_triple = 0.0;
    double rate_triple = 0.0;
    double seconds = 0.0;  // linear-solve wall time
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

/// Run one error study: per level build the mesh, assemble the condensed
/// system, solve to `tol`, recover traces and record both errors plus rates.
/// On failure the partial table remains in `out` and the error propagates.
void run_convergence(const ManufacturedProblem& problem, int degree, const std::vector<int>& levels,
                     MeshFamily family, ConvergenceTable& out, double tol = 1e-12);

ConvergenceTable run_convergence(const ManufacturedProblem& problem, int degree,
                                 const std::vector<int>& levels, MeshFamily family, double tol = 1e-12);

/// CSV with header level,h,dofs,err_l2,rate_l2,err_triple,rate_triple,seconds;
/// 6 significant digits, rates empty on the first row.
std::string to_csv(const ConvergenceTable& table);

}  // namespace wg

#endif
