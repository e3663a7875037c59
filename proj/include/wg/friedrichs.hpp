#ifndef WG_FRIEDRICHS_HPP
#define WG_FRIEDRICHS_HPP

#include <functional>
#include <optional>
#include <string>

#include "wg/linalg.hpp"
#include "wg/mesh.hpp"

namespace wg {

/// One instance of a positive symmetric first-order system
///   A1 du/dx + A2 du/dy + B u = f  in Omega,  (M - D_n) u = 0  on its boundary.
/// Coefficient callbacks fill caller-sized m x m matrices / m-vectors; they
/// must be pure, and divA must be the analytic divergence of A.
struct FriedrichsSystem {
    using MatrixPairFn = std::function<void(Vec2, DenseMatrix&, DenseMatrix&)>;
    using MatrixFn = std::function<void(Vec2, DenseMatrix&)>;
    using BoundaryMatrixFn = std::function<void(Vec2, Vec2, DenseMatrix&)>;
    using VectorFn = std::function<void(Vec2, Vector&)>;

    int m = 1;
    MatrixPairFn coeff_a;      // A1(x), A2(x); each symmetric
    MatrixFn coeff_div_a;      // d1 A1 + d2 A2
    MatrixFn coeff_b;          // B(x)
    BoundaryMatrixFn boundary_m;  // M(x, n) for a unit outward normal n
    VectorFn source;           // f(x)

    double sigma0 = 0.0;       // B + B^T - divA >= 2 sigma0 I
    double mu = 0.0;           // stabilization constant, constant over the mesh
    double mu0 = 0.0;          // margin in  mu - rho(D_n)/2 >= mu0 > 0
    double dn_radius_bound = 0.0;  // sup over x and unit n of rho(D_n(x))

    std::optional<VectorFn> exact;  // exact solution, when known
    // exact_grad(x, dx, dy): componentwise x- and y-derivatives of `exact`
    std::optional<std::function<void(Vec2, Vector&, Vector&)>> exact_grad;

    /// Override the stabilization parameter; recomputes mu0 from
    /// dn_radius_bound and rejects values that violate mu - rho/2 > 0.
    void set_mu(double new_mu);
};

/// D_n = A1 n1 + A2 n2 at x; n must be a unit vector to 1e-12.
DenseMatrix d_n(const FriedrichsSystem& sys, Vec2 x, Vec2 n);

/// Max |eigenvalue| of a symmetric matrix (cyclic Jacobi).
double spectral_radius(const DenseMatrix& s);

struct AdmissibilityReport {
    bool pass = false;
    double max_asymmetry = 0.0;      // worst |A_k - A_k^T| entry, relative
    double min_positivity = 0.0;     // min eig of B + B^T - divA - 2 sigma0 I
    double min_boundary = 0.0;       // min eig of M + M^T on boundary samples
    double min_mu_margin = 0.0;      // min of mu - rho(D_n)/2 - mu0
    double max_div_a_error = 0.0;    // divA vs central finite differences, relative
    std::string summary() const;
};

/// Evaluate conditions (A symmetric, B-positivity, M-positivity, mu bound)
/// at quadrature samples of every cell and edge, plus a finite-difference
/// cross-check of divA. `samples_per_cell` sizes the sampling rule.
AdmissibilityReport check_admissibility(const FriedrichsSystem& sys, const WeakMesh& mesh,
                                        int samples_per_cell = 9);

/// Sampled bound on sup rho(D_n) over a rectangle and a fan of unit normals;
/// for user-defined systems whose analytic bound is unknown.
double estimate_dn_radius_bound(const FriedrichsSystem& sys, const Rect& domain, int grid = 17,
                                int directions = 64);

/// Scalar transport-reaction equation  beta . grad(u) + alpha u = f  as a
/// 1x1 system; M = |beta . n| enforces u = 0 on the inflow boundary only.
FriedrichsSystem transport_reaction(Vec2 beta, double alpha);

/// Singularly perturbed convection-diffusion-reaction equation written in
/// first-order form with unknown (sigma1, sigma2, u); constant-coefficient
/// version used by the builtin studies.
FriedrichsSystem conv_diff_system(double epsilon, Vec2 beta, double alpha,
                                  std::function<double(Vec2)> f);

/// Variable-coefficient version. alpha0 is a lower bound for
/// alpha - div(beta)/2 and beta_sup_two / beta_sup_inf are the suprema of
/// |beta(x)|_2 and max_i |beta_i(x)| over the domain.
FriedrichsSystem conv_diff_system(double epsilon, std::function<Vec2(Vec2)> beta,
                                  std::function<double(Vec2)> div_beta,
                                  std::function<double(Vec2)> alpha,
                                  std::function<double(Vec2)> f, double alpha0,
                                  double beta_sup_two, double beta_sup_inf);

/// 2D time-harmonic Maxwell system with unknown (H1, H2, E).
FriedrichsSystem maxwell2d(double nu, double sigma, std::function<Vec2(Vec2)> h,
                           std::function<double(Vec2)> g);

}  // namespace wg

#endif
