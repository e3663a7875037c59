#ifndef WG_TEST_HELPERS_HPP
#define WG_TEST_HELPERS_HPP

#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "wg/assembly.hpp"
#include "wg/friedrichs.hpp"
#include "wg/mesh.hpp"
#include "wg/polyspace.hpp"

namespace wg::testing {

inline FriedrichsSystem builtin_transport() { return transport_reaction({1.0, 2.0}, 1.0); }

inline FriedrichsSystem builtin_cdr(double eps = 1e-2) {
    return conv_diff_system(eps, Vec2{1.0, 2.0}, 1.0, [](Vec2) { return 1.0; });
}

inline FriedrichsSystem builtin_maxwell() {
    return maxwell2d(1.0, 1.0, [](Vec2) { return Vec2{0.0, 0.0}; }, [](Vec2) { return 0.0; });
}

inline std::vector<FriedrichsSystem> builtin_systems() {
    return {builtin_transport(), builtin_cdr(), builtin_maxwell()};
}

inline WeakVector random_weak_vector(const DofMap& dofs, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    WeakVector v;
    v.u0.resize(dofs.n0());
    v.ub.resize(dofs.nb());
    for (double& x : v.u0) x = dist(rng);
    for (double& x : v.ub) x = dist(rng);
    return v;
}

/// Random vector-valued polynomial source of total degree <= deg, plus its
/// exact L2 norm computed by quadrature of matching exactness.
struct PolySource {
    std::function<void(Vec2, Vector&)> f;
    double l2_norm = 0.0;
};

inline PolySource random_poly_source(const WeakMesh& mesh, int m, int deg, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int terms = (deg + 1) * (deg + 2) / 2;
    auto coef = std::make_shared<std::vector<double>>(static_cast<std::size_t>(m) * terms);
    for (double& c : *coef) c = dist(rng);
    PolySource src;
    src.f = [coef, m, deg, terms](Vec2 p, Vector& out) {
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            int idx = 0;
            for (int d = 0; d <= deg; ++d)
                for (int a = d; a >= 0; --a) {
                    double mono = 1.0;
                    for (int q = 0; q < a; ++q) mono *= p.x;
                    for (int q = 0; q < d - a; ++q) mono *= p.y;
                    s += (*coef)[i * terms + idx++] * mono;
                }
            out[i] = s;
        }
    };
    double acc = 0.0;
    Vector vals(m);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const QuadratureRule rule = cell_quadrature(mesh, c, 2 * deg);
        for (std::size_t p = 0; p < rule.size(); ++p) {
            src.f(rule.points[p], vals);
            double sq = 0.0;
            for (int i = 0; i < m; ++i) sq += vals[i] * vals[i];
            acc += rule.weights[p] * sq;
        }
    }
    src.l2_norm = std::sqrt(acc);
    return src;
}

/// Independent evaluation of the energy identity's right-hand side:
/// (1/2)(N v0, v0) + <(mu I - D_n/2)(v0-vb), v0-vb> + (1/2)<M vb, vb>_bdry
/// with N = B + B^T - divA.
inline double energy_identity_rhs(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree,
                                  const WeakVector& v) {
    const DofMap dofs = DofMap::build(mesh, sys.m, degree);
    const int m = sys.m;
    const int nk = dofs.n_k;
    const int ne = degree + 1;
    double acc = 0.0;
    DenseMatrix b(m, m), diva(m, m), a1(m, m), a2(m, m), bm(m, m);
    Vector vals(m), diff(m), vb(m);

    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const CellBasis basis(mesh, cell, degree);
        const QuadratureRule rule = cell_quadrature(mesh, cell, 2 * degree + 2);
        const DenseMatrix phi = basis.eval_at(rule.points);
        const auto v0 = std::span<const double>(v.u0).subspan(dofs.cell_offset(cell), dofs.cell_block);
        for (std::size_t p = 0; p < rule.size(); ++p) {
            const int pi = static_cast<int>(p);
            sys.coeff_b(rule.points[p], b);
            sys.coeff_div_a(rule.points[p], diva);
            for (int i = 0; i < m; ++i) {
                double s = 0.0;
                for (int bb = 0; bb < nk; ++bb) s += phi(pi, bb) * v0[i * nk + bb];
                vals[i] = s;
            }
            double quad = 0.0;
            for (int i = 0; i < m; ++i)
                for (int l = 0; l < m; ++l) quad += (b(i, l) + b(l, i) - diva(i, l)) * vals[l] * vals[i];
            acc += 0.5 * rule.weights[p] * quad;
        }

        for (int e : mesh.cell_edges[cell]) {
            const EdgeBasis ebasis(mesh, e, degree);
            const QuadratureRule erule = edge_quadrature(mesh, e, 2 * degree + 3);
            const DenseMatrix psi = ebasis.eval_at(erule.points);
            const DenseMatrix tphi = basis.eval_at(erule.points);
            const Vec2 n = mesh.outward_normal(cell, e);
            const auto vt = std::span<const double>(v.ub).subspan(dofs.edge_offset(e), dofs.edge_block);
            for (std::size_t p = 0; p < erule.size(); ++p) {
                const int pi = static_cast<int>(p);
                sys.coeff_a(erule.points[p], a1, a2);
                for (int i = 0; i < m; ++i) {
                    double v0v = 0.0, vbv = 0.0;
                    for (int bb = 0; bb < nk; ++bb) v0v += tphi(pi, bb) * v0[i * nk + bb];
                    for (int c = 0; c < ne; ++c) vbv += psi(pi, c) * vt[i * ne + c];
                    diff[i] = v0v - vbv;
                }
                double quad = 0.0;
                for (int i = 0; i < m; ++i) {
                    quad += sys.mu * diff[i] * diff[i];
                    for (int l = 0; l < m; ++l)
                        quad -= 0.5 * (a1(i, l) * n.x + a2(i, l) * n.y) * diff[l] * diff[i];
                }
                acc += erule.weights[p] * quad;
            }
        }
    }

    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (!mesh.boundary_edge(e)) continue;
        const EdgeBasis ebasis(mesh, e, degree);
        const QuadratureRule erule = edge_quadrature(mesh, e, 2 * degree + 3);
        const DenseMatrix psi = ebasis.eval_at(erule.points);
        const Vec2 n = mesh.edges[e].normal;
        const auto vt = std::span<const double>(v.ub).subspan(dofs.edge_offset(e), dofs.edge_block);
        for (std::size_t p = 0; p < erule.size(); ++p) {
            const int pi = static_cast<int>(p);
            sys.boundary_m(erule.points[p], n, bm);
            for (int i = 0; i < m; ++i) {
                double s = 0.0;
                for (int c = 0; c < ne; ++c) s += psi(pi, c) * vt[i * ne + c];
                vb[i] = s;
            }
            double quad = 0.0;
            for (int i = 0; i < m; ++i)
                for (int l = 0; l < m; ++l) quad += bm(i, l) * vb[l] * vb[i];
            acc += 0.5 * erule.weights[p] * quad;
        }
    }
    return acc;
}

/// <D_n vb, vb> accumulated over all cell boundaries (outward normals) and,
/// separately, over the domain boundary only.
inline std::pair<double, double> boundary_flux_sums(const FriedrichsSystem& sys, const WeakMesh& mesh,
                                                    int degree, const WeakVector& v) {
    const DofMap dofs = DofMap::build(mesh, sys.m, degree);
    const int m = sys.m;
    const int ne = degree + 1;
    double all = 0.0, boundary = 0.0;
    DenseMatrix a1(m, m), a2(m, m);
    Vector vb(m);
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        for (int e : mesh.cell_edges[cell]) {
            const EdgeBasis ebasis(mesh, e, degree);
            const QuadratureRule erule = edge_quadrature(mesh, e, 2 * degree + 3);
            const DenseMatrix psi = ebasis.eval_at(erule.points);
            const Vec2 n = mesh.outward_normal(cell, e);
            const auto vt = std::span<const double>(v.ub).subspan(dofs.edge_offset(e), dofs.edge_block);
            for (std::size_t p = 0; p < erule.size(); ++p) {
                const int pi = static_cast<int>(p);
                sys.coeff_a(erule.points[p], a1, a2);
                for (int i = 0; i < m; ++i) {
                    double s = 0.0;
                    for (int c = 0; c < ne; ++c) s += psi(pi, c) * vt[i * ne + c];
                    vb[i] = s;
                }
                double quad = 0.0;
                for (int i = 0; i < m; ++i)
                    for (int l = 0; l < m; ++l) quad += (a1(i, l) * n.x + a2(i, l) * n.y) * vb[l] * vb[i];
                all += erule.weights[p] * quad;
                if (mesh.boundary_edge(e)) boundary += erule.weights[p] * quad;
            }
        }
    }
    return {all, boundary};
}

}  // namespace wg::testing

#endif
