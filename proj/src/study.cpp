#include "wg/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "wg/polyspace.hpp"

namespace wg {

namespace {

struct Scalar2nd {
    double v, dx, dy, dxx, dxy, dyy;
};

// x(1-x)y(1-y) with derivatives.
Scalar2nd bubble(Vec2 p) {
    const double gx = p.x * (1.0 - p.x), gy = p.y * (1.0 - p.y);
    const double dgx = 1.0 - 2.0 * p.x, dgy = 1.0 - 2.0 * p.y;
    return {gx * gy, dgx * gy, gx * dgy, -2.0 * gy, dgx * dgy, -2.0 * gx};
}

// sin(pi t / 2) (1 - e^{(t-1)/sqrt(eps)}) and two derivatives; the exponent is
// <= 0 for t <= 1, so the evaluation never overflows.
struct Layer1d {
    double v, d1, d2;
};

Layer1d layer_factor(double t, double sqrt_eps) {
    const double pi_half = 0.5 * std::acos(-1.0);
    const double s = std::sin(pi_half * t), c = std::cos(pi_half * t);
    const double e = std::exp((t - 1.0) / sqrt_eps);
    const double inv = 1.0 / sqrt_eps;
    Layer1d l;
    l.v = s * (1.0 - e);
    l.d1 = pi_half * c * (1.0 - e) - s * e * inv;
    l.d2 = -pi_half * pi_half * s * (1.0 - e) - 2.0 * pi_half * c * e * inv - s * e * inv * inv;
    return l;
}

ManufacturedProblem make_cdr(double epsilon, Vec2 beta, double alpha, std::string name,
                             std::function<Scalar2nd(Vec2)> u_fn) {
    const double se = std::sqrt(epsilon);
    auto f = [epsilon, beta, alpha, u_fn](Vec2 p) {
        const Scalar2nd u = u_fn(p);
        return -epsilon * (u.dxx + u.dyy) + beta.x * u.dx + beta.y * u.dy + alpha * u.v;
    };
    ManufacturedProblem mp;
    mp.name = std::move(name);
    mp.system = conv_diff_system(epsilon, beta, alpha, f);
    mp.system.exact = [se, u_fn](Vec2 p, Vector& out) {
        const Scalar2nd u = u_fn(p);
        out[0] = -se * u.dx;
        out[1] = -se * u.dy;
        out[2] = u.v;
    };
    mp.system.exact_grad = [se, u_fn](Vec2 p, Vector& dx, Vector& dy) {
        const Scalar2nd u = u_fn(p);
        dx[0] = -se * u.dxx;
        dx[1] = -se * u.dxy;
        dx[2] = u.dx;
        dy[0] = -se * u.dxy;
        dy[1] = -se * u.dyy;
        dy[2] = u.dy;
    };
    return mp;
}

}  // namespace

ManufacturedProblem manufactured_cdr_smooth(double epsilon, Vec2 beta, double alpha) {
    return make_cdr(epsilon, beta, alpha, "cdr-smooth", [](Vec2 p) { return bubble(p); });
}

ManufacturedProblem manufactured_cdr_layer(double epsilon, Vec2 beta, double alpha) {
    const double se = std::sqrt(epsilon);
    auto u_fn = [se](Vec2 p) {
        const Layer1d gx = layer_factor(p.x, se);
        const Layer1d gy = layer_factor(p.y, se);
        return Scalar2nd{gx.v * gy.v,  gx.d1 * gy.v, gx.v * gy.d1,
                         gx.d2 * gy.v, gx.d1 * gy.d1, gx.v * gy.d2};
    };
    return make_cdr(epsilon, beta, alpha, "cdr-layer", u_fn);
}

ManufacturedProblem manufactured_maxwell(double nu, double sigma) {
    auto e_fn = [](Vec2 p) {
        Scalar2nd e = bubble(p);
        e.v *= 8.0;
        e.dx *= 8.0;
        e.dy *= 8.0;
        e.dxx *= 8.0;
        e.dxy *= 8.0;
        e.dyy *= 8.0;
        return e;
    };
    auto h = [nu, e_fn](Vec2 p) {
        const Scalar2nd e = e_fn(p);
        return Vec2{(1.0 - nu) * e.dy, (nu - 1.0) * e.dx};
    };
    auto g = [sigma, e_fn](Vec2 p) {
        const Scalar2nd e = e_fn(p);
        return sigma * e.v - (e.dxx + e.dyy);
    };
    ManufacturedProblem mp;
    mp.name = "maxwell2d";
    mp.system = maxwell2d(nu, sigma, h, g);
    mp.system.exact = [e_fn](Vec2 p, Vector& out) {
        const Scalar2nd e = e_fn(p);
        out[0] = -e.dy;
        out[1] = e.dx;
        out[2] = e.v;
    };
    // Third derivatives of the biquadratic E, for the H gradients.
    mp.system.exact_grad = [](Vec2 p, Vector& dx, Vector& dy) {
        const double x = p.x, y = p.y;
        const double e_xy = 8.0 * (1.0 - 2.0 * x) * (1.0 - 2.0 * y);
        const double e_xx = -16.0 * y * (1.0 - y);
        const double e_yy = -16.0 * x * (1.0 - x);
        dx[0] = -e_xy;
        dx[1] = e_xx;
        dx[2] = 8.0 * (1.0 - 2.0 * x) * y * (1.0 - y);
        dy[0] = -e_yy;
        dy[1] = e_xy;
        dy[2] = 8.0 * x * (1.0 - x) * (1.0 - 2.0 * y);
    };
    return mp;
}

ManufacturedProblem manufactured_transport(Vec2 beta, double alpha) {
    ManufacturedProblem mp;
    mp.name = "transport";
    mp.system = transport_reaction(beta, alpha);
    mp.system.source = [beta, alpha](Vec2 p, Vector& f) {
        const Scalar2nd u = bubble(p);
        f[0] = beta.x * u.dx + beta.y * u.dy + alpha * u.v;
    };
    mp.system.exact = [](Vec2 p, Vector& out) { out[0] = bubble(p).v; };
    mp.system.exact_grad = [](Vec2 p, Vector& dx, Vector& dy) {
        const Scalar2nd u = bubble(p);
        dx[0] = u.dx;
        dy[0] = u.dy;
    };
    return mp;
}

QuadratureRule study_cell_rule(const WeakMesh& mesh, int cell, int degree) {
    return cell_quadrature(mesh, cell, 2 * degree + 2);
}

QuadratureRule study_edge_rule(const WeakMesh& mesh, int edge, int degree) {
    return edge_quadrature(mesh, edge, 2 * degree + 2);
}

double l2_error(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree, const WeakVector& u_h) {
    if (!sys.exact) throw std::invalid_argument("l2_error: system has no exact solution");
    const DofMap dofs = DofMap::build(mesh, sys.m, degree);
    const int m = sys.m;
    const int nk = dofs.n_k;
    Vector uex(m);
    double acc = 0.0;
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const QuadratureRule rule = study_cell_rule(mesh, cell, degree);
        const CellBasis basis(mesh, cell, degree);
        const DenseMatrix phi = basis.eval_at(rule.points);
        const auto block = std::span<const double>(u_h.u0).subspan(dofs.cell_offset(cell), dofs.cell_block);
        for (std::size_t p = 0; p < rule.size(); ++p) {
            (*sys.exact)(rule.points[p], uex);
            double sq = 0.0;
            for (int i = 0; i < m; ++i) {
                double val = 0.0;
                for (int b = 0; b < nk; ++b) val += phi(static_cast<int>(p), b) * block[i * nk + b];
                const double diff = uex[i] - val;
                sq += diff * diff;
            }
            acc += rule.weights[p] * sq;
        }
    }
    return std::sqrt(acc);
}

WeakVector project_exact(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree) {
    if (!sys.exact) throw std::invalid_argument("project_exact: system has no exact solution");
    const DofMap dofs = DofMap::build(mesh, sys.m, degree);
    const int m = sys.m;
    const int nk = dofs.n_k;
    const int ne = degree + 1;
    WeakVector q;
    q.u0.assign(dofs.n0(), 0.0);
    q.ub.assign(dofs.nb(), 0.0);
    Vector uex(m);
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const CellBasis basis(mesh, cell, degree);
        const QuadratureRule rule = study_cell_rule(mesh, cell, degree);
        for (int i = 0; i < m; ++i) {
            auto comp = [&sys, &uex, i](Vec2 x) {
                (*sys.exact)(x, uex);
                return uex[i];
            };
            const Vector coeffs = project_cell(comp, basis, rule);
            std::copy(coeffs.begin(), coeffs.end(),
                      q.u0.begin() + static_cast<std::ptrdiff_t>(dofs.cell_offset(cell)) + i * nk);
        }
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const EdgeBasis basis(mesh, e, degree);
        const QuadratureRule rule = study_edge_rule(mesh, e, degree);
        for (int i = 0; i < m; ++i) {
            auto comp = [&sys, &uex, i](Vec2 x) {
                (*sys.exact)(x, uex);
                return uex[i];
            };
            const Vector coeffs = project_edge(comp, basis, rule);
            std::copy(coeffs.begin(), coeffs.end(),
                      q.ub.begin() + static_cast<std::ptrdiff_t>(dofs.edge_offset(e)) + i * ne);
        }
    }
    return q;
}

double triple_error(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree, const WeakVector& u_h) {
    WeakVector diff = project_exact(sys, mesh, degree);
    for (std::size_t i = 0; i < diff.u0.size(); ++i) diff.u0[i] -= u_h.u0[i];
    for (std::size_t i = 0; i < diff.ub.size(); ++i) diff.ub[i] -= u_h.ub[i];
    return triple_norm(sys, mesh, degree, diff);
}

double exact_l2_norm(const FriedrichsSystem& sys, const WeakMesh& mesh, int degree) {
    if (!sys.exact) throw std::invalid_argument("exact_l2_norm: system has no exact solution");
    Vector uex(sys.m);
    double acc = 0.0;
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const QuadratureRule rule = study_cell_rule(mesh, cell, degree);
        for (std::size_t p = 0; p < rule.size(); ++p) {
            (*sys.exact)(rule.points[p], uex);
            double sq = 0.0;
            for (int i = 0; i < sys.m; ++i) sq += uex[i] * uex[i];
            acc += rule.weights[p] * sq;
        }
    }
    return std::sqrt(acc);
}

double consistency_residual(const FriedrichsSystem& sys, Vec2 x) {
    if (!sys.exact || !sys.exact_grad)
        throw std::invalid_argument("consistency_residual: exact solution and gradient required");
    const int m = sys.m;
    DenseMatrix a1(m, m), a2(m, m), b(m, m);
    Vector u(m), dx(m), dy(m), f(m);
    sys.coeff_a(x, a1, a2);
    sys.coeff_b(x, b);
    (*sys.exact)(x, u);
    (*sys.exact_grad)(x, dx, dy);
    sys.source(x, f);
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
        double r = -f[i];
        for (int l = 0; l < m; ++l) r += a1(i, l) * dx[l] + a2(i, l) * dy[l] + b(i, l) * u[l];
        worst = std::max(worst, std::abs(r) / std::max(1.0, std::abs(f[i])));
    }
    return worst;
}

WeakMesh build_family_mesh(MeshFamily family, int level) {
    return family == MeshFamily::square ? square_grid(level) : polygonal_grid(level);
}

void run_convergence(const ManufacturedProblem& problem, int degree, const std::vector<int>& levels,
                     MeshFamily family, ConvergenceTable& out, double tol) {
    if (levels.empty()) throw std::invalid_argument("run_convergence: empty level list");
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (levels[i] <= levels[i - 1]) throw std::invalid_argument("run_convergence: levels must ascend");

    for (int level : levels) {
        const WeakMesh mesh = build_family_mesh(family, level);
        const CondensedOperator op = assemble_condensed(problem.system, mesh, degree);

        const auto t0 = std::chrono::steady_clock::now();
        Vector u0 = solve_condensed(op, tol);
        const auto t1 = std::chrono::steady_clock::now();

        const WeakVector u_h = recover_edge_unknowns(op, std::move(u0));
        ConvergenceRow row;
        row.level = level;
        row.h = mesh.h;
        row.dofs = op.dofs.n0();
        row.err_l2 = l2_error(problem.system, mesh, degree, u_h);
        row.err_triple = triple_error(problem.system, mesh, degree, u_h);
        row.seconds = std::chrono::duration<double>(t1 - t0).count();
        if (!out.rows.empty()) {
            row.rate_l2 = std::log2(out.rows.back().err_l2 / row.err_l2);
            row.rate_triple = std::log2(out.rows.back().err_triple / row.err_triple);
        }
        out.rows.push_back(row);
    }
}

ConvergenceTable run_convergence(const ManufacturedProblem& problem, int degree,
                                 const std::vector<int>& levels, MeshFamily family, double tol) {
    ConvergenceTable table;
    run_convergence(problem, degree, levels, family, table, tol);
    return table;
}

std::string to_csv(const ConvergenceTable& table) {
    std::string csv = "level,h,dofs,err_l2,rate_l2,err_triple,rate_triple,seconds\n";
    char buf[256];
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const ConvergenceRow& r = table.rows[i];
        if (i == 0) {
            std::snprintf(buf, sizeof buf, "%d,%.6g,%zu,%.6g,,%.6g,,%.6g\n", r.level, r.h, r.dofs, r.err_l2,
                          r.err_triple, r.seconds);
        } else {
            std::snprintf(buf, sizeof buf, "%d,%.6g,%zu,%.6g,%.6g,%.6g,%.6g,%.6g\n", r.level, r.h, r.dofs,
                          r.err_l2, r.rate_l2, r.err_triple, r.rate_triple, r.seconds);
        }
        csv += buf;
    }
    return csv;
}

}  // namespace wg
