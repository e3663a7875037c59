#include "wg/friedrichs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wg/polyspace.hpp"

namespace wg {

void FriedrichsSystem::set_mu(double new_mu) {
    if (new_mu <= 0.0) throw std::invalid_argument("FriedrichsSystem: mu must be positive");
    const double margin = new_mu - 0.5 * dn_radius_bound;
    if (margin <= 0.0) {
        std::ostringstream os;
        os << "FriedrichsSystem: mu = " << new_mu << " violates the stabilization bound: "
           << "rho(D_n)/2 can reach " << 0.5 * dn_radius_bound;
        throw std::invalid_argument(os.str());
    }
    mu = new_mu;
    mu0 = margin;
}

DenseMatrix d_n(const FriedrichsSystem& sys, Vec2 x, Vec2 n) {
    if (std::abs(norm(n) - 1.0) > 1e-12) throw std::invalid_argument("d_n: normal is not unit length");
    DenseMatrix a1(sys.m, sys.m), a2(sys.m, sys.m);
    sys.coeff_a(x, a1, a2);
    DenseMatrix dn(sys.m, sys.m);
    for (int i = 0; i < sys.m; ++i)
        for (int j = 0; j < sys.m; ++j) dn(i, j) = a1(i, j) * n.x + a2(i, j) * n.y;
    return dn;
}

double spectral_radius(const DenseMatrix& s) {
    return spectral_radius_of_eigenvalues(symmetric_eigenvalues(s));
}

std::string AdmissibilityReport::summary() const {
    std::ostringstream os;
    os << (pass ? "pass" : "FAIL") << ": max|A-A^T|=" << max_asymmetry
       << " min_eig(B+B^T-divA-2s0)=" << min_positivity << " min_eig(M+M^T)=" << min_boundary
       << " min(mu-rho/2-mu0)=" << min_mu_margin << " max divA fd error=" << max_div_a_error;
    return os.str();
}

namespace {

double min_symmetric_eigenvalue(const DenseMatrix& s) {
    const Vector ev = symmetric_eigenvalues(s);
    return ev.front();
}

void symmetrize_in_place(DenseMatrix& s) {
    for (int i = 0; i < s.rows(); ++i)
        for (int j = 0; j < i; ++j) {
            const double v = 0.5 * (s(i, j) + s(j, i));
            s(i, j) = s(j, i) = v;
        }
}

}  // namespace

AdmissibilityReport check_admissibility(const FriedrichsSystem& sys, const WeakMesh& mesh,
                                        int samples_per_cell) {
    const int m = sys.m;
    const int side = std::max(2, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(samples_per_cell)))));
    const int exactness = 2 * side - 2;

    AdmissibilityReport rep;
    rep.min_positivity = rep.min_boundary = rep.min_mu_margin = std::numeric_limits<double>::infinity();

    DenseMatrix a1(m, m), a2(m, m), b(m, m), diva(m, m), tmp(m, m);
    DenseMatrix a1p(m, m), a2p(m, m), a1m(m, m), a2m(m, m);

    auto sample_interior = [&](Vec2 x) {
        sys.coeff_a(x, a1, a2);
        const double scale = std::max({a1.max_abs(), a2.max_abs(), 1.0});
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                rep.max_asymmetry = std::max(rep.max_asymmetry, std::abs(a1(i, j) - a1(j, i)) / scale);
                rep.max_asymmetry = std::max(rep.max_asymmetry, std::abs(a2(i, j) - a2(j, i)) / scale);
            }

        sys.coeff_b(x, b);
        sys.coeff_div_a(x, diva);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) tmp(i, j) = b(i, j) + b(j, i) - diva(i, j) - (i == j ? 2.0 * sys.sigma0 : 0.0);
        symmetrize_in_place(tmp);
        rep.min_positivity = std::min(rep.min_positivity, min_symmetric_eigenvalue(tmp));

        // divA against central differences of A.
        const double step = 1e-6;
        sys.coeff_a({x.x + step, x.y}, a1p, a2p);
        sys.coeff_a({x.x - step, x.y}, a1m, a2m);
        double err = 0.0;
        double mag = 1.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                tmp(i, j) = (a1p(i, j) - a1m(i, j)) / (2.0 * step);
                mag = std::max(mag, std::abs(diva(i, j)));
            }
        sys.coeff_a({x.x, x.y + step}, a1p, a2p);
        sys.coeff_a({x.x, x.y - step}, a1m, a2m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                tmp(i, j) += (a2p(i, j) - a2m(i, j)) / (2.0 * step);
                err = std::max(err, std::abs(tmp(i, j) - diva(i, j)));
            }
        rep.max_div_a_error = std::max(rep.max_div_a_error, err / mag);
    };

    for (int c = 0; c < mesh.num_cells(); ++c) {
        const QuadratureRule rule = cell_quadrature(mesh, c, exactness);
        for (const Vec2& x : rule.points) sample_interior(x);
    }

    const double pi = std::acos(-1.0);
    DenseMatrix bm(m, m), dn(m, m);
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const QuadratureRule rule = edge_quadrature(mesh, e, exactness);
        for (const Vec2& x : rule.points) {
            if (mesh.boundary_edge(e)) {
                sys.boundary_m(x, mesh.edges[e].normal, bm);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) tmp(i, j) = bm(i, j) + bm(j, i);
                symmetrize_in_place(tmp);
                rep.min_boundary = std::min(rep.min_boundary, min_symmetric_eigenvalue(tmp));
            }
            // Spectral-radius bound over the edge normal plus a fan of unit
            // directions; the mu condition is direction independent.
            sys.coeff_a(x, a1, a2);
            for (int d = 0; d < 33; ++d) {
                Vec2 n = mesh.edges[e].normal;
                if (d > 0) {
                    const double th = 2.0 * pi * d / 32.0;
                    n = {std::cos(th), std::sin(th)};
                }
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) dn(i, j) = a1(i, j) * n.x + a2(i, j) * n.y;
                symmetrize_in_place(dn);
                const double rho = spectral_radius_of_eigenvalues(symmetric_eigenvalues(dn));
                rep.min_mu_margin = std::min(rep.min_mu_margin, sys.mu - 0.5 * rho - sys.mu0);
            }
        }
    }

    rep.pass = rep.max_asymmetry <= 1e-12 && rep.min_positivity >= -1e-10 && rep.min_boundary >= -1e-12 &&
               rep.min_mu_margin >= -1e-12 && rep.max_div_a_error <= 1e-5;
    return rep;
}

double estimate_dn_radius_bound(const FriedrichsSystem& sys, const Rect& domain, int grid, int directions) {
    const double pi = std::acos(-1.0);
    double bound = 0.0;
    DenseMatrix a1(sys.m, sys.m), a2(sys.m, sys.m), dn(sys.m, sys.m);
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const Vec2 x{domain.lo.x + (domain.hi.x - domain.lo.x) * i / (grid - 1.0),
                         domain.lo.y + (domain.hi.y - domain.lo.y) * j / (grid - 1.0)};
            sys.coeff_a(x, a1, a2);
            for (int d = 0; d < directions; ++d) {
                const double th = 2.0 * pi * d / directions;
                const Vec2 n{std::cos(th), std::sin(th)};
                for (int r = 0; r < sys.m; ++r)
                    for (int c = 0; c < sys.m; ++c) dn(r, c) = a1(r, c) * n.x + a2(r, c) * n.y;
                symmetrize_in_place(dn);
                bound = std::max(bound, spectral_radius_of_eigenvalues(symmetric_eigenvalues(dn)));
            }
        }
    return bound;
}

FriedrichsSystem transport_reaction(Vec2 beta, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("transport_reaction: alpha must be positive");
    FriedrichsSystem sys;
    sys.m = 1;
    sys.coeff_a = [beta](Vec2, DenseMatrix& a1, DenseMatrix& a2) {
        a1(0, 0) = beta.x;
        a2(0, 0) = beta.y;
    };
    sys.coeff_div_a = [](Vec2, DenseMatrix& d) { d(0, 0) = 0.0; };
    sys.coeff_b = [alpha](Vec2, DenseMatrix& b) { b(0, 0) = alpha; };
    sys.boundary_m = [beta](Vec2, Vec2 n, DenseMatrix& m) { m(0, 0) = std::abs(dot(beta, n)); };
    sys.source = [](Vec2, Vector& f) { f[0] = 0.0; };
    sys.sigma0 = alpha;
    sys.dn_radius_bound = norm(beta);
    sys.mu = 0.5 * sys.dn_radius_bound + 1.0;
    sys.mu0 = 1.0;
    return sys;
}

FriedrichsSystem conv_diff_system(double epsilon, std::function<Vec2(Vec2)> beta,
                                  std::function<double(Vec2)> div_beta,
                                  std::function<double(Vec2)> alpha,
                                  std::function<double(Vec2)> f, double alpha0,
                                  double beta_sup_two, double beta_sup_inf) {
    if (epsilon <= 0.0 || epsilon > 1.0)
        throw std::invalid_argument("conv_diff_system: epsilon must lie in (0, 1]");
    if (alpha0 <= 0.0) throw std::invalid_argument("conv_diff_system: alpha0 must be positive");
    const double se = std::sqrt(epsilon);

    FriedrichsSystem sys;
    sys.m = 3;
    sys.coeff_a = [se, beta](Vec2 x, DenseMatrix& a1, DenseMatrix& a2) {
        const Vec2 b = beta(x);
        a1.set_zero();
        a2.set_zero();
        a1(0, 2) = a1(2, 0) = se;
        a1(2, 2) = b.x;
        a2(1, 2) = a2(2, 1) = se;
        a2(2, 2) = b.y;
    };
    sys.coeff_div_a = [div_beta](Vec2 x, DenseMatrix& d) {
        d.set_zero();
        d(2, 2) = div_beta(x);
    };
    sys.coeff_b = [alpha](Vec2 x, DenseMatrix& b) {
        b.set_zero();
        b(0, 0) = b(1, 1) = 1.0;
        b(2, 2) = alpha(x);
    };
    sys.boundary_m = [se](Vec2, Vec2 n, DenseMatrix& m) {
        m.set_zero();
        m(0, 2) = -se * n.x;
        m(1, 2) = -se * n.y;
        m(2, 0) = se * n.x;
        m(2, 1) = se * n.y;
        m(2, 2) = 1.0;
    };
    sys.source = [f](Vec2 x, Vector& v) {
        v[0] = v[1] = 0.0;
        v[2] = f(x);
    };
    sys.sigma0 = std::min(1.0, alpha0);
    // rho(D_n) = (|beta.n| + sqrt((beta.n)^2 + 4 eps)) / 2
    sys.dn_radius_bound = 0.5 * (beta_sup_two + std::sqrt(beta_sup_two * beta_sup_two + 4.0 * epsilon));
    sys.mu = beta_sup_inf + 1.0;
    sys.mu0 = sys.mu - 0.5 * sys.dn_radius_bound;
    return sys;
}

FriedrichsSystem conv_diff_system(double epsilon, Vec2 beta, double alpha,
                                  std::function<double(Vec2)> f) {
    return conv_diff_system(
        epsilon, [beta](Vec2) { return beta; }, [](Vec2) { return 0.0; },
        [alpha](Vec2) { return alpha; }, std::move(f), alpha, norm(beta),
        std::max(std::abs(beta.x), std::abs(beta.y)));
}

FriedrichsSystem maxwell2d(double nu, double sigma, std::function<Vec2(Vec2)> h,
                           std::function<double(Vec2)> g) {
    if (nu <= 0.0 || sigma <= 0.0) throw std::invalid_argument("maxwell2d: nu and sigma must be positive");
    FriedrichsSystem sys;
    sys.m = 3;
    sys.coeff_a = [](Vec2, DenseMatrix& a1, DenseMatrix& a2) {
        a1.set_zero();
        a2.set_zero();
        a1(1, 2) = a1(2, 1) = -1.0;
        a2(0, 2) = a2(2, 0) = 1.0;
    };
    sys.coeff_div_a = [](Vec2, DenseMatrix& d) { d.set_zero(); };
    sys.coeff_b = [nu, sigma](Vec2, DenseMatrix& b) {
        b.set_zero();
        b(0, 0) = b(1, 1) = nu;
        b(2, 2) = sigma;
    };
    sys.boundary_m = [](Vec2, Vec2 n, DenseMatrix& m) {
        m.set_zero();
        m(0, 2) = -n.y;
        m(1, 2) = n.x;
        m(2, 0) = n.y;
        m(2, 1) = -n.x;
        m(2, 2) = 1.0;
    };
    sys.source = [h, g](Vec2 x, Vector& v) {
        const Vec2 hv = h(x);
        v[0] = hv.x;
        v[1] = hv.y;
        v[2] = g(x);
    };
    sys.sigma0 = std::min(nu, sigma);
    sys.dn_radius_bound = 1.0;  // rho(D_n) = |n|
    sys.mu = 1.0;
    sys.mu0 = 0.5;
    return sys;
}

}  // namespace wg
