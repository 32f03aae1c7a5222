#include "tentkit/mixedfem.hpp"

#include "tentkit/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace tentkit {

namespace {

/// Shifted Legendre polynomial P_j(2s−1) on [0,1].
double legendre01(int j, double s) {
    const double t = 2.0 * s - 1.0;
    double p0 = 1.0, p1 = t;
    if (j == 0) return p0;
    for (int k = 1; k < j; ++k) {
        const double p2 = ((2 * k + 1) * t * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

}  // namespace

void ElementFluxBasis::eval(const Vec& x, Eigen::Ref<Eigen::MatrixXd> values, Eigen::Ref<Eigen::VectorXd> div) const {
    const int n = monomials.size();
    double m[64];
    Vec g[64];
    monomials.eval_with_gradient(x, std::span<double>(m, n), std::span<Vec>(g, n));
    const int nb = size();
    for (int i = 0; i < nb; ++i) {
        double vx = 0.0, vy = 0.0, d = 0.0;
        for (int k = 0; k < n; ++k) {
            const double cx = coeffs(k, i), cy = coeffs(n + k, i);
            vx += cx * m[k];
            vy += cy * m[k];
            d += cx * g[k].x() + cy * g[k].y();
        }
        values(i, 0) = vx;
        values(i, 1) = vy;
        div[i] = d;
    }
}

MixedSpace::MixedSpace(const SpatialMesh& mesh, int degree) : mesh_(&mesh), p_(degree) {
    if (degree < 1 || degree > 6) throw ConfigError("mixed space: degree must lie in 1..6");
    num_edge_dofs_ = mesh.num_edges() * (p_ + 1);
    num_flux_ = num_edge_dofs_ + mesh.num_elements() * interior_per_element();
    num_dofs_ = num_flux_ + mesh.num_elements() * scalar_per_element();

    const int n = poly_dim(p_);
    const int nfacet = 3 * (p_ + 1);
    const auto& gl = quad::gauss_legendre(quad::points_for_degree(2 * p_));
    flux_.resize(mesh.num_elements());
    scalar_.reserve(mesh.num_elements());
    std::vector<double> m(n);
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        ElementFluxBasis& fb = flux_[e];
        fb.monomials.center = mesh.element_centroid(e);
        fb.monomials.scale = 0.5 * mesh.element_diameter(e);
        fb.monomials.degree = p_;

        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(nfacet, 2 * n);
        for (int k = 0; k < 3; ++k) {
            const Index edge = mesh.element_edge(e, k);
            const Vec a = mesh.vertex(mesh.edge(edge)[0]), b = mesh.vertex(mesh.edge(edge)[1]);
            const Vec nrm = edge_normal(edge);
            for (std::size_t q = 0; q < gl.points.size(); ++q) {
                const double s = gl.points[q];
                fb.monomials.eval(a + s * (b - a), m);
                for (int j = 0; j <= p_; ++j) {
                    const double w = gl.weights[q] * legendre01(j, s);
                    for (int c = 0; c < n; ++c) {
                        D(k * (p_ + 1) + j, c) += w * m[c] * nrm.x();
                        D(k * (p_ + 1) + j, n + c) += w * m[c] * nrm.y();
                    }
                }
            }
        }
        // Interior functionals: an orthonormal basis of ker D.
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeFullV);
        Eigen::MatrixXd T(2 * n, 2 * n);
        T.topRows(nfacet) = D;
        T.bottomRows(2 * n - nfacet) = svd.matrixV().rightCols(2 * n - nfacet).transpose();
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(T);
        if (!(lu.rcond() > 1e-12)) throw Error("mixed space: BDM dofs are not unisolvent");
        fb.coeffs = lu.inverse();

        fb.dofs.resize(2 * n);
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j <= p_; ++j) fb.dofs[k * (p_ + 1) + j] = edge_dof(mesh.element_edge(e, k), j);
        for (int j = 0; j < interior_per_element(); ++j) fb.dofs[nfacet + j] = interior_flux_dof(e, j);

        scalar_.emplace_back(mesh, e, p_);
    }
}

Vec MixedSpace::edge_normal(Index edge) const {
    const auto& ed = mesh_->edge(edge);
    const Vec t = (mesh_->vertex(ed[1]) - mesh_->vertex(ed[0])).normalized();
    return Vec(t.y(), -t.x());
}

bool MixedSpace::constrained(int dof) const {
    return dof < num_edge_dofs_ && mesh_->is_boundary_edge(dof / (p_ + 1));
}

std::vector<int> MixedSpace::element_dofs(Index e) const {
    std::vector<int> d = flux_[e].dofs;
    for (int k = 0; k < scalar_per_element(); ++k) d.push_back(scalar_dof(e, k));
    return d;
}

State MixedSpace::evaluate(const Eigen::VectorXd& coeffs, Index e, const Vec& x) const {
    const auto ed = element_dofs(e);
    Eigen::VectorXd local(ed.size());
    for (std::size_t i = 0; i < ed.size(); ++i) local[i] = coeffs[ed[i]];
    return evaluate_broken(local, 0, x, e);
}

State MixedSpace::evaluate_broken(const Eigen::VectorXd& broken, Index e, const Vec& x) const {
    return evaluate_broken(broken, e * element_size(), x, e);
}

State MixedSpace::evaluate_broken(const Eigen::VectorXd& c, Index offset, const Vec& x, Index e) const {
    const auto& fb = flux_[e];
    const int nb = fb.size();
    Eigen::MatrixXd V(nb, 2);
    Eigen::VectorXd div(nb);
    fb.eval(x, V, div);
    State u = State::Zero(3);
    for (int i = 0; i < nb; ++i) {
        u[0] += c[offset + i] * V(i, 0);
        u[1] += c[offset + i] * V(i, 1);
    }
    const int ns = scalar_per_element();
    double psi[64];
    scalar_[e].eval(x, std::span<double>(psi, ns));
    for (int k = 0; k < ns; ++k) u[2] += c[offset + nb + k] * psi[k];
    return u;
}

Eigen::VectorXd MixedSpace::to_broken(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != num_dofs_) throw InvariantViolation("to_broken: wrong coefficient count");
    Eigen::VectorXd b(broken_size());
    for (Index e = 0; e < mesh_->num_elements(); ++e) {
        const auto ed = element_dofs(e);
        for (std::size_t i = 0; i < ed.size(); ++i) b[e * element_size() + static_cast<Index>(i)] = coeffs[ed[i]];
    }
    return b;
}

Eigen::VectorXd MixedSpace::project(const std::function<State(const Vec&)>& u) const {
    const auto& mesh = *mesh_;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(num_dofs_);
    const auto& gl = quad::gauss_legendre(quad::points_for_degree(2 * p_ + 6));
    for (Index edge = 0; edge < mesh.num_edges(); ++edge) {
        if (mesh.is_boundary_edge(edge)) continue;
        const Vec a = mesh.vertex(mesh.edge(edge)[0]), b = mesh.vertex(mesh.edge(edge)[1]);
        const Vec nrm = edge_normal(edge);
        for (std::size_t q = 0; q < gl.points.size(); ++q) {
            const double s = gl.points[q];
            const State v = u(a + s * (b - a));
            const double qn = v[0] * nrm.x() + v[1] * nrm.y();
            for (int j = 0; j <= p_; ++j) c[edge_dof(edge, j)] += gl.weights[q] * legendre01(j, s) * qn;
        }
    }
    const int nfacet = 3 * (p_ + 1);
    const int ni = interior_per_element();
    const int ns = scalar_per_element();
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto& fb = flux_[e];
        const int nb = fb.size();
        const ElementQuadrature q = element_quadrature(mesh, e, 2 * p_ + 4);
        Eigen::MatrixXd Mbb = Eigen::MatrixXd::Zero(ni, ni);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
        Eigen::MatrixXd V(nb, 2);
        Eigen::VectorXd div(nb);
        double psi[64];
        for (std::size_t i = 0; i < q.points.size(); ++i) {
            const Vec& x = q.points[i];
            const double w = q.weights[i];
            fb.eval(x, V, div);
            const State v = u(x);
            Vec resid(v[0], v[1]);
            for (int k = 0; k < nfacet; ++k) resid -= c[fb.dofs[k]] * Vec(V(k, 0), V(k, 1));
            const Eigen::MatrixXd B = V.bottomRows(ni);
            Mbb.noalias() += w * B * B.transpose();
            rhs.noalias() += w * B * Eigen::Vector2d(resid.x(), resid.y());
            scalar_[e].eval(x, std::span<double>(psi, ns));
            for (int k = 0; k < ns; ++k) c[scalar_dof(e, k)] += w * v[2] * psi[k];
        }
        if (ni > 0) {
            const Eigen::VectorXd ci = Mbb.llt().solve(rhs);
            for (int k = 0; k < ni; ++k) c[interior_flux_dof(e, k)] = ci[k];
        }
    }
    return c;
}

int TentDofs::local(int g) const {
    for (std::size_t i = 0; i < global.size(); ++i)
        if (global[i] == g) return static_cast<int>(i);
    return -1;
}

TentDofs tent_dofs(const MixedSpace& space, const Tent& tent) {
    TentDofs d;
    for (Index e : tent.patch.elements)
        for (int g : space.element_dofs(e))
            if (d.local(g) < 0) d.global.push_back(g);
    for (std::size_t i = 0; i < d.global.size(); ++i) {
        const int g = d.global[i];
        if (!space.constrained(g)) d.free.push_back(static_cast<int>(i));
    }
    return d;
}

namespace {

/// Element-local data at one quadrature point: flux values/divergences and scalar values.
struct MixedPoint {
    Eigen::MatrixXd V;
    Eigen::VectorXd div;
    Eigen::VectorXd psi;
};

template <class Fn>
void for_each_patch_point(const MixedSpace& space, const TentMap& map, const TentDofs& dofs, int degree, Fn&& fn) {
    const auto& mesh = space.mesh();
    const int ns = space.scalar_per_element();
    for (int le = 0; le < map.size(); ++le) {
        const Index e = map.element(le).element;
        const auto& fb = space.flux_basis(e);
        const int nb = fb.size();
        std::vector<int> loc(nb + ns);
        const auto ed = space.element_dofs(e);
        for (int i = 0; i < nb + ns; ++i) loc[i] = dofs.local(ed[i]);
        MixedPoint pt{Eigen::MatrixXd(nb, 2), Eigen::VectorXd(nb), Eigen::VectorXd(ns)};
        const ElementQuadrature q = element_quadrature(mesh, e, degree);
        for (std::size_t i = 0; i < q.points.size(); ++i) {
            fb.eval(q.points[i], pt.V, pt.div);
            space.scalar_basis(e).eval(q.points[i], std::span<double>(pt.psi.data(), ns));
            fn(le, q.points[i], q.weights[i], pt, loc, nb);
        }
    }
}

}  // namespace

Eigen::MatrixXd assemble_wave_H(const MixedSpace& space, const WaveLaw& law, const TentMap& map,
                                const TentDofs& dofs, double that) {
    const int n = static_cast<int>(dofs.global.size());
    const int ns = space.scalar_per_element();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for_each_patch_point(space, map, dofs, 2 * space.degree() + 2,
                         [&](int le, const Vec& x, double w, const MixedPoint& pt, const std::vector<int>& loc, int nb) {
                             const Mat ainv = law.alpha(x).inverse();
                             const Vec gphi = map.element(le).grad_phi(that);
                             const Eigen::VectorXd rg = pt.V * Eigen::Vector2d(gphi.x(), gphi.y());
                             const Eigen::MatrixXd VA = pt.V * Eigen::Matrix2d(ainv);
                             for (int l = 0; l < nb; ++l) {
                                 for (int m = 0; m < nb; ++m) H(loc[l], loc[m]) += w * VA.row(m).dot(pt.V.row(l));
                                 for (int m = 0; m < ns; ++m) {
                                     const double v = w * pt.psi[m] * rg[l];
                                     H(loc[l], loc[nb + m]) += v;
                                     H(loc[nb + m], loc[l]) += v;
                                 }
                             }
                             for (int l = 0; l < ns; ++l)
                                 for (int m = 0; m < ns; ++m) H(loc[nb + l], loc[nb + m]) += w * pt.psi[l] * pt.psi[m];
                         });
    return H;
}

Eigen::MatrixXd assemble_wave_S(const MixedSpace& space, const WaveLaw& law, const TentMap& map,
                                const TentDofs& dofs) {
    const int n = static_cast<int>(dofs.global.size());
    const int ns = space.scalar_per_element();
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    for_each_patch_point(space, map, dofs, 2 * space.degree() + 2,
                         [&](int le, const Vec& x, double w, const MixedPoint& pt, const std::vector<int>& loc, int nb) {
                             const auto& em = map.element(le);
                             const double delta = em.delta(x);
                             const double beta = law.damping(x);
                             const Eigen::VectorXd rgd = pt.V * Eigen::Vector2d(em.grad_delta.x(), em.grad_delta.y());
                             for (int l = 0; l < nb; ++l)
                                 for (int m = 0; m < ns; ++m) S(loc[l], loc[nb + m]) -= w * delta * pt.psi[m] * pt.div[l];
                             for (int l = 0; l < ns; ++l) {
                                 for (int m = 0; m < nb; ++m)
                                     S(loc[nb + l], loc[m]) += w * (rgd[m] + delta * pt.div[m]) * pt.psi[l];
                                 for (int m = 0; m < ns; ++m)
                                     S(loc[nb + l], loc[nb + m]) -= w * delta * beta * pt.psi[m] * pt.psi[l];
                             }
                         });
    return S;
}

Eigen::VectorXd assemble_wave_load(const MixedSpace& space, const WaveLaw& law, const TentMap& map,
                                   const TentDofs& dofs, double that, const Eigen::VectorXd& broken) {
    if (broken.size() != space.broken_size()) throw InvariantViolation("assemble_wave_load: wrong front size");
    const int ns = space.scalar_per_element();
    const int size = space.element_size();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<int>(dofs.global.size()));
    for_each_patch_point(space, map, dofs, 2 * space.degree() + 2,
                         [&](int le, const Vec& x, double w, const MixedPoint& pt, const std::vector<int>& loc, int nb) {
                             const auto u = broken.segment(map.element(le).element * size, size);
                             const Eigen::Vector2d q = pt.V.transpose() * u.head(nb);
                             const double mu = pt.psi.dot(u.tail(ns));
                             const Vec g = map.element(le).grad_phi(that);
                             const Eigen::Vector2d gphi(g.x(), g.y());
                             const Eigen::Vector2d Gq = Eigen::Matrix2d(law.alpha(x).inverse()) * q + mu * gphi;
                             const double Gmu = mu + q.dot(gphi);
                             for (int l = 0; l < nb; ++l) b[loc[l]] += w * pt.V.row(l).dot(Gq);
                             for (int l = 0; l < ns; ++l) b[loc[nb + l]] += w * Gmu * pt.psi[l];
                         });
    for (std::size_t i = 0; i < dofs.global.size(); ++i)
        if (space.constrained(dofs.global[i])) b[static_cast<Eigen::Index>(i)] = 0.0;
    return b;
}

Eigen::MatrixXd assemble_wave_load_matrix(const MixedSpace& space, const WaveLaw& law, const TentMap& map,
                                          const TentDofs& dofs, double that) {
    const int ns = space.scalar_per_element();
    const int size = space.element_size();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<int>(dofs.global.size()), map.size() * size);
    for_each_patch_point(space, map, dofs, 2 * space.degree() + 2,
                         [&](int le, const Vec& x, double w, const MixedPoint& pt, const std::vector<int>& loc, int nb) {
                             const Vec g = map.element(le).grad_phi(that);
                             const Eigen::Vector2d gphi(g.x(), g.y());
                             const Eigen::MatrixXd VA = pt.V * Eigen::Matrix2d(law.alpha(x).inverse());
                             const Eigen::VectorXd rg = pt.V * gphi;
                             const int c0 = le * size;
                             for (int l = 0; l < nb; ++l) {
                                 for (int m = 0; m < nb; ++m) L(loc[l], c0 + m) += w * VA.row(m).dot(pt.V.row(l));
                                 for (int m = 0; m < ns; ++m) {
                                     L(loc[l], c0 + nb + m) += w * pt.psi[m] * rg[l];
                                     L(loc[nb + m], c0 + l) += w * pt.psi[m] * rg[l];
                                 }
                             }
                             for (int l = 0; l < ns; ++l)
                                 for (int m = 0; m < ns; ++m) L(loc[nb + l], c0 + nb + m) += w * pt.psi[l] * pt.psi[m];
                         });
    for (std::size_t i = 0; i < dofs.global.size(); ++i)
        if (space.constrained(dofs.global[i])) L.row(static_cast<Eigen::Index>(i)).setZero();
    return L;
}

void scatter_broken(const MixedSpace& space, const TentMap& map, const TentDofs& dofs, const Eigen::VectorXd& local,
                    Eigen::VectorXd& broken) {
    const int size = space.element_size();
    for (int le = 0; le < map.size(); ++le) {
        const Index e = map.element(le).element;
        const auto ed = space.element_dofs(e);
        for (int i = 0; i < size; ++i) broken[e * size + i] = local[dofs.local(ed[i])];
    }
}

State wave_exact_standing(const Vec& x, double t) {
    using std::numbers::pi;
    const double r2 = std::numbers::sqrt2;
    const double st = std::sin(pi * t * r2), ct = std::cos(pi * t * r2);
    State u(3);
    u[0] = -std::sin(pi * x.x()) * std::cos(pi * x.y()) * st / r2;
    u[1] = -std::cos(pi * x.x()) * std::sin(pi * x.y()) * st / r2;
    u[2] = std::cos(pi * x.x()) * std::cos(pi * x.y()) * ct;
    return u;
}

namespace {

template <class Eval>
double error_norm(const MixedSpace& space, Eval&& eval, const std::function<State(const Vec&)>& exact) {
    const auto& mesh = space.mesh();
    double sum = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const ElementQuadrature q = element_quadrature(mesh, e, 2 * space.degree() + 4);
        for (std::size_t i = 0; i < q.points.size(); ++i)
            sum += q.weights[i] * (exact(q.points[i]) - eval(e, q.points[i])).squaredNorm();
    }
    return std::sqrt(sum);
}

}  // namespace

double wave_error_norm(const MixedSpace& space, const Eigen::VectorXd& coeffs,
                       const std::function<State(const Vec&)>& exact) {
    return error_norm(space, [&](Index e, const Vec& x) { return space.evaluate(coeffs, e, x); }, exact);
}

double wave_error_norm_broken(const MixedSpace& space, const Eigen::VectorXd& broken,
                              const std::function<State(const Vec&)>& exact) {
    if (broken.size() != space.broken_size()) throw InvariantViolation("wave_error_norm_broken: wrong size");
    return error_norm(space, [&](Index e, const Vec& x) { return space.evaluate_broken(broken, e, x); }, exact);
}

}  // namespace tentkit
