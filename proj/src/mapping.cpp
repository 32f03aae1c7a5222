#include "tentkit/mapping.hpp"

#include "tentkit/basis.hpp"
#include "tentkit/dual.hpp"
#include "tentkit/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace tentkit {

int TentMap::local_element(Index global) const {
    for (int i = 0; i < size(); ++i)
        if (elements_[i].element == global) return i;
    return -1;
}

TentMap build_tent_map(const Tent& tent, const SpatialMesh& mesh, double t_offset) {
    const auto& patch = tent.patch;
    if (tent.tau_bot.size() != patch.vertices.size() || tent.tau_top.size() != patch.vertices.size())
        throw InvariantViolation("tent: tau arrays do not match the patch");
    TentMap map;
    map.t_offset_ = t_offset;
    map.vertex_delta_.resize(patch.vertices.size());
    for (std::size_t i = 0; i < patch.vertices.size(); ++i) {
        const double d = tent.tau_top[i] - tent.tau_bot[i];
        if (d < 0.0) throw InvariantViolation("tent: tau_top < tau_bot at a patch vertex");
        if (i > 0 && d != 0.0) throw InvariantViolation("tent: front moved away from the centre vertex");
        map.vertex_delta_[i] = d;
    }
    if (!(map.vertex_delta_[0] > 0.0)) throw InvariantViolation("tent: pole height must be positive");

    std::array<double, 3> bot{}, top{};
    for (Index e : patch.elements) {
        const auto& el = mesh.element(e);
        for (int k = 0; k < 3; ++k) {
            const int lv = patch.local_vertex(el[k]);
            if (lv < 0) throw InvariantViolation("tent: element vertex outside the patch");
            bot[k] = tent.tau_bot[lv];
            top[k] = tent.tau_top[lv];
        }
        const Mat J = mesh.element_jacobian(e);
        if (!(std::abs(J.determinant()) > 0.0)) throw InvariantViolation("tent: degenerate element");
        const Mat JinvT = J.transpose().inverse();
        ElementMap em;
        em.element = e;
        em.x0 = mesh.vertex(el[0]);
        em.tau_bot0 = bot[0];
        em.delta0 = top[0] - bot[0];
        em.grad_bot = JinvT * Vec(bot[1] - bot[0], bot[2] - bot[0]);
        em.grad_top = JinvT * Vec(top[1] - top[0], top[2] - top[0]);
        em.grad_delta = em.grad_top - em.grad_bot;
        map.elements_.push_back(em);
    }
    return map;
}

TentMap flat_tent_map(const SpatialMesh& mesh, std::span<const Index> elements, double height, double t_offset) {
    if (height < 0.0) throw InvariantViolation("flat map: negative height");
    TentMap map;
    map.t_offset_ = t_offset;
    for (Index e : elements) {
        ElementMap em;
        em.element = e;
        em.x0 = mesh.vertex(mesh.element(e)[0]);
        em.delta0 = height;
        map.elements_.push_back(em);
    }
    return map;
}

MappedData mapped_data(const ConservationLaw& law, const TentMap& map, int local, const Vec& x, double that,
                       const State& w) {
    const auto& em = map.element(local);
    const double t = map.time(local, x, that);
    MappedData d;
    d.g = law.g(x, t, w);
    d.f = law.f(x, t, w);
    d.b = law.b(x, t, w);
    d.G = d.g - d.f * em.grad_phi(that);
    return d;
}

std::pair<double, Vec> mapped_entropy_pair(const ConservationLaw& law, const TentMap& map, int local, const Vec& x,
                                           double that, const State& w) {
    const auto& em = map.element(local);
    const double t = map.time(local, x, that);
    const double E = law.entropy(x, t, w);
    const Vec F = law.entropy_flux(x, t, w);
    return {E - F.dot(em.grad_phi(that)), em.delta(x) * F};
}

bool causality_check(const TentMap& map, const ConservationLaw& law, std::span<const CausalitySample> samples,
                     double margin) {
    for (const auto& s : samples) {
        const auto& em = map.element(s.element);
        for (double that : {0.0, 1.0}) {
            const double t = map.time(s.element, s.x, that);
            if (!(law.max_wavespeed(s.x, t, s.u) * em.grad_phi(that).norm() < 1.0 - margin)) return false;
        }
    }
    return true;
}

bool causality_check(const TentMap& map, const SpatialMesh& mesh, const std::function<double(const Vec&)>& speed,
                     double margin) {
    for (const auto& em : map.elements())
        for (Index v : mesh.element(em.element))
            for (double that : {0.0, 1.0})
                if (!(speed(mesh.vertex(v)) * em.grad_phi(that).norm() < 1.0 - margin)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

double Poly3::eval(const Vec& x, double t) const { return eval_generic<double>(x.x(), x.y(), t); }

Eigen::Vector3d Poly3::gradient(const Vec& x, double t) const {
    using D = Dual<3>;
    const D r = eval_generic<D>(D::variable(x.x(), 0), D::variable(x.y(), 1), D::variable(t, 2));
    return Eigen::Vector3d(r.d[0], r.d[1], r.d[2]);
}

namespace {

/// Interior sample points of the patch: element quadrature points × t̂ Gauss points.
template <class Fn>
double max_over_samples(const TentMap& map, const SpatialMesh& mesh, int quad_degree, Fn&& fn) {
    double worst = 0.0;
    const auto& tr = quad::gauss_legendre(quad::points_for_degree(quad_degree));
    for (int le = 0; le < map.size(); ++le) {
        const auto q = element_quadrature(mesh, map.element(le).element, quad_degree);
        for (const Vec& x : q.points)
            for (double that : tr.points) worst = std::max(worst, fn(le, x, that));
    }
    return worst;
}

}  // namespace

double piola_identity_check(const std::array<Poly3, 3>& F, const TentMap& map, const SpatialMesh& mesh,
                            int quad_degree) {
    using D = Dual<3>;
    return max_over_samples(map, mesh, quad_degree, [&](int le, const Vec& xh, double that) {
        const auto& em = map.element(le);
        const D x1 = D::variable(xh.x(), 0), x2 = D::variable(xh.y(), 1), th = D::variable(that, 2);
        // φ and its first derivatives as functions of (x̂, t̂)
        const D tb = D(em.tau_bot0) + D(em.grad_bot.x()) * (x1 - D(em.x0.x())) +
                     D(em.grad_bot.y()) * (x2 - D(em.x0.y()));
        const D dl = D(em.delta0) + D(em.grad_delta.x()) * (x1 - D(em.x0.x())) +
                     D(em.grad_delta.y()) * (x2 - D(em.x0.y()));
        const D phi = tb + th * dl;
        const D p1 = (D(1.0) - th) * D(em.grad_bot.x()) + th * D(em.grad_top.x());
        const D p2 = (D(1.0) - th) * D(em.grad_bot.y()) + th * D(em.grad_top.y());
        // DΦ = [[1,0,0],[0,1,0],[p1,p2,dl]]; generic 3×3 inverse via cofactors.
        std::array<std::array<D, 3>, 3> A{{{D(1.0), D(0.0), D(0.0)}, {D(0.0), D(1.0), D(0.0)}, {p1, p2, dl}}};
        auto cof = [&](int r, int c) {
            const int r0 = (r + 1) % 3, r1 = (r + 2) % 3, c0 = (c + 1) % 3, c1 = (c + 2) % 3;
            return A[r0][c0] * A[r1][c1] - A[r0][c1] * A[r1][c0];
        };
        const D det = A[0][0] * cof(0, 0) + A[0][1] * cof(0, 1) + A[0][2] * cof(0, 2);
        // det · A⁻¹ = adj(A) = cofactorᵀ
        std::array<D, 3> Fphi;
        for (int k = 0; k < 3; ++k) Fphi[k] = F[k].eval_generic<D>(x1, x2, phi);
        D div_hat(0.0);
        for (int r = 0; r < 3; ++r) {
            D Fr(0.0);
            for (int c = 0; c < 3; ++c) Fr += cof(c, r) * Fphi[c];
            div_hat += D(Fr.d[r]);
        }
        // physical divergence at Φ(x̂,t̂)
        const double t = phi.v;
        const double divF = F[0].gradient(xh, t)[0] + F[1].gradient(xh, t)[1] + F[2].gradient(xh, t)[2];
        return std::abs(div_hat.v - det.v * divF);
    });
}

namespace {

struct PolyState {
    State value;
    Eigen::Matrix<double, Eigen::Dynamic, 3, 0, kMaxComponents, 3> grad;  ///< columns ∂₁, ∂₂, ∂_t
};

PolyState eval_field(const std::vector<Poly3>& u, const Vec& x, double t) {
    PolyState s;
    const int L = static_cast<int>(u.size());
    s.value.resize(L);
    s.grad.resize(L, 3);
    for (int l = 0; l < L; ++l) {
        s.value[l] = u[l].eval(x, t);
        s.grad.row(l) = u[l].gradient(x, t).transpose();
    }
    return s;
}

}  // namespace

double mapped_system_residual_check(const ConservationLaw& law, const std::vector<Poly3>& u, const TentMap& map,
                                    const SpatialMesh& mesh, int quad_degree) {
    return max_over_samples(map, mesh, quad_degree, [&](int le, const Vec& xh, double that) {
        const auto& em = map.element(le);
        const double t = map.time(le, xh, that);
        const double delta = em.delta(xh);
        const Vec gphi = em.grad_phi(that);
        const PolyState s = eval_field(u, xh, t);
        const State& w = s.value;
        const State ut = s.grad.col(2);

        // physical residual ∂_t g(u) + Σ_j ∂_j f_j(u) + b(u)
        State R = law.dg(xh, t, w) * ut + law.b(xh, t, w);
        for (int j = 0; j < kSpaceDim; ++j) R += law.df(xh, t, w, j) * State(s.grad.col(j));

        // derivatives of û = u∘Φ on the cylinder
        const State uhat_t = ut * delta;
        const Flux f = law.f(xh, t, w);
        State lhs = law.dg(xh, t, w) * uhat_t + delta * law.b(xh, t, w);
        for (int j = 0; j < kSpaceDim; ++j) {
            const Jacobian dfj = law.df(xh, t, w, j);
            const State uhat_j = State(s.grad.col(j)) + ut * gphi[j];
            // ∂_t̂ (−f_j ∂_jφ) with ∂_t̂ ∂_jφ = ∂_jδ
            lhs -= dfj * uhat_t * gphi[j] + State(f.col(j)) * em.grad_delta[j];
            // ∂̂_j (δ f_j)
            lhs += em.grad_delta[j] * State(f.col(j)) + delta * (dfj * uhat_j);
        }
        return (lhs - delta * R).cwiseAbs().maxCoeff();
    });
}

double mapped_entropy_residual_check(const ConservationLaw& law, const std::vector<Poly3>& u, const TentMap& map,
                                     const SpatialMesh& mesh, int quad_degree) {
    return max_over_samples(map, mesh, quad_degree, [&](int le, const Vec& xh, double that) {
        const auto& em = map.element(le);
        const double t = map.time(le, xh, that);
        const double delta = em.delta(xh);
        const Vec gphi = em.grad_phi(that);
        const PolyState s = eval_field(u, xh, t);
        const State& w = s.value;
        const State ut = s.grad.col(2);
        const State dE = law.entropy_gradient(xh, t, w);
        const EntropyFluxJacobian dF = law.entropy_flux_jacobian(xh, t, w);
        const Vec Fv = law.entropy_flux(xh, t, w);

        double R = dE.dot(ut);
        for (int j = 0; j < kSpaceDim; ++j) R += dF.row(j).dot(s.grad.col(j));

        const State uhat_t = ut * delta;
        double lhs = dE.dot(uhat_t);
        for (int j = 0; j < kSpaceDim; ++j) {
            const State uhat_j = State(s.grad.col(j)) + ut * gphi[j];
            lhs -= dF.row(j).dot(uhat_t) * gphi[j] + Fv[j] * em.grad_delta[j];
            lhs += em.grad_delta[j] * Fv[j] + delta * dF.row(j).dot(uhat_j);
        }
        return std::abs(lhs - delta * R);
    });
}

}  // namespace tentkit
