#include "tentkit/dg.hpp"

#include "tentkit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tentkit {

namespace {

std::string where(Index element, const Vec& x, double that) {
    std::ostringstream os;
    os << " [element " << element << ", x = (" << x.x() << ", " << x.y() << "), t^ = " << that << "]";
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// DGSpace
// ---------------------------------------------------------------------------

DGSpace::DGSpace(const SpatialMesh& mesh, int degree, int components)
    : mesh_(&mesh), p_(degree), L_(components), nb_(poly_dim(degree)) {
    if (degree < 0 || degree > 8) throw ConfigError("dg space: degree must lie in 0..8");
    if (components < 1 || components > kMaxComponents) throw ConfigError("dg space: bad component count");
    const int qdeg = 2 * p_ + 2;
    elements_.resize(mesh.num_elements());
    std::vector<double> v(nb_);
    std::vector<Vec> g(nb_);
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        ElementData& d = elements_[e];
        d.basis = ElementBasis(mesh, e, p_);
        const ElementQuadrature q = element_quadrature(mesh, e, qdeg);
        d.points = q.points;
        d.weights = q.weights;
        const int nq = static_cast<int>(q.points.size());
        d.phi.resize(nq, nb_);
        d.dx.resize(nq, nb_);
        d.dy.resize(nq, nb_);
        for (int i = 0; i < nq; ++i) {
            d.basis.eval_with_gradient(q.points[i], v, g);
            for (int k = 0; k < nb_; ++k) {
                d.phi(i, k) = v[k];
                d.dx(i, k) = g[k].x();
                d.dy(i, k) = g[k].y();
            }
        }
    }
    const auto& gl = quad::gauss_legendre(quad::points_for_degree(qdeg));
    const int ng = static_cast<int>(gl.points.size());
    edges_.resize(mesh.num_edges());
    for (Index i = 0; i < mesh.num_edges(); ++i) {
        EdgeData& d = edges_[i];
        const Vec a = mesh.vertex(mesh.edge(i)[0]), b = mesh.vertex(mesh.edge(i)[1]);
        const auto& els = mesh.edge_elements(i);
        for (int k = 0; k < 3; ++k)
            if (mesh.element_edge(els[0], k) == i) d.normal = mesh.outward_normal(els[0], k);
        for (int j = 0; j < ng; ++j) {
            d.points.push_back(a + gl.points[j] * (b - a));
            d.weights.push_back(gl.weights[j] * mesh.edge_length(i));
        }
        for (int s = 0; s < 2; ++s) {
            if (els[s] < 0) continue;
            d.phi[s].resize(ng, nb_);
            d.dx[s].resize(ng, nb_);
            d.dy[s].resize(ng, nb_);
            for (int j = 0; j < ng; ++j) {
                elements_[els[s]].basis.eval_with_gradient(d.points[j], v, g);
                for (int k = 0; k < nb_; ++k) {
                    d.phi[s](j, k) = v[k];
                    d.dx[s](j, k) = g[k].x();
                    d.dy[s](j, k) = g[k].y();
                }
            }
        }
    }
}

Coeffs DGSpace::block(const Eigen::VectorXd& v, Index e) const {
    return Eigen::Map<const Eigen::MatrixXd>(v.data() + offset(e), nb_, L_);
}

void DGSpace::set_block(Eigen::VectorXd& v, Index e, const Coeffs& c) const {
    Eigen::Map<Eigen::MatrixXd>(v.data() + offset(e), nb_, L_) = c;
}

State DGSpace::evaluate(const Eigen::VectorXd& v, Index e, const Vec& x) const {
    std::vector<double> psi(nb_);
    elements_[e].basis.eval(x, psi);
    const Eigen::Map<const Eigen::VectorXd> pv(psi.data(), nb_);
    return block(v, e).transpose() * pv;
}

State DGSpace::mean(const Eigen::VectorXd& v, Index e) const {
    const auto& d = elements_[e];
    State s = State::Zero(L_);
    const Coeffs c = block(v, e);
    for (std::size_t i = 0; i < d.points.size(); ++i)
        s += d.weights[i] * (d.phi.row(static_cast<Eigen::Index>(i)) * c).transpose();
    return s / mesh_->element_area(e);
}

Eigen::VectorXd DGSpace::project(const std::function<State(const Vec&)>& u) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(num_dofs());
    std::vector<double> psi(nb_);
    for (Index e = 0; e < mesh_->num_elements(); ++e) {
        const ElementQuadrature q = element_quadrature(*mesh_, e, 2 * p_ + 4);
        Coeffs c = Coeffs::Zero(nb_, L_);
        for (std::size_t i = 0; i < q.points.size(); ++i) {
            elements_[e].basis.eval(q.points[i], psi);
            const State ui = u(q.points[i]);
            if (ui.size() != L_) throw ConfigError("dg projection: initial data has the wrong number of components");
            for (int k = 0; k < nb_; ++k) c.row(k) += q.weights[i] * psi[k] * ui.transpose();
        }
        set_block(v, e, c);
    }
    return v;
}

State DGSpace::integral(const Eigen::VectorXd& v) const {
    State s = State::Zero(L_);
    for (Index e = 0; e < mesh_->num_elements(); ++e) s += mesh_->element_area(e) * mean(v, e);
    return s;
}

// ---------------------------------------------------------------------------
// Fluxes and parameters
// ---------------------------------------------------------------------------

State flux_rusanov(const ConservationLaw& law, const Vec& x, double t, const State& um, const State& up,
                   const Vec& n) {
    const double s = std::max(law.normal_wavespeed(x, t, um, n), law.normal_wavespeed(x, t, up, n));
    return 0.5 * (law.f(x, t, um) + law.f(x, t, up)) * n - 0.5 * s * (up - um);
}

void ViscosityParams::finalize(int p) {
    if (kappa2 == 0.0) kappa2 = 1.0 / (4.0 * std::max(p, 1));
    if (!(kappa1 > 0.0) || !(kappa2 > 0.0) || !(penalty > 0.0) || !(substep_scale > 0.0))
        throw ConfigError("viscosity: kappa1, kappa2, penalty and substep_scale must be positive");
}

// ---------------------------------------------------------------------------
// TentDG
// ---------------------------------------------------------------------------

TentDG::TentDG(const DGSpace& space, const ConservationLaw& law, const TentMap& map)
    : space_(&space), law_(&law), map_(&map) {
    if (law.components() != space.components()) throw ConfigError("dg: law and space disagree on components");
    const auto& mesh = space.mesh();
    const double dmax = delta_max();
    std::vector<Index> seen;
    for (int le = 0; le < map.size(); ++le) {
        const Index e = map.element(le).element;
        for (Index edge : mesh.element_edges(e)) {
            if (std::find(seen.begin(), seen.end(), edge) != seen.end()) continue;
            seen.push_back(edge);
            const auto& em = map.element(le);
            const double da = em.delta(mesh.vertex(mesh.edge(edge)[0]));
            const double db = em.delta(mesh.vertex(mesh.edge(edge)[1]));
            // δ vanishes on the outer patch boundary: those facets carry no flux.
            if (std::max(std::abs(da), std::abs(db)) <= 1e-12 * dmax) continue;
            const auto& els = mesh.edge_elements(edge);
            Facet f;
            f.edge = edge;
            f.left = map.local_element(els[0]);
            f.right = els[1] >= 0 ? map.local_element(els[1]) : -1;
            if (f.left < 0 || (els[1] >= 0 && f.right < 0))
                throw InvariantViolation("dg: a facet with nonzero delta leaves the patch");
            if (els[1] < 0) f.tag = mesh.edge_tag(edge).value_or(BoundaryTag::generic);
            f.h = els[1] >= 0 ? 0.5 * (mesh.element_diameter(els[0]) + mesh.element_diameter(els[1]))
                              : mesh.element_diameter(els[0]);
            facets_.push_back(f);
        }
    }
}

PatchState TentDG::gather(const Eigen::VectorXd& front) const {
    PatchState U(size());
    for (int le = 0; le < size(); ++le) U[le] = space_->block(front, global_element(le));
    return U;
}

void TentDG::scatter(const PatchState& U, Eigen::VectorXd& front) const {
    for (int le = 0; le < size(); ++le) space_->set_block(front, global_element(le), U[le]);
}

PatchState TentDG::zero() const {
    return PatchState(size(), Coeffs::Zero(space_->element_size(), space_->components()));
}

double TentDG::delta_max() const {
    const auto& mesh = space_->mesh();
    double d = 0.0;
    for (const auto& em : map_->elements())
        for (Index v : mesh.element(em.element)) d = std::max(d, em.delta(mesh.vertex(v)));
    return d;
}

double TentDG::min_diameter() const {
    double h = std::numeric_limits<double>::infinity();
    for (const auto& em : map_->elements()) h = std::min(h, space_->mesh().element_diameter(em.element));
    return h;
}

State TentDG::trace(const Coeffs& c, const Eigen::MatrixXd& phi, int q) const {
    return (phi.row(q) * c).transpose();
}

State TentDG::physical(int le, const Vec& x, double that, const State& U) const {
    const auto& em = map_->element(le);
    const double t = map_->time(le, x, that);
    if (!U.allFinite()) throw NonFiniteState("non-finite mapped state" + where(em.element, x, that));
    State w;
    try {
        w = law_->ginv(x, t, U, em.grad_phi(that));
        law_->check_physical(w);
    } catch (const CausalityViolation& e) {
        throw CausalityViolation(e.what() + where(em.element, x, that));
    } catch (const NonPhysicalState& e) {
        throw NonPhysicalState(e.what() + where(em.element, x, that));
    } catch (const NonFiniteState& e) {
        throw NonFiniteState(e.what() + where(em.element, x, that));
    }
    return w;
}

std::vector<std::vector<State>> TentDG::physical_states(const PatchState& U, double that) const {
    std::vector<std::vector<State>> w(size());
    for (int le = 0; le < size(); ++le) {
        const auto& d = space_->element(global_element(le));
        for (int q = 0; q < static_cast<int>(d.points.size()); ++q)
            w[le].push_back(physical(le, d.points[q], that, trace(U[le], d.phi, q)));
    }
    return w;
}

PatchState TentDG::rhs(const PatchState& U, double that) const {
    PatchState R = zero();
    for (int le = 0; le < size(); ++le) {
        const auto& em = map_->element(le);
        const auto& d = space_->element(em.element);
        for (int q = 0; q < static_cast<int>(d.points.size()); ++q) {
            const Vec& x = d.points[q];
            const double t = map_->time(le, x, that);
            const State w = physical(le, x, that, trace(U[le], d.phi, q));
            const double wd = d.weights[q] * em.delta(x);
            const Flux f = law_->f(x, t, w);
            R[le].noalias() += wd * (d.dx.row(q).transpose() * f.col(0).transpose() +
                                     d.dy.row(q).transpose() * f.col(1).transpose());
            const State b = law_->b(x, t, w);
            if (b.any()) R[le].noalias() -= wd * d.phi.row(q).transpose() * b.transpose();
        }
    }
    for (const auto& fc : facets_) {
        const auto& ed = space_->edge(fc.edge);
        const auto& em = map_->element(fc.left);
        for (int q = 0; q < static_cast<int>(ed.points.size()); ++q) {
            const Vec& x = ed.points[q];
            const double t = map_->time(fc.left, x, that);
            const State uL = physical(fc.left, x, that, trace(U[fc.left], ed.phi[0], q));
            const State uR = fc.right >= 0 ? physical(fc.right, x, that, trace(U[fc.right], ed.phi[1], q))
                                           : law_->boundary_state(fc.tag, x, t, uL, ed.normal);
            const State Q = flux_rusanov(*law_, x, t, uL, uR, ed.normal);
            const double wd = ed.weights[q] * em.delta(x);
            R[fc.left].noalias() -= wd * ed.phi[0].row(q).transpose() * Q.transpose();
            if (fc.right >= 0) R[fc.right].noalias() += wd * ed.phi[1].row(q).transpose() * Q.transpose();
        }
    }
    return R;
}

State TentDG::boundary_outflow(const PatchState& U, double that) const {
    State out = State::Zero(space_->components());
    for (const auto& fc : facets_) {
        if (fc.right >= 0) continue;
        const auto& ed = space_->edge(fc.edge);
        const auto& em = map_->element(fc.left);
        for (int q = 0; q < static_cast<int>(ed.points.size()); ++q) {
            const Vec& x = ed.points[q];
            const double t = map_->time(fc.left, x, that);
            const State uL = physical(fc.left, x, that, trace(U[fc.left], ed.phi[0], q));
            const State uR = law_->boundary_state(fc.tag, x, t, uL, ed.normal);
            out += ed.weights[q] * em.delta(x) * flux_rusanov(*law_, x, t, uL, uR, ed.normal);
        }
    }
    return out;
}

EntropyResidual TentDG::entropy_residual(const PatchState& U, const PatchState& dU, double that) const {
    if (!law_->has_entropy()) throw Error(law_->name() + ": entropy residual needs an entropy pair");
    const auto& mesh = space_->mesh();
    const int nb = space_->element_size();
    std::vector<Eigen::VectorXd> rhs(size(), Eigen::VectorXd::Zero(nb));
    EntropyResidual res;
    res.mean_entropy.assign(size(), 0.0);

    for (int le = 0; le < size(); ++le) {
        const auto& em = map_->element(le);
        const auto& d = space_->element(em.element);
        const Vec gphi = em.grad_phi(that);
        const Vec& gd = em.grad_delta;
        for (int q = 0; q < static_cast<int>(d.points.size()); ++q) {
            const Vec& x = d.points[q];
            const double t = map_->time(le, x, that);
            const State w = physical(le, x, that, trace(U[le], d.phi, q));
            const State Ut = trace(dU[le], d.phi, q);
            const double delta = em.delta(x);
            const State dE = law_->entropy_gradient(x, t, w);
            const EntropyFluxJacobian dF = law_->entropy_flux_jacobian(x, t, w);
            const Vec F = law_->entropy_flux(x, t, w);
            // d/dt̂ 𝓔̂(Ĝ⁻¹(Û, t̂), t̂): both Ĝ and 𝓔̂ depend on t̂ through grad φ, with ∂_t̂ grad φ = grad δ.
            State dEhat = dE;
            for (int j = 0; j < kSpaceDim; ++j) dEhat -= gphi[j] * dF.row(j).transpose();
            const Jacobian J = law_->mapped_dG(x, t, w, gphi);
            const State dw = J.partialPivLu().solve(State(Ut + law_->f(x, t, w) * gd));
            const double Et = dEhat.dot(dw) - F.dot(gd);
            rhs[le].noalias() += d.weights[q] *
                                 (Et * d.phi.row(q).transpose() -
                                  delta * (F.x() * d.dx.row(q).transpose() + F.y() * d.dy.row(q).transpose()));
            res.mean_entropy[le] += d.weights[q] * (law_->entropy(x, t, w) - F.dot(gphi));
        }
        res.mean_entropy[le] /= mesh.element_area(em.element);
    }
    for (const auto& fc : facets_) {
        const auto& ed = space_->edge(fc.edge);
        const auto& em = map_->element(fc.left);
        const Vec& n = ed.normal;
        for (int q = 0; q < static_cast<int>(ed.points.size()); ++q) {
            const Vec& x = ed.points[q];
            const double t = map_->time(fc.left, x, that);
            const State uL = physical(fc.left, x, that, trace(U[fc.left], ed.phi[0], q));
            const State uR = fc.right >= 0 ? physical(fc.right, x, that, trace(U[fc.right], ed.phi[1], q))
                                           : law_->boundary_state(fc.tag, x, t, uL, n);
            const double wd = ed.weights[q] * em.delta(x);
            // upwind on the trace from inside the element whose outward normal is used
            const double QL = law_->advective_normal_velocity(x, t, uL, n) >= 0.0 ? law_->entropy_flux(x, t, uL).dot(n)
                                                                                 : law_->entropy_flux(x, t, uR).dot(n);
            rhs[fc.left].noalias() += wd * QL * ed.phi[0].row(q).transpose();
            if (fc.right >= 0) {
                const double QR = law_->advective_normal_velocity(x, t, uR, -n) >= 0.0
                                      ? -law_->entropy_flux(x, t, uR).dot(n)
                                      : -law_->entropy_flux(x, t, uL).dot(n);
                rhs[fc.right].noalias() += wd * QR * ed.phi[1].row(q).transpose();
            }
        }
    }

    res.r.resize(size());
    res.R.resize(size());
    res.samples.resize(size());
    res.max_abs.assign(size(), 0.0);
    std::vector<double> psi(nb);
    for (int le = 0; le < size(); ++le) {
        const auto& em = map_->element(le);
        const auto& d = space_->element(em.element);
        Eigen::MatrixXd Md = Eigen::MatrixXd::Zero(nb, nb);
        for (int q = 0; q < static_cast<int>(d.points.size()); ++q)
            Md.noalias() += d.weights[q] * em.delta(d.points[q]) * d.phi.row(q).transpose() * d.phi.row(q);
        const Eigen::LLT<Eigen::MatrixXd> llt(Md);
        if (llt.info() != Eigen::Success) throw Error("entropy residual: singular delta-weighted mass block");
        res.r[le] = llt.solve(rhs[le]);
        res.samples[le] = d.points;
        for (Index v : mesh.element(em.element)) res.samples[le].push_back(mesh.vertex(v));
        for (const Vec& x : res.samples[le]) {
            d.basis.eval(x, psi);
            const double r = Eigen::Map<const Eigen::VectorXd>(psi.data(), nb).dot(res.r[le]);
            const double R = std::min(r, 0.0);
            res.R[le].push_back(R);
            res.max_abs[le] = std::max(res.max_abs[le], -R);
        }
    }
    return res;
}

ViscosityCoefficients TentDG::viscosity(const EntropyResidual& res, const PatchState& U, double that,
                                        const ViscosityParams& params) const {
    const auto& mesh = space_->mesh();
    const int p = std::max(space_->degree(), 1);
    ViscosityCoefficients v;
    v.nu_e.resize(size());
    v.nu_star.resize(size());
    for (int le = 0; le < size(); ++le) {
        const auto& em = map_->element(le);
        const auto& d = space_->element(em.element);
        const double diam = mesh.element_diameter(em.element);
        double speed = 0.0;
        for (int q = 0; q < static_cast<int>(d.points.size()); ++q) {
            const Vec& x = d.points[q];
            speed = std::max(speed, law_->limiter_speed(x, map_->time(le, x, that),
                                                        physical(le, x, that, trace(U[le], d.phi, q))));
        }
        v.nu_star[le] = params.kappa2 * diam * speed;
        const double cx = params.kappa1 * diam / p;
        double nu_e = cx * cx * res.max_abs[le];
        if (params.divide_by_mean_entropy) {
            const double E = std::abs(res.mean_entropy[le]);
            nu_e = E < 1e-14 ? v.nu_star[le] : nu_e / E;
        }
        v.nu_e[le] = nu_e;
        v.nu = std::max(v.nu, std::min(v.nu_star[le], nu_e));
    }
    return v;
}

PatchState TentDG::viscous_form(const PatchState& U, double that, const ViscosityParams& params) const {
    const int L = space_->components();
    PatchState A = zero();
    auto state_and_gradient = [&](int le, const Vec& x, const State& Uq, const State& Ux, const State& Uy,
                                  State& w, Eigen::MatrixXd& gw) {
        const auto& em = map_->element(le);
        w = physical(le, x, that, Uq);
        const Jacobian J = law_->mapped_dG(x, map_->time(le, x, that), w, em.grad_phi(that));
        Eigen::MatrixXd G(L, 2);
        G.col(0) = Ux;
        G.col(1) = Uy;
        gw = J.partialPivLu().solve(G);
    };
    State w;
    Eigen::MatrixXd gw;
    for (int le = 0; le < size(); ++le) {
        const auto& em = map_->element(le);
        const auto& d = space_->element(em.element);
        for (int q = 0; q < static_cast<int>(d.points.size()); ++q) {
            const Vec& x = d.points[q];
            state_and_gradient(le, x, trace(U[le], d.phi, q), trace(U[le], d.dx, q), trace(U[le], d.dy, q), w, gw);
            const double wd = d.weights[q] * em.delta(x);
            A[le].noalias() += wd * (d.dx.row(q).transpose() * gw.col(0).transpose() +
                                     d.dy.row(q).transpose() * gw.col(1).transpose());
        }
    }
    State wR;
    Eigen::MatrixXd gR;
    for (const auto& fc : facets_) {
        if (fc.right < 0 && !params.zero_exterior) continue;
        const auto& ed = space_->edge(fc.edge);
        const auto& em = map_->element(fc.left);
        const Vec& n = ed.normal;
        const double pen = params.penalty_weight(space_->degree()) / fc.h;
        for (int q = 0; q < static_cast<int>(ed.points.size()); ++q) {
            const Vec& x = ed.points[q];
            const double wd = ed.weights[q] * em.delta(x);
            state_and_gradient(fc.left, x, trace(U[fc.left], ed.phi[0], q), trace(U[fc.left], ed.dx[0], q),
                               trace(U[fc.left], ed.dy[0], q), w, gw);
            const Eigen::RowVectorXd dnL = ed.dx[0].row(q) * n.x() + ed.dy[0].row(q) * n.y();
            if (fc.right >= 0) {
                state_and_gradient(fc.right, x, trace(U[fc.right], ed.phi[1], q), trace(U[fc.right], ed.dx[1], q),
                                   trace(U[fc.right], ed.dy[1], q), wR, gR);
                const State jump = w - wR;
                const State avg = 0.5 * (gw + gR) * Eigen::Vector2d(n.x(), n.y());
                const Eigen::RowVectorXd dnR = ed.dx[1].row(q) * n.x() + ed.dy[1].row(q) * n.y();
                A[fc.left].noalias() += wd * (ed.phi[0].row(q).transpose() * (pen * jump - avg).transpose() -
                                              0.5 * dnL.transpose() * jump.transpose());
                A[fc.right].noalias() += wd * (ed.phi[1].row(q).transpose() * (avg - pen * jump).transpose() -
                                               0.5 * dnR.transpose() * jump.transpose());
            } else {
                const State gn = gw * Eigen::Vector2d(n.x(), n.y());
                A[fc.left].noalias() += wd * (ed.phi[0].row(q).transpose() * (0.5 * pen * w - 0.5 * gn).transpose() -
                                              0.5 * dnL.transpose() * w.transpose());
            }
        }
    }
    return A;
}

Eigen::MatrixXd TentDG::interior_penalty_matrix(const ViscosityParams& params) const {
    const int nb = space_->element_size();
    const int n = size() * nb;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int le = 0; le < size(); ++le) {
        const auto& em = map_->element(le);
        const auto& d = space_->element(em.element);
        for (int q = 0; q < static_cast<int>(d.points.size()); ++q) {
            const double wd = d.weights[q] * em.delta(d.points[q]);
            A.block(le * nb, le * nb, nb, nb).noalias() +=
                wd * (d.dx.row(q).transpose() * d.dx.row(q) + d.dy.row(q).transpose() * d.dy.row(q));
        }
    }
    for (const auto& fc : facets_) {
        if (fc.right < 0 && !params.zero_exterior) continue;
        const auto& ed = space_->edge(fc.edge);
        const auto& em = map_->element(fc.left);
        const Vec& n = ed.normal;
        const double pen = params.penalty_weight(space_->degree()) / fc.h;
        for (int q = 0; q < static_cast<int>(ed.points.size()); ++q) {
            const double wd = ed.weights[q] * em.delta(ed.points[q]);
            const Eigen::RowVectorXd pL = ed.phi[0].row(q);
            const Eigen::RowVectorXd dL = ed.dx[0].row(q) * n.x() + ed.dy[0].row(q) * n.y();
            const int oL = fc.left * nb;
            if (fc.right >= 0) {
                const Eigen::RowVectorXd pR = ed.phi[1].row(q);
                const Eigen::RowVectorXd dR = ed.dx[1].row(q) * n.x() + ed.dy[1].row(q) * n.y();
                const int oR = fc.right * nb;
                // [v] = v_L − v_R, {∂_n v} = ½(∂_n v_L + ∂_n v_R); rows test, columns trial
                const int off[2] = {oL, oR};
                const Eigen::RowVectorXd jr[2] = {pL, -pR};
                const Eigen::RowVectorXd ar[2] = {0.5 * dL, 0.5 * dR};
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        A.block(off[a], off[b], nb, nb).noalias() +=
                            wd * (pen * jr[a].transpose() * jr[b] - jr[a].transpose() * ar[b] -
                                  ar[a].transpose() * jr[b]);
            } else {
                A.block(oL, oL, nb, nb).noalias() +=
                    wd * (0.5 * pen * pL.transpose() * pL - 0.5 * pL.transpose() * dL - 0.5 * dL.transpose() * pL);
            }
        }
    }
    return A;
}

}  // namespace tentkit
