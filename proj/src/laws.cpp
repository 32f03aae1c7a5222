#include "tentkit/laws.hpp"

#include <cmath>
#include <sstream>

namespace tentkit {

namespace {

State zeros(int L) { return State::Zero(L); }

std::string describe(const State& u) {
    std::ostringstream os;
    os.precision(10);
    os << "(";
    for (int i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u[i];
    os << ")";
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// ConservationLaw defaults
// ---------------------------------------------------------------------------

State ConservationLaw::g(const Vec&, double, const State& u) const { return u; }

State ConservationLaw::b(const Vec&, double, const State& u) const { return zeros(static_cast<int>(u.size())); }

Jacobian ConservationLaw::dg(const Vec&, double, const State& u) const {
    const int L = static_cast<int>(u.size());
    return Jacobian::Identity(L, L);
}

Jacobian ConservationLaw::db(const Vec&, double, const State& u) const {
    const int L = static_cast<int>(u.size());
    return Jacobian::Zero(L, L);
}

double ConservationLaw::normal_wavespeed(const Vec& x, double t, const State& u, const Vec&) const {
    return max_wavespeed(x, t, u);
}

State ConservationLaw::mapped_G(const Vec& x, double t, const State& u, const Vec& grad_phi) const {
    State G = g(x, t, u);
    G.noalias() -= f(x, t, u) * grad_phi;
    return G;
}

Jacobian ConservationLaw::mapped_dG(const Vec& x, double t, const State& u, const Vec& grad_phi) const {
    Jacobian J = dg(x, t, u);
    for (int j = 0; j < kSpaceDim; ++j) J -= grad_phi[j] * df(x, t, u, j);
    return J;
}

bool ConservationLaw::causal(const Vec& x, double t, const State& u, const Vec& grad_phi, double margin) const {
    return max_wavespeed(x, t, u) * grad_phi.norm() < 1.0 - margin;
}

double ConservationLaw::entropy(const Vec&, double, const State&) const {
    throw Error(name() + ": no entropy pair");
}
Vec ConservationLaw::entropy_flux(const Vec&, double, const State&) const {
    throw Error(name() + ": no entropy pair");
}
State ConservationLaw::entropy_gradient(const Vec&, double, const State&) const {
    throw Error(name() + ": no entropy pair");
}
EntropyFluxJacobian ConservationLaw::entropy_flux_jacobian(const Vec&, double, const State&) const {
    throw Error(name() + ": no entropy pair");
}
double ConservationLaw::advective_normal_velocity(const Vec&, double, const State&, const Vec&) const {
    throw Error(name() + ": no advective velocity");
}

double ConservationLaw::limiter_speed(const Vec& x, double t, const State& u) const {
    return max_wavespeed(x, t, u);
}

void ConservationLaw::check_physical(const State& u) const {
    if (!u.allFinite()) throw NonFiniteState(name() + ": non-finite state " + describe(u));
}

State ConservationLaw::reflect(const State& u, const Vec&) const { return u; }

State ConservationLaw::boundary_state(BoundaryTag tag, const Vec& x, double t, const State& interior,
                                      const Vec& n) const {
    switch (tag) {
        case BoundaryTag::inflow:
            return inflow_ ? inflow_(x, t) : interior;
        case BoundaryTag::reflect:
            return reflect(interior, n);
        case BoundaryTag::outflow:
        case BoundaryTag::generic:
            break;
    }
    return interior;
}

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

TransportLaw::TransportLaw(std::function<Vec(const Vec&)> beta) : beta_(std::move(beta)) {}

TransportLaw::TransportLaw(const Vec& beta) : constant_(true), beta_const_(beta) {
    beta_ = [beta](const Vec&) { return beta; };
}

Flux TransportLaw::f(const Vec& x, double, const State& u) const {
    Flux F(1, kSpaceDim);
    F.row(0) = u[0] * beta_(x).transpose();
    return F;
}

Jacobian TransportLaw::df(const Vec& x, double, const State&, int j) const {
    Jacobian J(1, 1);
    J(0, 0) = beta_(x)[j];
    return J;
}

double TransportLaw::max_wavespeed(const Vec& x, double, const State&) const { return beta_(x).norm(); }

double TransportLaw::normal_wavespeed(const Vec& x, double, const State&, const Vec& n) const {
    return std::abs(beta_(x).dot(n));
}

State TransportLaw::ginv(const Vec& x, double, const State& U, const Vec& grad_phi) const {
    const double s = 1.0 - beta_(x).dot(grad_phi);
    if (std::abs(s) < 1e-12) throw CausalityViolation("transport: 1 - beta.grad(phi) vanishes");
    State u(1);
    u[0] = U[0] / s;
    return u;
}

double TransportLaw::entropy(const Vec&, double, const State& u) const { return 0.5 * u[0] * u[0]; }

Vec TransportLaw::entropy_flux(const Vec& x, double, const State& u) const {
    return 0.5 * u[0] * u[0] * beta_(x);
}

State TransportLaw::entropy_gradient(const Vec&, double, const State& u) const { return u; }

EntropyFluxJacobian TransportLaw::entropy_flux_jacobian(const Vec& x, double, const State& u) const {
    EntropyFluxJacobian J(kSpaceDim, 1);
    J.col(0) = u[0] * beta_(x);
    return J;
}

double TransportLaw::advective_normal_velocity(const Vec& x, double, const State&, const Vec& n) const {
    return beta_(x).dot(n);
}

// ---------------------------------------------------------------------------
// Burgers
// ---------------------------------------------------------------------------

Flux BurgersLaw::f(const Vec&, double, const State& u) const {
    Flux F(1, kSpaceDim);
    F.setConstant(0.5 * u[0] * u[0]);
    return F;
}

Jacobian BurgersLaw::df(const Vec&, double, const State& u, int) const {
    Jacobian J(1, 1);
    J(0, 0) = u[0];
    return J;
}

double BurgersLaw::max_wavespeed(const Vec&, double, const State& u) const {
    return std::abs(u[0]) * std::sqrt(static_cast<double>(kSpaceDim));
}

double BurgersLaw::normal_wavespeed(const Vec&, double, const State& u, const Vec& n) const {
    return std::abs(u[0] * n.sum());
}

double burgers_ginv(double U, double d) {
    const double disc = 1.0 - 2.0 * d * U;
    if (!(disc >= 0.0)) throw CausalityViolation("burgers: negative discriminant 1 - 2dU");
    const double u = 2.0 * U / (1.0 + std::sqrt(disc));
    if (!(std::abs(u * d) < 1.0)) throw CausalityViolation("burgers: |u d| >= 1");
    return u;
}

State BurgersLaw::ginv(const Vec&, double, const State& U, const Vec& grad_phi) const {
    State u(1);
    u[0] = burgers_ginv(U[0], grad_phi.sum());
    return u;
}

double BurgersLaw::entropy(const Vec&, double, const State& u) const { return 0.5 * u[0] * u[0]; }

Vec BurgersLaw::entropy_flux(const Vec&, double, const State& u) const {
    return Vec::Constant(u[0] * u[0] * u[0] / 3.0);
}

State BurgersLaw::entropy_gradient(const Vec&, double, const State& u) const { return u; }

EntropyFluxJacobian BurgersLaw::entropy_flux_jacobian(const Vec&, double, const State& u) const {
    EntropyFluxJacobian J(kSpaceDim, 1);
    J.setConstant(u[0] * u[0]);
    return J;
}

double BurgersLaw::advective_normal_velocity(const Vec&, double, const State& u, const Vec& n) const {
    return u[0] * n.sum();
}

// ---------------------------------------------------------------------------
// Wave
// ---------------------------------------------------------------------------

WaveLaw::WaveLaw()
    : alpha_([](const Vec&) { return Mat::Identity(); }), beta_([](const Vec&) { return 0.0; }) {}

WaveLaw::WaveLaw(MaterialField alpha, DampingField beta) : alpha_(std::move(alpha)), beta_(std::move(beta)) {}

State WaveLaw::g(const Vec& x, double, const State& u) const {
    State r(3);
    r.head<2>() = alpha_(x).ldlt().solve(Vec(u.head<2>()));
    r[2] = u[2];
    return r;
}

Flux WaveLaw::f(const Vec&, double, const State& u) const {
    Flux F = Flux::Zero(3, kSpaceDim);
    for (int j = 0; j < kSpaceDim; ++j) {
        F(j, j) = -u[2];
        F(2, j) = -u[j];
    }
    return F;
}

State WaveLaw::b(const Vec& x, double, const State& u) const {
    State r = State::Zero(3);
    r[2] = beta_(x) * u[2];
    return r;
}

Jacobian WaveLaw::dg(const Vec& x, double, const State&) const {
    Jacobian J = Jacobian::Zero(3, 3);
    J.topLeftCorner<2, 2>() = alpha_(x).inverse();
    J(2, 2) = 1.0;
    return J;
}

Jacobian WaveLaw::df(const Vec&, double, const State&, int j) const {
    Jacobian J = Jacobian::Zero(3, 3);
    J(j, 2) = -1.0;
    J(2, j) = -1.0;
    return J;
}

Jacobian WaveLaw::db(const Vec& x, double, const State&) const {
    Jacobian J = Jacobian::Zero(3, 3);
    J(2, 2) = beta_(x);
    return J;
}

double WaveLaw::speed(const Vec& x) const {
    Eigen::SelfAdjointEigenSolver<Mat> es(alpha_(x), Eigen::EigenvaluesOnly);
    return std::sqrt(es.eigenvalues().maxCoeff());
}

double WaveLaw::max_wavespeed(const Vec& x, double, const State&) const { return speed(x); }

Jacobian WaveLaw::H(const Vec& x, const Vec& grad_phi) const {
    Jacobian M(3, 3);
    M.topLeftCorner<2, 2>() = alpha_(x).inverse();
    M.block<2, 1>(0, 2) = grad_phi;
    M.block<1, 2>(2, 0) = grad_phi.transpose();
    M(2, 2) = 1.0;
    return M;
}

State WaveLaw::ginv(const Vec& x, double, const State& U, const Vec& grad_phi) const {
    const Jacobian M = H(x, grad_phi);
    const Eigen::Matrix3d M3 = M;
    Eigen::PartialPivLU<Eigen::Matrix3d> lu(M3);
    if (std::abs(lu.determinant()) < 1e-14) throw CausalityViolation("wave: H is singular");
    return lu.solve(Eigen::Vector3d(U));
}

// ---------------------------------------------------------------------------
// Euler
// ---------------------------------------------------------------------------

State EulerState::to_state() const {
    State u(4);
    u << rho, m.x(), m.y(), E;
    return u;
}

EulerState EulerState::from_state(const State& u) {
    EulerState s;
    s.rho = u[0];
    s.m = Vec(u[1], u[2]);
    s.E = u[3];
    return s;
}

EulerState EulerState::from_primitive(double rho, const Vec& velocity, double pressure) {
    EulerState s;
    s.rho = rho;
    s.m = rho * velocity;
    s.E = 0.5 * dof * pressure + 0.5 * rho * velocity.squaredNorm();
    return s;
}

namespace {

void require_physical(const EulerState& s) {
    if (!std::isfinite(s.rho) || !s.m.allFinite() || !std::isfinite(s.E))
        throw NonFiniteState("euler: non-finite state " + describe(s.to_state()));
    if (!s.physical()) throw NonPhysicalState("euler: rho <= 0 or T <= 0 at " + describe(s.to_state()));
}

}  // namespace

Flux euler_flux(const EulerState& u) {
    require_physical(u);
    const Vec v = u.velocity();
    const double P = u.pressure();
    Flux F(4, kSpaceDim);
    for (int j = 0; j < kSpaceDim; ++j) {
        F(0, j) = u.m[j];
        for (int i = 0; i < kSpaceDim; ++i) F(1 + i, j) = u.m[i] * v[j] + (i == j ? P : 0.0);
        F(3, j) = (u.E + P) * v[j];
    }
    return F;
}

std::pair<double, Vec> euler_entropy(const EulerState& u) {
    require_physical(u);
    const double S = u.rho * (std::log(u.rho) - 0.5 * EulerState::dof * std::log(u.temperature()));
    return {S, u.m * (S / u.rho)};
}

double euler_wavespeed(const EulerState& u) {
    require_physical(u);
    return u.m.norm() / u.rho + std::sqrt(EulerState::gamma * u.temperature());
}

EulerState euler_ginv(const State& U, const Vec& grad_phi) {
    if (grad_phi.isZero(0.0)) {
        // Flat front: Ĝ is the identity, return the state bit-exactly.
        EulerState s = EulerState::from_state(U);
        require_physical(s);
        return s;
    }
    constexpr double d = EulerState::dof;
    const double R = U[0];
    const Vec M(U[1], U[2]);
    const double F = U[3];
    const double g2 = grad_phi.squaredNorm();
    const double a1 = R - M.dot(grad_phi);
    const double a2 = 2.0 * F * R - M.squaredNorm();
    const double radicand = a1 * a1 - (4.0 * (d + 1.0) / (d * d)) * g2 * a2;
    if (!std::isfinite(radicand)) throw NonFiniteState("euler: non-finite mapped state " + describe(U));
    if (!(a1 > 0.0)) throw CausalityViolation("euler: a1 <= 0 for mapped state " + describe(U));
    if (!(radicand >= 0.0)) throw CausalityViolation("euler: negative radicand for mapped state " + describe(U));
    if (!(R > 0.0)) throw NonPhysicalState("euler: mapped density <= 0 in " + describe(U));
    const double a3 = a2 / (a1 + std::sqrt(radicand));
    EulerState s;
    s.rho = R * R / (a1 - (2.0 / d) * g2 * a3);
    const double ratio = s.rho / R;
    s.m = ratio * (M + (2.0 / d) * a3 * grad_phi);
    s.E = ratio * (F + (2.0 * a3 / (d * s.rho)) * grad_phi.dot(s.m));
    require_physical(s);
    return s;
}

Flux EulerLaw::f(const Vec&, double, const State& u) const { return euler_flux(EulerState::from_state(u)); }

Jacobian EulerLaw::df(const Vec&, double, const State& u, int j) const {
    const EulerState s = EulerState::from_state(u);
    constexpr double gm1 = EulerState::gamma - 1.0;
    const Vec v = s.velocity();
    const double P = s.pressure();
    Eigen::RowVector4d dP;
    dP << 0.5 * gm1 * v.squaredNorm(), -gm1 * v.x(), -gm1 * v.y(), gm1;
    Eigen::RowVector4d dvj = Eigen::RowVector4d::Zero();
    dvj[0] = -v[j] / s.rho;
    dvj[1 + j] = 1.0 / s.rho;

    Jacobian J = Jacobian::Zero(4, 4);
    J(0, 1 + j) = 1.0;
    for (int i = 0; i < kSpaceDim; ++i) {
        // ∂(m_i v_j) = v_j ∂m_i + m_i ∂v_j
        Eigen::RowVector4d row = s.m[i] * dvj;
        row[1 + i] += v[j];
        if (i == j) row += dP;
        J.row(1 + i) = row;
    }
    Eigen::RowVector4d erow = v[j] * dP + (s.E + P) * dvj;
    erow[3] += v[j];
    J.row(3) = erow;
    return J;
}

double EulerLaw::max_wavespeed(const Vec&, double, const State& u) const {
    return euler_wavespeed(EulerState::from_state(u));
}

double EulerLaw::normal_wavespeed(const Vec&, double, const State& u, const Vec& n) const {
    const EulerState s = EulerState::from_state(u);
    require_physical(s);
    return std::abs(s.velocity().dot(n)) + std::sqrt(EulerState::gamma * s.temperature());
}

State EulerLaw::ginv(const Vec&, double, const State& U, const Vec& grad_phi) const {
    return euler_ginv(U, grad_phi).to_state();
}

double EulerLaw::entropy(const Vec&, double, const State& u) const {
    return euler_entropy(EulerState::from_state(u)).first;
}

Vec EulerLaw::entropy_flux(const Vec&, double, const State& u) const {
    return euler_entropy(EulerState::from_state(u)).second;
}

State EulerLaw::entropy_gradient(const Vec&, double, const State& u) const {
    const EulerState s = EulerState::from_state(u);
    require_physical(s);
    constexpr double d = EulerState::dof;
    const double ke = 0.5 * s.m.squaredNorm() / s.rho;
    const double q = s.E - ke;
    State gr(4);
    gr[0] = (1.0 + 0.5 * d) * (std::log(s.rho) + 1.0) - 0.5 * d * std::log(q) - 0.5 * d * ke / q -
            0.5 * d * std::log(4.0 / d);
    gr[1] = 0.5 * d * s.m.x() / q;
    gr[2] = 0.5 * d * s.m.y() / q;
    gr[3] = -0.5 * d * s.rho / q;
    return gr;
}

EntropyFluxJacobian EulerLaw::entropy_flux_jacobian(const Vec& x, double t, const State& u) const {
    const EulerState s = EulerState::from_state(u);
    const double S = entropy(x, t, u);
    const State dS = entropy_gradient(x, t, u);
    const Vec v = s.velocity();
    EntropyFluxJacobian J(kSpaceDim, 4);
    for (int j = 0; j < kSpaceDim; ++j) {
        J.row(j) = v[j] * dS.transpose();
        J(j, 0) -= S * v[j] / s.rho;
        J(j, 1 + j) += S / s.rho;
    }
    return J;
}

double EulerLaw::advective_normal_velocity(const Vec&, double, const State& u, const Vec& n) const {
    return Vec(u[1], u[2]).dot(n);
}

double EulerLaw::limiter_speed(const Vec&, double, const State& u) const {
    const EulerState s = EulerState::from_state(u);
    return s.rho * euler_wavespeed(s);
}

void EulerLaw::check_physical(const State& u) const { require_physical(EulerState::from_state(u)); }

State EulerLaw::reflect(const State& u, const Vec& n) const {
    State r = u;
    const Vec m(u[1], u[2]);
    const Vec mr = m - 2.0 * m.dot(n) * n;
    r[1] = mr.x();
    r[2] = mr.y();
    return r;
}

std::shared_ptr<ConservationLaw> make_law(const std::string& name) {
    if (name == "transport") return std::make_shared<TransportLaw>(Vec(1.0, 0.0));
    if (name == "burgers") return std::make_shared<BurgersLaw>();
    if (name == "wave") return std::make_shared<WaveLaw>();
    if (name == "euler") return std::make_shared<EulerLaw>();
    throw ConfigError("unknown law '" + name + "' (expected transport|burgers|wave|euler)");
}

}  // namespace tentkit
