#include "tentkit/stepping.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tentkit {

namespace {

using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

/// Shifted Legendre polynomial P_n(2x−1).
long double legendre01(int n, long double x) {
    const long double t = 2 * x - 1;
    long double p0 = 1, p1 = t;
    if (n == 0) return p0;
    for (int k = 1; k < n; ++k) {
        const long double p2 = ((2 * k + 1) * t * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

/// Roots of P_s(2x−1) − P_{s−1}(2x−1) in (0,1]; the last one is x = 1.
std::vector<long double> radau_points(int s) {
    auto r = [s](long double x) { return legendre01(s, x) - legendre01(s - 1, x); };
    std::vector<long double> roots;
    const int grid = 4000;
    long double a = 0, fa = r(a);
    for (int i = 1; i <= grid; ++i) {
        long double b = static_cast<long double>(i) / grid, fb = r(b);
        if (i == grid) {
            roots.push_back(1.0L);
            break;
        }
        if (fa == 0) {
            roots.push_back(a);
        } else if ((fa < 0) != (fb < 0)) {
            long double lo = a, hi = b, flo = fa;
            for (int it = 0; it < 200; ++it) {
                const long double mid = 0.5L * (lo + hi), fm = r(mid);
                if ((fm < 0) == (flo < 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5L * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    return roots;
}

}  // namespace

ButcherTableau radau_iia(int s) {
    if (s < 1 || s > 5) throw ConfigError("radau_iia: stages must lie in 1..5, got " + std::to_string(s));
    const auto c = radau_points(s);
    if (static_cast<int>(c.size()) != s) throw Error("radau_iia: root isolation failed");
    // Collocation: Σ_m a_lm c_m^{k−1} = c_l^k / k, k = 1..s.
    LMat V(s, s);
    for (int k = 0; k < s; ++k)
        for (int m = 0; m < s; ++m) V(k, m) = std::pow(c[m], static_cast<long double>(k));
    const Eigen::PartialPivLU<LMat> lu(V);
    ButcherTableau tab;
    tab.s = s;
    tab.a.resize(s, s);
    tab.c.resize(s);
    for (int l = 0; l < s; ++l) {
        LVec rhs(s);
        for (int k = 0; k < s; ++k) rhs[k] = std::pow(c[l], static_cast<long double>(k + 1)) / (k + 1);
        const LVec row = lu.solve(rhs);
        for (int m = 0; m < s; ++m) tab.a(l, m) = static_cast<double>(row[m]);
        tab.c[l] = static_cast<double>(c[l]);
    }
    tab.c[s - 1] = 1.0;
    return tab;
}

double radau_scalar_step(const ButcherTableau& tab, double lambda, double h, double y0) {
    // Y = y0·1 + hλ A Y  ⇒  (I − hλA) Y = y0·1
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(tab.s, tab.s) - h * lambda * tab.a;
    const Eigen::VectorXd Y = M.partialPivLu().solve(Eigen::VectorXd::Constant(tab.s, y0));
    return Y[tab.s - 1];
}

namespace {

/// Row and column selections of the free components.
struct FreeSelection {
    int n, nf;
    std::span<const int> free;
    std::vector<char> is_free;

    FreeSelection(int n_, std::span<const int> f) : n(n_), nf(static_cast<int>(f.size())), free(f), is_free(n_, 0) {
        for (int i : free) is_free[i] = 1;
    }
    Eigen::MatrixXd rows(const Eigen::MatrixXd& A) const {
        Eigen::MatrixXd r(nf, A.cols());
        for (int i = 0; i < nf; ++i) r.row(i) = A.row(free[i]);
        return r;
    }
    /// A with the free (or the fixed) columns zeroed.
    Eigen::MatrixXd cols(const Eigen::MatrixXd& A, bool want_free) const {
        Eigen::MatrixXd r = A;
        for (int j = 0; j < n; ++j)
            if (static_cast<bool>(is_free[j]) != want_free) r.col(j).setZero();
        return r;
    }
    Eigen::MatrixXd block(const Eigen::MatrixXd& A_rows) const {
        Eigen::MatrixXd r(nf, nf);
        for (int j = 0; j < nf; ++j) r.col(j) = A_rows.col(free[j]);
        return r;
    }
};

/// The free-free stage matrix: blocks H_l δ_lm − a_lm S on the free rows and columns.
Eigen::PartialPivLU<Eigen::MatrixXd> stage_lu(const MatrixProvider& H, const Eigen::MatrixXd& S,
                                               const FreeSelection& sel, const ButcherTableau& tab,
                                               std::vector<Eigen::MatrixXd>* stage_rows) {
    const int nf = sel.nf, s = tab.s;
    const Eigen::MatrixXd S_fff = sel.block(sel.rows(S));
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(s * nf, s * nf);
    for (int l = 0; l < s; ++l) {
        const Eigen::MatrixXd Hl_f = sel.rows(H(tab.c[l]));
        A.block(l * nf, l * nf, nf, nf) += sel.block(Hl_f);
        for (int m = 0; m < s; ++m) A.block(l * nf, m * nf, nf, nf) -= tab.a(l, m) * S_fff;
        if (stage_rows) stage_rows->push_back(Hl_f);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) throw SingularStageMatrix("stage matrix is singular (rcond " + std::to_string(rc) + ")");
    return lu;
}

}  // namespace

Eigen::MatrixXd implicit_propagator(const MatrixProvider& H, const Eigen::MatrixXd& S, std::span<const int> free,
                                    const ButcherTableau& tab) {
    const int n = static_cast<int>(S.rows());
    const FreeSelection sel(n, free);
    const int nf = sel.nf, s = tab.s;
    std::vector<Eigen::MatrixXd> Hl_f;
    const auto lu = stage_lu(H, S, sel, tab, &Hl_f);
    const Eigen::MatrixXd S_fx = sel.cols(sel.rows(S), false);
    const Eigen::MatrixXd H0_f = sel.rows(H(0.0));
    Eigen::MatrixXd B(s * nf, n);
    for (int l = 0; l < s; ++l) {
        B.middleRows(l * nf, nf) = H0_f - sel.cols(Hl_f[l], false);
        for (int m = 0; m < s; ++m) B.middleRows(l * nf, nf) += tab.a(l, m) * S_fx;
    }
    return lu.solve(B).bottomRows(nf);
}

Eigen::MatrixXd implicit_load_propagator(const MatrixProvider& H, const Eigen::MatrixXd& S,
                                         std::span<const int> free, const ButcherTableau& tab) {
    const FreeSelection sel(static_cast<int>(S.rows()), free);
    const int nf = sel.nf, s = tab.s;
    const auto lu = stage_lu(H, S, sel, tab, nullptr);
    Eigen::MatrixXd B(s * nf, nf);
    for (int l = 0; l < s; ++l) B.middleRows(l * nf, nf).setIdentity();
    return lu.solve(B).bottomRows(nf);
}

Eigen::VectorXd implicit_tent_advance(const MatrixProvider& H, const Eigen::MatrixXd& S, const Eigen::VectorXd& u0,
                                      std::span<const int> free, const ButcherTableau& tab) {
    const Eigen::VectorXd us = implicit_propagator(H, S, free, tab) * u0;
    Eigen::VectorXd out = u0;
    for (std::size_t i = 0; i < free.size(); ++i) out[free[i]] = us[static_cast<Eigen::Index>(i)];
    return out;
}

int substep_count(int p, double safety) {
    if (p < 0) throw ConfigError("substep_count: negative degree");
    return std::max(1, static_cast<int>(std::ceil(safety * (p + 1) * (p + 1))));
}


int viscosity_substeps(double delta_max, double nu, int p, double h, double scale) {
    const double pp = std::max(p, 1);
    const double r = scale * delta_max * nu * pp * pp * pp * pp / (h * h);
    return std::max(1, static_cast<int>(std::ceil(r)));
}

namespace {

void axpy(PatchState& y, double a, const PatchState& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void require_finite(const TentDG& dg, const PatchState& U, int step) {
    for (int le = 0; le < dg.size(); ++le)
        if (!U[le].allFinite())
            throw NonFiniteState("explicit step " + std::to_string(step) + ": non-finite coefficients on element " +
                                 std::to_string(dg.global_element(le)));
}

}  // namespace

PatchState explicit_tent_advance(const TentDG& dg, PatchState U, const ExplicitParams& params,
                                 ExplicitDiagnostics* diag) {
    const int p = dg.space().degree();
    ViscosityParams visc = params.visc;
    visc.finalize(p);
    const int m = params.substeps > 0 ? params.substeps : substep_count(p, params.substep_safety);
    const double dt = 1.0 / m;
    const bool with_viscosity = params.viscosity && dg.law().has_entropy();
    const double dmax = dg.delta_max();
    const double hmin = dg.min_diameter();
    if (diag) diag->substeps += m;

    for (int j = 0; j < m; ++j) {
        const double t0 = j * dt;
        const double t1 = (j + 1 == m) ? 1.0 : (j + 1) * dt;
        const PatchState R0 = dg.rhs(U, t0);
        PatchState next = U;
        axpy(next, dt, R0);
        if (params.ssp_rk2) {
            require_finite(dg, next, j);
            const PatchState R1 = dg.rhs(next, t1);
            for (std::size_t i = 0; i < next.size(); ++i) next[i] = 0.5 * (U[i] + next[i] + dt * R1[i]);
        }
        if (with_viscosity) {
            const EntropyResidual res = dg.entropy_residual(U, R0, t0);
            const ViscosityCoefficients vc = dg.viscosity(res, U, t0, visc);
            if (diag && vc.nu > diag->max_nu) {
                diag->max_nu = vc.nu;
                int best = 0;
                for (int le = 1; le < dg.size(); ++le)
                    if (std::min(vc.nu_e[le], vc.nu_star[le]) > std::min(vc.nu_e[best], vc.nu_star[best])) best = le;
                diag->max_nu_element = dg.global_element(best);
            }
            if (vc.nu > 0.0) {
                const int nv = viscosity_substeps(dmax, vc.nu, p, hmin, visc.substep_scale);
                if (diag) diag->viscosity_substeps += nv;
                const double dtv = dt / nv;
                for (int k = 0; k < nv; ++k) {
                    require_finite(dg, next, j);
                    const PatchState A = dg.viscous_form(next, t1, visc);
                    axpy(next, -dtv * vc.nu, A);
                }
            }
        }
        require_finite(dg, next, j);
        U = std::move(next);
    }
    return U;
}

}  // namespace tentkit
