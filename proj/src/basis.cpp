#include "tentkit/basis.hpp"

#include "tentkit/quadrature.hpp"

#include <cmath>

namespace tentkit {

void ScaledMonomials::eval(const Vec& x, std::span<double> values) const {
    const double X = (x.x() - center.x()) / scale;
    const double Y = (x.y() - center.y()) / scale;
    int k = 0;
    double xpow[16], ypow[16];
    xpow[0] = ypow[0] = 1.0;
    for (int i = 1; i <= degree; ++i) {
        xpow[i] = xpow[i - 1] * X;
        ypow[i] = ypow[i - 1] * Y;
    }
    for (int d = 0; d <= degree; ++d)
        for (int b = 0; b <= d; ++b) values[k++] = xpow[d - b] * ypow[b];
}

void ScaledMonomials::eval_with_gradient(const Vec& x, std::span<double> values, std::span<Vec> gradients) const {
    const double X = (x.x() - center.x()) / scale;
    const double Y = (x.y() - center.y()) / scale;
    double xpow[16], ypow[16];
    xpow[0] = ypow[0] = 1.0;
    for (int i = 1; i <= degree; ++i) {
        xpow[i] = xpow[i - 1] * X;
        ypow[i] = ypow[i - 1] * Y;
    }
    const double inv = 1.0 / scale;
    int k = 0;
    for (int d = 0; d <= degree; ++d)
        for (int b = 0; b <= d; ++b) {
            const int a = d - b;
            values[k] = xpow[a] * ypow[b];
            gradients[k] = Vec(a > 0 ? a * xpow[a - 1] * ypow[b] * inv : 0.0,
                               b > 0 ? b * xpow[a] * ypow[b - 1] * inv : 0.0);
            ++k;
        }
}

ElementQuadrature element_quadrature(const SpatialMesh& mesh, Index element, int degree) {
    const auto& rule = quad::triangle(degree);
    const Mat jac = mesh.element_jacobian(element);
    const Vec x0 = mesh.vertex(mesh.element(element)[0]);
    const double det = std::abs(jac.determinant());
    ElementQuadrature q;
    q.points.reserve(rule.size());
    q.weights.reserve(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        q.points.push_back(x0 + jac * Vec(rule.xi[i], rule.eta[i]));
        q.weights.push_back(rule.weights[i] * det);
    }
    return q;
}

ElementBasis::ElementBasis(const SpatialMesh& mesh, Index element, int degree) {
    monomials_.center = mesh.element_centroid(element);
    monomials_.scale = 0.5 * mesh.element_diameter(element);
    monomials_.degree = degree;
    const int n = monomials_.size();
    const ElementQuadrature q = element_quadrature(mesh, element, 2 * degree);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> m(n);
    for (std::size_t i = 0; i < q.points.size(); ++i) {
        monomials_.eval(q.points[i], m);
        Eigen::Map<const Eigen::VectorXd> mv(m.data(), n);
        gram.noalias() += q.weights[i] * mv * mv.transpose();
    }
    // Two passes of Cholesky orthonormalisation; the second removes the
    // round-off left by the first.
    coeffs_ = Eigen::MatrixXd::Identity(n, n);
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::MatrixXd g = coeffs_ * gram * coeffs_.transpose();
        Eigen::LLT<Eigen::MatrixXd> llt(g);
        if (llt.info() != Eigen::Success) throw Error("ElementBasis: singular monomial Gram matrix");
        const Eigen::MatrixXd linv =
            llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
        coeffs_ = linv * coeffs_;
    }
}

void ElementBasis::eval(const Vec& x, std::span<double> values) const {
    const int n = size();
    double m[64];
    monomials_.eval(x, std::span<double>(m, n));
    Eigen::Map<const Eigen::VectorXd> mv(m, n);
    Eigen::Map<Eigen::VectorXd>(values.data(), n).noalias() = coeffs_ * mv;
}

void ElementBasis::eval_with_gradient(const Vec& x, std::span<double> values, std::span<Vec> gradients) const {
    const int n = size();
    double m[64];
    Vec g[64];
    monomials_.eval_with_gradient(x, std::span<double>(m, n), std::span<Vec>(g, n));
    for (int i = 0; i < n; ++i) {
        double v = 0;
        Vec gr = Vec::Zero();
        for (int k = 0; k <= i; ++k) {  // coefficients are lower triangular
            v += coeffs_(i, k) * m[k];
            gr += coeffs_(i, k) * g[k];
        }
        values[i] = v;
        gradients[i] = gr;
    }
}

}  // namespace tentkit
