#include "tentkit/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace tentkit::quad {

namespace {

Rule1D compute_gauss_legendre(int n) {
    // Newton iteration on P_n over [-1,1], then affine map to [0,1].
    Rule1D rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[n - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

TriangleRule compute_triangle(int degree) {
    // (s,r) ∈ [0,1]² ↦ (ξ,η) = (s, r(1-s)), Jacobian (1-s) adds one degree in s.
    const int ns = points_for_degree(degree + 1);
    const int nr = points_for_degree(degree);
    const Rule1D& gs = gauss_legendre(ns);
    const Rule1D& gr = gauss_legendre(nr);
    TriangleRule rule;
    rule.degree = degree;
    for (int i = 0; i < ns; ++i) {
        for (int j = 0; j < nr; ++j) {
            const double s = gs.points[i];
            const double r = gr.points[j];
            rule.xi.push_back(s);
            rule.eta.push_back(r * (1.0 - s));
            rule.weights.push_back(gs.weights[i] * gr.weights[j] * (1.0 - s));
        }
    }
    return rule;
}

std::mutex cache_mutex;

}  // namespace

const Rule1D& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    static std::map<int, Rule1D> cache;
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

const TriangleRule& triangle(int degree) {
    if (degree < 0) degree = 0;
    static std::map<int, TriangleRule> cache;
    {
        std::lock_guard lock(cache_mutex);
        auto it = cache.find(degree);
        if (it != cache.end()) return it->second;
    }
    TriangleRule rule = compute_triangle(degree);  // takes the lock inside gauss_legendre
    std::lock_guard lock(cache_mutex);
    return cache.emplace(degree, std::move(rule)).first->second;
}

}  // namespace tentkit::quad
