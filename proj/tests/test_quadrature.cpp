#include "doctest.h"

#include "tentkit/quadrature.hpp"

#include <cmath>

using namespace tentkit;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("gauss_legendre integrates monomials up to degree 2n-1") {
    for (int n = 1; n <= 10; ++n) {
        const auto& rule = quad::gauss_legendre(n);
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double s = 0;
            for (int i = 0; i < n; ++i) s += rule.weights[i] * std::pow(rule.points[i], k);
            CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
        }
    }
}

TEST_CASE("gauss_legendre rejects n < 1") { CHECK_THROWS(quad::gauss_legendre(0)); }

TEST_CASE("triangle rule integrates xi^a eta^b exactly up to its degree") {
    // ∫_T ξ^a η^b = a! b! / (a+b+2)!
    for (int degree = 0; degree <= 12; ++degree) {
        const auto& rule = quad::triangle(degree);
        for (int a = 0; a <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b) {
                double s = 0;
                for (std::size_t i = 0; i < rule.size(); ++i)
                    s += rule.weights[i] * std::pow(rule.xi[i], a) * std::pow(rule.eta[i], b);
                const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                CHECK(s == doctest::Approx(exact).epsilon(1e-13));
            }
    }
}

TEST_CASE("triangle rule points lie inside the reference triangle") {
    const auto& rule = quad::triangle(9);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        CHECK(rule.xi[i] > 0);
        CHECK(rule.eta[i] > 0);
        CHECK(rule.xi[i] + rule.eta[i] < 1);
        CHECK(rule.weights[i] > 0);
    }
}
