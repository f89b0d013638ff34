#include "hrvem/quadrature.hpp"

#include "hrvem/errors.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace hrvem {

void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        // Newton on P_n starting from the Chebyshev-like guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        // Map [-1, 1] -> [0, 1].
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

namespace {

void check_degree(int degree)
{
    if (degree < 0 || degree > kMaxQuadratureDegree)
        throw Error("unsupported quadrature degree " + std::to_string(degree) + " (max "
                    + std::to_string(kMaxQuadratureDegree) + ")");
}

int points_for(int degree) { return degree / 2 + 1; }

TriangleRule make_triangle(int degree)
{
    // x = u, y = v (1 - u), Jacobian (1 - u).
    std::vector<double> gu, wu, gv, wv;
    gauss_legendre_unit(points_for(degree + 1), gu, wu);
    gauss_legendre_unit(points_for(degree), gv, wv);
    TriangleRule rule;
    rule.degree = degree;
    for (std::size_t i = 0; i < gu.size(); ++i) {
        for (std::size_t j = 0; j < gv.size(); ++j) {
            const double u = gu[i];
            const double v = gv[j];
            rule.points.emplace_back(u, v * (1.0 - u));
            rule.weights.push_back(wu[i] * wv[j] * (1.0 - u));
        }
    }
    return rule;
}

TetrahedronRule make_tetrahedron(int degree)
{
    // x = u, y = v (1 - u), z = w (1 - u)(1 - v), Jacobian (1 - u)^2 (1 - v).
    std::vector<double> gu, wu, gv, wv, gw, ww;
    gauss_legendre_unit(points_for(degree + 2), gu, wu);
    gauss_legendre_unit(points_for(degree + 1), gv, wv);
    gauss_legendre_unit(points_for(degree), gw, ww);
    TetrahedronRule rule;
    rule.degree = degree;
    for (std::size_t i = 0; i < gu.size(); ++i) {
        for (std::size_t j = 0; j < gv.size(); ++j) {
            for (std::size_t k = 0; k < gw.size(); ++k) {
                const double u = gu[i];
                const double v = gv[j];
                const double w = gw[k];
                rule.points.emplace_back(u, v * (1.0 - u), w * (1.0 - u) * (1.0 - v));
                rule.weights.push_back(wu[i] * wv[j] * ww[k] * (1.0 - u) * (1.0 - u) * (1.0 - v));
            }
        }
    }
    return rule;
}

template <class Rule, class Factory>
const Rule& cached(int degree, Factory make)
{
    static std::array<Rule, kMaxQuadratureDegree + 1> cache;
    static std::array<std::once_flag, kMaxQuadratureDegree + 1> flags;
    std::call_once(flags[degree], [&] { cache[degree] = make(degree); });
    return cache[degree];
}

} // namespace

const TriangleRule& triangle_rule(int degree)
{
    check_degree(degree);
    return cached<TriangleRule>(degree, make_triangle);
}

const TetrahedronRule& tetrahedron_rule(int degree)
{
    check_degree(degree);
    return cached<TetrahedronRule>(degree, make_tetrahedron);
}

} // namespace hrvem
