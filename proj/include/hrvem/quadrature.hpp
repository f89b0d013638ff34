#pragma once

#include <Eigen/Core>

#include <vector>

namespace hrvem {

/// Highest polynomial degree for which reference rules are available.
inline constexpr int kMaxQuadratureDegree = 20;

/// Points and weights on a reference simplex.
///
/// The reference triangle is (0,0), (1,0), (0,1) with measure 1/2; the
/// reference tetrahedron is the unit simplex with measure 1/6.  Rules are
/// collapsed (Duffy) tensor products of Gauss-Legendre rules and integrate
/// every polynomial of total degree <= `degree` exactly.
template <int Dim>
struct QuadratureRule {
    using Point = Eigen::Matrix<double, Dim, 1>;
    int degree = 0;
    std::vector<Point> points;
    std::vector<double> weights;
};

using TriangleRule = QuadratureRule<2>;
using TetrahedronRule = QuadratureRule<3>;

/// Gauss-Legendre nodes and weights on [0, 1] with `n` points.
void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Cached rule exact to `degree`; throws hrvem::Error for degree outside [0, kMaxQuadratureDegree].
const TriangleRule& triangle_rule(int degree);
const TetrahedronRule& tetrahedron_rule(int degree);

} // namespace hrvem
