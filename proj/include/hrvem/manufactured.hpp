#pragma once

#include "hrvem/geometry.hpp"
#include "hrvem/material.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace hrvem {

/// One-dimensional factor: either a cubic polynomial c0 + c1 t + c2 t^2 + c3 t^3
/// or offset + amplitude sin(frequency t + phase).
struct Factor1D {
    enum class Kind { polynomial, trigonometric };
    Kind kind = Kind::polynomial;
    std::array<double, 4> coeffs{1.0, 0.0, 0.0, 0.0};
    double offset = 0.0;
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;

    static Factor1D constant(double c) { return polynomial({c, 0.0, 0.0, 0.0}); }
    static Factor1D polynomial(std::array<double, 4> c);
    static Factor1D trig(double amplitude, double frequency, double phase = 0.0, double offset = 0.0);

    /// Value, first and second derivative at t.
    std::array<double, 3> eval(double t) const;
};

/// Separable term coefficient * g_x(x) g_y(y) g_z(z) contributing to one
/// displacement component.
struct SeparableTerm {
    int component = 0;
    double coefficient = 1.0;
    std::array<Factor1D, 3> factors;
};

/// Exact displacement u (a sum of separable terms), with sigma = C eps(u),
/// f = -div sigma and g = u on the boundary derived analytically.
class ManufacturedSolution {
public:
    ManufacturedSolution(std::string name, std::vector<SeparableTerm> terms, ElasticMaterial material);

    const std::string& name() const { return name_; }
    const ElasticMaterial& material() const { return material_; }

    Vec3 displacement(const Vec3& x) const;
    /// grad(u)_{ij} = d u_i / d x_j.
    Mat3 gradient(const Vec3& x) const;
    Mat3 stress(const Vec3& x) const;
    Vec3 divergence_of_stress(const Vec3& x) const;
    Vec3 body_force(const Vec3& x) const { return -divergence_of_stress(x); }
    Vec3 boundary_displacement(const Vec3& x) const { return displacement(x); }

private:
    // Value, gradient and Hessian of each displacement component.
    void evaluate(const Vec3& x, Vec3& u, Mat3& grad, std::array<Mat3, 3>* hess) const;

    std::string name_;
    std::vector<SeparableTerm> terms_;
    ElasticMaterial material_;
};

/// Built-in examples 1-3 on the unit cube.  The Lame constants default to
/// the example's own (1, 1), (1e5, 0.5) and (1, 1).  Throws ConfigError on
/// an unknown id.
ManufacturedSolution example(int id, std::optional<double> lambda = std::nullopt,
                             std::optional<double> mu = std::nullopt);

} // namespace hrvem
