#include "hrvem/manufactured.hpp"

#include "hrvem/errors.hpp"

#include <cmath>
#include <numbers>

namespace hrvem {

Factor1D Factor1D::polynomial(std::array<double, 4> c)
{
    Factor1D f;
    f.kind = Kind::polynomial;
    f.coeffs = c;
    return f;
}

Factor1D Factor1D::trig(double amplitude, double frequency, double phase, double offset)
{
    Factor1D f;
    f.kind = Kind::trigonometric;
    f.amplitude = amplitude;
    f.frequency = frequency;
    f.phase = phase;
    f.offset = offset;
    return f;
}

std::array<double, 3> Factor1D::eval(double t) const
{
    if (kind == Kind::polynomial) {
        const auto& c = coeffs;
        return {c[0] + t * (c[1] + t * (c[2] + t * c[3])), c[1] + t * (2.0 * c[2] + 3.0 * t * c[3]),
                2.0 * c[2] + 6.0 * t * c[3]};
    }
    const double a = frequency * t + phase;
    const double s = std::sin(a);
    return {offset + amplitude * s, amplitude * frequency * std::cos(a), -amplitude * frequency * frequency * s};
}

ManufacturedSolution::ManufacturedSolution(std::string name, std::vector<SeparableTerm> terms,
                                           ElasticMaterial material)
    : name_(std::move(name)), terms_(std::move(terms)), material_(std::move(material))
{
    for (const auto& t : terms_)
        if (t.component < 0 || t.component > 2)
            throw ConfigError("separable term component must be 0, 1 or 2");
}

void ManufacturedSolution::evaluate(const Vec3& x, Vec3& u, Mat3& grad, std::array<Mat3, 3>* hess) const
{
    u.setZero();
    grad.setZero();
    if (hess)
        for (auto& h : *hess)
            h.setZero();
    for (const auto& t : terms_) {
        std::array<std::array<double, 3>, 3> v; // v[axis][derivative order]
        for (int a = 0; a < 3; ++a)
            v[a] = t.factors[a].eval(x[a]);
        const int i = t.component;
        const double c = t.coefficient;
        u[i] += c * v[0][0] * v[1][0] * v[2][0];
        grad(i, 0) += c * v[0][1] * v[1][0] * v[2][0];
        grad(i, 1) += c * v[0][0] * v[1][1] * v[2][0];
        grad(i, 2) += c * v[0][0] * v[1][0] * v[2][1];
        if (!hess)
            continue;
        for (int j = 0; j < 3; ++j)
            for (int k = j; k < 3; ++k) {
                double p = c;
                for (int a = 0; a < 3; ++a)
                    p *= v[a][(a == j) + (a == k)];
                (*hess)[i](j, k) += p;
                if (k != j)
                    (*hess)[i](k, j) += p;
            }
    }
}

Vec3 ManufacturedSolution::displacement(const Vec3& x) const
{
    Vec3 u;
    Mat3 g;
    evaluate(x, u, g, nullptr);
    return u;
}

Mat3 ManufacturedSolution::gradient(const Vec3& x) const
{
    Vec3 u;
    Mat3 g;
    evaluate(x, u, g, nullptr);
    return g;
}

Mat3 ManufacturedSolution::stress(const Vec3& x) const
{
    const Mat3 g = gradient(x);
    return from_kelvin(apply_C(material_, to_kelvin(0.5 * (g + g.transpose()))));
}

Vec3 ManufacturedSolution::divergence_of_stress(const Vec3& x) const
{
    Vec3 u;
    Mat3 g;
    std::array<Mat3, 3> h;
    evaluate(x, u, g, &h);
    // d_j sigma = C d_j eps, with (d_j eps)_{kl} = (H_k(l, j) + H_l(k, j)) / 2.
    Vec3 div = Vec3::Zero();
    for (int j = 0; j < 3; ++j) {
        Mat3 de;
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l)
                de(k, l) = 0.5 * (h[k](l, j) + h[l](k, j));
        const Mat3 ds = from_kelvin(apply_C(material_, to_kelvin(de)));
        div += ds.col(j);
    }
    return div;
}

namespace {

using F = Factor1D;
constexpr double pi = std::numbers::pi;

ManufacturedSolution example1(double lambda, double mu)
{
    // u_i = 10 sin(pi x) sin(pi y) sin(pi z) for every i.
    const F s = F::trig(1.0, pi);
    std::vector<SeparableTerm> terms;
    for (int i = 0; i < 3; ++i)
        terms.push_back({i, 10.0, {s, s, s}});
    return {"example1", std::move(terms), ElasticMaterial::isotropic(lambda, mu)};
}

ManufacturedSolution example2(double lambda, double mu)
{
    // A(t) = sin^2(2 pi t) = 1/2 - 1/2 cos(4 pi t);  B(t) = cos(2 pi t) sin(2 pi t) = sin(4 pi t) / 2.
    // u_i = A(x_i) (B(x_{i+1}) A(x_{i+2}) - B(x_{i+2}) A(x_{i+1})), indices mod 3.
    const F A = F::trig(-0.5, 4.0 * pi, 0.5 * pi, 0.5);
    const F B = F::trig(0.5, 4.0 * pi);
    std::vector<SeparableTerm> terms;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        const int k = (i + 2) % 3;
        SeparableTerm plus{i, 1.0, {}};
        plus.factors[i] = A;
        plus.factors[j] = B;
        plus.factors[k] = A;
        SeparableTerm minus{i, -1.0, {}};
        minus.factors[i] = A;
        minus.factors[j] = A;
        minus.factors[k] = B;
        terms.push_back(plus);
        terms.push_back(minus);
    }
    return {"example2", std::move(terms), ElasticMaterial::isotropic(lambda, mu)};
}

ManufacturedSolution example3(double lambda, double mu)
{
    // u_i = 2 x_i^3 - 3 x_i x_j^2 - 3 x_i x_k^2.
    const F one = F::constant(1.0);
    const F t1 = F::polynomial({0.0, 1.0, 0.0, 0.0});
    const F t2 = F::polynomial({0.0, 0.0, 1.0, 0.0});
    const F t3 = F::polynomial({0.0, 0.0, 0.0, 1.0});
    std::vector<SeparableTerm> terms;
    for (int i = 0; i < 3; ++i) {
        SeparableTerm cubic{i, 2.0, {one, one, one}};
        cubic.factors[i] = t3;
        terms.push_back(cubic);
        for (int j = 0; j < 3; ++j) {
            if (j == i)
                continue;
            SeparableTerm mixed{i, -3.0, {one, one, one}};
            mixed.factors[i] = t1;
            mixed.factors[j] = t2;
            terms.push_back(mixed);
        }
    }
    return {"example3", std::move(terms), ElasticMaterial::isotropic(lambda, mu)};
}

} // namespace

ManufacturedSolution example(int id, std::optional<double> lambda, std::optional<double> mu)
{
    switch (id) {
    case 1:
        return example1(lambda.value_or(1.0), mu.value_or(1.0));
    case 2:
        return example2(lambda.value_or(1e5), mu.value_or(0.5));
    case 3:
        return example3(lambda.value_or(1.0), mu.value_or(1.0));
    default:
        throw ConfigError("unknown example id " + std::to_string(id) + " (expected 1, 2 or 3)");
    }
}

} // namespace hrvem
