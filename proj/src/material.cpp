#include "hrvem/material.hpp"

#include "hrvem/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace hrvem {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// Kelvin slot -> (row, col) of the tensor.
constexpr int kRow[6] = {0, 1, 2, 1, 0, 0};
constexpr int kCol[6] = {0, 1, 2, 2, 2, 1};

} // namespace

SymTensor3 to_kelvin(const Eigen::Matrix3d& t)
{
    SymTensor3 s;
    s << t(0, 0), t(1, 1), t(2, 2), kSqrt2 * t(1, 2), kSqrt2 * t(0, 2), kSqrt2 * t(0, 1);
    return s;
}

Eigen::Matrix3d from_kelvin(const SymTensor3& s)
{
    Eigen::Matrix3d t;
    const double a = s[3] / kSqrt2, b = s[4] / kSqrt2, c = s[5] / kSqrt2;
    t << s[0], c, b,
         c, s[1], a,
         b, a, s[2];
    return t;
}

Eigen::Matrix3d kelvin_basis(int k)
{
    Eigen::Matrix3d t = Eigen::Matrix3d::Zero();
    if (k < 3) {
        t(k, k) = 1.0;
    } else {
        t(kRow[k], kCol[k]) = 1.0 / kSqrt2;
        t(kCol[k], kRow[k]) = 1.0 / kSqrt2;
    }
    return t;
}

ElasticMaterial ElasticMaterial::isotropic(double lambda, double mu)
{
    if (!(mu > 0.0) || !(3.0 * lambda + 2.0 * mu > 0.0))
        throw ConfigError("isotropic material needs mu > 0 and 3 lambda + 2 mu > 0");
    SymTensor3 m = SymTensor3::Zero();
    m.head<3>().setOnes();
    const KelvinMatrix mm = m * m.transpose();

    ElasticMaterial mat;
    mat.C_ = 2.0 * mu * KelvinMatrix::Identity() + lambda * mm;
    mat.D_ = (KelvinMatrix::Identity() - lambda / (3.0 * lambda + 2.0 * mu) * mm) / (2.0 * mu);
    mat.isotropic_ = true;
    mat.lambda_ = lambda;
    mat.mu_ = mu;
    return mat;
}

ElasticMaterial ElasticMaterial::from_stiffness(const KelvinMatrix& stiffness)
{
    if ((stiffness - stiffness.transpose()).cwiseAbs().maxCoeff() > 1e-12 * stiffness.cwiseAbs().maxCoeff())
        throw ConfigError("Kelvin stiffness must be symmetric");
    Eigen::LLT<KelvinMatrix> llt(stiffness);
    if (llt.info() != Eigen::Success)
        throw ConfigError("Kelvin stiffness must be positive definite");
    ElasticMaterial mat;
    mat.C_ = stiffness;
    mat.D_ = llt.solve(KelvinMatrix::Identity());
    mat.D_ = 0.5 * (mat.D_ + mat.D_.transpose()).eval();
    return mat;
}

ElasticMaterial ElasticMaterial::from_upper_triangle(const std::vector<double>& entries)
{
    if (entries.size() != 21)
        throw ConfigError("anisotropic stiffness needs 21 upper-triangle entries");
    KelvinMatrix c;
    std::size_t k = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = i; j < 6; ++j) {
            c(i, j) = entries[k];
            c(j, i) = entries[k];
            ++k;
        }
    return from_stiffness(c);
}

SymTensor3 apply_C(const ElasticMaterial& m, const SymTensor3& strain)
{
    return m.stiffness() * strain;
}

SymTensor3 apply_D(const ElasticMaterial& m, const SymTensor3& stress)
{
    return m.compliance() * stress;
}

double kappa(const ElasticMaterial& m, KappaRule rule)
{
    if (rule == KappaRule::spectral_norm) {
        Eigen::SelfAdjointEigenSolver<KelvinMatrix> es(m.compliance(), Eigen::EigenvaluesOnly);
        return es.eigenvalues().maxCoeff();
    }
    return 0.5 * m.compliance().trace();
}

MaterialTable::MaterialTable(std::vector<ElasticMaterial> materials, std::vector<int> cell_material)
    : materials_(std::move(materials)), cell_material_(std::move(cell_material))
{
    if (materials_.empty())
        throw ConfigError("material table is empty");
    for (int id : cell_material_)
        if (id < 0 || id >= static_cast<int>(materials_.size()))
            throw ConfigError("cell material index out of range");
}

} // namespace hrvem
