#pragma once

#include <Eigen/Core>

#include <vector>

namespace hrvem {

/// Symmetric 3x3 tensor in Kelvin notation: (s11, s22, s33, sqrt2 s23,
/// sqrt2 s13, sqrt2 s12).  The Euclidean dot product of two Kelvin vectors
/// equals the Frobenius product of the tensors.
using SymTensor3 = Eigen::Matrix<double, 6, 1>;
using KelvinMatrix = Eigen::Matrix<double, 6, 6>;

SymTensor3 to_kelvin(const Eigen::Matrix3d& t);
Eigen::Matrix3d from_kelvin(const SymTensor3& s);

/// Kelvin basis tensor k (orthonormal under the Frobenius product).
Eigen::Matrix3d kelvin_basis(int k);

enum class KappaRule {
    half_trace,    ///< kappa = 1/2 tr(D) of the Kelvin matrix
    spectral_norm, ///< kappa = largest eigenvalue of D
};

/// Linear elastic law stored as Kelvin stiffness C and compliance D = C^-1.
class ElasticMaterial {
public:
    /// Isotropic law; requires mu > 0 and 3 lambda + 2 mu > 0.
    static ElasticMaterial isotropic(double lambda, double mu);

    /// General anisotropic law from a symmetric positive definite Kelvin stiffness.
    static ElasticMaterial from_stiffness(const KelvinMatrix& stiffness);

    /// Upper triangle of the Kelvin stiffness, row-major (21 entries).
    static ElasticMaterial from_upper_triangle(const std::vector<double>& entries);

    const KelvinMatrix& stiffness() const { return C_; }
    const KelvinMatrix& compliance() const { return D_; }

    bool is_isotropic() const { return isotropic_; }
    double lambda() const { return lambda_; }
    double mu() const { return mu_; }

private:
    KelvinMatrix C_ = KelvinMatrix::Identity();
    KelvinMatrix D_ = KelvinMatrix::Identity();
    bool isotropic_ = false;
    double lambda_ = 0.0;
    double mu_ = 0.0;
};

SymTensor3 apply_C(const ElasticMaterial& m, const SymTensor3& strain);
SymTensor3 apply_D(const ElasticMaterial& m, const SymTensor3& stress);

/// Stabilization scale kappa_E.
double kappa(const ElasticMaterial& m, KappaRule rule = KappaRule::half_trace);

/// Piecewise-constant material assignment over the cells of a mesh.
class MaterialTable {
public:
    explicit MaterialTable(ElasticMaterial uniform) : materials_{std::move(uniform)} {}
    MaterialTable(std::vector<ElasticMaterial> materials, std::vector<int> cell_material);

    const ElasticMaterial& of_cell(int cell) const
    {
        return cell_material_.empty() ? materials_.front() : materials_[cell_material_[cell]];
    }
    bool uniform() const { return cell_material_.empty(); }

private:
    std::vector<ElasticMaterial> materials_;
    std::vector<int> cell_material_;
};

} // namespace hrvem
