#pragma once

#include "hrvem/geometry.hpp"
#include "hrvem/material.hpp"

#include <Eigen/Core>

#include <functional>
#include <span>
#include <vector>

namespace hrvem {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix36 = Eigen::Matrix<double, 3, 6>;

/// Default quadrature degree for every face and cell integral.
inline constexpr int kDefaultQuadratureDegree = 4;

/// Infinitesimal rigid motion r(x) = alpha + omega x (x - center).
struct RigidMotion {
    Vec3 alpha = Vec3::Zero();
    Vec3 omega = Vec3::Zero();
    Vec3 center = Vec3::Zero();

    Vec3 operator()(const Vec3& x) const { return alpha + omega.cross(x - center); }

    /// Coefficients in the generator basis (alpha, omega).
    Vector6 coefficients() const
    {
        Vector6 c;
        c << alpha, omega;
        return c;
    }
    static RigidMotion from_coefficients(const Vector6& c, const Vec3& center)
    {
        return {c.head<3>(), c.tail<3>(), center};
    }
};

/// The six generators e_k (k < 3) and e_{k-3} x (x - center) evaluated at x, as columns.
Matrix36 rigid_generators(const Vec3& x, const Vec3& center);

/// Columns psi_1..psi_6 of the face traction space at x: t1, t2,
/// n x (x - x_f), n, x~ n, y~ n (local coordinates centred at x_f).
Matrix36 face_traction_basis(const FaceFrame& frame, const Vec3& x);

enum class Stabilization {
    element_diameter, ///< kappa h_E \int_{dE} (sigma n).(tau n)
    face_diameter,    ///< kappa sum_f h_f \int_f (sigma n).(tau n)
};

using VectorField = std::function<Vec3(const Vec3&)>;
using TensorField = std::function<Mat3(const Vec3&)>;

/// Per-element virtual element data for one cell of a mesh.
///
/// Local stress dofs are ordered face by face in cell storage order and,
/// within a face, as the traction basis (t1, t2, rot, n, x~ n, y~ n).  The
/// outward traction of local dof (f, i) is sign_f * psi_i, so the local
/// coefficients coincide with the canonical global face coefficients.
class LocalElement {
public:
    LocalElement(const PolyhedralMesh& mesh, int cell, int quad_degree = kDefaultQuadratureDegree);

    int cell() const { return cell_; }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int num_dofs() const { return 6 * num_faces(); }
    const CellGeometry& geometry() const { return geo_; }
    const std::vector<SignedFace>& faces() const { return faces_; }
    const FaceFrame& frame(int local_face) const { return mesh_->frame(faces_[local_face].face); }
    const PointSet& face_points(int local_face) const { return face_points_[local_face]; }

    /// M = \int_E (|r|^2 I - r r^T), r = x - x_E.
    const Mat3& rotation_moment() const { return rotation_moment_; }

    /// 6 x ndofs map from stress dofs to the divergence coefficients (alpha, omega).
    const Eigen::MatrixXd& divergence_operator() const { return divergence_; }

    /// 6 x ndofs map from stress dofs to the Kelvin components of Pi_E.
    const Eigen::MatrixXd& projector() const { return projector_; }

    RigidMotion reconstruct_divergence(const Eigen::VectorXd& dofs) const;
    SymTensor3 project_pi(const Eigen::VectorXd& dofs) const;

    /// A_E for a_E^h: consistency |E| <D Pi, Pi> plus stabilization.
    Eigen::MatrixXd local_stiffness(const ElasticMaterial& material,
                                    Stabilization stab = Stabilization::element_diameter,
                                    KappaRule rule = KappaRule::half_trace) const;

    /// Stabilization part of A_E alone.
    Eigen::MatrixXd local_stabilization(double kappa_value, Stabilization stab) const;

    /// B_E[i][k] = \int_E div(phi_i) . r_k by cell quadrature (ndofs x 6).
    Eigen::MatrixXd local_mixed() const;

    /// g_E[k] = \int_E f . r_k.
    Vector6 local_load(const VectorField& f) const;

    /// Stress dofs of the interpolant I_E tau.
    Eigen::VectorXd interpolate_stress(const TensorField& tau) const;

    /// Outward traction of the discrete stress on local face `lf` at x.
    Vec3 traction(const Eigen::VectorXd& dofs, int lf, const Vec3& x) const;

private:
    const PolyhedralMesh* mesh_;
    int cell_;
    int degree_;
    CellGeometry geo_;
    std::vector<SignedFace> faces_;
    std::vector<std::vector<Vec3>> polygons_;
    std::vector<PointSet> face_points_;
    std::vector<Matrix6> face_gram_;   // \int_f psi_i . psi_j
    std::vector<Matrix36> face_mean_;  // \int_f psi_i
    Mat3 rotation_moment_;
    Eigen::MatrixXd divergence_;
    Eigen::MatrixXd projector_;
};

/// Dual-test-field matrix of one face: M_ij = \int_f psi_i . phi*_j with
/// phi*_j = e_j (j < 3) and e_{j-3} x (x - center).
Matrix6 face_interpolation_matrix(const FaceFrame& frame, const PointSet& points, const Vec3& center);

/// Canonical face coefficients c with \int_f (sum c_i psi_i) . phi* = \int_f t . phi*
/// for every dual test field, where t is the traction w.r.t. the canonical normal.
/// Throws hrvem::Error if the face matrix is numerically singular.
Vector6 interpolate_face(const FaceFrame& frame, const PointSet& points, const Vec3& center,
                         const VectorField& traction);

/// \int_f (sign psi_i) . g for a boundary face, with sign the outward orientation.
Vector6 local_boundary_term(const FaceFrame& frame, const PointSet& points, int sign,
                            const VectorField& g);

} // namespace hrvem
