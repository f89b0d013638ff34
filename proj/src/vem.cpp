#include "hrvem/vem.hpp"

#include "hrvem/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace hrvem {

Matrix36 rigid_generators(const Vec3& x, const Vec3& center)
{
    const Vec3 r = x - center;
    Matrix36 g;
    g.leftCols<3>().setIdentity();
    for (int k = 0; k < 3; ++k)
        g.col(3 + k) = Vec3::Unit(k).cross(r);
    return g;
}

Matrix36 face_traction_basis(const FaceFrame& frame, const Vec3& x)
{
    const Vec3 d = x - frame.barycenter;
    Matrix36 psi;
    psi.col(0) = frame.t1;
    psi.col(1) = frame.t2;
    psi.col(2) = frame.normal.cross(d);
    psi.col(3) = frame.normal;
    psi.col(4) = d.dot(frame.t1) * frame.normal;
    psi.col(5) = d.dot(frame.t2) * frame.normal;
    return psi;
}

LocalElement::LocalElement(const PolyhedralMesh& mesh, int cell, int quad_degree)
    : mesh_(&mesh), cell_(cell), degree_(quad_degree), geo_(mesh.geometry(cell)), faces_(mesh.cell(cell))
{
    const int nf = num_faces();
    const int nd = num_dofs();
    const Vec3& xE = geo_.barycenter;

    const Mat3& J = geo_.second_moment;
    rotation_moment_ = J.trace() * Mat3::Identity() - J;

    Eigen::MatrixXd boundary_moments(6, nd); // rows: \int phi, \int r x phi
    Eigen::MatrixXd boundary_pi(6, nd);      // rows: \int phi . (pi_a r)
    std::array<Mat3, 6> kelvin;
    for (int a = 0; a < 6; ++a)
        kelvin[a] = kelvin_basis(a);

    polygons_.reserve(nf);
    face_points_.reserve(nf);
    for (int lf = 0; lf < nf; ++lf) {
        const auto& sf = faces_[lf];
        const FaceFrame& fr = mesh.frame(sf.face);
        polygons_.push_back(mesh.face_polygon(sf.face));
        face_points_.push_back(face_quadrature(fr, polygons_.back(), degree_));

        Matrix6 gram = Matrix6::Zero();
        Matrix36 mean = Matrix36::Zero();
        Matrix36 rot_moment = Matrix36::Zero();
        Matrix6 pi_moment = Matrix6::Zero();
        for (const auto& q : face_points_.back()) {
            const Matrix36 psi = face_traction_basis(fr, q.x);
            const Vec3 r = q.x - xE;
            gram.noalias() += q.w * psi.transpose() * psi;
            mean += q.w * psi;
            for (int i = 0; i < 6; ++i)
                rot_moment.col(i) += q.w * r.cross(psi.col(i));
            for (int a = 0; a < 6; ++a)
                pi_moment.row(a) += q.w * (kelvin[a] * r).transpose() * psi;
        }
        face_gram_.push_back(gram);
        face_mean_.push_back(mean);
        const double s = sf.sign;
        boundary_moments.block<3, 6>(0, 6 * lf) = s * mean;
        boundary_moments.block<3, 6>(3, 6 * lf) = s * rot_moment;
        boundary_pi.block<6, 6>(0, 6 * lf) = s * pi_moment;
    }

    // alpha = (1/|E|) \int_{dE} tau n ;  M omega = \int_{dE} r x (tau n).
    if ((rotation_moment_ - rotation_moment_.transpose()).cwiseAbs().maxCoeff()
        > 1e-12 * rotation_moment_.cwiseAbs().maxCoeff())
        throw Error("rotation moment matrix is not symmetric");
    const Mat3 m_inv = rotation_moment_.inverse();
    divergence_.resize(6, nd);
    divergence_.topRows<3>() = boundary_moments.topRows<3>() / geo_.volume;
    divergence_.bottomRows<3>() = m_inv * boundary_moments.bottomRows<3>();

    // Volume term -\int_E (omega x r) . (pi_a r) = -omega . axial(J pi_a); the
    // alpha part drops out because \int_E r = 0.
    projector_.resize(6, nd);
    for (int a = 0; a < 6; ++a) {
        const Mat3 X = J * kelvin[a];
        const Vec3 axial(X(1, 2) - X(2, 1), X(2, 0) - X(0, 2), X(0, 1) - X(1, 0));
        projector_.row(a) = (boundary_pi.row(a) - axial.transpose() * divergence_.bottomRows<3>()) / geo_.volume;
    }
}

RigidMotion LocalElement::reconstruct_divergence(const Eigen::VectorXd& dofs) const
{
    const Vector6 c = divergence_ * dofs;
    return RigidMotion::from_coefficients(c, geo_.barycenter);
}

SymTensor3 LocalElement::project_pi(const Eigen::VectorXd& dofs) const
{
    return projector_ * dofs;
}

Eigen::MatrixXd LocalElement::local_stabilization(double kappa_value, Stabilization stab) const
{
    const int nd = num_dofs();
    // Traction of (I - Pi) tau on face g: Phi_g tau - N_g P tau, N_g column a = pi_a n_g.
    // Integrated analytically from the face Gram and mean matrices.
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(nd, nd);
    for (int g = 0; g < num_faces(); ++g) {
        const FaceFrame& fr = frame(g);
        const double s = faces_[g].sign;
        const Vec3 n = s * fr.normal;
        Matrix36 N;
        for (int a = 0; a < 6; ++a)
            N.col(a) = kelvin_basis(a) * n;
        const double weight = stab == Stabilization::element_diameter ? geo_.diameter : fr.diameter;

        Eigen::MatrixXd mean_phi = Eigen::MatrixXd::Zero(3, nd);
        mean_phi.middleCols<6>(6 * g) = s * face_mean_[g];
        const Eigen::MatrixXd NP = N * projector_;
        const Eigen::MatrixXd cross = mean_phi.transpose() * NP;

        Eigen::MatrixXd local = NP.transpose() * NP * fr.area - cross - cross.transpose();
        local.block<6, 6>(6 * g, 6 * g) += face_gram_[g];
        S += weight * local;
    }
    S *= kappa_value;
    return 0.5 * (S + S.transpose());
}

Eigen::MatrixXd LocalElement::local_stiffness(const ElasticMaterial& material, Stabilization stab,
                                              KappaRule rule) const
{
    Eigen::MatrixXd A = geo_.volume * projector_.transpose() * material.compliance() * projector_;
    A += local_stabilization(kappa(material, rule), stab);
    return 0.5 * (A + A.transpose());
}

Eigen::MatrixXd LocalElement::local_mixed() const
{
    const int nd = num_dofs();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nd, 6);
    const Vec3& xE = geo_.barycenter;
    for (const auto& q : cell_quadrature(*mesh_, cell_, 2)) {
        const Matrix36 gen = rigid_generators(q.x, xE);
        // div phi_i at x = alpha_i + omega_i x r = gen * (alpha_i, omega_i) restricted.
        Eigen::MatrixXd div(3, nd);
        div = gen.leftCols<3>() * divergence_.topRows<3>();
        const Vec3 r = q.x - xE;
        for (int i = 0; i < nd; ++i)
            div.col(i) += Vec3(divergence_.block<3, 1>(3, i)).cross(r);
        B.noalias() += q.w * div.transpose() * gen;
    }
    return B;
}

Vector6 LocalElement::local_load(const VectorField& f) const
{
    Vector6 g = Vector6::Zero();
    const Vec3& xE = geo_.barycenter;
    for (const auto& q : cell_quadrature(*mesh_, cell_, degree_))
        g.noalias() += q.w * rigid_generators(q.x, xE).transpose() * f(q.x);
    return g;
}

Eigen::VectorXd LocalElement::interpolate_stress(const TensorField& tau) const
{
    Eigen::VectorXd dofs(num_dofs());
    for (int lf = 0; lf < num_faces(); ++lf) {
        const FaceFrame& fr = frame(lf);
        dofs.segment<6>(6 * lf) = interpolate_face(fr, face_points_[lf], geo_.barycenter,
                                                   [&](const Vec3& x) { return Vec3(tau(x) * fr.normal); });
    }
    return dofs;
}

Vec3 LocalElement::traction(const Eigen::VectorXd& dofs, int lf, const Vec3& x) const
{
    return faces_[lf].sign * face_traction_basis(frame(lf), x) * dofs.segment<6>(6 * lf);
}

Matrix6 face_interpolation_matrix(const FaceFrame& frame, const PointSet& points, const Vec3& center)
{
    Matrix6 M = Matrix6::Zero();
    for (const auto& q : points)
        M.noalias() += q.w * face_traction_basis(frame, q.x).transpose() * rigid_generators(q.x, center);
    return M;
}

Vector6 interpolate_face(const FaceFrame& frame, const PointSet& points, const Vec3& center,
                         const VectorField& traction)
{
    const Matrix6 M = face_interpolation_matrix(frame, points, center);
    Vector6 b = Vector6::Zero();
    for (const auto& q : points)
        b.noalias() += q.w * rigid_generators(q.x, center).transpose() * traction(q.x);
    // M_ij pairs psi_i with phi*_j, so the system is M^T c = b.
    Eigen::FullPivLU<Matrix6> lu(M.transpose());
    if (!lu.isInvertible())
        throw Error("face interpolation matrix is singular");
    return lu.solve(b);
}

Vector6 local_boundary_term(const FaceFrame& frame, const PointSet& points, int sign, const VectorField& g)
{
    Vector6 b = Vector6::Zero();
    for (const auto& q : points)
        b.noalias() += q.w * face_traction_basis(frame, q.x).transpose() * g(q.x);
    return sign * b;
}

} // namespace hrvem
