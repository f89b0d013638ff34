#include "hrvem/errors.hpp"
#include "hrvem/mesh_io.hpp"
#include "hrvem/vem.hpp"
#include "hrvem/verification.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace hrvem;
using oracle::dof_traction;
using oracle::random_rotation;

namespace {

const std::string kMeshDir = HRVEM_MESH_DIR;

std::vector<PolyhedralMesh> sample_meshes()
{
    std::vector<PolyhedralMesh> meshes;
    meshes.push_back(generate_cube_mesh(2));
    meshes.push_back(generate_tet_mesh(1));
    meshes.push_back(load_mesh(kMeshDir + "/voronoi_10.poly"));
    return meshes;
}

double scale_of(const Eigen::MatrixXd& m)
{
    return std::max(1.0, m.cwiseAbs().maxCoeff());
}

} // namespace

TEST(FaceTractionBasis, ColumnsFollowFrame)
{
    const std::vector<Vec3> square{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
    const FaceFrame fr = compute_face_frame(square);
    const Vec3 x(0.75, 0.25, 0.0);
    const Matrix36 psi = face_traction_basis(fr, x);
    const Vec3 d = x - fr.barycenter;
    EXPECT_LT((psi.col(0) - fr.t1).norm(), 1e-15);
    EXPECT_LT((psi.col(1) - fr.t2).norm(), 1e-15);
    EXPECT_LT((psi.col(2) - fr.normal.cross(d)).norm(), 1e-15);
    EXPECT_LT((psi.col(3) - fr.normal).norm(), 1e-15);
    EXPECT_NEAR(psi.col(4).dot(fr.normal), d.dot(fr.t1), 1e-15);
    EXPECT_NEAR(psi.col(5).dot(fr.normal), d.dot(fr.t2), 1e-15);
}

TEST(Unisolvence, RandomFacesRecoverTractionCoefficients)
{
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        bool invertible = false;
        worst = std::max(worst, oracle::unisolvence_residual(rng, invertible));
        ASSERT_TRUE(invertible) << "face " << t;
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(Unisolvence, SliversStayInvertibleWithSmallBackwardError)
{
    // Without the edge-ratio condition the matrix can be badly conditioned, but
    // it stays invertible and the solve is backward stable.
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        double scale = 1.0;
        const auto poly = oracle::random_polygon(rng, scale, 0.0);
        const FaceFrame fr = compute_face_frame(poly);
        const PointSet pts = face_quadrature(fr, poly, kDefaultQuadratureDegree);
        const Vec3 center = fr.barycenter + scale * Vec3(U(rng), U(rng), U(rng));
        const Matrix6 M = face_interpolation_matrix(fr, pts, center);
        ASSERT_TRUE(Eigen::FullPivLU<Matrix6>(M).isInvertible()) << "face " << t;
        Vector6 b;
        for (int i = 0; i < 6; ++i)
            b[i] = U(rng) * fr.area;
        const Vector6 c = M.transpose().fullPivLu().solve(b);
        EXPECT_LE((M.transpose() * c - b).norm(), 1e-12 * M.norm() * c.norm()) << t;
    }
}

TEST(LocalElement, DivergenceMatchesIndependentOracle)
{
    for (const auto& mesh : sample_meshes())
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const LocalElement el(mesh, c);
            const Eigen::MatrixXd ref = oracle::divergence(mesh, c);
            EXPECT_LE((el.divergence_operator() - ref).cwiseAbs().maxCoeff(), 1e-12 * scale_of(ref));
        }
}

TEST(LocalElement, ProjectorMatchesIndependentOracle)
{
    for (const auto& mesh : sample_meshes())
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const LocalElement el(mesh, c);
            const Eigen::MatrixXd ref = oracle::projector(mesh, c);
            EXPECT_LE((el.projector() - ref).cwiseAbs().maxCoeff(), 1e-12 * scale_of(ref)) << c;
        }
}

TEST(LocalElement, MixedMatrixMatchesBoundaryForm)
{
    // \int_E div phi . r = \int_dE (phi n) . r for every rigid motion r.
    for (const auto& mesh : sample_meshes())
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const LocalElement el(mesh, c);
            const Eigen::MatrixXd ref = oracle::mixed_boundary_form(mesh, c);
            EXPECT_LE((el.local_mixed() - ref).cwiseAbs().maxCoeff(), 1e-12 * scale_of(ref));
        }
}

TEST(LocalElement, ConstantStressIsReproduced)
{
    std::mt19937_64 rng(5);
    for (const auto& mesh : sample_meshes()) {
        const PolynomialStressField S = PolynomialStressField::random(rng, 0);
        const Mat3 s = S(Vec3::Zero());
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const LocalElement el(mesh, c);
            const Eigen::VectorXd dofs = el.interpolate_stress([&](const Vec3& x) { return S(x); });
            EXPECT_LT((el.project_pi(dofs) - to_kelvin(s)).norm(), 1e-12);
            EXPECT_LT((el.divergence_operator() * dofs).norm(), 1e-12);
            const Eigen::MatrixXd stab = el.local_stabilization(1.0, Stabilization::element_diameter);
            EXPECT_LT((stab * dofs).norm(), 1e-12);
            for (int lf = 0; lf < el.num_faces(); ++lf) {
                const Vec3 x = el.frame(lf).barycenter;
                const Vec3 n = mesh.cell(c)[lf].sign * el.frame(lf).normal;
                EXPECT_LT((el.traction(dofs, lf, x) - s * n).norm(), 1e-12);
            }
        }
    }
}

TEST(LocalElement, LinearStressDivergenceIsExact)
{
    std::mt19937_64 rng(6);
    for (const auto& mesh : sample_meshes()) {
        const PolynomialStressField tau = PolynomialStressField::random(rng, 1);
        const Vec3 div = tau.divergence(Vec3::Zero());
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const LocalElement el(mesh, c);
            const RigidMotion r = el.reconstruct_divergence(el.interpolate_stress([&](const Vec3& x) { return tau(x); }));
            EXPECT_LT((r.alpha - div).norm(), 1e-12);
            EXPECT_LT(r.omega.norm(), 1e-12);
        }
    }
}

TEST(LocalElement, StiffnessIsSymmetricPositiveDefinite)
{
    const ElasticMaterial mat = ElasticMaterial::isotropic(1.0, 1.0);
    for (const auto& mesh : sample_meshes())
        for (int c = 0; c < mesh.num_cells(); ++c)
            for (auto stab : {Stabilization::element_diameter, Stabilization::face_diameter}) {
                const Eigen::MatrixXd A = LocalElement(mesh, c).local_stiffness(mat, stab);
                EXPECT_EQ((A - A.transpose()).cwiseAbs().maxCoeff(), 0.0);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
                EXPECT_GT(eig.eigenvalues().minCoeff(), 1e-10 * eig.eigenvalues().maxCoeff());
            }
}

TEST(LocalElement, StabilizationMatchesPointwiseQuadrature)
{
    // kappa sum_g w_g \int_g ((phi_i - Pi phi_i) n) . ((phi_j - Pi phi_j) n) evaluated pointwise.
    const double kap = 1.7;
    for (const auto& mesh : sample_meshes())
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const LocalElement el(mesh, c);
            const Eigen::MatrixXd P = oracle::projector(mesh, c);
            const int nd = el.num_dofs();
            for (auto stab : {Stabilization::element_diameter, Stabilization::face_diameter}) {
                Eigen::MatrixXd S = Eigen::MatrixXd::Zero(nd, nd);
                for (int g = 0; g < el.num_faces(); ++g) {
                    const SignedFace& sf = mesh.cell(c)[g];
                    const FaceFrame& fr = mesh.frame(sf.face);
                    const Vec3 n = sf.sign * fr.normal;
                    const double w = stab == Stabilization::element_diameter ? mesh.geometry(c).diameter
                                                                            : fr.diameter;
                    for (const auto& q : face_quadrature(fr, mesh.face_polygon(sf.face), oracle::kDegree)) {
                        Eigen::MatrixXd T(3, nd);
                        for (int i = 0; i < nd; ++i) {
                            const Vec3 own = i / 6 == g ? dof_traction(mesh, c, i, q.x) : Vec3::Zero();
                            T.col(i) = own - from_kelvin(P.col(i)) * n;
                        }
                        S += kap * w * q.w * T.transpose() * T;
                    }
                }
                const Eigen::MatrixXd got = el.local_stabilization(kap, stab);
                EXPECT_LE((got - S).cwiseAbs().maxCoeff(), 1e-12 * scale_of(S));
            }
        }
}

TEST(LocalElement, LoadOfConstantForce)
{
    const Vec3 f(1.5, -2.0, 0.25);
    for (const auto& mesh : sample_meshes())
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const Vector6 g = LocalElement(mesh, c).local_load([&](const Vec3&) { return f; });
            EXPECT_LT((g.head<3>() - mesh.geometry(c).volume * f).norm(), 1e-14);
            EXPECT_LT(g.tail<3>().norm(), 1e-14);
        }
}

TEST(LocalElement, EnergyInvariantUnderRotation)
{
    std::mt19937_64 rng(9);
    const PolyhedralMesh mesh = load_mesh(kMeshDir + "/voronoi_10.poly");
    const Mat3 Q = random_rotation(rng);
    std::vector<Vec3> rotated;
    for (const Vec3& v : mesh.vertices())
        rotated.push_back(Q * v + Vec3(0.3, -1.0, 2.0));
    const PolyhedralMesh moved(rotated, mesh.faces(), mesh.cells());

    const ElasticMaterial mat = ElasticMaterial::isotropic(1.0, 1.0);
    const PolynomialStressField tau = PolynomialStressField::random(rng, 2);
    const auto tau_moved = [&](const Vec3& y) {
        const Vec3 x = Q.transpose() * (y - Vec3(0.3, -1.0, 2.0));
        return Mat3(Q * tau(x) * Q.transpose());
    };
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalElement a(mesh, c), b(moved, c);
        const Eigen::VectorXd da = a.interpolate_stress([&](const Vec3& x) { return tau(x); });
        const Eigen::VectorXd db = b.interpolate_stress(tau_moved);
        const double ea = da.dot(a.local_stiffness(mat) * da);
        const double eb = db.dot(b.local_stiffness(mat) * db);
        EXPECT_NEAR(ea, eb, 1e-11 * std::max(1.0, ea)) << c;
        const Mat3 pa = from_kelvin(a.project_pi(da));
        const Mat3 pb = from_kelvin(b.project_pi(db));
        EXPECT_LT((Q * pa * Q.transpose() - pb).norm(), 1e-11 * std::max(1.0, pa.norm()));
    }
}

TEST(LocalElement, BoundaryTermUsesOutwardSign)
{
    const std::vector<Vec3> square{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
    const FaceFrame fr = compute_face_frame(square);
    const PointSet pts = face_quadrature(fr, square, 4);
    const auto g = [](const Vec3& x) { return Vec3(x.x(), 1.0, x.y()); };
    EXPECT_LT((local_boundary_term(fr, pts, -1, g) + local_boundary_term(fr, pts, 1, g)).norm(), 1e-15);
    // psi_4 = n: \int g . n over the unit square with n = +z is \int y = 1/2.
    EXPECT_NEAR(local_boundary_term(fr, pts, 1, g)[3], 0.5, 1e-15);
}
