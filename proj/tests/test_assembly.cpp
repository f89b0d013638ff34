#include "hrvem/assembly.hpp"
#include "hrvem/errors.hpp"
#include "hrvem/manufactured.hpp"
#include "hrvem/mesh_io.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/SparseExtra>

#include <cmath>
#include <filesystem>
#include <limits>

using namespace hrvem;

namespace {

const std::string kMeshDir = HRVEM_MESH_DIR;

std::vector<std::pair<std::string, PolyhedralMesh>> small_meshes()
{
    return {{"cube1", generate_cube_mesh(1)},
            {"cube2", generate_cube_mesh(2)},
            {"cube3", generate_cube_mesh(3)},
            {"tet1", generate_tet_mesh(1)},
            {"voronoi10", load_mesh(kMeshDir + "/voronoi_10.poly")},
            {"cvt16", load_mesh(kMeshDir + "/cvt_16.poly")}};
}

GlobalSystem example_system(const PolyhedralMesh& mesh, const AssemblyOptions& opt = {})
{
    const ManufacturedSolution ex = example(1);
    return assemble(mesh, MaterialTable(ex.material()),
                    [&](const Vec3& x) { return ex.body_force(x); },
                    [&](const Vec3& x) { return ex.boundary_displacement(x); }, opt);
}

} // namespace

TEST(DofMap, Layout)
{
    const PolyhedralMesh mesh = generate_cube_mesh(2);
    const DofMap dofs(mesh);
    EXPECT_EQ(dofs.num_stress(), 6 * 36);
    EXPECT_EQ(dofs.num_displacement(), 6 * 8);
    EXPECT_EQ(dofs.size(), 264);
    EXPECT_EQ(dofs.displacement_offset(1), 6 * 36 + 6);
    EXPECT_EQ(dofs.cell_stress_dofs(mesh, 0).size(), 36u);
}

TEST(Assembly, MatrixIsExactlySymmetric)
{
    for (const auto& [name, mesh] : small_meshes()) {
        const GlobalSystem sys = example_system(mesh);
        const SparseMatrix diff = sys.matrix - SparseMatrix(sys.matrix.transpose());
        EXPECT_EQ(diff.coeffs().size() == 0 ? 0.0 : diff.coeffs().cwiseAbs().maxCoeff(), 0.0) << name;
        EXPECT_EQ(sys.size(), mesh.num_faces() * 6 + mesh.num_cells() * 6);
    }
}

TEST(Assembly, StressBlockIsPositiveDefinite)
{
    for (const auto& [name, mesh] : small_meshes()) {
        const GlobalSystem sys = example_system(mesh);
        const Eigen::MatrixXd A = Eigen::MatrixXd(sys.matrix).topLeftCorner(sys.num_stress, sys.num_stress);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
        EXPECT_GT(eig.eigenvalues().minCoeff(), 1e-10 * eig.eigenvalues().maxCoeff()) << name;
        // The displacement block is empty.
        const Eigen::MatrixXd C = Eigen::MatrixXd(sys.matrix).bottomRightCorner(sys.num_displacement, sys.num_displacement);
        EXPECT_EQ(C.cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Assembly, DiscreteKernelIsCellwiseDivergenceFree)
{
    for (const auto& [name, mesh] : small_meshes()) {
        const GlobalSystem sys = example_system(mesh);
        const Eigen::MatrixXd B = Eigen::MatrixXd(sys.matrix).bottomLeftCorner(sys.num_displacement, sys.num_stress);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        int rank = 0;
        for (int i = 0; i < s.size(); ++i)
            rank += s[i] > 1e-12 * s[0];
        // B is onto: every cell's six rigid motions are reached.
        EXPECT_EQ(rank, sys.num_displacement) << name;
        const Eigen::MatrixXd kernel = svd.matrixV().rightCols(sys.num_stress - rank);
        const DofMap dofs(mesh);
        double worst = 0.0;
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const LocalElement el(mesh, c);
            const auto idx = dofs.cell_stress_dofs(mesh, c);
            for (int k = 0; k < kernel.cols(); ++k) {
                Eigen::VectorXd local(idx.size());
                for (std::size_t i = 0; i < idx.size(); ++i)
                    local[i] = kernel(idx[i], k);
                worst = std::max(worst, (el.divergence_operator() * local).cwiseAbs().maxCoeff());
            }
        }
        EXPECT_LE(worst, 1e-12) << name;
    }
}

TEST(Assembly, IndependentOfThreadCount)
{
    const PolyhedralMesh mesh = load_mesh(kMeshDir + "/voronoi_50.poly");
    AssemblyOptions one, many;
    many.threads = 4;
    const GlobalSystem a = example_system(mesh, one);
    const GlobalSystem b = example_system(mesh, many);
    EXPECT_EQ((Eigen::MatrixXd(a.matrix) - Eigen::MatrixXd(b.matrix)).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((a.rhs - b.rhs).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assembly, LoadVectorSigns)
{
    // b_u = -\int f . r_k ; for constant f the translation part is -|E| f.
    const PolyhedralMesh mesh = generate_tet_mesh(1);
    const Vec3 f(1.0, 2.0, -3.0);
    const GlobalSystem sys = assemble(mesh, MaterialTable(ElasticMaterial::isotropic(1, 1)),
                                      [&](const Vec3&) { return f; }, {});
    const DofMap dofs(mesh);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto bu = sys.rhs.segment<6>(dofs.displacement_offset(c));
        EXPECT_LT((bu.head<3>() + mesh.geometry(c).volume * f).norm(), 1e-14);
        EXPECT_LT(bu.tail<3>().norm(), 1e-14);
    }
    EXPECT_EQ(sys.rhs.head(sys.num_stress).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assembly, BoundaryTermPairsWithConstantStress)
{
    // For g = G x and a constant stress S: \int_dOmega (S n) . g = |Omega| S : G.
    const PolyhedralMesh mesh = load_mesh(kMeshDir + "/voronoi_10.poly");
    Mat3 G;
    G << 1, 2, 3, -1, 0.5, 0, 2, 0, -1;
    Mat3 S;
    S << 2, 1, 0, 1, 3, -1, 0, -1, 1;
    const GlobalSystem sys = assemble(mesh, MaterialTable(ElasticMaterial::isotropic(1, 1)), {},
                                      [&](const Vec3& x) { return Vec3(G * x); });
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(sys.num_stress);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const FaceFrame& fr = mesh.frame(f);
        // Canonical coefficients of the constant traction S n: t1, t2 and n components.
        const Vec3 t = S * fr.normal;
        sigma.segment<6>(6 * f) << t.dot(fr.t1), t.dot(fr.t2), 0.0, t.dot(fr.normal), 0.0, 0.0;
    }
    EXPECT_NEAR(sys.rhs.head(sys.num_stress).dot(sigma), (S.array() * G.array()).sum(), 1e-12);
}

TEST(Assembly, NonFiniteLoadThrows)
{
    const PolyhedralMesh mesh = generate_cube_mesh(1);
    const MaterialTable mat(ElasticMaterial::isotropic(1, 1));
    const auto nan = [](const Vec3&) { return Vec3::Constant(std::numeric_limits<double>::quiet_NaN()); };
    EXPECT_THROW(assemble(mesh, mat, nan, {}), Error);
    EXPECT_THROW(assemble(mesh, mat, {}, nan), Error);
}

TEST(Assembly, MatrixMarketRoundTrip)
{
    const PolyhedralMesh mesh = generate_cube_mesh(2);
    const GlobalSystem sys = example_system(mesh);
    const auto stem = std::filesystem::temp_directory_path() / "hrvem_assembly_test";
    export_matrix_market(sys, stem);
    Eigen::SparseMatrix<double> K;
    Eigen::VectorXd b;
    ASSERT_TRUE(Eigen::loadMarket(K, stem.string() + "_K.mtx"));
    ASSERT_TRUE(Eigen::loadMarketVector(b, stem.string() + "_rhs.mtx"));
    EXPECT_LT((Eigen::MatrixXd(K) - Eigen::MatrixXd(sys.matrix)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((b - sys.rhs).cwiseAbs().maxCoeff(), 1e-13);
}
