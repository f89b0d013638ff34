#pragma once

#include "hrvem/geometry.hpp"
#include "hrvem/material.hpp"
#include "hrvem/vem.hpp"

#include <Eigen/SparseCore>

#include <filesystem>

namespace hrvem {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Global numbering: face f owns stress dofs [6f, 6f + 6); cell c owns
/// displacement dofs [6 N_faces + 6c, +6).
class DofMap {
public:
    explicit DofMap(const PolyhedralMesh& mesh) : num_faces_(mesh.num_faces()), num_cells_(mesh.num_cells()) {}

    int num_stress() const { return 6 * num_faces_; }
    int num_displacement() const { return 6 * num_cells_; }
    int size() const { return num_stress() + num_displacement(); }

    int stress_offset(int face) const { return 6 * face; }
    int displacement_offset(int cell) const { return num_stress() + 6 * cell; }

    /// Global indices of the local stress dofs of a cell, in local order.
    std::vector<int> cell_stress_dofs(const PolyhedralMesh& mesh, int cell) const;

private:
    int num_faces_;
    int num_cells_;
};

inline DofMap build_dof_map(const PolyhedralMesh& mesh) { return DofMap(mesh); }

struct AssemblyOptions {
    Stabilization stabilization = Stabilization::element_diameter;
    KappaRule kappa_rule = KappaRule::half_trace;
    int quad_degree = kDefaultQuadratureDegree;
    int threads = 1;
};

/// Saddle-point system [[A, B^T], [B, 0]] (sigma, u) = (b_sigma, b_u).
struct GlobalSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    int num_stress = 0;
    int num_displacement = 0;

    int size() const { return num_stress + num_displacement; }
};

/// Assembles K and the right-hand side: b_u = -\int f . r_k per cell, and
/// b_sigma collects \int_f (psi n-oriented) . g over boundary faces.  Either
/// field may be empty (treated as zero).  Throws hrvem::Error on a NaN load.
GlobalSystem assemble(const PolyhedralMesh& mesh, const MaterialTable& materials,
                      const VectorField& body_force, const VectorField& boundary_displacement,
                      const AssemblyOptions& options = {});

/// Writes K and the rhs as Matrix Market files `<stem>_K.mtx` and `<stem>_rhs.mtx`.
void export_matrix_market(const GlobalSystem& system, const std::filesystem::path& stem);

} // namespace hrvem
