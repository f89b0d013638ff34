#include "hrvem/assembly.hpp"

#include "hrvem/errors.hpp"

#include <unsupported/Eigen/SparseExtra>

#include <algorithm>
#include <cmath>
#include <thread>

namespace hrvem {

std::vector<int> DofMap::cell_stress_dofs(const PolyhedralMesh& mesh, int cell) const
{
    std::vector<int> dofs;
    dofs.reserve(6 * mesh.cell(cell).size());
    for (const auto& sf : mesh.cell(cell))
        for (int i = 0; i < 6; ++i)
            dofs.push_back(stress_offset(sf.face) + i);
    return dofs;
}

namespace {

struct CellContribution {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Vector6 load = Vector6::Zero();
};

CellContribution cell_contribution(const PolyhedralMesh& mesh, int c, const MaterialTable& materials,
                                   const VectorField& body_force, const AssemblyOptions& options)
{
    const LocalElement element(mesh, c, options.quad_degree);
    CellContribution out;
    out.A = element.local_stiffness(materials.of_cell(c), options.stabilization, options.kappa_rule);
    out.B = element.local_mixed();
    if (body_force) {
        out.load = element.local_load(body_force);
        if (!out.load.allFinite())
            throw Error("body force produced a non-finite load in cell " + std::to_string(c));
    }
    return out;
}

} // namespace

GlobalSystem assemble(const PolyhedralMesh& mesh, const MaterialTable& materials,
                      const VectorField& body_force, const VectorField& boundary_displacement,
                      const AssemblyOptions& options)
{
    const DofMap dofs(mesh);
    const int nc = mesh.num_cells();

    // Local matrices may be computed concurrently; insertion below is serial
    // and in cell order so the result does not depend on the thread count.
    std::vector<CellContribution> contributions(nc);
    const int nthreads = std::clamp(options.threads, 1, std::max(1, nc));
    if (nthreads == 1) {
        for (int c = 0; c < nc; ++c)
            contributions[c] = cell_contribution(mesh, c, materials, body_force, options);
    } else {
        std::vector<std::exception_ptr> errors(nthreads);
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (int c = t; c < nc; c += nthreads)
                        contributions[c] = cell_contribution(mesh, c, materials, body_force, options);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool)
            th.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    GlobalSystem sys;
    sys.num_stress = dofs.num_stress();
    sys.num_displacement = dofs.num_displacement();
    sys.rhs = Eigen::VectorXd::Zero(dofs.size());

    std::vector<Eigen::Triplet<double>> triplets;
    std::size_t nnz = 0;
    for (const auto& cc : contributions)
        nnz += cc.A.size() + 2 * cc.B.size();
    triplets.reserve(nnz);

    for (int c = 0; c < nc; ++c) {
        const auto& cc = contributions[c];
        const auto idx = dofs.cell_stress_dofs(mesh, c);
        const int u0 = dofs.displacement_offset(c);
        const int nd = static_cast<int>(idx.size());
        for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j)
                if (cc.A(i, j) != 0.0)
                    triplets.emplace_back(idx[i], idx[j], cc.A(i, j));
        for (int i = 0; i < nd; ++i)
            for (int k = 0; k < 6; ++k)
                if (cc.B(i, k) != 0.0) {
                    triplets.emplace_back(u0 + k, idx[i], cc.B(i, k));
                    triplets.emplace_back(idx[i], u0 + k, cc.B(i, k));
                }
        sys.rhs.segment<6>(u0) = -cc.load;
    }
    sys.matrix.resize(dofs.size(), dofs.size());
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    sys.matrix.makeCompressed();

    if (boundary_displacement) {
        for (int f : mesh.boundary_faces()) {
            const int c = mesh.face_cells(f)[0];
            int sign = 1;
            for (const auto& sf : mesh.cell(c))
                if (sf.face == f)
                    sign = sf.sign;
            const auto polygon = mesh.face_polygon(f);
            const auto pts = face_quadrature(mesh.frame(f), polygon, options.quad_degree);
            const Vector6 b = local_boundary_term(mesh.frame(f), pts, sign, boundary_displacement);
            if (!b.allFinite())
                throw Error("boundary displacement produced a non-finite value on face " + std::to_string(f));
            sys.rhs.segment<6>(dofs.stress_offset(f)) += b;
        }
    }
    return sys;
}

void export_matrix_market(const GlobalSystem& system, const std::filesystem::path& stem)
{
    const auto k_path = stem.string() + "_K.mtx";
    const auto b_path = stem.string() + "_rhs.mtx";
    if (!Eigen::saveMarket(system.matrix, k_path))
        throw Error("cannot write " + k_path);
    if (!Eigen::saveMarketVector(system.rhs, b_path))
        throw Error("cannot write " + b_path);
}

} // namespace hrvem
