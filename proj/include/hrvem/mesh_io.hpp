#pragma once

#include "hrvem/geometry.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hrvem {

enum class MeshFormat { poly_text, vtk_legacy };

/// `.vtk` selects VTK legacy, anything else the poly-text format.
MeshFormat format_from_path(const std::filesystem::path& path);

/// Poly-text layout (whitespace separated):
///
///     vertices N      followed by N lines  "x y z"
///     faces M         followed by M lines  "k v1 ... vk"   (0-based, CCW)
///     cells P         followed by P lines  "m s1 ... sm"   (s = +-(face + 1))
PolyhedralMesh read_poly_text(std::istream& in);
void write_poly_text(const PolyhedralMesh& mesh, std::ostream& out);

/// Cell-centred data attached to a VTK file; components is 1, 3, or 9.
struct VtkCellField {
    std::string name;
    int components = 1;
    std::vector<double> values;
};

/// ASCII VTK legacy unstructured grid of VTK_POLYHEDRON cells.
void write_vtk(const PolyhedralMesh& mesh, std::ostream& out,
               const std::vector<VtkCellField>& fields = {});

/// Reads the polyhedron grids produced by write_vtk (outward face streams).
PolyhedralMesh read_vtk(std::istream& in);

PolyhedralMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
PolyhedralMesh load_mesh(const std::filesystem::path& path);

void save_mesh(const PolyhedralMesh& mesh, const std::filesystem::path& path);

} // namespace hrvem
