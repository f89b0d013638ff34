#pragma once

#include "hrvem/quadrature.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace hrvem {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Face vertices may deviate from the best-fit plane by this fraction of h_f.
inline constexpr double kPlanarityTol = 1e-8;

/// A face reference inside a cell; sign +1 when the canonical face normal
/// points out of the cell, -1 when it points in.
struct SignedFace {
    int face = 0;
    int sign = 1;
};

/// Tangent frame of a planar polygonal face.  The canonical normal is the
/// one for which the stored vertex loop is counterclockwise.
struct FaceFrame {
    Vec3 barycenter = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
    Vec3 t1 = Vec3::UnitX();
    Vec3 t2 = Vec3::UnitY();
    double area = 0.0;
    double diameter = 0.0;
    /// max vertex distance to the face plane, divided by the diameter
    double planarity_defect = 0.0;

    Vec2 to_local(const Vec3& x) const
    {
        const Vec3 d = x - barycenter;
        return {d.dot(t1), d.dot(t2)};
    }
    Vec3 to_global(const Vec2& xi) const { return barycenter + xi.x() * t1 + xi.y() * t2; }
};

struct CellGeometry {
    double volume = 0.0;
    Vec3 barycenter = Vec3::Zero();
    double diameter = 0.0;
    int num_faces = 0;
    /// Second moment  \int_E (x - x_E)(x - x_E)^T.
    Mat3 second_moment = Mat3::Zero();
    Vec3 bbox_min = Vec3::Zero();
    Vec3 bbox_max = Vec3::Zero();
};

struct QuadPoint {
    Vec3 x;
    double w;
};
using PointSet = std::vector<QuadPoint>;

/// Frame of a polygon given by its ordered vertices.  Throws
/// MeshError(geometry) for fewer than 3 vertices or zero area and
/// MeshError(planarity) if the planarity defect exceeds kPlanarityTol.
FaceFrame compute_face_frame(std::span<const Vec3> polygon);

/// Quadrature points of a polygon: fan triangulation from the barycenter
/// with signed triangle weights, exact to `degree`.
PointSet face_quadrature(const FaceFrame& frame, std::span<const Vec3> polygon, int degree);

template <class F>
auto integrate_points(const PointSet& points, F&& g)
{
    using Result = std::decay_t<decltype(g(points.front().x))>;
    Result acc = points.front().w * g(points.front().x);
    for (std::size_t i = 1; i < points.size(); ++i)
        acc += points[i].w * g(points[i].x);
    return acc;
}

/// Polynomial-exact face integral of `g` (scalar, vector, or matrix valued).
template <class F>
auto integrate_face(const FaceFrame& frame, std::span<const Vec3> polygon, F&& g, int degree)
{
    return integrate_points(face_quadrature(frame, polygon, degree), g);
}

class PolyhedralMesh {
public:
    PolyhedralMesh() = default;

    /// Validates topology and geometry; throws MeshError on any violation.
    PolyhedralMesh(std::vector<Vec3> vertices,
                   std::vector<std::vector<int>> faces,
                   std::vector<std::vector<SignedFace>> cells);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<int>& face(int f) const { return faces_[f]; }
    const std::vector<std::vector<int>>& faces() const { return faces_; }
    const std::vector<SignedFace>& cell(int c) const { return cells_[c]; }
    const std::vector<std::vector<SignedFace>>& cells() const { return cells_; }

    /// Vertex coordinates of face f, in loop order.
    std::vector<Vec3> face_polygon(int f) const;

    const FaceFrame& frame(int f) const { return frames_[f]; }
    const CellGeometry& geometry(int c) const { return geometry_[c]; }

    bool is_boundary(int f) const { return face_cells_[f][1] < 0; }
    const std::vector<int>& boundary_faces() const { return boundary_faces_; }
    /// Incident cells of face f; second entry is -1 on the boundary.
    const std::array<int, 2>& face_cells(int f) const { return face_cells_[f]; }

    /// Distinct vertex indices of cell c.
    std::vector<int> cell_vertices(int c) const;

private:
    std::vector<Vec3> vertices_;
    std::vector<std::vector<int>> faces_;
    std::vector<std::vector<SignedFace>> cells_;
    std::vector<FaceFrame> frames_;
    std::vector<CellGeometry> geometry_;
    std::vector<std::array<int, 2>> face_cells_;
    std::vector<int> boundary_faces_;
};

FaceFrame compute_face_frame(const PolyhedralMesh& mesh, int face);

/// Volume and barycenter from signed tetrahedra, h_E as max vertex distance.
/// Throws MeshError(geometry) for an open surface or non-positive volume.
CellGeometry compute_cell_geometry(const PolyhedralMesh& mesh, int cell);

/// Signed tetrahedral decomposition of a cell (face fans apexed at x_E),
/// exact to `degree` regardless of star-shapedness.
PointSet cell_quadrature(const PolyhedralMesh& mesh, int cell, int degree);

template <class F>
auto integrate_cell(const PolyhedralMesh& mesh, int cell, F&& g, int degree)
{
    return integrate_points(cell_quadrature(mesh, cell, degree), g);
}

template <class F>
auto integrate_face(const PolyhedralMesh& mesh, int face, F&& g, int degree)
{
    const auto polygon = mesh.face_polygon(face);
    return integrate_points(face_quadrature(mesh.frame(face), polygon, degree), g);
}

/// Mean of the cell diameters.
double mesh_size(const PolyhedralMesh& mesh);

double total_volume(const PolyhedralMesh& mesh);

/// Unit cube [0,1]^3 split into n^3 hexahedra.
PolyhedralMesh generate_cube_mesh(int n);

/// Unit cube split into n^3 cubes, each cut into 6 Kuhn tetrahedra.
PolyhedralMesh generate_tet_mesh(int n);

/// Builds a mesh from per-cell outward-oriented polygon loops, merging the
/// faces shared by two cells.  The first occurrence fixes the canonical loop.
PolyhedralMesh mesh_from_cell_polygons(std::vector<Vec3> vertices,
                                       const std::vector<std::vector<std::vector<int>>>& cells);

struct CellQuality {
    double min_face_ratio = 0.0;   ///< min h_f / h_E
    double min_edge_ratio = 0.0;   ///< min |e| / h_f
    double max_planarity_defect = 0.0;
    bool star_shaped_estimate = true;
};

struct QualityReport {
    double gamma = 0.1;
    std::vector<CellQuality> cells;
    std::vector<std::string> warnings;
    int face_ratio_violations = 0;
    int edge_ratio_violations = 0;
    int star_violations = 0;

    double min_face_ratio() const;
    double min_edge_ratio() const;
};

/// Shape-regularity diagnostics.  Violations are reported as warnings only.
QualityReport mesh_quality_report(const PolyhedralMesh& mesh, double gamma = 0.1);

} // namespace hrvem
