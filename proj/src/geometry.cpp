#include "hrvem/geometry.hpp"

#include "hrvem/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hrvem {

namespace {

double polygon_diameter(std::span<const Vec3> pts)
{
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            d = std::max(d, (pts[i] - pts[j]).norm());
    return d;
}

// t1 = normalize(n x a) with a the coordinate axis least aligned with n.
void tangent_frame(FaceFrame& frame)
{
    const Vec3& n = frame.normal;
    int axis = 0;
    for (int k = 1; k < 3; ++k)
        if (std::abs(n[k]) < std::abs(n[axis]))
            axis = k;
    frame.t1 = n.cross(Vec3::Unit(axis)).normalized();
    frame.t2 = n.cross(frame.t1);
}

std::string cell_msg(int c, const std::string& what)
{
    std::ostringstream os;
    os << "cell " << c << ": " << what;
    return os.str();
}

CellGeometry cell_geometry_impl(const std::vector<Vec3>& vertices,
                                const std::vector<std::vector<int>>& faces,
                                const std::vector<FaceFrame>& frames,
                                const std::vector<SignedFace>& cell,
                                int index)
{
    CellGeometry g;
    g.num_faces = static_cast<int>(cell.size());

    std::vector<int> verts;
    for (const auto& sf : cell)
        verts.insert(verts.end(), faces[sf.face].begin(), faces[sf.face].end());
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());

    Vec3 apex = Vec3::Zero();
    g.bbox_min = Vec3::Constant(std::numeric_limits<double>::max());
    g.bbox_max = Vec3::Constant(std::numeric_limits<double>::lowest());
    for (int v : verts) {
        apex += vertices[v];
        g.bbox_min = g.bbox_min.cwiseMin(vertices[v]);
        g.bbox_max = g.bbox_max.cwiseMax(vertices[v]);
    }
    apex /= static_cast<double>(verts.size());

    for (std::size_t i = 0; i < verts.size(); ++i)
        for (std::size_t j = i + 1; j < verts.size(); ++j)
            g.diameter = std::max(g.diameter, (vertices[verts[i]] - vertices[verts[j]]).norm());

    // Closed surface: the signed vector area vanishes.
    Vec3 vector_area = Vec3::Zero();
    double area_sum = 0.0;
    for (const auto& sf : cell) {
        vector_area += sf.sign * frames[sf.face].area * frames[sf.face].normal;
        area_sum += frames[sf.face].area;
    }
    if (vector_area.norm() > 1e-10 * area_sum)
        throw MeshError(MeshError::Kind::geometry, cell_msg(index, "surface is not closed"));

    double volume = 0.0;
    Vec3 moment = Vec3::Zero();
    for (const auto& sf : cell) {
        const auto& loop = faces[sf.face];
        const Vec3& xf = frames[sf.face].barycenter;
        const std::size_t k = loop.size();
        for (std::size_t i = 0; i < k; ++i) {
            Vec3 b = vertices[loop[i]];
            Vec3 c = vertices[loop[(i + 1) % k]];
            if (sf.sign < 0)
                std::swap(b, c);
            const double vol = (xf - apex).dot((b - apex).cross(c - apex)) / 6.0;
            volume += vol;
            moment += vol * (apex + xf + b + c) / 4.0;
        }
    }
    if (!(volume > 0.0))
        throw MeshError(MeshError::Kind::geometry, cell_msg(index, "non-positive volume"));
    g.volume = volume;
    g.barycenter = moment / volume;
    return g;
}

// Signed tetrahedra (x_E, x_f, v_i, v_{i+1}) covering the cell.
template <class Visit>
void for_each_cell_tet(const PolyhedralMesh& mesh, int cell, const Vec3& apex, Visit&& visit)
{
    const auto& verts = mesh.vertices();
    for (const auto& sf : mesh.cell(cell)) {
        const auto& loop = mesh.face(sf.face);
        const Vec3& xf = mesh.frame(sf.face).barycenter;
        const std::size_t k = loop.size();
        for (std::size_t i = 0; i < k; ++i) {
            Vec3 b = verts[loop[i]];
            Vec3 c = verts[loop[(i + 1) % k]];
            if (sf.sign < 0)
                std::swap(b, c);
            visit(apex, xf, b, c);
        }
    }
}

} // namespace

FaceFrame compute_face_frame(std::span<const Vec3> polygon)
{
    if (polygon.size() < 3)
        throw MeshError(MeshError::Kind::geometry, "face has fewer than 3 vertices");
    const std::size_t k = polygon.size();

    Vec3 center = Vec3::Zero();
    for (const auto& p : polygon)
        center += p;
    center /= static_cast<double>(k);

    Vec3 newell = Vec3::Zero();
    for (std::size_t i = 0; i < k; ++i)
        newell += (polygon[i] - center).cross(polygon[(i + 1) % k] - center);

    FaceFrame frame;
    frame.diameter = polygon_diameter(polygon);
    const double twice_area = newell.norm();
    if (!(twice_area > 1e-14 * frame.diameter * frame.diameter))
        throw MeshError(MeshError::Kind::geometry, "degenerate face (zero area)");
    frame.normal = newell / twice_area;
    frame.area = 0.5 * twice_area;

    double area = 0.0;
    Vec3 moment = Vec3::Zero();
    for (std::size_t i = 0; i < k; ++i) {
        const Vec3& a = polygon[i];
        const Vec3& b = polygon[(i + 1) % k];
        const double t = 0.5 * (a - center).cross(b - center).dot(frame.normal);
        area += t;
        moment += t * (center + a + b) / 3.0;
    }
    frame.barycenter = moment / area;

    double defect = 0.0;
    for (const auto& p : polygon)
        defect = std::max(defect, std::abs((p - frame.barycenter).dot(frame.normal)));
    frame.planarity_defect = defect / frame.diameter;
    if (frame.planarity_defect > kPlanarityTol) {
        std::ostringstream os;
        os << "non-planar face (defect " << frame.planarity_defect << " h_f)";
        throw MeshError(MeshError::Kind::planarity, os.str());
    }

    tangent_frame(frame);
    return frame;
}

PointSet face_quadrature(const FaceFrame& frame, std::span<const Vec3> polygon, int degree)
{
    const auto& rule = triangle_rule(degree);
    const std::size_t k = polygon.size();
    PointSet pts;
    pts.reserve(k * rule.points.size());
    const Vec3& xf = frame.barycenter;
    for (std::size_t i = 0; i < k; ++i) {
        const Vec3 e1 = polygon[i] - xf;
        const Vec3 e2 = polygon[(i + 1) % k] - xf;
        const double jac = e1.cross(e2).dot(frame.normal);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto& xi = rule.points[q];
            pts.push_back({xf + xi.x() * e1 + xi.y() * e2, rule.weights[q] * jac});
        }
    }
    return pts;
}

PolyhedralMesh::PolyhedralMesh(std::vector<Vec3> vertices,
                               std::vector<std::vector<int>> faces,
                               std::vector<std::vector<SignedFace>> cells)
    : vertices_(std::move(vertices)), faces_(std::move(faces)), cells_(std::move(cells))
{
    using Kind = MeshError::Kind;
    const int nv = num_vertices();
    const int nf = num_faces();

    for (int f = 0; f < nf; ++f) {
        const auto& loop = faces_[f];
        if (loop.size() < 3)
            throw MeshError(Kind::topology, "face " + std::to_string(f) + " has fewer than 3 vertices");
        for (int v : loop)
            if (v < 0 || v >= nv)
                throw MeshError(Kind::topology, "face " + std::to_string(f) + " references vertex out of range");
        auto sorted = loop;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw MeshError(Kind::topology, "face " + std::to_string(f) + " repeats a vertex");
    }

    face_cells_.assign(nf, {-1, -1});
    std::vector<std::array<int, 2>> signs(nf, {0, 0});
    for (int c = 0; c < num_cells(); ++c) {
        const auto& cell = cells_[c];
        if (cell.size() < 4)
            throw MeshError(Kind::topology, cell_msg(c, "fewer than 4 faces"));
        for (const auto& sf : cell) {
            if (sf.face < 0 || sf.face >= nf)
                throw MeshError(Kind::topology, cell_msg(c, "face reference out of range"));
            if (sf.sign != 1 && sf.sign != -1)
                throw MeshError(Kind::topology, cell_msg(c, "face sign must be +1 or -1"));
            auto& fc = face_cells_[sf.face];
            if (fc[0] == c || fc[1] == c)
                throw MeshError(Kind::topology, cell_msg(c, "references a face twice"));
            if (fc[0] < 0) {
                fc[0] = c;
                signs[sf.face][0] = sf.sign;
            } else if (fc[1] < 0) {
                fc[1] = c;
                signs[sf.face][1] = sf.sign;
            } else {
                throw MeshError(Kind::topology,
                                "face " + std::to_string(sf.face) + " is shared by more than two cells");
            }
        }
    }
    for (int f = 0; f < nf; ++f) {
        if (face_cells_[f][0] < 0)
            throw MeshError(Kind::topology, "face " + std::to_string(f) + " belongs to no cell");
        if (face_cells_[f][1] < 0)
            boundary_faces_.push_back(f);
        else if (signs[f][0] != -signs[f][1])
            throw MeshError(Kind::topology,
                            "interior face " + std::to_string(f) + " must carry opposite signs in its two cells");
    }

    frames_.reserve(nf);
    for (int f = 0; f < nf; ++f) {
        try {
            frames_.push_back(compute_face_frame(face_polygon(f)));
        } catch (const MeshError& e) {
            throw MeshError(e.kind(), "face " + std::to_string(f) + ": " + e.what());
        }
    }

    geometry_.reserve(cells_.size());
    for (int c = 0; c < num_cells(); ++c)
        geometry_.push_back(cell_geometry_impl(vertices_, faces_, frames_, cells_[c], c));

    for (int c = 0; c < num_cells(); ++c) {
        auto& g = geometry_[c];
        g.second_moment = integrate_cell(*this, c, [&](const Vec3& x) -> Mat3 {
            const Vec3 r = x - g.barycenter;
            return r * r.transpose();
        }, 2);
    }
}

std::vector<Vec3> PolyhedralMesh::face_polygon(int f) const
{
    std::vector<Vec3> pts;
    pts.reserve(faces_[f].size());
    for (int v : faces_[f])
        pts.push_back(vertices_[v]);
    return pts;
}

std::vector<int> PolyhedralMesh::cell_vertices(int c) const
{
    std::vector<int> verts;
    for (const auto& sf : cells_[c])
        verts.insert(verts.end(), faces_[sf.face].begin(), faces_[sf.face].end());
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    return verts;
}

FaceFrame compute_face_frame(const PolyhedralMesh& mesh, int face)
{
    return compute_face_frame(mesh.face_polygon(face));
}

CellGeometry compute_cell_geometry(const PolyhedralMesh& mesh, int cell)
{
    std::vector<FaceFrame> frames;
    frames.reserve(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f)
        frames.push_back(mesh.frame(f));
    CellGeometry g = cell_geometry_impl(mesh.vertices(), mesh.faces(), frames, mesh.cell(cell), cell);
    g.second_moment = mesh.geometry(cell).second_moment;
    return g;
}

PointSet cell_quadrature(const PolyhedralMesh& mesh, int cell, int degree)
{
    const auto& rule = tetrahedron_rule(degree);
    PointSet pts;
    const Vec3& apex = mesh.geometry(cell).barycenter;
    for_each_cell_tet(mesh, cell, apex, [&](const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
        const Vec3 e0 = a - p;
        const Vec3 e1 = b - p;
        const Vec3 e2 = c - p;
        const double det = e0.dot(e1.cross(e2));
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto& xi = rule.points[q];
            pts.push_back({p + xi.x() * e0 + xi.y() * e1 + xi.z() * e2, rule.weights[q] * det});
        }
    });
    return pts;
}

double mesh_size(const PolyhedralMesh& mesh)
{
    double h = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c)
        h += mesh.geometry(c).diameter;
    return h / mesh.num_cells();
}

double total_volume(const PolyhedralMesh& mesh)
{
    double v = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c)
        v += mesh.geometry(c).volume;
    return v;
}

} // namespace hrvem
