#include "hrvem/geometry.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace hrvem {

double QualityReport::min_face_ratio() const
{
    double r = std::numeric_limits<double>::infinity();
    for (const auto& c : cells)
        r = std::min(r, c.min_face_ratio);
    return r;
}

double QualityReport::min_edge_ratio() const
{
    double r = std::numeric_limits<double>::infinity();
    for (const auto& c : cells)
        r = std::min(r, c.min_edge_ratio);
    return r;
}

QualityReport mesh_quality_report(const PolyhedralMesh& mesh, double gamma)
{
    QualityReport report;
    report.gamma = gamma;
    report.cells.reserve(mesh.num_cells());
    const auto& verts = mesh.vertices();

    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& geo = mesh.geometry(c);
        CellQuality q;
        q.min_face_ratio = std::numeric_limits<double>::infinity();
        q.min_edge_ratio = std::numeric_limits<double>::infinity();

        for (const auto& sf : mesh.cell(c)) {
            const auto& frame = mesh.frame(sf.face);
            const auto& loop = mesh.face(sf.face);
            q.min_face_ratio = std::min(q.min_face_ratio, frame.diameter / geo.diameter);
            q.max_planarity_defect = std::max(q.max_planarity_defect, frame.planarity_defect);
            const std::size_t k = loop.size();
            for (std::size_t i = 0; i < k; ++i) {
                const Vec3& a = verts[loop[i]];
                const Vec3& b = verts[loop[(i + 1) % k]];
                q.min_edge_ratio = std::min(q.min_edge_ratio, (b - a).norm() / frame.diameter);

                // Kernel-point heuristic: x_E must see every fan triangle from inside.
                const Vec3& p = geo.barycenter;
                const double vol = sf.sign * (frame.barycenter - p).dot((a - p).cross(b - p));
                if (!(vol > 0.0))
                    q.star_shaped_estimate = false;
            }
        }

        std::ostringstream os;
        if (q.min_face_ratio < gamma) {
            ++report.face_ratio_violations;
            os << "cell " << c << ": h_f/h_E = " << q.min_face_ratio << " < gamma (face size ratio)";
            report.warnings.push_back(os.str());
            os.str("");
        }
        if (q.min_edge_ratio < gamma) {
            ++report.edge_ratio_violations;
            os << "cell " << c << ": |e|/h_f = " << q.min_edge_ratio << " < gamma (edge ratio)";
            report.warnings.push_back(os.str());
            os.str("");
        }
        if (!q.star_shaped_estimate) {
            ++report.star_violations;
            os << "cell " << c << ": barycenter does not see every face triangle (star-shapedness estimate)";
            report.warnings.push_back(os.str());
        }
        report.cells.push_back(q);
    }
    return report;
}

} // namespace hrvem
