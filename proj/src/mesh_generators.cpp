#include "hrvem/errors.hpp"
#include "hrvem/geometry.hpp"

#include <algorithm>
#include <array>
#include <map>

namespace hrvem {

PolyhedralMesh generate_cube_mesh(int n)
{
    if (n < 1)
        throw Error("cube mesh needs n >= 1");
    const int np = n + 1;
    auto vid = [np](int i, int j, int k) { return i + np * (j + np * k); };

    std::vector<Vec3> vertices;
    vertices.reserve(np * np * np);
    for (int k = 0; k < np; ++k)
        for (int j = 0; j < np; ++j)
            for (int i = 0; i < np; ++i)
                vertices.emplace_back(double(i) / n, double(j) / n, double(k) / n);

    // Faces normal to axis a, at plane index p, spanning the square (u, v).
    // Each loop is counterclockwise seen from the +a direction.
    std::vector<std::vector<int>> faces;
    std::array<std::vector<int>, 3> first(
        {std::vector<int>(np * n * n), std::vector<int>(np * n * n), std::vector<int>(np * n * n)});
    auto face_index = [n](int p, int u, int v) { return p + (n + 1) * (u + n * v); };
    for (int p = 0; p < np; ++p)
        for (int v = 0; v < n; ++v)
            for (int u = 0; u < n; ++u) {
                first[0][face_index(p, u, v)] = static_cast<int>(faces.size());
                // x = p, (y, z) = (u, v); +x = y cross z.
                faces.push_back({vid(p, u, v), vid(p, u + 1, v), vid(p, u + 1, v + 1), vid(p, u, v + 1)});
            }
    for (int p = 0; p < np; ++p)
        for (int v = 0; v < n; ++v)
            for (int u = 0; u < n; ++u) {
                first[1][face_index(p, u, v)] = static_cast<int>(faces.size());
                // y = p, (z, x) = (u, v); +y = z cross x.
                faces.push_back({vid(v, p, u), vid(v, p, u + 1), vid(v + 1, p, u + 1), vid(v + 1, p, u)});
            }
    for (int p = 0; p < np; ++p)
        for (int v = 0; v < n; ++v)
            for (int u = 0; u < n; ++u) {
                first[2][face_index(p, u, v)] = static_cast<int>(faces.size());
                // z = p, (x, y) = (u, v); +z = x cross y.
                faces.push_back({vid(u, v, p), vid(u + 1, v, p), vid(u + 1, v + 1, p), vid(u, v + 1, p)});
            }

    std::vector<std::vector<SignedFace>> cells;
    cells.reserve(n * n * n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                cells.push_back({
                    {first[0][face_index(i, j, k)], -1},
                    {first[0][face_index(i + 1, j, k)], +1},
                    {first[1][face_index(j, k, i)], -1},
                    {first[1][face_index(j + 1, k, i)], +1},
                    {first[2][face_index(k, i, j)], -1},
                    {first[2][face_index(k + 1, i, j)], +1},
                });
            }
    return PolyhedralMesh(std::move(vertices), std::move(faces), std::move(cells));
}

PolyhedralMesh generate_tet_mesh(int n)
{
    if (n < 1)
        throw Error("tetrahedral mesh needs n >= 1");
    const int np = n + 1;
    auto vid = [np](int i, int j, int k) { return i + np * (j + np * k); };

    std::vector<Vec3> vertices;
    vertices.reserve(np * np * np);
    for (int k = 0; k < np; ++k)
        for (int j = 0; j < np; ++j)
            for (int i = 0; i < np; ++i)
                vertices.emplace_back(double(i) / n, double(j) / n, double(k) / n);

    static constexpr std::array<std::array<int, 3>, 6> perms{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

    std::vector<std::vector<std::vector<int>>> cells;
    cells.reserve(6 * n * n * n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                for (const auto& perm : perms) {
                    // Kuhn simplex: walk from (i,j,k) to (i+1,j+1,k+1) one axis at a time.
                    std::array<int, 3> idx{i, j, k};
                    std::array<int, 4> tet{};
                    tet[0] = vid(idx[0], idx[1], idx[2]);
                    for (int s = 0; s < 3; ++s) {
                        ++idx[perm[s]];
                        tet[s + 1] = vid(idx[0], idx[1], idx[2]);
                    }
                    std::vector<std::vector<int>> loops;
                    for (int opp = 0; opp < 4; ++opp) {
                        std::vector<int> tri;
                        for (int m = 0; m < 4; ++m)
                            if (m != opp)
                                tri.push_back(tet[m]);
                        const Vec3& a = vertices[tri[0]];
                        const Vec3 nrm = (vertices[tri[1]] - a).cross(vertices[tri[2]] - a);
                        if (nrm.dot(vertices[tet[opp]] - a) > 0.0)
                            std::swap(tri[1], tri[2]);
                        loops.push_back(std::move(tri));
                    }
                    cells.push_back(std::move(loops));
                }
    return mesh_from_cell_polygons(std::move(vertices), cells);
}

PolyhedralMesh mesh_from_cell_polygons(std::vector<Vec3> vertices,
                                       const std::vector<std::vector<std::vector<int>>>& cells)
{
    std::map<std::vector<int>, int> lookup;
    std::vector<std::vector<int>> faces;
    std::vector<std::vector<SignedFace>> signed_cells;
    signed_cells.reserve(cells.size());

    for (const auto& loops : cells) {
        std::vector<SignedFace> cell;
        for (const auto& loop : loops) {
            auto key = loop;
            std::sort(key.begin(), key.end());
            auto [it, inserted] = lookup.try_emplace(std::move(key), static_cast<int>(faces.size()));
            if (inserted) {
                faces.push_back(loop);
                cell.push_back({it->second, +1});
                continue;
            }
            // A shared face must be traversed in the opposite direction.
            const auto& canon = faces[it->second];
            const auto k = canon.size();
            const auto pos = std::find(canon.begin(), canon.end(), loop[0]) - canon.begin();
            const bool reversed = loop.size() > 1 && canon[(pos + k - 1) % k] == loop[1];
            cell.push_back({it->second, reversed ? -1 : +1});
        }
        signed_cells.push_back(std::move(cell));
    }
    return PolyhedralMesh(std::move(vertices), std::move(faces), std::move(signed_cells));
}

} // namespace hrvem
