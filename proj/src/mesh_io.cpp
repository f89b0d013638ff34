#include "hrvem/mesh_io.hpp"

#include "hrvem/errors.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace hrvem {

namespace {

using Kind = MeshError::Kind;

// Whitespace tokenizer that remembers the line of the last token.
class TokenReader {
public:
    explicit TokenReader(std::istream& in) : in_(in) {}

    bool next(std::string& tok)
    {
        while (!(line_stream_ >> tok)) {
            std::string line;
            if (!std::getline(in_, line))
                return false;
            ++line_no_;
            line_stream_.clear();
            line_stream_.str(line);
        }
        return true;
    }

    std::string expect_token(const char* what)
    {
        std::string tok;
        if (!next(tok))
            fail(std::string("unexpected end of file, expected ") + what);
        return tok;
    }

    void expect_keyword(const std::string& keyword)
    {
        const auto tok = expect_token(keyword.c_str());
        if (tok != keyword)
            fail("expected '" + keyword + "', found '" + tok + "'");
    }

    long long integer(const char* what)
    {
        const auto tok = expect_token(what);
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size())
            fail(std::string("expected integer ") + what + ", found '" + tok + "'");
        return v;
    }

    double real(const char* what)
    {
        const auto tok = expect_token(what);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size())
            fail(std::string("expected number ") + what + ", found '" + tok + "'");
        return v;
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw MeshError(Kind::parse, "line " + std::to_string(line_no_) + ": " + msg);
    }

private:
    std::istream& in_;
    std::istringstream line_stream_;
    int line_no_ = 0;
};

int checked_count(TokenReader& tr, const char* what)
{
    const long long n = tr.integer(what);
    if (n < 0 || n > std::numeric_limits<int>::max())
        tr.fail(std::string("invalid ") + what);
    return static_cast<int>(n);
}

} // namespace

MeshFormat format_from_path(const std::filesystem::path& path)
{
    return path.extension() == ".vtk" ? MeshFormat::vtk_legacy : MeshFormat::poly_text;
}

PolyhedralMesh read_poly_text(std::istream& in)
{
    TokenReader tr(in);

    tr.expect_keyword("vertices");
    const int nv = checked_count(tr, "vertex count");
    std::vector<Vec3> vertices(nv);
    for (auto& v : vertices)
        for (int d = 0; d < 3; ++d)
            v[d] = tr.real("coordinate");

    tr.expect_keyword("faces");
    const int nf = checked_count(tr, "face count");
    std::vector<std::vector<int>> faces(nf);
    for (auto& loop : faces) {
        const int k = checked_count(tr, "face size");
        loop.resize(k);
        for (auto& v : loop) {
            const long long idx = tr.integer("vertex index");
            if (idx < 0 || idx >= nv)
                tr.fail("vertex index " + std::to_string(idx) + " out of range");
            v = static_cast<int>(idx);
        }
    }

    tr.expect_keyword("cells");
    const int nc = checked_count(tr, "cell count");
    std::vector<std::vector<SignedFace>> cells(nc);
    for (auto& cell : cells) {
        const int m = checked_count(tr, "cell size");
        cell.resize(m);
        for (auto& sf : cell) {
            const long long code = tr.integer("signed face reference");
            if (code == 0 || std::abs(code) > nf)
                tr.fail("signed face reference " + std::to_string(code) + " out of range");
            sf.face = static_cast<int>(std::abs(code) - 1);
            sf.sign = code > 0 ? 1 : -1;
        }
    }
    std::string extra;
    if (tr.next(extra))
        tr.fail("trailing content '" + extra + "'");

    return PolyhedralMesh(std::move(vertices), std::move(faces), std::move(cells));
}

void write_poly_text(const PolyhedralMesh& mesh, std::ostream& out)
{
    out << std::setprecision(17);
    out << "vertices " << mesh.num_vertices() << '\n';
    for (const auto& v : mesh.vertices())
        out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    out << "faces " << mesh.num_faces() << '\n';
    for (const auto& loop : mesh.faces()) {
        out << loop.size();
        for (int v : loop)
            out << ' ' << v;
        out << '\n';
    }
    out << "cells " << mesh.num_cells() << '\n';
    for (const auto& cell : mesh.cells()) {
        out << cell.size();
        for (const auto& sf : cell)
            out << ' ' << sf.sign * (sf.face + 1);
        out << '\n';
    }
}

void write_vtk(const PolyhedralMesh& mesh, std::ostream& out, const std::vector<VtkCellField>& fields)
{
    out << std::setprecision(17);
    out << "# vtk DataFile Version 3.0\n"
        << "hrvem polyhedral mesh\n"
        << "ASCII\n"
        << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_vertices() << " double\n";
    for (const auto& v : mesh.vertices())
        out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';

    std::vector<std::vector<int>> streams;
    std::size_t total = 0;
    for (const auto& cell : mesh.cells()) {
        std::vector<int> s{static_cast<int>(cell.size())};
        for (const auto& sf : cell) {
            auto loop = mesh.face(sf.face);
            if (sf.sign < 0)
                std::reverse(loop.begin(), loop.end());
            s.push_back(static_cast<int>(loop.size()));
            s.insert(s.end(), loop.begin(), loop.end());
        }
        total += s.size() + 1;
        streams.push_back(std::move(s));
    }
    out << "CELLS " << mesh.num_cells() << ' ' << total << '\n';
    for (const auto& s : streams) {
        out << s.size();
        for (int v : s)
            out << ' ' << v;
        out << '\n';
    }
    out << "CELL_TYPES " << mesh.num_cells() << '\n';
    for (int c = 0; c < mesh.num_cells(); ++c)
        out << "42\n";

    if (fields.empty())
        return;
    out << "CELL_DATA " << mesh.num_cells() << '\n';
    for (const auto& field : fields) {
        if (field.values.size() != static_cast<std::size_t>(field.components) * mesh.num_cells())
            throw Error("VTK field '" + field.name + "' has the wrong size");
        switch (field.components) {
        case 1:
            out << "SCALARS " << field.name << " double 1\nLOOKUP_TABLE default\n";
            break;
        case 3:
            out << "VECTORS " << field.name << " double\n";
            break;
        case 9:
            out << "TENSORS " << field.name << " double\n";
            break;
        default:
            throw Error("VTK field '" + field.name + "' must have 1, 3 or 9 components");
        }
        for (int c = 0; c < mesh.num_cells(); ++c) {
            for (int k = 0; k < field.components; ++k)
                out << (k ? " " : "") << field.values[c * field.components + k];
            out << '\n';
        }
    }
}

PolyhedralMesh read_vtk(std::istream& in)
{
    TokenReader tr(in);
    std::string tok;
    // Skip the free-form header up to the dataset declaration.
    while (tr.next(tok) && tok != "DATASET") {
    }
    if (tok != "DATASET")
        tr.fail("missing DATASET");
    if (tr.expect_token("dataset type") != "UNSTRUCTURED_GRID")
        tr.fail("only UNSTRUCTURED_GRID is supported");

    tr.expect_keyword("POINTS");
    const int nv = checked_count(tr, "point count");
    tr.expect_token("point type");
    std::vector<Vec3> vertices(nv);
    for (auto& v : vertices)
        for (int d = 0; d < 3; ++d)
            v[d] = tr.real("coordinate");

    tr.expect_keyword("CELLS");
    const int nc = checked_count(tr, "cell count");
    checked_count(tr, "cell list size");
    std::vector<std::vector<std::vector<int>>> cells(nc);
    for (auto& loops : cells) {
        const int entries = checked_count(tr, "cell entry count");
        const int nfaces = checked_count(tr, "face count");
        int used = 1;
        for (int f = 0; f < nfaces; ++f) {
            const int k = checked_count(tr, "face size");
            std::vector<int> loop(k);
            for (auto& v : loop) {
                const long long idx = tr.integer("point index");
                if (idx < 0 || idx >= nv)
                    tr.fail("point index out of range");
                v = static_cast<int>(idx);
            }
            used += k + 1;
            loops.push_back(std::move(loop));
        }
        if (used != entries)
            tr.fail("polyhedron face stream length does not match its entry count");
    }

    tr.expect_keyword("CELL_TYPES");
    if (checked_count(tr, "cell type count") != nc)
        tr.fail("CELL_TYPES count does not match CELLS");
    for (int c = 0; c < nc; ++c)
        if (tr.integer("cell type") != 42)
            tr.fail("only VTK_POLYHEDRON (42) cells are supported");

    return mesh_from_cell_polygons(std::move(vertices), cells);
}

PolyhedralMesh load_mesh(const std::filesystem::path& path, MeshFormat format)
{
    std::ifstream in(path);
    if (!in)
        throw MeshError(Kind::parse, "cannot open mesh file " + path.string());
    try {
        return format == MeshFormat::vtk_legacy ? read_vtk(in) : read_poly_text(in);
    } catch (const MeshError& e) {
        throw MeshError(e.kind(), path.string() + ": " + e.what());
    }
}

PolyhedralMesh load_mesh(const std::filesystem::path& path)
{
    return load_mesh(path, format_from_path(path));
}

void save_mesh(const PolyhedralMesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    if (format_from_path(path) == MeshFormat::vtk_legacy)
        write_vtk(mesh, out);
    else
        write_poly_text(mesh, out);
}

} // namespace hrvem
