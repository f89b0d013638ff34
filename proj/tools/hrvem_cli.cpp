// Command-line driver: solve, converge and check.

#include "hrvem/errors.hpp"
#include "hrvem/mesh_io.hpp"
#include "hrvem/verification.hpp"

#include <CLI11.hpp>

#include <Eigen/Dense>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

namespace {

using namespace hrvem;

enum ExitCode { ok = 0, generic_error = 1, config_error = 2, mesh_error = 3, solver_error = 4, check_failure = 5 };

struct RunConfig {
    std::string family;
    int level = 2;
    std::vector<int> levels;
    std::vector<std::string> mesh_paths;
    int example_id = 1;
    std::optional<double> lambda;
    std::optional<double> mu;
    std::string stab = "element";
    std::string solver = "direct";
    double tol = 1e-10;
    int quad_degree = kDefaultQuadratureDegree;
    std::string out;
    std::string vtk;
    std::string matrix_market;
    std::uint64_t seed = 0;
    int jobs = 1;
    int patch_count = 10;
};

PolyhedralMesh family_mesh(const std::string& family, int level)
{
    if (level < 1)
        throw ConfigError("mesh level must be >= 1");
    if (family == "cube")
        return generate_cube_mesh(level);
    return generate_tet_mesh(level);
}

RunOptions run_options(const RunConfig& cfg)
{
    if (cfg.quad_degree < 4)
        throw ConfigError("--quad-degree must be >= 4 for the built-in (non-polynomial) loads");
    RunOptions o;
    o.assembly.stabilization = cfg.stab == "face" ? Stabilization::face_diameter : Stabilization::element_diameter;
    o.assembly.quad_degree = cfg.quad_degree;
    o.assembly.threads = cfg.jobs;
    o.solver.method = cfg.solver == "minres" ? SolverMethod::minres : SolverMethod::direct_ldlt;
    o.solver.tolerance = cfg.tol;
    return o;
}

// Exactly one of a family+level and a mesh file list.
void check_single_source(const RunConfig& cfg)
{
    if (!cfg.family.empty() && !cfg.mesh_paths.empty())
        throw ConfigError("--mesh-family and --mesh are mutually exclusive");
    if (cfg.family.empty() && cfg.mesh_paths.empty())
        throw ConfigError("a mesh source is required: --mesh-family or --mesh");
}

PolyhedralMesh single_mesh(const RunConfig& cfg, std::string& label)
{
    check_single_source(cfg);
    if (!cfg.family.empty()) {
        label = cfg.family + " level " + std::to_string(cfg.level);
        return family_mesh(cfg.family, cfg.level);
    }
    if (cfg.mesh_paths.size() != 1)
        throw ConfigError("this command takes exactly one --mesh file");
    label = cfg.mesh_paths.front();
    return load_mesh(cfg.mesh_paths.front());
}

void print_quality(const PolyhedralMesh& mesh)
{
    const QualityReport q = mesh_quality_report(mesh);
    std::cout << "mesh: " << mesh.num_cells() << " cells, " << mesh.num_faces() << " faces, h = " << mesh_size(mesh)
              << ", min h_f/h_E = " << q.min_face_ratio() << ", min |e|/h_f = " << q.min_edge_ratio() << '\n';
    for (const auto& w : q.warnings)
        std::cout << "warning: " << w << '\n';
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw ConfigError("cannot open output file " + path);
    return os;
}

void write_solution_vtk(const PolyhedralMesh& mesh, const Eigen::VectorXd& x, int quad_degree,
                        const std::string& path)
{
    VtkCellField sigma{"pi_sigma", 9, {}};
    VtkCellField disp{"u", 3, {}};
    VtkCellField rot{"omega", 3, {}};
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalElement el(mesh, c, quad_degree);
        const Mat3 s = from_kelvin(el.project_pi(cell_stress_values(mesh, x, c)));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                sigma.values.push_back(s(i, j));
        const RigidMotion u = cell_displacement(mesh, x, c);
        for (int i = 0; i < 3; ++i) {
            disp.values.push_back(u.alpha[i]);
            rot.values.push_back(u.omega[i]);
        }
    }
    auto os = open_output(path);
    write_vtk(mesh, os, {sigma, disp, rot});
}

int cmd_solve(const RunConfig& cfg)
{
    std::string label;
    const PolyhedralMesh mesh = single_mesh(cfg, label);
    const ManufacturedSolution exact = example(cfg.example_id, cfg.lambda, cfg.mu);
    const RunOptions opt = run_options(cfg);
    std::cout << "solve: " << exact.name() << " on " << label << '\n';
    print_quality(mesh);

    const GlobalSystem sys = assemble(
        mesh, MaterialTable(exact.material()), [&](const Vec3& x) { return exact.body_force(x); },
        [&](const Vec3& x) { return exact.boundary_displacement(x); }, opt.assembly);
    if (!cfg.matrix_market.empty())
        export_matrix_market(sys, cfg.matrix_market);
    const SolveReport rep = solve(sys, opt.solver);
    std::cout << "solver: " << rep.backend << ", N_dof = " << sys.size() << ", iterations = " << rep.iterations
              << ", relative residual = " << rep.relative_residual << ", " << rep.seconds << " s\n";

    ErrorReport err = error_norms(mesh, rep.solution, exact, cfg.quad_degree);
    err.level = cfg.family.empty() ? 0 : cfg.level;
    err.solve_seconds = rep.seconds;
    write_csv_header(std::cout);
    write_csv_row(std::cout, err);
    if (!cfg.out.empty()) {
        auto os = open_output(cfg.out);
        write_csv_header(os);
        write_csv_row(os, err);
    }
    if (!cfg.vtk.empty())
        write_solution_vtk(mesh, rep.solution, cfg.quad_degree, cfg.vtk);
    return ok;
}

int cmd_converge(const RunConfig& cfg)
{
    check_single_source(cfg);
    std::vector<LevelSpec> specs;
    if (!cfg.family.empty()) {
        for (int l : cfg.levels) {
            if (l < 1)
                throw ConfigError("mesh level must be >= 1");
            specs.push_back({l, [family = cfg.family, l] { return family_mesh(family, l); }});
        }
    } else {
        int idx = 0;
        for (const auto& p : cfg.mesh_paths) {
            const PolyhedralMesh mesh = load_mesh(p);
            std::cout << p << ": ";
            print_quality(mesh);
            specs.push_back({++idx, [p] { return load_mesh(p); }});
        }
    }
    if (specs.size() < 2)
        throw ConfigError("converge needs at least two levels");

    const ManufacturedSolution exact = example(cfg.example_id, cfg.lambda, cfg.mu);
    RunOptions opt = run_options(cfg);
    // Levels run concurrently; each assembles serially.
    const int jobs = cfg.jobs;
    opt.assembly.threads = 1;
    const ConvergenceResult res = convergence_study(specs, exact, opt, jobs);

    std::ostringstream csv;
    write_csv_header(csv);
    for (const auto& r : res.rows)
        write_csv_row(csv, r);
    std::cout << csv.str();
    if (!cfg.out.empty()) {
        auto os = open_output(cfg.out);
        os << csv.str();
    }
    if (!res.complete()) {
        std::cerr << "error: level " << res.failed_level << " failed: " << res.failure << '\n';
        std::rethrow_exception(res.error);
    }
    return ok;
}

int cmd_check(const RunConfig& cfg)
{
    std::string label;
    const PolyhedralMesh mesh = single_mesh(cfg, label);
    const RunOptions opt = run_options(cfg);
    const ElasticMaterial material = ElasticMaterial::isotropic(cfg.lambda.value_or(1.0), cfg.mu.value_or(1.0));
    std::cout << "check: " << label << '\n';
    print_quality(mesh);

    std::mt19937_64 rng(cfg.seed);
    bool all = true;
    const auto report = [&](const std::string& name, double value, double tol) {
        const bool pass = value <= tol;
        all = all && pass;
        std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << std::scientific << std::setprecision(3) << value
                  << " (tol " << tol << ")" << std::defaultfloat << '\n';
    };

    double traction = 0.0, displacement = 0.0;
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < cfg.patch_count; ++k) {
        Mat3 S;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j)
                S(i, j) = S(j, i) = U(rng);
        const PatchTestResult p = patch_test(mesh, material, S, opt);
        traction = std::max(traction, p.traction_error);
        displacement = std::max(displacement, p.displacement_error);
    }
    report("patch test traction (" + std::to_string(cfg.patch_count) + " random stresses)", traction, 1e-10);
    report("patch test displacement", displacement, 1e-10);

    const PolynomialStressField tau = PolynomialStressField::random(rng, 2);
    report("commuting diagram (quadratic stress)",
           commuting_diagram_check(mesh, tau, [&](const Vec3& x) { return tau.divergence(x); }, cfg.quad_degree),
           1e-11);
    return all ? ok : check_failure;
}

template <class F>
int guarded(F&& f)
{
    try {
        return f();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const MeshError& e) {
        std::cerr << "mesh error: " << e.what() << '\n';
        return mesh_error;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return solver_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return generic_error;
    }
}

void add_common(CLI::App& app, RunConfig& cfg)
{
    app.add_option("--mesh-family", cfg.family, "Generated mesh family")
        ->check(CLI::IsMember({"cube", "tetra"}));
    app.add_option("--mesh", cfg.mesh_paths, "Mesh file(s): .poly text or .vtk polyhedron grid");
    app.add_option("--example", cfg.example_id, "Manufactured example")->check(CLI::IsMember({1, 2, 3}));
    app.add_option("--lambda", cfg.lambda, "Override the first Lame constant");
    app.add_option("--mu", cfg.mu, "Override the shear modulus");
    app.add_option("--stab", cfg.stab, "Stabilization weight")->check(CLI::IsMember({"element", "face"}));
    app.add_option("--solver", cfg.solver, "Linear solver")->check(CLI::IsMember({"direct", "minres"}));
    app.add_option("--tol", cfg.tol, "Relative residual tolerance")->check(CLI::PositiveNumber);
    app.add_option("--quad-degree", cfg.quad_degree, "Quadrature degree")->check(CLI::Range(1, kMaxQuadratureDegree));
    app.add_option("--out", cfg.out, "CSV output path");
    app.add_option("--seed", cfg.seed, "Random seed");
    app.add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv)
{
    RunConfig cfg;
    CLI::App app{"Hellinger-Reissner virtual elements for 3D linear elasticity"};
    app.set_config("--config", "", "TOML/INI configuration file (flags take precedence)");
    app.require_subcommand(1);
    add_common(app, cfg);
    app.fallthrough();

    auto* solve_cmd = app.add_subcommand("solve", "Solve one manufactured problem and report the errors");
    solve_cmd->add_option("--level", cfg.level, "Level of a generated mesh");
    solve_cmd->add_option("--vtk", cfg.vtk, "VTK output of cellwise Pi sigma_h, u and omega");
    solve_cmd->add_option("--matrix-market", cfg.matrix_market, "Write <stem>_K.mtx and <stem>_rhs.mtx");

    auto* converge_cmd = app.add_subcommand("converge", "Convergence study over mesh levels or files");
    converge_cmd->add_option("--levels", cfg.levels, "Levels of a generated family")->delimiter(',');

    auto* check_cmd = app.add_subcommand("check", "Patch test and commuting-diagram check on one mesh");
    check_cmd->add_option("--level", cfg.level, "Level of a generated mesh");
    check_cmd->add_option("--patch-count", cfg.patch_count, "Random constant stresses")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    if (*solve_cmd)
        return guarded([&] { return cmd_solve(cfg); });
    if (*converge_cmd)
        return guarded([&] { return cmd_converge(cfg); });
    return guarded([&] { return cmd_check(cfg); });
}
