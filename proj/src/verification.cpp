#include "hrvem/verification.hpp"

#include "hrvem/errors.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

namespace hrvem {

Eigen::VectorXd cell_stress_values(const PolyhedralMesh& mesh, const Eigen::VectorXd& solution, int cell)
{
    const DofMap dofs(mesh);
    const auto idx = dofs.cell_stress_dofs(mesh, cell);
    Eigen::VectorXd v(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        v[i] = solution[idx[i]];
    return v;
}

RigidMotion cell_displacement(const PolyhedralMesh& mesh, const Eigen::VectorXd& solution, int cell)
{
    const DofMap dofs(mesh);
    return RigidMotion::from_coefficients(solution.segment<6>(dofs.displacement_offset(cell)),
                                          mesh.geometry(cell).barycenter);
}

ErrorReport error_norms(const PolyhedralMesh& mesh, const Eigen::VectorXd& solution,
                        const ManufacturedSolution& exact, int quad_degree)
{
    ErrorReport r;
    r.h = mesh_size(mesh);
    r.num_dofs = static_cast<int>(solution.size());
    double su = 0.0, sdiv = 0.0, spi = 0.0, ssig = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalElement el(mesh, c, quad_degree);
        const Eigen::VectorXd local = cell_stress_values(mesh, solution, c);
        const RigidMotion uh = cell_displacement(mesh, solution, c);
        const RigidMotion div_h = el.reconstruct_divergence(local);
        const SymTensor3 pi_h = el.project_pi(local);
        for (const auto& q : cell_quadrature(mesh, c, quad_degree)) {
            su += q.w * (exact.displacement(q.x) - uh(q.x)).squaredNorm();
            sdiv += q.w * (exact.divergence_of_stress(q.x) - div_h(q.x)).squaredNorm();
            spi += q.w * (to_kelvin(exact.stress(q.x)) - pi_h).squaredNorm();
        }
    }
    const double kap = kappa(exact.material(), KappaRule::half_trace);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const FaceFrame& fr = mesh.frame(f);
        const Vector6 coeff = solution.segment<6>(6 * f);
        const auto polygon = mesh.face_polygon(f);
        double s = 0.0;
        for (const auto& q : face_quadrature(fr, polygon, quad_degree)) {
            const Vec3 th = face_traction_basis(fr, q.x) * coeff;
            s += q.w * (exact.stress(q.x) * fr.normal - th).squaredNorm();
        }
        ssig += fr.diameter * kap * s;
    }
    r.e_u = std::sqrt(su);
    r.e_div = std::sqrt(sdiv);
    r.e_pi = std::sqrt(spi);
    r.e_sigma = std::sqrt(ssig);
    return r;
}

std::optional<double> convergence_rate(double e0, double e1, double h0, double h1, double floor)
{
    if (e0 <= floor || e1 <= floor || h0 <= 0.0 || h1 <= 0.0 || h0 == h1)
        return std::nullopt;
    return std::log(e0 / e1) / std::log(h0 / h1);
}

void compute_rates(std::vector<ErrorReport>& rows)
{
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& a = rows[i - 1];
        auto& b = rows[i];
        b.rate_u = convergence_rate(a.e_u, b.e_u, a.h, b.h);
        b.rate_div = convergence_rate(a.e_div, b.e_div, a.h, b.h);
        b.rate_pi = convergence_rate(a.e_pi, b.e_pi, a.h, b.h);
        b.rate_sigma = convergence_rate(a.e_sigma, b.e_sigma, a.h, b.h);
    }
}

void write_csv_header(std::ostream& os)
{
    os << "level,h,N_dof,E_u,rate_u,E_sig_div,rate_sig_div,E_sig_pi,rate_sig_pi,E_sig,rate_sig,solve_seconds\n";
}

void write_csv_row(std::ostream& os, const ErrorReport& row)
{
    const auto rate = [&](const std::optional<double>& r) {
        if (r)
            os << std::setprecision(4) << std::fixed << *r << std::defaultfloat;
    };
    os << row.level << ',' << std::setprecision(6) << row.h << ',' << row.num_dofs << ',' << std::scientific
       << std::setprecision(6) << row.e_u << std::defaultfloat << ',';
    rate(row.rate_u);
    os << ',' << std::scientific << std::setprecision(6) << row.e_div << std::defaultfloat << ',';
    rate(row.rate_div);
    os << ',' << std::scientific << std::setprecision(6) << row.e_pi << std::defaultfloat << ',';
    rate(row.rate_pi);
    os << ',' << std::scientific << std::setprecision(6) << row.e_sigma << std::defaultfloat << ',';
    rate(row.rate_sigma);
    os << ',' << std::fixed << std::setprecision(3) << row.solve_seconds << std::defaultfloat << '\n';
}

RunResult run_example(const PolyhedralMesh& mesh, const ManufacturedSolution& exact, const RunOptions& options)
{
    const MaterialTable materials(exact.material());
    const GlobalSystem sys = assemble(
        mesh, materials, [&](const Vec3& x) { return exact.body_force(x); },
        [&](const Vec3& x) { return exact.boundary_displacement(x); }, options.assembly);
    RunResult out;
    out.solve = solve(sys, options.solver);
    out.solution = out.solve.solution;
    out.errors = error_norms(mesh, out.solution, exact, std::max(options.assembly.quad_degree, 4));
    out.errors.solve_seconds = out.solve.seconds;
    return out;
}

ConvergenceResult convergence_study(const std::vector<LevelSpec>& levels, const ManufacturedSolution& exact,
                                    const RunOptions& options, int jobs)
{
    const int n = static_cast<int>(levels.size());
    std::vector<std::optional<ErrorReport>> rows(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<int> next{0};
    const auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                const PolyhedralMesh mesh = levels[i].make_mesh();
                ErrorReport r = run_example(mesh, exact, options).errors;
                r.level = levels[i].level;
                rows[i] = r;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int nthreads = std::clamp(jobs, 1, std::max(1, n));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    ConvergenceResult result;
    for (int i = 0; i < n; ++i) {
        if (!rows[i]) {
            result.error = errors[i];
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                result.failure = e.what();
            } catch (...) {
                result.failure = "unknown error";
            }
            result.failed_level = levels[i].level;
            break;
        }
        result.rows.push_back(*rows[i]);
    }
    compute_rates(result.rows);
    return result;
}

PolynomialStressField PolynomialStressField::random(std::mt19937_64& rng, int degree)
{
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const auto sym = [&] {
        Mat3 m;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j)
                m(i, j) = m(j, i) = U(rng);
        return m;
    };
    PolynomialStressField p;
    p.c0_ = sym();
    for (int j = 0; j < 3; ++j) {
        p.c1_[j] = degree >= 1 ? sym() : Mat3::Zero();
        for (int k = 0; k < 3; ++k)
            p.c2_[j][k] = degree >= 2 && j <= k ? sym() : Mat3::Zero();
    }
    return p;
}

PolynomialStressField PolynomialStressField::constant(const Mat3& s)
{
    PolynomialStressField p;
    p.c0_ = 0.5 * (s + s.transpose());
    for (int j = 0; j < 3; ++j) {
        p.c1_[j].setZero();
        for (int k = 0; k < 3; ++k)
            p.c2_[j][k].setZero();
    }
    return p;
}

Mat3 PolynomialStressField::operator()(const Vec3& x) const
{
    Mat3 t = c0_;
    for (int j = 0; j < 3; ++j) {
        t += x[j] * c1_[j];
        for (int k = j; k < 3; ++k)
            t += x[j] * x[k] * c2_[j][k];
    }
    return t;
}

Vec3 PolynomialStressField::divergence(const Vec3& x) const
{
    // div(t)_i = sum_j d_j t_ij.
    Vec3 d = Vec3::Zero();
    for (int j = 0; j < 3; ++j) {
        Mat3 dj = c1_[j];
        for (int k = 0; k < 3; ++k) {
            if (k == j)
                dj += 2.0 * x[j] * c2_[j][j];
            else
                dj += x[k] * c2_[std::min(j, k)][std::max(j, k)];
        }
        d += dj.col(j);
    }
    return d;
}

RigidMotion project_rigid(const PolyhedralMesh& mesh, int cell, const VectorField& v, int degree)
{
    const Vec3 xE = mesh.geometry(cell).barycenter;
    Matrix6 G = Matrix6::Zero();
    Vector6 b = Vector6::Zero();
    for (const auto& q : cell_quadrature(mesh, cell, degree)) {
        const Matrix36 r = rigid_generators(q.x, xE);
        G.noalias() += q.w * r.transpose() * r;
        b.noalias() += q.w * r.transpose() * v(q.x);
    }
    return RigidMotion::from_coefficients(G.ldlt().solve(b), xE);
}

Eigen::VectorXd interpolate_global(const PolyhedralMesh& mesh, const TensorField& tau, int quad_degree)
{
    Eigen::VectorXd out(6 * mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const FaceFrame& fr = mesh.frame(f);
        const auto polygon = mesh.face_polygon(f);
        const auto pts = face_quadrature(fr, polygon, quad_degree);
        const Vec3 center = mesh.geometry(mesh.face_cells(f)[0]).barycenter;
        out.segment<6>(6 * f) = interpolate_face(fr, pts, center, [&](const Vec3& x) { return Vec3(tau(x) * fr.normal); });
    }
    return out;
}

PatchTestResult patch_test(const PolyhedralMesh& mesh, const ElasticMaterial& material, const Mat3& S,
                           const RunOptions& options)
{
    const Mat3 Ssym = 0.5 * (S + S.transpose());
    const Mat3 strain = from_kelvin(apply_D(material, to_kelvin(Ssym)));
    const VectorField u = [&](const Vec3& x) { return Vec3(strain * x); };
    const GlobalSystem sys = assemble(mesh, MaterialTable(material), VectorField{}, u, options.assembly);

    SolverOptions sopt = options.solver;
    sopt.tolerance = std::min(sopt.tolerance, 1e-12);
    const SolveReport rep = solve(sys, sopt);

    PatchTestResult res;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const FaceFrame& fr = mesh.frame(f);
        const Vector6 c = rep.solution.segment<6>(6 * f);
        const auto polygon = mesh.face_polygon(f);
        for (const auto& q : face_quadrature(fr, polygon, 2)) {
            const Vec3 th = face_traction_basis(fr, q.x) * c;
            res.traction_error = std::max(res.traction_error, (th - Ssym * fr.normal).cwiseAbs().maxCoeff());
        }
    }
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const RigidMotion uh = cell_displacement(mesh, rep.solution, c);
        const RigidMotion pu = project_rigid(mesh, c, u, 2);
        res.displacement_error
            = std::max(res.displacement_error, (uh.coefficients() - pu.coefficients()).cwiseAbs().maxCoeff());
    }
    return res;
}

double commuting_diagram_check(const PolyhedralMesh& mesh, const TensorField& tau, const VectorField& div_tau,
                               int quad_degree)
{
    const Eigen::VectorXd global = interpolate_global(mesh, tau, quad_degree);
    double worst = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalElement el(mesh, c, quad_degree);
        const RigidMotion dh = el.reconstruct_divergence(cell_stress_values(mesh, global, c));
        const RigidMotion pd = project_rigid(mesh, c, div_tau, 4);
        double s = 0.0;
        for (const auto& q : cell_quadrature(mesh, c, 2))
            s += q.w * (dh(q.x) - pd(q.x)).squaredNorm();
        worst = std::max(worst, std::sqrt(s / el.geometry().volume));
    }
    return worst;
}

} // namespace hrvem
