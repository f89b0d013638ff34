#pragma once

#include "hrvem/assembly.hpp"
#include "hrvem/manufactured.hpp"
#include "hrvem/solver.hpp"

#include <exception>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hrvem {

/// Errors of one discrete solution; the rates are filled by compute_rates.
struct ErrorReport {
    int level = 0;
    double h = 0.0;
    int num_dofs = 0;
    double e_u = 0.0;
    double e_div = 0.0;
    double e_pi = 0.0;
    double e_sigma = 0.0;
    std::optional<double> rate_u, rate_div, rate_pi, rate_sigma;
    double solve_seconds = 0.0;
};

/// Local stress dofs of a cell, gathered from a global solution vector.
Eigen::VectorXd cell_stress_values(const PolyhedralMesh& mesh, const Eigen::VectorXd& solution, int cell);

/// Rigid-motion displacement of a cell from a global solution vector.
RigidMotion cell_displacement(const PolyhedralMesh& mesh, const Eigen::VectorXd& solution, int cell);

/// E_u, E_div, E_Pi and E_sigma of a global solution vector against the
/// exact fields.  The face weight of E_sigma is kappa = 1/2 tr(D) of the
/// adjacent cell's material.
ErrorReport error_norms(const PolyhedralMesh& mesh, const Eigen::VectorXd& solution,
                        const ManufacturedSolution& exact, int quad_degree = kDefaultQuadratureDegree);

/// Rate of an error sequence between consecutive levels; omitted when an
/// error falls below `floor` (errors at round-off carry no rate).
std::optional<double> convergence_rate(double e0, double e1, double h0, double h1, double floor = 1e-11);

void compute_rates(std::vector<ErrorReport>& rows);

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const ErrorReport& row);

struct RunOptions {
    AssemblyOptions assembly;
    SolverOptions solver;
};

struct RunResult {
    Eigen::VectorXd solution;
    SolveReport solve;
    ErrorReport errors;
};

/// Assembles, solves and measures one manufactured-solution problem.
RunResult run_example(const PolyhedralMesh& mesh, const ManufacturedSolution& exact, const RunOptions& options);

struct LevelSpec {
    int level = 0;
    std::function<PolyhedralMesh()> make_mesh;
};

struct ConvergenceResult {
    std::vector<ErrorReport> rows;
    /// Empty on success; otherwise the message of the first failing level.
    std::string failure;
    std::exception_ptr error;
    int failed_level = -1;
    bool complete() const { return failure.empty(); }
};

/// Runs every level (`jobs` at a time) and computes the inter-level rates.
/// A failing level stops the table there: rows before it are kept.
ConvergenceResult convergence_study(const std::vector<LevelSpec>& levels, const ManufacturedSolution& exact,
                                    const RunOptions& options, int jobs = 1);

/// Stress field with quadratic entries and its exact divergence.
class PolynomialStressField {
public:
    /// Random symmetric coefficients of degree <= `degree` (0, 1 or 2).
    static PolynomialStressField random(std::mt19937_64& rng, int degree);
    static PolynomialStressField constant(const Mat3& s);

    Mat3 operator()(const Vec3& x) const;
    Vec3 divergence(const Vec3& x) const;

private:
    Mat3 c0_ = Mat3::Zero();
    std::array<Mat3, 3> c1_{};             // coefficient of x_j
    std::array<std::array<Mat3, 3>, 3> c2_{}; // coefficient of x_j x_k (j <= k used)
};

/// L^2 projection of a vector field onto RM(E) about x_E, by cell quadrature
/// and a dense solve with the generator Gram matrix.
RigidMotion project_rigid(const PolyhedralMesh& mesh, int cell, const VectorField& v, int degree);

/// Global interpolant: face coefficients from the first incident cell.
Eigen::VectorXd interpolate_global(const PolyhedralMesh& mesh, const TensorField& tau,
                                   int quad_degree = kDefaultQuadratureDegree);

struct PatchTestResult {
    double traction_error = 0.0;    ///< max pointwise |sigma_h n - S n| over face quadrature points
    double displacement_error = 0.0; ///< max |u_h - Pi_RM u| coefficient difference
    bool passed(double tol = 1e-10) const { return traction_error <= tol && displacement_error <= tol; }
};

/// Constant-stress patch test: u linear with eps(u) = D S imposed as
/// boundary datum, f = 0.
PatchTestResult patch_test(const PolyhedralMesh& mesh, const ElasticMaterial& material, const Mat3& S,
                           const RunOptions& options = {});

/// max over cells of the RMS of div(I_E tau) - Pi_RM(div tau) over the cell.
double commuting_diagram_check(const PolyhedralMesh& mesh, const TensorField& tau, const VectorField& div_tau,
                               int quad_degree = kDefaultQuadratureDegree);

} // namespace hrvem
