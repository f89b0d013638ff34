#pragma once

#include "hrvem/assembly.hpp"

#include <string>
#include <vector>

namespace hrvem {

enum class SolverMethod {
    direct_ldlt, ///< Cholesky of the SPD reduction of a quasi-definite shift, plus iterative refinement
    minres,      ///< MINRES with a block-diagonal SPD preconditioner
};

struct SolverOptions {
    SolverMethod method = SolverMethod::direct_ldlt;
    double tolerance = 1e-10;
    int max_iterations = 20000;
};

struct SolveReport {
    Eigen::VectorXd solution;
    double relative_residual = 0.0;
    std::string backend;
    /// Refinement steps (direct) or MINRES iterations.
    int iterations = 0;
    /// Relative residual after each refinement step / restart.
    std::vector<double> residual_history;
    double regularization = 0.0;
    double seconds = 0.0;
};

/// Solves the saddle-point system; the true relative residual
/// ||K x - b|| / ||b|| is always checked and a SolverError is thrown if it
/// exceeds the tolerance or the factorization breaks down.
SolveReport solve(const GlobalSystem& system, const SolverOptions& options = {});

} // namespace hrvem
