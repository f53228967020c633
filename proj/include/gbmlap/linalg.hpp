#pragma once

#include <cstddef>
#include <functional>
#include <vector>

// Small numerical kernels shared by the forward solver, the Padé builder and
// the least-squares baseline.
namespace gbmlap::linalg {

// Symmetric tridiagonal matrix with diagonal `diag` (n) and off-diagonal
// `off` (n-1).
struct SymTridiag {
    std::vector<double> diag;
    std::vector<double> off;
    std::size_t size() const { return diag.size(); }
};

// Number of eigenvalues strictly below x, from the signs of the LDL^T pivots.
int sturm_count(const SymTridiag& t, double x);

// Gershgorin enclosure [lo, hi] of the spectrum.
std::pair<double, double> gershgorin(const SymTridiag& t);

// Lowest `k` eigenvalues located by bisection on a monotone eigenvalue
// counter: `count(x)` must return the number of eigenvalues below x.
// Brackets are shared across eigenvalues so each evaluation narrows all of
// them at once.
std::vector<double> bisect_eigenvalues(const std::function<int(double)>& count, double lo,
                                       double hi, int k, int max_iterations = 400);

std::vector<double> lowest_eigenvalues(const SymTridiag& t, int k);

// Eigenvector for a converged eigenvalue, by inverse iteration with a
// pivoted tridiagonal factorization. Returned with unit Euclidean norm.
std::vector<double> inverse_iteration(const SymTridiag& t, double lambda, int iterations = 3);

// Solves the general tridiagonal system with partial pivoting
// (sub: n-1, diag: n, super: n-1). Zero pivots are nudged to a tiny value,
// which is what inverse iteration needs.
std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag,
                                      std::vector<double> super, std::vector<double> rhs);

using Matrix = std::vector<std::vector<double>>;

struct DenseSolve {
    std::vector<double> x;
    double pivot_ratio = 0.0;  // max |pivot| / min |pivot|
    bool singular = false;
};

// Partial-pivot Gaussian elimination followed by one step of iterative
// refinement with long-double residuals.
DenseSolve solve_dense(const Matrix& a, const std::vector<double>& b);

// Least-squares solution of min ||A x - b||_2 via Householder QR.
std::vector<double> least_squares(const Matrix& a, const std::vector<double>& b);

}  // namespace gbmlap::linalg
