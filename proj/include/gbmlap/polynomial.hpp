#pragma once

#include <complex>
#include <vector>

namespace gbmlap::poly {

using cplx = std::complex<double>;

// Coefficients are stored in ascending powers: c[0] + c[1] x + ...

double evaluate(const std::vector<double>& c, double x);
cplx evaluate(const std::vector<double>& c, cplx x);
std::vector<double> derivative(const std::vector<double>& c);
// sum |c_k| |x|^k, the natural scale for residual tests.
double magnitude_scale(const std::vector<double>& c, cplx x);
int degree(const std::vector<double>& c);  // trailing zeros ignored; -1 for zero

// Eigenvalues of the balanced companion matrix via Francis double-shift QR,
// each polished by a few Newton steps on the polynomial itself.
std::vector<cplx> roots(const std::vector<double>& c);

struct Root {
    cplx value;
    int multiplicity = 1;
    double residual = 0.0;  // |p(root)| / magnitude_scale
};

// Roots grouped by multiplicity. Candidate clusters are re-solved as a
// simple root of the (m-1)-th derivative and accepted when the lower
// derivatives vanish there to working precision. Roots closer than
// `cluster_tol` (relative) after refinement are merged. Conjugate pairs are
// made exactly conjugate.
// With `force_merge` every candidate cluster is merged without the
// derivative test.
std::vector<Root> clustered_roots(const std::vector<double>& c, double cluster_tol = 1e-7,
                                  bool force_merge = false);

}  // namespace gbmlap::poly
