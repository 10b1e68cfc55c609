#pragma once

#include <span>
#include <vector>

#include "perpress/complexplane.hpp"

namespace perpress {

/// Dense univariate polynomials over complex coefficients, ascending degree
/// order (coeffs[k] multiplies z^k).

/// Horner evaluation.
cplx poly_eval(std::span<const cplx> coeffs, cplx z);

/// Horner evaluation returning both the value and a running magnitude bound
/// sum_k |c_k| |z|^k, used for scale-aware zero tests.
struct ScaledEval {
    cplx value;
    double scale;
};
ScaledEval poly_eval_scaled(std::span<const cplx> coeffs, cplx z);

/// Coefficients of the derivative (empty input -> empty).
std::vector<cplx> poly_derivative(std::span<const cplx> coeffs);

/// Degree after trimming leading coefficients whose magnitude is below
/// rel_tol * max|c_k|. Zero polynomial reports -1.
int poly_degree(std::span<const cplx> coeffs, double rel_tol = 1e-14);

struct RootSolve {
    std::vector<cplx> roots;  ///< one entry per degree, multiplicity repeated
    bool converged = false;
    int iterations = 0;
};

/// All complex roots via Aberth-Ehrlich simultaneous iteration with Newton
/// polishing. Leading coefficients below the trim tolerance are dropped
/// first (degree-dropped polynomials simply return fewer roots).
/// Degenerate inputs (zero or constant polynomial) return an empty,
/// converged result.
RootSolve find_roots(std::vector<cplx> coeffs, double tol = 1e-13);

}  // namespace perpress
