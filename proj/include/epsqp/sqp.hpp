#pragma once

#include <functional>

#include "epsqp/nlp_problem.hpp"
#include "epsqp/report.hpp"
#include "epsqp/types.hpp"

namespace epsqp {

enum class HessianMode { Identity, DampedBfgs, Exact };

struct SolverConfig {
    double rho0 = 1.0;
    double sigma = 0.01;       // Armijo constant
    double tau = 0.5;          // backtracking factor
    double eps = 1e-8;         // inner r-test and outer step tolerance
    int max_inner = 200;       // per outer iteration
    int max_outer = 100;
    int max_backtracks = 50;
    HessianMode hessian_mode = HessianMode::DampedBfgs;
    double rho_min = 1e-12;    // classification: "near zero" threshold
    double feas_tol = 1e-6;    // classification: feasibility threshold
    double lambda_floor = 1e-8;
    double rho_floor = 1e-30;  // hard floor on the penalty parameter
    double rho_decay_decades = 6.0;
    double qp_kkt_tol = 1e-10;
    bool record_detail = true;
};

struct LineSearchResult {
    double alpha = 0;
    double value = 0;  // merit at the accepted point
    int backtracks = 0;
    bool success = false;
};

/// Backtracking search for the largest alpha in {1, tau, tau^2, ...} with
///   P(x + alpha d) - P(x) <= sigma * alpha * dir_deriv.
LineSearchResult armijo_search(const std::function<double(const Vec&)>& merit,
                               const Vec& x, const Vec& d, double merit_at_x,
                               double dir_deriv, double sigma, double tau,
                               int max_backtracks);

/// Step-2 penalty update. When a steered point was accepted and the
/// penalty value increased at it, the ratio branch
///   min{0.01 rho, (c_old - c_steered) / (f_steered - f_old)}
/// applies; otherwise min{0.1 rho, rho^1.5}. Without a steered point the
/// update is min{0.01 rho, rho^1.5} if the last inner direction was still
/// large, else rho is returned unchanged.
double update_penalty(double rho, double f_old, double f_steered, double c_old,
                      double c_steered, bool steered, double d_inner_norm,
                      double eps);

/// Powell-damped BFGS update of B; skipped for vanishing steps.
Mat damped_bfgs_update(const Mat& B, const Vec& step, const Vec& grad_change);

/// Exact penalty Lagrangian Hessian shifted by the smallest xi on the
/// decade ladder {0, 1e-8, 1e-6, ...} that makes B - lambda_floor*I
/// factorizable.
Mat regularized_exact_hessian(const NlpProblem& problem, const Vec& x,
                              double rho, const Vec& u, const Vec& v,
                              const Vec& s, double lambda_floor);

/// Run the full inner/outer exact-penalty SQP loop from x0.
SolveReport solve(const NlpProblem& problem, const Vec& x0,
                  const SolverConfig& config = {});

}  // namespace epsqp
