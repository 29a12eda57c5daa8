#pragma once

#include <functional>
#include <string>
#include <vector>

#include "epsqp/types.hpp"

namespace epsqp {

/// Callback-backed nonlinear program
///
///   min f(x)   s.t.  h(x) = 0,  g(x) >= 0
///
/// with n variables, num_eq equality and num_ineq inequality constraints
/// (at least one constraint overall). Jacobians are stored column-wise:
/// column i of jac_h is the gradient of h_i. Second derivatives are
/// optional; solver modes that need them fail fast when absent.
struct NlpProblem {
    std::string name;
    int n = 0;
    int num_eq = 0;
    int num_ineq = 0;

    std::function<double(const Vec&)> f;
    std::function<Vec(const Vec&)> grad_f;
    std::function<Vec(const Vec&)> h;        // length num_eq
    std::function<Mat(const Vec&)> jac_h;    // n x num_eq
    std::function<Vec(const Vec&)> g;        // length num_ineq
    std::function<Mat(const Vec&)> jac_g;    // n x num_ineq

    // Optional second derivatives (all three present or all absent).
    std::function<Mat(const Vec&)> hess_f;
    std::function<Mat(const Vec&, int)> hess_h;  // Hessian of h_i
    std::function<Mat(const Vec&, int)> hess_g;  // Hessian of g_i

    bool has_second_derivatives() const { return static_cast<bool>(hess_f); }
};

/// One evaluation of (f, h, g) and optionally the first derivatives,
/// with the evaluation counters accumulated so far.
struct Evaluation {
    double f = 0;
    Vec h, g;
    Vec grad_f;
    Mat jac_h, jac_g;
    bool has_derivatives = false;
    long numf = 0;
    long numg = 0;
};

/// Per-solve evaluation engine. Counts one numf per point at which the
/// values (f, h, g) are computed and one numg per point at which the
/// gradients are computed; re-requesting a cached point is free, and
/// upgrading a cached value-only point to derivatives costs one numg.
/// Problems are immutable and shareable; counters live here.
class Evaluator {
  public:
    explicit Evaluator(const NlpProblem& problem) : prob_(&problem) {}

    const Evaluation& eval(const Vec& x, bool want_derivatives);

    long numf() const { return numf_; }
    long numg() const { return numg_; }

    const NlpProblem& problem() const { return *prob_; }

  private:
    const NlpProblem* prob_;
    long numf_ = 0;
    long numg_ = 0;
    Vec cached_x_;
    Evaluation cache_;
    bool have_point_ = false;
};

/// Single-shot evaluation (fresh counters).
Evaluation evaluate(const NlpProblem& problem, const Vec& x, bool want_derivatives);

/// Central-finite-difference derivative check at x.
struct DerivativeReport {
    double max_err_grad_f = 0;
    Vec err_jac_h;  // per equality constraint
    Vec err_jac_g;  // per inequality constraint
    double threshold = 0;
    std::vector<std::string> flagged;  // components exceeding threshold

    bool ok() const { return flagged.empty(); }
    double max_err() const;
};

DerivativeReport check_derivatives(const NlpProblem& problem, const Vec& x,
                                   double step = 1e-6);

/// Penalty Lagrangian Hessian
///   rho * hess_f + sum_i (u_i - v_i) hess_h_i - sum_i s_i hess_g_i.
/// Throws CapabilityError when the problem has no second derivatives.
Mat lagrangian_hessian(const NlpProblem& problem, const Vec& x, double rho,
                       const Vec& u, const Vec& v, const Vec& s);

}  // namespace epsqp
