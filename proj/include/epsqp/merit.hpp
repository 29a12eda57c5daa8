#pragma once

#include "epsqp/types.hpp"

namespace epsqp {

/// Lifted slacks y = |h(x)|, z = max{0, -g(x)}.
struct SlackPair {
    Vec y;
    Vec z;

    double l1_sum() const { return y.sum() + z.sum(); }
};

/// l1 violation measure c = ||h||_1 + ||max{0,-g}||_1.
double violation(const Vec& h, const Vec& g);

/// Exact penalty value P = rho * f + c.
double penalty_value(double rho, double f, double c);

/// Linearized violation c'(x; d) = ||h + Jh^T d||_1 + ||max{0,-(g + Jg^T d)}||_1.
double linearized_violation(const Vec& h, const Vec& g, const Mat& jac_h,
                            const Mat& jac_g, const Vec& d);

SlackPair slack_lift(const Vec& h, const Vec& g);

/// Merit directional derivative P'(x; d) = rho * grad_f^T d + r,
/// with r the model violation change from the QP solution.
double directional_derivative(double rho, const Vec& grad_f, const Vec& d, double r);

}  // namespace epsqp
