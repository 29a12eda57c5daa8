#pragma once

#include <stdexcept>

#include "epsqp/types.hpp"

namespace epsqp::qp {

/// Data of the convex piecewise-quadratic direction-finding model
///
///   M(d) = linear^T d + 1/2 d^T B d
///        + ||h + Jh^T d||_1 + ||max{0, -(g + Jg^T d)}||_1,
///
/// equivalently the smooth slack QP in (d, y+, z+). linear is rho*grad_f
/// for the SQP step and zero for the steering step. B must be symmetric
/// positive definite.
struct QpInstance {
    Vec linear;
    Mat B;
    Vec h;
    Mat jac_h;  // n x mE, columns are gradients
    Vec g;
    Mat jac_g;  // n x mI
};

/// Primal-dual answer. Multipliers are those of the slack QP:
/// u, v for the two-sided equality rows (u + v = 1), s, t for the
/// inequality rows (s + t = 1), all in [0, 1]. r is the model violation
/// change ||y+||_1 + ||z+||_1 - ||y||_1 - ||z||_1 with (y, z) lifted
/// from (h, g).
struct QpSolution {
    Vec d;
    Vec y_plus, z_plus;
    Vec u, v, s, t;
    double r = 0;
    double kkt_residual = 0;
    bool nonunique_multipliers = false;
    int iterations = 0;
};

struct QpMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Active-set loop failed to settle; carries the best iterate found.
struct QpCyclingError : std::runtime_error {
    QpSolution best;
    QpCyclingError(const std::string& msg, QpSolution b)
        : std::runtime_error(msg), best(std::move(b)) {}
};

/// Model objective M(d).
double model_value(const QpInstance& inst, const Vec& d);

/// Dense primal active-set solver on the kink hyperplanes of M(d); the
/// slack variables are handled implicitly, so only n x n systems plus
/// active constraint rows are factored. A solver instance owns mutable
/// workspace and is used from one thread at a time.
class QpSolver {
  public:
    struct Options {
        double kkt_tol = 1e-10;
        double active_tol = 1e-11;  // |residual| below this counts as on-kink
        int max_iterations = 0;     // 0: derived from problem size
    };

    QpSolver() = default;
    explicit QpSolver(Options opt) : opt_(opt) {}

    QpSolution solve(const QpInstance& instance);

    /// Steering variant: linear term zero (regularized linear l1 minimization).
    QpSolution solve_steering(const Mat& B, const Vec& h, const Mat& jac_h,
                              const Vec& g, const Mat& jac_g);

  private:
    Options opt_;
};

/// Independent brute-force reference: enumerates all kink activity
/// patterns, solves each equality-constrained QP, additionally refines a
/// dense grid by coordinate descent for n <= 2, and returns the best
/// candidate. Intended for n <= 4; throws when the enumeration budget
/// (3^(mE+mI) patterns) exceeds ~2e5.
QpSolution oracle_solve(const QpInstance& instance, int resolution = 41);

}  // namespace epsqp::qp
