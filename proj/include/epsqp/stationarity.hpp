#pragma once

#include <vector>

#include "epsqp/nlp_problem.hpp"
#include "epsqp/types.hpp"

namespace epsqp {

struct StationarityMeasures {
    double e_dual = 0;
    double e_compl = 0;
    double e_feas = 0;
};

/// Terminating-point categories. A feasible point with the penalty
/// parameter still far from zero is a KKT point; infeasible with the
/// parameter far from zero is DL-stationary; feasible with the parameter
/// near zero is a singular stationary point; infeasible with the
/// parameter near zero is DZ-stationary.
enum class StationarityKind {
    Kkt,
    DlStationary,
    SingularStationary,
    DzStationary,
    Unclassified,
};

const char* to_string(StationarityKind k);

struct Classification {
    StationarityKind kind = StationarityKind::Unclassified;
    double rho_final = 0;
    bool feasible = false;
};

struct ClassifyThresholds {
    double feas_tol = 1e-6;
    double rho_min = 1e-12;
    // The parameter also counts as "near zero" once it has decayed this
    // many decades below its initial value; there is no crisp boundary,
    // so the rule is tunable.
    double rho_decay_decades = 6.0;
};

/// E_dual  = || rho_prev * grad_f - Jh mu - Jg lambda ||_inf
/// E_compl = max{ || mu.*h + |h| ||_inf, || lambda.*g + max{0,-g} ||_inf }
/// E_feas  = max{ ||h||_inf, || max{0,-g} ||_inf }
StationarityMeasures measures(const Evaluation& ev, const Vec& mu,
                              const Vec& lambda, double rho_prev);
StationarityMeasures measures(const NlpProblem& problem, const Vec& x,
                              const Vec& mu, const Vec& lambda, double rho_prev);

Classification classify(const StationarityMeasures& m, double rho_final,
                        double rho0, bool converged,
                        const ClassifyThresholds& thr = {});

/// Least-squares stationarity certificate for the least-violation problem
/// restricted to the active constraint set at x.
struct ActiveSetCertificate {
    std::vector<int> active_eq;
    std::vector<int> active_ineq;
    Vec multipliers;      // stacked (eq, ineq) least-squares multipliers
    double residual = 0;  // inf-norm of grad_f minus active-gradient span
    // No active constraints at an infeasible x: only the violation
    // gradient is reported.
    bool violation_interior = false;
    double violation_gradient_norm = 0;
};

ActiveSetCertificate active_set_certificate(const NlpProblem& problem,
                                            const Vec& x, double tol = 1e-6);

}  // namespace epsqp
