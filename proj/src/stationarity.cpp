#include "epsqp/stationarity.hpp"

#include <algorithm>
#include <cmath>

namespace epsqp {

const char* to_string(StationarityKind k) {
    switch (k) {
        case StationarityKind::Kkt: return "KKT";
        case StationarityKind::DlStationary: return "DL-stationary";
        case StationarityKind::SingularStationary: return "singular stationary";
        case StationarityKind::DzStationary: return "DZ-stationary";
        default: return "unclassified";
    }
}

StationarityMeasures measures(const Evaluation& ev, const Vec& mu,
                              const Vec& lambda, double rho_prev) {
    StationarityMeasures m;
    Vec dual = rho_prev * ev.grad_f;
    if (ev.h.size() > 0) dual -= ev.jac_h * mu;
    if (ev.g.size() > 0) dual -= ev.jac_g * lambda;
    m.e_dual = dual.size() > 0 ? dual.cwiseAbs().maxCoeff() : 0.0;

    double compl_eq = 0, compl_in = 0, feas_eq = 0, feas_in = 0;
    for (int i = 0; i < ev.h.size(); ++i) {
        compl_eq = std::max(compl_eq, std::abs(mu[i] * ev.h[i] + std::abs(ev.h[i])));
        feas_eq = std::max(feas_eq, std::abs(ev.h[i]));
    }
    for (int i = 0; i < ev.g.size(); ++i) {
        const double neg = std::max(0.0, -ev.g[i]);
        compl_in = std::max(compl_in, std::abs(lambda[i] * ev.g[i] + neg));
        feas_in = std::max(feas_in, neg);
    }
    m.e_compl = std::max(compl_eq, compl_in);
    m.e_feas = std::max(feas_eq, feas_in);
    return m;
}

StationarityMeasures measures(const NlpProblem& problem, const Vec& x,
                              const Vec& mu, const Vec& lambda, double rho_prev) {
    return measures(evaluate(problem, x, true), mu, lambda, rho_prev);
}

Classification classify(const StationarityMeasures& m, double rho_final,
                        double rho0, bool converged, const ClassifyThresholds& thr) {
    Classification c;
    c.rho_final = rho_final;
    c.feasible = m.e_feas <= thr.feas_tol;
    if (!converged) {
        c.kind = StationarityKind::Unclassified;
        return c;
    }
    const bool rho_near_zero =
        rho_final <= thr.rho_min ||
        (rho_final > 0 && std::log10(rho0 / rho_final) >= thr.rho_decay_decades);
    if (c.feasible) {
        c.kind = rho_near_zero ? StationarityKind::SingularStationary
                               : StationarityKind::Kkt;
    } else {
        c.kind = rho_near_zero ? StationarityKind::DzStationary
                               : StationarityKind::DlStationary;
    }
    return c;
}

ActiveSetCertificate active_set_certificate(const NlpProblem& problem,
                                            const Vec& x, double tol) {
    const Evaluation ev = evaluate(problem, x, true);
    ActiveSetCertificate cert;
    for (int i = 0; i < ev.h.size(); ++i) {
        if (std::abs(ev.h[i]) <= tol) cert.active_eq.push_back(i);
    }
    for (int i = 0; i < ev.g.size(); ++i) {
        if (std::abs(ev.g[i]) <= tol) cert.active_ineq.push_back(i);
    }
    const int m = static_cast<int>(cert.active_eq.size() + cert.active_ineq.size());
    if (m == 0) {
        cert.violation_interior = true;
        Vec vgrad = Vec::Zero(problem.n);
        for (int i = 0; i < ev.h.size(); ++i) {
            if (ev.h[i] > tol) vgrad += ev.jac_h.col(i);
            else if (ev.h[i] < -tol) vgrad -= ev.jac_h.col(i);
        }
        for (int i = 0; i < ev.g.size(); ++i) {
            if (ev.g[i] < -tol) vgrad -= ev.jac_g.col(i);
        }
        cert.violation_gradient_norm =
            vgrad.size() > 0 ? vgrad.cwiseAbs().maxCoeff() : 0.0;
        cert.multipliers = Vec(0);
        cert.residual = ev.grad_f.cwiseAbs().maxCoeff();
        return cert;
    }
    Mat N(problem.n, m);
    int col = 0;
    for (int i : cert.active_eq) N.col(col++) = ev.jac_h.col(i);
    for (int i : cert.active_ineq) N.col(col++) = ev.jac_g.col(i);
    cert.multipliers = N.completeOrthogonalDecomposition().solve(ev.grad_f);
    const Vec resid = ev.grad_f - N * cert.multipliers;
    cert.residual = resid.cwiseAbs().maxCoeff();
    return cert;
}

}  // namespace epsqp
