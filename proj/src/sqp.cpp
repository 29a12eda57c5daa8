#include "epsqp/sqp.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "epsqp/merit.hpp"
#include "epsqp/qp.hpp"
#include "epsqp/stationarity.hpp"

namespace epsqp {

LineSearchResult armijo_search(const std::function<double(const Vec&)>& merit,
                               const Vec& x, const Vec& d, double merit_at_x,
                               double dir_deriv, double sigma, double tau,
                               int max_backtracks) {
    LineSearchResult res;
    double alpha = 1.0;
    // rounding-noise floor: near a minimizer the required decrease can fall
    // below the representable resolution of the merit value
    const double noise = 4.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, std::abs(merit_at_x));
    for (int i = 0; i <= max_backtracks; ++i) {
        const double val = merit(x + alpha * d);
        if (val - merit_at_x <= sigma * alpha * dir_deriv + noise) {
            res.alpha = alpha;
            res.value = val;
            res.backtracks = i;
            res.success = true;
            return res;
        }
        res.alpha = alpha;
        res.value = val;
        res.backtracks = i + 1;
        alpha *= tau;
    }
    return res;
}

double update_penalty(double rho, double f_old, double f_steered, double c_old,
                      double c_steered, bool steered, double d_inner_norm,
                      double eps) {
    if (steered) {
        if (rho * f_steered + c_steered > rho * f_old + c_old) {
            return std::min(0.01 * rho, (c_old - c_steered) / (f_steered - f_old));
        }
        return std::min(0.1 * rho, std::pow(rho, 1.5));
    }
    if (d_inner_norm > eps) return std::min(0.01 * rho, std::pow(rho, 1.5));
    return rho;
}

Mat damped_bfgs_update(const Mat& B, const Vec& step, const Vec& grad_change) {
    if (step.size() == 0 || step.cwiseAbs().maxCoeff() < 1e-14) return B;
    const Vec Bs = B * step;
    const double sBs = step.dot(Bs);
    const double sy = step.dot(grad_change);
    if (sBs <= 0) return B;
    double theta = 1.0;
    if (sy < 0.2 * sBs) theta = 0.8 * sBs / (sBs - sy);
    const Vec yb = theta * grad_change + (1.0 - theta) * Bs;
    const double syb = step.dot(yb);
    if (syb <= 1e-16) return B;
    Mat Bn = B - (Bs * Bs.transpose()) / sBs + (yb * yb.transpose()) / syb;
    return 0.5 * (Bn + Bn.transpose());
}

Mat regularized_exact_hessian(const NlpProblem& problem, const Vec& x, double rho,
                              const Vec& u, const Vec& v, const Vec& s,
                              double lambda_floor) {
    const Mat H = lagrangian_hessian(problem, x, rho, u, v, s);
    const int n = static_cast<int>(H.rows());
    const Mat I = Mat::Identity(n, n);
    double xi = 0.0;
    while (xi < 1e16) {
        const Mat B = H + xi * I;
        Eigen::LLT<Mat> llt(B - lambda_floor * I);
        if (llt.info() == Eigen::Success) return B;
        xi = xi == 0.0 ? 1e-8 : xi * 100.0;
    }
    return std::max(1.0, lambda_floor) * I;
}

namespace {

struct PendingBfgs {
    bool have = false;
    Vec step;
    Vec mu, lambda;
    Vec grad_L_old;
};

Vec lagrangian_gradient(const Evaluation& ev, double rho, const Vec& mu,
                        const Vec& lambda) {
    Vec g = rho * ev.grad_f;
    if (ev.h.size() > 0) g -= ev.jac_h * mu;
    if (ev.g.size() > 0) g -= ev.jac_g * lambda;
    return g;
}

}  // namespace

SolveReport solve(const NlpProblem& problem, const Vec& x0,
                  const SolverConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = problem.n;
    SolveReport report;
    Evaluator evaluator(problem);
    qp::QpSolver qpsolver(qp::QpSolver::Options{config.qp_kkt_tol, 1e-11, 0});

    double rho = config.rho0;
    Vec x = x0;
    Vec mu = Vec::Ones(problem.num_eq);
    Vec lambda = Vec::Ones(problem.num_ineq);
    Mat B = Mat::Identity(n, n);
    // multiplier estimates feeding the exact Hessian (u - v = -mu, s = lambda)
    Vec u_est = Vec::Zero(problem.num_eq);
    Vec v_est = Vec::Ones(problem.num_eq);
    Vec s_est = Vec::Ones(problem.num_ineq).cwiseMin(1.0);

    bool converged = false;
    StationarityMeasures last_measures;
    double rho_used_last = rho;
    report.status = SolveStatus::MaxIterations;

    auto merit_fn = [&](const Vec& p) {
        const Evaluation& e = evaluator.eval(p, false);
        return penalty_value(rho, e.f, violation(e.h, e.g));
    };
    auto viol_fn = [&](const Vec& p) {
        const Evaluation& e = evaluator.eval(p, false);
        return violation(e.h, e.g);
    };

    try {
        {
            const Evaluation& ev0 = evaluator.eval(x, true);
            last_measures = measures(ev0, mu, lambda, rho);
            OuterRecord rec;
            rec.k = 0;
            rec.f = ev0.f;
            rec.e_dual = last_measures.e_dual;
            rec.e_compl = last_measures.e_compl;
            rec.e_feas = last_measures.e_feas;
            rec.iter_sb = -1;
            rec.rho = rho;
            rec.numf = evaluator.numf();
            rec.numg = evaluator.numg();
            report.records.push_back(rec);
        }
        long numf_mark = evaluator.numf();
        long numg_mark = evaluator.numg();
        PendingBfgs pending;  // carries across the steering step too

        for (int k = 1; k <= config.max_outer && !converged; ++k) {
            const double rho_used = rho;
            OuterLog olog;
            olog.rho_used = rho_used;

            int qp_count = 0;
            double exit_d_norm = 0;
            bool inner_done = false;
            bool failed = false;

            while (!inner_done) {
                const Evaluation& ev = evaluator.eval(x, true);
                if (config.hessian_mode == HessianMode::DampedBfgs && pending.have) {
                    const Vec grad_new =
                        lagrangian_gradient(ev, rho, pending.mu, pending.lambda);
                    B = damped_bfgs_update(B, pending.step, grad_new - pending.grad_L_old);
                    pending.have = false;
                } else if (config.hessian_mode == HessianMode::Exact) {
                    B = regularized_exact_hessian(problem, x, rho, u_est, v_est,
                                                  s_est, config.lambda_floor);
                }

                qp::QpInstance inst{rho * ev.grad_f, B, ev.h, ev.jac_h, ev.g, ev.jac_g};
                qp::QpSolution sol;
                try {
                    sol = qpsolver.solve(inst);
                } catch (const qp::QpCyclingError& e) {
                    sol = e.best;
                }
                ++qp_count;
                mu = sol.v - sol.u;
                lambda = sol.s;
                u_est = sol.u;
                v_est = sol.v;
                s_est = sol.s;

                if (sol.r >= -config.eps) {
                    exit_d_norm = sol.d.size() > 0 ? sol.d.cwiseAbs().maxCoeff() : 0.0;
                    last_measures = measures(ev, mu, lambda, rho_used);
                    inner_done = true;
                    break;
                }

                const double P0 = penalty_value(rho, ev.f, violation(ev.h, ev.g));
                const double dd = directional_derivative(rho, ev.grad_f, sol.d, sol.r);
                // the line search overwrites the evaluator cache behind ev
                const Vec grad_L_here = lagrangian_gradient(ev, rho, mu, lambda);
                const LineSearchResult ls = armijo_search(
                    merit_fn, x, sol.d, P0, dd, config.sigma, config.tau,
                    config.max_backtracks);

                if (config.record_detail) {
                    InnerStepLog step;
                    step.x = x;
                    step.d = sol.d;
                    step.r = sol.r;
                    step.dir_deriv = dd;
                    step.dtBd = sol.d.dot(B * sol.d);
                    step.alpha = ls.alpha;
                    step.merit_before = P0;
                    step.merit_after = ls.value;
                    step.accepted = ls.success;
                    olog.inner.push_back(step);
                }

                if (!ls.success) {
                    report.status = SolveStatus::LineSearchFailure;
                    exit_d_norm = sol.d.cwiseAbs().maxCoeff();
                    last_measures = measures(ev, mu, lambda, rho_used);
                    inner_done = true;
                    failed = true;
                    break;
                }

                pending.have = true;
                pending.step = ls.alpha * sol.d;
                pending.mu = mu;
                pending.lambda = lambda;
                pending.grad_L_old = grad_L_here;
                x += pending.step;

                if (qp_count >= config.max_inner) {
                    const Evaluation& ex = evaluator.eval(x, true);
                    exit_d_norm = sol.d.cwiseAbs().maxCoeff();
                    last_measures = measures(ex, mu, lambda, rho_used);
                    inner_done = true;
                }
            }
            report.total_inner += qp_count;
            rho_used_last = rho_used;

            // Row-k evaluation counters close at the end of the inner loop;
            // steering evaluations are charged to the next row.
            const long row_numf = evaluator.numf() - numf_mark;
            const long row_numg = evaluator.numg() - numg_mark;
            numf_mark = evaluator.numf();
            numg_mark = evaluator.numg();

            const Evaluation evx = evaluator.eval(x, true);  // copy: steering
                                                             // evals recycle the cache
            const double f_old = evx.f;
            const double c_old = violation(evx.h, evx.g);

            double d_steer_norm = 0;
            bool steered = false;
            double f_s = f_old, c_s = c_old;
            Vec steer_step;
            SteeringLog slog;
            if (!failed) {
                qp::QpSolution st;
                try {
                    st = qpsolver.solve_steering(B, evx.h, evx.jac_h, evx.g, evx.jac_g);
                } catch (const qp::QpCyclingError& e) {
                    st = e.best;
                }
                d_steer_norm = st.d.size() > 0 ? st.d.cwiseAbs().maxCoeff() : 0.0;
                slog.d_norm_inf = d_steer_norm;
                slog.r = st.r;

                if (std::max(d_steer_norm, exit_d_norm) <= config.eps) {
                    converged = true;
                    report.status = SolveStatus::Converged;
                } else if (d_steer_norm > config.eps && st.r < 0) {
                    const LineSearchResult ls = armijo_search(
                        viol_fn, x, st.d, c_old, st.r, config.sigma, config.tau,
                        config.max_backtracks);
                    if (ls.success) {
                        steered = true;
                        c_s = ls.value;
                        steer_step = ls.alpha * st.d;
                        x += steer_step;  // the steered point is adopted
                        f_s = evaluator.eval(x, false).f;
                        slog.steered = true;
                        slog.alpha = ls.alpha;
                        slog.c_before = c_old;
                        slog.c_after = c_s;
                    }
                }
            }

            if (!converged && !failed) {
                double rho_new = update_penalty(rho, f_old, f_s, c_old, c_s, steered,
                                                exit_d_norm, config.eps);
                rho = std::max(rho_new, config.rho_floor);
                if (steered) {
                    // quasi-Newton update across the steering step, evaluated
                    // with the parameter the next inner loop will use
                    pending.have = true;
                    pending.step = steer_step;
                    pending.mu = mu;
                    pending.lambda = lambda;
                    Vec gl = rho * evx.grad_f;
                    if (evx.h.size() > 0) gl -= evx.jac_h * mu;
                    if (evx.g.size() > 0) gl -= evx.jac_g * lambda;
                    pending.grad_L_old = gl;
                }
            }
            olog.rho_after = rho;
            olog.steering = slog;
            if (config.record_detail) report.detail.push_back(std::move(olog));

            OuterRecord rec;
            rec.k = k;
            rec.f = f_old;
            rec.e_dual = last_measures.e_dual;
            rec.e_compl = last_measures.e_compl;
            rec.e_feas = last_measures.e_feas;
            rec.iter_sb = qp_count;
            rec.rho = rho;
            rec.numf = row_numf;
            rec.numg = row_numg;
            report.records.push_back(rec);

            if (failed) break;
        }
    } catch (const EvaluationError&) {
        report.status = SolveStatus::EvaluationFailure;
    }

    report.final_x = x;
    report.final_mu = mu;
    report.final_lambda = lambda;
    report.final_rho = rho;
    try {
        report.final_f = evaluator.eval(x, false).f;
    } catch (const EvaluationError&) {
    }
    report.classification = classify(
        last_measures, rho, config.rho0, converged,
        ClassifyThresholds{config.feas_tol, config.rho_min, config.rho_decay_decades});
    (void)rho_used_last;
    report.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace epsqp
