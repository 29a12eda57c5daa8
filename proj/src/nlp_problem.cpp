#include "epsqp/nlp_problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace epsqp {

namespace {

std::string format_point(const Vec& x) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

void require_finite(double v, const char* what, const Vec& x) {
    if (!std::isfinite(v)) {
        throw EvaluationError(std::string(what) + " returned a non-finite value at x=" +
                              format_point(x));
    }
}

void require_finite(const Eigen::Ref<const Mat>& m, const char* what, const Vec& x) {
    if (!m.allFinite()) {
        throw EvaluationError(std::string(what) + " returned a non-finite value at x=" +
                              format_point(x));
    }
}

}  // namespace

const Evaluation& Evaluator::eval(const Vec& x, bool want_derivatives) {
    const bool same_point = have_point_ && cached_x_.size() == x.size() && cached_x_ == x;
    if (!same_point) {
        const NlpProblem& p = *prob_;
        Evaluation ev;
        ev.f = p.f(x);
        require_finite(ev.f, "f", x);
        ev.h = p.num_eq > 0 ? p.h(x) : Vec(0);
        require_finite(ev.h, "h", x);
        ev.g = p.num_ineq > 0 ? p.g(x) : Vec(0);
        require_finite(ev.g, "g", x);
        ++numf_;
        cache_ = std::move(ev);
        cached_x_ = x;
        have_point_ = true;
    }
    if (want_derivatives && !cache_.has_derivatives) {
        const NlpProblem& p = *prob_;
        cache_.grad_f = p.grad_f(x);
        require_finite(cache_.grad_f, "grad_f", x);
        cache_.jac_h = p.num_eq > 0 ? p.jac_h(x) : Mat(p.n, 0);
        require_finite(cache_.jac_h, "jac_h", x);
        cache_.jac_g = p.num_ineq > 0 ? p.jac_g(x) : Mat(p.n, 0);
        require_finite(cache_.jac_g, "jac_g", x);
        cache_.has_derivatives = true;
        ++numg_;
    }
    cache_.numf = numf_;
    cache_.numg = numg_;
    return cache_;
}

Evaluation evaluate(const NlpProblem& problem, const Vec& x, bool want_derivatives) {
    Evaluator ev(problem);
    return ev.eval(x, want_derivatives);
}

double DerivativeReport::max_err() const {
    double m = max_err_grad_f;
    if (err_jac_h.size() > 0) m = std::max(m, err_jac_h.maxCoeff());
    if (err_jac_g.size() > 0) m = std::max(m, err_jac_g.maxCoeff());
    return m;
}

DerivativeReport check_derivatives(const NlpProblem& problem, const Vec& x, double step) {
    if (step <= 0) throw std::invalid_argument("check_derivatives: step must be positive");
    const int n = problem.n;
    DerivativeReport rep;
    rep.threshold = 100.0 * step;
    rep.err_jac_h = Vec::Zero(problem.num_eq);
    rep.err_jac_g = Vec::Zero(problem.num_ineq);

    const Evaluation base = evaluate(problem, x, true);
    auto rel_err = [](double analytic, double fd) {
        const double scale = std::max({1.0, std::abs(analytic), std::abs(fd)});
        return std::abs(analytic - fd) / scale;
    };

    for (int j = 0; j < n; ++j) {
        Vec xp = x, xm = x;
        xp[j] += step;
        xm[j] -= step;
        const Evaluation ep = evaluate(problem, xp, false);
        const Evaluation em = evaluate(problem, xm, false);
        const double inv2h = 1.0 / (2.0 * step);

        const double ef = rel_err(base.grad_f[j], (ep.f - em.f) * inv2h);
        rep.max_err_grad_f = std::max(rep.max_err_grad_f, ef);
        if (ef > rep.threshold) rep.flagged.push_back("grad_f[" + std::to_string(j) + "]");

        for (int i = 0; i < problem.num_eq; ++i) {
            const double e = rel_err(base.jac_h(j, i), (ep.h[i] - em.h[i]) * inv2h);
            rep.err_jac_h[i] = std::max(rep.err_jac_h[i], e);
            if (e > rep.threshold) {
                rep.flagged.push_back("jac_h[" + std::to_string(j) + "," + std::to_string(i) + "]");
            }
        }
        for (int i = 0; i < problem.num_ineq; ++i) {
            const double e = rel_err(base.jac_g(j, i), (ep.g[i] - em.g[i]) * inv2h);
            rep.err_jac_g[i] = std::max(rep.err_jac_g[i], e);
            if (e > rep.threshold) {
                rep.flagged.push_back("jac_g[" + std::to_string(j) + "," + std::to_string(i) + "]");
            }
        }
    }
    return rep;
}

Mat lagrangian_hessian(const NlpProblem& problem, const Vec& x, double rho,
                       const Vec& u, const Vec& v, const Vec& s) {
    if (!problem.has_second_derivatives()) {
        throw CapabilityError("problem '" + problem.name + "' provides no second derivatives");
    }
    Mat H = rho * problem.hess_f(x);
    for (int i = 0; i < problem.num_eq; ++i) {
        H += (u[i] - v[i]) * problem.hess_h(x, i);
    }
    for (int i = 0; i < problem.num_ineq; ++i) {
        H -= s[i] * problem.hess_g(x, i);
    }
    return 0.5 * (H + H.transpose());
}

}  // namespace epsqp
