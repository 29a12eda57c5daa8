#include "epsqp/merit.hpp"

#include <cmath>

namespace epsqp {

double violation(const Vec& h, const Vec& g) {
    double c = h.size() > 0 ? h.cwiseAbs().sum() : 0.0;
    for (int i = 0; i < g.size(); ++i) c += std::max(0.0, -g[i]);
    return c;
}

double penalty_value(double rho, double f, double c) { return rho * f + c; }

double linearized_violation(const Vec& h, const Vec& g, const Mat& jac_h,
                            const Mat& jac_g, const Vec& d) {
    double c = 0;
    if (h.size() > 0) c += (h + jac_h.transpose() * d).cwiseAbs().sum();
    if (g.size() > 0) {
        const Vec q = g + jac_g.transpose() * d;
        for (int i = 0; i < q.size(); ++i) c += std::max(0.0, -q[i]);
    }
    return c;
}

SlackPair slack_lift(const Vec& h, const Vec& g) {
    SlackPair sp;
    sp.y = h.cwiseAbs();
    sp.z = (-g).cwiseMax(0.0);
    return sp;
}

double directional_derivative(double rho, const Vec& grad_f, const Vec& d, double r) {
    return rho * grad_f.dot(d) + r;
}

}  // namespace epsqp
