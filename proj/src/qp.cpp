#include "epsqp/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "epsqp/merit.hpp"

namespace epsqp::qp {

namespace {

// Row r < mE is the equality kink |h_r + a_r.d|; row r >= mE is the
// inequality kink max{0, -(g_{r-mE} + c_{r-mE}.d)}. Statuses:
//   equality:   +1 residual > 0, -1 residual < 0, 0 on the kink
//   inequality: +1 satisfied,    -1 violated,     0 on the kink
struct Rows {
    int n = 0, mE = 0, mI = 0;
    std::vector<Vec> normal;
    std::vector<double> offset;

    int count() const { return mE + mI; }
    bool is_eq(int r) const { return r < mE; }
    double residual(int r, const Vec& d) const { return offset[r] + normal[r].dot(d); }
};

Rows build_rows(const QpInstance& inst) {
    Rows rows;
    rows.n = static_cast<int>(inst.linear.size());
    rows.mE = static_cast<int>(inst.h.size());
    rows.mI = static_cast<int>(inst.g.size());
    rows.normal.reserve(rows.count());
    rows.offset.reserve(rows.count());
    for (int i = 0; i < rows.mE; ++i) {
        rows.normal.push_back(inst.jac_h.col(i));
        rows.offset.push_back(inst.h[i]);
    }
    for (int i = 0; i < rows.mI; ++i) {
        rows.normal.push_back(inst.jac_g.col(i));
        rows.offset.push_back(inst.g[i]);
    }
    return rows;
}

Vec smooth_gradient_const(const QpInstance& inst, const Rows& rows,
                          const std::vector<int>& status) {
    Vec ghat = inst.linear;
    for (int r = 0; r < rows.count(); ++r) {
        if (rows.is_eq(r)) {
            if (status[r] != 0) ghat += static_cast<double>(status[r]) * rows.normal[r];
        } else {
            if (status[r] == -1) ghat -= rows.normal[r];
        }
    }
    return ghat;
}

struct EqpResult {
    Vec d;
    Vec xi;  // multipliers of the working rows, in working-set order
    bool rank_deficient = false;
    bool ok = true;
};

// Nullspace solve of  min ghat.d + 1/2 d.B.d  s.t.  normal_w.d = -offset_w.
EqpResult solve_eqp(const Eigen::LLT<Mat>& lltB, const Mat& B, const Vec& ghat,
                    const Rows& rows, const std::vector<int>& working,
                    bool want_multipliers) {
    EqpResult res;
    const int n = rows.n;
    const int m = static_cast<int>(working.size());
    if (m == 0) {
        res.d = lltB.solve(-ghat);
        res.xi = Vec(0);
        return res;
    }
    Mat N(n, m);
    Vec b(m);
    for (int j = 0; j < m; ++j) {
        N.col(j) = rows.normal[working[j]];
        b[j] = -rows.offset[working[j]];
    }
    Eigen::CompleteOrthogonalDecomposition<Mat> codNT(N.transpose());
    const int rank = static_cast<int>(codNT.rank());
    res.rank_deficient = rank < m;
    const Vec dp = codNT.solve(b);  // min-norm particular solution
    if ((N.transpose() * dp - b).cwiseAbs().maxCoeff() > 1e-7 * (1.0 + b.cwiseAbs().maxCoeff())) {
        res.ok = false;  // inconsistent working rows
        return res;
    }
    if (rank >= n) {
        res.d = dp;
    } else {
        Eigen::ColPivHouseholderQR<Mat> qrN(N);
        qrN.setThreshold(1e-12);
        const Mat Q = qrN.householderQ();
        const Mat Z = Q.rightCols(n - rank);
        const Mat ZBZ = Z.transpose() * B * Z;
        const Vec rhs = -Z.transpose() * (ghat + B * dp);
        res.d = dp + Z * Eigen::LLT<Mat>(ZBZ).solve(rhs);
    }
    if (want_multipliers) {
        Eigen::CompleteOrthogonalDecomposition<Mat> codN(N);
        res.xi = codN.solve(-(ghat + B * res.d));
    }
    return res;
}

QpSolution assemble(const QpInstance& inst, const Rows& rows, const Vec& d,
                    const std::vector<int>& status, const std::vector<int>& working,
                    const Vec& xi, bool rank_deficient) {
    QpSolution sol;
    sol.d = d;
    sol.nonunique_multipliers = rank_deficient;

    Vec w = Vec::Zero(rows.mE);     // u - v
    Vec theta = Vec::Zero(rows.mI);  // s
    for (int r = 0; r < rows.count(); ++r) {
        if (rows.is_eq(r)) {
            w[r] = static_cast<double>(status[r]);
        } else {
            theta[r - rows.mE] = status[r] == -1 ? 1.0 : 0.0;
        }
    }
    for (int j = 0; j < static_cast<int>(working.size()); ++j) {
        const int r = working[j];
        if (rows.is_eq(r)) {
            w[r] = std::clamp(xi[j], -1.0, 1.0);
        } else {
            theta[r - rows.mE] = std::clamp(-xi[j], 0.0, 1.0);
        }
    }
    sol.u = Vec(rows.mE);
    sol.v = Vec(rows.mE);
    for (int i = 0; i < rows.mE; ++i) {
        sol.u[i] = 0.5 * (1.0 + w[i]);
        sol.v[i] = 1.0 - sol.u[i];
    }
    sol.s = theta;
    sol.t = Vec::Ones(rows.mI) - theta;

    sol.y_plus = rows.mE > 0 ? Vec((inst.h + inst.jac_h.transpose() * d).cwiseAbs()) : Vec(0);
    sol.z_plus = rows.mI > 0 ? Vec((-(inst.g + inst.jac_g.transpose() * d)).cwiseMax(0.0))
                             : Vec(0);
    sol.r = (sol.y_plus.sum() + sol.z_plus.sum()) - violation(inst.h, inst.g);

    Vec stat = inst.linear + inst.B * d;
    if (rows.mE > 0) stat += inst.jac_h * w;
    if (rows.mI > 0) stat -= inst.jac_g * theta;
    sol.kkt_residual = stat.size() > 0 ? stat.cwiseAbs().maxCoeff() : 0.0;
    return sol;
}

}  // namespace

double model_value(const QpInstance& inst, const Vec& d) {
    return inst.linear.dot(d) + 0.5 * d.dot(inst.B * d) +
           linearized_violation(inst.h, inst.g, inst.jac_h, inst.jac_g, d);
}

QpSolution QpSolver::solve(const QpInstance& inst) {
    const Rows rows = build_rows(inst);
    const int n = rows.n;
    const int nrows = rows.count();

    Eigen::LLT<Mat> lltB(inst.B);
    if (lltB.info() != Eigen::Success) {
        throw QpMatrixError("QP matrix B is not positive definite");
    }

    Vec d = Vec::Zero(n);
    std::vector<int> status(nrows, 0);
    std::vector<int> working;
    for (int r = 0; r < nrows; ++r) {
        const double res = rows.residual(r, d);
        if (std::abs(res) <= opt_.active_tol) {
            status[r] = 0;
            working.push_back(r);
        } else {
            status[r] = res > 0 ? +1 : -1;
        }
    }

    const int max_iter =
        opt_.max_iterations > 0 ? opt_.max_iterations : 100 + 30 * (n + nrows);
    const int bland_after = 3 * (n + nrows);
    const double step_tol = 1e-12;
    int drops = 0;
    bool rank_deficient_seen = false;

    double best_M = std::numeric_limits<double>::infinity();
    QpSolution best;

    for (int iter = 1; iter <= max_iter; ++iter) {
        const Vec ghat = smooth_gradient_const(inst, rows, status);
        EqpResult eqp = solve_eqp(lltB, inst.B, ghat, rows, working, true);
        rank_deficient_seen = rank_deficient_seen || eqp.rank_deficient;
        const Vec delta = eqp.ok ? Vec(eqp.d - d) : Vec(Vec::Zero(n));
        const double step_norm = delta.size() > 0 ? delta.cwiseAbs().maxCoeff() : 0.0;

        if (step_norm > step_tol) {
            double alpha = 1.0;
            int blocker = -1;
            for (int r = 0; r < nrows; ++r) {
                if (status[r] == 0) continue;  // working row, stays on its kink
                const double dr = rows.normal[r].dot(delta);
                const double r0 = rows.residual(r, d);
                if (std::abs(r0) <= opt_.active_tol) {
                    // Freshly dropped row still on its kink: block only a
                    // move to the wrong side.
                    if (static_cast<double>(status[r]) * dr < -1e-12) {
                        alpha = 0.0;
                        blocker = r;
                        break;
                    }
                    continue;
                }
                if (r0 > 0 && dr < 0) {
                    const double t = -r0 / dr;
                    if (t < alpha - 1e-14) {
                        alpha = t;
                        blocker = r;
                    }
                } else if (r0 < 0 && dr > 0) {
                    const double t = -r0 / dr;
                    if (t < alpha - 1e-14) {
                        alpha = t;
                        blocker = r;
                    }
                }
            }
            d += alpha * delta;
            if (blocker >= 0) {
                status[blocker] = 0;
                working.push_back(blocker);
                std::sort(working.begin(), working.end());
            }
            continue;
        }

        // Stationary in the current region: examine working multipliers.
        const double mtol = 1e-9;
        int drop = -1;
        double worst = mtol;
        for (int j = 0; j < static_cast<int>(working.size()); ++j) {
            const int r = working[j];
            double excess, side;
            if (rows.is_eq(r)) {
                const double wv = eqp.xi[j];
                excess = std::max(wv - 1.0, -1.0 - wv);
                side = wv > 1.0 ? +1.0 : -1.0;
            } else {
                const double th = -eqp.xi[j];
                excess = std::max(-th, th - 1.0);
                side = th < 0.0 ? +1.0 : -1.0;
            }
            if (excess > worst) {
                if (drops >= bland_after) {
                    if (drop < 0) {
                        drop = j;
                        worst = excess;
                        status[r] = static_cast<int>(side);  // tentative; fixed below
                    }
                } else {
                    drop = j;
                    worst = excess;
                }
            }
        }
        if (drop < 0) {
            QpSolution sol = assemble(inst, rows, d, status, working, eqp.xi,
                                      rank_deficient_seen || eqp.rank_deficient);
            sol.iterations = iter;
            return sol;
        }
        const int r = working[drop];
        double side;
        if (rows.is_eq(r)) {
            side = eqp.xi[drop] > 1.0 ? +1.0 : -1.0;
        } else {
            side = -eqp.xi[drop] < 0.0 ? +1.0 : -1.0;
        }
        status[r] = static_cast<int>(side);
        working.erase(working.begin() + drop);
        ++drops;

        QpSolution cand = assemble(inst, rows, d, status, working, Vec::Zero(working.size()),
                                   rank_deficient_seen);
        const double M = model_value(inst, d);
        if (M < best_M) {
            best_M = M;
            best = cand;
        }
    }

    best.iterations = max_iter;
    throw QpCyclingError("QP active-set loop exceeded its iteration budget", best);
}

QpSolution QpSolver::solve_steering(const Mat& B, const Vec& h, const Mat& jac_h,
                                    const Vec& g, const Mat& jac_g) {
    QpInstance inst;
    inst.linear = Vec::Zero(B.rows());
    inst.B = B;
    inst.h = h;
    inst.jac_h = jac_h;
    inst.g = g;
    inst.jac_g = jac_g;
    return solve(inst);
}

QpSolution oracle_solve(const QpInstance& inst, int resolution) {
    const Rows rows = build_rows(inst);
    const int n = rows.n;
    const int nrows = rows.count();

    double budget = 1;
    for (int r = 0; r < nrows; ++r) budget *= 3;
    if (budget > 2e5) throw std::runtime_error("oracle_solve: enumeration budget exceeded");

    Vec best_d = Vec::Zero(n);
    double best_M = model_value(inst, best_d);

    // Enumerate every kink activity pattern; each candidate is the
    // solution of the pattern's equality-constrained QP via a full KKT
    // factorization (a deliberately different route than the solver).
    std::vector<int> pattern(nrows, 0);
    const long total = static_cast<long>(budget);
    for (long code = 0; code < total; ++code) {
        long c = code;
        for (int r = 0; r < nrows; ++r) {
            pattern[r] = static_cast<int>(c % 3) - 1;  // -1, 0, +1
            c /= 3;
        }
        std::vector<int> active;
        for (int r = 0; r < nrows; ++r) {
            if (pattern[r] == 0) active.push_back(r);
        }
        Vec ghat = inst.linear;
        for (int r = 0; r < nrows; ++r) {
            if (pattern[r] == 0) continue;
            if (rows.is_eq(r)) {
                ghat += static_cast<double>(pattern[r]) * rows.normal[r];
            } else if (pattern[r] == -1) {
                ghat -= rows.normal[r];
            }
        }
        const int m = static_cast<int>(active.size());
        Mat K = Mat::Zero(n + m, n + m);
        K.topLeftCorner(n, n) = inst.B;
        Vec rhs(n + m);
        rhs.head(n) = -ghat;
        for (int j = 0; j < m; ++j) {
            K.block(0, n + j, n, 1) = rows.normal[active[j]];
            K.block(n + j, 0, 1, n) = rows.normal[active[j]].transpose();
            rhs[n + j] = -rows.offset[active[j]];
        }
        Eigen::FullPivLU<Mat> lu(K);
        if (!lu.isInvertible()) {
            // Dependent active rows: least-squares candidate.
            const Vec sol = K.completeOrthogonalDecomposition().solve(rhs);
            const Vec d_cand = sol.head(n);
            bool on = true;
            for (int j = 0; j < m && on; ++j) {
                if (std::abs(rows.residual(active[j], d_cand)) > 1e-7) on = false;
            }
            if (on) {
                const double M = model_value(inst, d_cand);
                if (M < best_M - 0.0) {
                    best_M = M;
                    best_d = d_cand;
                }
            }
            continue;
        }
        const Vec d_cand = lu.solve(rhs).head(n);
        const double M = model_value(inst, d_cand);
        if (M < best_M) {
            best_M = M;
            best_d = d_cand;
        }
    }

    // Grid + coordinate-descent refinement for tiny dimensions.
    if (n <= 2 && resolution >= 3) {
        const double R = std::max(1.0, 2.0 * (best_d.size() > 0
                                                  ? best_d.cwiseAbs().maxCoeff()
                                                  : 0.0));
        Vec center = best_d;
        double width = R;
        for (int round = 0; round < 6; ++round) {
            Vec local_best = center;
            double local_M = model_value(inst, center);
            Vec probe = center;
            if (n == 1) {
                for (int i = 0; i < resolution; ++i) {
                    probe[0] = center[0] - width + 2.0 * width * i / (resolution - 1);
                    const double M = model_value(inst, probe);
                    if (M < local_M) {
                        local_M = M;
                        local_best = probe;
                    }
                }
            } else {
                for (int i = 0; i < resolution; ++i) {
                    for (int j = 0; j < resolution; ++j) {
                        probe[0] = center[0] - width + 2.0 * width * i / (resolution - 1);
                        probe[1] = center[1] - width + 2.0 * width * j / (resolution - 1);
                        const double M = model_value(inst, probe);
                        if (M < local_M) {
                            local_M = M;
                            local_best = probe;
                        }
                    }
                }
            }
            center = local_best;
            width /= resolution / 3.0 + 1.0;
            if (local_M < best_M) {
                best_M = local_M;
                best_d = local_best;
            }
        }
    }

    // Assemble the primal-dual answer at the best candidate.
    std::vector<int> status(nrows, 0);
    std::vector<int> working;
    for (int r = 0; r < nrows; ++r) {
        const double res = rows.residual(r, best_d);
        if (std::abs(res) <= 1e-8) {
            status[r] = 0;
            working.push_back(r);
        } else {
            status[r] = res > 0 ? +1 : -1;
        }
    }
    Vec xi(working.size());
    bool rank_def = false;
    if (!working.empty()) {
        Mat N(n, working.size());
        for (size_t j = 0; j < working.size(); ++j) N.col(j) = rows.normal[working[j]];
        Vec ghat = smooth_gradient_const(inst, rows, status);
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(N);
        xi = cod.solve(-(ghat + inst.B * best_d));
        rank_def = static_cast<int>(cod.rank()) < static_cast<int>(working.size());
    }
    QpSolution sol = assemble(inst, rows, best_d, status, working, xi, rank_def);
    sol.iterations = 0;
    return sol;
}

}  // namespace epsqp::qp
