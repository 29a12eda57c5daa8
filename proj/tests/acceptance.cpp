// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on
// any failure. Golden runs use solver defaults unless noted.
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "epsqp/merit.hpp"
#include "epsqp/problems.hpp"
#include "epsqp/qp.hpp"
#include "epsqp/sqp.hpp"

using namespace epsqp;

namespace {

int failures = 0;

void report(int idx, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", idx, ok ? "PASS" : "FAIL", detail.c_str());
    if (!ok) ++failures;
}

Vec vec2(double a, double b) {
    Vec x(2);
    x << a, b;
    return x;
}

struct Golden {
    std::string name;
    SolveReport rep;
};

std::map<std::string, SolveReport> run_goldens() {
    std::map<std::string, SolveReport> out;
    for (const auto& [name, desc] : problems::list()) {
        const auto& e = problems::get(name);
        SolverConfig cfg;
        if (e.rho0_override) cfg.rho0 = *e.rho0_override;
        out.emplace(name, solve(e.problem, e.x0, cfg));
    }
    return out;
}

const OuterRecord& last_record(const SolveReport& rep) { return rep.records.back(); }

double dist_inf(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); }

// -------- criteria 1-5: golden trajectories --------

void criterion1(const SolveReport& rep) {
    const auto& rec = last_record(rep);
    std::ostringstream os;
    os << "tp1: f=" << rep.final_f << " E_feas=" << rec.e_feas
       << " E_dual=" << rec.e_dual << " class=" << to_string(rep.classification.kind)
       << " inner=" << rep.total_inner;
    const bool ok = rep.status == SolveStatus::Converged &&
                    std::abs(rep.final_f - 1.0) <= 1e-3 &&
                    std::abs(rec.e_feas - 0.5155) <= 1e-3 && rec.e_dual <= 1e-6 &&
                    rep.classification.kind == StationarityKind::DzStationary &&
                    rep.total_inner <= 5 * 13;
    report(1, ok, os.str());
}

void criterion2(const SolveReport& rep) {
    const auto& rec = last_record(rep);
    std::ostringstream os;
    os << "tp2: f=" << rep.final_f << " E_feas=" << rec.e_feas << " x=("
       << rep.final_x[0] << "," << rep.final_x[1] << ")"
       << " class=" << to_string(rep.classification.kind)
       << " inner=" << rep.total_inner;
    const bool ok = rep.status == SolveStatus::Converged &&
                    std::abs(rep.final_f) <= 1e-6 &&
                    std::abs(rec.e_feas - 1.0) <= 1e-6 &&
                    dist_inf(rep.final_x, vec2(0, 0)) <= 1e-3 &&
                    rep.classification.kind == StationarityKind::DzStationary &&
                    rep.total_inner <= 5 * 15;
    report(2, ok, os.str());
}

void criterion3(const SolveReport& rep) {
    const auto& rec = last_record(rep);
    std::ostringstream os;
    os << "tp3: f=" << rep.final_f << " E_feas=" << rec.e_feas
       << " rho=" << rep.final_rho << " class=" << to_string(rep.classification.kind)
       << " inner=" << rep.total_inner;
    const bool ok = rep.status == SolveStatus::Converged &&
                    rep.classification.kind == StationarityKind::DlStationary &&
                    rep.final_rho >= 1e-4 && std::abs(rec.e_feas - 0.5) <= 1e-6 &&
                    std::abs(rep.final_f) <= 1e-6 && rep.total_inner <= 5 * 12;
    report(3, ok, os.str());
}

void criterion4(const SolveReport& rep) {
    const auto& rec = last_record(rep);
    std::ostringstream os;
    os << "tp4: x=" << rep.final_x[0] << " E_feas=" << rec.e_feas
       << " class=" << to_string(rep.classification.kind);
    const bool ok = rep.status == SolveStatus::Converged &&
                    std::abs(rep.final_x[0] + 1.0) <= 1e-6 &&
                    std::abs(rec.e_feas - 3.0) <= 1e-6 &&
                    rep.classification.kind == StationarityKind::DlStationary;
    report(4, ok, os.str());
}

void criterion5(const SolveReport& rep) {
    std::ostringstream os;
    os << "tp5: x=(" << rep.final_x[0] << "," << rep.final_x[1] << ") f="
       << rep.final_f << " rho=" << rep.final_rho
       << " class=" << to_string(rep.classification.kind)
       << " inner=" << rep.total_inner;
    const bool ok = rep.status == SolveStatus::Converged &&
                    dist_inf(rep.final_x, vec2(1, 0)) <= 1e-4 &&
                    std::abs(rep.final_f - 1.0) <= 1e-3 &&
                    rep.classification.kind == StationarityKind::SingularStationary &&
                    rep.final_rho <= 1e-12 && rep.total_inner <= 5 * 51;
    report(5, ok, os.str());
}

// -------- criterion 6: subproblem solver against the brute-force oracle ----

void criterion6() {
    std::mt19937 rng(20240817);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> dim(1, 4), con(0, 3);
    qp::QpSolver solver;
    double worst_m = 0, worst_d = 0, worst_box = 0, worst_compl = 0;
    bool ok = true;
    for (int idx = 0; idx < 200; ++idx) {
        const int n = dim(rng);
        int mE = con(rng), mI = con(rng);
        if (mE + mI == 0) mI = 1;
        qp::QpInstance inst;
        Mat A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = normal(rng);
        inst.B = A.transpose() * A + Mat::Identity(n, n);
        inst.linear = Vec(n);
        for (int i = 0; i < n; ++i) inst.linear[i] = normal(rng);
        inst.h = Vec(mE);
        inst.jac_h = Mat(n, mE);
        for (int i = 0; i < mE; ++i) {
            inst.h[i] = normal(rng);
            for (int j = 0; j < n; ++j) inst.jac_h(j, i) = normal(rng);
        }
        inst.g = Vec(mI);
        inst.jac_g = Mat(n, mI);
        for (int i = 0; i < mI; ++i) {
            inst.g[i] = normal(rng);
            for (int j = 0; j < n; ++j) inst.jac_g(j, i) = normal(rng);
        }
        const auto sol = solver.solve(inst);
        const auto ref = qp::oracle_solve(inst);
        const double mdiff =
            std::abs(qp::model_value(inst, sol.d) - qp::model_value(inst, ref.d));
        const double ddiff = (sol.d - ref.d).cwiseAbs().maxCoeff();
        worst_m = std::max(worst_m, mdiff);
        worst_d = std::max(worst_d, ddiff);
        if (mdiff > 1e-6 || ddiff > 1e-4) ok = false;

        const Vec h_lin = mE > 0 ? Vec(inst.h + inst.jac_h.transpose() * sol.d) : Vec(0);
        const Vec g_lin = mI > 0 ? Vec(inst.g + inst.jac_g.transpose() * sol.d) : Vec(0);
        for (int i = 0; i < mE; ++i) {
            // box and partition identities must be exact
            const double box =
                std::max({-sol.u[i], sol.u[i] - 1.0, -sol.v[i], sol.v[i] - 1.0,
                          std::abs(sol.u[i] + sol.v[i] - 1.0)});
            worst_box = std::max(worst_box, box);
            if (box > 0) ok = false;
            const double c1 = std::abs(sol.u[i] * (sol.y_plus[i] - h_lin[i]));
            const double c2 = std::abs(sol.v[i] * (sol.y_plus[i] + h_lin[i]));
            worst_compl = std::max({worst_compl, c1, c2});
            if (std::max(c1, c2) > 1e-10) ok = false;
        }
        for (int i = 0; i < mI; ++i) {
            const double box =
                std::max({-sol.s[i], sol.s[i] - 1.0, -sol.t[i], sol.t[i] - 1.0,
                          std::abs(sol.s[i] + sol.t[i] - 1.0)});
            worst_box = std::max(worst_box, box);
            if (box > 0) ok = false;
            const double c1 = std::abs(sol.s[i] * (sol.z_plus[i] + g_lin[i]));
            const double c2 = std::abs(sol.t[i] * sol.z_plus[i]);
            worst_compl = std::max({worst_compl, c1, c2});
            if (std::max(c1, c2) > 1e-10) ok = false;
        }
    }
    std::ostringstream os;
    os << "200 instances: max |dM|=" << worst_m << " max |dd|=" << worst_d
       << " box excess=" << worst_box << " compl=" << worst_compl;
    report(6, ok, os.str());
}

// -------- criterion 7: invariants on every golden run --------

void criterion7(const std::map<std::string, SolveReport>& goldens) {
    bool ok = true;
    std::string first_bad;
    auto fail = [&](const std::string& what) {
        ok = false;
        if (first_bad.empty()) first_bad = what;
    };
    for (const auto& [name, rep] : goldens) {
        const auto& e = problems::get(name);
        for (size_t k = 0; k < rep.detail.size(); ++k) {
            const OuterLog& ol = rep.detail[k];
            double prev_merit = std::numeric_limits<double>::infinity();
            for (const InnerStepLog& st : ol.inner) {
                const double noise =
                    4.0 * std::numeric_limits<double>::epsilon() *
                    std::max(1.0, std::abs(st.merit_before));
                // (a) monotone merit within the inner loop
                if (st.merit_before > prev_merit + noise) fail(name + ": merit rose");
                if (st.accepted) {
                    if (st.merit_after > st.merit_before + noise)
                        fail(name + ": accepted step increased merit");
                    // (b) descent at least as steep as the curvature term
                    if (st.dir_deriv > -0.5 * st.dtBd + 1e-12)
                        fail(name + ": weak directional derivative");
                    // (e) Armijo inequality as evaluated
                    if (st.merit_after - st.merit_before >
                        0.01 * st.alpha * st.dir_deriv + noise)
                        fail(name + ": Armijo condition violated");
                    prev_merit = st.merit_after;
                } else {
                    prev_merit = st.merit_before;
                }
                // (c) slack identity at the iterate
                const Evaluation ev = evaluate(e.problem, st.x, false);
                const SlackPair sp = slack_lift(ev.h, ev.g);
                if (std::abs(sp.l1_sum() - violation(ev.h, ev.g)) > 1e-12)
                    fail(name + ": slack identity broken");
            }
            // (d) every update of a sub-unit parameter contracts by 10x
            if (ol.rho_after != ol.rho_used && ol.rho_used <= 1.0) {
                const bool floored = ol.rho_after == 1e-30;
                if (!floored && ol.rho_after > 0.1 * ol.rho_used * (1 + 1e-12))
                    fail(name + ": slow rho update");
            }
            // (e) steering sufficient decrease as evaluated
            const SteeringLog& sl = ol.steering;
            if (sl.steered) {
                const double noise = 4.0 * std::numeric_limits<double>::epsilon() *
                                     std::max(1.0, std::abs(sl.c_before));
                if (sl.c_after - sl.c_before > 0.01 * sl.alpha * sl.r + noise)
                    fail(name + ": steering condition violated");
            }
        }
    }
    report(7, ok, ok ? "merit monotone, descent, slack, rho decay, step conditions"
                     : first_bad);
}

// -------- criterion 8: local contraction with exact curvature --------

void criterion8() {
    const auto& e = problems::get("tp3");
    SolverConfig cfg;
    cfg.hessian_mode = HessianMode::Exact;
    const auto rep = solve(e.problem, e.x0, cfg);
    std::vector<const InnerStepLog*> accepted;
    for (const auto& ol : rep.detail)
        for (const auto& st : ol.inner)
            if (st.accepted) accepted.push_back(&st);
    std::ostringstream os;
    bool ok = rep.status == SolveStatus::Converged && accepted.size() >= 3;
    double fitted = 0;
    if (ok) {
        const Vec xstar = vec2(0, 0);
        for (size_t i = accepted.size() - 3; i < accepted.size(); ++i) {
            const InnerStepLog& st = *accepted[i];
            const double before = (st.x - xstar).norm();
            const Vec x_after = st.x + st.alpha * st.d;
            const double after = (x_after - xstar).norm();
            if (before <= 0) continue;
            fitted = std::max(fitted, after / (before * before));
        }
        ok = fitted <= 10.0;
    }
    os << "tp3 exact hessian: " << accepted.size()
       << " accepted steps, fitted C=" << fitted;
    report(8, ok, os.str());
}

// -------- criterion 9: initial measure row --------

void criterion9(const std::map<std::string, SolveReport>& goldens) {
    const auto& r1 = goldens.at("tp1").records.at(0);
    const auto& r4 = goldens.at("tp4").records.at(0);
    std::ostringstream os;
    os << "tp1 row0=(" << r1.e_dual << "," << r1.e_compl << "," << r1.e_feas
       << ") tp4 row0=(" << r4.e_dual << "," << r4.e_compl << "," << r4.e_feas << ")";
    const bool ok = std::abs(r1.e_dual - 7.0) <= 1e-9 &&
                    std::abs(r1.e_compl) <= 1e-9 &&
                    std::abs(r1.e_feas - 8.0) <= 1e-9 &&
                    std::abs(r4.e_dual - 8.0) <= 1e-9 &&
                    std::abs(r4.e_compl - 15.0) <= 1e-9 &&
                    std::abs(r4.e_feas - 6.0) <= 1e-9;
    report(9, ok, os.str());
}

// -------- criterion 10: worked fixtures --------

void criterion10(const std::map<std::string, SolveReport>& goldens) {
    const auto& r1 = goldens.at("ex2_1");  // solved with rho0 = 0.1
    const auto& r3 = goldens.at("ex2_3");
    std::ostringstream os;
    os << "ex2_1: x=" << r1.final_x[0] << " " << to_string(r1.classification.kind)
       << "; ex2_3: x=(" << r3.final_x[0] << "," << r3.final_x[1] << ") f="
       << r3.final_f << " " << to_string(r3.classification.kind);
    const bool ok = std::abs(r1.final_x[0] - 1.0) <= 1e-8 &&
                    r1.classification.kind == StationarityKind::Kkt &&
                    dist_inf(r3.final_x, vec2(0.5, 0.5)) <= 1e-6 &&
                    std::abs(r3.final_f - 0.5) <= 1e-6 &&
                    r3.classification.kind == StationarityKind::DlStationary;
    report(10, ok, os.str());
}

}  // namespace

int main() {
    const auto goldens = run_goldens();
    criterion1(goldens.at("tp1"));
    criterion2(goldens.at("tp2"));
    criterion3(goldens.at("tp3"));
    criterion4(goldens.at("tp4"));
    criterion5(goldens.at("tp5"));
    criterion6();
    criterion7(goldens);
    criterion8();
    criterion9(goldens);
    criterion10(goldens);
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all 10 criteria passed\n");
    return 0;
}
