#include <cmath>
#include <random>

#include <doctest.h>

#include "epsqp/merit.hpp"
#include "epsqp/qp.hpp"

using namespace epsqp;
using namespace epsqp::qp;

namespace {

Vec vec(std::initializer_list<double> v) {
    Vec x(static_cast<int>(v.size()));
    int i = 0;
    for (double c : v) x[i++] = c;
    return x;
}

void check_multiplier_boxes(const QpSolution& sol) {
    for (int i = 0; i < sol.u.size(); ++i) {
        CHECK(sol.u[i] >= 0.0);
        CHECK(sol.u[i] <= 1.0);
        CHECK(sol.v[i] >= 0.0);
        CHECK(sol.v[i] <= 1.0);
        CHECK(sol.u[i] + sol.v[i] == doctest::Approx(1.0).epsilon(1e-14));
    }
    for (int i = 0; i < sol.s.size(); ++i) {
        CHECK(sol.s[i] >= 0.0);
        CHECK(sol.s[i] <= 1.0);
        CHECK(sol.t[i] >= 0.0);
        CHECK(sol.t[i] <= 1.0);
        CHECK(sol.s[i] + sol.t[i] == doctest::Approx(1.0).epsilon(1e-14));
    }
}

// stationarity of the model reduced to d:
// linear + B d = Jh (v - u) + Jg s
void check_kkt(const QpInstance& inst, const QpSolution& sol, double tol = 1e-8) {
    Vec res = inst.linear + inst.B * sol.d;
    if (inst.h.size() > 0) res -= inst.jac_h * (sol.v - sol.u);
    if (inst.g.size() > 0) res -= inst.jac_g * sol.s;
    CHECK(res.cwiseAbs().maxCoeff() < tol);
}

QpInstance random_instance(std::mt19937& rng, int n, int mE, int mI) {
    std::normal_distribution<double> normal(0.0, 1.0);
    QpInstance inst;
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
    return inst;
}

}  // namespace

TEST_CASE("two inconsistent half-planes, quadratic objective") {
    // min x1^2+x2^2, constraints x1+x2 >= 1 and x1+x2 <= 2, model at (2,2)
    QpInstance inst;
    inst.linear = vec({4, 4});
    inst.B = Mat::Identity(2, 2);
    inst.h = Vec(0);
    inst.jac_h = Mat(2, 0);
    inst.g = vec({-3, 2});
    inst.jac_g = Mat(2, 2);
    inst.jac_g << -1, 1, -1, 1;

    QpSolver solver;
    const auto sol = solver.solve(inst);
    CHECK(sol.d[0] == doctest::Approx(-3.0).epsilon(1e-9));
    CHECK(sol.d[1] == doctest::Approx(-3.0).epsilon(1e-9));
    CHECK(model_value(inst, sol.d) == doctest::Approx(-11.0).epsilon(1e-9));
    CHECK(sol.r == doctest::Approx(1.0).epsilon(1e-9));
    check_multiplier_boxes(sol);
    check_kkt(inst, sol);
}

TEST_CASE("scalar instance with two inequality kinks") {
    // model of tp4 at x = -4, rho = 1, B = I:
    // min d + d^2/2 + max{0, -(15 - 8d)} + max{0, -(-6 + d)}
    QpInstance inst;
    inst.linear = vec({1});
    inst.B = Mat::Identity(1, 1);
    inst.h = Vec(0);
    inst.jac_h = Mat(1, 0);
    inst.g = vec({15, -6});
    inst.jac_g = Mat(1, 2);
    inst.jac_g << -8, 1;

    QpSolver solver;
    const auto sol = solver.solve(inst);
    // verify against a dense scan instead of hand algebra
    double best = 0, best_val = model_value(inst, Vec::Zero(1));
    for (double d = -2; d <= 4; d += 1e-4) {
        const double val = model_value(inst, Vec::Constant(1, d));
        if (val < best_val) {
            best_val = val;
            best = d;
        }
    }
    CHECK(sol.d[0] == doctest::Approx(best).epsilon(1e-3));
    CHECK(model_value(inst, sol.d) <= best_val + 1e-9);
    check_multiplier_boxes(sol);
    check_kkt(inst, sol);
}

TEST_CASE("steering step minimizes violation, not the objective") {
    // tp4 at x = -4 again: pure violation model pulls toward d = 1
    QpSolver solver;
    Mat jg(1, 2);
    jg << -8, 1;
    const auto sol = solver.solve_steering(Mat::Identity(1, 1), Vec(0), Mat(1, 0),
                                           vec({15, -6}), jg);
    CHECK(sol.d[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.r == doctest::Approx(-1.0).epsilon(1e-9));
    check_multiplier_boxes(sol);
}

TEST_CASE("steering returns zero at a violation-stationary point") {
    // tp4 at x = -1: g = (0, -3); moving right starts violating g1, the
    // violation kinks balance and d = 0 is optimal
    QpSolver solver;
    Mat jg(1, 2);
    jg << -2, 1;
    const auto sol = solver.solve_steering(Mat::Identity(1, 1), Vec(0), Mat(1, 0),
                                           vec({0, -3}), jg);
    CHECK(std::abs(sol.d[0]) < 1e-9);
    CHECK(std::abs(sol.r) < 1e-9);
}

TEST_CASE("zero violation gives a zero steering step") {
    QpSolver solver;
    Mat jg(2, 1);
    jg << 1, 1;
    const auto sol = solver.solve_steering(Mat::Identity(2, 2), Vec(0), Mat(2, 0),
                                           vec({0.5}), jg);
    CHECK(sol.d.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(sol.r == doctest::Approx(0.0));
}

TEST_CASE("equality instance drives the residual to zero when possible") {
    QpInstance inst;
    inst.linear = vec({0.2, -0.1});
    inst.B = Mat::Identity(2, 2);
    inst.h = vec({0.5, -0.5});
    inst.jac_h = Mat(2, 2);
    inst.jac_h << 1, 0, 0, 1;
    inst.g = Vec(0);
    inst.jac_g = Mat(2, 0);

    QpSolver solver;
    const auto sol = solver.solve(inst);
    // both equalities can be linearly satisfied with a modest step
    CHECK((inst.h + inst.jac_h.transpose() * sol.d).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(sol.r == doctest::Approx(-1.0).epsilon(1e-9));
    check_multiplier_boxes(sol);
    check_kkt(inst, sol);
}

TEST_CASE("indefinite B is rejected") {
    QpInstance inst;
    inst.linear = vec({1, 1});
    inst.B = Mat::Identity(2, 2);
    inst.B(1, 1) = -1.0;
    inst.h = Vec(0);
    inst.jac_h = Mat(2, 0);
    inst.g = vec({-1});
    inst.jac_g = Mat(2, 1);
    inst.jac_g << 1, 1;
    QpSolver solver;
    CHECK_THROWS_AS(solver.solve(inst), QpMatrixError);
}

TEST_CASE("r equals the linearized violation change") {
    std::mt19937 rng(11);
    QpSolver solver;
    for (int trial = 0; trial < 30; ++trial) {
        const auto inst = random_instance(rng, 3, 1, 2);
        const auto sol = solver.solve(inst);
        const double c0 = violation(inst.h, inst.g);
        const double c1 =
            linearized_violation(inst.h, inst.g, inst.jac_h, inst.jac_g, sol.d);
        CHECK(sol.r == doctest::Approx(c1 - c0).epsilon(1e-9));
        CHECK(sol.y_plus.sum() + sol.z_plus.sum() == doctest::Approx(c1).epsilon(1e-9));
    }
}

TEST_CASE("random sweep against the brute-force reference") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> dim(1, 4), con(0, 3);
    QpSolver solver;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = dim(rng);
        int mE = con(rng), mI = con(rng);
        if (mE + mI == 0) mI = 1;
        const auto inst = random_instance(rng, n, mE, mI);
        CAPTURE(trial);
        const auto sol = solver.solve(inst);
        const auto ref = oracle_solve(inst);
        CHECK(std::abs(model_value(inst, sol.d) - model_value(inst, ref.d)) < 1e-6);
        CHECK((sol.d - ref.d).cwiseAbs().maxCoeff() < 1e-4);
        check_multiplier_boxes(sol);
        check_kkt(inst, sol);
        // complementarity of the slack QP rows
        const Vec h_lin = inst.h + inst.jac_h.transpose() * sol.d;
        const Vec g_lin = inst.g + inst.jac_g.transpose() * sol.d;
        for (int i = 0; i < mE; ++i) {
            // y+ = |h_lin| always holds at optimality
            CHECK(sol.y_plus[i] == doctest::Approx(std::abs(h_lin[i])).epsilon(1e-8));
        }
        for (int i = 0; i < mI; ++i) {
            CHECK(sol.z_plus[i] ==
                  doctest::Approx(std::max(0.0, -g_lin[i])).epsilon(1e-8));
        }
    }
}

TEST_CASE("oracle budget guard") {
    std::mt19937 rng(3);
    // 3^12 patterns exceeds the enumeration budget
    const auto inst = random_instance(rng, 4, 6, 6);
    CHECK_THROWS(oracle_solve(inst));
}
