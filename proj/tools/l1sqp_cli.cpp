#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "epsqp/merit.hpp"
#include "epsqp/polynomial.hpp"
#include "epsqp/problems.hpp"
#include "epsqp/qp.hpp"
#include "epsqp/report.hpp"
#include "epsqp/sqp.hpp"

namespace {

int exit_code(epsqp::SolveStatus s) {
    switch (s) {
        case epsqp::SolveStatus::Converged: return 0;
        case epsqp::SolveStatus::MaxIterations: return 2;
        default: return 3;
    }
}

void print_report(const epsqp::SolveReport& rep, const std::string& format) {
    if (format == "csv") {
        std::cout << epsqp::export_csv(rep);
        std::cerr << "# wall_time_sec " << rep.wall_time_sec << "\n";
    } else if (format == "json") {
        std::cout << epsqp::export_json(rep) << "\n";
    } else {
        std::cout << epsqp::render_table(rep);
    }
}

int run_gen_qp(unsigned seed, int count) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> dim(1, 4), con(0, 3);
    bool all_ok = true;
    std::cout << "idx,n,mE,mI,M_solve,M_oracle,M_diff,d_diff\n";
    for (int idx = 0; idx < count; ++idx) {
        const int n = dim(rng);
        int mE = con(rng), mI = con(rng);
        if (mE + mI == 0) mI = 1;
        epsqp::qp::QpInstance inst;
        epsqp::Mat A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = normal(rng);
        inst.B = A.transpose() * A + epsqp::Mat::Identity(n, n);
        inst.linear = epsqp::Vec(n);
        for (int i = 0; i < n; ++i) inst.linear[i] = normal(rng);
        inst.h = epsqp::Vec(mE);
        inst.jac_h = epsqp::Mat(n, mE);
        for (int i = 0; i < mE; ++i) {
            inst.h[i] = normal(rng);
            for (int j = 0; j < n; ++j) inst.jac_h(j, i) = normal(rng);
        }
        inst.g = epsqp::Vec(mI);
        inst.jac_g = epsqp::Mat(n, mI);
        for (int i = 0; i < mI; ++i) {
            inst.g[i] = normal(rng);
            for (int j = 0; j < n; ++j) inst.jac_g(j, i) = normal(rng);
        }
        epsqp::qp::QpSolver solver;
        const auto sol = solver.solve(inst);
        const auto ref = epsqp::qp::oracle_solve(inst);
        const double ms = epsqp::qp::model_value(inst, sol.d);
        const double mo = epsqp::qp::model_value(inst, ref.d);
        const double ddiff = (sol.d - ref.d).cwiseAbs().maxCoeff();
        if (std::abs(ms - mo) > 1e-6 || ddiff > 1e-4) all_ok = false;
        std::cout << idx << ',' << n << ',' << mE << ',' << mI << ',' << ms << ','
                  << mo << ',' << ms - mo << ',' << ddiff << "\n";
    }
    return all_ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"l1 exact-penalty SQP solver with stationarity classification"};
    app.footer(
        "Exit codes: 0 converged, 1 usage error, 2 iteration budget exhausted,\n"
        "3 numerical failure (line search, evaluation, or subproblem).");

    std::string problem_name, problem_file;
    std::string hessian = "bfgs", format = "table";
    epsqp::SolverConfig cfg;
    bool check_derivs = false, batch = false;
    unsigned seed = 0;
    int gen_count = 200;

    app.add_option("--problem", problem_name, "built-in problem name");
    app.add_option("--problem-file", problem_file, "JSON problem document path");
    auto* rho0_opt = app.add_option("--rho0", cfg.rho0, "initial penalty parameter");
    app.add_option("--sigma", cfg.sigma, "Armijo constant");
    app.add_option("--tau", cfg.tau, "backtracking factor");
    app.add_option("--eps", cfg.eps, "termination tolerance");
    app.add_option("--hessian", hessian, "identity|bfgs|exact")
        ->check(CLI::IsMember({"identity", "bfgs", "exact"}));
    app.add_option("--max-inner", cfg.max_inner, "inner iteration cap");
    app.add_option("--max-outer", cfg.max_outer, "outer iteration cap");
    app.add_option("--format", format, "table|csv|json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    app.add_flag("--check-derivatives", check_derivs,
                 "finite-difference derivative check at x0 instead of solving");
    app.add_flag("--batch", batch, "solve every built-in problem");
    app.add_option("--seed", seed, "RNG seed for gen-qp");

    auto* gen = app.add_subcommand("gen-qp",
                                   "random subproblem instances solved against the "
                                   "brute-force reference");
    gen->add_option("--count", gen_count, "number of instances");
    gen->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (gen->parsed()) return run_gen_qp(seed, gen_count);

    if (hessian == "identity") cfg.hessian_mode = epsqp::HessianMode::Identity;
    else if (hessian == "exact") cfg.hessian_mode = epsqp::HessianMode::Exact;

    try {
        if (batch) {
            int worst = 0;
            for (const auto& [name, desc] : epsqp::problems::list()) {
                const auto& entry = epsqp::problems::get(name);
                epsqp::SolverConfig c = cfg;
                if (!*rho0_opt && entry.rho0_override) c.rho0 = *entry.rho0_override;
                const auto rep = epsqp::solve(entry.problem, entry.x0, c);
                std::cout << "== " << name << " ==\n";
                print_report(rep, format);
                worst = std::max(worst, exit_code(rep.status));
            }
            return worst;
        }

        epsqp::NlpProblem problem;
        epsqp::Vec x0;
        if (!problem_name.empty()) {
            const auto& entry = epsqp::problems::get(problem_name);
            problem = entry.problem;
            x0 = entry.x0;
            if (!*rho0_opt && entry.rho0_override) cfg.rho0 = *entry.rho0_override;
        } else if (!problem_file.empty()) {
            std::ifstream in(problem_file);
            if (!in) {
                std::cerr << "cannot open " << problem_file << "\n";
                return 1;
            }
            std::stringstream ss;
            ss << in.rdbuf();
            problem = epsqp::load_polynomial_problem(ss.str());
            // optional "x0": [float; n] in the document; zero otherwise
            x0 = epsqp::Vec::Zero(problem.n);
            const auto doc = nlohmann::json::parse(ss.str());
            if (doc.contains("x0")) {
                if (!doc["x0"].is_array() ||
                    static_cast<int>(doc["x0"].size()) != problem.n) {
                    std::cerr << "x0 must be an array of length n\n";
                    return 1;
                }
                for (int i = 0; i < problem.n; ++i) x0[i] = doc["x0"][i].get<double>();
            }
        } else {
            std::cerr << "one of --problem, --problem-file, --batch is required\n";
            return 1;
        }

        if (check_derivs) {
            const auto rep = epsqp::check_derivatives(problem, x0);
            std::cout << "max relative error " << rep.max_err() << " (threshold "
                      << rep.threshold << ")\n";
            for (const auto& f : rep.flagged) std::cout << "suspect: " << f << "\n";
            return rep.flagged.empty() ? 0 : 3;
        }

        const auto rep = epsqp::solve(problem, x0, cfg);
        print_report(rep, format);
        return exit_code(rep.status);
    } catch (const std::out_of_range& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const epsqp::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
