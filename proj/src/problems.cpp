#include "epsqp/problems.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace epsqp::problems {

namespace {

ExprTerm mono(double coeff, std::vector<int> powers) {
    ExprTerm t;
    t.coeff = coeff;
    t.powers = std::move(powers);
    return t;
}

ExprTerm expterm(double scale, int of) {
    ExprTerm t;
    t.is_exp = true;
    t.scale = scale;
    t.exp_of = of;
    return t;
}

Vec vec(std::initializer_list<double> v) {
    Vec x(static_cast<int>(v.size()));
    int i = 0;
    for (double c : v) x[i++] = c;
    return x;
}

ReferenceEntry make(PolyProblem poly, std::string desc, Vec x0) {
    ReferenceEntry e;
    e.problem = make_problem(poly);
    e.poly = std::move(poly);
    e.description = std::move(desc);
    e.x0 = std::move(x0);
    return e;
}

std::map<std::string, ReferenceEntry> build_registry() {
    std::map<std::string, ReferenceEntry> reg;

    {
        PolyProblem p;
        p.name = "tp1";
        p.n = 2;
        p.objective.terms = {mono(1, {1, 0}), mono(1, {0, 1})};
        p.inequalities = {
            {{mono(1, {0, 1}), mono(-1, {2, 0}), mono(-1, {0, 0})}},
            {{mono(0.3, {0, 0}), expterm(-0.3, 1)}},
        };
        ReferenceEntry e = make(std::move(p),
                                "infeasible 2-d problem with two inequality "
                                "constraints; the limit minimizes the l1 violation",
                                vec({3, 2}));
        e.x_star = vec({0, 1});
        e.f_star = 1.0;
        e.e_feas_star = 0.3 * (std::exp(1.0) - 1.0);
        e.expected_class = StationarityKind::DzStationary;
        e.reference_iterations = 13;
        reg.emplace("tp1", std::move(e));
    }
    {
        PolyProblem p;
        p.name = "tp2";
        p.n = 2;
        p.objective.terms = {mono(1, {1, 0}), mono(1, {0, 1})};
        p.inequalities = {
            {{mono(-1, {2, 0}), mono(1, {0, 1}), mono(-1, {0, 0})}},
            {{mono(-1, {2, 0}), mono(-1, {0, 1}), mono(-1, {0, 0})}},
            {{mono(1, {1, 0}), mono(-1, {0, 2}), mono(-1, {0, 0})}},
            {{mono(-1, {1, 0}), mono(-1, {0, 2}), mono(-1, {0, 0})}},
        };
        ReferenceEntry e = make(std::move(p),
                                "infeasible 2-d problem with four parabolic "
                                "inequality constraints",
                                vec({3, 2}));
        e.x_star = vec({0, 0});
        e.f_star = 0.0;
        e.e_feas_star = 1.0;
        e.expected_class = StationarityKind::DzStationary;
        e.reference_iterations = 15;
        reg.emplace("tp2", std::move(e));
    }
    {
        PolyProblem p;
        p.name = "tp3";
        p.n = 2;
        p.objective.terms = {mono(1, {1, 0})};
        p.inequalities = {
            {{mono(-0.5, {1, 0}), mono(-0.5, {0, 2}), mono(-0.5, {0, 0})}},
            {{mono(1, {1, 0}), mono(-1, {0, 2})}},
            {{mono(-1, {1, 0}), mono(1, {0, 2})}},
        };
        ReferenceEntry e = make(std::move(p),
                                "infeasible 2-d problem whose limit keeps the "
                                "penalty parameter bounded away from zero",
                                vec({-20, 10}));
        e.x_star = vec({0, 0});
        e.f_star = 0.0;
        e.e_feas_star = 0.5;
        e.expected_class = StationarityKind::DlStationary;
        e.reference_iterations = 12;
        reg.emplace("tp3", std::move(e));
    }
    {
        PolyProblem p;
        p.name = "tp4";
        p.n = 1;
        p.objective.terms = {mono(1, {1})};
        p.inequalities = {
            {{mono(1, {2}), mono(-1, {0})}},
            {{mono(1, {1}), mono(-2, {0})}},
        };
        ReferenceEntry e = make(std::move(p),
                                "1-d feasible problem where the iteration stalls "
                                "at an infeasible stationary point of the violation",
                                vec({-4}));
        e.x_star = vec({-1});
        e.f_star = -1.0;
        e.e_feas_star = 3.0;
        e.expected_class = StationarityKind::DlStationary;
        e.reference_iterations = 7;
        reg.emplace("tp4", std::move(e));
    }
    {
        PolyProblem p;
        p.name = "tp5";
        p.n = 2;
        p.objective.terms = {mono(1, {2, 0}), mono(-4, {1, 0}), mono(4, {0, 0}),
                             mono(1, {0, 2})};
        p.inequalities = {
            {{mono(1, {0, 0}), mono(-3, {1, 0}), mono(3, {2, 0}), mono(-1, {3, 0}),
              mono(-1, {0, 1})}},
            {{mono(1, {1, 0})}},
            {{mono(1, {0, 1})}},
        };
        ReferenceEntry e = make(std::move(p),
                                "feasible 2-d problem whose solution violates MFCQ; "
                                "the penalty parameter is driven to zero",
                                vec({-2, -2}));
        e.rho0_override = 1000.0;
        e.x_star = vec({1, 0});
        e.f_star = 1.0;
        e.e_feas_star = 0.0;
        e.expected_class = StationarityKind::SingularStationary;
        e.reference_iterations = 51;
        reg.emplace("tp5", std::move(e));
    }
    {
        PolyProblem p;
        p.name = "ex2_1";
        p.n = 1;
        p.objective.terms = {mono(1, {2}), mono(4, {1})};
        p.equalities = {{{mono(1, {1}), mono(-1, {0})}}};
        ReferenceEntry e = make(std::move(p),
                                "1-d equality-constrained problem; penalty "
                                "minimizers coincide with the solution for small "
                                "parameters",
                                vec({0}));
        e.rho0_override = 0.1;
        e.x_star = vec({1});
        e.f_star = 5.0;
        e.e_feas_star = 0.0;
        e.expected_class = StationarityKind::Kkt;
        reg.emplace("ex2_1", std::move(e));
    }
    {
        PolyProblem p;
        p.name = "ex2_2";
        p.n = 1;
        p.objective.terms = {mono(1, {2}), mono(4, {1})};
        p.equalities = {
            {{mono(1, {1}), mono(-1, {0})}},
            {{mono(1, {1}), mono(1, {0})}},
        };
        ReferenceEntry e = make(std::move(p),
                                "1-d problem with two contradictory equality "
                                "constraints; both kinks are violation-stationary",
                                vec({-3}));
        e.x_star = vec({-1});
        e.f_star = -3.0;
        e.e_feas_star = 2.0;
        e.expected_class = StationarityKind::DlStationary;
        reg.emplace("ex2_2", std::move(e));
    }
    {
        PolyProblem p;
        p.name = "ex2_3";
        p.n = 2;
        p.objective.terms = {mono(1, {2, 0}), mono(1, {0, 2})};
        p.inequalities = {
            {{mono(-1, {1, 0}), mono(-1, {0, 1}), mono(1, {0, 0})}},
            {{mono(1, {1, 0}), mono(1, {0, 1}), mono(-2, {0, 0})}},
        };
        ReferenceEntry e = make(std::move(p),
                                "2-d problem with two inconsistent half-plane "
                                "constraints",
                                vec({0, 0}));
        e.x_star = vec({0.5, 0.5});
        e.f_star = 0.5;
        e.e_feas_star = 1.0;
        e.expected_class = StationarityKind::DlStationary;
        reg.emplace("ex2_3", std::move(e));
    }
    return reg;
}

const std::map<std::string, ReferenceEntry>& registry() {
    static const std::map<std::string, ReferenceEntry> reg = build_registry();
    return reg;
}

}  // namespace

const ReferenceEntry& get(const std::string& name) {
    const auto& reg = registry();
    auto it = reg.find(name);
    if (it == reg.end()) {
        std::ostringstream os;
        os << "unknown problem '" << name << "'; valid names:";
        for (const auto& [k, v] : reg) os << ' ' << k;
        throw std::out_of_range(os.str());
    }
    return it->second;
}

std::vector<std::pair<std::string, std::string>> list() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [k, v] : registry()) out.emplace_back(k, v.description);
    return out;
}

std::string to_document(const std::string& name) { return to_json(get(name).poly); }

}  // namespace epsqp::problems
