#include "epsqp/polynomial.hpp"

#include <cmath>

#include <json.hpp>

namespace epsqp {

using nlohmann::json;

double Expression::value(const Vec& x) const {
    double sum = 0;
    for (const ExprTerm& t : terms) {
        if (t.is_exp) {
            sum += t.scale * std::exp(x[t.exp_of]);
        } else {
            double m = t.coeff;
            for (int i = 0; i < static_cast<int>(t.powers.size()); ++i) {
                for (int p = 0; p < t.powers[i]; ++p) m *= x[i];
            }
            sum += m;
        }
    }
    return sum;
}

Vec Expression::gradient(const Vec& x) const {
    Vec grad = Vec::Zero(x.size());
    for (const ExprTerm& t : terms) {
        if (t.is_exp) {
            grad[t.exp_of] += t.scale * std::exp(x[t.exp_of]);
            continue;
        }
        for (int j = 0; j < static_cast<int>(t.powers.size()); ++j) {
            if (t.powers[j] == 0) continue;
            double m = t.coeff * t.powers[j];
            for (int i = 0; i < static_cast<int>(t.powers.size()); ++i) {
                const int p = (i == j) ? t.powers[i] - 1 : t.powers[i];
                for (int q = 0; q < p; ++q) m *= x[i];
            }
            grad[j] += m;
        }
    }
    return grad;
}

Mat Expression::hessian(const Vec& x) const {
    const int n = static_cast<int>(x.size());
    Mat H = Mat::Zero(n, n);
    for (const ExprTerm& t : terms) {
        if (t.is_exp) {
            H(t.exp_of, t.exp_of) += t.scale * std::exp(x[t.exp_of]);
            continue;
        }
        for (int j = 0; j < n; ++j) {
            for (int k = j; k < n; ++k) {
                double factor;
                if (j == k) {
                    if (t.powers[j] < 2) continue;
                    factor = static_cast<double>(t.powers[j]) * (t.powers[j] - 1);
                } else {
                    if (t.powers[j] < 1 || t.powers[k] < 1) continue;
                    factor = static_cast<double>(t.powers[j]) * t.powers[k];
                }
                double m = t.coeff * factor;
                for (int i = 0; i < n; ++i) {
                    int p = t.powers[i];
                    if (i == j) --p;
                    if (i == k) --p;
                    for (int q = 0; q < p; ++q) m *= x[i];
                }
                H(j, k) += m;
                if (j != k) H(k, j) += m;
            }
        }
    }
    return H;
}

namespace {

ExprTerm parse_term(const json& jt, int n, const std::string& where) {
    if (!jt.is_object()) throw ParseError(where + ": term must be an object");
    ExprTerm t;
    if (jt.contains("exp_of")) {
        t.is_exp = true;
        if (!jt["exp_of"].is_number_integer()) {
            throw ParseError(where + ": exp_of must be an integer");
        }
        t.exp_of = jt["exp_of"].get<int>();
        if (t.exp_of < 0 || t.exp_of >= n) {
            throw ParseError(where + ": exp_of index " + std::to_string(t.exp_of) +
                             " out of range [0," + std::to_string(n) + ")");
        }
        if (!jt.contains("scale") || !jt["scale"].is_number()) {
            throw ParseError(where + ": exp term requires a numeric scale");
        }
        t.scale = jt["scale"].get<double>();
        if (!std::isfinite(t.scale)) throw ParseError(where + ": non-finite scale");
        return t;
    }
    if (!jt.contains("coeff") || !jt["coeff"].is_number()) {
        throw ParseError(where + ": monomial requires a numeric coeff");
    }
    t.coeff = jt["coeff"].get<double>();
    if (!std::isfinite(t.coeff)) throw ParseError(where + ": non-finite coeff");
    if (!jt.contains("powers") || !jt["powers"].is_array() ||
        static_cast<int>(jt["powers"].size()) != n) {
        throw ParseError(where + ": powers must be an array of length n");
    }
    t.powers.resize(n);
    for (int i = 0; i < n; ++i) {
        if (!jt["powers"][i].is_number_integer() || jt["powers"][i].get<int>() < 0) {
            throw ParseError(where + ": powers[" + std::to_string(i) +
                             "] must be a non-negative integer");
        }
        t.powers[i] = jt["powers"][i].get<int>();
    }
    return t;
}

Expression parse_expression(const json& ja, int n, const std::string& where) {
    if (!ja.is_array()) throw ParseError(where + ": expected an array of terms");
    Expression e;
    for (size_t i = 0; i < ja.size(); ++i) {
        e.terms.push_back(parse_term(ja[i], n, where + "[" + std::to_string(i) + "]"));
    }
    return e;
}

json term_to_json(const ExprTerm& t) {
    json jt;
    if (t.is_exp) {
        jt["exp_of"] = t.exp_of;
        jt["scale"] = t.scale;
    } else {
        jt["coeff"] = t.coeff;
        jt["powers"] = t.powers;
    }
    return jt;
}

}  // namespace

PolyProblem parse_problem(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("document root must be an object");
    PolyProblem p;
    p.name = doc.value("name", std::string("unnamed"));
    if (!doc.contains("n") || !doc["n"].is_number_integer() || doc["n"].get<int>() <= 0) {
        throw ParseError("n: must be a positive integer");
    }
    p.n = doc["n"].get<int>();
    if (!doc.contains("objective")) throw ParseError("objective: missing");
    p.objective = parse_expression(doc["objective"], p.n, "objective");

    auto parse_list = [&](const char* key, std::vector<Expression>& out) {
        if (!doc.contains(key)) return;
        if (!doc[key].is_array()) throw ParseError(std::string(key) + ": expected an array");
        for (size_t i = 0; i < doc[key].size(); ++i) {
            out.push_back(parse_expression(doc[key][i], p.n,
                                           std::string(key) + "[" + std::to_string(i) + "]"));
        }
    };
    parse_list("equalities", p.equalities);
    parse_list("inequalities", p.inequalities);
    return p;
}

std::string to_json(const PolyProblem& p) {
    json doc;
    doc["name"] = p.name;
    doc["n"] = p.n;
    doc["objective"] = json::array();
    for (const auto& t : p.objective.terms) doc["objective"].push_back(term_to_json(t));
    doc["equalities"] = json::array();
    for (const auto& e : p.equalities) {
        json je = json::array();
        for (const auto& t : e.terms) je.push_back(term_to_json(t));
        doc["equalities"].push_back(je);
    }
    doc["inequalities"] = json::array();
    for (const auto& e : p.inequalities) {
        json je = json::array();
        for (const auto& t : e.terms) je.push_back(term_to_json(t));
        doc["inequalities"].push_back(je);
    }
    return doc.dump(2);
}

NlpProblem make_problem(const PolyProblem& p) {
    auto poly = std::make_shared<PolyProblem>(p);
    NlpProblem prob;
    prob.name = poly->name;
    prob.n = poly->n;
    prob.num_eq = static_cast<int>(poly->equalities.size());
    prob.num_ineq = static_cast<int>(poly->inequalities.size());

    prob.f = [poly](const Vec& x) { return poly->objective.value(x); };
    prob.grad_f = [poly](const Vec& x) { return poly->objective.gradient(x); };
    prob.h = [poly](const Vec& x) {
        Vec out(poly->equalities.size());
        for (size_t i = 0; i < poly->equalities.size(); ++i) out[i] = poly->equalities[i].value(x);
        return out;
    };
    prob.jac_h = [poly](const Vec& x) {
        Mat out(poly->n, poly->equalities.size());
        for (size_t i = 0; i < poly->equalities.size(); ++i) {
            out.col(i) = poly->equalities[i].gradient(x);
        }
        return out;
    };
    prob.g = [poly](const Vec& x) {
        Vec out(poly->inequalities.size());
        for (size_t i = 0; i < poly->inequalities.size(); ++i) {
            out[i] = poly->inequalities[i].value(x);
        }
        return out;
    };
    prob.jac_g = [poly](const Vec& x) {
        Mat out(poly->n, poly->inequalities.size());
        for (size_t i = 0; i < poly->inequalities.size(); ++i) {
            out.col(i) = poly->inequalities[i].gradient(x);
        }
        return out;
    };
    prob.hess_f = [poly](const Vec& x) { return poly->objective.hessian(x); };
    prob.hess_h = [poly](const Vec& x, int i) { return poly->equalities[i].hessian(x); };
    prob.hess_g = [poly](const Vec& x, int i) { return poly->inequalities[i].hessian(x); };
    return prob;
}

NlpProblem load_polynomial_problem(const std::string& document) {
    PolyProblem p = parse_problem(document);
    if (p.equalities.empty() && p.inequalities.empty()) {
        throw ParseError("problem must have at least one constraint");
    }
    return make_problem(p);
}

}  // namespace epsqp
