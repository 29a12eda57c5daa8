#pragma once

#include <string>
#include <vector>

#include "epsqp/nlp_problem.hpp"
#include "epsqp/types.hpp"

namespace epsqp {

/// One term of a scalar expression: either a monomial
/// coeff * prod_i x_i^powers[i], or an exponential scale * e^{x_exp_of}.
struct ExprTerm {
    bool is_exp = false;
    double coeff = 0;
    std::vector<int> powers;  // length n, entries >= 0
    int exp_of = -1;
    double scale = 0;
};

/// Sum of terms with exact analytic derivatives.
struct Expression {
    std::vector<ExprTerm> terms;

    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;
    Mat hessian(const Vec& x) const;
};

struct PolyProblem {
    std::string name;
    int n = 0;
    Expression objective;
    std::vector<Expression> equalities;
    std::vector<Expression> inequalities;
};

/// Parse the JSON problem document:
///   { "name": str, "n": int, "objective": [term],
///     "equalities": [[term]], "inequalities": [[term]] }
/// term = { "coeff": float, "powers": [int; n] }
///      | { "exp_of": int, "scale": float }
/// Throws ParseError with the offending location on schema violations,
/// out-of-range variable indices and non-finite coefficients.
PolyProblem parse_problem(const std::string& json_text);

std::string to_json(const PolyProblem& p);

/// Wrap a PolyProblem into evaluation callbacks (with exact Hessians).
NlpProblem make_problem(const PolyProblem& p);

/// parse_problem + make_problem; rejects problems without constraints.
NlpProblem load_polynomial_problem(const std::string& document);

}  // namespace epsqp
