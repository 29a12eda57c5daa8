#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epsqp/nlp_problem.hpp"
#include "epsqp/polynomial.hpp"
#include "epsqp/stationarity.hpp"
#include "epsqp/types.hpp"

namespace epsqp::problems {

/// Built-in benchmark problem with its reference data.
struct ReferenceEntry {
    PolyProblem poly;
    NlpProblem problem;
    std::string description;
    Vec x0;
    std::optional<double> rho0_override;
    std::optional<Vec> x_star;
    std::optional<double> f_star;
    // max{||h||_inf, ||max{0,-g}||_inf} at the reference terminating point
    std::optional<double> e_feas_star;
    StationarityKind expected_class = StationarityKind::Unclassified;
    std::optional<int> reference_iterations;  // total inner iterations
};

/// Names: tp1..tp5, ex2_1, ex2_2, ex2_3. Throws std::out_of_range with
/// the valid-name list for unknown names.
const ReferenceEntry& get(const std::string& name);

std::vector<std::pair<std::string, std::string>> list();

/// JSON document (load_polynomial_problem format) for a registry entry.
std::string to_document(const std::string& name);

}  // namespace epsqp::problems
