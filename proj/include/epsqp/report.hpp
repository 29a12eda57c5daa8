#pragma once

#include <string>
#include <vector>

#include "epsqp/stationarity.hpp"
#include "epsqp/types.hpp"

namespace epsqp {

/// One output-table row per outer iteration. Row k >= 1 shows the point
/// returned by the k-th inner loop together with the measures computed
/// with the parameter that loop used; the rho column holds the value
/// after the Step-2 update. iter_sb is -1 ("-") for the initial row.
struct OuterRecord {
    int k = 0;
    double f = 0;
    double e_dual = 0;
    double e_compl = 0;
    double e_feas = 0;
    int iter_sb = -1;
    double rho = 0;
    long numf = 0;
    long numg = 0;
};

enum class SolveStatus {
    Converged,
    MaxIterations,
    LineSearchFailure,
    EvaluationFailure,
};

const char* to_string(SolveStatus s);

/// Per-step log kept for diagnostics and invariant checks.
struct InnerStepLog {
    Vec x;          // point the QP was solved at
    Vec d;
    double r = 0;
    double dir_deriv = 0;
    double dtBd = 0;
    double alpha = 0;
    double merit_before = 0;
    double merit_after = 0;
    bool accepted = false;  // false for the loop-exit QP (no step taken)
};

struct SteeringLog {
    double d_norm_inf = 0;
    double r = 0;
    double alpha = 0;
    double c_before = 0;
    double c_after = 0;
    bool steered = false;
};

struct OuterLog {
    double rho_used = 0;
    double rho_after = 0;
    std::vector<InnerStepLog> inner;
    SteeringLog steering;
};

struct SolveReport {
    std::vector<OuterRecord> records;
    SolveStatus status = SolveStatus::MaxIterations;
    Classification classification;
    long total_inner = 0;
    Vec final_x;
    Vec final_mu;
    Vec final_lambda;
    double final_f = 0;
    double final_rho = 0;
    double wall_time_sec = 0;
    std::vector<OuterLog> detail;
};

/// Fixed-width text table; caption line reports the total inner
/// iteration count.
std::string render_table(const SolveReport& report);

/// One header row plus one row per record, 12 significant digits,
/// locale-independent.
std::string export_csv(const SolveReport& report);

/// Full-precision JSON document of the whole report.
std::string export_json(const SolveReport& report);

}  // namespace epsqp
