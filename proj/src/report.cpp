#include "epsqp/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace epsqp {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::MaxIterations: return "iteration limit";
        case SolveStatus::LineSearchFailure: return "line search failure";
        case SolveStatus::EvaluationFailure: return "evaluation failure";
        default: return "unknown";
    }
}

namespace {

bool is_integral(double v) {
    return std::isfinite(v) && std::abs(v) < 1e15 && v == std::floor(v);
}

std::string fmt_value(double v) {
    char buf[48];
    if (is_integral(v)) {
        std::snprintf(buf, sizeof buf, "%.0f", v);
    } else if (std::abs(v) >= 1e-3) {
        std::snprintf(buf, sizeof buf, "%.4f", v);
    } else {
        std::snprintf(buf, sizeof buf, "%.4e", v);
    }
    return buf;
}

std::string fmt_rho(double v) {
    char buf[48];
    if (is_integral(v)) {
        std::snprintf(buf, sizeof buf, "%.1f", v);
    } else if (std::abs(v) >= 1e-3) {
        std::snprintf(buf, sizeof buf, "%.4f", v);
    } else {
        std::snprintf(buf, sizeof buf, "%.4e", v);
    }
    return buf;
}

void pad(std::ostringstream& os, const std::string& s, int width) {
    for (int i = static_cast<int>(s.size()); i < width; ++i) os << ' ';
    os << s << "  ";
}

}  // namespace

std::string render_table(const SolveReport& report) {
    static const int W[9] = {3, 12, 12, 12, 12, 7, 12, 6, 6};
    static const char* H[9] = {"k",      "f_k",    "E_dual", "E_compl", "E_feas",
                               "iter-sb", "rho_k", "numf_k", "numg_k"};
    std::ostringstream os;
    for (int c = 0; c < 9; ++c) pad(os, H[c], W[c]);
    os << '\n';
    for (const OuterRecord& rec : report.records) {
        pad(os, std::to_string(rec.k), W[0]);
        pad(os, fmt_value(rec.f), W[1]);
        pad(os, fmt_value(rec.e_dual), W[2]);
        pad(os, fmt_value(rec.e_compl), W[3]);
        pad(os, fmt_value(rec.e_feas), W[4]);
        pad(os, rec.iter_sb < 0 ? std::string("-") : std::to_string(rec.iter_sb), W[5]);
        pad(os, fmt_rho(rec.rho), W[6]);
        pad(os, std::to_string(rec.numf), W[7]);
        pad(os, std::to_string(rec.numg), W[8]);
        os << '\n';
    }
    os << report.total_inner << " inner iterations\n";
    os << "status: " << to_string(report.status)
       << ", point: " << to_string(report.classification.kind) << '\n';
    return os.str();
}

std::string export_csv(const SolveReport& report) {
    std::ostringstream os;
    os << "k,f,e_dual,e_compl,e_feas,iter_sb,rho,numf,numg\n";
    char buf[48];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    for (const OuterRecord& rec : report.records) {
        os << rec.k << ',' << num(rec.f) << ',' << num(rec.e_dual) << ','
           << num(rec.e_compl) << ',' << num(rec.e_feas) << ',';
        if (rec.iter_sb >= 0) os << rec.iter_sb;
        os << ',' << num(rec.rho) << ',' << rec.numf << ',' << rec.numg << '\n';
    }
    return os.str();
}

std::string export_json(const SolveReport& report) {
    nlohmann::json doc;
    doc["status"] = to_string(report.status);
    doc["classification"] = {
        {"kind", to_string(report.classification.kind)},
        {"rho_final", report.classification.rho_final},
        {"feasible", report.classification.feasible},
    };
    doc["total_inner"] = report.total_inner;
    doc["final_f"] = report.final_f;
    doc["final_rho"] = report.final_rho;
    doc["wall_time_sec"] = report.wall_time_sec;
    doc["final_x"] = std::vector<double>(report.final_x.data(),
                                         report.final_x.data() + report.final_x.size());
    doc["final_mu"] = std::vector<double>(report.final_mu.data(),
                                          report.final_mu.data() + report.final_mu.size());
    doc["final_lambda"] =
        std::vector<double>(report.final_lambda.data(),
                            report.final_lambda.data() + report.final_lambda.size());
    doc["records"] = nlohmann::json::array();
    for (const OuterRecord& rec : report.records) {
        doc["records"].push_back({
            {"k", rec.k},
            {"f", rec.f},
            {"e_dual", rec.e_dual},
            {"e_compl", rec.e_compl},
            {"e_feas", rec.e_feas},
            {"iter_sb", rec.iter_sb},
            {"rho", rec.rho},
            {"numf", rec.numf},
            {"numg", rec.numg},
        });
    }
    return doc.dump(2);
}

}  // namespace epsqp
