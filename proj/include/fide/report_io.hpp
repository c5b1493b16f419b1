#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "fide/analysis.hpp"
#include "fide/grid.hpp"
#include "fide/solver.hpp"

namespace fide {

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown output format '" + s + "' (expected csv or json)");
}

/// Scientific notation with 7 significant digits, table style.
inline std::string sci(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

/// Convergence table. CSV: header `N,h2,m,error`, one row per grid, a
/// trailing `# order=` comment. JSON mirrors the field names.
inline void emit_table(const ConvergenceStudy& study, OutputFormat format, std::ostream& os) {
    if (study.rows.empty()) throw std::invalid_argument("emit_table: empty study");
    if (format == OutputFormat::csv) {
        os << "N,h2,m,error\n";
        for (const StudyRow& row : study.rows)
            os << row.n << ',' << sci(row.h2) << ',' << row.m << ',' << sci(row.error) << '\n';
        os << "# order=" << (std::isnan(study.fitted_order) ? "n/a" : sci(study.fitted_order))
           << '\n';
    } else {
        nlohmann::json doc;
        doc["rows"] = nlohmann::json::array();
        for (const StudyRow& row : study.rows) {
            nlohmann::json r;
            r["N"] = row.n;
            r["h2"] = row.h2;
            r["m"] = row.m;
            r["error"] = row.error;
            doc["rows"].push_back(r);
        }
        if (std::isnan(study.fitted_order)) {
            doc["fitted_order"] = nullptr;
            doc["fit_residual"] = nullptr;
        } else {
            doc["fitted_order"] = study.fitted_order;
            doc["fit_residual"] = study.fit_residual;
        }
        os << doc.dump(2) << '\n';
    }
}

/// Two-column x,u plot data of the final approximate solution.
inline void emit_solution(const SolveReport& report, const Grid& grid, std::ostream& os) {
    if (static_cast<int>(report.u.size()) != grid.size())
        throw std::invalid_argument("emit_solution: report is not aligned with the grid");
    os << "x,u\n";
    for (int i = 0; i < grid.size(); ++i)
        os << sci(grid.node(i)) << ',' << sci(report.u[static_cast<std::size_t>(i)]) << '\n';
}

inline nlohmann::json report_to_json(const SolveReport& report) {
    nlohmann::json doc;
    doc["iterations"] = report.iterations;
    doc["stop_reason"] = to_string(report.stop_reason);
    doc["residual_history"] = report.residual_history;
    if (report.error_vs_exact)
        doc["error_vs_exact"] = *report.error_vs_exact;
    else
        doc["error_vs_exact"] = nullptr;
    doc["min_value"] = report.min_value;
    doc["max_value"] = report.max_value;
    doc["u"] = report.u;
    return doc;
}

inline void emit_report_csv(const SolveReport& report, std::ostream& os) {
    os << "key,value\n";
    os << "iterations," << report.iterations << '\n';
    os << "stop_reason," << to_string(report.stop_reason) << '\n';
    os << "error_vs_exact," << (report.error_vs_exact ? sci(*report.error_vs_exact) : "n/a")
       << '\n';
    os << "min_value," << sci(report.min_value) << '\n';
    os << "max_value," << sci(report.max_value) << '\n';
    for (std::size_t k = 0; k < report.residual_history.size(); ++k)
        os << "residual_" << (k + 1) << ',' << sci(report.residual_history[k]) << '\n';
}

inline nlohmann::json certificate_to_json(const ContractionCertificate& cert) {
    nlohmann::json doc;
    doc["big_m"] = cert.ball_radius;
    doc["l0"] = cert.l0;
    doc["l1"] = cert.l1;
    doc["l2"] = cert.l2;
    doc["l3"] = cert.l3;
    doc["k0"] = cert.k0;
    doc["k1"] = cert.k1;
    doc["m0"] = cert.m0;
    doc["q"] = cert.q;
    doc["contractive"] = cert.contractive;
    doc["domain_bound"] = cert.domain_bound;
    return doc;
}

inline void emit_certificate_csv(const ContractionCertificate& cert, std::ostream& os) {
    os << "key,value\n";
    os << "big_m," << sci(cert.ball_radius) << '\n';
    os << "l0," << sci(cert.l0) << '\n';
    os << "l1," << sci(cert.l1) << '\n';
    os << "l2," << sci(cert.l2) << '\n';
    os << "l3," << sci(cert.l3) << '\n';
    os << "k0," << sci(cert.k0) << '\n';
    os << "k1," << sci(cert.k1) << '\n';
    os << "m0," << sci(cert.m0) << '\n';
    os << "q," << sci(cert.q) << '\n';
    os << "contractive," << (cert.contractive ? "true" : "false") << '\n';
    os << "domain_bound," << sci(cert.domain_bound) << '\n';
}

}  // namespace fide
