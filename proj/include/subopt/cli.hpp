#pragma once

#include "subopt/catalog.hpp"
#include "subopt/relation.hpp"

#include "json.hpp"

namespace subopt {

struct OracleStats {
    int edges = 0, checked = 0, failed = 0;
    int trials = 0;
    std::vector<std::string> failures;
};

struct Report {
    const LieAlgebra* algebra = nullptr;
    const OptimalSystem* system = nullptr;
    SystemOptions options;
    int oracle_trials = 32;
    std::map<int, OracleStats> oracle;
    std::map<int, std::vector<std::string>> flagged;  // excluded shapes the reference prints anyway
    std::vector<std::string> warnings;
    double seconds = 0;
};

// oracle replay of every edge, fills report.oracle
void check_edges(Report& report);
// compares with the catalog fixture, fills warnings and flagged exclusions
void compare_with(Report& report, const CatalogEntry& entry);

// machine-readable, schema "subopt-report/1"; no timings, so byte-stable for a fixed seed
nlohmann::json report_json(const Report& report);
std::string report_text(const Report& report);

// dimension -> representatives (codes + g/l per coefficient) read back from report_json output
std::map<int, std::vector<ExpectedFamily>> parse_report(const std::string& json_text);

// vertices labelled by slex position; legend[i] renders vertex i
std::string export_dot(const RelationGraph& g, const std::vector<std::string>& legend, const std::string& title = "");
std::vector<std::string> legend_of(const RelationGraph& g);

// exit codes: 0 ok, 1 internal or oracle failure, 2 invalid input, 3 no closed-form exponential
int run_cli(int argc, char** argv);

}  // namespace subopt
