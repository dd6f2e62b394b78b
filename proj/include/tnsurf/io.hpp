#pragma once

#include <string>

#include <json.hpp>

#include "tnsurf/canonicalize.hpp"
#include "tnsurf/nielsen.hpp"
#include "tnsurf/shadowing.hpp"

namespace tnsurf {

using json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Graph documents.
//
// Top-level keys: "pieces", "annuli", "permutations", optional "census",
// optional "stage" ("raw" | "adjusted" | "condensed"). Adjusted documents add
// "interiors" and "collapses"; condensed documents add "identification_log"
// and "orbit_inventory". Rationals are "p/q" strings; permutations map
// decimal-string ids to ids.
// ---------------------------------------------------------------------------

struct Document {
    enum class Stage { Raw, Adjusted, Condensed } stage = Stage::Raw;
    ComponentGraph graph;
    // adjusted extras
    std::map<Id, AnnulusInterior> interiors;
    std::map<Id, CollapseRecord> collapses;
    std::vector<LogEvent> adjust_log;
    // condensed extras
    std::vector<LogEvent> identification_log;
    std::vector<OrbitRecord> orbit_inventory;

    AdjustedGraph to_adjusted() const;
    CondensedGraph to_condensed() const;
};

Document parse_document(const json& doc);
Document load_document(const std::string& path);   // ParseError / json exceptions

json graph_json(const ComponentGraph& g);
json adjusted_json(const AdjustedGraph& g);
json condensed_json(const CondensedGraph& g);

json validation_json(const ValidationReport& report);
std::string validation_text(const ValidationReport& report);

// External census file: {"piece-id": {"period": count, ...}, ...}
CensusOverride parse_census(const json& doc);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

json inventory_json(const Inventory& inv);
std::string inventory_text(const Inventory& inv);

json classes_json(const PersistenceReport& report, long long max_period);
std::string classes_text(const PersistenceReport& report, long long max_period,
                         bool point_classes = false);

// Structure graph: pieces as nodes, annuli/seams as edges.
std::string graph_dot(const ComponentGraph& g);

// Relation graph: solid undirected pn edges, dashed directed collapse edges,
// node labels type:period:index.
std::string relations_dot(const PersistenceReport& report);

std::string matched_pairs_csv(const MatchReport& report);

json match_report_json(const MatchReport& report);
json expansion_report_json(const ExpansionReport& report, double lambda);
json two_sided_report_json(const TwoSidedReport& report);
json semiconjugacy_report_json(const SemiconjugacyReport& report, double C);
json flip_report_json(const FlipReport& report);

} // namespace tnsurf
