#pragma once

#include <vector>

#include "tnsurf/canonicalize.hpp"

namespace tnsurf {

// ---------------------------------------------------------------------------
// Relation calculus on periodic orbits: periodic Nielsen equivalence (pn,
// symmetric, equal periods) and collapse (directed, period-dividing).
// ---------------------------------------------------------------------------

struct RelNode {
    Id id = -1;
    long long period = 1;
    bool operator==(const RelNode&) const = default;
};

struct PnEdge {
    Id a = -1, b = -1;   // stored with a < b
    bool operator==(const PnEdge&) const = default;
    bool operator<(const PnEdge& o) const { return a != o.a ? a < o.a : b < o.b; }
};

struct CollapseEdge {
    Id from = -1, to = -1;
    long long multiplier = 2;   // period(from) = multiplier * period(to), > 1
    bool operator==(const CollapseEdge&) const = default;
    bool operator<(const CollapseEdge& o) const {
        return from != o.from ? from < o.from : to < o.to;
    }
};

struct RelationSet {
    std::vector<RelNode> nodes;
    std::vector<PnEdge> pn;
    std::vector<CollapseEdge> collapse;

    void canonicalize();   // sort nodes/edges, normalize pn orientation, dedupe
    bool operator==(const RelationSet&) const = default;
};

// Generator edges for the orbit inventory of an adjusted graph:
//   - regular -| branch within one finite-order component
//   - peripheral pn peripheral / peripheral pn regular across untwisted annuli
//   - boundary orbit -| pinch orbit across flipped untwisted annuli
// Nothing for interior pA orbits, across twisted annuli, or between two
// finite-order components.
RelationSet base_relations(const AdjustedGraph& g, long long max_period,
                           const CensusOverride* census = nullptr);

// On condensed output the generator set between distinct orbits is empty.
RelationSet base_relations(const CondensedGraph& g, long long max_period,
                           const CensusOverride* census = nullptr);

// Least fixed point under: pn is an equivalence; pn o -| and -| o pn are
// collapses; collapses compose (multipliers multiply). Throws
// StructuralError on a pn edge between unequal periods or a collapse edge
// that is not strictly period-dividing.
RelationSet close_relations(const RelationSet& rels);

// ---------------------------------------------------------------------------
// Classes and persistence flags
// ---------------------------------------------------------------------------

enum class Tri { No, Yes, Unknown };

std::string tri_name(Tri t);

struct NielsenClassRecord {
    Id id = -1;
    long long period = 1;
    std::vector<Id> members;        // orbit record ids, sorted
    bool collapsible = false;
    OrbitIndex index;               // combined class index
    Tri essential = Tri::Unknown;
    Tri persistent = Tri::Unknown;  // == unremovable == (!collapsible && essential)
    Tri unremovable = Tri::Unknown;
    long long point_subclasses = 1; // point-level classes inside the orbit class
};

// True iff some member has an outgoing collapse edge in the closed set.
bool collapsible(const NielsenClassRecord& cls, const RelationSet& closed);

// Yes/No from the class index; Unknown when the index is indeterminate.
Tri essential(const NielsenClassRecord& cls);

struct PersistenceReport {
    std::vector<NielsenClassRecord> classes;
    RelationSet closed;
    Inventory inventory;
};

PersistenceReport persistence_report(const AdjustedGraph& g, long long max_period,
                                     const CensusOverride* census = nullptr);
PersistenceReport persistence_report(const CondensedGraph& g, long long max_period,
                                     const CensusOverride* census = nullptr);

// ---------------------------------------------------------------------------
// PON counts: uncollapsible essential period-n orbit classes, the sharp
// lower bound for period-n orbits in the isotopy class.
// ---------------------------------------------------------------------------

struct PonCount {
    long long count = 0;
    bool exact = true;   // false once any pA piece lacks census data
};

PonCount pon_count(const PersistenceReport& report, long long n, bool census_complete);
PonCount pon_count(const CondensedGraph& g, long long n,
                   const CensusOverride* census = nullptr);
PonCount pon_count(const AdjustedGraph& g, long long n,
                   const CensusOverride* census = nullptr);

} // namespace tnsurf
