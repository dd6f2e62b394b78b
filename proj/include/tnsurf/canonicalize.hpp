#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tnsurf/annulus.hpp"
#include "tnsurf/component_graph.hpp"

namespace tnsurf {

// ---------------------------------------------------------------------------
// Fixed point indices from sector decompositions.
// ---------------------------------------------------------------------------

struct IndexSpec {
    int hyperbolic = 0;   // h sectors
    int parabolic = 0;    // p sectors
    int local_order = 1;  // k (1 = no branching)
    bool rotated = false;
};

// Index of a fixed point with h hyperbolic and p parabolic sectors:
// 1 + p/2 - h/2. Requires h - p even.
int sector_index(const IndexSpec& spec);

// Index of the branched lift through z -> z^k of such a fixed point:
// 1 + k(p/2 - h/2) without local rotation, +1 with. Requires h - p even,
// k >= 2. Never zero.
int branched_lift_index(const IndexSpec& spec);

// Riemann-Hurwitz: chi(N) = m (chi(N*) - sum(1 - 1/k_i)) over the branch
// orbits. Returns chi(N*); throws StructuralError if the data is not
// realizable (non-integral quotient characteristic).
int quotient_euler(int chi, int period, const std::vector<BranchPoint>& branch);

// ---------------------------------------------------------------------------
// Orbit records
// ---------------------------------------------------------------------------

enum class OrbitType {
    InteriorPA,
    BoundaryPA,        // on a free boundary circle of a pA piece
    PeripheralPA,      // on a circle attached to an annulus (or a glued seam)
    FiniteOrderRegular,
    FiniteOrderBranch,
    FlipAnnulusInterior,
};

std::string orbit_type_name(OrbitType t);

struct OrbitIndex {
    enum class Tag { Integer, NonzeroSymbolic, Indeterminate } tag = Tag::Indeterminate;
    long long value = 0;

    static OrbitIndex integer(long long v) { return {Tag::Integer, v}; }
    static OrbitIndex nonzero() { return {Tag::NonzeroSymbolic, 0}; }
    static OrbitIndex indeterminate() { return {Tag::Indeterminate, 0}; }

    bool is_integer() const { return tag == Tag::Integer; }
    bool known_nonzero() const {
        return tag == Tag::NonzeroSymbolic || (tag == Tag::Integer && value != 0);
    }
    std::string str() const;
    bool operator==(const OrbitIndex&) const = default;
};

// Where an orbit record came from; drives deterministic ids and lets a
// second condensation pass keep records whose source structure is gone.
struct OrbitOrigin {
    enum class Kind {
        Component,      // regular orbit class of a finite-order component
        Branch,         // one branch orbit (subject = component, index = entry)
        Circle,         // boundary orbit of a pA circle orbit
        FlipInterior,   // interior orbit of a flipped annulus (pinch or companion)
        Census,         // interior pA orbit from an external census
        Retained,       // survived from a previous condensation (pinch orbits)
    } kind = Kind::Component;
    Id subject = -1;      // least id of the defining orbit
    long long sub = 0;    // branch entry / census slot / pinch(0) vs companion(1)
    bool operator<(const OrbitOrigin& o) const;
    bool operator==(const OrbitOrigin&) const = default;
};

struct OrbitRecord {
    Id id = -1;
    OrbitType type = OrbitType::InteriorPA;
    long long period = 1;
    OrbitIndex index;
    long long points_per_orbit = 1;
    OrbitOrigin origin;
    // True for the class node of a finite-order component before
    // condensation, which stands for the whole (infinite) family of regular
    // orbits rather than a single one.
    bool aggregate = false;
    // Origins of orbits coalesced into this record during condensation.
    std::vector<OrbitOrigin> absorbed;
};

// ---------------------------------------------------------------------------
// Adjusted graphs: annulus interiors normalized, pA boundaries collapsed,
// untwisted annuli between finite-order components eliminated.
// ---------------------------------------------------------------------------

struct AnnulusInterior {
    enum class Kind { Empty, TwoOrbits } kind = Kind::Empty;
    long long period = 0;                // TwoOrbits: = return time
    std::array<int, 2> indices{1, 1};    // both nonzero, classes distinct
};

struct CollapseRecord {
    BoundaryOrbit orbit;
    CollapseChoice choice = CollapseChoice::Left;  // meaningful when q == 1
    long long circle_orbit_length = 1;
    long long ambient_period = 1;        // circle orbit length * q
};

struct LogEvent {
    std::string kind;
    std::vector<Id> ids;
    std::string note;
};

struct RewriteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AdjustOptions {
    CollapseChoice default_choice = CollapseChoice::Left;
    std::map<Id, CollapseChoice> per_circle;
};

struct AdjustedGraph {
    ComponentGraph graph;
    std::map<Id, AnnulusInterior> interiors;      // keyed by annulus id
    std::map<Id, CollapseRecord> collapses;       // keyed by pA circle id
    std::vector<LogEvent> log;                    // finite-order merges
    // Pinch orbits carried through from a previous condensation.
    std::vector<OrbitRecord> retained;
};

// Lemma-level rewrite: requires every annulus to classify (no indeterminate
// twist data) and every pA circle to carry a rotation; refuses otherwise.
AdjustedGraph adjust(const ComponentGraph& g, const AdjustOptions& opts = {});

// ---------------------------------------------------------------------------
// Condensed graphs
// ---------------------------------------------------------------------------

struct CondensedGraph {
    ComponentGraph graph;                 // annuli eliminated, seams recorded
    std::vector<LogEvent> identification_log;
    std::vector<OrbitRecord> orbit_inventory;
};

// Dispatches finite-order components to the four construction cases, passes
// pA components through, then eliminates/pinches untwisted annuli and
// coalesces the related boundary orbits. Every inventory index is nonzero.
CondensedGraph condense(const AdjustedGraph& adjusted);

// Re-condensing condensed output is the identity up to record ids.
CondensedGraph condense(const CondensedGraph& condensed, const AdjustOptions& opts = {});

// ---------------------------------------------------------------------------
// Periodic orbit inventory
// ---------------------------------------------------------------------------

struct PeriodLine {
    long long structural = 0;   // orbits of the structural types
    long long census = 0;       // interior pA orbits, when a census is given
    bool exact = true;          // false once any pA piece lacks census data
};

struct Inventory {
    std::vector<OrbitRecord> orbits;          // period <= max_period
    std::map<long long, PeriodLine> per_period;
    bool census_complete = true;
};

// External census override: piece id -> (return period -> orbit count).
using CensusOverride = std::map<Id, std::map<int, long long>>;

// All orbits of period <= max_period. Interior pA orbits appear only for
// pieces with census data (piece-level or via the override); absent census
// turns exactness off for the affected periods.
Inventory periodic_inventory(const CondensedGraph& g, long long max_period,
                             const CensusOverride* census = nullptr);

// The same enumeration for an adjusted graph. Regular classes of
// finite-order components appear as aggregate nodes.
Inventory adjusted_inventory(const AdjustedGraph& g, long long max_period,
                             const CensusOverride* census = nullptr);

} // namespace tnsurf
