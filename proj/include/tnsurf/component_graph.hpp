#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tnsurf/rational.hpp"

namespace tnsurf {

using Id = long long;

// Thrown for malformed structure (non-bijective action maps, dangling ids,
// inconsistent orbit data). Data-level rule violations go into a
// ValidationReport instead.
struct StructuralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Surface decomposition: pieces, boundary circles, reducing annuli, and the
// mapping class's action on all three.
// ---------------------------------------------------------------------------

enum class SeamKind { Glue, Pinch, Collapse };

// Where a boundary circle is attached. Raw graphs use Free (boundary of the
// ambient surface) or Annulus (side 0/1 of a reducing annulus). Seam appears
// only in condensed output, after an annulus has been eliminated and its two
// side circles identified.
struct Attachment {
    enum class Kind { Free, Annulus, Seam } kind = Kind::Free;
    Id annulus = -1;
    int side = -1;
    Id partner = -1;          // seam: the circle glued to this one
    SeamKind seam_kind = SeamKind::Glue;

    static Attachment free() { return {}; }
    static Attachment on_annulus(Id a, int s) {
        Attachment at; at.kind = Kind::Annulus; at.annulus = a; at.side = s; return at;
    }
    static Attachment seam(Id partner, SeamKind k) {
        Attachment at; at.kind = Kind::Seam; at.partner = partner; at.seam_kind = k; return at;
    }
    bool operator==(const Attachment&) const = default;
};

struct BoundaryCircle {
    Id id = -1;
    Id owner = -1;                       // piece id
    Attachment attachment;
    std::optional<Rational> rotation;    // rotation number of the circle's return lift
    int prongs = 0;                      // pA pieces only: prong count of the blown-up singularity
};

// One entry per branch orbit of the return map (the orbit projects to a
// single critical value of the quotient).
struct BranchPoint {
    int local_order = 2;
    bool rotated = false;
};

struct FiniteOrderData {
    int period = 1;                      // least n with return^n = id
    std::vector<BranchPoint> branch_points;
};

struct PseudoAnosovData {
    double expansion = 0.0;              // > 1
    // Interior periodic census, keyed by return-map period; external input.
    std::map<int, long long> interior_census;
    bool has_census = false;
};

struct SurfacePiece {
    Id id = -1;
    int genus = 0;
    std::vector<BoundaryCircle> boundary;
    std::variant<FiniteOrderData, PseudoAnosovData> data;

    bool is_finite_order() const { return std::holds_alternative<FiniteOrderData>(data); }
    bool is_pa() const { return std::holds_alternative<PseudoAnosovData>(data); }
    const FiniteOrderData& fo() const { return std::get<FiniteOrderData>(data); }
    const PseudoAnosovData& pa() const { return std::get<PseudoAnosovData>(data); }
};

// chi = 2 - 2g - b
int euler_characteristic(const SurfacePiece& piece);

struct AnnulusRecord {
    Id id = -1;
    std::array<Id, 2> sides{-1, -1};     // boundary circle ids
    int return_time = 1;                 // least n with phi^n(A) = A
    bool flipped = false;                // return interchanges the two boundaries
    // Rotation numbers of the return lift on the two side circles. For
    // flipped annuli these refer to the squared return, and the pair must be
    // (rho, -rho) under the canonical lift pairing (both lifts equivariantly
    // isotopic to a common lift of the return).
    std::array<std::optional<Rational>, 2> side_rotations;
};

struct ComponentGraph {
    std::vector<SurfacePiece> pieces;    // kept sorted by id
    std::vector<AnnulusRecord> annuli;   // kept sorted by id
    std::map<Id, Id> piece_map;          // the action on pieces
    std::map<Id, Id> annulus_map;
    std::map<Id, Id> circle_map;

    const SurfacePiece* piece(Id id) const;
    SurfacePiece* piece(Id id);
    const AnnulusRecord* annulus(Id id) const;
    const BoundaryCircle* circle(Id id) const;
    BoundaryCircle* circle(Id id);

    int total_euler_char() const;        // chi of the ambient surface; annuli contribute 0
    void sort_records();
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationIssue {
    std::string code;
    std::string message;
    std::vector<Id> subjects;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

// Total over all constructible graphs: violations become report entries,
// never exceptions. Idempotent.
ValidationReport validate(const ComponentGraph& g);

// ---------------------------------------------------------------------------
// Orbit decomposition of the action
// ---------------------------------------------------------------------------

struct Orbit {
    std::vector<Id> ids;                 // cycle order, starting from the least id
    int length() const { return static_cast<int>(ids.size()); }
    Id representative() const { return ids.empty() ? -1 : ids.front(); }
};

struct OrbitDecomposition {
    std::vector<Orbit> pieces;           // ordered by least id
    std::vector<Orbit> annuli;
    std::vector<Orbit> circles;
};

// Partitions pieces, annuli and circles into permutation cycles.
// Throws StructuralError if any of the three maps is not a permutation of
// the corresponding id set.
OrbitDecomposition orbit_decomposition(const ComponentGraph& g);

// Orbit of a single id under a permutation map, cycle order from `start`.
std::vector<Id> orbit_of(const std::map<Id, Id>& perm, Id start);

} // namespace tnsurf
