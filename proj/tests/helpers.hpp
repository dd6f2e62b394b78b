#pragma once

// Shared builders for test graphs and fixture loading.

#include <fstream>
#include <string>

#include "tnsurf/canonicalize.hpp"
#include "tnsurf/component_graph.hpp"
#include "tnsurf/io.hpp"

namespace tnsurf::testing {

inline SurfacePiece fo_piece(Id id, int genus, int period,
                             std::vector<BranchPoint> branch = {}) {
    SurfacePiece p;
    p.id = id;
    p.genus = genus;
    FiniteOrderData fo;
    fo.period = period;
    fo.branch_points = std::move(branch);
    p.data = fo;
    return p;
}

inline SurfacePiece pa_piece(Id id, int genus, double lambda) {
    SurfacePiece p;
    p.id = id;
    p.genus = genus;
    PseudoAnosovData pa;
    pa.expansion = lambda;
    p.data = pa;
    return p;
}

inline void add_circle(SurfacePiece& p, Id cid, Attachment at,
                       std::optional<Rational> rotation = std::nullopt, int prongs = 0) {
    BoundaryCircle c;
    c.id = cid;
    c.owner = p.id;
    c.attachment = at;
    c.rotation = rotation;
    c.prongs = prongs;
    p.boundary.push_back(c);
}

inline AnnulusRecord make_annulus(Id id, Id s0, Id s1, int return_time, bool flipped,
                                  std::optional<Rational> r0 = std::nullopt,
                                  std::optional<Rational> r1 = std::nullopt) {
    AnnulusRecord a;
    a.id = id;
    a.sides = {s0, s1};
    a.return_time = return_time;
    a.flipped = flipped;
    a.side_rotations = {r0, r1};
    return a;
}

// Identity action on everything the graph contains.
inline void identity_maps(ComponentGraph& g) {
    for (const auto& p : g.pieces) {
        g.piece_map[p.id] = p.id;
        for (const auto& c : p.boundary) g.circle_map[c.id] = c.id;
    }
    for (const auto& a : g.annuli) g.annulus_map[a.id] = a.id;
}

inline Document load_fixture(const std::string& name) {
    return load_document(std::string(TNSURF_DATA_DIR) + "/" + name);
}

} // namespace tnsurf::testing
