#include "tnsurf/component_graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace tnsurf {

int euler_characteristic(const SurfacePiece& piece) {
    return 2 - 2 * piece.genus - static_cast<int>(piece.boundary.size());
}

const SurfacePiece* ComponentGraph::piece(Id id) const {
    for (const auto& p : pieces)
        if (p.id == id) return &p;
    return nullptr;
}

SurfacePiece* ComponentGraph::piece(Id id) {
    for (auto& p : pieces)
        if (p.id == id) return &p;
    return nullptr;
}

const AnnulusRecord* ComponentGraph::annulus(Id id) const {
    for (const auto& a : annuli)
        if (a.id == id) return &a;
    return nullptr;
}

const BoundaryCircle* ComponentGraph::circle(Id id) const {
    for (const auto& p : pieces)
        for (const auto& c : p.boundary)
            if (c.id == id) return &c;
    return nullptr;
}

BoundaryCircle* ComponentGraph::circle(Id id) {
    for (auto& p : pieces)
        for (auto& c : p.boundary)
            if (c.id == id) return &c;
    return nullptr;
}

int ComponentGraph::total_euler_char() const {
    int chi = 0;
    for (const auto& p : pieces) chi += euler_characteristic(p);
    return chi;
}

void ComponentGraph::sort_records() {
    std::sort(pieces.begin(), pieces.end(),
              [](const SurfacePiece& a, const SurfacePiece& b) { return a.id < b.id; });
    std::sort(annuli.begin(), annuli.end(),
              [](const AnnulusRecord& a, const AnnulusRecord& b) { return a.id < b.id; });
    for (auto& p : pieces)
        std::sort(p.boundary.begin(), p.boundary.end(),
                  [](const BoundaryCircle& a, const BoundaryCircle& b) { return a.id < b.id; });
}

// ---------------------------------------------------------------------------
// Orbits
// ---------------------------------------------------------------------------

namespace {

bool is_permutation(const std::map<Id, Id>& perm, const std::set<Id>& domain) {
    if (perm.size() != domain.size()) return false;
    std::set<Id> image;
    for (const auto& [from, to] : perm) {
        if (!domain.count(from) || !domain.count(to)) return false;
        image.insert(to);
    }
    return image.size() == domain.size();
}

std::vector<Orbit> cycles(const std::map<Id, Id>& perm, const std::set<Id>& domain) {
    std::vector<Orbit> out;
    std::set<Id> seen;
    for (Id start : domain) {
        if (seen.count(start)) continue;
        Orbit orb;
        Id cur = start;
        do {
            orb.ids.push_back(cur);
            seen.insert(cur);
            cur = perm.at(cur);
        } while (cur != start);
        out.push_back(std::move(orb));
    }
    // domain iteration is ordered, so each cycle starts at its least id and
    // the orbit list is ordered by least id
    return out;
}

} // namespace

std::vector<Id> orbit_of(const std::map<Id, Id>& perm, Id start) {
    std::vector<Id> out;
    Id cur = start;
    do {
        out.push_back(cur);
        auto it = perm.find(cur);
        if (it == perm.end())
            throw StructuralError("orbit_of: id " + std::to_string(cur) + " not in permutation");
        cur = it->second;
        if (out.size() > perm.size())
            throw StructuralError("orbit_of: map is not a permutation");
    } while (cur != start);
    // rotate so the least id leads
    auto least = std::min_element(out.begin(), out.end());
    std::rotate(out.begin(), least, out.end());
    return out;
}

OrbitDecomposition orbit_decomposition(const ComponentGraph& g) {
    std::set<Id> piece_ids, annulus_ids, circle_ids;
    for (const auto& p : g.pieces) {
        piece_ids.insert(p.id);
        for (const auto& c : p.boundary) circle_ids.insert(c.id);
    }
    for (const auto& a : g.annuli) annulus_ids.insert(a.id);

    if (!is_permutation(g.piece_map, piece_ids))
        throw StructuralError("piece map is not a permutation of the piece ids");
    if (!is_permutation(g.annulus_map, annulus_ids))
        throw StructuralError("annulus map is not a permutation of the annulus ids");
    if (!is_permutation(g.circle_map, circle_ids))
        throw StructuralError("circle map is not a permutation of the circle ids");

    OrbitDecomposition dec;
    dec.pieces = cycles(g.piece_map, piece_ids);
    dec.annuli = cycles(g.annulus_map, annulus_ids);
    dec.circles = cycles(g.circle_map, circle_ids);
    return dec;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

struct Checker {
    const ComponentGraph& g;
    ValidationReport report;

    void add(const std::string& code, const std::string& msg, std::vector<Id> subjects = {}) {
        report.issues.push_back({code, msg, std::move(subjects)});
    }

    void duplicate_ids() {
        std::set<Id> pids, aids, cids;
        for (const auto& p : g.pieces) {
            if (!pids.insert(p.id).second)
                add("duplicate-id", "duplicate piece id", {p.id});
            for (const auto& c : p.boundary) {
                if (!cids.insert(c.id).second)
                    add("duplicate-id", "duplicate circle id", {c.id});
                if (c.owner != p.id)
                    add("circle-owner", "circle owner field does not match containing piece",
                        {c.id, p.id});
            }
        }
        for (const auto& a : g.annuli)
            if (!aids.insert(a.id).second)
                add("duplicate-id", "duplicate annulus id", {a.id});
    }

    void euler_and_kind() {
        for (const auto& p : g.pieces) {
            int chi = euler_characteristic(p);
            if (chi >= 0)
                add("euler-negative",
                    "piece must have negative Euler characteristic, got chi=" +
                        std::to_string(chi), {p.id});
            if (p.is_pa()) {
                if (!(p.pa().expansion > 1.0))
                    add("pa-lambda", "expansion constant must exceed 1", {p.id});
                for (const auto& c : p.boundary)
                    if (c.prongs < 1)
                        add("pa-prongs", "pA boundary circle needs a positive prong count",
                            {c.id});
            } else {
                const auto& fo = p.fo();
                if (fo.period < 1)
                    add("fo-period", "finite-order period must be positive", {p.id});
                bool branch_ok = fo.period >= 1;
                for (size_t i = 0; i < fo.branch_points.size(); ++i) {
                    const auto& bp = fo.branch_points[i];
                    if (bp.local_order < 2) {
                        add("fo-branch-order", "branch local order must be >= 2", {p.id});
                        branch_ok = false;
                    } else if (fo.period % bp.local_order != 0) {
                        add("fo-branch-order",
                            "branch local order " + std::to_string(bp.local_order) +
                                " does not divide the period " + std::to_string(fo.period),
                            {p.id});
                        branch_ok = false;
                    }
                }
                // Riemann-Hurwitz: chi = m (chi* - sum(1 - 1/k)) for an
                // integral quotient characteristic
                if (branch_ok) {
                    long long numerator = chi;
                    for (const auto& bp : fo.branch_points)
                        numerator += static_cast<long long>(fo.period) -
                                     fo.period / bp.local_order;
                    if (numerator % fo.period != 0)
                        add("quotient-euler",
                            "no integral quotient characteristic: the data is not "
                            "realizable by a finite-order map",
                            {p.id});
                }
            }
        }
    }

    void attachments() {
        // every annulus side attaches exactly one circle, every circle at most one side
        std::map<Id, std::pair<Id, int>> circle_to_side;
        for (const auto& a : g.annuli) {
            if (a.sides[0] == a.sides[1])
                add("sides-distinct", "annulus sides refer to the same circle", {a.id});
            if (a.return_time < 1)
                add("return-time", "return time must be positive", {a.id});
            for (int s = 0; s < 2; ++s) {
                Id cid = a.sides[s];
                const BoundaryCircle* c = g.circle(cid);
                if (!c) {
                    add("attachment", "annulus side refers to unknown circle", {a.id, cid});
                    continue;
                }
                if (circle_to_side.count(cid))
                    add("attachment", "circle attached to more than one annulus side", {cid});
                circle_to_side[cid] = {a.id, s};
                if (c->attachment.kind != Attachment::Kind::Annulus ||
                    c->attachment.annulus != a.id || c->attachment.side != s)
                    add("attachment",
                        "circle attachment record disagrees with annulus side table",
                        {cid, a.id});
            }
        }
        for (const auto& p : g.pieces)
            for (const auto& c : p.boundary) {
                if (c.attachment.kind == Attachment::Kind::Annulus && !circle_to_side.count(c.id))
                    add("attachment", "circle claims an annulus side that does not list it",
                        {c.id, c.attachment.annulus});
                if (c.attachment.kind == Attachment::Kind::Seam) {
                    const BoundaryCircle* partner = g.circle(c.attachment.partner);
                    if (!partner || partner->attachment.kind != Attachment::Kind::Seam ||
                        partner->attachment.partner != c.id)
                        add("attachment", "seam partner is not reciprocal",
                            {c.id, c.attachment.partner});
                }
            }
    }

    // Needs orbits; any structural failure was already reported.
    void action(const OrbitDecomposition& dec) {
        for (const auto& p : g.pieces)
            for (const auto& c : p.boundary) {
                auto ci = g.circle_map.find(c.id);
                auto pi = g.piece_map.find(p.id);
                if (ci == g.circle_map.end() || pi == g.piece_map.end()) continue;
                const BoundaryCircle* image = g.circle(ci->second);
                if (image && image->owner != pi->second)
                    add("perm-circle-owner",
                        "circle image is not owned by the image of its owner",
                        {c.id, ci->second});
            }
        for (const auto& a : g.annuli) {
            auto ai = g.annulus_map.find(a.id);
            if (ai == g.annulus_map.end()) continue;
            const AnnulusRecord* image = g.annulus(ai->second);
            if (!image) continue;
            for (int s = 0; s < 2; ++s) {
                auto ci = g.circle_map.find(a.sides[s]);
                if (ci == g.circle_map.end()) continue;
                if (ci->second != image->sides[0] && ci->second != image->sides[1])
                    add("perm-annulus-sides",
                        "side circle does not map to a side of the image annulus",
                        {a.id, a.sides[s]});
            }
        }
        // return_time equals the annulus orbit length
        for (const auto& orb : dec.annuli) {
            const AnnulusRecord* a = g.annulus(orb.representative());
            if (a && a->return_time != orb.length())
                add("return-time",
                    "recorded return time " + std::to_string(a->return_time) +
                        " differs from orbit length " + std::to_string(orb.length()),
                    {a->id});
        }
        // pieces on one orbit are interchangeable: same topology, same kind data
        for (const auto& orb : dec.pieces) {
            const SurfacePiece* rep = g.piece(orb.representative());
            if (!rep) continue;
            for (Id pid : orb.ids) {
                const SurfacePiece* p = g.piece(pid);
                if (!p) continue;
                bool same = p->genus == rep->genus &&
                            p->boundary.size() == rep->boundary.size() &&
                            p->is_pa() == rep->is_pa();
                if (same && p->is_finite_order())
                    same = p->fo().period == rep->fo().period &&
                           p->fo().branch_points.size() == rep->fo().branch_points.size();
                if (same && p->is_pa())
                    same = p->pa().expansion == rep->pa().expansion;
                if (!same)
                    add("kind-consistent", "pieces on one orbit must carry identical data",
                        {rep->id, pid});
            }
        }
        // flip structure: unflipped sides live on two n-orbits, flipped sides
        // on a single 2n-orbit
        for (const auto& orb : dec.annuli) {
            const AnnulusRecord* a = g.annulus(orb.representative());
            if (!a) continue;
            int n = orb.length();
            try {
                auto side0 = orbit_of(g.circle_map, a->sides[0]);
                bool contains_other =
                    std::find(side0.begin(), side0.end(), a->sides[1]) != side0.end();
                if (a->flipped) {
                    if (!contains_other || static_cast<int>(side0.size()) != 2 * n)
                        add("flip-structure",
                            "flipped annulus sides must form one circle orbit of twice the return time",
                            {a->id});
                } else {
                    if (contains_other || static_cast<int>(side0.size()) != n)
                        add("flip-structure",
                            "unflipped annulus sides must form two circle orbits of the return time",
                            {a->id});
                }
            } catch (const StructuralError&) {
                // circle map problems already reported
            }
        }
    }

    void rotations(const OrbitDecomposition& dec) {
        auto circle_orbit_length = [&](Id cid) -> int {
            for (const auto& orb : dec.circles)
                if (std::find(orb.ids.begin(), orb.ids.end(), cid) != orb.ids.end())
                    return orb.length();
            return 0;
        };
        auto piece_orbit_length = [&](Id pid) -> int {
            for (const auto& orb : dec.pieces)
                if (std::find(orb.ids.begin(), orb.ids.end(), pid) != orb.ids.end())
                    return orb.length();
            return 0;
        };

        for (const auto& p : g.pieces) {
            for (const auto& c : p.boundary) {
                if (!c.rotation) continue;
                Rational rho = *c.rotation;
                if (p.is_finite_order()) {
                    int m = p.fo().period;
                    if (m % rho.den != 0)
                        add("fo-rotation-denominator",
                            "rotation denominator " + std::to_string(rho.den) +
                                " does not divide the return period " + std::to_string(m),
                            {c.id});
                    // peripheral finite-order points are regular:
                    // q * (circle orbit length / piece orbit length) == m
                    int lc = circle_orbit_length(c.id);
                    int lp = piece_orbit_length(p.id);
                    if (lc > 0 && lp > 0 && lc % lp == 0) {
                        long long q = rho.den;
                        if (q * (lc / lp) != m)
                            add("fo-peripheral-regular",
                                "peripheral points are not regular: q*(lc/lp) != period",
                                {c.id});
                    }
                } else {
                    // boundary orbit structure needs q | 2m
                    if (c.prongs >= 1 && (2 * c.prongs) % rho.den != 0)
                        add("pa-rotation-compat",
                            "rotation denominator must divide twice the prong count",
                            {c.id});
                }
            }
        }

        for (const auto& a : g.annuli) {
            for (int s = 0; s < 2; ++s) {
                const BoundaryCircle* c = g.circle(a.sides[s]);
                if (!c) continue;
                if (a.side_rotations[s] && c->rotation && *a.side_rotations[s] != *c->rotation)
                    add("annulus-rotation-consistency",
                        "annulus side rotation disagrees with the circle record",
                        {a.id, c->id});
            }
            if (a.flipped && a.side_rotations[0] && a.side_rotations[1]) {
                if (*a.side_rotations[1] != -*a.side_rotations[0])
                    add("flip-rotation-negation",
                        "flipped annulus side rotations must negate each other",
                        {a.id});
            }
        }
    }

    ValidationReport run() {
        duplicate_ids();
        euler_and_kind();
        attachments();
        try {
            OrbitDecomposition dec = orbit_decomposition(g);
            action(dec);
            rotations(dec);
        } catch (const StructuralError& e) {
            add("perm-bijection", e.what());
        }
        return std::move(report);
    }
};

} // namespace

ValidationReport validate(const ComponentGraph& g) {
    Checker checker{g, {}};
    return checker.run();
}

} // namespace tnsurf
