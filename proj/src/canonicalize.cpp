#include "tnsurf/canonicalize.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace tnsurf {

// ---------------------------------------------------------------------------
// Index formulas
// ---------------------------------------------------------------------------

int sector_index(const IndexSpec& spec) {
    if ((spec.hyperbolic - spec.parabolic) % 2 != 0)
        throw StructuralError("sector parity violated: h - p must be even");
    return 1 + (spec.parabolic - spec.hyperbolic) / 2;
}

int branched_lift_index(const IndexSpec& spec) {
    if (spec.local_order < 2)
        throw StructuralError("branched lift needs local order k >= 2");
    if ((spec.hyperbolic - spec.parabolic) % 2 != 0)
        throw StructuralError("sector parity violated: h - p must be even");
    if (spec.rotated) return 1;
    return 1 + spec.local_order * (spec.parabolic - spec.hyperbolic) / 2;
}

int quotient_euler(int chi, int period, const std::vector<BranchPoint>& branch) {
    if (period < 1) throw StructuralError("period must be positive");
    // chi* = chi/m + sum(1 - 1/k_i), exactly
    Rational chi_star(chi, period);
    for (const auto& bp : branch) {
        if (bp.local_order < 2) throw StructuralError("branch local order must be >= 2");
        chi_star = chi_star + Rational(bp.local_order - 1, bp.local_order);
    }
    if (chi_star.den != 1)
        throw StructuralError("Riemann-Hurwitz failure: quotient characteristic " +
                              chi_star.str() + " is not an integer");
    return static_cast<int>(chi_star.num);
}

// ---------------------------------------------------------------------------
// Orbit records
// ---------------------------------------------------------------------------

std::string orbit_type_name(OrbitType t) {
    switch (t) {
        case OrbitType::InteriorPA: return "interior-pa";
        case OrbitType::BoundaryPA: return "boundary-pa";
        case OrbitType::PeripheralPA: return "peripheral-pa";
        case OrbitType::FiniteOrderRegular: return "fo-regular";
        case OrbitType::FiniteOrderBranch: return "fo-branch";
        case OrbitType::FlipAnnulusInterior: return "flip-interior";
    }
    return "?";
}

std::string OrbitIndex::str() const {
    switch (tag) {
        case Tag::Integer: return std::to_string(value);
        case Tag::NonzeroSymbolic: return "nonzero";
        case Tag::Indeterminate: return "indeterminate";
    }
    return "?";
}

bool OrbitOrigin::operator<(const OrbitOrigin& o) const {
    if (kind != o.kind) return static_cast<int>(kind) < static_cast<int>(o.kind);
    if (subject != o.subject) return subject < o.subject;
    return sub < o.sub;
}

namespace {

// ---------------------------------------------------------------------------
// Shared helpers over a decomposed graph
// ---------------------------------------------------------------------------

struct GraphView {
    const ComponentGraph& g;
    OrbitDecomposition dec;
    std::map<Id, const Orbit*> piece_orbit;    // piece id -> its orbit
    std::map<Id, const Orbit*> circle_orbit;
    std::map<Id, const Orbit*> annulus_orbit;
    std::map<Id, TwistClass> twist;            // per annulus

    explicit GraphView(const ComponentGraph& graph) : g(graph), dec(orbit_decomposition(graph)) {
        for (const auto& orb : dec.pieces)
            for (Id id : orb.ids) piece_orbit[id] = &orb;
        for (const auto& orb : dec.circles)
            for (Id id : orb.ids) circle_orbit[id] = &orb;
        for (const auto& orb : dec.annuli)
            for (Id id : orb.ids) annulus_orbit[id] = &orb;
        for (const auto& a : g.annuli) twist[a.id] = classify_annulus(a);
    }

    const SurfacePiece& rep_piece(const Orbit& orb) const {
        const SurfacePiece* p = g.piece(orb.representative());
        if (!p) throw StructuralError("dangling piece id in orbit");
        return *p;
    }

    bool component_has_untwisted_circle(const Orbit& orb) const {
        for (Id pid : orb.ids) {
            const SurfacePiece* p = g.piece(pid);
            if (!p) continue;
            for (const auto& c : p->boundary) {
                if (c.attachment.kind != Attachment::Kind::Annulus) continue;
                auto it = twist.find(c.attachment.annulus);
                if (it != twist.end() && it->second.untwisted()) return true;
            }
        }
        return false;
    }
};

long long checked_div(long long a, long long b, const char* what) {
    if (b == 0 || a % b != 0)
        throw StructuralError(std::string("non-integral division in ") + what);
    return a / b;
}

// Sector data of the quotient flow fixed points: the first branch record is
// the bouquet center, the rest are spiral sources. Indices downstairs sum to
// the quotient characteristic.
IndexSpec branch_sector_spec(size_t entry, size_t total, int chi_star, const BranchPoint& bp) {
    IndexSpec spec;
    spec.local_order = bp.local_order;
    spec.rotated = bp.rotated;
    if (entry == 0) {
        spec.hyperbolic = 2 * (static_cast<int>(total) - chi_star);
        spec.parabolic = 0;
    }
    return spec;
}

struct InventoryBuilder {
    std::map<OrbitOrigin, OrbitRecord> records;

    OrbitRecord& add(OrbitRecord rec) {
        auto [it, fresh] = records.emplace(rec.origin, std::move(rec));
        if (!fresh) throw StructuralError("duplicate orbit origin");
        return it->second;
    }

    OrbitRecord* find(const OrbitOrigin& origin) {
        auto it = records.find(origin);
        return it == records.end() ? nullptr : &it->second;
    }

    void absorb(const OrbitOrigin& victim, const OrbitOrigin& into) {
        auto vit = records.find(victim);
        auto iit = records.find(into);
        if (vit == records.end() || iit == records.end())
            throw StructuralError("absorb: unknown orbit record");
        iit->second.absorbed.push_back(vit->second.origin);
        for (const auto& o : vit->second.absorbed) iit->second.absorbed.push_back(o);
        records.erase(vit);
    }

    std::vector<OrbitRecord> finalize() {
        std::vector<OrbitRecord> out;
        out.reserve(records.size());
        for (auto& [origin, rec] : records) {
            std::sort(rec.absorbed.begin(), rec.absorbed.end());
            out.push_back(std::move(rec));
        }
        // map iteration is already ordered by origin
        Id next = 1;
        for (auto& rec : out) rec.id = next++;
        return out;
    }
};

// Emits the regular/branch records of one finite-order component.
// `condensed` selects the construction-case indices; the adjusted stage
// reports what the raw finite-order map pins down and leaves the rest
// indeterminate.
void emit_finite_order_records(InventoryBuilder& inv, const GraphView& view,
                               const Orbit& orb, bool condensed) {
    const SurfacePiece& rep = view.rep_piece(orb);
    const FiniteOrderData& fo = rep.fo();
    long long ell = orb.length();
    long long m = fo.period;
    int chi = euler_characteristic(rep);
    int chi_star = quotient_euler(chi, fo.period, fo.branch_points);
    bool has_branch = !fo.branch_points.empty();

    if (!has_branch || !condensed) {
        OrbitRecord reg;
        reg.type = OrbitType::FiniteOrderRegular;
        reg.period = ell * m;
        reg.points_per_orbit = reg.period;
        reg.origin = {OrbitOrigin::Kind::Component, orb.representative(), 0};
        if (!has_branch) {
            if (chi_star >= 0)
                throw StructuralError("finite-order component without branch points needs "
                                      "negative quotient characteristic");
            reg.index = OrbitIndex::integer(chi_star);
        } else {
            // regular class of a branch-bearing component: not closed in M,
            // no index is defined
            reg.index = OrbitIndex::indeterminate();
        }
        reg.aggregate = !condensed;
        inv.add(std::move(reg));
    }

    for (size_t i = 0; i < fo.branch_points.size(); ++i) {
        const BranchPoint& bp = fo.branch_points[i];
        OrbitRecord br;
        br.type = OrbitType::FiniteOrderBranch;
        br.period = checked_div(ell * m, bp.local_order, "branch orbit period");
        br.points_per_orbit = br.period;
        br.origin = {OrbitOrigin::Kind::Branch, orb.representative(), static_cast<int>(i)};
        if (condensed) {
            IndexSpec spec = branch_sector_spec(i, fo.branch_points.size(), chi_star, bp);
            br.index = OrbitIndex::integer(branched_lift_index(spec));
        } else {
            br.index = bp.rotated ? OrbitIndex::integer(1) : OrbitIndex::indeterminate();
        }
        inv.add(std::move(br));
    }
}

// Boundary/peripheral records of pA circle orbits. Seam-glued pairs emit a
// single merged record; pinch and collapse seams were absorbed during
// condensation and emit nothing.
void emit_circle_records(InventoryBuilder& inv, const GraphView& view,
                         const std::map<Id, CollapseRecord>& collapses) {
    std::set<Id> done;
    for (const auto& orb : view.dec.circles) {
        Id rep = orb.representative();
        if (done.count(rep)) continue;
        const BoundaryCircle* c = view.g.circle(rep);
        if (!c) continue;
        const SurfacePiece* owner = view.g.piece(c->owner);
        if (!owner || !owner->is_pa()) continue;

        OrbitType type = OrbitType::PeripheralPA;
        Id origin_subject = rep;
        if (c->attachment.kind == Attachment::Kind::Free) {
            type = OrbitType::BoundaryPA;
        } else if (c->attachment.kind == Attachment::Kind::Seam) {
            if (c->attachment.seam_kind != SeamKind::Glue) continue;  // absorbed
            auto pit = view.circle_orbit.find(c->attachment.partner);
            if (pit == view.circle_orbit.end())
                throw StructuralError("seam partner has no circle orbit");
            Id partner_rep = pit->second->representative();
            origin_subject = std::min(rep, partner_rep);
            done.insert(partner_rep);
        }
        done.insert(rep);

        auto cit = collapses.find(rep);
        if (cit == collapses.end())
            throw StructuralError("pA circle " + std::to_string(rep) +
                                  " has no boundary collapse record");
        OrbitRecord rec;
        rec.type = type;
        rec.period = cit->second.ambient_period;
        rec.points_per_orbit = rec.period;
        rec.index = OrbitIndex::nonzero();
        rec.origin = {OrbitOrigin::Kind::Circle, origin_subject, 0};
        inv.add(std::move(rec));
    }
}

void emit_census_records(InventoryBuilder& inv, const GraphView& view,
                         long long max_period, const CensusOverride* census,
                         bool* complete) {
    for (const auto& orb : view.dec.pieces) {
        const SurfacePiece& rep = view.rep_piece(orb);
        if (!rep.is_pa()) continue;
        const std::map<int, long long>* table = nullptr;
        if (census) {
            auto it = census->find(rep.id);
            if (it != census->end()) table = &it->second;
        }
        if (!table && rep.pa().has_census) table = &rep.pa().interior_census;
        if (!table) {
            if (complete) *complete = false;
            continue;
        }
        for (const auto& [return_period, count] : *table) {
            long long ambient = orb.length() * static_cast<long long>(return_period);
            if (ambient > max_period || count <= 0) continue;
            for (long long j = 0; j < count; ++j) {
                OrbitRecord rec;
                rec.type = OrbitType::InteriorPA;
                rec.period = ambient;
                rec.points_per_orbit = ambient;
                rec.index = OrbitIndex::nonzero();
                rec.origin = {OrbitOrigin::Kind::Census, rep.id,
                              static_cast<long long>(return_period) * 1000000000LL + j};
                inv.add(std::move(rec));
            }
        }
    }
}

CollapseRecord make_collapse_record(const GraphView& view, const BoundaryCircle& c,
                                    const AdjustOptions& opts) {
    if (!c.rotation)
        throw RewriteError("pA circle " + std::to_string(c.id) +
                           " has no rotation number; rewrite refused");
    CollapseRecord rec;
    rec.orbit = boundary_orbit_structure(c.prongs, *c.rotation);
    auto it = opts.per_circle.find(c.id);
    rec.choice = it != opts.per_circle.end() ? it->second : opts.default_choice;
    rec.circle_orbit_length = view.circle_orbit.at(c.id)->length();
    rec.ambient_period = rec.circle_orbit_length * rec.orbit.period;
    return rec;
}

} // namespace

// ---------------------------------------------------------------------------
// adjust
// ---------------------------------------------------------------------------

AdjustedGraph adjust(const ComponentGraph& input, const AdjustOptions& opts) {
    GraphView view(input);

    // refuse indeterminate twist data up front
    std::vector<Id> indeterminate;
    for (const auto& [aid, tc] : view.twist)
        if (tc.indeterminate()) indeterminate.push_back(aid);
    if (!indeterminate.empty()) {
        std::ostringstream msg;
        msg << "twist class indeterminate for annuli:";
        for (Id id : indeterminate) msg << " " << id;
        msg << " (side rotations unspecified)";
        throw RewriteError(msg.str());
    }

    AdjustedGraph out;
    out.graph = input;

    // ---- eliminate untwisted annuli between finite-order pieces ----------
    std::set<Id> doomed_annuli;
    std::map<Id, Id> merge_parent;                // union-find over piece ids
    std::function<Id(Id)> find_root = [&](Id x) {
        while (merge_parent[x] != x) x = merge_parent[x] = merge_parent[merge_parent[x]];
        return x;
    };
    for (const auto& p : input.pieces) merge_parent[p.id] = p.id;

    for (const auto& a : input.annuli) {
        if (!view.twist.at(a.id).untwisted() || a.flipped) continue;
        const BoundaryCircle* c0 = input.circle(a.sides[0]);
        const BoundaryCircle* c1 = input.circle(a.sides[1]);
        if (!c0 || !c1) throw StructuralError("annulus side refers to unknown circle");
        const SurfacePiece* p0 = input.piece(c0->owner);
        const SurfacePiece* p1 = input.piece(c1->owner);
        if (!p0 || !p1) throw StructuralError("circle owner missing");
        if (!p0->is_finite_order() || !p1->is_finite_order()) continue;
        if (p0->fo().period != p1->fo().period)
            throw StructuralError("untwisted annulus " + std::to_string(a.id) +
                                  " joins finite-order pieces of unequal period");
        doomed_annuli.insert(a.id);
        merge_parent[find_root(p0->id)] = find_root(p1->id);
    }

    if (!doomed_annuli.empty()) {
        // circles consumed by the merge disappear
        std::set<Id> doomed_circles;
        for (Id aid : doomed_annuli) {
            const AnnulusRecord* a = input.annulus(aid);
            doomed_circles.insert(a->sides[0]);
            doomed_circles.insert(a->sides[1]);
        }

        std::map<Id, std::vector<const SurfacePiece*>> groups;   // root -> members
        for (const auto& p : input.pieces) groups[find_root(p.id)].push_back(&p);

        std::map<Id, Id> piece_to_merged;
        std::vector<SurfacePiece> new_pieces;
        for (auto& [root, members] : groups) {
            Id new_id = members.front()->id;
            for (const auto* p : members) new_id = std::min(new_id, p->id);
            for (const auto* p : members) piece_to_merged[p->id] = new_id;

            if (members.size() == 1 &&
                std::none_of(members.front()->boundary.begin(), members.front()->boundary.end(),
                             [&](const BoundaryCircle& c) { return doomed_circles.count(c.id); })) {
                new_pieces.push_back(*members.front());
                continue;
            }

            std::sort(members.begin(), members.end(),
                      [](const SurfacePiece* a, const SurfacePiece* b) { return a->id < b->id; });
            SurfacePiece merged;
            merged.id = new_id;
            int chi = 0;   // additive under the gluing; annuli carry chi = 0
            FiniteOrderData fo;
            fo.period = members.front()->fo().period;
            for (const auto* p : members) {
                chi += euler_characteristic(*p);
                for (const auto& c : p->boundary) {
                    if (doomed_circles.count(c.id)) continue;
                    BoundaryCircle kept = c;
                    kept.owner = new_id;
                    merged.boundary.push_back(kept);
                }
                for (const auto& bp : p->fo().branch_points) fo.branch_points.push_back(bp);
            }
            int b = static_cast<int>(merged.boundary.size());
            int two_g = 2 - chi - b;
            if (two_g % 2 != 0)
                throw StructuralError("merge produced non-integral genus");
            merged.genus = two_g / 2;
            merged.data = fo;
            std::sort(merged.boundary.begin(), merged.boundary.end(),
                      [](const BoundaryCircle& x, const BoundaryCircle& y) { return x.id < y.id; });
            new_pieces.push_back(std::move(merged));

            LogEvent ev;
            ev.kind = "fo-merge";
            for (const auto* p : members) ev.ids.push_back(p->id);
            ev.note = "merged into piece " + std::to_string(new_id) + " of period " +
                      std::to_string(fo.period);
            out.log.push_back(std::move(ev));
        }

        ComponentGraph g2;
        g2.pieces = std::move(new_pieces);
        for (const auto& a : input.annuli)
            if (!doomed_annuli.count(a.id)) g2.annuli.push_back(a);
        for (const auto& [from, to] : input.piece_map) {
            Id nf = piece_to_merged.at(from), nt = piece_to_merged.at(to);
            auto it = g2.piece_map.find(nf);
            if (it != g2.piece_map.end() && it->second != nt)
                throw StructuralError("merge is not equivariant under the action");
            g2.piece_map[nf] = nt;
        }
        for (const auto& [from, to] : input.annulus_map)
            if (!doomed_annuli.count(from)) g2.annulus_map[from] = to;
        for (const auto& [from, to] : input.circle_map)
            if (!doomed_circles.count(from)) g2.circle_map[from] = to;
        g2.sort_records();
        out.graph = std::move(g2);
    }

    // ---- annulus interiors and boundary collapse records ------------------
    GraphView final_view(out.graph);
    for (const auto& a : out.graph.annuli) {
        AnnulusInterior interior;
        if (a.flipped) {
            interior.kind = AnnulusInterior::Kind::TwoOrbits;
            interior.period = a.return_time;
            interior.indices = {1, 1};
        }
        out.interiors[a.id] = interior;
    }
    for (const auto& p : out.graph.pieces) {
        if (!p.is_pa()) continue;
        for (const auto& c : p.boundary)
            out.collapses[c.id] = make_collapse_record(final_view, c, opts);
    }
    return out;
}

// ---------------------------------------------------------------------------
// condense
// ---------------------------------------------------------------------------

namespace {

struct Condenser {
    const AdjustedGraph& in;
    GraphView view;
    InventoryBuilder inv;
    CondensedGraph out;

    explicit Condenser(const AdjustedGraph& adjusted)
        : in(adjusted), view(adjusted.graph) {}

    void log(std::string kind, std::vector<Id> ids, std::string note) {
        out.identification_log.push_back({std::move(kind), std::move(ids), std::move(note)});
    }

    int dispatch_case(const Orbit& orb) {
        const SurfacePiece& rep = view.rep_piece(orb);
        bool branch = !rep.fo().branch_points.empty();
        bool untw = view.component_has_untwisted_circle(orb);
        if (!branch && !untw) return 1;
        if (!branch && untw) return 2;
        if (branch && !untw) return 3;
        return 4;
    }

    void finite_order_components() {
        for (const auto& orb : view.dec.pieces) {
            const SurfacePiece& rep = view.rep_piece(orb);
            if (rep.is_pa()) {
                log("case", {rep.id}, "case 5: pA component passes through");
                continue;
            }
            int c = dispatch_case(orb);
            log("case", {rep.id}, "case " + std::to_string(c));
            emit_finite_order_records(inv, view, orb, /*condensed=*/true);
            if (c == 2 || c == 4)
                log("trim", {rep.id},
                    "quotient regions outside the circle bouquet removed (log only)");
        }
    }

    void circle_records() {
        emit_circle_records(inv, view, in.collapses);
        // the two non-conjugate boundary collapses are a genuine choice;
        // record which one each fixed-rotation circle orbit took
        for (const auto& orb : view.dec.circles) {
            auto it = in.collapses.find(orb.representative());
            if (it == in.collapses.end() || !it->second.orbit.has_collapse_choice) continue;
            log("collapse-choice", {orb.representative()},
                it->second.choice == CollapseChoice::Left ? "left" : "right");
        }
    }

    // Target record a collapsed pA boundary orbit coalesces into: the
    // regular record for a branch-free component, the bouquet-center branch
    // record otherwise.
    OrbitOrigin finite_order_target(const Orbit& comp) {
        const SurfacePiece& rep = view.rep_piece(comp);
        if (rep.fo().branch_points.empty())
            return {OrbitOrigin::Kind::Component, comp.representative(), 0};
        return {OrbitOrigin::Kind::Branch, comp.representative(), 0};
    }

    OrbitOrigin circle_record_origin(Id circle_id) {
        Id rep = view.circle_orbit.at(circle_id)->representative();
        const BoundaryCircle* c = view.g.circle(rep);
        if (c && c->attachment.kind == Attachment::Kind::Seam &&
            c->attachment.seam_kind == SeamKind::Glue) {
            Id partner_rep = view.circle_orbit.at(c->attachment.partner)->representative();
            rep = std::min(rep, partner_rep);
        }
        return {OrbitOrigin::Kind::Circle, rep, 0};
    }

    void seam_circles(const Orbit& annulus_orbit, SeamKind kind) {
        for (Id aid : annulus_orbit.ids) {
            const AnnulusRecord* a = view.g.annulus(aid);
            BoundaryCircle* c0 = out.graph.circle(a->sides[0]);
            BoundaryCircle* c1 = out.graph.circle(a->sides[1]);
            if (!c0 || !c1) throw StructuralError("seam: missing side circle");
            c0->attachment = Attachment::seam(c1->id, kind);
            c1->attachment = Attachment::seam(c0->id, kind);
        }
    }

    void drop_annulus_orbit(const Orbit& orb) {
        std::set<Id> ids(orb.ids.begin(), orb.ids.end());
        auto& annuli = out.graph.annuli;
        annuli.erase(std::remove_if(annuli.begin(), annuli.end(),
                                    [&](const AnnulusRecord& a) { return ids.count(a.id); }),
                     annuli.end());
        for (Id id : orb.ids) out.graph.annulus_map.erase(id);
    }

    void annulus_orbits() {
        for (const auto& orb : view.dec.annuli) {
            const AnnulusRecord* a = view.g.annulus(orb.representative());
            TwistClass tc = view.twist.at(a->id);
            const BoundaryCircle* c0 = view.g.circle(a->sides[0]);
            const BoundaryCircle* c1 = view.g.circle(a->sides[1]);
            const SurfacePiece* p0 = view.g.piece(c0->owner);
            const SurfacePiece* p1 = view.g.piece(c1->owner);
            long long n = orb.length();

            if (tc.twisted()) {
                if (a->flipped) emit_flip_records(orb, n, /*pinched=*/false);
                log("keep", {a->id}, a->flipped ? "twisted flipped annulus kept"
                                                : "twisted annulus kept, interior empty");
                continue;
            }

            // untwisted from here on
            if (p0->is_finite_order() && p1->is_finite_order())
                throw StructuralError("untwisted annulus between finite-order components "
                                      "survived adjustment");

            if (a->flipped) {
                if (!p0->is_pa() || !p1->is_pa())
                    throw StructuralError("flipped untwisted annulus must join pA components");
                // pinch: boundary orbit (period 2n) is identified with the
                // interior orbit at the pinch point (period n)
                OrbitOrigin boundary = circle_record_origin(a->sides[0]);
                auto [pinch, companion] = emit_flip_records(orb, n, /*pinched=*/true);
                inv.absorb(boundary, pinch);
                (void)companion;
                seam_circles(orb, SeamKind::Pinch);
                drop_annulus_orbit(orb);
                log("pinch", orb.ids,
                    "boundary orbit of period " + std::to_string(2 * n) +
                        " collapsed onto the interior orbit of period " + std::to_string(n));
                continue;
            }

            if (p0->is_pa() && p1->is_pa()) {
                OrbitOrigin o0 = circle_record_origin(a->sides[0]);
                OrbitOrigin o1 = circle_record_origin(a->sides[1]);
                if (!(o0 == o1)) {
                    OrbitOrigin keep = std::min(o0, o1), drop = std::max(o0, o1);
                    OrbitRecord* kept = inv.find(keep);
                    OrbitRecord* dropped = inv.find(drop);
                    if (!kept || !dropped) throw StructuralError("pa-glue: missing records");
                    if (kept->period != dropped->period)
                        throw StructuralError("pa-glue: the two boundary orbits disagree on period");
                    inv.absorb(drop, keep);
                    // the kept record stays peripheral: the seam is an interior curve
                    kept->type = OrbitType::PeripheralPA;
                }
                seam_circles(orb, SeamKind::Glue);
                drop_annulus_orbit(orb);
                log("pa-glue", orb.ids, "boundaries glued, annulus eliminated");
                continue;
            }

            // pA against finite-order
            const BoundaryCircle* pa_circle = p0->is_pa() ? c0 : c1;
            const SurfacePiece* fo_piece = p0->is_pa() ? p1 : p0;
            const Orbit* comp = view.piece_orbit.at(fo_piece->id);
            OrbitOrigin source = circle_record_origin(pa_circle->id);
            OrbitOrigin target = finite_order_target(*comp);
            inv.absorb(source, target);
            seam_circles(orb, SeamKind::Collapse);
            drop_annulus_orbit(orb);
            log("fo-glue", orb.ids,
                "peripheral pA orbit coalesced into the " +
                    std::string(view.rep_piece(*comp).fo().branch_points.empty()
                                    ? "regular class"
                                    : "branch-point class") +
                    " of component " + std::to_string(comp->representative()));
        }
    }

    std::pair<OrbitOrigin, OrbitOrigin> emit_flip_records(const Orbit& orb, long long n,
                                                          bool pinched) {
        const AnnulusInterior* interior = nullptr;
        auto it = in.interiors.find(orb.representative());
        if (it != in.interiors.end()) interior = &it->second;
        if (!interior || interior->kind != AnnulusInterior::Kind::TwoOrbits)
            throw StructuralError("flipped annulus without a two-orbit interior record");

        auto kind = pinched ? OrbitOrigin::Kind::Retained : OrbitOrigin::Kind::FlipInterior;
        OrbitOrigin po{kind, orb.representative(), 0};
        OrbitOrigin co{kind, orb.representative(), 1};
        for (int i = 0; i < 2; ++i) {
            OrbitRecord rec;
            rec.type = OrbitType::FlipAnnulusInterior;
            rec.period = n;
            rec.points_per_orbit = n;
            rec.index = OrbitIndex::integer(interior->indices[i]);
            rec.origin = i == 0 ? po : co;
            inv.add(std::move(rec));
        }
        return {po, co};
    }

    void retained_records() {
        for (const auto& rec : in.retained) {
            OrbitRecord copy = rec;
            copy.origin.kind = OrbitOrigin::Kind::Retained;
            inv.add(std::move(copy));
        }
    }

    CondensedGraph run() {
        out.graph = in.graph;
        finite_order_components();
        circle_records();
        annulus_orbits();
        retained_records();
        out.orbit_inventory = inv.finalize();
        for (const auto& rec : out.orbit_inventory)
            if (!rec.index.known_nonzero())
                throw StructuralError("condensed inventory contains a zero/unknown index");
        out.graph.sort_records();
        return std::move(out);
    }
};

} // namespace

CondensedGraph condense(const AdjustedGraph& adjusted) {
    Condenser c(adjusted);
    return c.run();
}

CondensedGraph condense(const CondensedGraph& condensed, const AdjustOptions& opts) {
    AdjustedGraph again = adjust(condensed.graph, opts);
    for (const auto& rec : condensed.orbit_inventory)
        if (rec.origin.kind == OrbitOrigin::Kind::Retained) again.retained.push_back(rec);
    CondensedGraph out = condense(again);
    // keep the coalescing provenance recorded by an earlier pass
    for (auto& rec : out.orbit_inventory) {
        for (const auto& prev : condensed.orbit_inventory) {
            if (!(prev.origin == rec.origin)) continue;
            for (const auto& origin : prev.absorbed) rec.absorbed.push_back(origin);
            std::sort(rec.absorbed.begin(), rec.absorbed.end());
            rec.absorbed.erase(std::unique(rec.absorbed.begin(), rec.absorbed.end()),
                               rec.absorbed.end());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Inventories
// ---------------------------------------------------------------------------

namespace {

Inventory build_inventory(std::vector<OrbitRecord> all, long long max_period,
                          bool census_complete) {
    Inventory inv;
    inv.census_complete = census_complete;
    for (auto& rec : all) {
        if (rec.period > max_period) continue;
        auto& line = inv.per_period[rec.period];
        if (rec.origin.kind == OrbitOrigin::Kind::Census)
            ++line.census;
        else
            ++line.structural;
        line.exact = census_complete;
        inv.orbits.push_back(std::move(rec));
    }
    Id next = 1;
    for (auto& rec : inv.orbits) rec.id = next++;
    return inv;
}

} // namespace

Inventory periodic_inventory(const CondensedGraph& g, long long max_period,
                             const CensusOverride* census) {
    GraphView view(g.graph);
    InventoryBuilder builder;
    for (const auto& rec : g.orbit_inventory) {
        OrbitRecord copy = rec;
        copy.id = -1;
        builder.add(std::move(copy));
    }
    bool complete = true;
    emit_census_records(builder, view, max_period, census, &complete);
    return build_inventory(builder.finalize(), max_period, complete);
}

Inventory adjusted_inventory(const AdjustedGraph& g, long long max_period,
                             const CensusOverride* census) {
    GraphView view(g.graph);
    InventoryBuilder builder;
    for (const auto& orb : view.dec.pieces) {
        if (view.rep_piece(orb).is_pa()) continue;
        emit_finite_order_records(builder, view, orb, /*condensed=*/false);
    }
    emit_circle_records(builder, view, g.collapses);
    for (const auto& orb : view.dec.annuli) {
        const AnnulusRecord* a = view.g.annulus(orb.representative());
        if (!a->flipped) continue;
        auto it = g.interiors.find(orb.representative());
        if (it == g.interiors.end() || it->second.kind != AnnulusInterior::Kind::TwoOrbits)
            throw StructuralError("flipped annulus lacks its interior record");
        for (int i = 0; i < 2; ++i) {
            OrbitRecord rec;
            rec.type = OrbitType::FlipAnnulusInterior;
            rec.period = orb.length();
            rec.points_per_orbit = rec.period;
            rec.index = OrbitIndex::integer(it->second.indices[i]);
            rec.origin = {OrbitOrigin::Kind::FlipInterior, orb.representative(), i};
            builder.add(std::move(rec));
        }
    }
    for (const auto& rec : g.retained) {
        OrbitRecord copy = rec;
        copy.origin.kind = OrbitOrigin::Kind::Retained;
        builder.add(std::move(copy));
    }
    bool complete = true;
    emit_census_records(builder, view, max_period, census, &complete);
    return build_inventory(builder.finalize(), max_period, complete);
}

} // namespace tnsurf
