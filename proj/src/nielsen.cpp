#include "tnsurf/nielsen.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>

namespace tnsurf {

std::string tri_name(Tri t) {
    switch (t) {
        case Tri::No: return "no";
        case Tri::Yes: return "yes";
        case Tri::Unknown: return "indeterminate";
    }
    return "?";
}

void RelationSet::canonicalize() {
    std::sort(nodes.begin(), nodes.end(),
              [](const RelNode& a, const RelNode& b) { return a.id < b.id; });
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (auto& e : pn)
        if (e.a > e.b) std::swap(e.a, e.b);
    std::sort(pn.begin(), pn.end());
    pn.erase(std::unique(pn.begin(), pn.end()), pn.end());
    std::sort(collapse.begin(), collapse.end());
    collapse.erase(std::unique(collapse.begin(), collapse.end()), collapse.end());
}

// ---------------------------------------------------------------------------
// Generator edges
// ---------------------------------------------------------------------------

namespace {

struct EdgeBuilder {
    const ComponentGraph& g;
    const Inventory& inv;
    OrbitDecomposition dec;
    std::map<OrbitOrigin, Id> node_of;
    std::map<Id, const Orbit*> piece_orbit;
    std::map<Id, const Orbit*> circle_orbit;
    RelationSet rels;

    EdgeBuilder(const ComponentGraph& graph, const Inventory& inventory)
        : g(graph), inv(inventory), dec(orbit_decomposition(graph)) {
        for (const auto& rec : inv.orbits) {
            node_of[rec.origin] = rec.id;
            rels.nodes.push_back({rec.id, rec.period});
        }
        for (const auto& orb : dec.pieces)
            for (Id id : orb.ids) piece_orbit[id] = &orb;
        for (const auto& orb : dec.circles)
            for (Id id : orb.ids) circle_orbit[id] = &orb;
    }

    // Both endpoints must survive the period filter for an edge to appear.
    std::optional<Id> lookup(const OrbitOrigin& origin) const {
        auto it = node_of.find(origin);
        if (it == node_of.end()) return std::nullopt;
        return it->second;
    }

    std::optional<Id> circle_node(Id circle_id) const {
        const BoundaryCircle* c = g.circle(circle_id);
        if (!c) return std::nullopt;
        Id rep = circle_orbit.at(circle_id)->representative();
        if (c->attachment.kind == Attachment::Kind::Seam &&
            c->attachment.seam_kind == SeamKind::Glue) {
            Id partner_rep = circle_orbit.at(c->attachment.partner)->representative();
            rep = std::min(rep, partner_rep);
        }
        return lookup({OrbitOrigin::Kind::Circle, rep, 0});
    }

    // pA side: the boundary orbit node; finite-order side: the component's
    // regular class node (peripheral finite-order points are regular).
    std::optional<Id> side_node(Id circle_id) const {
        const BoundaryCircle* c = g.circle(circle_id);
        if (!c) return std::nullopt;
        const SurfacePiece* owner = g.piece(c->owner);
        if (!owner) return std::nullopt;
        if (owner->is_pa()) return circle_node(circle_id);
        Id comp = piece_orbit.at(owner->id)->representative();
        return lookup({OrbitOrigin::Kind::Component, comp, 0});
    }

    void add_pn(Id a, Id b) {
        if (a == b) return;
        rels.pn.push_back({std::min(a, b), std::max(a, b)});
    }

    void add_collapse(Id from, Id to, long long mult) {
        rels.collapse.push_back({from, to, mult});
    }

    // regular -| branch inside each finite-order component
    void finite_order_edges() {
        for (const auto& orb : dec.pieces) {
            const SurfacePiece* rep = g.piece(orb.representative());
            if (!rep || !rep->is_finite_order()) continue;
            auto reg = lookup({OrbitOrigin::Kind::Component, orb.representative(), 0});
            if (!reg) continue;
            for (size_t i = 0; i < rep->fo().branch_points.size(); ++i) {
                auto br = lookup({OrbitOrigin::Kind::Branch, orb.representative(),
                                  static_cast<long long>(i)});
                if (!br) continue;
                add_collapse(*reg, *br, rep->fo().branch_points[i].local_order);
            }
        }
    }

    // pn across untwisted unflipped annuli; boundary -| pinch across
    // untwisted flipped annuli. Twisted annuli relate nothing.
    void annulus_edges() {
        std::set<Id> seen;
        for (const auto& a : g.annuli) {
            Id rep = -1;
            for (Id id : orbit_of(g.annulus_map, a.id)) rep = rep < 0 ? id : std::min(rep, id);
            if (seen.count(rep)) continue;
            seen.insert(rep);
            TwistClass tc = classify_annulus(a);
            if (!tc.untwisted()) continue;
            if (!a.flipped) {
                auto n0 = side_node(a.sides[0]);
                auto n1 = side_node(a.sides[1]);
                if (n0 && n1) add_pn(*n0, *n1);
            } else {
                auto boundary = circle_node(a.sides[0]);
                auto pinch = lookup({OrbitOrigin::Kind::FlipInterior, rep, 0});
                if (boundary && pinch) add_collapse(*boundary, *pinch, 2);
            }
        }
    }

    RelationSet run() {
        finite_order_edges();
        annulus_edges();
        rels.canonicalize();
        return std::move(rels);
    }
};

} // namespace

RelationSet base_relations(const AdjustedGraph& g, long long max_period,
                           const CensusOverride* census) {
    Inventory inv = adjusted_inventory(g, max_period, census);
    EdgeBuilder builder(g.graph, inv);
    return builder.run();
}

RelationSet base_relations(const CondensedGraph& g, long long max_period,
                           const CensusOverride* census) {
    Inventory inv = periodic_inventory(g, max_period, census);
    EdgeBuilder builder(g.graph, inv);
    return builder.run();
}

// ---------------------------------------------------------------------------
// Closure
// ---------------------------------------------------------------------------

RelationSet close_relations(const RelationSet& rels) {
    std::map<Id, long long> period;
    for (const auto& n : rels.nodes) period[n.id] = n.period;

    auto require = [&](Id id) {
        if (!period.count(id))
            throw StructuralError("relation edge references unknown node " + std::to_string(id));
    };
    for (const auto& e : rels.pn) {
        require(e.a);
        require(e.b);
        if (period[e.a] != period[e.b])
            throw StructuralError("pn edge joins unequal periods " +
                                  std::to_string(period[e.a]) + " and " +
                                  std::to_string(period[e.b]));
    }
    for (const auto& e : rels.collapse) {
        require(e.from);
        require(e.to);
        if (period[e.to] <= 0 || period[e.from] % period[e.to] != 0 ||
            period[e.from] <= period[e.to])
            throw StructuralError("collapse edge is not strictly period-dividing");
    }

    // pn: union-find
    std::map<Id, Id> parent;
    for (const auto& n : rels.nodes) parent[n.id] = n.id;
    std::function<Id(Id)> find = [&](Id x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : rels.pn) parent[find(e.a)] = find(e.b);

    std::map<Id, std::vector<Id>> members;   // root -> sorted members
    for (const auto& n : rels.nodes) members[find(n.id)].push_back(n.id);

    // collapse on pn-classes, then transitive closure (periods strictly
    // decrease along collapse edges, so the class graph is a DAG)
    std::map<Id, std::set<Id>> succ;
    for (const auto& e : rels.collapse) succ[find(e.from)].insert(find(e.to));
    std::map<Id, std::set<Id>> reach;
    std::function<const std::set<Id>&(Id)> reachable = [&](Id root) -> const std::set<Id>& {
        auto it = reach.find(root);
        if (it != reach.end()) return it->second;
        std::set<Id> acc;
        for (Id next : succ[root]) {
            acc.insert(next);
            const auto& deeper = reachable(next);
            acc.insert(deeper.begin(), deeper.end());
        }
        return reach.emplace(root, std::move(acc)).first->second;
    };

    RelationSet out;
    out.nodes = rels.nodes;
    for (const auto& [root, group] : members)
        for (size_t i = 0; i < group.size(); ++i)
            for (size_t j = i + 1; j < group.size(); ++j)
                out.pn.push_back({group[i], group[j]});
    for (const auto& [root, group] : members) {
        for (Id target_root : reachable(root)) {
            for (Id x : group)
                for (Id z : members[target_root])
                    out.collapse.push_back({x, z, period[x] / period[z]});
        }
    }
    out.canonicalize();
    return out;
}

// ---------------------------------------------------------------------------
// Classes
// ---------------------------------------------------------------------------

bool collapsible(const NielsenClassRecord& cls, const RelationSet& closed) {
    std::set<Id> member_set(cls.members.begin(), cls.members.end());
    for (const auto& e : closed.collapse)
        if (member_set.count(e.from)) return true;
    return false;
}

Tri essential(const NielsenClassRecord& cls) {
    switch (cls.index.tag) {
        case OrbitIndex::Tag::Integer: return cls.index.value != 0 ? Tri::Yes : Tri::No;
        case OrbitIndex::Tag::NonzeroSymbolic: return Tri::Yes;
        case OrbitIndex::Tag::Indeterminate: return Tri::Unknown;
    }
    return Tri::Unknown;
}

namespace {

long long point_subclass_count(const ComponentGraph& g, const OrbitRecord& rec) {
    switch (rec.type) {
        case OrbitType::FiniteOrderRegular:
            return 1;   // all regular points of a component are equivalent
        case OrbitType::BoundaryPA:
        case OrbitType::PeripheralPA: {
            // points on one circle are equivalent; one class per circle visited
            if (rec.origin.kind == OrbitOrigin::Kind::Circle && g.circle(rec.origin.subject)) {
                try {
                    return static_cast<long long>(orbit_of(g.circle_map, rec.origin.subject).size());
                } catch (const StructuralError&) {
                    return 1;
                }
            }
            return 1;
        }
        default:
            return rec.points_per_orbit;   // each point is alone in its class
    }
}

PersistenceReport build_report(const ComponentGraph& graph, Inventory inv, RelationSet base) {
    PersistenceReport report;
    report.closed = close_relations(base);
    report.inventory = std::move(inv);

    std::map<Id, const OrbitRecord*> record_of;
    for (const auto& rec : report.inventory.orbits) record_of[rec.id] = &rec;

    // pn classes from the closed set
    std::map<Id, Id> parent;
    for (const auto& n : report.closed.nodes) parent[n.id] = n.id;
    std::function<Id(Id)> find = [&](Id x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : report.closed.pn) parent[find(e.a)] = find(e.b);
    std::map<Id, std::vector<Id>> groups;
    for (const auto& n : report.closed.nodes) groups[find(n.id)].push_back(n.id);

    Id next = 1;
    for (auto& [root, ids] : groups) {
        std::sort(ids.begin(), ids.end());
        NielsenClassRecord cls;
        cls.id = next++;
        cls.members = ids;
        cls.period = record_of.at(ids.front())->period;

        bool any_symbolic = false, any_indeterminate = false;
        long long sum = 0;
        long long subclasses = 0;
        for (Id id : ids) {
            const OrbitRecord* rec = record_of.at(id);
            switch (rec->index.tag) {
                case OrbitIndex::Tag::Integer: sum += rec->index.value; break;
                case OrbitIndex::Tag::NonzeroSymbolic: any_symbolic = true; break;
                case OrbitIndex::Tag::Indeterminate: any_indeterminate = true; break;
            }
            subclasses += point_subclass_count(graph, *rec);
        }
        cls.point_subclasses = subclasses;
        if (any_indeterminate)
            cls.index = OrbitIndex::indeterminate();
        else if (any_symbolic)
            cls.index = ids.size() == 1 ? OrbitIndex::nonzero() : OrbitIndex::indeterminate();
        else
            cls.index = OrbitIndex::integer(sum);

        cls.collapsible = collapsible(cls, report.closed);
        cls.essential = essential(cls);
        cls.persistent = cls.collapsible ? Tri::No : cls.essential;
        cls.unremovable = cls.persistent;
        report.classes.push_back(std::move(cls));
    }
    return report;
}

} // namespace

PersistenceReport persistence_report(const AdjustedGraph& g, long long max_period,
                                     const CensusOverride* census) {
    Inventory inv = adjusted_inventory(g, max_period, census);
    EdgeBuilder builder(g.graph, inv);
    return build_report(g.graph, std::move(inv), builder.run());
}

PersistenceReport persistence_report(const CondensedGraph& g, long long max_period,
                                     const CensusOverride* census) {
    Inventory inv = periodic_inventory(g, max_period, census);
    EdgeBuilder builder(g.graph, inv);
    return build_report(g.graph, std::move(inv), builder.run());
}

// ---------------------------------------------------------------------------
// PON counts
// ---------------------------------------------------------------------------

PonCount pon_count(const PersistenceReport& report, long long n, bool census_complete) {
    PonCount out;
    out.exact = census_complete;
    for (const auto& cls : report.classes)
        if (cls.period == n && cls.persistent == Tri::Yes) ++out.count;
    return out;
}

PonCount pon_count(const CondensedGraph& g, long long n, const CensusOverride* census) {
    PersistenceReport report = persistence_report(g, n, census);
    return pon_count(report, n, report.inventory.census_complete);
}

PonCount pon_count(const AdjustedGraph& g, long long n, const CensusOverride* census) {
    PersistenceReport report = persistence_report(g, n, census);
    return pon_count(report, n, report.inventory.census_complete);
}

} // namespace tnsurf
