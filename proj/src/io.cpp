#include "tnsurf/io.hpp"

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace tnsurf {

namespace {

Id to_id(const std::string& key) {
    try {
        return std::stoll(key);
    } catch (...) {
        throw ParseError("expected a numeric id, got '" + key + "'");
    }
}

json perm_json(const std::map<Id, Id>& perm) {
    json out = json::object();
    for (const auto& [from, to] : perm) out[std::to_string(from)] = to;
    return out;
}

std::map<Id, Id> parse_perm(const json& j, const char* what) {
    if (!j.is_object()) throw ParseError(std::string(what) + " permutation must be an object");
    std::map<Id, Id> out;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_number_integer())
            throw ParseError(std::string(what) + " permutation values must be ids");
        out[to_id(key)] = value.get<Id>();
    }
    return out;
}

json rational_json(const Rational& r) { return r.str(); }

Rational parse_rational(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    throw ParseError("rotation must be an integer or a \"p/q\" string");
}

const char* seam_kind_name(SeamKind k) {
    switch (k) {
        case SeamKind::Glue: return "glue";
        case SeamKind::Pinch: return "pinch";
        case SeamKind::Collapse: return "collapse";
    }
    return "?";
}

SeamKind parse_seam_kind(const std::string& s) {
    if (s == "glue") return SeamKind::Glue;
    if (s == "pinch") return SeamKind::Pinch;
    if (s == "collapse") return SeamKind::Collapse;
    throw ParseError("unknown seam kind '" + s + "'");
}

json attachment_json(const Attachment& at) {
    switch (at.kind) {
        case Attachment::Kind::Free: return "free";
        case Attachment::Kind::Annulus: {
            json j = json::object();
            j["annulus"] = at.annulus;
            j["side"] = at.side;
            return j;
        }
        case Attachment::Kind::Seam: {
            json j = json::object();
            j["seam"] = at.partner;
            j["kind"] = seam_kind_name(at.seam_kind);
            return j;
        }
    }
    return "free";
}

Attachment parse_attachment(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "free") return Attachment::free();
        throw ParseError("unknown attachment '" + j.get<std::string>() + "'");
    }
    if (j.is_object()) {
        if (j.contains("annulus"))
            return Attachment::on_annulus(j.at("annulus").get<Id>(), j.at("side").get<int>());
        if (j.contains("seam"))
            return Attachment::seam(j.at("seam").get<Id>(),
                                    parse_seam_kind(j.value("kind", "glue")));
    }
    throw ParseError("attachment must be \"free\", {annulus, side} or {seam, kind}");
}

json origin_json(const OrbitOrigin& o) {
    json j = json::object();
    const char* kind = "?";
    switch (o.kind) {
        case OrbitOrigin::Kind::Component: kind = "component"; break;
        case OrbitOrigin::Kind::Branch: kind = "branch"; break;
        case OrbitOrigin::Kind::Circle: kind = "circle"; break;
        case OrbitOrigin::Kind::FlipInterior: kind = "flip-interior"; break;
        case OrbitOrigin::Kind::Census: kind = "census"; break;
        case OrbitOrigin::Kind::Retained: kind = "retained"; break;
    }
    j["kind"] = kind;
    j["subject"] = o.subject;
    j["sub"] = o.sub;
    return j;
}

OrbitOrigin parse_origin(const json& j) {
    OrbitOrigin o;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "component") o.kind = OrbitOrigin::Kind::Component;
    else if (kind == "branch") o.kind = OrbitOrigin::Kind::Branch;
    else if (kind == "circle") o.kind = OrbitOrigin::Kind::Circle;
    else if (kind == "flip-interior") o.kind = OrbitOrigin::Kind::FlipInterior;
    else if (kind == "census") o.kind = OrbitOrigin::Kind::Census;
    else if (kind == "retained") o.kind = OrbitOrigin::Kind::Retained;
    else throw ParseError("unknown orbit origin kind '" + kind + "'");
    o.subject = j.at("subject").get<Id>();
    o.sub = j.value("sub", 0LL);
    return o;
}

json index_json(const OrbitIndex& idx) {
    if (idx.is_integer()) return idx.value;
    return idx.str();
}

OrbitIndex parse_index(const json& j) {
    if (j.is_number_integer()) return OrbitIndex::integer(j.get<long long>());
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "nonzero") return OrbitIndex::nonzero();
        if (s == "indeterminate") return OrbitIndex::indeterminate();
    }
    throw ParseError("index must be an integer, \"nonzero\" or \"indeterminate\"");
}

OrbitType parse_orbit_type(const std::string& s) {
    if (s == "interior-pa") return OrbitType::InteriorPA;
    if (s == "boundary-pa") return OrbitType::BoundaryPA;
    if (s == "peripheral-pa") return OrbitType::PeripheralPA;
    if (s == "fo-regular") return OrbitType::FiniteOrderRegular;
    if (s == "fo-branch") return OrbitType::FiniteOrderBranch;
    if (s == "flip-interior") return OrbitType::FlipAnnulusInterior;
    throw ParseError("unknown orbit type '" + s + "'");
}

json orbit_record_json(const OrbitRecord& rec) {
    json j = json::object();
    j["id"] = rec.id;
    j["type"] = orbit_type_name(rec.type);
    j["period"] = rec.period;
    j["index"] = index_json(rec.index);
    j["points_per_orbit"] = rec.points_per_orbit;
    j["origin"] = origin_json(rec.origin);
    if (rec.aggregate) j["aggregate"] = true;
    if (!rec.absorbed.empty()) {
        json abs = json::array();
        for (const auto& o : rec.absorbed) abs.push_back(origin_json(o));
        j["absorbed"] = abs;
    }
    return j;
}

OrbitRecord parse_orbit_record(const json& j) {
    OrbitRecord rec;
    rec.id = j.at("id").get<Id>();
    rec.type = parse_orbit_type(j.at("type").get<std::string>());
    rec.period = j.at("period").get<long long>();
    rec.index = parse_index(j.at("index"));
    rec.points_per_orbit = j.value("points_per_orbit", rec.period);
    rec.origin = parse_origin(j.at("origin"));
    rec.aggregate = j.value("aggregate", false);
    if (j.contains("absorbed"))
        for (const auto& o : j.at("absorbed")) rec.absorbed.push_back(parse_origin(o));
    return rec;
}

json log_json(const std::vector<LogEvent>& log) {
    json out = json::array();
    for (const auto& ev : log) {
        json j = json::object();
        j["kind"] = ev.kind;
        j["ids"] = ev.ids;
        j["note"] = ev.note;
        out.push_back(j);
    }
    return out;
}

std::vector<LogEvent> parse_log(const json& j) {
    std::vector<LogEvent> out;
    for (const auto& e : j) {
        LogEvent ev;
        ev.kind = e.at("kind").get<std::string>();
        for (const auto& id : e.at("ids")) ev.ids.push_back(id.get<Id>());
        ev.note = e.value("note", "");
        out.push_back(ev);
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Graph documents
// ---------------------------------------------------------------------------

json graph_json(const ComponentGraph& g) {
    json doc = json::object();
    json pieces = json::array();
    for (const auto& p : g.pieces) {
        json pj = json::object();
        pj["id"] = p.id;
        pj["genus"] = p.genus;
        if (p.is_finite_order()) {
            pj["kind"] = "finite_order";
            pj["period"] = p.fo().period;
            json branch = json::array();
            for (const auto& bp : p.fo().branch_points) {
                json bj = json::object();
                bj["local_order"] = bp.local_order;
                bj["rotated"] = bp.rotated;
                branch.push_back(bj);
            }
            if (!branch.empty()) pj["branch_points"] = branch;
        } else {
            pj["kind"] = "pseudo_anosov";
            pj["expansion"] = p.pa().expansion;
            if (p.pa().has_census) {
                json census = json::object();
                for (const auto& [period, count] : p.pa().interior_census)
                    census[std::to_string(period)] = count;
                pj["census"] = census;
            }
        }
        json boundary = json::array();
        for (const auto& c : p.boundary) {
            json cj = json::object();
            cj["id"] = c.id;
            cj["attachment"] = attachment_json(c.attachment);
            if (c.rotation) cj["rotation"] = rational_json(*c.rotation);
            if (c.prongs > 0) cj["prongs"] = c.prongs;
            boundary.push_back(cj);
        }
        pj["boundary"] = boundary;
        pieces.push_back(pj);
    }
    doc["pieces"] = pieces;

    json annuli = json::array();
    for (const auto& a : g.annuli) {
        json aj = json::object();
        aj["id"] = a.id;
        aj["sides"] = {a.sides[0], a.sides[1]};
        aj["return_time"] = a.return_time;
        aj["flipped"] = a.flipped;
        if (a.side_rotations[0] && a.side_rotations[1])
            aj["rotations"] = {rational_json(*a.side_rotations[0]),
                               rational_json(*a.side_rotations[1])};
        annuli.push_back(aj);
    }
    doc["annuli"] = annuli;

    json perms = json::object();
    perms["pieces"] = perm_json(g.piece_map);
    perms["annuli"] = perm_json(g.annulus_map);
    perms["circles"] = perm_json(g.circle_map);
    doc["permutations"] = perms;
    return doc;
}

namespace {

ComponentGraph parse_graph(const json& doc) {
    ComponentGraph g;
    if (!doc.contains("pieces")) throw ParseError("document has no \"pieces\" array");
    for (const auto& pj : doc.at("pieces")) {
        SurfacePiece p;
        p.id = pj.at("id").get<Id>();
        p.genus = pj.at("genus").get<int>();
        std::string kind = pj.at("kind").get<std::string>();
        if (kind == "finite_order") {
            FiniteOrderData fo;
            fo.period = pj.at("period").get<int>();
            if (pj.contains("branch_points"))
                for (const auto& bj : pj.at("branch_points")) {
                    BranchPoint bp;
                    bp.local_order = bj.at("local_order").get<int>();
                    bp.rotated = bj.value("rotated", false);
                    fo.branch_points.push_back(bp);
                }
            p.data = fo;
        } else if (kind == "pseudo_anosov") {
            PseudoAnosovData pa;
            pa.expansion = pj.at("expansion").get<double>();
            if (pj.contains("census")) {
                pa.has_census = true;
                for (const auto& [key, value] : pj.at("census").items())
                    pa.interior_census[static_cast<int>(to_id(key))] = value.get<long long>();
            }
            p.data = pa;
        } else {
            throw ParseError("piece kind must be finite_order or pseudo_anosov, got '" +
                             kind + "'");
        }
        if (pj.contains("boundary"))
            for (const auto& cj : pj.at("boundary")) {
                BoundaryCircle c;
                c.id = cj.at("id").get<Id>();
                c.owner = p.id;
                c.attachment = parse_attachment(cj.at("attachment"));
                if (cj.contains("rotation")) c.rotation = parse_rational(cj.at("rotation"));
                c.prongs = cj.value("prongs", 0);
                p.boundary.push_back(c);
            }
        g.pieces.push_back(std::move(p));
    }
    if (doc.contains("annuli"))
        for (const auto& aj : doc.at("annuli")) {
            AnnulusRecord a;
            a.id = aj.at("id").get<Id>();
            a.sides = {aj.at("sides").at(0).get<Id>(), aj.at("sides").at(1).get<Id>()};
            a.return_time = aj.at("return_time").get<int>();
            a.flipped = aj.value("flipped", false);
            if (aj.contains("rotations")) {
                a.side_rotations[0] = parse_rational(aj.at("rotations").at(0));
                a.side_rotations[1] = parse_rational(aj.at("rotations").at(1));
            }
            g.annuli.push_back(std::move(a));
        }
    if (!doc.contains("permutations"))
        throw ParseError("document has no \"permutations\" object");
    const json& perms = doc.at("permutations");
    g.piece_map = parse_perm(perms.at("pieces"), "piece");
    g.annulus_map = parse_perm(perms.at("annuli"), "annulus");
    g.circle_map = parse_perm(perms.at("circles"), "circle");

    // propagate rotations between annuli and their side circles; validation
    // reports any disagreement between doubly-specified values
    for (auto& a : g.annuli)
        for (int s = 0; s < 2; ++s) {
            BoundaryCircle* c = g.circle(a.sides[s]);
            if (!c) continue;
            if (!c->rotation && a.side_rotations[s]) c->rotation = a.side_rotations[s];
            if (c->rotation && !a.side_rotations[s]) a.side_rotations[s] = c->rotation;
        }
    g.sort_records();
    return g;
}

} // namespace

json adjusted_json(const AdjustedGraph& g) {
    json doc = graph_json(g.graph);
    doc["stage"] = "adjusted";
    json interiors = json::object();
    for (const auto& [aid, interior] : g.interiors) {
        json ij = json::object();
        if (interior.kind == AnnulusInterior::Kind::Empty) {
            ij["kind"] = "empty";
        } else {
            ij["kind"] = "two-orbits";
            ij["period"] = interior.period;
            ij["indices"] = {interior.indices[0], interior.indices[1]};
        }
        interiors[std::to_string(aid)] = ij;
    }
    doc["interiors"] = interiors;
    json collapses = json::object();
    for (const auto& [cid, rec] : g.collapses) {
        json cj = json::object();
        cj["period"] = rec.orbit.period;
        cj["group_size"] = rec.orbit.collapsed_group_size;
        if (rec.orbit.has_collapse_choice)
            cj["choice"] = rec.choice == CollapseChoice::Left ? "left" : "right";
        cj["circle_orbit_length"] = rec.circle_orbit_length;
        cj["ambient_period"] = rec.ambient_period;
        collapses[std::to_string(cid)] = cj;
    }
    doc["collapses"] = collapses;
    doc["log"] = log_json(g.log);
    if (!g.retained.empty()) {
        json retained = json::array();
        for (const auto& rec : g.retained) retained.push_back(orbit_record_json(rec));
        doc["retained_orbits"] = retained;
    }
    return doc;
}

json condensed_json(const CondensedGraph& g) {
    json doc = graph_json(g.graph);
    doc["stage"] = "condensed";
    doc["identification_log"] = log_json(g.identification_log);
    json inventory = json::array();
    for (const auto& rec : g.orbit_inventory) inventory.push_back(orbit_record_json(rec));
    doc["orbit_inventory"] = inventory;
    return doc;
}

Document parse_document(const json& doc) {
    Document out;
    out.graph = parse_graph(doc);
    std::string stage = doc.value("stage", "raw");
    if (stage == "raw") {
        out.stage = Document::Stage::Raw;
    } else if (stage == "adjusted") {
        out.stage = Document::Stage::Adjusted;
        if (doc.contains("interiors"))
            for (const auto& [key, ij] : doc.at("interiors").items()) {
                AnnulusInterior interior;
                if (ij.at("kind").get<std::string>() == "two-orbits") {
                    interior.kind = AnnulusInterior::Kind::TwoOrbits;
                    interior.period = ij.at("period").get<long long>();
                    interior.indices = {ij.at("indices").at(0).get<int>(),
                                        ij.at("indices").at(1).get<int>()};
                }
                out.interiors[to_id(key)] = interior;
            }
        if (doc.contains("collapses"))
            for (const auto& [key, cj] : doc.at("collapses").items()) {
                CollapseRecord rec;
                rec.orbit.period = cj.at("period").get<int>();
                rec.orbit.collapsed_group_size = cj.at("group_size").get<int>();
                rec.orbit.has_collapse_choice = cj.contains("choice");
                if (rec.orbit.has_collapse_choice)
                    rec.choice = cj.at("choice").get<std::string>() == "right"
                                     ? CollapseChoice::Right
                                     : CollapseChoice::Left;
                rec.circle_orbit_length = cj.at("circle_orbit_length").get<long long>();
                rec.ambient_period = cj.at("ambient_period").get<long long>();
                out.collapses[to_id(key)] = rec;
            }
        if (doc.contains("log")) out.adjust_log = parse_log(doc.at("log"));
        if (doc.contains("retained_orbits"))
            for (const auto& rj : doc.at("retained_orbits"))
                out.orbit_inventory.push_back(parse_orbit_record(rj));
    } else if (stage == "condensed") {
        out.stage = Document::Stage::Condensed;
        if (doc.contains("identification_log"))
            out.identification_log = parse_log(doc.at("identification_log"));
        if (doc.contains("orbit_inventory"))
            for (const auto& rj : doc.at("orbit_inventory"))
                out.orbit_inventory.push_back(parse_orbit_record(rj));
    } else {
        throw ParseError("unknown stage '" + stage + "'");
    }
    return out;
}

Document load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    json doc = json::parse(in);   // json::parse_error carries the byte position
    return parse_document(doc);
}

AdjustedGraph Document::to_adjusted() const {
    AdjustedGraph g;
    g.graph = graph;
    g.interiors = interiors;
    g.collapses = collapses;
    g.log = adjust_log;
    for (const auto& rec : orbit_inventory)
        if (rec.origin.kind == OrbitOrigin::Kind::Retained) g.retained.push_back(rec);
    return g;
}

CondensedGraph Document::to_condensed() const {
    CondensedGraph g;
    g.graph = graph;
    g.identification_log = identification_log;
    g.orbit_inventory = orbit_inventory;
    return g;
}

CensusOverride parse_census(const json& doc) {
    CensusOverride out;
    for (const auto& [piece, table] : doc.items()) {
        std::map<int, long long> counts;
        for (const auto& [period, count] : table.items())
            counts[static_cast<int>(to_id(period))] = count.get<long long>();
        out[to_id(piece)] = counts;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation rendering
// ---------------------------------------------------------------------------

json validation_json(const ValidationReport& report) {
    json out = json::object();
    out["valid"] = report.ok();
    json issues = json::array();
    for (const auto& issue : report.issues) {
        json ij = json::object();
        ij["code"] = issue.code;
        ij["message"] = issue.message;
        ij["subjects"] = issue.subjects;
        issues.push_back(ij);
    }
    out["issues"] = issues;
    return out;
}

std::string validation_text(const ValidationReport& report) {
    if (report.ok()) return "valid\n";
    std::ostringstream out;
    out << report.issues.size() << " violation(s)\n";
    for (const auto& issue : report.issues) {
        out << "  [" << issue.code << "] " << issue.message;
        if (!issue.subjects.empty()) {
            out << " (";
            for (size_t i = 0; i < issue.subjects.size(); ++i)
                out << (i ? ", " : "") << issue.subjects[i];
            out << ")";
        }
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Inventories and class reports
// ---------------------------------------------------------------------------

json inventory_json(const Inventory& inv) {
    json out = json::object();
    json orbits = json::array();
    for (const auto& rec : inv.orbits) orbits.push_back(orbit_record_json(rec));
    out["orbits"] = orbits;
    json lines = json::object();
    for (const auto& [period, line] : inv.per_period) {
        json lj = json::object();
        lj["structural"] = line.structural;
        lj["census"] = line.census;
        lj["exact"] = line.exact;
        lines[std::to_string(period)] = lj;
    }
    out["per_period"] = lines;
    out["census_complete"] = inv.census_complete;
    return out;
}

std::string inventory_text(const Inventory& inv) {
    std::ostringstream out;
    out << std::left << std::setw(5) << "id" << std::setw(15) << "type" << std::setw(8)
        << "period" << std::setw(14) << "index" << std::setw(8) << "points" << "origin\n";
    for (const auto& rec : inv.orbits) {
        std::ostringstream origin;
        origin << rec.origin.subject;
        out << std::left << std::setw(5) << rec.id << std::setw(15)
            << orbit_type_name(rec.type) << std::setw(8) << rec.period << std::setw(14)
            << rec.index.str() << std::setw(8) << rec.points_per_orbit << origin.str()
            << (rec.aggregate ? " (class)" : "") << "\n";
    }
    return out.str();
}

json classes_json(const PersistenceReport& report, long long max_period) {
    json out = json::object();
    json classes = json::array();
    for (const auto& cls : report.classes) {
        json cj = json::object();
        cj["id"] = cls.id;
        cj["period"] = cls.period;
        cj["members"] = cls.members;
        cj["collapsible"] = cls.collapsible;
        cj["index"] = index_json(cls.index);
        cj["essential"] = tri_name(cls.essential);
        cj["persistent"] = tri_name(cls.persistent);
        cj["unremovable"] = tri_name(cls.unremovable);
        cj["point_subclasses"] = cls.point_subclasses;
        classes.push_back(cj);
    }
    out["classes"] = classes;
    json pon = json::object();
    for (long long n = 1; n <= max_period; ++n) {
        long long count = 0;
        for (const auto& cls : report.classes)
            if (cls.period == n && cls.persistent == Tri::Yes) ++count;
        json pj = json::object();
        pj["count"] = count;
        pj["exact"] = report.inventory.census_complete;
        pon[std::to_string(n)] = pj;
    }
    out["pon"] = pon;
    return out;
}

std::string classes_text(const PersistenceReport& report, long long max_period,
                         bool point_classes) {
    std::ostringstream out;
    out << std::left << std::setw(5) << "id" << std::setw(8) << "period" << std::setw(10)
        << "members" << std::setw(13) << "collapsible" << std::setw(14) << "index"
        << std::setw(15) << "essential" << std::setw(15) << "persistent";
    if (point_classes) out << "point-classes";
    out << "\n";
    for (const auto& cls : report.classes) {
        std::ostringstream members;
        for (size_t i = 0; i < cls.members.size(); ++i)
            members << (i ? "," : "") << cls.members[i];
        out << std::left << std::setw(5) << cls.id << std::setw(8) << cls.period
            << std::setw(10) << members.str() << std::setw(13)
            << (cls.collapsible ? "yes" : "no") << std::setw(14) << cls.index.str()
            << std::setw(15) << tri_name(cls.essential) << std::setw(15)
            << tri_name(cls.persistent);
        if (point_classes) out << cls.point_subclasses;
        out << "\n";
    }
    out << "\nPON(n), n <= " << max_period
        << (report.inventory.census_complete ? " (exact)" : " (lower bounds; census absent)")
        << ":";
    for (long long n = 1; n <= max_period; ++n) {
        long long count = 0;
        for (const auto& cls : report.classes)
            if (cls.period == n && cls.persistent == Tri::Yes) ++count;
        out << " " << n << ":" << count;
    }
    out << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// DOT
// ---------------------------------------------------------------------------

std::string graph_dot(const ComponentGraph& g) {
    std::ostringstream out;
    out << "graph surface {\n  node [fontsize=10];\n";
    for (const auto& p : g.pieces) {
        out << "  p" << p.id << " [shape=" << (p.is_pa() ? "ellipse" : "box") << ", label=\"p"
            << p.id << "\\n" << (p.is_pa() ? "pA" : "fo");
        if (p.is_finite_order()) out << " m=" << p.fo().period;
        out << " g=" << p.genus << " b=" << p.boundary.size()
            << " chi=" << euler_characteristic(p) << "\"];\n";
    }
    for (const auto& a : g.annuli) {
        const BoundaryCircle* c0 = g.circle(a.sides[0]);
        const BoundaryCircle* c1 = g.circle(a.sides[1]);
        if (!c0 || !c1) continue;
        TwistClass tc = classify_annulus(a);
        const char* style = tc.indeterminate() ? "dotted" : (tc.twisted() ? "dashed" : "solid");
        out << "  p" << c0->owner << " -- p" << c1->owner << " [style=" << style
            << (a.flipped ? ", penwidth=2" : "") << ", label=\"A" << a.id << " n="
            << a.return_time << (a.flipped ? " flip" : "")
            << (tc.untwisted() ? " untw" : (tc.twisted() ? " tw" : "")) << "\"];\n";
    }
    std::set<Id> seam_done;
    for (const auto& p : g.pieces)
        for (const auto& c : p.boundary) {
            if (c.attachment.kind != Attachment::Kind::Seam || seam_done.count(c.id)) continue;
            const BoundaryCircle* partner = g.circle(c.attachment.partner);
            if (!partner) continue;
            seam_done.insert(c.id);
            seam_done.insert(partner->id);
            out << "  p" << c.owner << " -- p" << partner->owner
                << " [style=bold, label=\"seam " << seam_kind_name(c.attachment.seam_kind)
                << "\"];\n";
        }
    out << "}\n";
    return out.str();
}

std::string relations_dot(const PersistenceReport& report) {
    std::ostringstream out;
    out << "digraph relations {\n  node [fontsize=10, shape=box];\n";
    std::map<Id, const OrbitRecord*> record_of;
    for (const auto& rec : report.inventory.orbits) record_of[rec.id] = &rec;
    for (const auto& n : report.closed.nodes) {
        const OrbitRecord* rec = record_of.at(n.id);
        out << "  o" << n.id << " [label=\"" << orbit_type_name(rec->type) << ":"
            << rec->period << ":" << rec->index.str() << "\"];\n";
    }
    for (const auto& e : report.closed.pn)
        out << "  o" << e.a << " -> o" << e.b << " [dir=none];\n";
    for (const auto& e : report.closed.collapse)
        out << "  o" << e.from << " -> o" << e.to << " [style=dashed, label=\"x"
            << e.multiplier << "\"];\n";
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Experiment reports
// ---------------------------------------------------------------------------

std::string matched_pairs_csv(const MatchReport& report) {
    std::ostringstream out;
    out << "period,x,y,lin_x,lin_y,pert_x,pert_y,du,ds,dphi,residual,matched\n";
    out << std::setprecision(17);
    for (const auto& p : report.pairs) {
        out << p.period << "," << p.linear_point.x.str() << "," << p.linear_point.y.str()
            << "," << p.linear_lift.x << "," << p.linear_lift.y << "," << p.perturbed_lift.x
            << "," << p.perturbed_lift.y << "," << p.du << "," << p.ds << "," << p.dphi << ","
            << p.residual << "," << (p.matched ? 1 : 0) << "\n";
    }
    return out.str();
}

json match_report_json(const MatchReport& report) {
    json out = json::object();
    out["lambda"] = report.params.lambda_star;
    out["R"] = report.params.R;
    out["C"] = report.params.C;
    out["pairs"] = report.pairs.size();
    out["unmatched"] = report.unmatched;
    out["max_dphi"] = report.max_dphi;
    out["all_within_C"] = report.all_within_C;
    out["margin"] = report.params.C - report.max_dphi;
    return out;
}

json expansion_report_json(const ExpansionReport& report, double lambda) {
    json out = json::object();
    out["lambda"] = lambda;
    out["samples"] = report.samples;
    out["worst_unstable_defect"] = report.worst_unstable;
    out["worst_stable_defect"] = report.worst_stable;
    out["ok"] = report.ok;
    return out;
}

json two_sided_report_json(const TwoSidedReport& report) {
    json out = json::object();
    out["bound"] = report.bound;
    out["worst"] = report.worst;
    out["comparisons"] = report.comparisons;
    out["ok"] = report.ok;
    return out;
}

json semiconjugacy_report_json(const SemiconjugacyReport& report, double C) {
    json out = json::object();
    out["defect"] = report.defect;
    out["max_lift_distance"] = report.max_lift_distance;
    out["C"] = C;
    out["lift_within_C"] = report.lift_within_C;
    return out;
}

json flip_report_json(const FlipReport& report) {
    json out = json::object();
    out["rho_top"] = report.rho_top;
    out["rho_bottom"] = report.rho_bottom;
    out["negation_defect"] = report.negation_defect;
    json fps = json::array();
    for (const auto& fp : report.interior_fixed_points) {
        json fj = json::object();
        fj["x"] = fp.p.x;
        fj["y"] = fp.p.y;
        fj["index"] = fp.index;
        fps.push_back(fj);
    }
    out["interior_fixed_points"] = fps;
    out["index_sum"] = report.index_sum;
    out["conclusive"] = report.conclusive;
    if (!report.hint.empty()) out["hint"] = report.hint;
    return out;
}

} // namespace tnsurf
