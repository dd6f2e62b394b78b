#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "tnsurf/canonicalize.hpp"

using namespace tnsurf;
using namespace tnsurf::testing;

namespace {

const OrbitRecord* find_type(const std::vector<OrbitRecord>& inv, OrbitType t) {
    for (const auto& rec : inv)
        if (rec.type == t) return &rec;
    return nullptr;
}

long long count_type(const std::vector<OrbitRecord>& inv, OrbitType t) {
    return std::count_if(inv.begin(), inv.end(),
                         [&](const OrbitRecord& r) { return r.type == t; });
}

CondensedGraph condense_fixture(const std::string& name) {
    Document doc = load_fixture(name);
    REQUIRE(validate(doc.graph).ok());
    return condense(adjust(doc.graph));
}

// inventory signature ignoring record ids
std::multiset<std::tuple<int, long long, std::string, long long>>
signature(const std::vector<OrbitRecord>& inv) {
    std::multiset<std::tuple<int, long long, std::string, long long>> out;
    for (const auto& rec : inv)
        out.insert({static_cast<int>(rec.type), rec.period, rec.index.str(),
                    rec.points_per_orbit});
    return out;
}

} // namespace

TEST_CASE("sector index") {
    CHECK(sector_index({0, 0, 1, false}) == 1);
    CHECK(sector_index({4, 0, 1, false}) == -1);
    CHECK(sector_index({2, 2, 1, false}) == 1);
    CHECK_THROWS_AS(sector_index({1, 0, 1, false}), StructuralError);
}

TEST_CASE("branched lift index") {
    CHECK(branched_lift_index({4, 0, 2, false}) == -3);
    CHECK(branched_lift_index({4, 0, 2, true}) == 1);
    CHECK(branched_lift_index({2, 0, 7, true}) == 1);
    CHECK(branched_lift_index({2, 0, 3, false}) == -2);
    CHECK_THROWS_AS(branched_lift_index({1, 0, 2, false}), StructuralError);
    CHECK_THROWS_AS(branched_lift_index({2, 0, 1, false}), StructuralError);
}

TEST_CASE("quotient euler characteristic") {
    CHECK(quotient_euler(-6, 3, {}) == -2);
    CHECK(quotient_euler(-2, 2, {{2, false}, {2, false}}) == 0);
    CHECK(quotient_euler(-1, 2, {{2, false}}) == 0);
    CHECK_THROWS_AS(quotient_euler(-1, 2, {}), StructuralError);
}

TEST_CASE("adjust merges untwisted annuli between finite-order pieces") {
    Document doc = load_fixture("fo_merge.json");
    AdjustedGraph adjusted = adjust(doc.graph);
    REQUIRE(adjusted.graph.pieces.size() == 1);
    const SurfacePiece& merged = adjusted.graph.pieces.front();
    CHECK(merged.id == 1);
    CHECK(merged.genus == 2);
    CHECK(merged.boundary.empty());
    CHECK(merged.fo().period == 2);
    CHECK(merged.fo().branch_points.size() == 2);
    CHECK(adjusted.graph.annuli.empty());
    CHECK(euler_characteristic(merged) == doc.graph.total_euler_char());
    REQUIRE(adjusted.log.size() == 1);
    CHECK(adjusted.log.front().kind == "fo-merge");
}

TEST_CASE("adjust marks interiors: empty for unflipped, two orbits for flipped") {
    Document doc = load_fixture("flip_pinch.json");
    AdjustedGraph adjusted = adjust(doc.graph);
    REQUIRE(adjusted.interiors.count(30));
    const AnnulusInterior& interior = adjusted.interiors.at(30);
    CHECK(interior.kind == AnnulusInterior::Kind::TwoOrbits);
    CHECK(interior.period == 1);
    CHECK(interior.indices[0] != 0);
    CHECK(interior.indices[1] != 0);

    Document glue = load_fixture("pa_glue.json");
    AdjustedGraph adjusted2 = adjust(glue.graph);
    CHECK(adjusted2.interiors.at(30).kind == AnnulusInterior::Kind::Empty);
}

TEST_CASE("flipped annulus of return time three carries period-three interior orbits") {
    ComponentGraph g;
    SurfacePiece p = pa_piece(1, 2, 2.0);
    for (Id cid : {10, 11, 12, 13, 14, 15})
        add_circle(p, cid, Attachment::free(), Rational(0), 1);
    // three annuli in one flipped cycle over the six circles
    p.boundary[0].attachment = Attachment::on_annulus(30, 0);
    p.boundary[1].attachment = Attachment::on_annulus(30, 1);
    p.boundary[2].attachment = Attachment::on_annulus(31, 0);
    p.boundary[3].attachment = Attachment::on_annulus(31, 1);
    p.boundary[4].attachment = Attachment::on_annulus(32, 0);
    p.boundary[5].attachment = Attachment::on_annulus(32, 1);
    g.pieces.push_back(p);
    g.annuli.push_back(make_annulus(30, 10, 11, 3, true, Rational(0), Rational(0)));
    g.annuli.push_back(make_annulus(31, 12, 13, 3, true, Rational(0), Rational(0)));
    g.annuli.push_back(make_annulus(32, 14, 15, 3, true, Rational(0), Rational(0)));
    g.piece_map = {{1, 1}};
    g.annulus_map = {{30, 31}, {31, 32}, {32, 30}};
    // 2n-cycle through the sides: 10 -> 12 -> 14 -> 11 -> 13 -> 15 -> 10
    g.circle_map = {{10, 12}, {12, 14}, {14, 11}, {11, 13}, {13, 15}, {15, 10}};
    REQUIRE(validate(g).ok());
    AdjustedGraph adjusted = adjust(g);
    CHECK(adjusted.interiors.at(30).kind == AnnulusInterior::Kind::TwoOrbits);
    CHECK(adjusted.interiors.at(30).period == 3);
}

TEST_CASE("graph without annuli is unchanged apart from collapse records") {
    Document doc = load_fixture("case1.json");
    AdjustedGraph adjusted = adjust(doc.graph);
    CHECK(adjusted.graph.pieces.size() == doc.graph.pieces.size());
    CHECK(adjusted.graph.annuli.empty());
    CHECK(adjusted.log.empty());
    CHECK(adjusted.collapses.empty());
}

TEST_CASE("adjust refuses indeterminate twist data") {
    Document doc = load_fixture("pa_glue.json");
    for (auto& a : doc.graph.annuli) a.side_rotations = {std::nullopt, std::nullopt};
    for (auto& p : doc.graph.pieces)
        for (auto& c : p.boundary) c.rotation.reset();
    CHECK_THROWS_AS(adjust(doc.graph), RewriteError);
}

TEST_CASE("adjust rejects incompatible pA boundary rotations") {
    ComponentGraph g;
    SurfacePiece p = pa_piece(1, 2, 2.0);
    add_circle(p, 10, Attachment::free(), Rational(1, 4), 3);   // 4 does not divide 6
    g.pieces.push_back(p);
    identity_maps(g);
    CHECK_THROWS_AS(adjust(g), IncompatibleRotation);
}

TEST_CASE("collapse choice is threaded through for fixed boundary circles") {
    ComponentGraph g;
    SurfacePiece p = pa_piece(1, 2, 2.0);
    add_circle(p, 10, Attachment::free(), Rational(0), 3);
    g.pieces.push_back(p);
    identity_maps(g);
    AdjustOptions opts;
    opts.default_choice = CollapseChoice::Right;
    AdjustedGraph adjusted = adjust(g, opts);
    REQUIRE(adjusted.collapses.count(10));
    CHECK(adjusted.collapses.at(10).orbit.has_collapse_choice);
    CHECK(adjusted.collapses.at(10).choice == CollapseChoice::Right);
}

TEST_CASE("condense case 1: single orbit with negative quotient index") {
    CondensedGraph out = condense_fixture("case1.json");
    REQUIRE(out.orbit_inventory.size() == 1);
    const OrbitRecord& rec = out.orbit_inventory.front();
    CHECK(rec.type == OrbitType::FiniteOrderRegular);
    CHECK(rec.period == 3);
    CHECK(rec.index == OrbitIndex::integer(-2));   // chi(quotient) = -6/3
    CHECK(rec.points_per_orbit == 3);
}

TEST_CASE("condense case 1 with a three-piece component: period multiplies") {
    CondensedGraph out = condense_fixture("case1_orbit3.json");
    REQUIRE(out.orbit_inventory.size() == 1);
    CHECK(out.orbit_inventory.front().period == 6);
    CHECK(out.orbit_inventory.front().index == OrbitIndex::integer(-1));
}

TEST_CASE("condense case 2: peripheral orbit coalesces into the regular class") {
    CondensedGraph out = condense_fixture("case2.json");
    REQUIRE(out.orbit_inventory.size() == 1);
    const OrbitRecord& rec = out.orbit_inventory.front();
    CHECK(rec.type == OrbitType::FiniteOrderRegular);
    CHECK(rec.period == 2);
    CHECK(rec.index == OrbitIndex::integer(-1));
    REQUIRE(rec.absorbed.size() == 1);
    CHECK(rec.absorbed.front().kind == OrbitOrigin::Kind::Circle);
    CHECK(out.graph.annuli.empty());
}

TEST_CASE("condense case 3: branch orbits only, with the lifted indices") {
    CondensedGraph out = condense_fixture("case3.json");
    REQUIRE(out.orbit_inventory.size() == 2);
    CHECK(count_type(out.orbit_inventory, OrbitType::FiniteOrderRegular) == 0);
    CHECK(out.orbit_inventory[0].type == OrbitType::FiniteOrderBranch);
    CHECK(out.orbit_inventory[0].period == 1);
    CHECK(out.orbit_inventory[0].index == OrbitIndex::integer(-3));
    CHECK(out.orbit_inventory[1].index == OrbitIndex::integer(1));
}

TEST_CASE("finite-order merge then condensation matches the directly-merged surface") {
    CondensedGraph merged = condense_fixture("fo_merge.json");
    CondensedGraph direct = condense_fixture("case3.json");
    CHECK(signature(merged.orbit_inventory) == signature(direct.orbit_inventory));
}

TEST_CASE("condense glues pA boundaries across untwisted annuli") {
    CondensedGraph out = condense_fixture("pa_glue.json");
    CHECK(out.graph.annuli.empty());
    REQUIRE(out.orbit_inventory.size() == 1);
    const OrbitRecord& rec = out.orbit_inventory.front();
    CHECK(rec.type == OrbitType::PeripheralPA);
    CHECK(rec.period == 2);
    CHECK(rec.absorbed.size() == 1);
    // the two circles are seamed to each other
    const BoundaryCircle* c = out.graph.circle(10);
    REQUIRE(c);
    CHECK(c->attachment.kind == Attachment::Kind::Seam);
    CHECK(c->attachment.partner == 20);
    CHECK(c->attachment.seam_kind == SeamKind::Glue);
}

TEST_CASE("twisted annuli survive condensation with empty interiors") {
    CondensedGraph out = condense_fixture("pa_twisted.json");
    CHECK(out.graph.annuli.size() == 1);
    REQUIRE(out.orbit_inventory.size() == 2);
    CHECK(out.orbit_inventory[0].period == 2);
    CHECK(out.orbit_inventory[1].period == 3);
}

TEST_CASE("flipped untwisted annulus pinches: boundary orbit absorbed at half period") {
    CondensedGraph out = condense_fixture("flip_pinch.json");
    CHECK(out.graph.annuli.empty());
    REQUIRE(out.orbit_inventory.size() == 2);
    for (const auto& rec : out.orbit_inventory) {
        CHECK(rec.type == OrbitType::FlipAnnulusInterior);
        CHECK(rec.period == 1);
        CHECK(rec.index == OrbitIndex::integer(1));
    }
    // the pinch record absorbed the period-2 boundary orbit
    const OrbitRecord& pinch = out.orbit_inventory.front();
    REQUIRE(pinch.absorbed.size() == 1);
    CHECK(pinch.absorbed.front().kind == OrbitOrigin::Kind::Circle);
    bool pinched_seam = false;
    for (const auto& p : out.graph.pieces)
        for (const auto& c : p.boundary)
            if (c.attachment.kind == Attachment::Kind::Seam &&
                c.attachment.seam_kind == SeamKind::Pinch)
                pinched_seam = true;
    CHECK(pinched_seam);
}

TEST_CASE("flipped twisted annulus keeps its two interior orbits and boundary orbit") {
    CondensedGraph out = condense_fixture("flip_twisted.json");
    CHECK(out.graph.annuli.size() == 1);
    CHECK(count_type(out.orbit_inventory, OrbitType::FlipAnnulusInterior) == 2);
    const OrbitRecord* boundary = find_type(out.orbit_inventory, OrbitType::PeripheralPA);
    REQUIRE(boundary);
    CHECK(boundary->period == 6);   // circle orbit length 2 times rotation period 3
}

TEST_CASE("figure6 condensation: hand-derived regression") {
    CondensedGraph out = condense_fixture("figure6.json");
    // all untwisted annuli at the central component are eliminated
    CHECK(out.graph.annuli.empty());
    // the inventory is exactly the branch-point class, period 1, index +1
    // (the rotation by pi at the branch point forces index +1)
    REQUIRE(out.orbit_inventory.size() == 1);
    const OrbitRecord& rec = out.orbit_inventory.front();
    CHECK(rec.type == OrbitType::FiniteOrderBranch);
    CHECK(rec.period == 1);
    CHECK(rec.points_per_orbit == 1);
    CHECK(rec.index == OrbitIndex::integer(1));
    // both peripheral pA orbits coalesced into the branch-point class
    REQUIRE(rec.absorbed.size() == 2);
    CHECK(rec.absorbed[0].kind == OrbitOrigin::Kind::Circle);
    CHECK(rec.absorbed[0].subject == 20);
    CHECK(rec.absorbed[1].subject == 30);
    // seams replace the three annuli
    int collapse_seams = 0;
    for (const auto& p : out.graph.pieces)
        for (const auto& c : p.boundary)
            if (c.attachment.kind == Attachment::Kind::Seam &&
                c.attachment.seam_kind == SeamKind::Collapse)
                ++collapse_seams;
    CHECK(collapse_seams == 6);   // three seamed pairs
    // case dispatch is in the log: central component hits case 4
    bool case4 = false;
    for (const auto& ev : out.identification_log)
        if (ev.kind == "case" && ev.note == "case 4" && ev.ids == std::vector<Id>{1})
            case4 = true;
    CHECK(case4);
}

TEST_CASE("euler characteristic bookkeeping survives both rewrites") {
    for (const char* name : {"figure6.json", "case2.json", "fo_merge.json", "pa_glue.json",
                             "mixed.json"}) {
        Document doc = load_fixture(name);
        int chi = doc.graph.total_euler_char();
        AdjustedGraph adjusted = adjust(doc.graph);
        CHECK(adjusted.graph.total_euler_char() == chi);
        CondensedGraph condensed = condense(adjusted);
        CHECK(condensed.graph.total_euler_char() == chi);
    }
}

TEST_CASE("case dispatch is total and exclusive over the corpus") {
    for (const char* name : {"figure6.json", "case1.json", "case1_orbit3.json", "case2.json",
                             "case3.json", "fo_merge.json", "mixed.json"}) {
        CondensedGraph out = condense_fixture(name);
        std::map<Id, int> cases;
        for (const auto& ev : out.identification_log)
            if (ev.kind == "case") {
                REQUIRE(ev.ids.size() == 1);
                CHECK_FALSE(cases.count(ev.ids.front()));
                cases[ev.ids.front()] = 1;
            }
        OrbitDecomposition dec = orbit_decomposition(out.graph);
        // every component of the output was dispatched exactly once
        CHECK(cases.size() >= dec.pieces.size());
    }
}

TEST_CASE("condensation is idempotent up to record ids") {
    for (const char* name :
         {"figure6.json", "case1.json", "case1_orbit3.json", "case2.json", "case3.json",
          "fo_merge.json", "pa_glue.json", "pa_twisted.json", "flip_pinch.json",
          "flip_twisted.json", "mixed.json"}) {
        CAPTURE(name);
        CondensedGraph once = condense_fixture(name);
        CondensedGraph twice = condense(once);
        CHECK(signature(once.orbit_inventory) == signature(twice.orbit_inventory));
        CHECK(once.graph.annuli.size() == twice.graph.annuli.size());
        CHECK(once.graph.pieces.size() == twice.graph.pieces.size());
    }
}

TEST_CASE("every condensed index is nonzero") {
    for (const char* name :
         {"figure6.json", "case1.json", "case2.json", "case3.json", "fo_merge.json",
          "pa_glue.json", "pa_twisted.json", "flip_pinch.json", "flip_twisted.json",
          "mixed.json"}) {
        CondensedGraph out = condense_fixture(name);
        for (const auto& rec : out.orbit_inventory) CHECK(rec.index.known_nonzero());
    }
}

TEST_CASE("single branch-bearing piece: period-1 branch orbit, no regular orbits") {
    ComponentGraph g;
    SurfacePiece p = fo_piece(1, 1, 2, {{2, false}});
    add_circle(p, 10, Attachment::free(), Rational(1, 2));
    g.pieces.push_back(p);
    identity_maps(g);
    REQUIRE(validate(g).ok());
    CondensedGraph out = condense(adjust(g));
    REQUIRE(out.orbit_inventory.size() == 1);
    CHECK(out.orbit_inventory.front().type == OrbitType::FiniteOrderBranch);
    CHECK(out.orbit_inventory.front().period == 1);
}

TEST_CASE("boundary-adjusted pA circle yields its boundary orbit") {
    ComponentGraph g;
    SurfacePiece p = pa_piece(1, 2, 2.0);
    add_circle(p, 10, Attachment::free(), Rational(1, 2), 4);
    g.pieces.push_back(p);
    identity_maps(g);
    REQUIRE(validate(g).ok());
    CondensedGraph out = condense(adjust(g));
    REQUIRE(out.orbit_inventory.size() == 1);
    const OrbitRecord& rec = out.orbit_inventory.front();
    CHECK(rec.type == OrbitType::BoundaryPA);
    CHECK(rec.period == 2);
}

TEST_CASE("periodic inventory filters by period and flags missing censuses") {
    CondensedGraph out = condense_fixture("figure6.json");
    Inventory empty = periodic_inventory(out, 0);
    CHECK(empty.orbits.empty());

    Inventory inv = periodic_inventory(out, 6);
    CHECK(inv.orbits.size() == 1);
    CHECK_FALSE(inv.census_complete);   // pA pieces carry no census
    CHECK_FALSE(inv.per_period.at(1).exact);

    // supplying a census adds interior pA orbits and restores exactness
    CensusOverride census;
    census[2] = {{1, 2}, {3, 1}};
    census[3] = {{1, 1}};
    Inventory with = periodic_inventory(out, 6, &census);
    CHECK(with.census_complete);
    CHECK(with.per_period.at(1).census == 2);
    CHECK(with.per_period.at(3).census == 1);
    CHECK(with.per_period.at(2).census == 1);   // piece orbit {3,4} has length 2
    long long interior = 0;
    for (const auto& rec : with.orbits)
        if (rec.type == OrbitType::InteriorPA) ++interior;
    CHECK(interior == 4);
}
