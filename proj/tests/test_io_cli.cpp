#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "tnsurf/io.hpp"

using namespace tnsurf;
using namespace tnsurf::testing;

TEST_CASE("raw document round trip is byte-stable") {
    Document doc = load_fixture("figure6.json");
    json once = graph_json(doc.graph);
    Document again = parse_document(once);
    json twice = graph_json(again.graph);
    CHECK(once.dump(2) == twice.dump(2));
}

TEST_CASE("rationals serialize in lowest terms") {
    Document doc = load_fixture("figure6.json");
    doc.graph.circle(10)->rotation = Rational(2, 4);
    json j = graph_json(doc.graph);
    bool found = false;
    for (const auto& pj : j.at("pieces"))
        for (const auto& cj : pj.at("boundary"))
            if (cj.at("id") == 10) {
                CHECK(cj.at("rotation") == "1/2");
                found = true;
            }
    CHECK(found);
}

TEST_CASE("adjusted and condensed documents round trip") {
    Document doc = load_fixture("figure6.json");
    AdjustedGraph adjusted = adjust(doc.graph);
    json aj = adjusted_json(adjusted);
    Document aback = parse_document(aj);
    REQUIRE(aback.stage == Document::Stage::Adjusted);
    CHECK(adjusted_json(aback.to_adjusted()).dump(2) == aj.dump(2));

    CondensedGraph condensed = condense(adjusted);
    json cj = condensed_json(condensed);
    Document cback = parse_document(cj);
    REQUIRE(cback.stage == Document::Stage::Condensed);
    CHECK(condensed_json(cback.to_condensed()).dump(2) == cj.dump(2));
}

TEST_CASE("re-condensing a parsed condensed document is stable") {
    Document doc = load_fixture("flip_pinch.json");
    CondensedGraph once = condense(adjust(doc.graph));
    Document back = parse_document(condensed_json(once));
    CondensedGraph twice = condense(back.to_condensed());
    CHECK(condensed_json(twice).at("orbit_inventory").size() ==
          condensed_json(once).at("orbit_inventory").size());
}

TEST_CASE("annulus rotations propagate to circles on parse") {
    json doc = json::parse(R"({
      "pieces": [
        {"id": 1, "genus": 2, "kind": "pseudo_anosov", "expansion": 2.0,
         "boundary": [{"id": 10, "attachment": {"annulus": 30, "side": 0}, "prongs": 2},
                      {"id": 11, "attachment": {"annulus": 30, "side": 1}, "prongs": 2}]}
      ],
      "annuli": [
        {"id": 30, "sides": [10, 11], "return_time": 1, "flipped": false,
         "rotations": ["1/2", "1/2"]}
      ],
      "permutations": {"pieces": {"1": 1}, "annuli": {"30": 30},
                       "circles": {"10": 10, "11": 11}}
    })");
    Document parsed = parse_document(doc);
    REQUIRE(parsed.graph.circle(10)->rotation.has_value());
    CHECK(*parsed.graph.circle(10)->rotation == Rational(1, 2));
}

TEST_CASE("parse failures carry context") {
    json bad = json::parse(R"({"pieces": [{"id": 1, "genus": 2, "kind": "weird"}],
                               "permutations": {"pieces": {}, "annuli": {}, "circles": {}}})");
    CHECK_THROWS_AS(parse_document(bad), ParseError);

    json bad_rot = json::parse(R"({
      "pieces": [{"id": 1, "genus": 2, "kind": "finite_order", "period": 2,
                  "boundary": [{"id": 10, "attachment": "free", "rotation": "x/y"}]}],
      "annuli": [],
      "permutations": {"pieces": {"1": 1}, "annuli": {}, "circles": {"10": 10}}})");
    CHECK_THROWS(parse_document(bad_rot));

    CHECK_THROWS_AS(load_document("/nonexistent/path.json"), ParseError);
}

TEST_CASE("census files parse") {
    json j = json::parse(R"({"2": {"1": 3, "4": 7}})");
    CensusOverride census = parse_census(j);
    REQUIRE(census.count(2));
    CHECK(census.at(2).at(1) == 3);
    CHECK(census.at(2).at(4) == 7);
}

TEST_CASE("validation rendering") {
    Document doc = load_fixture("figure6.json");
    ValidationReport ok = validate(doc.graph);
    CHECK(validation_text(ok) == "valid\n");
    CHECK(validation_json(ok).at("valid") == true);

    doc.graph.pieces[0].genus = -1;   // force violations
    ValidationReport bad = validate(doc.graph);
    CHECK(validation_json(bad).at("valid") == false);
    CHECK(validation_text(bad).find("euler-negative") != std::string::npos);
}

TEST_CASE("structure DOT names pieces and twist classes") {
    Document doc = load_fixture("pa_twisted.json");
    std::string dot = graph_dot(doc.graph);
    CHECK(dot.find("graph surface") != std::string::npos);
    CHECK(dot.find("p1") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos);   // twisted annulus
}

TEST_CASE("relation DOT uses undirected pn and dashed directed collapses") {
    Document doc = load_fixture("figure6.json");
    AdjustedGraph adjusted = adjust(doc.graph);
    PersistenceReport report = persistence_report(adjusted, 6);
    std::string dot = relations_dot(report);
    CHECK(dot.find("digraph relations") != std::string::npos);
    CHECK(dot.find("dir=none") != std::string::npos);
    CHECK(dot.find("style=dashed") != std::string::npos);
    CHECK(dot.find("fo-branch:1:1") != std::string::npos);   // type:period:index label
}

TEST_CASE("classes report renders in text and json") {
    Document doc = load_fixture("figure6.json");
    CondensedGraph condensed = condense(adjust(doc.graph));
    PersistenceReport report = persistence_report(condensed, 6);
    std::string text = classes_text(report, 6);
    CHECK(text.find("PON(n)") != std::string::npos);
    CHECK(text.find("1:1") != std::string::npos);   // PON(1) = 1
    json j = classes_json(report, 6);
    CHECK(j.at("classes").size() == 1);
    CHECK(j.at("pon").at("1").at("count") == 1);
    CHECK(j.at("pon").at("1").at("exact") == false);
}

TEST_CASE("matched pair CSV has a row per pair") {
    LinearModel m = LinearModel::from_matrix(2, 1, 1, 1);
    PerturbedMap f = PerturbedMap::sinusoidal(m, 0.0, 4);
    MatchReport rep = match_periodic_points_up_to(m, f, 2, 1e-12);
    std::string csv = matched_pairs_csv(rep);
    size_t rows = std::count(csv.begin(), csv.end(), '\n');
    CHECK(rows == rep.pairs.size() + 1);   // header + data
}

TEST_CASE("inventory text report aligns columns") {
    Document doc = load_fixture("case3.json");
    CondensedGraph condensed = condense(adjust(doc.graph));
    Inventory inv = periodic_inventory(condensed, 4);
    std::string text = inventory_text(inv);
    CHECK(text.find("fo-branch") != std::string::npos);
    CHECK(text.find("-3") != std::string::npos);
}
