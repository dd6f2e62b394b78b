// tnsurf: batch front door for the surface mapping-class calculus.
// Subcommands: validate, adjust, condense, classes, report, shadow.
// Exit codes: 0 success, 1 validation/experiment failure, 2 usage or
// malformed input. Identical inputs and seeds give byte-identical output.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tnsurf/io.hpp"

using namespace tnsurf;

namespace {

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

AdjustOptions collapse_options(const std::string& choice) {
    AdjustOptions opts;
    opts.default_choice = choice == "right" ? CollapseChoice::Right : CollapseChoice::Left;
    return opts;
}

// Aborts with the validation report unless the document's graph is well formed.
int require_valid(const Document& doc) {
    ValidationReport report = validate(doc.graph);
    if (report.ok()) return 0;
    std::cerr << validation_text(report);
    return 1;
}

struct ShadowArgs {
    std::string matrix = "2,1,1,1";
    double eps = 0.05;
    int max_period = 8;
    double tol = 1e-10;
    std::uint64_t seed = 1;
    int pairs = 10000;
    int m_range = 20;
    double R = 0.0;
    double lambda = -1.0;
    int count = 10;
    long long iterations = 100000;
    std::string rotation;
    std::string csv;
    std::string format = "json";
};

LinearModel parse_matrix(const std::string& spec) {
    long long e[4];
    std::stringstream ss(spec);
    std::string item;
    for (int i = 0; i < 4; ++i) {
        if (!std::getline(ss, item, ','))
            throw ParseError("--matrix wants four comma-separated integers");
        try {
            e[i] = std::stoll(item);
        } catch (...) {
            throw ParseError("--matrix entry '" + item + "' is not an integer");
        }
    }
    return LinearModel::from_matrix(e[0], e[1], e[2], e[3]);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surface mapping-class calculus: canonical rewrites, periodic "
                 "Nielsen classes, and hyperbolic shadowing experiments"};
    app.require_subcommand(1);

    std::string file, out_path, format = "text", collapse = "left", census_path;
    long long max_period = 8;
    bool point_classes = false;

    auto* cmd_validate = app.add_subcommand("validate", "check a graph document");
    cmd_validate->add_option("file", file)->required();
    cmd_validate->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    auto* cmd_adjust =
        app.add_subcommand("adjust", "normalize annulus interiors and pA boundaries");
    cmd_adjust->add_option("file", file)->required();
    cmd_adjust->add_option("-o,--output", out_path);
    cmd_adjust->add_option("--collapse", collapse)->check(CLI::IsMember({"left", "right"}));

    auto* cmd_condense = app.add_subcommand("condense", "rewrite to the condensed form");
    cmd_condense->add_option("file", file)->required();
    cmd_condense->add_option("-o,--output", out_path);
    cmd_condense->add_option("--collapse", collapse)->check(CLI::IsMember({"left", "right"}));

    auto* cmd_classes =
        app.add_subcommand("classes", "periodic Nielsen classes and PON counts");
    cmd_classes->add_option("file", file)->required();
    cmd_classes->add_option("--max-period", max_period)->required();
    cmd_classes->add_option("--census", census_path);
    cmd_classes->add_option("--format", format)->check(CLI::IsMember({"text", "json", "dot"}));
    cmd_classes->add_flag("--point-classes", point_classes);

    auto* cmd_report = app.add_subcommand("report", "structure report / DOT emission");
    cmd_report->add_option("file", file)->required();
    cmd_report->add_option("--format", format)->check(CLI::IsMember({"text", "json", "dot"}));
    cmd_report->add_option("--max-period", max_period);

    auto* cmd_shadow = app.add_subcommand("shadow", "linear-model shadowing experiments");
    cmd_shadow->require_subcommand(1);
    ShadowArgs sh;
    auto add_common = [&](CLI::App* c) {
        c->add_option("--matrix", sh.matrix);
        c->add_option("--seed", sh.seed);
        c->add_option("--format", sh.format)->check(CLI::IsMember({"text", "json"}));
    };
    auto* sh_exp = cmd_shadow->add_subcommand("expansion", "verify the expansion property");
    add_common(sh_exp);
    sh_exp->add_option("--pairs", sh.pairs);
    auto* sh_const =
        cmd_shadow->add_subcommand("constant", "shadowing constant 2(R+1)/(lambda-1)");
    add_common(sh_const);
    sh_const->add_option("--R", sh.R)->required();
    sh_const->add_option("--lambda", sh.lambda);
    auto* sh_match = cmd_shadow->add_subcommand("match", "Newton-match periodic points");
    add_common(sh_match);
    sh_match->add_option("--eps", sh.eps);
    sh_match->add_option("--max-period", sh.max_period);
    sh_match->add_option("--tol", sh.tol);
    sh_match->add_option("--csv", sh.csv);
    auto* sh_two = cmd_shadow->add_subcommand("twosided", "two-sided orbit-distance bound");
    add_common(sh_two);
    sh_two->add_option("--eps", sh.eps);
    sh_two->add_option("--max-period", sh.max_period);
    sh_two->add_option("--tol", sh.tol);
    sh_two->add_option("--m-range", sh.m_range);
    auto* sh_semi =
        cmd_shadow->add_subcommand("semiconj", "semiconjugacy defect on the matched set");
    add_common(sh_semi);
    sh_semi->add_option("--eps", sh.eps);
    sh_semi->add_option("--max-period", sh.max_period);
    sh_semi->add_option("--tol", sh.tol);
    auto* sh_flip =
        cmd_shadow->add_subcommand("flip", "flip-annulus rotation and index experiment");
    add_common(sh_flip);
    sh_flip->add_option("--count", sh.count);
    sh_flip->add_option("--iterations", sh.iterations);
    sh_flip->add_option("--rotation", sh.rotation);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*cmd_validate) {
            Document doc = load_document(file);
            ValidationReport report = validate(doc.graph);
            write_output("", format == "json" ? dump(validation_json(report))
                                              : validation_text(report));
            return report.ok() ? 0 : 1;
        }

        if (*cmd_adjust) {
            Document doc = load_document(file);
            if (int rc = require_valid(doc)) return rc;
            AdjustedGraph adjusted = adjust(doc.graph, collapse_options(collapse));
            write_output(out_path, dump(adjusted_json(adjusted)));
            return 0;
        }

        if (*cmd_condense) {
            Document doc = load_document(file);
            if (int rc = require_valid(doc)) return rc;
            CondensedGraph condensed;
            if (doc.stage == Document::Stage::Condensed)
                condensed = condense(doc.to_condensed(), collapse_options(collapse));
            else if (doc.stage == Document::Stage::Adjusted)
                condensed = condense(doc.to_adjusted());
            else
                condensed = condense(adjust(doc.graph, collapse_options(collapse)));
            write_output(out_path, dump(condensed_json(condensed)));
            return 0;
        }

        if (*cmd_classes) {
            Document doc = load_document(file);
            if (int rc = require_valid(doc)) return rc;
            CensusOverride census;
            const CensusOverride* census_ptr = nullptr;
            if (!census_path.empty()) {
                std::ifstream in(census_path);
                if (!in) throw ParseError("cannot open census '" + census_path + "'");
                census = parse_census(json::parse(in));
                census_ptr = &census;
            }
            PersistenceReport report;
            std::string stage;
            if (doc.stage == Document::Stage::Condensed) {
                report = persistence_report(doc.to_condensed(), max_period, census_ptr);
                stage = "condensed";
            } else {
                AdjustedGraph adjusted = doc.stage == Document::Stage::Adjusted
                                             ? doc.to_adjusted()
                                             : adjust(doc.graph);
                report = persistence_report(adjusted, max_period, census_ptr);
                stage = "adjusted";
            }
            if (format == "json") {
                json j = classes_json(report, max_period);
                j["stage"] = stage;
                write_output("", dump(j));
            } else if (format == "dot") {
                write_output("", relations_dot(report));
            } else {
                write_output("", "stage: " + stage + "\n" +
                                     classes_text(report, max_period, point_classes));
            }
            return 0;
        }

        if (*cmd_report) {
            Document doc = load_document(file);
            ValidationReport report = validate(doc.graph);
            if (format == "dot") {
                write_output("", graph_dot(doc.graph));
                return report.ok() ? 0 : 1;
            }
            if (format == "json") {
                json j = json::object();
                j["validation"] = validation_json(report);
                j["euler_characteristic"] = doc.graph.total_euler_char();
                if (doc.stage == Document::Stage::Condensed) {
                    Inventory inv = periodic_inventory(doc.to_condensed(), max_period);
                    j["inventory"] = inventory_json(inv);
                }
                write_output("", dump(j));
                return report.ok() ? 0 : 1;
            }
            std::ostringstream text;
            text << validation_text(report);
            text << "ambient euler characteristic: " << doc.graph.total_euler_char() << "\n";
            if (report.ok()) {
                OrbitDecomposition dec = orbit_decomposition(doc.graph);
                text << "piece orbits: " << dec.pieces.size()
                     << ", annulus orbits: " << dec.annuli.size()
                     << ", circle orbits: " << dec.circles.size() << "\n";
                if (doc.stage == Document::Stage::Condensed) {
                    Inventory inv = periodic_inventory(doc.to_condensed(), max_period);
                    text << inventory_text(inv);
                }
            }
            write_output("", text.str());
            return report.ok() ? 0 : 1;
        }

        if (*cmd_shadow) {
            LinearModel model = parse_matrix(sh.matrix);
            if (*sh_exp) {
                ExpansionReport rep = verify_expansion(model, sh.pairs, sh.seed);
                write_output("", sh.format == "text"
                                     ? "expansion defect u=" + std::to_string(rep.worst_unstable) +
                                           " s=" + std::to_string(rep.worst_stable) +
                                           (rep.ok ? " ok\n" : " VIOLATION\n")
                                     : dump(expansion_report_json(rep, model.lambda)));
                return rep.ok ? 0 : 1;
            }
            if (*sh_const) {
                double lambda = sh.lambda > 0 ? sh.lambda : model.lambda;
                double C = shadowing_constant(sh.R, lambda);
                json j = json::object();
                j["R"] = sh.R;
                j["lambda"] = lambda;
                j["C"] = C;
                write_output("", sh.format == "text" ? "C = " + std::to_string(C) + "\n"
                                                     : dump(j));
                return 0;
            }
            PerturbedMap f = PerturbedMap::sinusoidal(model, sh.eps, sh.seed);
            if (*sh_match) {
                MatchReport rep = match_periodic_points_up_to(model, f, sh.max_period, sh.tol);
                if (!sh.csv.empty()) write_output(sh.csv, matched_pairs_csv(rep));
                write_output("", dump(match_report_json(rep)));
                return rep.all_within_C ? 0 : 1;
            }
            if (*sh_two) {
                MatchReport rep = match_periodic_points_up_to(model, f, sh.max_period, sh.tol);
                TwoSidedReport two =
                    two_sided_bound_check(model, f, rep.pairs, sh.m_range, rep.params.C);
                write_output("", dump(two_sided_report_json(two)));
                return two.ok ? 0 : 1;
            }
            if (*sh_semi) {
                MatchReport rep = match_periodic_points_up_to(model, f, sh.max_period, sh.tol);
                SemiconjugacyReport semi =
                    semiconjugacy_check(model, f, rep.pairs, rep.params.C);
                write_output("", dump(semiconjugacy_report_json(semi, rep.params.C)));
                return semi.lift_within_C ? 0 : 1;
            }
            if (*sh_flip) {
                json all = json::array();
                bool ok = true;
                FlipExperimentConfig cfg;
                cfg.iterations = sh.iterations;
                for (int i = 0; i < sh.count; ++i) {
                    CircleLift top, bottom;
                    if (!sh.rotation.empty()) {
                        // rigid boundary maps realizing the requested rotation
                        Rational rho = Rational::parse(sh.rotation);
                        top = CircleLift::rigid(rho.value());
                        bottom = CircleLift::rigid(0.0);
                    } else {
                        top = CircleLift::random(sh.seed * 1000 + 2 * i);
                        bottom = CircleLift::random(sh.seed * 1000 + 2 * i + 1);
                    }
                    FlipReport rep = flip_annulus_experiment(top, bottom, cfg);
                    ok = ok && rep.conclusive && rep.negation_defect < 1e-6 &&
                         rep.interior_fixed_points.size() == 2 && rep.index_sum == 2;
                    all.push_back(flip_report_json(rep));
                    if (!sh.rotation.empty()) break;
                }
                write_output("", dump(all));
                return ok ? 0 : 1;
            }
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "malformed document: " << e.what() << "\n";
        return 2;
    } catch (const RewriteError& e) {
        std::cerr << "rewrite refused: " << e.what() << "\n";
        return 1;
    } catch (const StructuralError& e) {
        std::cerr << "structural error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
