#pragma once

// Command-line front end. Every verb renders its whole output in memory and
// writes it in one step, so failed runs leave no partial files.

#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "p3net/error.hpp"
#include "p3net/geometry.hpp"
#include "p3net/io.hpp"
#include "p3net/layout.hpp"
#include "p3net/manifold.hpp"
#include "p3net/quantum.hpp"
#include "p3net/stats.hpp"
#include "p3net/strategy.hpp"

namespace p3net::cli {

using nlohmann::json;

struct RunConfig {
    std::string command;
    Representation representation = Representation::Full26;
    std::string format = "json";
    std::uint64_t seed = 42;
    bool seed_given = false;
    long long shots = 0;
    double alpha = 0.01;
    std::optional<double> noise;
    std::string output = "-";

    std::string layout;                // graph: "" | "svd"
    std::string kind = "honest";       // simulate
    std::optional<double> perturb;     // simulate: relative sigma of an extra perturbed point
    std::string select;                // simulate: "" | exact | sampled | perturbed
    std::string input;                 // project
    ProjectOptions project_options;    // project
    std::string expected, observed;    // test
    std::string mode = "point";        // test: point | sample
    std::string noise_mode = "relative";
    std::optional<double> perturb_observed;  // test
    std::string rho, sigma;            // bound
};

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline NoiseMode parse_noise_mode(const std::string& s) {
    if (s == "relative") return NoiseMode::Relative;
    if (s == "absolute") return NoiseMode::Absolute;
    throw Error("unknown noise mode '" + s + "' (expected relative|absolute)");
}

inline std::string cmd_vertices(const RunConfig& cfg) {
    const auto rep = cfg.representation;
    if (cfg.format == "csv") {
        return rep == Representation::Full26 ? io::vertex_table_csv(enumerate_full(), rep)
                                             : io::vertex_table_csv(enumerate_reduced(), rep);
    }
    if (cfg.format == "json") {
        return dump(rep == Representation::Full26 ? io::vertex_table_json(enumerate_full(), rep)
                                                  : io::vertex_table_json(enumerate_reduced(), rep));
    }
    throw Error("vertices supports --format csv|json");
}

inline std::string cmd_graph(const RunConfig& cfg) {
    const auto g = build_visibility_graph(cfg.representation);
    if (cfg.layout == "svd") {
        const auto coords = svd_layout(cfg.representation);
        if (cfg.format == "csv") {
            std::ostringstream os;
            os << std::setprecision(17) << "x,y,z\n";
            for (const auto& c : coords) os << c[0] << ',' << c[1] << ',' << c[2] << '\n';
            return os.str();
        }
        if (cfg.format == "json") {
            json rows = json::array();
            for (const auto& c : coords) rows.push_back({c[0], c[1], c[2]});
            return dump({{"representation", to_string(cfg.representation)}, {"layout", rows}});
        }
        throw Error("graph --layout svd supports --format csv|json");
    }
    if (!cfg.layout.empty()) throw Error("unknown layout '" + cfg.layout + "' (expected svd)");
    if (cfg.format == "dot") return io::graph_dot(g);
    if (cfg.format == "json") return dump(io::graph_json(g));
    throw Error("graph supports --format dot|json (csv only with --layout svd)");
}

inline std::string cmd_analyze(const RunConfig& cfg) {
    if (cfg.format != "json") throw Error("analyze supports --format json only");
    const auto rep = cfg.representation;
    const auto g = build_visibility_graph(rep);
    const auto sp = all_pairs_shortest_paths(g);
    const auto gens = minimum_generators(g);
    const auto clusters = maximal_convex_clusters(g);

    json classification = json::array();
    for (int i = 0; i < g.node_count(); ++i) {
        StatusCounts c;
        if (rep == Representation::Full26) {
            c = classify_from(DeterministicStrategy::from_table_index(i));
        } else {
            c = {1, g.degree(i), g.node_count() - 1 - g.degree(i)};
        }
        classification.push_back({{"vertex", i}, {"coincident", c.coincident}, {"visible", c.visible}, {"hidden", c.hidden}});
    }

    json histogram = json::object();
    const auto hist = rep == Representation::Full26 ? hamming_histogram(enumerate_full())
                                                    : hamming_histogram(enumerate_reduced());
    for (const auto& [w, n] : hist) histogram[std::to_string(w)] = n;

    json cluster_list = json::array();
    std::vector<std::size_t> sizes;
    for (const auto& c : clusters) {
        cluster_list.push_back(c);
        sizes.push_back(c.size());
    }

    const int smaller = static_cast<int>(gens.members.size()) - 1;
    return dump({
        {"representation", to_string(rep)},
        {"node_count", g.node_count()},
        {"edge_count", g.edge_count()},
        {"apsp_max", sp.max_distance},
        {"apsp", io::apsp_json(sp)},
        {"min_generators", gens.members.size()},
        {"generators", io::generator_json(gens)},
        {"dominating_sets_of_size_" + std::to_string(smaller), smaller > 0 ? count_dominating_sets(g, smaller) : 0},
        {"constructions",
         {{"diagonal", io::coverage_json(verify_generator_set(g, diagonal_construction(rep)))},
          {"same_row", io::coverage_json(verify_generator_set(g, same_row_construction(rep)))}}},
        {"clusters", {{"count", clusters.size()}, {"sizes", sizes}, {"members", cluster_list}}},
        {"hamming_histogram", histogram},
        {"classification", classification},
    });
}

inline std::string cmd_simulate(const RunConfig& cfg) {
    if (cfg.format != "json") throw Error("simulate supports --format json only");
    if (cfg.shots < 0) throw Error("invalid shots: must be >= 0");
    const double noise = cfg.noise.value_or(0.0);
    const auto kind = parse_scenario_kind(cfg.kind);
    const auto sc = qkd_scenario(kind, noise);
    const auto fd = behaviour_from_state(sc.state, sc.measurements, sc.shape);
    const auto exact = collapse(fd);

    json out = {{"kind", to_string(kind)},
                {"noise", noise},
                {"shape", io::shape_json(sc.shape)},
                {"state", io::density_json(sc.state)},
                {"exact", io::point_json(exact)},
                {"distribution", io::distribution_json(fd)},
                {"no_signalling", no_signalling_check(fd, 1e-10).ok}};
    std::optional<BehaviourPoint> sampled_point;
    if (cfg.shots > 0) {
        const auto sampled = sample_distribution(fd, cfg.shots, cfg.seed);
        sampled_point = sampled.point;
        out["sampled"] = {{"shots", cfg.shots},
                          {"seed", cfg.seed},
                          {"point", io::point_json(sampled.point)},
                          {"standard_errors", sampled.standard_errors}};
    }
    std::optional<BehaviourPoint> perturbed_point;
    if (cfg.perturb) {
        perturbed_point = perturb(exact, {*cfg.perturb, cfg.seed, parse_noise_mode(cfg.noise_mode)});
        out["perturbed"] = {{"sigma", *cfg.perturb},
                            {"noise_mode", cfg.noise_mode},
                            {"seed", cfg.seed},
                            {"point", io::point_json(*perturbed_point)}};
    }
    if (cfg.select.empty()) return dump(out);
    if (cfg.select == "exact") return dump(io::point_json(exact));
    if (cfg.select == "sampled") {
        if (!sampled_point) throw Error("--select sampled needs --shots > 0");
        return dump(io::point_json(*sampled_point));
    }
    if (cfg.select == "perturbed") {
        if (!perturbed_point) throw Error("--select perturbed needs --perturb");
        return dump(io::point_json(*perturbed_point));
    }
    throw Error("unknown --select '" + cfg.select + "' (expected exact|sampled|perturbed)");
}

inline std::string cmd_project(const RunConfig& cfg) {
    if (cfg.input.empty()) throw Error("project needs --input <point.json>");
    const auto q = io::parse_point(io::read_json(cfg.input));
    const auto r = project(q, cfg.project_options);
    json out = io::projection_json(r);
    out["on_manifold"] = on_manifold(q, 1e-9);
    return dump(out);
}

namespace detail {

inline json safe_two_sample(const std::vector<double>& xs, const std::vector<double>& ys) {
    json j;
    try {
        j["t"] = io::two_sample_json(two_sample_t(xs, ys));
    } catch (const Error& e) {
        j["t"] = nullptr;
        j["t_error"] = e.what();
    }
    try {
        j["ks"] = io::two_sample_json(two_sample_ks(xs, ys));
    } catch (const Error& e) {
        j["ks"] = nullptr;
        j["ks_error"] = e.what();
    }
    return j;
}

inline json manifold_summary(const BehaviourPoint& observed, const BehaviourPoint& expected) {
    json j;
    j["observed_projection_distance"] = project(observed).distance;
    try {
        j["normalized_score"] = normalized_score(observed, expected);
    } catch (const Error& e) {
        j["normalized_score"] = nullptr;
        j["normalized_score_error"] = e.what();
    }
    return j;
}

inline BehaviourPoint centroid(const std::vector<std::vector<double>>& rows) {
    std::vector<double> c(rows.front().size(), 0.0);
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.size(); ++k) c[k] += r[k];
    }
    for (double& v : c) v /= static_cast<double>(rows.size());
    return BehaviourPoint(Representation::Reduced8, c);
}

} // namespace detail

inline std::string cmd_test(const RunConfig& cfg) {
    if (cfg.expected.empty() || cfg.observed.empty()) throw Error("test needs --expected and --observed");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw Error("alpha must lie in (0,1)");
    const NoiseMode noise_mode = parse_noise_mode(cfg.noise_mode);

    if (cfg.mode == "point") {
        const auto expected = io::parse_point(io::read_json(cfg.expected));
        auto observed = io::parse_point(io::read_json(cfg.observed));
        if (expected.representation() != Representation::Reduced8 ||
            observed.representation() != Representation::Reduced8) {
            throw Error("representation mismatch: test expects reduced-8 points");
        }
        json out;
        if (cfg.perturb_observed) {
            if (!cfg.seed_given) throw Error("--perturb-observed requires an explicit --seed");
            observed = perturb(observed, {*cfg.perturb_observed, cfg.seed, noise_mode});
            out["perturbed_observed"] = io::point_json(observed);
            out["seed"] = cfg.seed;
        }
        const double noise = cfg.noise.value_or(0.05);
        const double sigma_d = distance_sigma(expected, noise, noise_mode);
        out["mode"] = "point";
        out["noise"] = noise;
        out["noise_mode"] = cfg.noise_mode;
        out["report"] = io::test_report_json(gaussian_separability(expected, observed, sigma_d, cfg.alpha));
        out["manifold"] = detail::manifold_summary(observed, expected);
        return dump(out);
    }
    if (cfg.mode == "sample") {
        const auto xs = io::parse_csv_rows(io::read_file(cfg.expected));
        const auto ys = io::parse_csv_rows(io::read_file(cfg.observed));
        if (xs.empty() || ys.empty()) throw Error("sample files must not be empty");
        const std::size_t width = xs.front().size();
        if (ys.front().size() != width) throw Error("representation mismatch: sample files differ in column count");
        json out = {{"mode", "sample"}, {"alpha", cfg.alpha}, {"sizes", {xs.size(), ys.size()}}};
        if (width == 1) {
            std::vector<double> a, b;
            for (const auto& r : xs) a.push_back(r[0]);
            for (const auto& r : ys) b.push_back(r[0]);
            out["scalar"] = detail::safe_two_sample(a, b);
            return dump(out);
        }
        if (width != kReducedDim) throw Error("sample rows must have 1 or 8 columns");
        const auto names = reduced_column_names();
        json per = json::object();
        for (std::size_t k = 0; k < width; ++k) {
            std::vector<double> a, b;
            for (const auto& r : xs) a.push_back(r[k]);
            for (const auto& r : ys) b.push_back(r[k]);
            per[names[k]] = detail::safe_two_sample(a, b);
        }
        out["per_coordinate"] = per;
        const auto ce = detail::centroid(xs);
        const auto co = detail::centroid(ys);
        auto distances = [&](const std::vector<std::vector<double>>& rows) {
            std::vector<double> d;
            for (const auto& r : rows) d.push_back(euclidean_distance(BehaviourPoint(Representation::Reduced8, r), ce));
            return d;
        };
        out["distance_to_expected_centroid"] = detail::safe_two_sample(distances(xs), distances(ys));
        out["expected_centroid"] = io::point_json(ce);
        out["observed_centroid"] = io::point_json(co);
        out["manifold"] = detail::manifold_summary(co, ce);
        return dump(out);
    }
    throw Error("unknown test mode '" + cfg.mode + "' (expected point|sample)");
}

inline std::string cmd_bound(const RunConfig& cfg) {
    if (cfg.rho.empty() || cfg.sigma.empty()) throw Error("bound needs --rho and --sigma");
    const auto rho = io::parse_density(io::read_json(cfg.rho));
    const auto sigma = io::parse_density(io::read_json(cfg.sigma));
    if (rho.dim() != sigma.dim()) throw Error("dimension mismatch between rho and sigma");
    if (rho.dim() != 4) throw Error("bound expects two-qubit states (dim 4)");
    const auto bound = behaviour_bound_check(rho, sigma, bb84_measurements(2), kReducedShape);
    const auto fid = fidelity_bounds_check(rho, sigma);
    return dump({{"bound", io::bound_json(bound)}, {"fidelity", io::fidelity_json(fid)},
                 {"holds", bound.holds && fid.holds}});
}

inline std::string execute(const RunConfig& cfg) {
    if (cfg.command == "vertices") return cmd_vertices(cfg);
    if (cfg.command == "graph") return cmd_graph(cfg);
    if (cfg.command == "analyze") return cmd_analyze(cfg);
    if (cfg.command == "simulate") return cmd_simulate(cfg);
    if (cfg.command == "project") return cmd_project(cfg);
    if (cfg.command == "test") return cmd_test(cfg);
    if (cfg.command == "bound") return cmd_bound(cfg);
    throw Error("unknown command '" + cfg.command + "'");
}

inline void print_error(std::ostream& err, const std::string& command, const std::string& message) {
    err << json{{"error", message}, {"command", command}}.dump() << "\n";
}

/// Parses argv, runs the verb, writes the output. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Local-set geometry and nonclassicality tests for the three-party line network"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string rep = "full";
    double noise = 0.0;
    double perturb = 0.0;
    double perturb_observed = 0.0;

    auto add_common = [&](CLI::App* sub, const std::string& formats) {
        sub->add_option("--output,-o", cfg.output, "Output path, '-' for stdout")->capture_default_str();
        sub->add_option("--format", cfg.format, "Output format (" + formats + ")")->capture_default_str();
    };
    auto add_rep = [&](CLI::App* sub) {
        sub->add_option("--rep", rep, "Representation: full | reduced")->capture_default_str();
    };

    auto* vertices = app.add_subcommand("vertices", "Emit the vertex table");
    add_rep(vertices);
    add_common(vertices, "csv|json");

    auto* graph = app.add_subcommand("graph", "Emit the visibility graph or its 3-D layout");
    add_rep(graph);
    add_common(graph, "dot|json|csv");
    graph->add_option("--layout", cfg.layout, "Layout: svd");

    auto* analyze = app.add_subcommand("analyze", "Shortest paths, generators, clusters and counts");
    add_rep(analyze);
    add_common(analyze, "json");

    auto* simulate = app.add_subcommand("simulate", "Simulate the honest or intercepted key exchange");
    add_common(simulate, "json");
    simulate->add_option("--kind", cfg.kind, "honest | intercepted")->capture_default_str();
    auto* sim_noise = simulate->add_option("--noise", noise, "Depolarizing probability per pair");
    simulate->add_option("--shots", cfg.shots, "Shots per setting tuple (0: exact only)")->capture_default_str();
    auto* sim_seed = simulate->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    auto* sim_perturb = simulate->add_option("--perturb", perturb, "Also emit the exact point with Gaussian noise");
    simulate->add_option("--noise-mode", cfg.noise_mode, "relative | absolute")->capture_default_str();
    simulate->add_option("--select", cfg.select, "Emit only one point: exact | sampled | perturbed");

    auto* proj = app.add_subcommand("project", "Project a reduced point onto the uncorrelated manifold");
    add_common(proj, "json");
    proj->add_option("--input,-i", cfg.input, "Behaviour point JSON")->required();
    proj->add_option("--starts", cfg.project_options.starts, "Lattice starts (1..9)")->capture_default_str();
    proj->add_option("--max-iter", cfg.project_options.max_iter)->capture_default_str();
    proj->add_option("--grad-tol", cfg.project_options.grad_tol)->capture_default_str();

    auto* test = app.add_subcommand("test", "Compare expected and observed behaviour");
    add_common(test, "json");
    test->add_option("--expected", cfg.expected, "Expected point JSON (or sample CSV)")->required();
    test->add_option("--observed", cfg.observed, "Observed point JSON (or sample CSV)")->required();
    test->add_option("--mode", cfg.mode, "point | sample")->capture_default_str();
    auto* test_noise = test->add_option("--noise", noise, "Per-component sigma for the distance error (default 0.05)");
    test->add_option("--noise-mode", cfg.noise_mode, "relative | absolute")->capture_default_str();
    test->add_option("--alpha", cfg.alpha, "Significance level")->capture_default_str();
    auto* test_seed = test->add_option("--seed", cfg.seed, "RNG seed (required with --perturb-observed)");
    auto* test_perturb = test->add_option("--perturb-observed", perturb_observed,
                                          "Add seeded Gaussian noise to the observed point first");

    auto* bound = app.add_subcommand("bound", "Check the behaviour-distance / trace-distance bounds");
    add_common(bound, "json");
    bound->add_option("--rho", cfg.rho, "Expected state JSON")->required();
    bound->add_option("--sigma", cfg.sigma, "Observed state JSON")->required();

    std::string command = "p3net";
    try {
        app.parse(argc, argv);
        for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
        command = cfg.command;
        cfg.representation = parse_representation(rep);
        if ((sim_noise->count() > 0 && cfg.command == "simulate") || (test_noise->count() > 0 && cfg.command == "test")) {
            cfg.noise = noise;
        }
        if (sim_perturb->count() > 0) cfg.perturb = perturb;
        if (test_perturb->count() > 0) cfg.perturb_observed = perturb_observed;
        cfg.seed_given = sim_seed->count() > 0 || test_seed->count() > 0;
        io::write_output(cfg.output, execute(cfg), out);
        return 0;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        print_error(err, command, e.what());
        return 2;
    } catch (const std::exception& e) {
        print_error(err, command, e.what());
        return 1;
    }
}

} // namespace p3net::cli
