#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <random>

#include "torusdyn/io.hpp"
#include "torusdyn/svg.hpp"

using namespace torusdyn;

TEST_CASE("decimal17 round-trips doubles exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    std::vector<double> vals;
    for (int i = 0; i < 2000; ++i) vals.push_back(U(rng) * std::pow(10.0, i % 30 - 15));
    vals.push_back(linear_model().lambda);
    vals.push_back(linear_model().mu);
    vals.push_back(0.0);
    vals.push_back(5e-3);
    for (const double v : vals) {
        const double back = std::strtod(decimal17(v).c_str(), nullptr);
        CHECK(back == v);
    }
}

TEST_CASE("stable hash") {
    // frozen FNV-1a 64 test vectors
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a64_hex(serialize(example_map_spec("demo"))) ==
          fnv1a64_hex(serialize(example_map_spec("demo"))));
}

TEST_CASE("map spec round trip is byte identical") {
    for (const MapSpec& spec :
         {example_map_spec("demo"), example_map_spec("strict"),
          single_da_map_spec("demo"), theorem_map_spec("strict"), linear_map_spec()}) {
        const std::string a = serialize(spec);
        const MapSpec parsed = parse_map_spec(a);
        const std::string b = serialize(parsed);
        CHECK(a == b);
    }
}

TEST_CASE("maps rebuilt from a spec file agree with the originals") {
    const MapSpec spec = example_map_spec("demo");
    const ComposedDiffeo f = make_map_from_spec(spec);
    const ComposedDiffeo g = make_map_from_spec(parse_map_spec(serialize(spec)));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const TorusPoint x{U(rng), U(rng)};
        const TorusPoint a = f.evaluate(x), b = g.evaluate(x);
        CHECK(a.x1 == b.x1);
        CHECK(a.x2 == b.x2);
    }
    CHECK(f.sites[0].h2p == g.sites[0].h2p);
}

TEST_CASE("theorem spec carries both sites with exact rational centers") {
    const MapSpec spec = theorem_map_spec("demo");
    REQUIRE(spec.sites.size() == 2);
    CHECK(spec.sites[0].center.str1() == "0/1");
    CHECK(spec.sites[1].center.str1() == "1/5");
    CHECK(spec.sites[1].center.str2() == "2/5");
    CHECK(spec.sites[1].orientation == "inverse");
    const ComposedDiffeo f = make_map_from_spec(spec);
    CHECK(f.sites.size() == 2);
    CHECK(f.sites[1].orient == Orientation::inverse);
}

TEST_CASE("malformed specs are rejected") {
    CHECK_THROWS(parse_map_spec("{}"));
    CHECK_THROWS(parse_map_spec("not json"));
    MapSpec bad = example_map_spec("demo");
    bad.schema = "torus-da-map/999";
    CHECK_THROWS_AS(parse_map_spec(serialize(bad)), std::invalid_argument);
    CHECK_THROWS(parse_rational_pair("1/0", "0/1"));
}

TEST_CASE("certificate and census serialization") {
    const ComposedDiffeo f = make_map_from_spec(example_map_spec("demo"));
    const double lam = f.base.lambda;
    const auto cert = check_lemma2_conditions(f, lam * lam, 1.6, f.eps, 128);
    const auto cone = check_cone_invariance(f, f.delta, 128);
    const ordered_json j = certificate_json(cert, cone, "deadbeef00000000");
    CHECK(j["pass"] == true);
    CHECK(j["map_hash"] == "deadbeef00000000");
    CHECK(j["entry_conditions"]["conditions"].size() == 3);
    CHECK(j["cone_invariance"]["conditions"].size() == 2);
    // witnesses are serialized with their Jacobian entries
    for (const auto& c : j["entry_conditions"]["conditions"])
        CHECK(c["witness_jacobian"].size() == 4);

    const auto recs = find_fixed_points(f, 256);
    const ordered_json cj = census_json(recs, "deadbeef00000000");
    CHECK(cj["count"].get<size_t>() == recs.size());
    int sinks = 0;
    for (const auto& r : cj["fixed_points"])
        if (r["kind"] == "sink") ++sinks;
    CHECK(sinks == 1);
}

TEST_CASE("experiment report serialization embeds parameters and outcomes") {
    const ComposedDiffeo f = make_map_from_spec(example_map_spec("demo"));
    Lemma3Params P;
    P.n_samples = 3;
    ExperimentReport rep = lemma3_experiment(f, P);
    rep.map_hash = "0123456789abcdef";
    const ordered_json j = to_json(rep);
    CHECK(j["aggregate_pass"] == true);
    CHECK(j["seed"] == P.seed);
    CHECK(j["samples"].size() == 3);
    CHECK(j["map_hash"] == "0123456789abcdef");
    // the closest-approach distribution is embedded for offline auditing
    for (const auto& s : j["samples"]) CHECK(s.contains("closest_approach"));
    // timing never enters the serialized bytes
    CHECK_FALSE(j.contains("timing"));
    CHECK_FALSE(j.contains("timing_sec"));

    // byte-identical across reruns
    ExperimentReport rep2 = lemma3_experiment(f, P);
    rep2.map_hash = rep.map_hash;
    CHECK(to_json(rep).dump(2) == to_json(rep2).dump(2));
}

TEST_CASE("curve and bundle CSV") {
    TorusCurve c;
    c.kind = CurveKind::E_curve;
    c.step = 0.25;
    c.vertices = {{0.0, 0.0}, {0.25, 0.0}, {0.5, 0.0}, {0.75, 0.0}, {1.25, 0.0}};
    c.rebuild_arclength();
    const std::string csv = curve_csv(c);
    CHECK(csv.rfind("arclength,x1,x2,lift_x1,lift_x2\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    // wrapped and lifted coordinates both present: 1.25 wraps to 0.25
    CHECK(csv.find("1.25,0.25,0,1.25,0") != std::string::npos);

    const ComposedDiffeo f = make_map_from_spec(linear_map_spec());
    std::vector<BundleSample> Es, Fs;
    for (int i = 0; i < 4; ++i) {
        const TorusPoint x{0.1 + 0.2 * i, 0.3};
        Es.push_back(compute_E_direction(forward_view(f), x, 50, 1e-10));
        Fs.push_back(compute_F_direction(forward_view(f), x, 50, 1e-10));
    }
    const std::string bcsv = bundle_csv(Es, Fs);
    CHECK(std::count(bcsv.begin(), bcsv.end(), '\n') == 5);
    CHECK(bcsv.rfind("x1,x2,theta_E,theta_F,residual_E,residual_F\n", 0) == 0);
}

TEST_CASE("SVG emission is deterministic and well formed") {
    FigureWindow win{-0.02, -0.02, 0.02, 0.02, 600, 600};
    auto render = [&]() {
        SvgFigure fig(win);
        fig.add_polyline({{-0.01, 0.0}, {0.0, 0.001}, {0.01, 0.0}}, "#d22", 1.2);
        fig.bump_layer();
        fig.add_marker({0.0, 0.0}, 3.0, "#000", "p");
        fig.bump_layer();
        fig.add_circle_outline({0.0, 0.0}, 0.005, "#888");
        fig.bump_layer();
        fig.add_glyph({0.004, 0.004}, {1.0, 0.0}, 0.002, "#44a");
        fig.bump_layer();
        return fig.finalize();
    };
    const std::string a = render(), b = render();
    CHECK(a == b);
    CHECK(a.rfind("<?xml", 0) == 0);
    CHECK(a.find("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\"") !=
          std::string::npos);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(a.find("polyline") != std::string::npos);
    CHECK(a.find("NaN") == std::string::npos);

    // an empty layer list still yields a valid document (frame only)
    SvgFigure empty(win);
    const std::string e = empty.finalize();
    CHECK(e.rfind("<?xml", 0) == 0);
    CHECK(e.find("<rect") != std::string::npos);
    CHECK(empty.layer_count() == 0);
}
