// Command-line driver: build surgered torus maps, certify their dominated
// splitting, locate fixed points, sample the direction bundles, trace
// integral curves, run the funneling experiments, and plot figures.
//
// Exit codes: 0 pass, 1 check or experiment failure, 2 inapplicable input,
// 3 input error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "torusdyn/construct.hpp"
#include "torusdyn/dynamics.hpp"
#include "torusdyn/experiments.hpp"
#include "torusdyn/io.hpp"
#include "torusdyn/splitting.hpp"
#include "torusdyn/surgery.hpp"
#include "torusdyn/svg.hpp"

namespace fs = std::filesystem;
using namespace torusdyn;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInapplicable = 2;
constexpr int kExitInputError = 3;

std::string out_dir_default() {
    const char* env = std::getenv("TORUSDYN_OUT");
    return env ? env : ".";
}

std::string join_out(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

struct LoadedMap {
    MapSpec spec;
    ComposedDiffeo map;
    std::string hash;
};

// missing or unparsable inputs are input errors (exit 3), not failures
std::string read_input_file(const std::string& path) {
    try {
        return read_file(path);
    } catch (const std::exception& e) {
        throw std::invalid_argument(e.what());
    }
}

LoadedMap load_map(const std::string& path) {
    const std::string bytes = read_input_file(path);
    LoadedMap lm;
    MapSpec spec;
    try {
        spec = parse_map_spec(bytes);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("bad map spec: ") + e.what());
    }
    lm.spec = spec;
    lm.map = make_map_from_spec(lm.spec);
    lm.hash = fnv1a64_hex(serialize(lm.spec));
    return lm;
}

std::pair<double, double> parse_pair(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("expected 'a,b': " + s);
    return {std::strtod(s.substr(0, comma).c_str(), nullptr),
            std::strtod(s.substr(comma + 1).c_str(), nullptr)};
}

RationalPoint parse_site(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("expected 'n/d,n/d': " + s);
    return parse_rational_pair(s.substr(0, comma), s.substr(comma + 1));
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

// ---------------------------------------------------------------------------

int cmd_build(const std::string& kind, const std::string& mode, double eps_override,
              const std::string& site1, const std::string& site2,
              const std::string& out_path, const std::string& report_path) {
    MapSpec spec;
    if (kind == "example")
        spec = example_map_spec(mode);
    else if (kind == "single")
        spec = single_da_map_spec(mode);
    else if (kind == "linear")
        spec = linear_map_spec();
    else if (kind == "theorem")
        spec = theorem_map_spec(mode, parse_site(site1), parse_site(site2));
    else {
        std::cerr << "unknown map kind: " << kind << "\n";
        return kExitInputError;
    }
    if (eps_override > 0.0) {
        spec.eps = eps_override;
        spec.mode = "custom";
    }

    ConstructionReport report;
    report.label = spec.label;
    Timer timer;
    try {
        if (kind == "example") {
            BuiltMap bm = build_example_map(spec.eps, spec.delta, spec.params);
            report = bm.report;
        } else if (kind == "single") {
            BuiltMap bm = build_single_da_map(spec.eps, spec.delta, spec.params);
            report = bm.report;
        } else if (kind == "theorem") {
            BuiltMap bm = build_theorem_map(spec.eps, spec.params,
                                            spec.sites[0].center.value(),
                                            spec.sites[1].center.value());
            report = bm.report;
        } else {
            make_map_from_spec(spec);  // linear: nothing to verify
        }
    } catch (const std::exception& e) {
        std::cerr << "construction failed: " << e.what() << "\n";
        return kExitFail;
    }

    write_file(out_path, serialize(spec));
    if (!report_path.empty()) {
        ordered_json rj;
        rj["schema"] = "torus-da-construction/1";
        rj["label"] = report.label;
        rj["pass"] = report.pass();
        rj["checks"] = ordered_json::array();
        for (const auto& it : report.items) {
            ordered_json cj;
            cj["name"] = it.name;
            cj["pass"] = it.pass;
            cj["measured"] = decimal17(it.measured);
            cj["bound"] = decimal17(it.bound);
            if (!it.detail.empty()) cj["detail"] = it.detail;
            rj["checks"].push_back(cj);
        }
        write_file(report_path, rj.dump(2) + "\n");
    }
    std::cerr << "built " << spec.label << " (mode " << spec.mode << ", eps "
              << decimal17(spec.eps) << ") in " << timer.seconds() << " s\n";
    if (!report.pass()) {
        std::cerr << "property checks failed:\n" << report.failures();
        return kExitFail;
    }
    std::cerr << "wrote " << out_path << "\n";
    return kExitPass;
}

int cmd_certify(const std::string& spec_path, double K, double eta, double eps,
                double delta, int grid_n, const std::string& out_path) {
    const LoadedMap lm = load_map(spec_path);
    const double lam = lm.map.base.lambda;
    if (K <= 0.0) K = lam * lam;
    if (eta <= 0.0) eta = lm.spec.params.eta;
    if (eps <= 0.0) eps = lm.map.eps;
    if (delta <= 0.0) delta = lm.map.delta;

    Timer timer;
    const auto cert = check_lemma2_conditions(lm.map, K, eta, eps, grid_n);
    const auto cone = check_cone_invariance(lm.map, delta, grid_n);
    const ordered_json j = certificate_json(cert, cone, lm.hash);
    if (!out_path.empty()) write_file(out_path, j.dump(2) + "\n");
    std::cerr << "certified in " << timer.seconds() << " s\n";
    for (const auto& c : cert.conditions)
        std::cerr << (c.pass ? "  [PASS] " : "  [FAIL] ") << c.name << " measured "
                  << decimal17(c.measured) << " bound " << decimal17(c.bound) << "\n";
    for (const auto& c : cone.conditions)
        std::cerr << (c.pass ? "  [PASS] " : "  [FAIL] ") << c.name << " margin "
                  << decimal17(c.margin) << "\n";
    return cert.pass && cone.pass ? kExitPass : kExitFail;
}

int cmd_fixed_points(const std::string& spec_path, int grid_n,
                     const std::string& out_path) {
    const LoadedMap lm = load_map(spec_path);
    const auto recs = find_fixed_points(lm.map, grid_n);
    const ordered_json j = census_json(recs, lm.hash);
    if (!out_path.empty()) write_file(out_path, j.dump(2) + "\n");
    for (const auto& r : recs)
        std::cerr << "  (" << decimal17(r.location.x1) << ", "
                  << decimal17(r.location.x2) << ") " << kind_name(r.kind) << "\n";
    return kExitPass;
}

int cmd_bundles(const std::string& spec_path, int grid_n, int n, double tol,
                const std::string& out_path) {
    const LoadedMap lm = load_map(spec_path);
    const FlowView view = forward_view(lm.map);
    std::vector<BundleSample> Es, Fs;
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j) {
            const TorusPoint x{(i + 0.5) / grid_n, (j + 0.5) / grid_n};
            Es.push_back(compute_E_direction(view, x, n, tol));
            Fs.push_back(compute_F_direction(view, x, n, tol));
        }
    write_file(out_path, bundle_csv(Es, Fs));
    std::cerr << "wrote " << Es.size() << " bundle samples to " << out_path << "\n";
    return kExitPass;
}

int cmd_trace(const std::string& spec_path, const std::string& start,
              const std::string& bundle, double length, double step,
              const std::string& out_path) {
    const LoadedMap lm = load_map(spec_path);
    const auto [x1, x2] = parse_pair(start);
    if (step <= 0.0) step = lm.map.eps / 500.0;
    if (length <= 0.0) length = 3.0 * lm.map.eps;
    const Bundle which = bundle == "F" ? Bundle::F : Bundle::E;
    const TorusCurve c = trace_integral_curve(forward_view(lm.map), wrap({x1, x2}),
                                              which, 0.5 * length, step);
    write_file(out_path, curve_csv(c));
    std::cerr << "traced " << c.vertices.size() << " vertices, arclength "
              << c.total_length() << "\n";
    return kExitPass;
}

int cmd_experiment(const std::string& spec_path, const std::string& which,
                   uint64_t seed, int samples, double magnitude, int trials,
                   const std::string& out_dir) {
    const LoadedMap lm = load_map(spec_path);
    fs::create_directories(out_dir);
    Lemma3Params P;
    P.seed = seed;
    if (samples > 0) P.n_samples = samples;
    Timer timer;

    auto write_curves = [&](const ExperimentReport& rep, const TorusPoint base,
                            const FlowView& view) {
        // per-curve CSV plus the manifold, re-traced deterministically
        const ManifoldSegment wuu = grow_unstable_manifold(
            view, base, 0.1, P.manifold_step, P.bundle_n, P.bundle_tol);
        write_file(join_out(out_dir, "wuu.csv"), manifold_csv(wuu));
        int id = 0;
        for (const auto& s : rep.samples) {
            const TorusCurve c =
                trace_integral_curve(view, s.sample, Bundle::E, 1.5 * lm.map.eps,
                                     rep.step, P.bundle_n, P.bundle_tol);
            char name[64];
            std::snprintf(name, sizeof name, "curve_%03d.csv", id++);
            write_file(join_out(out_dir, name), curve_csv(c));
        }
    };

    int exit_code = kExitPass;
    if (which == "lemma3" || which == "remark") {
        ExperimentReport rep = which == "lemma3" ? lemma3_experiment(lm.map, P)
                                                 : remark_experiment(lm.map, P);
        rep.map_hash = lm.hash;
        write_file(join_out(out_dir, "report.json"), to_json(rep).dump(2) + "\n");
        if (rep.inapplicable) {
            std::cerr << "inapplicable: " << rep.inapplicable_reason << "\n";
            exit_code = kExitInapplicable;
        } else {
            if (const SurgerySite* site = find_sink_site(lm.map, Orientation::forward))
                write_curves(rep,
                             which == "remark" ? site->saddle_location() : site->center,
                             forward_view(lm.map));
            // the foliation witness rides along with the funneling run
            if (which == "lemma3") {
                const FoliationWitness w = foliation_violation_witness(lm.map, P);
                write_file(join_out(out_dir, "foliation_witness.json"),
                           to_json(w).dump(2) + "\n");
            }
            exit_code = rep.aggregate_pass ? kExitPass : kExitFail;
        }
    } else if (which == "theorem") {
        TheoremReport rep = theorem_experiment(lm.map, P);
        rep.part_a.map_hash = lm.hash;
        rep.part_b.map_hash = lm.hash;
        write_file(join_out(out_dir, "report.json"), to_json(rep).dump(2) + "\n");
        if (rep.part_a.inapplicable) {
            std::cerr << "inapplicable: " << rep.part_a.inapplicable_reason << "\n";
            exit_code = kExitInapplicable;
        } else {
            exit_code = rep.aggregate_pass ? kExitPass : kExitFail;
        }
    } else if (which == "robustness") {
        if (!find_sink_site(lm.map, Orientation::forward)) {
            std::cerr << "inapplicable: no sink basin\n";
            return kExitInapplicable;
        }
        const double lam = lm.map.base.lambda;
        if (magnitude <= 0.0) magnitude = lm.map.eps / 20.0;
        if (trials <= 0) trials = 5;
        const RobustnessReport rep = robustness_experiment(
            lm.map, magnitude, trials, lam * lam, lm.spec.params.eta, P);
        write_file(join_out(out_dir, "report.json"), to_json(rep).dump(2) + "\n");
        exit_code = rep.aggregate_pass ? kExitPass : kExitFail;
    } else {
        std::cerr << "unknown experiment: " << which << "\n";
        return kExitInputError;
    }
    std::cerr << "experiment '" << which << "' finished in " << timer.seconds()
              << " s, reports in " << out_dir << "\n";
    return exit_code;
}

std::vector<LiftedPoint> read_curve_csv(const std::string& path) {
    const std::string text = read_input_file(path);
    std::vector<LiftedPoint> pts;
    size_t pos = text.find('\n');  // skip header
    if (pos == std::string::npos) throw std::invalid_argument("empty csv: " + path);
    ++pos;
    while (pos < text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        double cols[5] = {0, 0, 0, 0, 0};
        int k = 0;
        size_t p = 0;
        while (k < 5 && p <= line.size()) {
            size_t comma = line.find(',', p);
            if (comma == std::string::npos) comma = line.size();
            cols[k++] = std::strtod(line.substr(p, comma - p).c_str(), nullptr);
            p = comma + 1;
        }
        if (k == 5)
            pts.push_back({cols[3], cols[4]});  // lifted coordinates
        else
            throw std::invalid_argument("bad csv row in " + path);
    }
    return pts;
}

int cmd_plot(const std::string& out_path, const std::string& window,
             const std::vector<std::string>& curves,
             const std::vector<std::string>& manifolds, const std::string& points,
             const std::string& ball, const std::string& boxes,
             const std::string& glyphs) {
    FigureWindow win{0.0, 0.0, 1.0, 1.0, 900, 900};
    if (!window.empty()) {
        double x0, y0, x1, y1;
        if (std::sscanf(window.c_str(), "%lf,%lf,%lf,%lf", &x0, &y0, &x1, &y1) != 4) {
            std::cerr << "bad --window, expected x0,y0,x1,y1\n";
            return kExitInputError;
        }
        win = {x0, y0, x1, y1, 900, 900};
    }
    SvgFigure fig(win);
    // polylines arrive as lifts anchored wherever their start point wrapped;
    // shift each by the lattice vector bringing it closest to the window
    const Vec2 wc{0.5 * (win.x0 + win.x1), 0.5 * (win.y0 + win.y1)};
    auto recenter = [&](std::vector<LiftedPoint> pts) {
        if (pts.empty()) return pts;
        const LiftedPoint mid = pts[pts.size() / 2];
        const double dx = std::floor(mid.x1 - wc.x + 0.5);
        const double dy = std::floor(mid.x2 - wc.y + 0.5);
        for (auto& p : pts) {
            p.x1 -= dx;
            p.x2 -= dy;
        }
        return pts;
    };
    static const char* curve_colors[] = {"#c0392b", "#d35400", "#b03a2e", "#a04000"};
    int ci = 0;
    for (const auto& path : curves) {
        fig.add_polyline(recenter(read_curve_csv(path)), curve_colors[ci++ % 4], 0.9);
        fig.bump_layer();
    }
    for (const auto& path : manifolds) {
        fig.add_polyline(recenter(read_curve_csv(path)), "#1a5276", 1.6);
        fig.bump_layer();
    }
    if (!points.empty()) {
        ordered_json j;
        try {
            j = ordered_json::parse(read_input_file(points));
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("bad points layer: ") + e.what());
        }
        if (!j.contains("fixed_points")) {
            std::cerr << "unknown points layer in " << points << "\n";
            return kExitInputError;
        }
        for (const auto& r : j["fixed_points"]) {
            double x = parse_real(r["location"][0]);
            double y = parse_real(r["location"][1]);
            x -= std::floor(x - wc.x + 0.5);
            y -= std::floor(y - wc.y + 0.5);
            const std::string kind = r["kind"].get<std::string>();
            const char* color = kind == "source"  ? "#c0392b"
                                : kind == "sink"  ? "#1e8449"
                                                  : "#7d6608";
            fig.add_marker({x, y}, 3.5, color, kind.substr(0, 2));
        }
        fig.bump_layer();
    }
    if (!ball.empty()) {
        double cx, cy, r;
        if (std::sscanf(ball.c_str(), "%lf,%lf,%lf", &cx, &cy, &r) != 3) {
            std::cerr << "bad --ball, expected cx,cy,r\n";
            return kExitInputError;
        }
        fig.add_circle_outline({cx, cy}, r, "#666666");
        fig.bump_layer();
    }
    if (!boxes.empty()) {
        const LoadedMap lm = load_map(boxes);
        for (const RegionBox& b : lm.map.refinement_boxes()) {
            std::vector<LiftedPoint> corners;
            for (const auto& sgn : {std::pair{-1.0, -1.0}, std::pair{1.0, -1.0},
                                    std::pair{1.0, 1.0}, std::pair{-1.0, 1.0},
                                    std::pair{-1.0, -1.0}})
                corners.push_back(b.at(sgn.first, sgn.second));
            fig.add_polygon(recenter(corners), "#884ea0");
        }
        fig.bump_layer();
    }
    if (!glyphs.empty()) {
        const std::string text = read_input_file(glyphs);
        size_t pos = text.find('\n');
        if (pos == std::string::npos) {
            std::cerr << "unknown glyph layer in " << glyphs << "\n";
            return kExitInputError;
        }
        ++pos;
        const double glen = 0.012 * (win.x1 - win.x0);
        while (pos < text.size()) {
            size_t eol = text.find('\n', pos);
            if (eol == std::string::npos) eol = text.size();
            const std::string line = text.substr(pos, eol - pos);
            pos = eol + 1;
            if (line.empty()) continue;
            double c[6];
            if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &c[0], &c[1],
                            &c[2], &c[3], &c[4], &c[5]) != 6)
                continue;
            const double gx = c[0] - std::floor(c[0] - wc.x + 0.5);
            const double gy = c[1] - std::floor(c[1] - wc.y + 0.5);
            fig.add_glyph({gx, gy}, {std::cos(c[2]), std::sin(c[2])}, glen, "#2471a3");
            fig.add_glyph({gx, gy}, {std::cos(c[3]), std::sin(c[3])}, glen, "#a569bd");
        }
        fig.bump_layer();
    }
    write_file(out_path, fig.finalize());
    std::cerr << "wrote " << out_path << " (" << fig.layer_count() << " layers)\n";
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"surgered torus diffeomorphisms: build, certify, experiment"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "construct a map and its spec file");
    bool k_example = false, k_theorem = false, k_single = false, k_linear = false;
    build->add_flag("--example", k_example, "two-stage surgery at one site");
    build->add_flag("--theorem", k_theorem, "forward and inverse sites");
    build->add_flag("--single", k_single, "single-stage surgery");
    build->add_flag("--linear", k_linear, "no surgery");
    std::string mode = "demo", site1 = "0/1,0/1", site2 = "1/5,2/5";
    double eps_override = 0.0;
    std::string out_path = join_out(out_dir_default(), "map.json");
    std::string report_path;
    build->add_option("--mode", mode, "demo or strict")
        ->check(CLI::IsMember({"demo", "strict"}));
    build->add_option("--eps", eps_override, "override the ball radius");
    build->add_option("--site1", site1, "first site as rationals n/d,n/d");
    build->add_option("--site2", site2, "second site as rationals n/d,n/d");
    build->add_option("--out", out_path, "spec file path");
    build->add_option("--report", report_path, "construction report path");

    // certify
    auto* certify = app.add_subcommand("certify", "dominated-splitting certificate");
    std::string cert_spec, cert_out;
    double K = 0.0, eta = 0.0, cert_eps = 0.0, cert_delta = 0.0;
    int cert_grid = 256;
    certify->add_option("--spec", cert_spec, "map spec path")->required();
    certify->add_option("--K", K, "entry floor (default lambda^2)");
    certify->add_option("--eta", eta, "domination ratio (default 1.6)");
    certify->add_option("--eps", cert_eps, "off-diagonal bound (default map eps)");
    certify->add_option("--delta", cert_delta, "cone half-angle (default map delta)");
    certify->add_option("--grid", cert_grid, "grid resolution");
    certify->add_option("--out", cert_out, "certificate json path");

    // fixed-points
    auto* fp = app.add_subcommand("fixed-points", "census of fixed points");
    std::string fp_spec, fp_out;
    int fp_grid = 256;
    fp->add_option("--spec", fp_spec, "map spec path")->required();
    fp->add_option("--grid", fp_grid, "seed grid resolution");
    fp->add_option("--out", fp_out, "census json path");

    // bundles
    auto* bundles = app.add_subcommand("bundles", "sample the direction fields");
    std::string b_spec, b_out = join_out(out_dir_default(), "bundles.csv");
    int b_grid = 24, b_n = 200;
    double b_tol = 1e-10;
    bundles->add_option("--spec", b_spec, "map spec path")->required();
    bundles->add_option("--grid", b_grid, "samples per axis");
    bundles->add_option("--n", b_n, "power iteration cap");
    bundles->add_option("--tol", b_tol, "angular tolerance");
    bundles->add_option("--out", b_out, "csv path");

    // trace
    auto* trace = app.add_subcommand("trace", "integral curve of a bundle");
    std::string t_spec, t_start = "0.5,0.5", t_bundle = "E";
    std::string t_out = join_out(out_dir_default(), "curve.csv");
    double t_length = 0.0, t_step = 0.0;
    trace->add_option("--spec", t_spec, "map spec path")->required();
    trace->add_option("--start", t_start, "start point x1,x2");
    trace->add_option("--bundle", t_bundle, "E or F")
        ->check(CLI::IsMember({"E", "F"}));
    trace->add_option("--length", t_length, "total arclength (default 3 eps)");
    trace->add_option("--step", t_step, "arclength step (default eps/500)");
    trace->add_option("--out", t_out, "csv path");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a reporting experiment");
    std::string e_spec, e_which = "lemma3";
    std::string e_outdir = join_out(out_dir_default(), "experiment");
    uint64_t e_seed = 20240601ULL;
    int e_samples = 0, e_trials = 0;
    double e_magnitude = 0.0;
    exp->add_option("--spec", e_spec, "map spec path")->required();
    exp->add_option("--which", e_which, "lemma3 | remark | theorem | robustness")
        ->check(CLI::IsMember({"lemma3", "remark", "theorem", "robustness"}));
    exp->add_option("--seed", e_seed, "sampling seed");
    exp->add_option("--samples", e_samples, "basin samples (default 20)");
    exp->add_option("--magnitude", e_magnitude, "perturbation size (robustness)");
    exp->add_option("--trials", e_trials, "perturbation trials (robustness)");
    exp->add_option("--outdir", e_outdir, "output directory");

    // plot
    auto* plot = app.add_subcommand("plot", "deterministic svg figure");
    std::string p_out = join_out(out_dir_default(), "figure.svg");
    std::string p_window, p_points, p_ball, p_boxes, p_glyphs;
    std::vector<std::string> p_curves, p_manifolds;
    plot->add_option("--out", p_out, "svg path");
    plot->add_option("--window", p_window, "viewport x0,y0,x1,y1");
    plot->add_option("--curve", p_curves, "curve csv (repeatable)");
    plot->add_option("--manifold", p_manifolds, "manifold csv (repeatable)");
    plot->add_option("--points", p_points, "fixed-point census json");
    plot->add_option("--ball", p_ball, "ball outline cx,cy,r");
    plot->add_option("--boxes", p_boxes, "surgery boxes from a map spec");
    plot->add_option("--glyphs", p_glyphs, "direction glyphs from a bundle csv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            const int kinds = int(k_example) + int(k_theorem) + int(k_single) +
                              int(k_linear);
            if (kinds != 1) {
                std::cerr << "choose exactly one of --example --theorem --single "
                             "--linear\n";
                return kExitInputError;
            }
            const std::string kind = k_example  ? "example"
                                     : k_theorem ? "theorem"
                                     : k_single  ? "single"
                                                 : "linear";
            return cmd_build(kind, mode, eps_override, site1, site2, out_path,
                             report_path);
        }
        if (certify->parsed())
            return cmd_certify(cert_spec, K, eta, cert_eps, cert_delta, cert_grid,
                               cert_out);
        if (fp->parsed()) return cmd_fixed_points(fp_spec, fp_grid, fp_out);
        if (bundles->parsed()) return cmd_bundles(b_spec, b_grid, b_n, b_tol, b_out);
        if (trace->parsed())
            return cmd_trace(t_spec, t_start, t_bundle, t_length, t_step, t_out);
        if (exp->parsed())
            return cmd_experiment(e_spec, e_which, e_seed, e_samples, e_magnitude,
                                  e_trials, e_outdir);
        if (plot->parsed())
            return cmd_plot(p_out, p_window, p_curves, p_manifolds, p_points, p_ball,
                            p_boxes, p_glyphs);
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitInputError;
}
