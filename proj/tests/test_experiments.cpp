#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "torusdyn/construct.hpp"
#include "torusdyn/experiments.hpp"

using namespace torusdyn;

namespace {
const double kEps = 5e-3;

const ComposedDiffeo& example_map() {
    static ComposedDiffeo f = make_example_diffeo(kEps, SurgeryParams{});
    return f;
}
const ComposedDiffeo& theorem_map() {
    static ComposedDiffeo f =
        make_theorem_diffeo(kEps, SurgeryParams{}, {0.0, 0.0}, {0.2, 0.4});
    return f;
}

Lemma3Params quick_params() {
    Lemma3Params P;
    P.n_samples = 6;  // unit-test size; the acceptance suite runs 20
    return P;
}
}  // namespace

TEST_CASE("basin curves pass through the source") {
    const ExperimentReport rep = lemma3_experiment(example_map(), quick_params());
    REQUIRE_FALSE(rep.inapplicable);
    CHECK(int(rep.samples.size()) == 6);
    for (const auto& s : rep.samples) {
        INFO("closest " << s.closest_approach << " tol " << rep.pass_tol);
        CHECK(s.pass);
        CHECK(s.closest_approach <= rep.pass_tol);
        CHECK(s.crossings == 1);
        CHECK(s.basin_hitting_time >= 0);
    }
    CHECK(rep.aggregate_pass);

    // ledger: single intersections hug the source within 2 eps
    CHECK(rep.ledger.entries.size() == rep.samples.size());
    CHECK(rep.ledger.bound_2eps_ok);
    CHECK(std::max(rep.ledger.d_a, rep.ledger.d_b) < 2.0 * kEps);
    CHECK(rep.ledger.inf_position <= rep.ledger.sup_position);
    for (const auto& e : rep.ledger.entries) {
        CHECK(e.wuu_position >= rep.ledger.inf_position - 1e-15);
        CHECK(e.wuu_position <= rep.ledger.sup_position + 1e-15);
    }

    // forward invariance of the intersection set
    CHECK(rep.invariance.on_manifold);
    CHECK(rep.invariance.expansion_ok);
    CHECK(std::fabs(rep.invariance.base_image_position) < 2.0 * 1e-4);
}

TEST_CASE("identical parameters reproduce the identical report") {
    const ExperimentReport a = lemma3_experiment(example_map(), quick_params());
    const ExperimentReport b = lemma3_experiment(example_map(), quick_params());
    REQUIRE(a.samples.size() == b.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].sample.x1 == b.samples[i].sample.x1);
        CHECK(a.samples[i].closest_approach == b.samples[i].closest_approach);
        CHECK(a.samples[i].arc_position == b.samples[i].arc_position);
    }
    CHECK(a.ledger.inf_position == b.ledger.inf_position);
}

TEST_CASE("the linear model is inapplicable, not vacuously passing") {
    const ComposedDiffeo lin = make_linear_diffeo();
    const ExperimentReport rep = lemma3_experiment(lin, quick_params());
    CHECK(rep.inapplicable);
    CHECK(rep.inapplicable_reason.find("no sink basin") != std::string::npos);
    CHECK_FALSE(rep.aggregate_pass);
}

TEST_CASE("a long curve far from the surgery crosses the manifold zero times") {
    const ComposedDiffeo& f = example_map();
    const SurgerySite& s = f.sites[0];
    const FlowView view = forward_view(f);
    const ManifoldSegment wuu = grow_unstable_manifold(view, s.center, 0.1, 1e-4);

    // an E-line of length 1/2 in the exactly-linear region, clear of the
    // manifold segment (transverse offset 0.15 > 0.1)
    TorusCurve control;
    control.kind = CurveKind::E_curve;
    control.step = 1e-3;
    const Vec2 es = f.base.e_s.unit();
    const Vec2 base = f.base.frame.apply({0.05, 0.15});
    for (int i = 0; i <= 500; ++i) {
        const double t = -0.25 + 0.5 * i / 500.0;
        control.vertices.push_back({base.x + t * es.x, base.y + t * es.y});
    }
    control.rebuild_arclength();

    std::vector<int> crossings;
    unique_intersection_check(s, wuu, {control}, s.center, kEps, &crossings);
    REQUIRE(crossings.size() == 1);
    CHECK(crossings[0] == 0);
}

TEST_CASE("foliation violation witness") {
    const FoliationWitness w = foliation_violation_witness(example_map(), quick_params());
    REQUIRE(w.found);
    CHECK(w.closest_a <= 5.0 * kEps / 500.0);
    CHECK(w.closest_b <= 5.0 * kEps / 500.0);
    // the two curves are distinct near the sink yet both meet the source;
    // their separation there is bounded by the basin half-thickness
    CHECK(w.min_pairwise_distance > 0.0);
    CHECK(w.min_pairwise_distance < 1e-10);
    CHECK(torus_distance(w.sample_a, w.sample_b) > 0.0);
}

TEST_CASE("the same funneling happens toward the mirror saddle") {
    const ExperimentReport rep = remark_experiment(example_map(), quick_params());
    REQUIRE_FALSE(rep.inapplicable);
    CHECK(rep.aggregate_pass);
    for (const auto& s : rep.samples) {
        CHECK(s.pass);
        CHECK(s.crossings == 1);
    }

    // the mirror flip point is a saddle with multipliers (0.5, mu)
    const SurgerySite& site = example_map().sites[0];
    const JacobianAtPoint J = example_map().jacobian(site.saddle_location());
    CHECK(J.a == Catch::Approx(0.5).margin(1e-12));
    CHECK(J.d == Catch::Approx(example_map().base.mu).margin(1e-12));
}

TEST_CASE("two-sided map: both bundles fail to integrate") {
    const TheoremReport rep = theorem_experiment(theorem_map(), quick_params());
    REQUIRE_FALSE(rep.part_a.inapplicable);
    REQUIRE_FALSE(rep.part_b.inapplicable);
    CHECK(rep.part_a.aggregate_pass);
    CHECK(rep.part_b.aggregate_pass);
    CHECK(rep.region_distance > 0.4);
    CHECK(rep.locality_ok);
    CHECK(rep.aggregate_pass);
}

TEST_CASE("zero-magnitude perturbation reproduces the base run bitwise") {
    const ComposedDiffeo& f = example_map();
    ComposedDiffeo g = f;
    g.shears.push_back(make_probe_shear(f, 0.0, 99, 0));

    const ExperimentReport a = lemma3_experiment(f, quick_params());
    const ExperimentReport b = lemma3_experiment(g, quick_params());
    REQUIRE(a.samples.size() == b.samples.size());
    for (size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].closest_approach == b.samples[i].closest_approach);
        CHECK(a.samples[i].arc_position == b.samples[i].arc_position);
        CHECK(a.samples[i].basin_hitting_time == b.samples[i].basin_hitting_time);
    }
    CHECK(a.ledger.inf_position == b.ledger.inf_position);
    CHECK(a.ledger.sup_position == b.ledger.sup_position);
}

TEST_CASE("small shears keep the certificate and the funneling") {
    const ComposedDiffeo& f = example_map();
    const double lam = f.base.lambda;
    Lemma3Params P = quick_params();
    P.n_samples = 4;
    const RobustnessReport rep =
        robustness_experiment(f, kEps / 20.0, 2, lam * lam, 1.6, P);
    REQUIRE(rep.trials.size() == 2);
    for (const auto& t : rep.trials) {
        CHECK(t.certified);
        CHECK(t.lemma3_pass);
    }
    CHECK(rep.aggregate_pass);
}

TEST_CASE("a huge perturbation is rejected as uncertified") {
    const ComposedDiffeo& f = example_map();
    const double lam = f.base.lambda;
    Lemma3Params P = quick_params();
    const RobustnessReport rep =
        robustness_experiment(f, 10.0 * kEps, 1, lam * lam, 1.6, P);
    REQUIRE(rep.trials.size() == 1);
    CHECK_FALSE(rep.trials[0].certified);
    CHECK(rep.trials[0].note == "outside certified neighborhood");
    CHECK_FALSE(rep.aggregate_pass);
}

TEST_CASE("construction reports") {
    const BuiltMap ex = build_example_map(kEps, 9e-4);
    INFO(ex.report.failures());
    CHECK(ex.report.pass());

    const BuiltMap single = build_single_da_map(kEps, 9e-4);
    INFO(single.report.failures());
    CHECK(single.report.pass());

    const BuiltMap th = build_theorem_map(kEps, SurgeryParams{}, {0.0, 0.0}, {0.2, 0.4});
    INFO(th.report.failures());
    CHECK(th.report.pass());
}

TEST_CASE("an oversized ball radius fails the norm smallness check") {
    const BuiltMap bm = build_example_map(0.02, 9e-4);
    CHECK_FALSE(bm.report.pass());
    bool norm_failed = false;
    for (const auto& it : bm.report.items)
        if (it.name == "norm_condition" && !it.pass) {
            norm_failed = true;
            CHECK(it.measured >= 0.1);  // 2 eps ||Df|| over the 1/10 bound
        }
    CHECK(norm_failed);
}

TEST_CASE("the funneling report carries the informational regularity slope") {
    const ExperimentReport rep = lemma3_experiment(example_map(), quick_params());
    CHECK(rep.holder_present);
    // no pass/fail semantics; just recorded and finite
    CHECK(std::isfinite(rep.holder_exponent));
}
