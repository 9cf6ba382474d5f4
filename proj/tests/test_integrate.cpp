#include "racreach/errors.hpp"
#include "racreach/integrate.hpp"
#include "support/models.hpp"

#include "doctest.h"

#include <cmath>

using namespace racreach;
using racreach::testing::bundled;

namespace {

ScalarVector v(std::initializer_list<long> xs) {
    ScalarVector out;
    for (long x : xs) out.emplace_back(x);
    return out;
}

/// s1 + s2 <= 1 inside the unit square.
HPolytope triangle() {
    HPolytope p(2);
    p.add_bounds(0, Scalar(0), Scalar(1));
    p.add_bounds(1, Scalar(0), Scalar(1));
    p.add_le(v({1, 1}), Scalar(1));
    return p;
}

const std::vector<DistributionSpec> uniform2{Uniform{0.0, 1.0}, Uniform{0.0, 1.0}};
const std::vector<BoundPair> unit2{{0.0, 1.0}, {0.0, 1.0}};

VegasConfig config(std::size_t n, std::uint64_t seed = 0, std::size_t workers = 1) {
    VegasConfig c;
    c.samples = n;
    c.seed = seed;
    c.workers = workers;
    return c;
}

bool identical(const IntegrationResult& a, const IntegrationResult& b) {
    if (a.p_max != b.p_max || a.e_stat != b.e_stat || a.iterations.size() != b.iterations.size()) return false;
    for (std::size_t i = 0; i < a.iterations.size(); ++i) {
        if (a.iterations[i].value != b.iterations[i].value || a.iterations[i].sigma != b.iterations[i].sigma) return false;
    }
    return true;
}

PipelineOptions options_for(const ModelDocument& doc, std::size_t samples) {
    PipelineOptions o;
    o.t_max = *doc.analysis.tmax;
    o.jmp = *doc.analysis.jumps;
    o.t_int = doc.analysis.tint.value_or(100.0);
    o.vegas.samples = samples;
    return o;
}

}  // namespace

TEST_CASE("truncation error") {
    CHECK(truncation_error({Exponential{1.0}, Exponential{2.0}}, {false, false}, 5.0) == 0.0);
    CHECK(truncation_error({Exponential{1.0}}, {true}, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(std::abs(truncation_error({Exponential{1.0}}, {true}, 2.0) - 0.135335283236613) < 1e-12);
    CHECK(truncation_error({Exponential{1.0}}, {true}, 37.43) == doctest::Approx(std::exp(-37.43)).epsilon(1e-9));
    // two lifted dims: 1 - (1 - e^-2)^2
    const double one = std::exp(-2.0);
    CHECK(truncation_error({Exponential{1.0}, Exponential{1.0}}, {true, true}, 2.0) ==
          doctest::Approx(1.0 - (1.0 - one) * (1.0 - one)).epsilon(1e-12));
}

TEST_CASE("full box under exponential densities") {
    HPolytope box(2);
    box.add_bounds(0, Scalar(0), parse_scalar("3743/100"));
    box.add_bounds(1, Scalar(0), parse_scalar("3743/100"));
    const IntegrationResult r = vegas_integrate(SampleRegion(2, {box}), {Exponential{1.0}, Exponential{1.0}},
                                                {{0.0, 37.43}, {0.0, 37.43}}, config(200000));
    CHECK(std::abs(r.p_max - 1.0) <= 3 * r.e_stat + 1e-12);
}

TEST_CASE("triangle area") {
    const IntegrationResult r = vegas_integrate(SampleRegion(2, {triangle()}), uniform2, unit2, config(200000));
    CHECK(r.e_stat > 0.0);
    CHECK(std::abs(r.p_max - 0.5) <= 3 * r.e_stat);
    CHECK(r.hit_fraction > 0.3);
    CHECK(r.iterations.size() == 10);
}

TEST_CASE("race integral") {
    HPolytope p(2);
    p.add_bounds(0, Scalar(0), Scalar(1));
    p.add_le(v({1, -1}), Scalar(0));
    p.add_bounds(1, std::nullopt, Scalar(100));
    const std::vector<DistributionSpec> d{Exponential{1.0}, Exponential{2.0}};
    const std::vector<BoundPair> box{tighten_bounds(d[0], 100.0), tighten_bounds(d[1], 100.0)};
    const IntegrationResult r = vegas_integrate(SampleRegion(2, {p}), d, box, config(400000));
    const double exact = (1.0 - std::exp(-3.0)) / 3.0;
    CHECK(std::abs(r.p_max - exact) <= 3 * r.e_stat);
}

TEST_CASE("results do not depend on the worker count") {
    const SampleRegion region(2, {triangle()});
    const IntegrationResult one = vegas_integrate(region, uniform2, unit2, config(100000, 7, 1));
    const IntegrationResult eight = vegas_integrate(region, uniform2, unit2, config(100000, 7, 8));
    CHECK(identical(one, eight));
    const IntegrationResult other = vegas_integrate(region, uniform2, unit2, config(100000, 8, 1));
    CHECK(one.p_max != other.p_max);
}

TEST_CASE("duplicated members count once") {
    const IntegrationResult once = vegas_integrate(SampleRegion(2, {triangle()}), uniform2, unit2, config(100000, 3));
    const IntegrationResult twice =
        vegas_integrate(SampleRegion(2, {triangle(), triangle()}), uniform2, unit2, config(100000, 3));
    CHECK(identical(once, twice));
}

TEST_CASE("error estimate covers the truth") {
    int covered = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const IntegrationResult r = vegas_integrate(SampleRegion(2, {triangle()}), uniform2, unit2, config(50000, seed));
        if (std::abs(r.p_max - 0.5) <= 3 * r.e_stat) ++covered;
    }
    CHECK(covered >= 18);
}

TEST_CASE("quadrupling the samples halves the error") {
    const SampleRegion region(2, {triangle()});
    const double small = vegas_integrate(region, uniform2, unit2, config(100000)).e_stat;
    const double large = vegas_integrate(region, uniform2, unit2, config(400000)).e_stat;
    const double ratio = small / large;
    CHECK(ratio >= 1.6);
    CHECK(ratio <= 2.6);
}

TEST_CASE("degenerate inputs") {
    const IntegrationResult none = vegas_integrate(SampleRegion(2, {}), uniform2, unit2, config(10000));
    CHECK(none.p_max == 0.0);
    CHECK(none.e_stat == 0.0);
    CHECK(vegas_integrate(SampleRegion(2, {HPolytope::empty_set(2)}), uniform2, unit2, config(10000)).p_max == 0.0);
    CHECK(vegas_integrate(SampleRegion(0, {HPolytope(0)}), {}, {}, config(10000)).p_max == 1.0);

    VegasConfig bad = config(100);
    CHECK_THROWS_AS(vegas_integrate(SampleRegion(2, {triangle()}), uniform2, unit2, bad), std::invalid_argument);
    bad = config(10000);
    bad.bins = 1;
    CHECK_THROWS_AS(vegas_integrate(SampleRegion(2, {triangle()}), uniform2, unit2, bad), std::invalid_argument);
    bad = config(10000);
    bad.warmup = 10;
    CHECK_THROWS_AS(vegas_integrate(SampleRegion(2, {triangle()}), uniform2, unit2, bad), std::invalid_argument);
    CHECK_THROWS_AS(vegas_integrate(SampleRegion(2, {triangle()}), {Uniform{0.0, 1.0}}, unit2, config(10000)),
                    std::invalid_argument);
}

TEST_CASE("membership rounds outward") {
    HPolytope p(1);
    p.add_bounds(0, Scalar(0), parse_scalar("1/10"));
    const SampleRegion r(1, {p});
    const double tenth = 0.1;  // slightly above 1/10
    CHECK(r.contains(&tenth));
    const double beyond = 0.1000001;
    CHECK_FALSE(r.contains(&beyond));
}

TEST_CASE("pipeline on the analytic models") {
    struct Case {
        const char* file;
        double exact;
    };
    for (const Case c : {Case{"m1.json", 1.0 - std::exp(-1.0)}, Case{"m2.json", (1.0 - std::exp(-3.0)) / 3.0},
                         Case{"m3.json", std::exp(-1.5) - std::exp(-4.0)}}) {
        CAPTURE(c.file);
        const ModelDocument doc = bundled(c.file);
        const PipelineReport rep = estimate_pipeline(doc.rac, *doc.goal, options_for(doc, 200000));
        CHECK(std::abs(rep.result.p_max - c.exact) <= 3 * rep.result.e_stat + 1e-12);
        CHECK(rep.result.e_inf < 1e-15);
        CHECK(rep.goal_nodes.size() == 1);
        CHECK(rep.trees == 1);
    }
}

TEST_CASE("pipeline edge cases") {
    const ModelDocument doc = bundled("m1.json");
    PipelineOptions o = options_for(doc, 10000);
    o.jmp = 0;
    const PipelineReport none = estimate_pipeline(doc.rac, *doc.goal, o);
    CHECK(none.result.p_max == 0.0);
    CHECK(none.goal_nodes.empty());
    CHECK(none.nodes == 1);

    o = options_for(doc, 10000);
    o.t_int = 0.5;
    CHECK_THROWS_AS(estimate_pipeline(doc.rac, *doc.goal, o), AnalysisError);

    // short t_int: the unused copy r_1 is lifted and truncated
    o = options_for(doc, 10000);
    o.t_int = 2.0;
    const PipelineReport tr = estimate_pipeline(doc.rac, *doc.goal, o);
    CHECK(tr.result.e_inf == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));

    Rac broken = doc.rac;
    broken.locations[0].init.reset();
    CHECK_THROWS_AS(estimate_pipeline(broken, *doc.goal, options_for(doc, 10000)), ModelError);

    o = options_for(doc, 10000);
    o.adapt_bounds = false;
    const PipelineReport plain = estimate_pipeline(doc.rac, *doc.goal, o);
    for (const auto& d : plain.dimensions) {
        CHECK(d.adapted.lo == 0.0);
        CHECK(d.adapted.hi == 100.0);
    }
}

TEST_CASE("sampling every dimension agrees with marginalization") {
    for (const char* f : {"m1.json", "m2.json", "m3.json"}) {
        CAPTURE(f);
        const ModelDocument doc = bundled(f);
        PipelineOptions o = options_for(doc, 200000);
        const PipelineReport exact = estimate_pipeline(doc.rac, *doc.goal, o);
        o.marginalize = false;
        const PipelineReport sampled = estimate_pipeline(doc.rac, *doc.goal, o);
        for (const auto& d : sampled.dimensions) CHECK_FALSE(d.marginalized);
        CHECK(sampled.result.e_stat > 0.0);
        CHECK(std::abs(sampled.result.p_max - exact.result.p_max) <= 3 * (sampled.result.e_stat + exact.result.e_stat));
    }
}
