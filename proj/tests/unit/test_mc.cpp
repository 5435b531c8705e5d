#include <doctest.h>

#include "fountain/failure_bounds.hpp"
#include "fountain/fl_analysis.hpp"
#include "fountain/mc_sim.hpp"

#include <cmath>

using namespace fountain;

namespace {

TrialPlan lrfc_plan(int k, std::vector<double> grid, long trials, std::uint64_t seed)
{
    TrialPlan p;
    p.code.kind = CodeKind::lrfc;
    p.code.k = k;
    p.grid = std::move(grid);
    p.stop.target_failures = trials;
    p.stop.max_trials = trials;
    p.seed = seed;
    return p;
}

} // namespace

TEST_CASE("erasure channel")
{
    Rng rng(4);
    CHECK(erase({0.0, 2}, 100, rng).size() == 100);
    CHECK(erase({1.0, 2}, 100, rng).empty());
    auto keep = erase({0.3, 2}, 100000, rng);
    CHECK(std::fabs(keep.size() / 1e5 - 0.7) < 0.005);
    auto s = first_survivors(0.5, 50, rng);
    REQUIRE(s.size() == 50);
    for (std::size_t i = 1; i < s.size(); ++i)
        CHECK(s[i] > s[i - 1]);
    CHECK(first_survivors(0.0, 5, rng) == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("degenerate plans")
{
    TrialPlan p;
    p.code.kind = CodeKind::lt;
    p.code.k = 5;
    p.code.dist = r10_distribution();
    p.grid = {-5};
    p.stop.max_trials = 300;
    p.stop.target_failures = 1000;
    auto r = run_plan(p);
    CHECK(r[0].pf == 1.0);
    CHECK(r[0].trials == 300);
    CHECK(r[0].stderr_pf == 0.0);

    CodeConfig one;
    one.kind = CodeKind::lt;
    one.k = 1;
    one.dist = point_mass(1);
    Simulator sim(one, 1);
    Rng rng(2);
    auto o = sim.fixed_receipts_trial(1, 0, rng);
    CHECK(o.success);
    CHECK(o.y == 0.0);
}

TEST_CASE("worker count does not change results")
{
    TrialPlan p;
    p.code.kind = CodeKind::raptor;
    p.code.precode = {PrecodeKind::hamming, 0, 15, 1};
    p.code.dist = r10_distribution();
    p.code.decoder = DecodeMode::inactivation;
    p.code.strategy = Strategy::max_reduced_degree;
    p.grid = {0, 2, 4};
    p.stop.target_failures = 50;
    p.stop.max_trials = 2000;
    p.batch = 37;
    p.seed = 77;
    p.workers = 1;
    auto a = run_plan(p);
    p.workers = 3;
    auto b = run_plan(p);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].trials == b[i].trials);
        CHECK(a[i].failures == b[i].failures);
        CHECK(a[i].mean_y == b[i].mean_y);
        CHECK(a[i].stderr_y == b[i].stderr_y);
    }
    // stop rule counts whole batches
    CHECK(a[0].failures >= 50);
    CHECK(a[0].trials % 37 == 0);
}

TEST_CASE("LRFC simulation inside the bracket")
{
    auto rows = run_plan(lrfc_plan(10, {0, 1, 2, 3, 4}, 20000, 5));
    for (const auto& r : rows) {
        auto b = lrfc_bounds(2, static_cast<int>(r.x));
        CAPTURE(r.x);
        CHECK(r.pf + 3 * r.stderr_pf >= b.lower);
        CHECK(r.pf - 3 * r.stderr_pf < b.upper);
    }
}

TEST_CASE("reported stderr matches the spread of repeated runs")
{
    std::vector<double> pf;
    double se = 0;
    for (std::uint64_t s = 1; s <= 40; ++s) {
        auto r = run_plan(lrfc_plan(6, {1}, 400, s))[0];
        pf.push_back(r.pf);
        se += r.stderr_pf / 40;
    }
    double m = 0, v = 0;
    for (double x : pf)
        m += x / pf.size();
    for (double x : pf)
        v += (x - m) * (x - m) / (pf.size() - 1);
    CHECK(std::sqrt(v) / se > 0.6);
    CHECK(std::sqrt(v) / se < 1.5);
}

TEST_CASE("inactivation mean against the DP")
{
    const int k = 100;
    TrialPlan p;
    p.code.kind = CodeKind::lt;
    p.code.k = k;
    p.code.dist = r10_distribution();
    p.code.decoder = DecodeMode::inactivation;
    p.grid = {0};
    p.stop.max_trials = 1500;
    p.stop.target_failures = 1500;
    p.seed = 9;
    auto r = run_plan(p)[0];
    auto dp = expected_inactivations_dp(k, k, r10_distribution());
    CHECK(std::fabs(r.mean_y - dp.mean) < 3 * r.stderr_y);
}

TEST_CASE("concatenated and block codes")
{
    CodeConfig c;
    c.kind = CodeKind::concat;
    c.precode = {PrecodeKind::spc, 10, 11, 1};
    Simulator sim(c, 3);
    Rng rng(1);
    // the first ten symbols of an MDS precode always decode
    for (int t = 0; t < 20; ++t)
        CHECK(sim.fixed_receipts_trial(10, static_cast<std::uint64_t>(t), rng).success);
    CodeConfig b;
    b.kind = CodeKind::block;
    b.precode = {PrecodeKind::hamming, 0, 7, 1};
    Simulator hs(b, 3);
    CHECK(hs.channel_trial(0.0, 0, 0, rng).success);
    CHECK_FALSE(hs.channel_trial(1.0, 0, 0, rng).success);
    CHECK(hs.dimension() == 4);
}

TEST_CASE("plan JSON round trip")
{
    TrialPlan p;
    p.code.kind = CodeKind::raptor;
    p.code.precode = {PrecodeKind::linear_random, 64, 70, 2};
    p.code.precode_draws = 5;
    p.code.dist = r10_distribution();
    p.sweep = SweepVar::overhead;
    p.grid = {0, 1.5};
    p.seed = 123456789012345ull;
    auto text = plan_to_json(p);
    auto q = plan_from_json(text);
    CHECK(plan_to_json(q) == text);
    CHECK(q.code.dist == p.code.dist);
    CHECK(dist_from_json(R"({"name":"rsd","k":100,"c":0.1,"delta":0.05})") == robust_soliton({100, 0.1, 0.05}));
    CHECK(dist_from_json(dist_to_json(omega2_distribution())) == omega2_distribution());
    try {
        plan_from_json(R"({"code":{"kind":"nope"},"grid":[0],"seed":1})");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::parse_error);
    }
    CHECK_THROWS_AS(plan_from_json("{"), Error);
    auto tsv = results_tsv(p, {EstimateRow{}});
    CHECK(tsv.rfind("# {", 0) == 0);
    CHECK(tsv.find("\nx\ttrials\tfailures\tpf\tstderr\tmean_inact\tstderr_inact\n") != std::string::npos);
}
