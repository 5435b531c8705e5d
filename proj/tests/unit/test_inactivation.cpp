#include <doctest.h>

#include "fountain/inactivation.hpp"
#include "fountain/lt.hpp"

#include <cmath>

using namespace fountain;

namespace {

Equation eq(std::initializer_list<std::uint32_t> idx)
{
    Equation e;
    e.idx = idx;
    return e;
}

const Strategy kAll[] = {Strategy::random, Strategy::max_reduced_degree, Strategy::max_accumulated,
                         Strategy::max_component};

SparseSystem with_values(SparseSystem sys, const FieldMatrix& x)
{
    sys.rhs = apply_columns(x, sys.eqs);
    return sys;
}

} // namespace

TEST_CASE("triangulation worked example")
{
    // y1={v1} y2={v2,v3} y3={v1,v2,v3} y4={v1}, v4 unseen
    auto f = gf(1);
    SparseSystem sys(f, 4);
    sys.eqs = {eq({0}), eq({1, 2}), eq({0, 1, 2}), eq({0})};
    sys.rhs = FieldMatrix(f, 4, 0);
    Rng r(1);
    auto t = triangulate(sys, Strategy::max_reduced_degree, r);
    REQUIRE(t.trace.size() == 4);
    CHECK(t.inactive.size() == 2);
    const bool inact[] = {false, true, false, true};
    const std::size_t ripple[] = {2, 0, 2, 0};
    for (int i = 0; i < 4; ++i) {
        CHECK(t.trace[i].u == 4u - i);
        CHECK(t.trace[i].inactivation == inact[i]);
        CHECK(t.trace[i].ripple == ripple[i]);
    }
    CHECK(t.trace[0].var == 0);
    CHECK(t.trace[1].cloud == 2);
    CHECK(t.trace[3].var == 3);
    CHECK(t.trace[3].cloud == 0);

    // random inactivation reproduces the same sequence for some seed, never fewer inactivations
    bool seen = false;
    for (std::uint64_t s = 0; s < 64; ++s) {
        Rng rr(s);
        auto tr = triangulate(sys, Strategy::random, rr);
        CHECK(tr.inactive.size() >= 2);
        seen = seen || (tr.inactive.size() == 2 && tr.inactive[0] == 1);
    }
    CHECK(seen);
}

TEST_CASE("trivial systems")
{
    auto f = gf(1);
    SparseSystem sys(f, 5);
    for (std::uint32_t v = 0; v < 5; ++v)
        sys.eqs.push_back(eq({v}));
    Rng r(1);
    auto x = FieldMatrix::random(f, 5, 3, r);
    auto full = with_values(sys, x);
    for (auto s : kAll) {
        auto res = inactivation_decode(full, s, r);
        CHECK(res.success);
        CHECK(res.inactivations == 0);
        CHECK(*res.solution == x);
    }

    SparseSystem chain(f, 6);
    chain.eqs.push_back(eq({0}));
    for (std::uint32_t v = 1; v < 6; ++v)
        chain.eqs.push_back(eq({v - 1, v}));
    chain.rhs = FieldMatrix(f, 6, 0);
    for (auto s : kAll)
        CHECK(inactivation_decode(chain, s, r).inactivations == 0);
}

TEST_CASE("inactivation equals dense elimination")
{
    Rng r(31);
    auto d = r10_distribution();
    auto small = DegreeDistribution::from_map({{1, 0.1}, {2, 0.5}, {3, 0.3}, {5, 0.1}});
    for (int m : {1, 4}) {
        auto f = gf(m);
        for (int t = 0; t < 500; ++t) {
            const std::size_t k = 12;
            SparseSystem sys(f, k);
            std::size_t n = k + r.below(5);
            for (std::size_t j = 0; j < n; ++j) {
                Column c = lt_column(small, k, r);
                if (m > 1)
                    for (std::size_t i = 0; i < c.idx.size(); ++i)
                        c.coef.push_back(static_cast<Elem>(1 + r.below(f->q() - 1)));
                sys.eqs.push_back(c);
            }
            auto x = FieldMatrix::random(f, k, 2, r);
            sys = with_values(sys, x);
            auto dense = gaussian_solve(sys.dense(), sys.rhs);
            for (auto s : kAll) {
                auto res = inactivation_decode(sys, s, r);
                CHECK(res.success == dense.solution.has_value());
                if (res.success) {
                    CHECK(*res.solution == x);
                    CHECK(*res.solution == *dense.solution);
                }
                std::size_t empties = 0;
                for (const auto& st : res.trace)
                    empties += st.inactivation;
                CHECK(empties == res.inactivations);
            }
        }
    }
    (void)d;
}

TEST_CASE("exhaustive equivalence on small binary systems")
{
    auto f = gf(1);
    // every 3-equation system over 3 variables
    for (std::uint32_t bits = 0; bits < 512; ++bits) {
        SparseSystem sys(f, 3, 0);
        for (int e = 0; e < 3; ++e) {
            Equation q;
            for (std::uint32_t v = 0; v < 3; ++v)
                if (bits >> (3 * e + v) & 1u)
                    q.idx.push_back(v);
            sys.eqs.push_back(q);
        }
        sys.rhs = FieldMatrix(f, 3, 0);
        bool full = rank(sys.dense()) == 3;
        for (auto s : kAll) {
            Rng r(bits);
            CHECK(inactivation_decode(sys, s, r).success == full);
        }
    }
}

TEST_CASE("no inactivations when peeling succeeds")
{
    auto f = gf(1);
    Rng r(5);
    auto d = r10_distribution();
    for (int t = 0; t < 200; ++t) {
        const std::size_t k = 30;
        SparseSystem sys(f, k);
        for (std::size_t j = 0; j < k + 15; ++j)
            sys.eqs.push_back(lt_column(d, k, r));
        sys.rhs = FieldMatrix(f, sys.eqs.size(), 0);
        Rng a(t), b(t);
        auto peel = triangulate(sys, Strategy::random, a, true);
        if (peel.complete)
            CHECK(inactivation_decode(sys, Strategy::random, b).inactivations == 0);
    }
}

TEST_CASE("max component resolves the component after inactivation")
{
    // a cycle of degree-2 equations over v0..v5 plus a long path on v6..v9
    auto f = gf(1);
    SparseSystem sys(f, 10);
    for (std::uint32_t v = 0; v < 6; ++v)
        sys.eqs.push_back(eq({v, (v + 1) % 6}));
    sys.eqs.push_back(eq({6, 7}));
    sys.eqs.push_back(eq({7, 8}));
    sys.eqs.push_back(eq({8, 9}));
    sys.eqs.push_back(eq({6, 9}));
    sys.rhs = FieldMatrix(f, sys.eqs.size(), 0);
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng r(s);
        auto t = triangulate(sys, Strategy::max_component, r);
        REQUIRE(t.trace[0].inactivation);
        CHECK(t.trace[0].var < 6);
        for (int i = 1; i <= 5; ++i)
            CHECK_FALSE(t.trace[static_cast<std::size_t>(i)].inactivation);
        CHECK(t.inactive.size() == 2);
    }
}

TEST_CASE("strategy ordering on LT systems")
{
    auto f = gf(1);
    auto d = r10_distribution();
    const std::size_t k = 64;
    const int trials = 1000;
    double sum[4] = {0, 0, 0, 0}, sq[4] = {0, 0, 0, 0};
    for (int t = 0; t < trials; ++t) {
        Rng r = Rng::stream(99, static_cast<std::uint64_t>(t));
        SparseSystem sys(f, k);
        for (std::size_t j = 0; j < k; ++j)
            sys.eqs.push_back(lt_column(d, k, r));
        sys.rhs = FieldMatrix(f, k, 0);
        for (int s = 0; s < 4; ++s) {
            Rng rr = Rng::stream(7, static_cast<std::uint64_t>(t));
            double y = static_cast<double>(triangulate(sys, kAll[s], rr).inactive.size());
            sum[s] += y;
            sq[s] += y * y;
        }
    }
    double mean[4], se[4];
    for (int s = 0; s < 4; ++s) {
        mean[s] = sum[s] / trials;
        se[s] = std::sqrt((sq[s] / trials - mean[s] * mean[s]) / trials);
    }
    CHECK(mean[3] + 2 * std::hypot(se[0], se[3]) < mean[0]);
    CHECK(mean[1] <= mean[0]);
}

TEST_CASE("trace export and strategy names")
{
    for (auto s : kAll)
        CHECK(parse_strategy(strategy_name(s)) == s);
    CHECK_THROWS_AS(parse_strategy("bogus"), Error);
    std::vector<TraceStep> tr{{3, false, 1, 2, 0}, {2, true, 0, 0, 1}};
    CHECK(trace_tsv(tr) == "u\taction\tvariable\tripple\tcloud\n3\tresolve\t1\t2\t0\n2\tinactivate\t0\t0\t1\n");
}
