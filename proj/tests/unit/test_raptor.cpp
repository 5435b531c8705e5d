#include <doctest.h>

#include "fountain/raptor.hpp"

#include <cmath>

using namespace fountain;

namespace {

std::vector<std::size_t> iota_idx(std::size_t n)
{
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = i;
    return v;
}

// dense generator G_p times G_LT for the received columns: k x m
FieldMatrix dense_generator(const Precode& pre, const std::vector<Column>& cols)
{
    SparseSystem s(pre.field(), pre.h);
    s.eqs = cols;
    return pre.G * s.dense().transpose();
}

} // namespace

TEST_CASE("every precode kind satisfies G H^T = 0")
{
    Rng r(3);
    for (int t = 0; t < 20; ++t) {
        auto p = linear_random_precode(64, 70, gf(1), r);
        CHECK((p.G * p.H.transpose()).is_zero());
        CHECK(rank(p.G) == 64);
    }
    auto q = linear_random_precode(10, 16, gf(4), r);
    CHECK((q.G * q.H.transpose()).is_zero());
    for (int t = 2; t <= 6; ++t) {
        auto h = hamming_precode(t);
        CHECK((h.G * h.H.transpose()).is_zero());
        CHECK(h.h == (1u << t) - 1);
    }
    auto g = grs_precode(10, 15, gf(4));
    CHECK((g.G * g.H.transpose()).is_zero());
    for (std::size_t k : {20, 100, 1000}) {
        auto p = r10_precode(k);
        CHECK((p.G * p.H.transpose()).is_zero());
        CHECK(p.h == k + p.s + p.hp);
    }
    double total = 0.0;
    for (auto [w, frac] : r10_precode(100).theta)
        total += frac;
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("r10-style sizes and structure")
{
    auto sz = r10_sizes(20);
    CHECK(sz.s == 11);
    CHECK(sz.hp == 7);
    auto p = r10_precode(1000);
    // LDPC rows: about 3 k / s + 1 ones each
    double mean_ldpc = 0.0;
    for (std::size_t i = 0; i < p.s; ++i)
        mean_ldpc += static_cast<double>(p.H.row_weight(i));
    mean_ldpc /= static_cast<double>(p.s);
    CHECK(mean_ldpc == doctest::Approx(3.0 * 1000 / p.s + 1).epsilon(0.01));
    // HDPC rows: normalized weight near one half over the non-identity part
    for (std::size_t i = p.s; i < p.s + p.hp; ++i) {
        double w = static_cast<double>(p.H.row_weight(i) - 1) / static_cast<double>(p.k + p.s);
        CHECK(std::fabs(w - 0.5) < 0.1);
    }
}

TEST_CASE("SPC precode")
{
    auto p = spc_precode(10);
    CHECK(p.h == 11);
    Rng r(1);
    for (int t = 0; t < 50; ++t) {
        auto v = p.encode(FieldMatrix::random(gf(1), 10, 1, r));
        int w = 0;
        for (std::size_t i = 0; i < 11; ++i)
            w += v.get(i, 0);
        CHECK(w % 2 == 0);
    }
}

TEST_CASE("precode dump roundtrip")
{
    Rng r(2);
    for (auto p : {r10_precode(20), hamming_precode(4), grs_precode(4, 7, gf(3)), linear_random_precode(5, 9, gf(1), r)}) {
        auto q = Precode::parse(p.dump());
        CHECK(q.kind == p.kind);
        CHECK(q.G == p.G);
        CHECK(q.H == p.H);
        CHECK(q.s == p.s);
    }
    CHECK_THROWS_AS(Precode::parse("not json\n"), Error);
}

TEST_CASE("build_precode validates parameters")
{
    Rng r(1);
    CHECK(build_precode({PrecodeKind::hamming, 57, 63, 1}, r).k == 57);
    CHECK_THROWS_AS(build_precode({PrecodeKind::hamming, 0, 62, 1}, r), Error);
    CHECK_THROWS_AS(build_precode({PrecodeKind::hamming, 50, 63, 1}, r), Error);
    CHECK_THROWS_AS(build_precode({PrecodeKind::grs, 10, 20, 4}, r), Error);
    CHECK_THROWS_AS(build_precode({PrecodeKind::linear_random, 10, 8, 1}, r), Error);
    CHECK(build_precode({PrecodeKind::spc, 10, 0, 1}, r).h == 11);
    CHECK(parse_precode_kind(precode_kind_name(PrecodeKind::r10_style)) == PrecodeKind::r10_style);
}

TEST_CASE("raptor encoding keeps intermediates in the codebook")
{
    Rng r(4);
    auto d = r10_distribution();
    auto pre = linear_random_precode(16, 22, gf(1), r);
    for (int t = 0; t < 50; ++t) {
        auto src = FieldMatrix::random(gf(1), 16, 2, r);
        auto e = raptor_encode(src, pre, d, 30, r);
        CHECK(pre.is_codeword(e.intermediate));
    }
    auto zero = raptor_encode(FieldMatrix(gf(1), 16, 3), pre, d, 20, r);
    CHECK(zero.intermediate.is_zero());
    CHECK(zero.out.symbols.is_zero());
    auto none = raptor_encode(FieldMatrix::random(gf(1), 16, 1, r), pre, d, 0, r);
    CHECK(none.out.symbols.rows() == 0);
    CHECK(pre.is_codeword(none.intermediate));
}

TEST_CASE("constraint system layout")
{
    Rng r(5);
    auto pre = linear_random_precode(20, 38, gf(1), r);
    auto src = FieldMatrix::random(gf(1), 20, 1, r);
    auto e = raptor_encode(src, pre, r10_distribution(), 30, r);
    auto sys = constraint_system(pre, e.out.columns, e.out.symbols);
    auto m = sys.dense();
    CHECK(m.rows() == 18 + 30);
    CHECK(m.cols() == 38);
    double top = 0, bottom = 0;
    for (std::size_t i = 0; i < 18; ++i) {
        top += static_cast<double>(m.row_weight(i));
        CHECK(sys.rhs.row_is_zero(i));
    }
    for (std::size_t i = 18; i < m.rows(); ++i)
        bottom += static_cast<double>(m.row_weight(i));
    CHECK(top / 18 > 10.0);
    CHECK(bottom / 30 < 8.0);

    // identity-like columns: unique v at once
    std::vector<Column> cols;
    for (std::uint32_t i = 0; i < 38; ++i) {
        Column c;
        c.idx = {i};
        cols.push_back(c);
    }
    auto got = raptor_decode(pre, cols, apply_columns(e.intermediate, cols), std::nullopt, r);
    REQUIRE(got.success);
    CHECK(*got.source == src);
}

TEST_CASE("raptor roundtrip follows the rank of M")
{
    Rng r(6);
    auto d = r10_distribution();
    auto pre = linear_random_precode(32, 40, gf(1), r);
    int ok = 0;
    for (int t = 0; t < 60; ++t) {
        auto src = FieldMatrix::random(gf(1), 32, 2, r);
        auto e = raptor_encode(src, pre, d, 37, r);
        auto m = constraint_system(pre, e.out.columns, e.out.symbols);
        bool full = rank(m.dense()) == pre.h;
        for (auto s : {std::optional<Strategy>{}, std::optional<Strategy>{Strategy::max_component}}) {
            auto res = raptor_decode(pre, e.out.columns, e.out.symbols, s, r);
            CHECK(res.success == full);
            if (res.success)
                CHECK(*res.source == src);
        }
        ok += full;
    }
    CHECK(ok > 0);
}

TEST_CASE("constraint decoding agrees with the dense generator")
{
    Rng r(7);
    auto d = DegreeDistribution::from_map({{1, 0.2}, {2, 0.4}, {3, 0.4}});
    for (int t = 0; t < 300; ++t) {
        std::size_t k = 6 + r.below(8), h = k + 2 + r.below(5);
        auto pre = linear_random_precode(k, h, gf(1), r);
        auto src = FieldMatrix::random(gf(1), k, 1, r);
        auto e = raptor_encode(src, pre, d, k + r.below(6), r);
        auto via_m = raptor_decode(pre, e.out.columns, e.out.symbols, std::nullopt, r);
        auto g = dense_generator(pre, e.out.columns);
        auto direct = gaussian_solve(g.transpose(), e.out.symbols);
        CHECK(via_m.success == direct.solution.has_value());
        if (via_m.success)
            CHECK(*via_m.source == *direct.solution);
    }
}

TEST_CASE("systematic raptor")
{
    auto pre = r10_precode(50);
    auto sr = SystematicRaptor::make(pre, r10_distribution(), 11);
    Rng r(8);
    auto src = FieldMatrix::random(gf(1), 50, 3, r);
    auto out = sr.encode(src, 150);
    CHECK(out.select_rows(iota_idx(50)) == src);
    CHECK(sr.encode(FieldMatrix(gf(1), 50, 1), 80).is_zero());

    int ok = 0;
    for (int t = 0; t < 10; ++t) {
        std::vector<std::size_t> idx;
        std::size_t drop = r.below(50);
        for (std::size_t i = 0; i < 50; ++i)
            if (i != drop)
                idx.push_back(i);
        for (std::size_t i = 0; i < 4; ++i)
            idx.push_back(50 + 10 * static_cast<std::size_t>(t) + i);
        auto res = sr.decode(idx, out.select_rows(idx), Strategy::random, r);
        auto m = constraint_system(pre, [&] {
            std::vector<Column> c;
            for (auto i : idx)
                c.push_back(sr.column(i));
            return c;
        }(), out.select_rows(idx));
        bool full = rank(m.dense()) == pre.h;
        CHECK(res.success == full);
        if (res.success) {
            CHECK(*res.source == src);
            ++ok;
        }
    }
    CHECK(ok > 0);
    auto all = iota_idx(50);
    CHECK(*sr.decode(all, out.select_rows(all), std::nullopt, r).source == src);
}

TEST_CASE("concatenated scheme")
{
    Rng r(9);
    auto spc = ConcatScheme(spc_precode(10), 3);
    auto src = FieldMatrix::random(gf(1), 10, 1, r);
    auto out = spc.encode(src, 30);
    int parity = 0;
    for (std::size_t i = 0; i < 11; ++i)
        parity ^= out.get(i, 0);
    CHECK(parity == 0);
    auto src2 = FieldMatrix::random(gf(1), 10, 1, r);
    CHECK(spc.encode(src + src2, 30) == out + spc.encode(src2, 30));
    CHECK(spc.encode(src, 11).rows() == 11);
    CHECK_THROWS_AS(spc.encode(src, 10), Error);
    CHECK_FALSE(spc.decode({}, FieldMatrix(gf(1), 0, 1)));

    // MDS: any 10 of the 15 prefix symbols decode
    auto f = gf(4);
    ConcatScheme grs(grs_precode(10, 15, f), 4);
    auto s = FieldMatrix::random(f, 10, 2, r);
    auto o = grs.encode(s, 20);
    int patterns = 0;
    for (std::uint32_t mask = 0; mask < (1u << 15); ++mask) {
        if (std::popcount(mask) != 10)
            continue;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < 15; ++i)
            if (mask >> i & 1u)
                idx.push_back(i);
        auto got = grs.decode(idx, o.select_rows(idx));
        REQUIRE(got);
        CHECK(*got == s);
        ++patterns;
    }
    CHECK(patterns == 3003);

    // mixed receipts at k=6 against the rank oracle
    ConcatScheme small(grs_precode(6, 9, f), 5);
    auto x = FieldMatrix::random(f, 6, 1, r);
    auto y = small.encode(x, 20);
    for (int t = 0; t < 300; ++t) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < 20; ++i)
            if (r.below(3) == 0)
                idx.push_back(i);
        SparseSystem sys(f, 6);
        for (auto i : idx)
            sys.eqs.push_back(small.column(i));
        bool full = rank(sys.dense()) == 6;
        auto got = small.decode(idx, y.select_rows(idx));
        CHECK(got.has_value() == full);
        CHECK(small.decodable(idx) == full);
        if (got)
            CHECK(*got == x);
    }
}
