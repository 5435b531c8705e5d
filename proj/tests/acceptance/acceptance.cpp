// Acceptance runs. One line per criterion: "PASS|FAIL  NN  name  details".
#include "fountain/designer.hpp"
#include "fountain/failure_bounds.hpp"
#include "fountain/fl_analysis.hpp"
#include "fountain/inactivation.hpp"
#include "fountain/lt.hpp"
#include "fountain/mathutil.hpp"
#include "fountain/mc_sim.hpp"
#include "fountain/raptor.hpp"
#include "fountain/spectra.hpp"

#include <CLI11.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace fountain;

namespace {

struct Result {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

TrialPlan fixed_plan(CodeConfig code, std::vector<double> grid, long max_trials, long failures, std::uint64_t seed)
{
    TrialPlan p;
    p.code = std::move(code);
    p.grid = std::move(grid);
    p.stop.max_trials = max_trials;
    p.stop.target_failures = failures;
    p.seed = seed;
    p.batch = 256;
    return p;
}

// ---- 1

Result lrfc_bracket()
{
    Result r{true, ""};
    CodeConfig c;
    c.kind = CodeKind::lrfc;
    c.k = 10;
    for (int d = 0; d <= 6; ++d) {
        // exact value only sizes the run: the nearer edge sits at least 4 sigma away
        double p = 1.0;
        for (int i = d + 1; i <= d + 10; ++i)
            p *= 1.0 - std::ldexp(1.0, -i);
        p = 1.0 - p;
        auto b = lrfc_bounds(2, d);
        double gap = std::min(b.upper - p, p - b.lower);
        long n = std::max(100000L, static_cast<long>(std::ceil(16.0 * p * (1 - p) / (gap * gap))));
        auto row = run_plan(fixed_plan(c, {static_cast<double>(d)}, n, n + 1, 100 + d))[0];
        bool ok = row.pf >= b.lower && row.pf < b.upper;
        r.pass &= ok;
        r.detail += fmt("d=%d pf=%.5g%s n=%ld; ", d, row.pf, ok ? "" : "(out)", row.trials);
    }
    return r;
}

// ---- 2

Result exhaustive_k2()
{
    int fail_lib = 0, fail_det = 0, disagree = 0;
    for (int bits = 0; bits < 16; ++bits) {
        int a = bits & 1, b = bits >> 1 & 1, c = bits >> 2 & 1, d = bits >> 3 & 1;
        bool singular = ((a & d) ^ (b & c)) == 0;
        ReceivedSet rx;
        rx.k = 2;
        for (int j = 0; j < 2; ++j) {
            Column col;
            for (int i = 0; i < 2; ++i)
                if (bits >> (2 * j + i) & 1)
                    col.idx.push_back(static_cast<std::uint32_t>(i));
            rx.columns.push_back(col);
        }
        rx.values = FieldMatrix(gf(1), 2, 1);
        bool lib_fail = !ml_decode(rx);
        fail_lib += lib_fail;
        fail_det += singular;
        disagree += lib_fail != singular;
    }
    double pf = fail_lib / 16.0;
    return {pf == 0.625 && fail_det == 10 && disagree == 0,
            fmt("Pf=%.4f (%d/16 invertible), determinant oracle disagreements=%d", pf, 16 - fail_lib, disagree)};
}

// ---- 3

Result dp_vs_mc()
{
    Result r{true, ""};
    CodeConfig c;
    c.kind = CodeKind::lt;
    c.k = 100;
    c.dist = r10_distribution();
    c.decoder = DecodeMode::inactivation;
    c.strategy = Strategy::random;
    auto p = fixed_plan(c, {0, 0.05, 0.1, 0.2}, 10000, 10001, 3);
    p.sweep = SweepVar::rel_overhead;
    for (const auto& row : run_plan(p)) {
        const int m = static_cast<int>(std::lround(100 * (1 + row.x)));
        double dp = expected_inactivations_dp(100, m, c.dist).mean;
        bool ok = std::fabs(dp - row.mean_y) <= 3 * row.stderr_y;
        r.pass &= ok;
        r.detail += fmt("eps=%.2f dp=%.4f mc=%.4f+-%.4f; ", row.x, dp, row.mean_y, row.stderr_y);
    }
    return r;
}

// ---- 4

Result distribution_chi2()
{
    const int k = 300, trials = 10000;
    CodeConfig c;
    c.kind = CodeKind::lt;
    c.k = k;
    c.dist = r10_distribution();
    c.decoder = DecodeMode::inactivation;
    c.strategy = Strategy::random;
    Simulator sim(c, 4);
    std::map<int, long> hist;
    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::stream(44, static_cast<std::uint64_t>(t));
        hist[static_cast<int>(sim.fixed_receipts_trial(k, static_cast<std::uint64_t>(t), rng).y)]++;
    }
    auto f = inactivation_distribution_dp(k, k, c.dist).f;
    // bins grow from the left until the expected count reaches 5; a short remainder joins the last bin
    std::vector<double> expected, observed;
    double e = 0, o = 0;
    const int ymax = std::max(static_cast<int>(f.size()), hist.rbegin()->first + 1);
    for (int y = 0; y < ymax; ++y) {
        e += y < static_cast<int>(f.size()) ? trials * f[static_cast<std::size_t>(y)] : 0.0;
        o += hist.count(y) ? static_cast<double>(hist[y]) : 0.0;
        if (e >= 5) {
            expected.push_back(e);
            observed.push_back(o);
            e = o = 0;
        }
    }
    expected.back() += e;
    observed.back() += o;
    double chi2 = 0;
    for (std::size_t i = 0; i < expected.size(); ++i)
        chi2 += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    const double dof = static_cast<double>(expected.size() - 1);
    double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), chi2));
    return {p > 0.01, fmt("chi2=%.2f dof=%.0f p=%.3f (E[Y]: dp %.3f)", chi2, dof, p,
                          inactivation_distribution_dp(k, k, c.dist).mean)};
}

// ---- 5

Result binomial_vs_mc()
{
    Result r{true, ""};
    const int k = 1000;
    const std::vector<std::pair<std::string, DegreeDistribution>> dists = {
        {"rsd", robust_soliton({k, 0.09266, 0.001993})}, {"lrfc", binomial_lrfc_distribution(k, 12.0 / k)}};
    for (const auto& [name, d] : dists) {
        CodeConfig c;
        c.kind = CodeKind::lt;
        c.k = k;
        c.dist = d;
        c.decoder = DecodeMode::inactivation;
        c.strategy = Strategy::random;
        auto p = fixed_plan(c, {0, 0.05, 0.1, 0.15, 0.2}, 1000, 1001, 5);
        p.batch = 50;
        p.sweep = SweepVar::rel_overhead;
        double worst = 0;
        for (const auto& row : run_plan(p)) {
            const int m = static_cast<int>(std::lround(k * (1 + row.x)));
            double est = binomial_approx(k, m, d).mean;
            worst = std::max(worst, std::fabs(est - row.mean_y) / row.mean_y);
        }
        r.pass &= worst <= 0.15;
        r.detail += fmt("%s(mean %.2f) worst rel err %.4f; ", name.c_str(), d.mean(), worst);
    }
    return r;
}

// ---- 6: exhaustive law of Y, ripple pick uniform, inactivation of a uniform active variable

using Law = std::map<int, double>;

Law exact_y(int k, const std::vector<unsigned>& eqs)
{
    std::map<unsigned, Law> memo;
    std::function<Law(unsigned)> go = [&](unsigned active) -> Law {
        if (active == 0)
            return {{0, 1.0}};
        if (auto it = memo.find(active); it != memo.end())
            return it->second;
        std::vector<unsigned> ripple;
        for (unsigned e : eqs)
            if (__builtin_popcount(e & active) == 1)
                ripple.push_back(e & active);
        Law out;
        if (!ripple.empty()) {
            for (unsigned v : ripple)
                for (auto [y, p] : go(active & ~v))
                    out[y] += p / static_cast<double>(ripple.size());
        } else {
            const int u = __builtin_popcount(active);
            for (int v = 0; v < k; ++v)
                if (active >> v & 1u)
                    for (auto [y, p] : go(active & ~(1u << v)))
                        out[y + 1] += p / u;
        }
        return memo[active] = out;
    };
    return go((1u << k) - 1);
}

Law exact_lt(int k, int m, const std::vector<double>& omega)
{
    std::vector<double> w(static_cast<std::size_t>(k) + 1, 0.0);
    for (std::size_t d = 1; d < omega.size(); ++d)
        w[std::min<std::size_t>(d, static_cast<std::size_t>(k))] += omega[d];
    std::vector<std::pair<unsigned, double>> cols;
    for (unsigned s = 1; s < (1u << k); ++s) {
        int d = __builtin_popcount(s);
        if (w[static_cast<std::size_t>(d)] > 0)
            cols.push_back({s, w[static_cast<std::size_t>(d)] / binom(k, d)});
    }
    Law out;
    std::vector<unsigned> eqs(static_cast<std::size_t>(m));
    std::function<void(int, double)> rec = [&](int j, double p) {
        if (j == m) {
            for (auto [y, q] : exact_y(k, eqs))
                out[y] += p * q;
            return;
        }
        for (auto [s, q] : cols) {
            eqs[static_cast<std::size_t>(j)] = s;
            rec(j + 1, p * q);
        }
    };
    rec(0, 1.0);
    return out;
}

Result toy_exactness()
{
    DpOptions opt;
    opt.prune = 0;
    const std::vector<std::vector<double>> omegas = {{0, 1}, {0, 0, 1}, {0, 0.5, 0.5}, {0, 0.2, 0.8}, {0, 0.9, 0.1}};
    double worst = 0;
    int cases = 0;
    for (int k = 1; k <= 4; ++k)
        for (int m = 1; m <= 5; ++m)
            for (const auto& om : omegas) {
                auto dist = DegreeDistribution::from_weights(om);
                auto ex = exact_lt(k, m, om);
                auto full = inactivation_distribution_dp(k, m, dist, opt);
                double ey = 0;
                for (auto [y, p] : ex)
                    ey += y * p;
                worst = std::max(worst, std::fabs(expected_inactivations_dp(k, m, dist, opt).mean - ey));
                worst = std::max(worst, std::fabs(full.mean - ey));
                for (std::size_t y = 0; y < std::max(full.f.size(), ex.size() + 1); ++y) {
                    double a = y < full.f.size() ? full.f[y] : 0.0;
                    double b = ex.count(static_cast<int>(y)) ? ex[static_cast<int>(y)] : 0.0;
                    worst = std::max(worst, std::fabs(a - b));
                }
                ++cases;
            }
    return {worst <= 1e-12, fmt("%d (k,m,Omega) cases, max abs deviation %.3g", cases, worst)};
}

// ---- 7

Result strategy_ordering()
{
    Result r{true, ""};
    Rng build(7);
    auto pre = build_precode({PrecodeKind::r10_style, 128, 0, 1}, build);
    const Strategy order[] = {Strategy::random, Strategy::max_reduced_degree, Strategy::max_accumulated,
                              Strategy::max_component};
    auto dist = r10_distribution();
    const int trials = 300;
    for (int delta : {0, 5, 10}) {
        std::vector<std::vector<double>> y(4);
        for (int t = 0; t < trials; ++t) {
            Rng rng = Rng::stream(70 + static_cast<std::uint64_t>(delta), static_cast<std::uint64_t>(t));
            SparseSystem sys(pre.field(), pre.h);
            sys.eqs = pre.h_rows;
            for (std::size_t j = 0; j < pre.k + static_cast<std::size_t>(delta); ++j)
                sys.eqs.push_back(lt_column(dist, pre.h, rng));
            for (int s = 0; s < 4; ++s) {
                Rng rs = Rng::stream(rng.next(), static_cast<std::uint64_t>(s));
                y[static_cast<std::size_t>(s)].push_back(static_cast<double>(triangulate(sys, order[s], rs).inactive.size()));
            }
        }
        r.detail += fmt("d=%d means", delta);
        for (int s = 0; s < 4; ++s) {
            double m = 0;
            for (double v : y[static_cast<std::size_t>(s)])
                m += v / trials;
            r.detail += fmt(" %.2f", m);
        }
        // paired gaps between adjacent strategies
        for (int s = 0; s < 3; ++s) {
            double m = 0, q = 0;
            for (int t = 0; t < trials; ++t) {
                double g = y[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)] -
                           y[static_cast<std::size_t>(s) + 1][static_cast<std::size_t>(t)];
                m += g;
                q += g * g;
            }
            m /= trials;
            double se = std::sqrt(std::max(0.0, q / trials - m * m) / (trials - 1));
            if (m < -se) {
                r.pass = false;
                r.detail += fmt(" (gap %d<%d: %.3f, se %.3f)", s, s + 1, m, se);
            }
        }
        r.detail += "; ";
    }
    return r;
}

// ---- 8

Result hamming_raptor_bound()
{
    Result r{true, ""};
    CodeConfig c;
    c.kind = CodeKind::raptor;
    c.precode = {PrecodeKind::hamming, 0, 63, 1};
    c.dist = r10_distribution();
    c.decoder = DecodeMode::ml;
    std::vector<double> grid;
    std::vector<int> deltas;
    for (int d = 0; d <= 24; d += 2) {
        grid.push_back(d);
        deltas.push_back(d);
    }
    auto rows = run_plan(fixed_plan(c, grid, 20000000, 200, 8));
    auto bound = raptor_upper_bound_curve(we_hamming(6), c.dist, 2, 57, deltas);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const double b = std::min(1.0, bound[i]);
        bool dominated = row.pf - 3 * row.stderr_pf <= b;
        bool tight = deltas[i] < 12 || (row.pf > 0 && b / row.pf <= 3);
        r.pass &= dominated && tight;
        r.detail += fmt("d=%d mc=%.3g b=%.3g%s; ", deltas[i], row.pf, b, dominated && tight ? "" : "(x)");
    }
    return r;
}

// ---- 9

Result dual_form()
{
    double worst = 0;
    for (std::uint32_t q : {2u, 4u, 16u})
        for (int h = 1; h <= 64; ++h) {
            std::vector<double> spread(static_cast<std::size_t>(h) + 1, 0.0);
            for (int d = 1; d <= h; d += 3)
                spread[static_cast<std::size_t>(d)] = 1.0 / d;
            for (const auto& d : {r10_distribution(), DegreeDistribution::from_weights(spread)}) {
                auto a = pi_l(d, h, q), b = pi_l_dual(d, h, q);
                for (int l = 0; l <= h; ++l)
                    worst = std::max(worst, std::fabs(a[static_cast<std::size_t>(l)] - b[static_cast<std::size_t>(l)]));
            }
        }
    return {worst <= 1e-10, fmt("max |ratio form - dual form| = %.3g over h<=64, q in {2,4,16}", worst)};
}

// ---- 10

bool in_bracket(const EstimateRow& row, const Bracket& b, std::string& out)
{
    const double n = static_cast<double>(row.trials);
    const double s_lo = std::sqrt(b.lower * (1 - b.lower) / n), s_up = std::sqrt(b.upper * (1 - b.upper) / n);
    bool ok = row.pf + 3 * s_lo >= b.lower && row.pf - 3 * s_up < b.upper;
    out += fmt("d=%.0f pf=%.3g [%.3g,%.3g)%s; ", row.x, row.pf, b.lower, b.upper, ok ? "" : "(x)");
    return ok;
}

Result concat_brackets()
{
    Result r{true, "spc: "};
    CodeConfig spc;
    spc.kind = CodeKind::concat;
    spc.precode = {PrecodeKind::spc, 10, 11, 1};
    spc.eps = 0.1;
    auto rows = run_plan(fixed_plan(spc, {0, 1, 2, 3, 4, 5, 6}, 400000, 400001, 10));
    for (const auto& row : rows)
        r.pass &= in_bracket(row, concat_bounds(11, 10, 2, 0.1, static_cast<int>(row.x)), r.detail);
    r.detail += "grs16: ";
    CodeConfig grs;
    grs.kind = CodeKind::concat;
    grs.precode = {PrecodeKind::grs, 10, 15, 4};
    grs.eps = 0.1;
    for (auto [d, target] : {std::pair{0, 200L}, std::pair{1, 100L}}) {
        auto row = run_plan(fixed_plan(grs, {static_cast<double>(d)}, 40000000, target, 11))[0];
        r.pass &= in_bracket(row, concat_bounds(15, 10, 16, 0.1, d), r.detail);
    }
    return r;
}

// ---- 11

Result multicast_numbers()
{
    auto first = [](const BoundCurve& c) {
        for (int d = 0; d <= 100; ++d)
            if (multicast_pe(10000, 10, 0.01, d, c) <= 1e-4)
                return d;
        return -1;
    };
    int spc_up = first(concat_curve(11, 10, 2, 0.01, 120, true)), spc_lo = first(concat_curve(11, 10, 2, 0.01, 120, false));
    int lr_up = first(lrfc_curve(2, 120, true)), lr_lo = first(lrfc_curve(2, 120, false));
    bool ok = std::abs(spc_up - 20) <= 2 && std::abs(spc_lo - 20) <= 2 && std::abs(lr_up - 27) <= 2 &&
              std::abs(lr_lo - 27) <= 2;
    return {ok, fmt("SPC+LRFC Delta=%d (lower-bound model %d), LRFC Delta=%d (lower-bound model %d)", spc_up, spc_lo,
                    lr_up, lr_lo)};
}

// ---- 12

Result spectra_constants()
{
    auto r10 = r10_distribution();
    const double mean = r10.mean(), ro = outer_bound_root();
    const double d80 = typical_distance_asymptotic(r10, 0.8, 0.99), d88 = typical_distance_asymptotic(r10, 0.88, 0.99);
    bool no_sign_change = true;
    for (int i = 1; i <= 500; ++i)
        no_sign_change &= growth_rate_at(r10, 0.95, 0.99, i / 1000.0).g > 0;
    const double bnd = region_boundary_outer_rate(r10, 0.95);
    bool ok = std::fabs(mean - 4.6314) <= 1e-4 && std::fabs(ro - 0.22709) <= 1e-4 && std::fabs(d80 - 0.0005) <= 2e-4 &&
              d88 <= 2e-4 && no_sign_change && std::fabs(bnd - 0.978) <= 0.002;
    return {ok, fmt("mean=%.5f r_o*=%.5f delta*(0.8)=%.5f delta*(0.88)=%.5f G>0 at 0.95: %s boundary=%.4f", mean, ro, d80,
                    d88, no_sign_change ? "yes" : "no", bnd)};
}

// ---- 13

Result typical_distance()
{
    auto r10 = r10_distribution();
    int good = typical_min_distance(raptor_ensemble_we_exact(r10, 138, 138 - 128, 142));
    int bad = typical_min_distance(raptor_ensemble_we_exact(r10, 130, 130 - 128, 142));
    int outside = 0;
    for (int a = 0; a < 50; ++a)
        for (int b = 0; b < 50; ++b) {
            double ri = (a + 0.5) / 50, ro = (b + 0.5) / 50;
            if (region_membership(r10, ri, ro).inside && !region_outer_bound(r10.mean(), ri, ro))
                ++outside;
        }
    return {good == 2 && bad == 0 && outside == 0,
            fmt("good d=%d (expected 2), bad d=%d (expected 0), grid points in R outside R_out: %d", good, bad, outside)};
}

// ---- 14

Result hamming_enumerators()
{
    // codebook of the (7,4) code straight from its parity checks: column j of H is j in binary
    std::vector<double> count(8, 0.0);
    for (unsigned v = 0; v < 128; ++v) {
        unsigned syn = 0;
        for (unsigned j = 1; j <= 7; ++j)
            if (v >> (j - 1) & 1u)
                syn ^= j;
        if (syn == 0)
            count[static_cast<std::size_t>(__builtin_popcount(v))] += 1;
    }
    const std::vector<double> expect = {1, 0, 0, 7, 7, 0, 0, 1};
    auto rec = we_hamming(3).values();
    auto co = hamming_cowef(3);
    std::vector<double> summed(8, 0.0);
    for (const auto& row : co.a)
        for (std::size_t w = 0; w < row.size() && w < 8; ++w)
            summed[w] += row[w];
    double worst = 0;
    for (std::size_t w = 0; w < 8; ++w)
        worst = std::max({worst, std::fabs(rec[w] - expect[w]), std::fabs(count[w] - expect[w]),
                          std::fabs(summed[w] - expect[w])});
    return {worst < 1e-9 && rec.size() == 8, fmt("recursion, codebook and summed CO-WEF agree, max deviation %.2g", worst)};
}

// ---- 15

bool same_outcome(const SparseSystem& sys, Rng& rng, long& checked)
{
    auto dense = gaussian_solve(sys.dense(), sys.rhs);
    for (Strategy s : {Strategy::random, Strategy::max_reduced_degree, Strategy::max_accumulated, Strategy::max_component}) {
        auto res = inactivation_decode(sys, s, rng);
        ++checked;
        if (res.success != dense.solution.has_value())
            return false;
        if (res.success && !(*res.solution == *dense.solution))
            return false;
    }
    return true;
}

Result decoder_equivalence()
{
    auto f = gf(1);
    long checked = 0, bad = 0;
    Rng rng(15);
    // every binary system with m equations over n <= 12 variables and m n <= 16
    for (int n = 1; n <= 12; ++n)
        for (int m = 1; m * n <= 16; ++m)
            for (std::uint32_t bits = 0; bits < (1u << (m * n)); ++bits) {
                SparseSystem sys(f, static_cast<std::size_t>(n));
                for (int e = 0; e < m; ++e) {
                    Equation q;
                    for (int v = 0; v < n; ++v)
                        if (bits >> (e * n + v) & 1u)
                            q.idx.push_back(static_cast<std::uint32_t>(v));
                    sys.eqs.push_back(q);
                }
                auto x = FieldMatrix::random(f, static_cast<std::size_t>(n), 1, rng);
                sys.rhs = apply_columns(x, sys.eqs);
                bad += !same_outcome(sys, rng, checked);
            }
    const long exhaustive = checked;
    auto d = r10_distribution();
    for (int t = 0; t < 1000; ++t) {
        const std::size_t k = 32;
        SparseSystem sys(f, k);
        std::size_t m = k + rng.below(8);
        for (std::size_t j = 0; j < m; ++j)
            sys.eqs.push_back(lt_column(d, k, rng));
        auto x = FieldMatrix::random(f, k, 3, rng);
        sys.rhs = apply_columns(x, sys.eqs);
        bad += !same_outcome(sys, rng, checked);
    }
    return {bad == 0, fmt("%ld exhaustive and %ld random decodes, mismatches %ld", exhaustive, checked - exhaustive, bad)};
}

// ---- 16

Result designer_feasibility()
{
    Result r{true, ""};
    int ch3_ok = 0;
    double ch3_best = 1;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        DesignSpec s;
        s.k = 10000;
        s.pf_target = 1e-2;
        s.eval_point = 0.0;
        s.mean_max = 12.0;
        s.dmax = 150;
        s.b = 1000;
        s.seed = seed;
        auto res = anneal(s, DesignContext::lt(s.k));
        ch3_ok += res.feasible;
        ch3_best = std::min(ch3_best, res.eval.bound);
    }
    r.pass &= ch3_ok == 3;
    r.detail += fmt("ch3 feasible %d/3 (best bound %.4f); ", ch3_ok, ch3_best);

    Rng rng(1);
    auto ctx = DesignContext::from_precode(build_precode({PrecodeKind::hamming, 0, 63, 1}, rng));
    DesignSpec s;
    s.k = ctx.k;
    s.pf_target = 1e-3;
    s.eval_point = 15;
    s.mean_max = 4.6314;
    s.mean_pinned = true;
    s.dmax = 40;
    s.support = {1, 2, 3, 4, 10, 11, 40};
    s.b = 10000;
    s.seed = 1;
    auto res = anneal(s, ctx);
    CodeConfig c;
    c.kind = CodeKind::raptor;
    c.precode = {PrecodeKind::hamming, 0, 63, 1};
    c.dist = res.best;
    c.decoder = DecodeMode::ml;
    auto row = run_plan(fixed_plan(c, {15}, 20000000, 200, 16))[0];
    DesignSpec loose = s;
    loose.mean_pinned = false;
    loose.mean_max = 5.0;
    double r10_ey = objective(r10_distribution(), loose, ctx).e_y;
    bool ok = res.feasible && row.pf < 1e-3;
    r.pass &= ok;
    r.detail += fmt("ch4 feasible=%d bound=%.4g mc=%.4g+-%.2g (n=%ld) E[Y] %.3f vs r10 %.3f", res.feasible,
                    res.eval.bound, row.pf, row.stderr_pf, row.trials, res.eval.e_y, r10_ey);
    return r;
}

struct Criterion {
    const char* name;
    Result (*run)();
};

const Criterion kCriteria[] = {
    {"lrfc bracket", lrfc_bracket},
    {"exhaustive k=2 ML oracle", exhaustive_k2},
    {"DP against Monte Carlo", dp_vs_mc},
    {"inactivation distribution chi-square", distribution_chi2},
    {"binomial approximation", binomial_vs_mc},
    {"toy exactness", toy_exactness},
    {"strategy ordering", strategy_ordering},
    {"Hamming Raptor bound", hamming_raptor_bound},
    {"pi_l dual form", dual_form},
    {"concatenated brackets", concat_brackets},
    {"multicast overheads", multicast_numbers},
    {"spectra constants", spectra_constants},
    {"typical minimum distance", typical_distance},
    {"Hamming enumerators", hamming_enumerators},
    {"decoder equivalence", decoder_equivalence},
    {"designer feasibility", designer_feasibility},
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance runs"};
    int only = 0;
    app.add_option("--criterion", only, "run one criterion (1-16); default all")->check(CLI::Range(1, 16));
    CLI11_PARSE(app, argc, argv);

    int failed = 0;
    for (int i = 1; i <= 16; ++i) {
        if (only && i != only)
            continue;
        const auto& c = kCriteria[i - 1];
        auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  %02d  %s  [%.1fs]  %s\n", r.pass ? "PASS" : "FAIL", i, c.name, secs, r.detail.c_str());
        std::fflush(stdout);
        failed += !r.pass;
    }
    return failed ? 1 : 0;
}
