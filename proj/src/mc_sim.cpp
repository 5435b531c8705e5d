#include "fountain/mc_sim.hpp"

#include "json_util.hpp"

#include "fountain/lt.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace fountain {

using nlohmann::json;

namespace {

constexpr std::pair<CodeKind, const char*> kCodeNames[] = {
    {CodeKind::lt, "lt"}, {CodeKind::lrfc, "lrfc"}, {CodeKind::raptor, "raptor"},
    {CodeKind::concat, "concat"}, {CodeKind::block, "block"}};
constexpr std::pair<SweepVar, const char*> kSweepNames[] = {
    {SweepVar::overhead, "overhead"}, {SweepVar::rel_overhead, "rel_overhead"}, {SweepVar::erasure, "erasure"}};
constexpr std::pair<DecodeMode, const char*> kDecoderNames[] = {
    {DecodeMode::ml, "ml"}, {DecodeMode::inactivation, "inactivation"}, {DecodeMode::peeling, "peeling"}};

template <class E, std::size_t N>
E parse_name(const std::pair<E, const char*> (&tab)[N], const std::string& s, const char* what)
{
    for (auto& [e, n] : tab)
        if (s == n)
            return e;
    fail(Errc::parse_error, std::string("unknown ") + what + ": " + s);
}

template <class E, std::size_t N>
const char* name_of(const std::pair<E, const char*> (&tab)[N], E e)
{
    for (auto& [v, n] : tab)
        if (v == e)
            return n;
    return "?";
}

// LT column with uniform nonzero coefficients over a non-binary field.
Column lt_column_q(const DegreeDistribution& dist, std::size_t k, const Field& f, Rng& rng)
{
    Column c = lt_column(dist, k, rng);
    if (!f.binary()) {
        c.coef.resize(c.idx.size());
        for (auto& v : c.coef)
            v = f.exp(static_cast<std::uint32_t>(rng.below(f.q() - 1)));
    }
    return c;
}

std::uint64_t point_master(std::uint64_t seed, std::size_t point)
{
    return splitmix64(seed + 0x9E3779B97F4A7C15ull * (point + 1));
}

json dist_json(const DegreeDistribution& d)
{
    json m = json::array();
    for (int i = 1; i <= d.dmax(); ++i)
        if (d[i] > 0)
            m.push_back({i, d[i]});
    return json{{"masses", m}};
}

DegreeDistribution dist_parse(const json& j)
{
    check_keys(j, {"masses", "name", "k", "c", "delta", "p", "d"}, "distribution");
    if (j.contains("masses")) {
        std::map<int, double> m;
        for (const auto& e : j.at("masses"))
            m[e.at(0).get<int>()] += e.at(1).get<double>();
        return DegreeDistribution::from_map(m, 1e-9);
    }
    const std::string name = j.at("name").get<std::string>();
    if (name == "r10")
        return r10_distribution();
    if (name == "omega2")
        return omega2_distribution();
    if (name == "rsd")
        return robust_soliton({j.at("k").get<int>(), j.at("c").get<double>(), j.at("delta").get<double>()});
    if (name == "ideal")
        return ideal_soliton(j.at("k").get<int>());
    if (name == "binomial")
        return binomial_lrfc_distribution(j.at("k").get<int>(), j.value("p", 0.5));
    if (name == "point")
        return point_mass(j.at("d").get<int>());
    fail(Errc::parse_error, "unknown distribution: " + name);
}

} // namespace

const char* code_kind_name(CodeKind k) { return name_of(kCodeNames, k); }
CodeKind parse_code_kind(const std::string& s) { return parse_name(kCodeNames, s, "code kind"); }
const char* sweep_name(SweepVar v) { return name_of(kSweepNames, v); }
SweepVar parse_sweep(const std::string& s) { return parse_name(kSweepNames, s, "sweep"); }

std::vector<std::size_t> erase(const ChannelSpec& ch, std::size_t n, Rng& rng)
{
    require(ch.eps >= 0.0 && ch.eps <= 1.0, "erasure probability must lie in [0,1]");
    const std::uint64_t thr = prob_threshold(ch.eps);
    std::vector<std::size_t> keep;
    keep.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (ch.eps < 1.0 && (ch.eps <= 0.0 || rng.next() >= thr))
            keep.push_back(i);
    return keep;
}

std::vector<std::size_t> first_survivors(double eps, std::size_t m, Rng& rng)
{
    require(eps >= 0.0 && eps < 1.0, "stream erasure probability must lie in [0,1)");
    const std::uint64_t thr = prob_threshold(eps);
    std::vector<std::size_t> keep;
    keep.reserve(m);
    for (std::size_t i = 0; keep.size() < m; ++i)
        if (eps <= 0.0 || rng.next() >= thr)
            keep.push_back(i);
    return keep;
}

void parallel_for(long n, int workers, const std::function<void(long)>& f)
{
    if (workers <= 1 || n <= 1) {
        for (long i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    const int w = static_cast<int>(std::min<long>(workers, n));
    for (int t = 0; t < w; ++t)
        pool.emplace_back([&] {
            for (long i; (i = next.fetch_add(1)) < n;)
                f(i);
        });
    for (auto& th : pool)
        th.join();
}

Simulator::Simulator(CodeConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg))
{
    require(cfg_.precode_draws >= 1, "need at least one precode draw");
    switch (cfg_.kind) {
    case CodeKind::lt:
    case CodeKind::lrfc:
        require(cfg_.k >= 1, "code dimension must be positive");
        f_ = gf(cfg_.field_m);
        if (cfg_.kind == CodeKind::lt)
            require(cfg_.dist.dmax() >= 1, "LT code needs a degree distribution");
        break;
    case CodeKind::raptor:
    case CodeKind::concat:
    case CodeKind::block:
        if (cfg_.k > 0 && cfg_.precode.k == 0)
            cfg_.precode.k = static_cast<std::size_t>(cfg_.k);
        for (int c = 0; c < cfg_.precode_draws; ++c) {
            Rng r = Rng::stream(seed ^ 0xC0DEC0DEull, static_cast<std::uint64_t>(c));
            codes_.push_back(build_precode(cfg_.precode, r));
        }
        cfg_.k = static_cast<int>(codes_[0].k);
        f_ = codes_[0].field();
        if (cfg_.kind == CodeKind::raptor)
            require(cfg_.dist.dmax() >= 1, "Raptor code needs a degree distribution");
        break;
    }
}

std::size_t Simulator::dimension() const { return static_cast<std::size_t>(cfg_.k); }

std::size_t Simulator::nvars() const { return cfg_.kind == CodeKind::raptor ? codes_[0].h : dimension(); }

Outcome Simulator::sparse(const SparseSystem& sys, Rng& rng) const
{
    Outcome o;
    if (cfg_.decoder == DecodeMode::peeling) {
        auto tri = triangulate(sys, Strategy::random, rng, true);
        o.success = tri.complete;
        return o;
    }
    auto tri = triangulate(sys, cfg_.decoder == DecodeMode::ml ? Strategy::random : cfg_.strategy, rng);
    o.y = static_cast<double>(tri.inactive.size());
    o.success = solve_triangulated(sys, tri).success;
    return o;
}

Outcome Simulator::decode_received(const std::vector<std::size_t>& pos, std::size_t m, std::uint64_t trial,
                                   Rng& rng) const
{
    const std::size_t k = dimension();
    const Precode* pre = codes_.empty() ? nullptr : &codes_[trial % codes_.size()];
    switch (cfg_.kind) {
    case CodeKind::lt: {
        SparseSystem sys(f_, k);
        for (std::size_t j = 0; j < m; ++j)
            sys.eqs.push_back(lt_column_q(cfg_.dist, k, *f_, rng));
        return sparse(sys, rng);
    }
    case CodeKind::lrfc: {
        Outcome o;
        if (m < k)
            return o;
        if (f_->binary() && k <= 64) {
            // xor basis keyed by leading bit
            std::uint64_t basis[64] = {};
            const std::uint64_t mask = k == 64 ? ~0ull : (1ull << k) - 1;
            std::size_t r = 0;
            for (std::size_t j = 0; j < m && r < k; ++j) {
                std::uint64_t v = rng.next() & mask;
                while (v) {
                    int b = 63 - __builtin_clzll(v);
                    if (!basis[b]) {
                        basis[b] = v;
                        ++r;
                        break;
                    }
                    v ^= basis[b];
                }
            }
            o.success = r == k;
            return o;
        }
        o.success = rank(FieldMatrix::random(f_, m, k, rng)) == k;
        return o;
    }
    case CodeKind::raptor: {
        SparseSystem sys(f_, pre->h);
        sys.eqs = pre->h_rows;
        for (std::size_t j = 0; j < m; ++j)
            sys.eqs.push_back(lt_column_q(cfg_.dist, pre->h, *f_, rng));
        return sparse(sys, rng);
    }
    case CodeKind::concat:
    case CodeKind::block: {
        Outcome o;
        if (pos.size() < k)
            return o;
        FieldMatrix g(f_, pos.size(), k);
        for (std::size_t r = 0; r < pos.size(); ++r) {
            Column c = pos[r] < pre->h ? pre->generator_column(pos[r]) : lrfc_column(*f_, k, rng);
            for (std::size_t i = 0; i < c.idx.size(); ++i)
                g.set(r, c.idx[i], c.coef_at(i));
        }
        o.success = rank(g) == k;
        return o;
    }
    }
    return {};
}

Outcome Simulator::fixed_receipts_trial(std::size_t m, std::uint64_t trial, Rng& rng) const
{
    std::vector<std::size_t> pos;
    if (cfg_.kind == CodeKind::concat)
        pos = first_survivors(cfg_.eps, m, rng);
    else if (cfg_.kind == CodeKind::block) {
        require(m <= codes_[0].h, "a block code has only n symbols");
        auto idx = choose_distinct(codes_[0].h, m, rng);
        pos.assign(idx.begin(), idx.end());
    }
    return decode_received(pos, m, trial, rng);
}

Outcome Simulator::channel_trial(double eps, std::size_t n, std::uint64_t trial, Rng& rng) const
{
    if (cfg_.kind == CodeKind::block)
        n = codes_[0].h;
    auto pos = erase({eps, f_->q()}, n, rng);
    return decode_received(pos, pos.size(), trial, rng);
}

EstimateRow run_point(const TrialPlan& plan, const Simulator& sim, std::size_t point)
{
    const double x = plan.grid.at(point);
    const std::uint64_t master = point_master(plan.seed, point);
    const long k = static_cast<long>(sim.dimension());
    auto trial = [&](long t, Rng& rng) {
        switch (plan.sweep) {
        case SweepVar::overhead: {
            long m = k + std::lround(x);
            return sim.fixed_receipts_trial(static_cast<std::size_t>(std::max(0L, m)), static_cast<std::uint64_t>(t), rng);
        }
        case SweepVar::rel_overhead: {
            long m = std::lround(static_cast<double>(k) * (1.0 + x));
            return sim.fixed_receipts_trial(static_cast<std::size_t>(std::max(0L, m)), static_cast<std::uint64_t>(t), rng);
        }
        case SweepVar::erasure:
            return sim.channel_trial(x, sim.config().n ? sim.config().n : static_cast<std::size_t>(k),
                                     static_cast<std::uint64_t>(t), rng);
        }
        return Outcome{};
    };

    struct Batch {
        long trials = 0, failures = 0;
        long long sy = 0, syy = 0;
    };
    const long B = std::max(1L, plan.batch);
    const int W = std::max(1, plan.workers);
    long trials = 0, failures = 0;
    long long sy = 0, syy = 0;
    long next_batch = 0;
    bool done = plan.stop.max_trials <= 0;
    while (!done) {
        std::vector<Batch> wave(static_cast<std::size_t>(W));
        parallel_for(W, W, [&](long w) {
            Batch& b = wave[static_cast<std::size_t>(w)];
            const long first = (next_batch + w) * B;
            const long last = std::min(first + B, plan.stop.max_trials);
            // one stream per batch: batches, not workers, fix the randomness
            Rng rng = Rng::stream(master, static_cast<std::uint64_t>(next_batch + w));
            for (long t = first; t < last; ++t) {
                Outcome o = trial(t, rng);
                ++b.trials;
                b.failures += !o.success;
                auto y = static_cast<long long>(o.y);
                b.sy += y;
                b.syy += y * y;
            }
        });
        // consume in order; the stop decision only sees whole batches from the prefix
        for (const Batch& b : wave) {
            if (b.trials == 0) {
                done = true;
                break;
            }
            trials += b.trials;
            failures += b.failures;
            sy += b.sy;
            syy += b.syy;
            if (trials >= plan.stop.max_trials ||
                (trials >= plan.stop.min_trials && failures >= plan.stop.target_failures)) {
                done = true;
                break;
            }
        }
        next_batch += W;
    }
    EstimateRow r;
    r.x = x;
    r.trials = trials;
    r.failures = failures;
    if (trials > 0) {
        const double n = static_cast<double>(trials);
        r.pf = static_cast<double>(failures) / n;
        r.stderr_pf = std::sqrt(r.pf * (1.0 - r.pf) / n);
        r.mean_y = static_cast<double>(sy) / n;
        const double var = std::max(0.0, static_cast<double>(syy) / n - r.mean_y * r.mean_y);
        r.stderr_y = std::sqrt(var / n);
    }
    return r;
}

std::vector<EstimateRow> run_plan(const TrialPlan& plan)
{
    require(!plan.grid.empty(), "trial plan needs a nonempty grid");
    require(plan.stop.max_trials > 0 && plan.stop.target_failures > 0, "stop rule must be positive");
    Simulator sim(plan.code, plan.seed);
    std::vector<EstimateRow> rows;
    for (std::size_t i = 0; i < plan.grid.size(); ++i)
        rows.push_back(run_point(plan, sim, i));
    return rows;
}

std::string dist_to_json(const DegreeDistribution& d) { return dist_json(d).dump(); }

DegreeDistribution dist_from_json(const std::string& text)
{
    try {
        return dist_parse(json::parse(text));
    } catch (const json::exception& e) {
        fail(Errc::parse_error, e.what());
    }
}

std::string plan_to_json(const TrialPlan& p)
{
    const CodeConfig& c = p.code;
    json code{{"kind", code_kind_name(c.kind)},
              {"k", c.k},
              {"field_m", c.field_m},
              {"precode_draws", c.precode_draws},
              {"decoder", name_of(kDecoderNames, c.decoder)},
              {"strategy", strategy_name(c.strategy)},
              {"n", c.n},
              {"eps", c.eps}};
    if (c.dist.dmax() >= 1)
        code["dist"] = dist_json(c.dist);
    if (c.kind == CodeKind::raptor || c.kind == CodeKind::concat || c.kind == CodeKind::block)
        code["precode"] = {{"kind", precode_kind_name(c.precode.kind)},
                           {"k", c.precode.k},
                           {"n", c.precode.n},
                           {"m", c.precode.m}};
    json j{{"version", 1},
           {"code", code},
           {"sweep", sweep_name(p.sweep)},
           {"grid", p.grid},
           {"stop", {{"target_failures", p.stop.target_failures},
                     {"max_trials", p.stop.max_trials},
                     {"min_trials", p.stop.min_trials}}},
           {"seed", p.seed},
           {"workers", p.workers},
           {"batch", p.batch}};
    return j.dump();
}

TrialPlan plan_from_json(const std::string& text)
{
    try {
        json j = json::parse(text);
        TrialPlan p;
        check_keys(j, {"version", "code", "sweep", "grid", "stop", "seed", "workers", "batch"}, "plan");
        const json& c = j.at("code");
        check_keys(c, {"kind", "k", "field_m", "precode_draws", "decoder", "strategy", "n", "eps", "dist", "precode"},
                   "code");
        p.code.kind = parse_code_kind(c.at("kind").get<std::string>());
        p.code.k = c.value("k", 0);
        p.code.field_m = c.value("field_m", 1);
        p.code.precode_draws = c.value("precode_draws", 1);
        p.code.decoder = parse_name(kDecoderNames, c.value("decoder", std::string("ml")), "decoder");
        p.code.strategy = parse_strategy(c.value("strategy", std::string("random")));
        p.code.n = c.value("n", std::size_t{0});
        p.code.eps = c.value("eps", 0.0);
        if (c.contains("dist"))
            p.code.dist = dist_parse(c.at("dist"));
        if (c.contains("precode")) {
            const json& pc = c.at("precode");
            check_keys(pc, {"kind", "k", "n", "m"}, "precode");
            p.code.precode.kind = parse_precode_kind(pc.at("kind").get<std::string>());
            p.code.precode.k = pc.value("k", std::size_t{0});
            p.code.precode.n = pc.value("n", std::size_t{0});
            p.code.precode.m = pc.value("m", 1);
        }
        p.sweep = parse_sweep(j.value("sweep", std::string("overhead")));
        p.grid = j.at("grid").get<std::vector<double>>();
        if (j.contains("stop")) {
            const json& s = j.at("stop");
            check_keys(s, {"target_failures", "max_trials", "min_trials"}, "stop");
            p.stop.target_failures = s.value("target_failures", p.stop.target_failures);
            p.stop.max_trials = s.value("max_trials", p.stop.max_trials);
            p.stop.min_trials = s.value("min_trials", p.stop.min_trials);
        }
        p.seed = j.at("seed").get<std::uint64_t>();
        p.workers = j.value("workers", 1);
        p.batch = j.value("batch", 64L);
        require(!p.grid.empty(), "trial plan needs a nonempty grid");
        return p;
    } catch (const json::exception& e) {
        fail(Errc::parse_error, e.what());
    } catch (const Error& e) {
        fail(Errc::parse_error, e.what());
    }
}

std::string results_tsv(const TrialPlan& plan, const std::vector<EstimateRow>& rows)
{
    std::ostringstream os;
    os.precision(10);
    os << "# " << plan_to_json(plan) << "\n";
    os << "x\ttrials\tfailures\tpf\tstderr\tmean_inact\tstderr_inact\n";
    for (const auto& r : rows)
        os << r.x << '\t' << r.trials << '\t' << r.failures << '\t' << r.pf << '\t' << r.stderr_pf << '\t' << r.mean_y
           << '\t' << r.stderr_y << '\n';
    return os.str();
}

} // namespace fountain
