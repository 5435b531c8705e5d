#include "fountain/designer.hpp"

#include "fountain/fl_analysis.hpp"
#include "fountain/mc_sim.hpp"

#include "json_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

namespace fountain {

using nlohmann::json;

namespace {

std::vector<int> support_of(const DesignSpec& spec)
{
    std::vector<int> s;
    if (spec.support.empty()) {
        for (int d = 1; d <= spec.dmax; ++d)
            s.push_back(d);
    } else {
        for (int d : spec.support)
            if (d >= 1 && d <= spec.dmax)
                s.push_back(d);
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return s;
}

double mean_of(const std::vector<double>& p)
{
    double m = 0.0;
    for (std::size_t d = 1; d < p.size(); ++d)
        m += static_cast<double>(d) * p[d];
    return m;
}



std::vector<double> pi_for(const DegreeDistribution& d, const DesignContext& ctx,
                           std::shared_ptr<const KrawtchoukKernel>& kern)
{
    const int need = std::min(d.dmax(), ctx.h);
    if (!kern || kern->jmax() < need)
        kern = std::make_shared<KrawtchoukKernel>(ctx.h, ctx.q, std::max(need, kern ? kern->jmax() : 0));
    return pi_l(d, *kern);
}

Evaluation evaluate(const DegreeDistribution& d, const DesignSpec& spec, const DesignContext& ctx,
                    std::shared_ptr<const KrawtchoukKernel>& kern)
{
    Evaluation e;
    if (spec.family == DesignFamily::free ? !satisfies(d, spec) : (d.dmax() > spec.dmax || d.mean() > spec.mean_max + 1e-9))
        return e;
    if (!ctx.raptor) {
        const long m = std::lround(spec.k * (1.0 + spec.eval_point));
        e.bound = lt_ml_lower_bound(spec.k, m, d);
        e.e_y = binomial_approx(spec.k, static_cast<int>(m), d).mean;
    } else {
        const int m = ctx.k + static_cast<int>(std::lround(spec.eval_point));
        auto pi = pi_for(d, ctx, kern);
        std::vector<double> terms;
        const double shift = std::log(ctx.q - 1.0);
        for (int l = 1; l <= ctx.h; ++l) {
            double p = pi[static_cast<std::size_t>(l)];
            terms.push_back(ctx.we.log(l) - shift + (p > 0 ? m * std::log(p) : kNegInf));
        }
        e.bound = std::exp(log_sum(terms));
        auto sur = surrogate_lt(ctx.theta, d, ctx.h, ctx.k, m);
        e.e_y = binomial_approx(ctx.h, ctx.h - ctx.k + m, sur).mean;
    }
    e.penalty = penalty(e.bound, spec.pf_target, spec.b);
    e.upsilon = e.e_y + e.penalty;
    return e;
}

DegreeDistribution to_dist(const std::vector<int>& support, const std::vector<double>& p)
{
    std::map<int, double> m;
    for (std::size_t i = 0; i < support.size(); ++i)
        if (p[i] > 0)
            m[support[i]] = p[i];
    return DegreeDistribution::from_map(m, 1e-9);
}

// Dense by degree <-> packed by support index.
std::vector<double> unpack(const std::vector<int>& support, const std::vector<double>& p)
{
    std::vector<double> full(static_cast<std::size_t>(support.back()) + 1, 0.0);
    for (std::size_t i = 0; i < support.size(); ++i)
        full[static_cast<std::size_t>(support[i])] = p[i];
    return full;
}

std::vector<double> pack(const std::vector<int>& support, const std::vector<double>& full)
{
    std::vector<double> p(support.size());
    for (std::size_t i = 0; i < support.size(); ++i)
        p[i] = full[static_cast<std::size_t>(support[i])];
    return p;
}

struct ChainState {
    std::vector<double> p;          // free family, by support index
    double c = 0.05, delta = 0.05;  // truncated RSD
};

struct Chain {
    const DesignSpec& spec;
    const DesignContext& ctx;
    const std::vector<int>& support;
    std::shared_ptr<const KrawtchoukKernel> kern;

    std::optional<DegreeDistribution> build(const ChainState& s) const
    {
        try {
            if (spec.family == DesignFamily::truncated_rsd)
                return truncated_rsd({spec.k, s.c, s.delta}, spec.dmax);
            return to_dist(support, s.p);
        } catch (const Error&) {
            return std::nullopt;
        }
    }

    ChainState neighbor(const ChainState& s, Rng& rng) const
    {
        ChainState n = s;
        if (spec.family == DesignFamily::truncated_rsd) {
            n.c *= std::exp(0.2 * (rng.uniform() - 0.5));
            n.delta = std::clamp(n.delta * std::exp(0.2 * (rng.uniform() - 0.5)), 1e-9, 0.999);
            return n;
        }
        const std::size_t k = support.size();
        if (k < 2)
            return n;
        for (int tries = 0; tries < 16; ++tries) {
            auto i = static_cast<std::size_t>(rng.below(k)), j = static_cast<std::size_t>(rng.below(k - 1));
            if (j >= i)
                ++j;
            double q = std::min(spec.schedule.quantum, n.p[i]);
            if (q <= 0)
                continue;
            n.p[i] -= q;
            n.p[j] += q;
            n.p = pack(support, project_mean(unpack(support, n.p), spec));
            return n;
        }
        return n;
    }

    Evaluation eval(const ChainState& s, std::function<void(const DegreeDistribution&)> const& hook)
    {
        auto d = build(s);
        if (!d)
            return {};
        if (hook)
            hook(*d);
        return evaluate(*d, spec, ctx, kern);
    }
};

} // namespace

double penalty(double p_hat, double pf_target, double b)
{
    if (p_hat < pf_target)
        return 0.0;
    return b * (1.0 - pf_target / p_hat);
}

bool satisfies(const DegreeDistribution& d, const DesignSpec& spec)
{
    if (d.dmax() > spec.dmax)
        return false;
    auto sup = support_of(spec);
    for (int x = 1; x <= d.dmax(); ++x)
        if (d[x] > 0 && !std::binary_search(sup.begin(), sup.end(), x))
            return false;
    const double m = d.mean();
    if (spec.mean_pinned)
        return std::fabs(m - spec.mean_max) <= 1e-9;
    return m <= spec.mean_max + 1e-9;
}

std::vector<double> project_mean(std::vector<double> p, const DesignSpec& spec)
{
    const double target = spec.mean_max, mu = mean_of(p);
    const bool high = mu > target, low = spec.mean_pinned && mu < target;
    if (!high && !low)
        return p;
    // r: the part of p on the far side of the target, or the extreme support degree
    std::vector<double> r(p.size(), 0.0);
    double mass = 0.0;
    for (std::size_t d = 1; d < p.size(); ++d)
        if (high ? d < target : d > target) {
            r[d] = p[d];
            mass += p[d];
        }
    if (mass <= 0.0) {
        auto sup = support_of(spec);
        int pick = high ? sup.front() : sup.back();
        if (high ? pick >= target : pick <= target)
            return p;
        if (static_cast<std::size_t>(pick) >= r.size()) {
            r.resize(static_cast<std::size_t>(pick) + 1, 0.0);
            p.resize(r.size(), 0.0);
        }
        r[static_cast<std::size_t>(pick)] = 1.0;
    } else {
        for (auto& v : r)
            v /= mass;
    }
    const double mr = mean_of(r), lambda = (mu - target) / (mu - mr);
    for (std::size_t d = 0; d < p.size(); ++d)
        p[d] = (1.0 - lambda) * p[d] + lambda * r[d];
    return p;
}

Evaluation objective(const DegreeDistribution& d, const DesignSpec& spec, const DesignContext& ctx)
{
    std::shared_ptr<const KrawtchoukKernel> kern;
    return evaluate(d, spec, ctx, kern);
}

bool accept_move(double d_upsilon, double temperature, Rng& rng)
{
    if (d_upsilon <= 0.0)
        return true;
    if (!(temperature > 0.0) || std::isinf(d_upsilon))
        return false;
    return rng.uniform() < std::exp(-d_upsilon / temperature);
}

DesignContext DesignContext::lt(int k)
{
    DesignContext c;
    c.k = c.h = k;
    return c;
}

DesignContext DesignContext::from_precode(const Precode& pre)
{
    DesignContext c;
    c.raptor = true;
    c.h = static_cast<int>(pre.h);
    c.k = static_cast<int>(pre.k);
    c.q = pre.G.q();
    c.theta = precode_theta(pre);
    if (pre.kind == PrecodeKind::hamming) {
        int t = 0;
        while ((1 << t) - 1 < c.h)
            ++t;
        c.we = we_hamming(t);
    } else if (pre.kind == PrecodeKind::linear_random) {
        c.we = we_linear_random(c.h, c.k, c.q);
    } else {
        require(std::pow(static_cast<double>(c.q), c.k) <= 1 << 22, "enumerator of this precode is too large to count");
        c.we = cowef_from_generator(pre.G).enumerator();
    }
    return c;
}

DesignResult anneal(const DesignSpec& spec, const DesignContext& ctx,
                    const std::function<void(const DegreeDistribution&)>& on_candidate)
{
    require(spec.k >= 1, "design needs k >= 1");
    require(spec.pf_target > 0 && spec.pf_target < 1, "target failure probability must lie in (0,1)");
    require(spec.mean_max > 1.0, "mean degree limit must exceed 1");
    require(spec.schedule.cooling > 0 && spec.schedule.cooling < 1 && spec.schedule.sweeps >= 1 &&
                spec.schedule.moves_per_sweep >= 1,
            "invalid annealing schedule");
    require(spec.chains >= 1, "need at least one chain");
    const auto support = support_of(spec);
    require(!support.empty(), "support must be nonempty");
    require(!ctx.raptor || ctx.k == spec.k, "context and spec disagree on k");

    std::vector<DesignResult> results(static_cast<std::size_t>(spec.chains));
    parallel_for(spec.chains, spec.workers, [&](long c) {
        Rng rng = Rng::stream(spec.seed, static_cast<std::uint64_t>(c));
        Chain ch{spec, ctx, support, nullptr};
        ChainState cur;
        if (spec.family == DesignFamily::free) {
            cur.p.assign(support.size(), 1.0 / static_cast<double>(support.size()));
            cur.p = pack(support, project_mean(unpack(support, cur.p), spec));
        }
        Evaluation ce = ch.eval(cur, on_candidate);

        double t = spec.schedule.t_init;
        if (!(t > 0)) {
            double s = 0;
            int n = 0;
            for (int i = 0; i < 30; ++i) {
                Evaluation e = ch.eval(ch.neighbor(cur, rng), on_candidate);
                double du = e.upsilon - ce.upsilon;
                if (std::isfinite(du) && du > 0) {
                    s += du;
                    ++n;
                }
            }
            t = n ? -(s / n) / std::log(0.8) : 1.0;
        }

        ChainState best = cur;
        Evaluation be = ce;
        DesignResult& res = results[static_cast<std::size_t>(c)];
        for (int sweep = 0; sweep < spec.schedule.sweeps; ++sweep) {
            for (int mv = 0; mv < spec.schedule.moves_per_sweep; ++mv) {
                ChainState cand = ch.neighbor(cur, rng);
                Evaluation e = ch.eval(cand, on_candidate);
                bool take;
                if (!std::isfinite(ce.upsilon))
                    take = true;
                else
                    take = accept_move(e.upsilon - ce.upsilon, t, rng);
                if (take) {
                    cur = std::move(cand);
                    ce = e;
                    if (ce.upsilon < be.upsilon) {
                        best = cur;
                        be = ce;
                    }
                }
            }
            res.trajectory.push_back({sweep, t, be.upsilon, be.e_y, be.bound});
            t *= spec.schedule.cooling;
        }
        auto d = ch.build(best);
        require(d.has_value(), "annealing produced no valid distribution");
        res.best = *d;
        res.eval = be;
        res.feasible = std::isfinite(be.upsilon) && be.bound < spec.pf_target;
        res.chain = static_cast<int>(c);
        res.rsd_c = best.c;
        res.rsd_delta = best.delta;
    });
    std::size_t pick = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].eval.upsilon < results[pick].eval.upsilon)
            pick = i;
    return results[pick];
}

std::string design_spec_to_json(const DesignSpec& s)
{
    json j{{"version", 1},
           {"k", s.k},
           {"pf_target", s.pf_target},
           {"eval_point", s.eval_point},
           {"mean_max", s.mean_max},
           {"mean_pinned", s.mean_pinned},
           {"dmax", s.dmax},
           {"support", s.support},
           {"b", s.b},
           {"family", s.family == DesignFamily::free ? "free" : "truncated_rsd"},
           {"schedule", {{"t_init", s.schedule.t_init},
                         {"cooling", s.schedule.cooling},
                         {"sweeps", s.schedule.sweeps},
                         {"moves_per_sweep", s.schedule.moves_per_sweep},
                         {"quantum", s.schedule.quantum}}},
           {"seed", s.seed},
           {"chains", s.chains},
           {"workers", s.workers}};
    return j.dump();
}

DesignSpec design_spec_from_json(const std::string& text)
{
    try {
        json j = json::parse(text);
        DesignSpec s;
        check_keys(j, {"version", "k", "pf_target", "eval_point", "mean_max", "mean_pinned", "dmax", "support", "b",
                       "family", "schedule", "seed", "chains", "workers"},
                   "design spec");
        s.k = j.at("k").get<int>();
        s.pf_target = j.value("pf_target", s.pf_target);
        s.eval_point = j.value("eval_point", s.eval_point);
        s.mean_max = j.value("mean_max", s.mean_max);
        s.mean_pinned = j.value("mean_pinned", s.mean_pinned);
        s.dmax = j.value("dmax", s.dmax);
        s.support = j.value("support", std::vector<int>{});
        s.b = j.value("b", s.b);
        const std::string fam = j.value("family", std::string("free"));
        if (fam == "free")
            s.family = DesignFamily::free;
        else if (fam == "truncated_rsd")
            s.family = DesignFamily::truncated_rsd;
        else
            fail(Errc::parse_error, "unknown design family: " + fam);
        if (j.contains("schedule")) {
            const json& c = j.at("schedule");
            check_keys(c, {"t_init", "cooling", "sweeps", "moves_per_sweep", "quantum"}, "schedule");
            s.schedule.t_init = c.value("t_init", s.schedule.t_init);
            s.schedule.cooling = c.value("cooling", s.schedule.cooling);
            s.schedule.sweeps = c.value("sweeps", s.schedule.sweeps);
            s.schedule.moves_per_sweep = c.value("moves_per_sweep", s.schedule.moves_per_sweep);
            s.schedule.quantum = c.value("quantum", s.schedule.quantum);
        }
        s.seed = j.value("seed", s.seed);
        s.chains = j.value("chains", s.chains);
        s.workers = j.value("workers", s.workers);
        return s;
    } catch (const json::exception& e) {
        fail(Errc::parse_error, e.what());
    }
}

std::string trajectory_tsv(const std::vector<TrajectoryPoint>& t)
{
    std::ostringstream os;
    os.precision(10);
    os << "step\tT\tupsilon\te_y\tbound\n";
    for (const auto& p : t)
        os << p.step << '\t' << p.t << '\t' << p.upsilon << '\t' << p.e_y << '\t' << p.bound << '\n';
    return os.str();
}

} // namespace fountain
