#include "fountain.h"

#include "fountain/designer.hpp"
#include "fountain/failure_bounds.hpp"
#include "fountain/fl_analysis.hpp"
#include "fountain/lt.hpp"
#include "fountain/mc_sim.hpp"
#include "fountain/raptor.hpp"
#include "fountain/spectra.hpp"

#include "json_util.hpp"

#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <variant>

using nlohmann::json;
using namespace fountain;

struct fc_dist {
    DegreeDistribution d;
};

struct fc_codec {
    std::variant<SystematicLt, SystematicRaptor> code;
    std::size_t k = 0, symbol_size = 0;
    std::optional<Strategy> strategy;
    std::uint64_t seed = 0;
};

namespace {

thread_local std::string g_error;

fc_status to_status(Errc e)
{
    switch (e) {
    case Errc::ok: return FC_OK;
    case Errc::invalid_argument: return FC_ERR_INVALID_ARGUMENT;
    case Errc::domain_error: return FC_ERR_DOMAIN;
    case Errc::construction_failed: return FC_ERR_CONSTRUCTION;
    case Errc::parse_error: return FC_ERR_PARSE;
    case Errc::infeasible: return FC_ERR_INFEASIBLE;
    }
    return FC_ERR_INTERNAL;
}

template <class F>
fc_status guarded(F&& f)
{
    g_error.clear();
    try {
        return f();
    } catch (const Error& e) {
        g_error = e.what();
        return to_status(e.code());
    } catch (const json::exception& e) {
        g_error = e.what();
        return FC_ERR_PARSE;
    } catch (const std::bad_alloc&) {
        g_error = "out of memory";
        return FC_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_error = e.what();
        return FC_ERR_INTERNAL;
    }
}

char* dup(const std::string& s)
{
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p)
        throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

void need(const void* p, const char* what)
{
    if (!p)
        fail(Errc::invalid_argument, std::string(what) + " is null");
}

json parse(const char* text)
{
    need(text, "request");
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        fail(Errc::parse_error, e.what());
    }
}

DegreeDistribution dist_of(const json& j) { return dist_from_json(j.dump()); }

std::string header(const json& req) { return "# " + req.dump() + "\n"; }

std::string num(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

PrecodeParams precode_of(const json& j)
{
    check_keys(j, {"kind", "k", "n", "m"}, "precode");
    PrecodeParams p;
    p.kind = parse_precode_kind(j.at("kind").get<std::string>());
    p.k = j.value("k", std::size_t{0});
    p.n = j.value("n", std::size_t{0});
    p.m = j.value("m", 1);
    return p;
}

Precode build(const PrecodeParams& p, std::uint64_t seed)
{
    Rng rng(seed);
    return build_precode(p, rng);
}

std::vector<int> int_grid(const json& j, const char* list, int lo_default, int hi_default)
{
    if (j.contains(list))
        return j.at(list).get<std::vector<int>>();
    std::vector<int> g;
    for (int d = j.value("lo", lo_default); d <= j.value("hi", hi_default); ++d)
        g.push_back(d);
    return g;
}

// ---- analyze

std::string analyze(const json& j)
{
    check_keys(j, {"version", "method", "k", "dist", "m", "m_lo", "m_hi", "precode", "precode_seed", "seed"}, "analyze");
    const std::string method = j.value("method", std::string("dp"));
    const auto dist = dist_of(j.at("dist"));
    std::string out = header(j);
    if (method == "distribution") {
        const int k = j.at("k").get<int>();
        auto r = inactivation_distribution_dp(k, j.value("m", k), dist);
        return out + distribution_tsv(r);
    }
    if (method == "surrogate") {
        auto pre = build(precode_of(j.at("precode")), j.value("precode_seed", j.value("seed", std::uint64_t{1})));
        const int h = static_cast<int>(pre.h), k = static_cast<int>(pre.k);
        auto theta = precode_theta(pre);
        out += "m\tdelta\te_y_hat\n";
        for (int m = j.value("m_lo", k); m <= j.value("m_hi", k); ++m) {
            auto sur = surrogate_lt(theta, dist, h, k, m);
            out += std::to_string(m) + '\t' + std::to_string(m - k) + '\t' +
                   num(binomial_approx(h, h - k + m, sur).mean) + '\n';
        }
        return out;
    }
    const int k = j.at("k").get<int>();
    const bool dp = method == "dp";
    if (!dp && method != "binomial")
        fail(Errc::parse_error, "unknown analyze method: " + method);
    out += dp ? "m\tdelta\te_y\n" : "m\tdelta\te_y_hat\n";
    for (int m = j.value("m_lo", k); m <= j.value("m_hi", k); ++m) {
        double v = dp ? expected_inactivations_dp(k, m, dist).mean : binomial_approx(k, m, dist).mean;
        out += std::to_string(m) + '\t' + std::to_string(m - k) + '\t' + num(v) + '\n';
    }
    return out;
}

// ---- bounds

WeightEnumerator enumerator_of(const Precode& pre)
{
    if (pre.kind == PrecodeKind::hamming) {
        int t = 0;
        while ((1u << t) - 1 < pre.h)
            ++t;
        return we_hamming(t);
    }
    if (pre.kind == PrecodeKind::linear_random)
        return we_linear_random(static_cast<int>(pre.h), static_cast<int>(pre.k), pre.G.q());
    require(pre.k <= 22, "exact enumerator needs k <= 22");
    return cowef_from_generator(pre.G).enumerator();
}

std::string bounds(const json& j)
{
    check_keys(j,
               {"version", "kind", "q", "k", "n", "n_c", "eps", "eps_grid", "dist", "precode", "precode_seed", "deltas",
                "lo", "hi", "tight", "hamming_t", "receivers", "scheme", "seed"},
               "bounds");
    const std::string kind = j.at("kind").get<std::string>();
    const auto q = j.value("q", 2u);
    std::string out = header(j);
    if (kind == "lrfc") {
        out += "delta\tlower\tupper\n";
        for (int d : int_grid(j, "deltas", 0, 20)) {
            auto b = lrfc_bounds(q, d);
            out += std::to_string(d) + '\t' + num(b.lower) + '\t' + num(b.upper) + '\n';
        }
    } else if (kind == "raptor") {
        auto pre = build(precode_of(j.at("precode")), j.value("precode_seed", j.value("seed", std::uint64_t{1})));
        auto deltas = int_grid(j, "deltas", 0, 30);
        auto v = raptor_upper_bound_curve(enumerator_of(pre), dist_of(j.at("dist")), pre.G.q(),
                                          static_cast<int>(pre.k), deltas, j.value("tight", true));
        out += "delta\tbound\n";
        for (std::size_t i = 0; i < deltas.size(); ++i)
            out += std::to_string(deltas[i]) + '\t' + num(v[i]) + '\n';
    } else if (kind == "lt_upper") {
        const int k = j.at("k").get<int>();
        const auto dist = dist_of(j.at("dist"));
        out += "delta\tbound\n";
        for (int d : int_grid(j, "deltas", 0, 30))
            out += std::to_string(d) + '\t' + num(lt_upper_bound(dist, q, k, d)) + '\n';
    } else if (kind == "lt_lower") {
        const int k = j.at("k").get<int>();
        const auto dist = dist_of(j.at("dist"));
        out += "eps_rel\tbound\n";
        for (double e : j.at("eps_grid").get<std::vector<double>>())
            out += num(e) + '\t' + num(lt_ml_lower_bound(k, e, dist)) + '\n';
    } else if (kind == "concat") {
        const int n_c = j.at("n_c").get<int>(), k = j.at("k").get<int>();
        const double eps = j.at("eps").get<double>();
        out += "delta\tlower\tupper\n";
        for (int d : int_grid(j, "deltas", 0, 20)) {
            auto b = concat_bounds(n_c, k, q, eps, d);
            out += std::to_string(d) + '\t' + num(b.lower) + '\t' + num(b.upper) + '\n';
        }
    } else if (kind == "block") {
        const int n = j.at("n").get<int>(), k = j.at("k").get<int>();
        std::optional<WeightEnumerator> we;
        if (j.contains("hamming_t"))
            we = we_hamming(j.at("hamming_t").get<int>());
        out += we ? "eps\tsingleton\tberlekamp\tdi\n" : "eps\tsingleton\tberlekamp\n";
        for (double e : j.at("eps_grid").get<std::vector<double>>()) {
            auto b = block_bounds(n, k, e, q);
            out += num(e) + '\t' + num(b.singleton) + '\t' + num(b.berlekamp);
            if (we)
                out += '\t' + num(di_bound(*we, k, e));
            out += '\n';
        }
    } else if (kind == "multicast") {
        const long receivers = j.at("receivers").get<long>();
        const double eps = j.at("eps").get<double>();
        const std::string scheme = j.value("scheme", std::string("lrfc"));
        int k = j.value("k", 0), n_c = j.value("n_c", 0);
        auto deltas = int_grid(j, "deltas", 0, 60);
        const int dmax = 2 * (deltas.empty() ? 0 : *std::max_element(deltas.begin(), deltas.end())) + 20;
        BoundCurve lo, up;
        if (scheme == "lrfc") {
            require(k >= 1, "multicast needs k");
            lo = lrfc_curve(q, dmax, false);
            up = lrfc_curve(q, dmax, true);
        } else if (scheme == "concat") {
            if (n_c == 0)
                n_c = k + 1;
            lo = concat_curve(n_c, k, q, eps, dmax, false);
            up = concat_curve(n_c, k, q, eps, dmax, true);
        } else {
            fail(Errc::parse_error, "unknown multicast scheme: " + scheme);
        }
        out += "Delta\tpe_lower\tpe_upper\n";
        for (int d : deltas)
            out += std::to_string(d) + '\t' + num(multicast_pe(receivers, k, eps, d, lo)) + '\t' +
                   num(multicast_pe(receivers, k, eps, d, up)) + '\n';
    } else {
        fail(Errc::parse_error, "unknown bound kind: " + kind);
    }
    return out;
}

// ---- spectra

std::string spectra(const json& j)
{
    check_keys(j, {"version", "kind", "dist", "r_i", "r_o", "grid", "n", "h", "k", "q", "t", "points", "rate", "seed"},
               "spectra");
    const std::string kind = j.at("kind").get<std::string>();
    std::string out = header(j);
    if (kind == "growth") {
        auto g = growth_rate(dist_of(j.at("dist")), j.at("r_i").get<double>(), j.at("r_o").get<double>(),
                             j.at("grid").get<std::vector<double>>());
        return out + growth_tsv(g);
    }
    if (kind == "enumerator") {
        if (j.contains("t"))
            return out + enumerator_tsv(we_hamming(j.at("t").get<int>()));
        if (j.contains("dist"))
            return out + enumerator_tsv(raptor_ensemble_we(dist_of(j.at("dist")), j.at("r_i").get<double>(),
                                                           j.at("r_o").get<double>(), j.at("n").get<int>()));
        return out + enumerator_tsv(we_linear_random(j.at("h").get<int>(), j.at("k").get<int>(), j.value("q", 2u)));
    }
    if (kind == "distance") {
        auto we = raptor_ensemble_we(dist_of(j.at("dist")), j.at("r_i").get<double>(), j.at("r_o").get<double>(),
                                     j.at("n").get<int>());
        return out + "d_hat\n" + std::to_string(typical_min_distance(we)) + '\n';
    }
    if (kind == "region") {
        const auto dist = dist_of(j.at("dist"));
        const int pts = j.value("points", 50);
        require(pts >= 2, "region grid needs at least 2 points");
        out += "r_i\tr_o\tinside\touter_inside\tmargin\n";
        for (int a = 0; a < pts; ++a)
            for (int b = 0; b < pts; ++b) {
                double ri = (a + 0.5) / pts, ro = (b + 0.5) / pts;
                auto r = region_membership(dist, ri, ro);
                out += num(ri) + '\t' + num(ro) + '\t' + (r.inside ? "1" : "0") + '\t' +
                       (region_outer_bound(dist.mean(), ri, ro) ? "1" : "0") + '\t' + num(r.margin) + '\n';
            }
        return out;
    }
    if (kind == "constants") {
        const auto dist = j.contains("dist") ? dist_of(j.at("dist")) : r10_distribution();
        std::string cols = "mean_degree\touter_bound_root", row = num(dist.mean()) + '\t' + num(outer_bound_root());
        if (j.contains("rate")) {
            cols += "\tboundary_outer_rate";
            row += '\t' + num(region_boundary_outer_rate(dist, j.at("rate").get<double>()));
        }
        if (j.contains("r_i") && j.contains("r_o")) {
            cols += "\ttypical_relative_distance";
            row += '\t' + num(typical_distance_asymptotic(dist, j.at("r_i").get<double>(), j.at("r_o").get<double>()));
        }
        out += cols + '\n' + row + '\n';
        return out;
    }
    fail(Errc::parse_error, "unknown spectra kind: " + kind);
}

} // namespace

extern "C" {

const char* fc_version(void) { return "1.0.0"; }

const char* fc_last_error(void) { return g_error.c_str(); }

void fc_free(char* s) { std::free(s); }

fc_status fc_dist_parse(const char* spec, fc_dist** out)
{
    return guarded([&] {
        need(spec, "spec");
        need(out, "out");
        *out = nullptr;
        std::string s(spec);
        auto first = s.find_first_not_of(" \t\r\n");
        auto d = std::make_unique<fc_dist>();
        d->d = first != std::string::npos && s[first] == '{' ? dist_from_json(s) : DegreeDistribution::parse(s);
        *out = d.release();
        return FC_OK;
    });
}

fc_status fc_dist_mean(const fc_dist* d, double* out)
{
    return guarded([&] {
        need(d, "distribution");
        need(out, "out");
        *out = d->d.mean();
        return FC_OK;
    });
}

fc_status fc_dist_text(const fc_dist* d, char** out)
{
    return guarded([&] {
        need(d, "distribution");
        need(out, "out");
        *out = dup(d->d.to_text());
        return FC_OK;
    });
}

void fc_dist_free(fc_dist* d) { delete d; }

fc_status fc_codec_create(const char* config_json, fc_codec** out)
{
    return guarded([&] {
        need(out, "out");
        *out = nullptr;
        json j = parse(config_json);
        check_keys(j, {"version", "code", "k", "symbol_size", "dist", "precode", "seed", "strategy"}, "codec");
        const std::string code = j.value("code", std::string("raptor"));
        const auto seed = j.at("seed").get<std::uint64_t>();
        const auto size = j.at("symbol_size").get<std::size_t>();
        require(size >= 1, "symbol_size must be positive");
        const auto dist = j.contains("dist") ? dist_of(j.at("dist")) : r10_distribution();
        const std::string strat = j.value("strategy", std::string("max-reduced-degree"));
        std::optional<Strategy> strategy;
        if (strat != "ml")
            strategy = parse_strategy(strat);
        if (code == "lt") {
            const auto k = j.at("k").get<std::size_t>();
            require(k >= 1, "k must be positive");
            auto c = std::unique_ptr<fc_codec>(
                new fc_codec{SystematicLt::make(dist, k, gf(1), seed), k, size, strategy, seed});
            *out = c.release();
        } else if (code == "raptor") {
            PrecodeParams p{PrecodeKind::r10_style, 0, 0, 1};
            if (j.contains("precode"))
                p = precode_of(j.at("precode"));
            if (p.k == 0)
                p.k = j.value("k", std::size_t{0});
            require(p.m == 1, "the byte codec is binary");
            auto pre = build(p, seed);
            const std::size_t k = pre.k;
            auto c = std::unique_ptr<fc_codec>(
                new fc_codec{SystematicRaptor::make(pre, dist, seed), k, size, strategy, seed});
            *out = c.release();
        } else {
            fail(Errc::parse_error, "unknown codec: " + code);
        }
        return FC_OK;
    });
}

fc_status fc_codec_info(const fc_codec* c, size_t* k, size_t* symbol_size)
{
    return guarded([&] {
        need(c, "codec");
        if (k)
            *k = c->k;
        if (symbol_size)
            *symbol_size = c->symbol_size;
        return FC_OK;
    });
}

namespace {

// Row r holds symbol r, bit 8b+i is bit i of byte b.
FieldMatrix load(const unsigned char* bytes, std::size_t rows, std::size_t size)
{
    FieldMatrix m(gf(1), rows, size * 8);
    for (std::size_t r = 0; r < rows; ++r)
        std::memcpy(m.row_words(r), bytes + r * size, size);
    return m;
}

void store(const FieldMatrix& m, unsigned char* bytes, std::size_t size)
{
    for (std::size_t r = 0; r < m.rows(); ++r)
        std::memcpy(bytes + r * size, m.row_words(r), size);
}

} // namespace

fc_status fc_codec_encode(const fc_codec* c, const unsigned char* src, size_t n, unsigned char* out)
{
    return guarded([&] {
        need(c, "codec");
        need(src, "src");
        need(out, "out");
        auto s = load(src, c->k, c->symbol_size);
        FieldMatrix e = std::visit([&](const auto& code) { return code.encode(s, n); }, c->code);
        store(e, out, c->symbol_size);
        return FC_OK;
    });
}

fc_status fc_codec_decode(const fc_codec* c, const uint32_t* indices, const unsigned char* symbols, size_t count,
                          unsigned char* out, size_t* inactivations)
{
    return guarded([&] {
        need(c, "codec");
        need(out, "out");
        require(count == 0 || (indices && symbols), "indices and symbols are required");
        std::vector<std::size_t> idx(indices, indices + count);
        auto v = load(symbols, count, c->symbol_size);
        std::optional<FieldMatrix> src;
        std::size_t y = 0;
        if (auto* lt = std::get_if<SystematicLt>(&c->code)) {
            src = lt->decode(idx, v);
        } else {
            Rng rng(c->seed ^ 0x5EED5EEDull);
            auto r = std::get<SystematicRaptor>(c->code).decode(idx, v, c->strategy, rng);
            src = r.source;
            y = r.inactivations;
        }
        if (inactivations)
            *inactivations = y;
        if (!src) {
            g_error = "received symbols do not determine the source";
            return FC_ERR_DECODE;
        }
        store(*src, out, c->symbol_size);
        return FC_OK;
    });
}

void fc_codec_free(fc_codec* c) { delete c; }

fc_status fc_simulate(const char* plan_json, char** tsv)
{
    return guarded([&] {
        need(plan_json, "plan");
        need(tsv, "out");
        auto plan = plan_from_json(plan_json);
        *tsv = dup(results_tsv(plan, run_plan(plan)));
        return FC_OK;
    });
}

fc_status fc_analyze(const char* request_json, char** tsv)
{
    return guarded([&] {
        need(tsv, "out");
        *tsv = dup(analyze(parse(request_json)));
        return FC_OK;
    });
}

fc_status fc_bounds(const char* request_json, char** tsv)
{
    return guarded([&] {
        need(tsv, "out");
        *tsv = dup(bounds(parse(request_json)));
        return FC_OK;
    });
}

fc_status fc_spectra(const char* request_json, char** tsv)
{
    return guarded([&] {
        need(tsv, "out");
        *tsv = dup(spectra(parse(request_json)));
        return FC_OK;
    });
}

fc_status fc_design(const char* request_json, char** dist_text, char** trajectory_tsv_out, char** summary_json)
{
    return guarded([&] {
        need(dist_text, "dist_text");
        json j = parse(request_json);
        check_keys(j, {"version", "spec", "context"}, "design");
        auto spec = design_spec_from_json(j.at("spec").dump());
        DesignContext ctx = DesignContext::lt(spec.k);
        if (j.contains("context")) {
            const json& c = j.at("context");
            check_keys(c, {"kind", "precode", "precode_seed"}, "context");
            const std::string kind = c.value("kind", std::string("lt"));
            if (kind == "raptor") {
                ctx = DesignContext::from_precode(build(precode_of(c.at("precode")), c.value("precode_seed", std::uint64_t{1})));
                if (spec.k == 0)
                    spec.k = ctx.k;
            } else if (kind != "lt") {
                fail(Errc::parse_error, "unknown design context: " + kind);
            }
        }
        auto r = anneal(spec, ctx);
        json resolved{{"version", 1}, {"spec", json::parse(design_spec_to_json(spec))}};
        if (j.contains("context"))
            resolved["context"] = j.at("context");
        *dist_text = dup("# " + resolved.dump() + "\n" + r.best.to_text());
        if (trajectory_tsv_out)
            *trajectory_tsv_out = dup("# " + resolved.dump() + "\n" + trajectory_tsv(r.trajectory));
        if (summary_json) {
            json s{{"feasible", r.feasible},
                   {"upsilon", r.eval.upsilon},
                   {"e_y", r.eval.e_y},
                   {"bound", r.eval.bound},
                   {"mean", r.best.mean()},
                   {"chain", r.chain}};
            if (spec.family == DesignFamily::truncated_rsd) {
                s["rsd_c"] = r.rsd_c;
                s["rsd_delta"] = r.rsd_delta;
            }
            *summary_json = dup(s.dump());
        }
        if (!r.feasible) {
            g_error = "design did not reach the target failure probability (bound " + num(r.eval.bound) + ")";
            return FC_ERR_INFEASIBLE;
        }
        return FC_OK;
    });
}

} // extern "C"
