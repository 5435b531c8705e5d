// fountain: command-line front end over the C library.
#include "fountain.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

constexpr int kUsage = 1;
constexpr int kFailed = 2;

struct Failure {
    int code;
    std::string msg;
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Failure{kUsage, "cannot read " + path};
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw Failure{kFailed, "cannot write " + path};
}

void check(fc_status s)
{
    if (s == FC_OK)
        return;
    throw Failure{s == FC_ERR_PARSE || s == FC_ERR_INVALID_ARGUMENT ? kUsage : kFailed, fc_last_error()};
}

// Takes ownership of a library string.
std::string take(char* p)
{
    std::string s = p ? p : "";
    fc_free(p);
    return s;
}

json load_config(const std::string& path)
{
    try {
        return json::parse(slurp(path));
    } catch (const json::exception& e) {
        throw Failure{kUsage, path + ": " + e.what()};
    }
}

int env_threads()
{
    if (const char* v = std::getenv("FOUNTAIN_THREADS")) {
        int n = std::atoi(v);
        if (n >= 1)
            return n;
    }
    return 1;
}

// r10, omega2, rsd:k,c,delta, ideal:k, binomial:k[,p], point:d, or a file in the "d p" format.
json dist_arg(const std::string& s)
{
    auto colon = s.find(':');
    std::string name = s.substr(0, colon);
    std::vector<double> a;
    if (colon != std::string::npos) {
        std::stringstream ss(s.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, ','))
            a.push_back(std::stod(tok));
    }
    if (name == "r10" || name == "omega2")
        return {{"name", name}};
    if (name == "rsd" && a.size() == 3)
        return {{"name", "rsd"}, {"k", static_cast<int>(a[0])}, {"c", a[1]}, {"delta", a[2]}};
    if (name == "ideal" && a.size() == 1)
        return {{"name", "ideal"}, {"k", static_cast<int>(a[0])}};
    if (name == "binomial" && (a.size() == 1 || a.size() == 2))
        return {{"name", "binomial"}, {"k", static_cast<int>(a[0])}, {"p", a.size() == 2 ? a[1] : 0.5}};
    if (name == "point" && a.size() == 1)
        return {{"name", "point"}, {"d", static_cast<int>(a[0])}};
    fc_dist* d = nullptr;
    check(fc_dist_parse(slurp(s).c_str(), &d));
    char* text = nullptr;
    fc_status st = fc_dist_text(d, &text);
    fc_dist_free(d);
    check(st);
    json masses = json::array();
    std::istringstream is(take(text));
    int deg;
    double p;
    while (is >> deg >> p)
        masses.push_back({deg, p});
    return {{"masses", masses}};
}

std::pair<int, int> range_arg(const std::string& s)
{
    auto c = s.find(':');
    try {
        if (c == std::string::npos) {
            int v = std::stoi(s);
            return {v, v};
        }
        return {std::stoi(s.substr(0, c)), std::stoi(s.substr(c + 1))};
    } catch (const std::exception&) {
        throw Failure{kUsage, "bad range: " + s};
    }
}

// ---- encode / decode: a '#' JSON header line, then records of a little-endian u32 index and the symbol bytes.

void put_u32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

int cmd_encode(json cfg, const std::string& in, const std::string& out, long n_opt, double erase,
               std::optional<std::uint64_t> seed)
{
    if (seed)
        cfg["seed"] = *seed;
    if (!cfg.contains("seed"))
        cfg["seed"] = 1;
    std::string data = slurp(in);
    std::size_t size = cfg.value("symbol_size", 0u);
    if (size == 0)
        throw Failure{kUsage, "codec config needs symbol_size"};
    if (!cfg.contains("k") && !cfg.contains("precode"))
        cfg["k"] = std::max<std::size_t>(1, (data.size() + size - 1) / size);

    fc_codec* c = nullptr;
    check(fc_codec_create(cfg.dump().c_str(), &c));
    std::size_t k = 0;
    fc_codec_info(c, &k, nullptr);
    if (data.size() > k * size) {
        fc_codec_free(c);
        throw Failure{kUsage, "input larger than k * symbol_size = " + std::to_string(k * size) + " bytes"};
    }
    const std::size_t n = n_opt > 0 ? static_cast<std::size_t>(n_opt) : k + k / 10 + 10;
    std::vector<unsigned char> src(k * size, 0), enc(n * size);
    std::copy(data.begin(), data.end(), src.begin());
    fc_status st = fc_codec_encode(c, src.data(), n, enc.data());
    fc_codec_free(c);
    check(st);

    json head{{"version", 1}, {"codec", cfg}, {"length", data.size()}, {"n", n}, {"erase", erase}};
    std::string blob = "# " + head.dump() + "\n";
    std::mt19937_64 rng(cfg.at("seed").get<std::uint64_t>() ^ 0xE7A5E5ull);
    std::bernoulli_distribution drop(erase);
    for (std::size_t i = 0; i < n; ++i) {
        if (erase > 0 && drop(rng))
            continue;
        put_u32(blob, static_cast<std::uint32_t>(i));
        blob.append(reinterpret_cast<const char*>(enc.data() + i * size), size);
    }
    emit(out, blob);
    return 0;
}

int cmd_decode(const std::string& in, const std::string& out)
{
    std::string blob = slurp(in);
    auto nl = blob.find('\n');
    if (blob.rfind("# ", 0) != 0 || nl == std::string::npos)
        throw Failure{kUsage, in + ": not an encoded stream"};
    json head;
    try {
        head = json::parse(blob.substr(2, nl - 2));
    } catch (const json::exception& e) {
        throw Failure{kUsage, in + ": " + e.what()};
    }
    fc_codec* c = nullptr;
    check(fc_codec_create(head.at("codec").dump().c_str(), &c));
    std::size_t k = 0, size = 0;
    fc_codec_info(c, &k, &size);
    std::vector<std::uint32_t> idx;
    std::vector<unsigned char> sym;
    for (std::size_t p = nl + 1; p + 4 + size <= blob.size(); p += 4 + size) {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(blob[p + i])) << (8 * i);
        idx.push_back(v);
        sym.insert(sym.end(), blob.begin() + static_cast<long>(p) + 4, blob.begin() + static_cast<long>(p + 4 + size));
    }
    std::vector<unsigned char> src(k * size);
    std::size_t y = 0;
    fc_status st = fc_codec_decode(c, idx.data(), sym.data(), idx.size(), src.data(), &y);
    fc_codec_free(c);
    check(st);
    std::cerr << "decoded from " << idx.size() << " symbols, " << y << " inactivations\n";
    emit(out, std::string(reinterpret_cast<const char*>(src.data()), head.at("length").get<std::size_t>()));
    return 0;
}

// ---- selftest

struct Tsv {
    json header;
    std::vector<std::string> cols;
    std::vector<std::vector<double>> rows;
};

// Every emitted table: one '#' JSON line, a column row, then rows of numbers of the same width.
Tsv parse_tsv(const std::string& text)
{
    Tsv t;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
        throw std::runtime_error("missing provenance line");
    t.header = json::parse(line.substr(2));
    if (!std::getline(is, line))
        throw std::runtime_error("missing column row");
    std::stringstream cs(line);
    std::string c;
    while (std::getline(cs, c, '\t'))
        t.cols.push_back(c);
    while (std::getline(is, line)) {
        std::stringstream rs(line);
        std::vector<double> r;
        while (std::getline(rs, c, '\t')) {
            std::size_t used = 0;
            r.push_back(c.empty() ? NAN : std::stod(c, &used));
            if (!c.empty() && used != c.size())
                throw std::runtime_error("non-numeric cell " + c);
        }
        if (r.size() != t.cols.size())
            throw std::runtime_error("ragged row");
        t.rows.push_back(r);
    }
    return t;
}

using Producer = fc_status (*)(const char*, char**);

std::string run(Producer f, const json& req)
{
    char* out = nullptr;
    check(f(req.dump().c_str(), &out));
    return take(out);
}

int cmd_selftest()
{
    int failed = 0;
    auto item = [&](const char* name, auto&& body) {
        bool ok = false;
        std::string why;
        try {
            ok = body();
        } catch (const Failure& f) {
            why = f.msg;
        } catch (const std::exception& e) {
            why = e.what();
        }
        std::cout << (ok ? "ok    " : "FAIL  ") << name << (why.empty() ? "" : "  (" + why + ")") << '\n';
        failed += !ok;
    };

    item("lrfc bracket values", [] {
        auto t = parse_tsv(run(fc_bounds, {{"kind", "lrfc"}, {"q", 2}, {"lo", 0}, {"hi", 6}}));
        for (const auto& r : t.rows)
            if (std::fabs(r[1] / std::ldexp(1.0, -static_cast<int>(r[0]) - 1) - 1) > 1e-12 ||
                std::fabs(r[2] / std::ldexp(1.0, -static_cast<int>(r[0])) - 1) > 1e-12)
                return false;
        return t.rows.size() == 7;
    });
    item("hamming (7,4) enumerator", [] {
        auto t = parse_tsv(run(fc_spectra, {{"kind", "enumerator"}, {"t", 3}}));
        const double want[] = {1, 0, 0, 7, 7, 0, 0, 1};
        if (t.rows.size() != 8)
            return false;
        for (std::size_t w = 0; w < 8; ++w)
            if (std::fabs(t.rows[w][1] - want[w]) > 1e-9)
                return false;
        return true;
    });
    item("r10 constants", [] {
        auto t = parse_tsv(run(fc_spectra, {{"kind", "constants"}}));
        return t.rows.size() == 1 && std::fabs(t.rows[0][0] - 4.6314) < 1e-4 && std::fabs(t.rows[0][1] - 0.22709) < 1e-4;
    });
    item("point-mass DP has no inactivations", [] {
        auto t = parse_tsv(run(fc_analyze, {{"method", "dp"}, {"k", 1}, {"dist", {{"name", "point"}, {"d", 1}}}}));
        return t.rows.size() == 1 && t.rows[0][2] == 0.0;
    });
    item("simulated LRFC inside its bracket", [] {
        json plan{{"code", {{"kind", "lrfc"}, {"k", 10}}},
                  {"grid", {1, 3}},
                  {"stop", {{"target_failures", 20000}, {"max_trials", 20000}}},
                  {"seed", 7}};
        auto t = parse_tsv(run(fc_simulate, plan));
        for (const auto& r : t.rows) {
            double lo = std::ldexp(1.0, -static_cast<int>(r[0]) - 1), hi = 2 * lo;
            if (r[3] + 3 * r[4] < lo || r[3] - 3 * r[4] >= hi)
                return false;
        }
        return t.rows.size() == 2;
    });
    item("codec round trip with losses", [] {
        json cfg{{"code", "raptor"}, {"k", 40}, {"symbol_size", 16}, {"seed", 3}};
        fc_codec* c = nullptr;
        check(fc_codec_create(cfg.dump().c_str(), &c));
        std::vector<unsigned char> src(40 * 16), enc(80 * 16), back(40 * 16);
        for (std::size_t i = 0; i < src.size(); ++i)
            src[i] = static_cast<unsigned char>(i * 131 + 7);
        check(fc_codec_encode(c, src.data(), 80, enc.data()));
        std::vector<std::uint32_t> idx;
        std::vector<unsigned char> sym;
        for (std::uint32_t i = 0; i < 80; i += (i % 3 == 0 ? 2 : 1)) {
            idx.push_back(i);
            sym.insert(sym.end(), enc.begin() + i * 16, enc.begin() + (i + 1) * 16);
        }
        fc_status st = fc_codec_decode(c, idx.data(), sym.data(), idx.size(), back.data(), nullptr);
        fc_codec_free(c);
        return st == FC_OK && back == src;
    });
    item("unknown config fields are rejected", [] {
        char* out = nullptr;
        fc_status s = fc_bounds(R"({"kind":"lrfc","colour":1})", &out);
        fc_free(out);
        return s == FC_ERR_PARSE;
    });
    item("outputs reproduce from their own header", [] {
        std::string a = run(fc_analyze, {{"method", "binomial"}, {"k", 50}, {"m_lo", 50}, {"m_hi", 55}, {"dist", {{"name", "r10"}}}});
        std::string b = run(fc_analyze, parse_tsv(a).header);
        json plan{{"code", {{"kind", "lt"}, {"k", 20}, {"dist", {{"name", "r10"}}}}},
                  {"grid", {0, 4}},
                  {"stop", {{"target_failures", 50}, {"max_trials", 500}}},
                  {"seed", 11}};
        std::string c = run(fc_simulate, plan);
        std::string d = run(fc_simulate, parse_tsv(c).header);
        return a == b && c == d;
    });
    item("single-degree design", [] {
        json req{{"spec", {{"k", 30}, {"support", {1}}, {"mean_max", 2.0}, {"schedule", {{"sweeps", 3}}}}}};
        char *dist = nullptr, *traj = nullptr, *sum = nullptr;
        fc_status s = fc_design(req.dump().c_str(), &dist, &traj, &sum);
        std::string d = take(dist);
        parse_tsv(take(traj));
        take(sum);
        return (s == FC_OK || s == FC_ERR_INFEASIBLE) && d.find("\n1 1\n") != std::string::npos;
    });
    std::cout << (failed ? "selftest failed: " + std::to_string(failed) + " item(s)\n" : std::string("selftest passed\n"));
    return failed ? kFailed : 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fountain code analysis, simulation and design"};
    app.require_subcommand(1);
    std::string config, out;
    std::optional<std::uint64_t> seed;
    auto common = [&](CLI::App* s, bool need_config) {
        auto* o = s->add_option("--config,-c", config, "JSON config file");
        if (need_config)
            o->required()->check(CLI::ExistingFile);
        s->add_option("--out,-o", out, "output path (default stdout)");
        s->add_option("--seed", seed, "seed override");
    };

    auto* enc = app.add_subcommand("encode", "encode a file into output symbols");
    common(enc, true);
    std::string input;
    long n_out = 0;
    double erase = 0.0;
    enc->add_option("--in,-i", input, "file to encode")->required()->check(CLI::ExistingFile);
    enc->add_option("--n", n_out, "number of output symbols");
    enc->add_option("--erase", erase, "drop each output symbol with this probability")->check(CLI::Range(0.0, 1.0));

    auto* dec = app.add_subcommand("decode", "recover a file from an encoded stream");
    common(dec, false);
    dec->add_option("--in,-i", input, "encoded stream")->required()->check(CLI::ExistingFile);

    auto* sim = app.add_subcommand("simulate", "Monte Carlo failure and inactivation estimates");
    common(sim, true);
    int workers = 0;
    sim->add_option("--workers", workers, "worker threads (default FOUNTAIN_THREADS or 1)");

    auto* ana = app.add_subcommand("analyze", "expected inactivations by DP or binomial approximation");
    common(ana, false);
    bool dp = false, binom = false;
    int k = 0;
    std::string dist = "r10", mgrid;
    ana->add_flag("--dp", dp, "exact DP");
    ana->add_flag("--binomial", binom, "binomial approximation");
    ana->add_option("--k", k, "source symbols");
    ana->add_option("--dist", dist, "r10 | omega2 | rsd:k,c,delta | ideal:k | binomial:k[,p] | point:d | file");
    ana->add_option("--m-grid", mgrid, "received symbols lo:hi");

    auto* bnd = app.add_subcommand("bounds", "failure probability bounds");
    common(bnd, true);
    auto* spe = app.add_subcommand("spectra", "weight spectra, growth rates and regions");
    common(spe, true);
    auto* des = app.add_subcommand("design", "simulated annealing degree distribution design");
    common(des, true);
    std::string traj_path, summary_path;
    des->add_option("--trajectory", traj_path, "annealing trajectory TSV");
    des->add_option("--summary", summary_path, "summary JSON (default stderr)");

    auto* self = app.add_subcommand("selftest", "run the built-in example corpus");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    try {
        if (*self)
            return cmd_selftest();
        if (*enc)
            return cmd_encode(load_config(config), input, out, n_out, erase, seed);
        if (*dec)
            return cmd_decode(input, out);
        if (*sim) {
            json plan = load_config(config);
            if (seed)
                plan["seed"] = *seed;
            if (workers > 0)
                plan["workers"] = workers;
            else if (!plan.contains("workers"))
                plan["workers"] = env_threads();
            emit(out, run(fc_simulate, plan));
            return 0;
        }
        if (*ana) {
            json req = config.empty() ? json::object() : load_config(config);
            if (dp && binom)
                throw Failure{kUsage, "choose one of --dp and --binomial"};
            if (dp || binom || !req.contains("method"))
                req["method"] = binom ? "binomial" : "dp";
            if (k > 0)
                req["k"] = k;
            if (!req.contains("dist") || ana->count("--dist"))
                req["dist"] = dist_arg(dist);
            if (!mgrid.empty()) {
                auto [lo, hi] = range_arg(mgrid);
                req["m_lo"] = lo;
                req["m_hi"] = hi;
            }
            if (!req.contains("k") && !req.contains("precode"))
                throw Failure{kUsage, "analyze needs --k"};
            req["seed"] = seed ? *seed : req.value("seed", std::uint64_t{1});
            emit(out, run(fc_analyze, req));
            return 0;
        }
        if (*bnd || *spe) {
            json req = load_config(config);
            req["seed"] = seed ? *seed : req.value("seed", std::uint64_t{1});
            emit(out, run(*bnd ? fc_bounds : fc_spectra, req));
            return 0;
        }
        if (*des) {
            json req = load_config(config);
            if (seed)
                req["spec"]["seed"] = *seed;
            if (!req["spec"].contains("workers"))
                req["spec"]["workers"] = env_threads();
            char *d = nullptr, *t = nullptr, *s = nullptr;
            fc_status st = fc_design(req.dump().c_str(), &d, &t, &s);
            std::string why = fc_last_error();
            std::string dtext = take(d), ttext = take(t), stext = take(s);
            if (st != FC_OK && st != FC_ERR_INFEASIBLE)
                check(st);
            emit(out, dtext);
            if (!traj_path.empty())
                emit(traj_path, ttext);
            if (summary_path.empty())
                std::cerr << stext << '\n';
            else
                emit(summary_path, stext + "\n");
            if (st == FC_ERR_INFEASIBLE) {
                std::cerr << "infeasible: " << why << '\n';
                return kFailed;
            }
            return 0;
        }
    } catch (const Failure& f) {
        std::cerr << "error: " << f.msg << '\n';
        return f.code;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
