#include "fountain/inactivation.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace fountain {

SparseSystem::SparseSystem(FieldPtr f, std::size_t n, std::size_t width)
    : field(std::move(f)), nvars(n), rhs(field, 0, width)
{
}

void SparseSystem::add(Equation e)
{
    require(rhs.cols() == 0, "system carries payloads; supply a value row");
    eqs.push_back(std::move(e));
    rhs = FieldMatrix(field, eqs.size(), 0);
}

void SparseSystem::add(Equation e, const FieldMatrix& value, std::size_t row)
{
    require(value.cols() == rhs.cols(), "payload width mismatch");
    FieldMatrix one(field, 1, rhs.cols());
    one.add_row_from(0, value, row, 1);
    rhs = rhs.vstack(one);
    eqs.push_back(std::move(e));
}

void SparseSystem::validate() const
{
    require(rhs.rows() == eqs.size(), "rhs row count must equal equation count");
    for (const auto& e : eqs) {
        require(e.coef.empty() || e.coef.size() == e.idx.size(), "coefficient list length mismatch");
        for (std::size_t i = 0; i < e.idx.size(); ++i) {
            require(e.idx[i] < nvars, "variable index out of range");
            require(i == 0 || e.idx[i - 1] < e.idx[i], "equation indices must be sorted and distinct");
            require(e.coef_at(i) != 0, "zero coefficient stored in equation");
        }
    }
}

FieldMatrix SparseSystem::dense() const
{
    FieldMatrix m(field, eqs.size(), nvars);
    for (std::size_t r = 0; r < eqs.size(); ++r)
        for (std::size_t i = 0; i < eqs[r].idx.size(); ++i)
            m.set(r, eqs[r].idx[i], eqs[r].coef_at(i));
    return m;
}

const char* strategy_name(Strategy s)
{
    switch (s) {
    case Strategy::random: return "random";
    case Strategy::max_reduced_degree: return "max-reduced-degree";
    case Strategy::max_accumulated: return "max-accumulated";
    case Strategy::max_component: return "max-component";
    }
    return "?";
}

Strategy parse_strategy(const std::string& s)
{
    for (Strategy x : {Strategy::random, Strategy::max_reduced_degree, Strategy::max_accumulated,
                       Strategy::max_component})
        if (s == strategy_name(x))
            return x;
    fail(Errc::invalid_argument, "unknown inactivation strategy: " + s);
}

namespace {

class Graph {
public:
    Graph(const SparseSystem& sys, Rng& rng) : sys_(sys), rng_(rng)
    {
        const std::size_t n = sys.nvars, E = sys.eqs.size();
        start_.assign(n + 1, 0);
        for (const auto& e : sys.eqs)
            for (auto v : e.idx)
                ++start_[v + 1];
        std::partial_sum(start_.begin(), start_.end(), start_.begin());
        adj_.resize(start_[n]);
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (std::uint32_t e = 0; e < E; ++e)
            for (auto v : sys.eqs[e].idx)
                adj_[fill[v]++] = e;

        deg_.resize(E);
        xr_.assign(E, 0);
        rpos_.assign(E, -1);
        for (std::uint32_t e = 0; e < E; ++e) {
            deg_[e] = static_cast<std::uint32_t>(sys.eqs[e].idx.size());
            for (auto v : sys.eqs[e].idx)
                xr_[e] ^= v;
            if (deg_[e] == 1)
                ripple_push(e);
            else if (deg_[e] >= 2)
                ++cloud_;
        }
        alive_.resize(n);
        apos_.resize(n);
        for (std::uint32_t v = 0; v < n; ++v) {
            alive_[v] = v;
            apos_[v] = v;
        }
    }

    std::size_t ripple_size() const { return ripple_.size(); }
    std::size_t cloud() const { return cloud_; }
    std::size_t active_count() const { return alive_.size(); }

    std::uint32_t pick_ripple()
    {
        return ripple_[rng_.below(ripple_.size())];
    }
    std::uint32_t ripple_var(std::uint32_t e) const { return xr_[e]; }

    void remove(std::uint32_t v)
    {
        std::uint32_t last = alive_.back();
        alive_[apos_[v]] = last;
        apos_[last] = apos_[v];
        alive_.pop_back();
        apos_[v] = UINT32_MAX;
        for (std::size_t i = start_[v]; i < start_[v + 1]; ++i) {
            std::uint32_t e = adj_[i];
            std::uint32_t old = deg_[e]--;
            xr_[e] ^= v;
            if (old == 2) {
                --cloud_;
                ripple_push(e);
            } else if (old == 1) {
                ripple_erase(e);
            }
        }
    }

    std::uint32_t choose_inactive(Strategy s)
    {
        switch (s) {
        case Strategy::random: return random_active();
        case Strategy::max_reduced_degree: return max_reduced_degree();
        case Strategy::max_accumulated: return max_accumulated();
        case Strategy::max_component: return max_component();
        }
        return random_active();
    }

private:
    bool active(std::uint32_t v) const { return apos_[v] != UINT32_MAX; }
    std::size_t var_degree(std::uint32_t v) const { return start_[v + 1] - start_[v]; }

    void ripple_push(std::uint32_t e)
    {
        rpos_[e] = static_cast<std::int64_t>(ripple_.size());
        ripple_.push_back(e);
    }
    void ripple_erase(std::uint32_t e)
    {
        auto p = static_cast<std::size_t>(rpos_[e]);
        std::uint32_t last = ripple_.back();
        ripple_[p] = last;
        rpos_[last] = static_cast<std::int64_t>(p);
        ripple_.pop_back();
        rpos_[e] = -1;
    }

    std::uint32_t random_active() { return alive_[rng_.below(alive_.size())]; }

    template <class T>
    T pick(const std::vector<T>& c)
    {
        return c[rng_.below(c.size())];
    }

    // Edges of an active variable never leave the graph, so its reduced degree
    // is the number of equations it appears in.
    std::uint32_t max_reduced_degree()
    {
        std::size_t best = 0;
        std::vector<std::uint32_t> ties;
        for (auto v : alive_) {
            std::size_t d = var_degree(v);
            if (ties.empty() || d > best) {
                best = d;
                ties.assign(1, v);
            } else if (d == best) {
                ties.push_back(v);
            }
        }
        return pick(ties);
    }

    std::uint32_t max_accumulated()
    {
        std::uint32_t dmin = UINT32_MAX;
        std::size_t amax = 0;
        std::vector<std::uint32_t> ties;
        for (std::uint32_t e = 0; e < deg_.size(); ++e) {
            if (deg_[e] < 2 || deg_[e] > dmin)
                continue;
            std::size_t acc = 0;
            for (auto v : sys_.eqs[e].idx)
                if (active(v))
                    acc += var_degree(v);
            if (deg_[e] < dmin || acc > amax) {
                dmin = deg_[e];
                amax = acc;
                ties.assign(1, e);
            } else if (acc == amax) {
                ties.push_back(e);
            }
        }
        if (ties.empty())
            return random_active();
        std::uint32_t e = pick(ties);
        std::vector<std::uint32_t> nb;
        for (auto v : sys_.eqs[e].idx)
            if (active(v))
                nb.push_back(v);
        return pick(nb);
    }

    std::uint32_t find(std::uint32_t v)
    {
        while (parent_[v] != v) {
            parent_[v] = parent_[parent_[v]];
            v = parent_[v];
        }
        return v;
    }

    // Components of the graph induced by reduced-degree-2 equations, rebuilt
    // on every call.
    std::uint32_t max_component()
    {
        const std::size_t n = sys_.nvars;
        parent_.resize(n);
        std::iota(parent_.begin(), parent_.end(), 0u);
        comp_.assign(n, 0);
        std::vector<std::uint32_t> touched;
        for (std::uint32_t e = 0; e < deg_.size(); ++e) {
            if (deg_[e] != 2)
                continue;
            std::uint32_t a = UINT32_MAX, b = UINT32_MAX;
            for (auto v : sys_.eqs[e].idx)
                if (active(v))
                    (a == UINT32_MAX ? a : b) = v;
            touched.push_back(a);
            touched.push_back(b);
            std::uint32_t ra = find(a), rb = find(b);
            if (ra != rb) {
                parent_[rb] = ra;
                comp_[ra] += comp_[rb];
            }
            ++comp_[ra];
        }
        if (touched.empty())
            return random_active();
        std::size_t best = 0;
        std::vector<std::uint32_t> roots;
        std::vector<char> seen(n, 0);
        for (auto v : touched) {
            if (find(v) != v || seen[v])
                continue;
            seen[v] = 1;
            if (comp_[v] > best) {
                best = comp_[v];
                roots.assign(1, v);
            } else if (comp_[v] == best) {
                roots.push_back(v);
            }
        }
        std::uint32_t root = pick(roots);
        std::fill(seen.begin(), seen.end(), 0);
        std::vector<std::uint32_t> members;
        for (auto v : touched)
            if (!seen[v] && find(v) == root) {
                seen[v] = 1;
                members.push_back(v);
            }
        return pick(members);
    }

    const SparseSystem& sys_;
    Rng& rng_;
    std::vector<std::size_t> start_;
    std::vector<std::uint32_t> adj_;
    std::vector<std::uint32_t> deg_, xr_;
    std::vector<std::int64_t> rpos_;
    std::vector<std::uint32_t> ripple_;
    std::size_t cloud_ = 0;
    std::vector<std::uint32_t> alive_, apos_;
    std::vector<std::uint32_t> parent_;
    std::vector<std::size_t> comp_;
};

} // namespace

Triangulation triangulate(const SparseSystem& sys, Strategy strategy, Rng& rng, bool stop_on_empty)
{
    Graph g(sys, rng);
    Triangulation t;
    t.trace.reserve(sys.nvars);
    while (g.active_count() > 0) {
        TraceStep st;
        st.u = g.active_count();
        st.ripple = g.ripple_size();
        st.cloud = g.cloud();
        if (st.ripple > 0) {
            std::uint32_t e = g.pick_ripple();
            st.var = g.ripple_var(e);
            t.pivots.emplace_back(e, st.var);
        } else {
            if (stop_on_empty) {
                t.complete = false;
                break;
            }
            st.inactivation = true;
            st.var = g.choose_inactive(strategy);
            t.inactive.push_back(st.var);
        }
        g.remove(st.var);
        t.trace.push_back(st);
    }
    return t;
}

InactivationResult solve_triangulated(const SparseSystem& sys, const Triangulation& tri)
{
    require(tri.complete, "triangulation stopped early");
    const Field& f = *sys.field;
    const std::size_t n = sys.nvars, y = tri.inactive.size(), w = sys.width();
    InactivationResult res;
    res.inactivations = y;
    res.trace = tri.trace;

    // Row v of X expresses variable v as (coefficients on inactive vars | constant).
    FieldMatrix X(sys.field, n, y + w);
    for (std::size_t i = 0; i < y; ++i)
        X.set(tri.inactive[i], i, 1);
    std::vector<char> used(sys.eqs.size(), 0);
    for (auto [e, v] : tri.pivots) {
        used[e] = 1;
        const Equation& eq = sys.eqs[e];
        for (std::size_t c = 0; c < w; ++c)
            if (Elem b = sys.rhs.get(e, c))
                X.set(v, y + c, b);
        Elem cv = 0;
        for (std::size_t i = 0; i < eq.idx.size(); ++i) {
            if (eq.idx[i] == v)
                cv = eq.coef_at(i);
            else
                X.add_row(v, eq.idx[i], eq.coef_at(i));
        }
        X.scale_row(v, f.inv(cv));
    }

    std::size_t rest = 0;
    for (char u : used)
        rest += !u;
    FieldMatrix core(sys.field, rest, y + w);
    std::size_t r = 0;
    for (std::size_t e = 0; e < sys.eqs.size(); ++e) {
        if (used[e])
            continue;
        const Equation& eq = sys.eqs[e];
        for (std::size_t c = 0; c < w; ++c)
            if (Elem b = sys.rhs.get(e, c))
                core.set(r, y + c, b);
        for (std::size_t i = 0; i < eq.idx.size(); ++i)
            core.add_row_from(r, X, eq.idx[i], eq.coef_at(i));
        ++r;
    }

    std::vector<std::size_t> lhs(y), rhs(w);
    std::iota(lhs.begin(), lhs.end(), 0);
    std::iota(rhs.begin(), rhs.end(), y);
    auto rep = gaussian_solve(core.select_cols(lhs), core.select_cols(rhs));
    if (!rep.solution)
        return res;
    const FieldMatrix& z = *rep.solution;
    FieldMatrix sol(sys.field, n, w);
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t c = 0; c < w; ++c)
            if (Elem b = X.get(v, y + c))
                sol.set(v, c, b);
        for (std::size_t i = 0; i < y; ++i)
            if (Elem a = X.get(v, i))
                sol.add_row_from(v, z, i, a);
    }
    res.solution = std::move(sol);
    res.success = true;
    return res;
}

InactivationResult inactivation_decode(const SparseSystem& sys, Strategy strategy, Rng& rng)
{
    auto tri = triangulate(sys, strategy, rng);
    return solve_triangulated(sys, tri);
}

std::string trace_tsv(const std::vector<TraceStep>& trace)
{
    std::ostringstream os;
    os << "u\taction\tvariable\tripple\tcloud\n";
    for (const auto& s : trace)
        os << s.u << '\t' << (s.inactivation ? "inactivate" : "resolve") << '\t' << s.var << '\t' << s.ripple
           << '\t' << s.cloud << '\n';
    return os.str();
}

} // namespace fountain
