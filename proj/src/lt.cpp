#include "fountain/lt.hpp"

#include <algorithm>

namespace fountain {

SparseSystem ReceivedSet::system() const
{
    SparseSystem sys;
    sys.field = values.field();
    sys.nvars = k;
    sys.eqs = columns;
    sys.rhs = values;
    return sys;
}

FieldMatrix ReceivedSet::dense() const { return system().dense(); }

std::vector<std::uint32_t> choose_distinct(std::size_t k, std::size_t d, Rng& rng)
{
    require(d <= k, "cannot choose more distinct inputs than exist");
    std::vector<std::uint32_t> out;
    out.reserve(d);
    if (d * d <= 4 * k) {
        for (std::size_t j = k - d; j < k; ++j) {
            auto t = static_cast<std::uint32_t>(rng.below(j + 1));
            if (std::find(out.begin(), out.end(), t) != out.end())
                t = static_cast<std::uint32_t>(j);
            out.push_back(t);
        }
    } else {
        std::vector<char> mark(k, 0);
        for (std::size_t j = k - d; j < k; ++j) {
            auto t = static_cast<std::uint32_t>(rng.below(j + 1));
            if (mark[t])
                t = static_cast<std::uint32_t>(j);
            mark[t] = 1;
            out.push_back(t);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Column lt_column(const DegreeDistribution& dist, std::size_t k, Rng& rng)
{
    require(k >= 1, "LT columns need k >= 1");
    Column c;
    // degrees above k are clamped
    auto d = std::min(static_cast<std::size_t>(dist.sample(rng)), k);
    c.idx = choose_distinct(k, d, rng);
    return c;
}

Column lrfc_column(const Field& f, std::size_t k, Rng& rng)
{
    Column c;
    const std::uint32_t q = f.q();
    if (q == 2) {
        for (std::size_t i = 0; i < k; i += 64) {
            std::uint64_t bits = rng.next();
            for (std::size_t b = 0; b < 64 && i + b < k; ++b)
                if (bits >> b & 1u)
                    c.idx.push_back(static_cast<std::uint32_t>(i + b));
        }
        return c;
    }
    for (std::size_t i = 0; i < k; ++i) {
        auto v = static_cast<Elem>(rng.below(q));
        if (v) {
            c.idx.push_back(static_cast<std::uint32_t>(i));
            c.coef.push_back(v);
        }
    }
    return c;
}

FieldMatrix apply_columns(const FieldMatrix& src, const std::vector<Column>& cols)
{
    FieldMatrix out(src.field(), cols.size(), src.cols());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < cols[j].idx.size(); ++i) {
            require(cols[j].idx[i] < src.rows(), "column references a missing input");
            out.add_row_from(j, src, cols[j].idx[i], cols[j].coef_at(i));
        }
    return out;
}

Encoded lt_encode(const FieldMatrix& src, const DegreeDistribution& dist, std::size_t n, Rng& rng)
{
    require(src.rows() >= 1, "LT encoding needs k >= 1");
    Encoded e;
    e.columns.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        e.columns.push_back(lt_column(dist, src.rows(), rng));
    e.symbols = apply_columns(src, e.columns);
    return e;
}

Encoded lrfc_encode(const FieldMatrix& src, std::size_t n, Rng& rng)
{
    require(src.rows() >= 1, "LRFC encoding needs k >= 1");
    Encoded e;
    e.columns.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        e.columns.push_back(lrfc_column(*src.field(), src.rows(), rng));
    e.symbols = apply_columns(src, e.columns);
    return e;
}

ReceivedSet receive(const Encoded& enc, std::size_t k, const std::vector<std::size_t>& indices)
{
    ReceivedSet rx;
    rx.k = k;
    std::vector<std::size_t> rows;
    for (auto i : indices) {
        require(i < enc.columns.size(), "received index out of range");
        rx.columns.push_back(enc.columns[i]);
    }
    rx.values = enc.symbols.select_rows(indices);
    return rx;
}

PeelResult peel_decode(const ReceivedSet& rx, Rng& rng)
{
    PeelResult res;
    auto sys = rx.system();
    sys.validate();
    auto tri = triangulate(sys, Strategy::random, rng, true);
    for (auto [e, v] : tri.pivots)
        res.trace.resolved.push_back(v);
    for (const auto& s : tri.trace)
        res.trace.ripple.push_back(s.ripple);
    if (!tri.complete) {
        // the step that found the ripple empty
        res.trace.ripple.push_back(0);
        return res;
    }
    auto sol = solve_triangulated(sys, tri);
    res.trace.success = sol.success;
    res.recovered = std::move(sol.solution);
    return res;
}

std::optional<FieldMatrix> ml_decode(const ReceivedSet& rx)
{
    if (rx.k == 0)
        return FieldMatrix(rx.values.field(), 0, rx.values.cols());
    auto rep = gaussian_solve(rx.dense(), rx.values);
    return rep.solution;
}

SystematicLt SystematicLt::make(const DegreeDistribution& dist, std::size_t k, FieldPtr f, std::uint64_t seed,
                                int budget)
{
    require(k >= 1, "systematic LT needs k >= 1");
    SystematicLt s;
    s.dist_ = dist;
    s.k_ = k;
    s.f_ = std::move(f);
    for (int a = 0; a < budget; ++a) {
        s.seed_ = splitmix64(seed + static_cast<std::uint64_t>(a));
        s.g1_.clear();
        for (std::size_t i = 0; i < k; ++i) {
            Rng r = Rng::stream(s.seed_, i);
            s.g1_.push_back(lt_column(dist, k, r));
        }
        SparseSystem sys(s.f_, k);
        sys.eqs = s.g1_;
        auto inv = inverse(sys.dense());
        s.attempts_ = a + 1;
        if (inv) {
            s.g1t_inv_ = std::move(*inv);
            return s;
        }
    }
    fail(Errc::construction_failed, "no full-rank G1 within the retry budget");
}

Column SystematicLt::column(std::size_t i) const
{
    if (i < k_)
        return g1_[i];
    Rng r = Rng::stream(seed_, i);
    return lt_column(dist_, k_, r);
}

FieldMatrix SystematicLt::intermediate(const FieldMatrix& src) const
{
    require(src.rows() == k_, "source must have k symbols");
    return g1t_inv_ * src;
}

FieldMatrix SystematicLt::encode(const FieldMatrix& src, std::size_t n) const
{
    FieldMatrix w = intermediate(src);
    std::vector<Column> cols;
    cols.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        cols.push_back(column(i));
    return apply_columns(w, cols);
}

std::optional<FieldMatrix> SystematicLt::decode(const std::vector<std::size_t>& indices,
                                                const FieldMatrix& values) const
{
    ReceivedSet rx;
    rx.k = k_;
    for (auto i : indices)
        rx.columns.push_back(column(i));
    rx.values = values;
    auto w = ml_decode(rx);
    if (!w)
        return std::nullopt;
    return apply_columns(*w, g1_);
}

} // namespace fountain
