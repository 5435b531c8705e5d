#include "fountain/raptor.hpp"
#include "fountain/mathutil.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <sstream>

namespace fountain {

namespace {

const std::pair<PrecodeKind, const char*> kKindNames[] = {
    {PrecodeKind::linear_random, "linear-random"}, {PrecodeKind::hamming, "hamming"},
    {PrecodeKind::spc, "spc"},                     {PrecodeKind::grs, "grs"},
    {PrecodeKind::r10_style, "r10-style"},         {PrecodeKind::explicit_matrix, "explicit"},
};

bool is_prime(std::size_t n)
{
    if (n < 2)
        return false;
    for (std::size_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

Equation row_equation(const FieldMatrix& m, std::size_t r)
{
    Equation e;
    bool ones = true;
    for (std::size_t c = 0; c < m.cols(); ++c)
        if (Elem v = m.get(r, c)) {
            e.idx.push_back(static_cast<std::uint32_t>(c));
            e.coef.push_back(v);
            ones = ones && v == 1;
        }
    if (ones)
        e.coef.clear();
    return e;
}

} // namespace

const char* precode_kind_name(PrecodeKind k)
{
    for (auto& [kind, name] : kKindNames)
        if (kind == k)
            return name;
    return "?";
}

PrecodeKind parse_precode_kind(const std::string& s)
{
    for (auto& [kind, name] : kKindNames)
        if (s == name)
            return kind;
    fail(Errc::invalid_argument, "unknown precode kind: " + s);
}

void Precode::finish()
{
    require(G.rows() == k && G.cols() == h, "generator shape mismatch");
    require(H.cols() == h, "parity-check shape mismatch");
    require((G * H.transpose()).is_zero(), "G H^T must vanish");
    h_rows.clear();
    theta.clear();
    for (std::size_t r = 0; r < H.rows(); ++r) {
        h_rows.push_back(row_equation(H, r));
        theta[h_rows.back().idx.size()] += 1.0 / static_cast<double>(H.rows());
    }
    auto rep = gaussian_solve(G, FieldMatrix(G.field(), k, 0));
    require(rep.rank == k, "generator must have full row rank");
    info_ = rep.pivots;
    bool ident = true;
    for (std::size_t i = 0; i < k && ident; ++i)
        ident = info_[i] == i;
    if (ident)
        for (std::size_t r = 0; r < k && ident; ++r)
            for (std::size_t c = 0; c < k && ident; ++c)
                ident = G.get(r, c) == (r == c ? 1 : 0);
    info_inv_ = ident ? FieldMatrix() : *inverse(G.select_cols(info_).transpose());
}

FieldMatrix Precode::encode(const FieldMatrix& u) const
{
    require(u.rows() == k, "precode input must have k symbols");
    FieldMatrix v(u.field(), h, u.cols());
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < h; ++c)
            if (Elem x = G.get(r, c))
                v.add_row_from(c, u, r, x);
    return v;
}

bool Precode::is_codeword(const FieldMatrix& v) const
{
    require(v.rows() == h, "codeword must have h symbols");
    return (H * v).is_zero();
}

std::optional<FieldMatrix> Precode::unencode(const FieldMatrix& v) const
{
    if (!is_codeword(v))
        return std::nullopt;
    FieldMatrix vs = v.select_rows(info_);
    if (info_inv_.rows() == 0)
        return vs;
    return info_inv_ * vs;
}

Column Precode::generator_column(std::size_t i) const
{
    return row_equation(G.transpose().select_rows({i}), 0);
}

std::string Precode::dump() const
{
    nlohmann::json j{{"kind", precode_kind_name(kind)}, {"k", k}, {"h", h}, {"q", G.q()}};
    if (kind == PrecodeKind::r10_style) {
        j["s"] = s;
        j["hp"] = hp;
    }
    return j.dump() + "\n" + G.dump() + H.dump();
}

Precode Precode::parse(const std::string& text)
{
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(header);
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::parse_error, std::string("bad precode header: ") + e.what());
    }
    Precode p;
    p.kind = parse_precode_kind(j.value("kind", "explicit"));
    p.k = j.at("k").get<std::size_t>();
    p.h = j.at("h").get<std::size_t>();
    p.s = j.value("s", std::size_t{0});
    p.hp = j.value("hp", std::size_t{0});
    std::string line, gtext, htext;
    std::getline(in, line);
    gtext = line + "\n";
    std::size_t rows = 0;
    std::istringstream(line) >> rows;
    for (std::size_t i = 0; i < rows && std::getline(in, line); ++i)
        gtext += line + "\n";
    htext.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    p.G = FieldMatrix::parse(gtext);
    p.H = FieldMatrix::parse(htext);
    p.finish();
    return p;
}

FieldMatrix generator_from_parity(const FieldMatrix& h, std::size_t k)
{
    const std::size_t n = h.cols();
    require(k <= n && h.rows() == n - k, "parity-check shape mismatch");
    std::vector<std::size_t> acols, pcols;
    for (std::size_t c = 0; c < n; ++c)
        (c < k ? acols : pcols).push_back(c);
    if (auto pinv = inverse(h.select_cols(pcols))) {
        FieldMatrix b = (*pinv * h.select_cols(acols)).transpose();
        return FieldMatrix::identity(h.field(), k).hstack(b);
    }
    FieldMatrix ns = nullspace(h);
    std::vector<std::size_t> keep(k);
    for (std::size_t i = 0; i < k; ++i)
        keep[i] = i;
    return ns.select_rows(keep);
}

Precode linear_random_precode(std::size_t k, std::size_t h, FieldPtr f, Rng& rng)
{
    require(k >= 1 && h >= k, "linear random precode needs 1 <= k <= h");
    Precode p;
    p.kind = PrecodeKind::linear_random;
    p.k = k;
    p.h = h;
    p.H = FieldMatrix::random(f, h - k, h, rng);
    p.G = generator_from_parity(p.H, k);
    p.finish();
    return p;
}

Precode hamming_precode(int t)
{
    require(t >= 2 && t <= 16, "Hamming precode needs 2 <= t <= 16");
    const std::size_t n = (std::size_t{1} << t) - 1, k = n - static_cast<std::size_t>(t);
    auto f = gf(1);
    Precode p;
    p.kind = PrecodeKind::hamming;
    p.k = k;
    p.h = n;
    p.H = FieldMatrix(f, static_cast<std::size_t>(t), n);
    p.G = FieldMatrix(f, k, n);
    std::size_t j = 0;
    for (std::size_t x = 1; x <= n; ++x) {
        if (std::popcount(x) < 2)
            continue;
        for (int b = 0; b < t; ++b)
            if (x >> b & 1u) {
                p.H.set(static_cast<std::size_t>(b), j, 1);
                p.G.set(j, k + static_cast<std::size_t>(b), 1);
            }
        p.G.set(j, j, 1);
        ++j;
    }
    for (int b = 0; b < t; ++b)
        p.H.set(static_cast<std::size_t>(b), k + static_cast<std::size_t>(b), 1);
    p.finish();
    return p;
}

Precode spc_precode(std::size_t k)
{
    require(k >= 1, "SPC precode needs k >= 1");
    auto f = gf(1);
    Precode p;
    p.kind = PrecodeKind::spc;
    p.k = k;
    p.h = k + 1;
    p.H = FieldMatrix(f, 1, k + 1);
    p.G = FieldMatrix(f, k, k + 1);
    for (std::size_t c = 0; c <= k; ++c)
        p.H.set(0, c, 1);
    for (std::size_t r = 0; r < k; ++r) {
        p.G.set(r, r, 1);
        p.G.set(r, k, 1);
    }
    p.finish();
    return p;
}

Precode grs_precode(std::size_t k, std::size_t n_c, FieldPtr f)
{
    require(k >= 1 && n_c >= k, "GRS precode needs 1 <= k <= n_c");
    require(n_c <= f->q() - 1, "GRS precode needs n_c <= q - 1 distinct nonzero points");
    Precode p;
    p.kind = PrecodeKind::grs;
    p.k = k;
    p.h = n_c;
    p.G = FieldMatrix(f, k, n_c);
    for (std::size_t j = 0; j < n_c; ++j) {
        auto x = static_cast<Elem>(j + 1);
        Elem v = 1;
        for (std::size_t i = 0; i < k; ++i) {
            p.G.set(i, j, v);
            v = f->mul(v, x);
        }
    }
    p.H = n_c > k ? nullspace(p.G) : FieldMatrix(f, 0, n_c);
    p.finish();
    return p;
}

R10Sizes r10_sizes(std::size_t k)
{
    require(k >= 1, "k must be positive");
    std::size_t x = 2;
    while (x * (x - 1) < 2 * k)
        ++x;
    R10Sizes r;
    r.s = (k + 99) / 100 + x;
    while (!is_prime(r.s))
        ++r.s;
    r.hp = 1;
    while (binom(static_cast<long>(r.hp), static_cast<long>((r.hp + 1) / 2)) < static_cast<double>(k + r.s))
        ++r.hp;
    return r;
}

Precode r10_precode(std::size_t k)
{
    auto [s, hp] = r10_sizes(k);
    auto f = gf(1);
    Precode p;
    p.kind = PrecodeKind::r10_style;
    p.k = k;
    p.s = s;
    p.hp = hp;
    p.h = k + s + hp;
    p.H = FieldMatrix(f, s + hp, p.h);
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t a = 1 + (j / s) % (s - 1), b = j % s;
        p.H.set(b, j, 1);
        p.H.set((b + a) % s, j, 1);
        p.H.set((b + 2 * a) % s, j, 1);
    }
    for (std::size_t i = 0; i < s; ++i)
        p.H.set(i, k + i, 1);
    // Gray codes of weight ceil(hp/2), taken at an even stride so every row gets about half
    const int half = static_cast<int>((hp + 1) / 2);
    std::vector<std::uint64_t> codes;
    for (std::uint64_t g = 0; g < (std::uint64_t{1} << hp); ++g)
        if (std::popcount(g ^ (g >> 1)) == half)
            codes.push_back(g ^ (g >> 1));
    for (std::size_t j = 0; j < k + s; ++j) {
        std::uint64_t code = codes[j * codes.size() / (k + s)];
        for (std::size_t r = 0; r < hp; ++r)
            if (code >> r & 1u)
                p.H.set(s + r, j, 1);
    }
    for (std::size_t r = 0; r < hp; ++r)
        p.H.set(s + r, k + s + r, 1);
    p.G = generator_from_parity(p.H, k);
    p.finish();
    return p;
}

Precode explicit_precode(const FieldMatrix& g)
{
    Precode p;
    p.kind = PrecodeKind::explicit_matrix;
    p.k = g.rows();
    p.h = g.cols();
    p.G = g;
    p.H = nullspace(g);
    p.finish();
    return p;
}

Precode build_precode(const PrecodeParams& prm, Rng& rng)
{
    switch (prm.kind) {
    case PrecodeKind::linear_random:
        return linear_random_precode(prm.k, prm.n, gf(prm.m), rng);
    case PrecodeKind::hamming: {
        int t = 2;
        while (t < 16 && (std::size_t{1} << t) - 1 < prm.n)
            ++t;
        require((std::size_t{1} << t) - 1 == prm.n, "Hamming precode needs n = 2^t - 1");
        require(prm.k == 0 || prm.k == prm.n - static_cast<std::size_t>(t), "Hamming precode needs k = n - t");
        return hamming_precode(t);
    }
    case PrecodeKind::spc:
        require(prm.n == 0 || prm.n == prm.k + 1, "SPC precode needs n = k + 1");
        return spc_precode(prm.k);
    case PrecodeKind::grs:
        return grs_precode(prm.k, prm.n, gf(prm.m));
    case PrecodeKind::r10_style:
        return r10_precode(prm.k);
    case PrecodeKind::explicit_matrix:
        break;
    }
    fail(Errc::invalid_argument, "explicit precodes are built from a matrix");
}

RaptorEncoded raptor_encode(const FieldMatrix& src, const Precode& pre, const DegreeDistribution& dist, std::size_t n,
                            Rng& rng)
{
    RaptorEncoded r;
    r.intermediate = pre.encode(src);
    r.out.columns.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        r.out.columns.push_back(lt_column(dist, pre.h, rng));
    r.out.symbols = apply_columns(r.intermediate, r.out.columns);
    return r;
}

SparseSystem constraint_system(const Precode& pre, const std::vector<Column>& cols, const FieldMatrix& values)
{
    require(cols.size() == values.rows(), "one value per received column");
    SparseSystem sys;
    sys.field = pre.field();
    sys.nvars = pre.h;
    sys.eqs.reserve(pre.h_rows.size() + cols.size());
    sys.eqs = pre.h_rows;
    sys.eqs.insert(sys.eqs.end(), cols.begin(), cols.end());
    sys.rhs = FieldMatrix(pre.field(), pre.h_rows.size() + cols.size(), values.cols());
    for (std::size_t i = 0; i < cols.size(); ++i)
        sys.rhs.add_row_from(pre.h_rows.size() + i, values, i);
    return sys;
}

RaptorDecodeResult raptor_decode(const Precode& pre, const std::vector<Column>& cols, const FieldMatrix& values,
                                 std::optional<Strategy> strategy, Rng& rng)
{
    RaptorDecodeResult res;
    auto sys = constraint_system(pre, cols, values);
    if (strategy) {
        auto r = inactivation_decode(sys, *strategy, rng);
        res.inactivations = r.inactivations;
        res.intermediate = std::move(r.solution);
    } else {
        res.intermediate = gaussian_solve(sys.dense(), sys.rhs).solution;
    }
    if (res.intermediate) {
        res.source = pre.unencode(*res.intermediate);
        res.success = res.source.has_value();
    }
    return res;
}

SystematicRaptor SystematicRaptor::make(const Precode& pre, const DegreeDistribution& dist, std::uint64_t seed,
                                        int budget)
{
    SystematicRaptor s;
    s.pre_ = pre;
    s.dist_ = dist;
    for (int a = 0; a < budget; ++a) {
        s.seed_ = splitmix64(seed + static_cast<std::uint64_t>(a));
        s.attempts_ = a + 1;
        s.g1_.clear();
        for (std::size_t i = 0; i < pre.k; ++i)
            s.g1_.push_back(s.column(i));
        // F^T has row i = (G_p times column i)^T
        FieldMatrix ft = apply_columns(pre.G.transpose(), s.g1_);
        if (auto inv = inverse(ft)) {
            s.ft_inv_ = std::move(*inv);
            return s;
        }
    }
    fail(Errc::construction_failed, "no invertible G_p G_LT,1 within the retry budget");
}

Column SystematicRaptor::column(std::size_t i) const
{
    if (i < g1_.size())
        return g1_[i];
    Rng r = Rng::stream(seed_, i);
    return lt_column(dist_, pre_.h, r);
}

FieldMatrix SystematicRaptor::intermediate(const FieldMatrix& src) const
{
    require(src.rows() == pre_.k, "source must have k symbols");
    return pre_.encode(ft_inv_ * src);
}

FieldMatrix SystematicRaptor::encode(const FieldMatrix& src, std::size_t n) const
{
    FieldMatrix v = intermediate(src);
    std::vector<Column> cols;
    cols.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        cols.push_back(column(i));
    return apply_columns(v, cols);
}

RaptorDecodeResult SystematicRaptor::decode(const std::vector<std::size_t>& indices, const FieldMatrix& values,
                                            std::optional<Strategy> strategy, Rng& rng) const
{
    std::vector<Column> cols;
    cols.reserve(indices.size());
    for (auto i : indices)
        cols.push_back(column(i));
    auto res = raptor_decode(pre_, cols, values, strategy, rng);
    if (res.intermediate)
        res.source = apply_columns(*res.intermediate, g1_);
    res.success = res.source.has_value();
    return res;
}

ConcatScheme::ConcatScheme(Precode pre, std::uint64_t seed) : pre_(std::move(pre)), seed_(seed)
{
    FieldMatrix gt = pre_.G.transpose();
    for (std::size_t i = 0; i < pre_.h; ++i)
        prefix_.push_back(row_equation(gt, i));
}

Column ConcatScheme::column(std::size_t i) const
{
    if (i < prefix_.size())
        return prefix_[i];
    Rng r = Rng::stream(seed_, i);
    return lrfc_column(*pre_.field(), pre_.k, r);
}

FieldMatrix ConcatScheme::encode(const FieldMatrix& src, std::size_t l) const
{
    require(l >= n_c(), "output length must cover the precode (no shortening)");
    require(src.rows() == pre_.k, "source must have k symbols");
    std::vector<Column> cols;
    cols.reserve(l);
    for (std::size_t i = 0; i < l; ++i)
        cols.push_back(column(i));
    return apply_columns(src, cols);
}

std::optional<FieldMatrix> ConcatScheme::decode(const std::vector<std::size_t>& indices, const FieldMatrix& values) const
{
    ReceivedSet rx;
    rx.k = pre_.k;
    for (auto i : indices)
        rx.columns.push_back(column(i));
    rx.values = values;
    return ml_decode(rx);
}

bool ConcatScheme::decodable(const std::vector<std::size_t>& indices) const
{
    if (indices.size() < pre_.k)
        return false;
    SparseSystem sys(pre_.field(), pre_.k);
    for (auto i : indices)
        sys.eqs.push_back(column(i));
    return rank(sys.dense()) == pre_.k;
}

} // namespace fountain
