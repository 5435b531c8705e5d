#include "fountain/failure_bounds.hpp"

#include "fountain/mathutil.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fountain {

namespace {

// Omega with mass above h moved to h.
std::vector<double> fold(const DegreeDistribution& dist, int h)
{
    std::vector<double> w(static_cast<std::size_t>(h) + 1, 0.0);
    for (int d = 1; d <= dist.dmax(); ++d)
        w[static_cast<std::size_t>(std::min(d, h))] += dist[d];
    return w;
}

double log_or_inf(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

using quad = __float128;

quad qpow(quad x, long e)
{
    quad r = 1;
    while (e > 0) {
        if (e & 1)
            r *= x;
        x *= x;
        e >>= 1;
    }
    return r;
}

using I128 = __int128;
using Poly2 = std::vector<std::vector<I128>>; // [x degree][X degree]

Poly2 poly(int nx, int nX) { return Poly2(static_cast<std::size_t>(nx) + 1, std::vector<I128>(static_cast<std::size_t>(nX) + 1, 0)); }

Poly2 mul(const Poly2& a, const Poly2& b)
{
    Poly2 c = poly(static_cast<int>(a.size() + b.size()) - 2, static_cast<int>(a[0].size() + b[0].size()) - 2);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) {
            if (!a[i][j])
                continue;
            for (std::size_t u = 0; u < b.size(); ++u)
                for (std::size_t v = 0; v < b[u].size(); ++v)
                    c[i + u][j + v] += a[i][j] * b[u][v];
        }
    return c;
}

Poly2 power(const Poly2& base, int e)
{
    Poly2 r = poly(0, 0);
    r[0][0] = 1;
    for (int i = 0; i < e; ++i)
        r = mul(r, base);
    return r;
}

Poly2 add(Poly2 a, const Poly2& b, I128 sb)
{
    if (b.size() > a.size())
        a.resize(b.size(), std::vector<I128>(a[0].size(), 0));
    for (auto& row : a)
        if (row.size() < b[0].size())
            row.resize(b[0].size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b[i].size(); ++j)
            a[i][j] += sb * b[i][j];
    return a;
}

Poly2 lin(I128 c0, I128 cx, I128 cX, I128 cxX)
{
    Poly2 p = poly(1, 1);
    p[0][0] = c0;
    p[1][0] = cx;
    p[0][1] = cX;
    p[1][1] = cxX;
    return p;
}

} // namespace

double BoundCurve::at(double x) const
{
    require(!points.empty(), "bound curve has no points");
    if (x <= points.front().first)
        return points.front().second;
    auto interp = [](std::pair<double, double> a, std::pair<double, double> b, double x) {
        double t = (x - a.first) / (b.first - a.first);
        if (a.second > 0 && b.second > 0)
            return std::exp(std::log(a.second) + t * (std::log(b.second) - std::log(a.second)));
        return a.second + t * (b.second - a.second);
    };
    for (std::size_t i = 1; i < points.size(); ++i)
        if (x <= points[i].first)
            return interp(points[i - 1], points[i], x);
    if (points.size() == 1)
        return points.back().second;
    const auto& a = points[points.size() - 2];
    const auto& b = points.back();
    if (!(a.second > 0 && b.second > 0))
        return b.second <= 0 ? 0.0 : b.second;
    return std::min(1.0, interp(a, b, x));
}

Bracket lrfc_bounds(std::uint32_t q, int delta)
{
    require(delta >= 0, "overhead must be nonnegative");
    require(q >= 2, "field order must be at least 2");
    const double lq = std::log(static_cast<double>(q));
    return {std::exp(-(delta + 1) * lq), std::exp(-delta * lq) / (q - 1.0)};
}

double krawtchouk(int h, std::uint32_t q, int j, int l)
{
    long double s = 0.0L;
    for (int i = 0; i <= std::min(j, l); ++i) {
        if (j - i > h - l)
            continue;
        long double t = static_cast<long double>(binom(l, i)) * binom(h - l, j - i) *
                        std::pow(static_cast<long double>(q - 1), j - i);
        s += (i & 1) ? -t : t;
    }
    return static_cast<double>(s);
}

double krawtchouk_ratio_direct(int h, std::uint32_t q, int j, int l)
{
    require(j >= 0 && j <= h && l >= 0 && l <= h, "Krawtchouk index out of range");
    const double lq1 = std::log(q - 1.0);
    const double l0 = log_binom(h, j) + j * lq1;
    KahanSum s;
    for (int i = std::max(0, j - (h - l)); i <= std::min(j, l); ++i) {
        double t = std::exp(log_binom(l, i) + log_binom(h - l, j - i) + (j - i) * lq1 - l0);
        s.add((i & 1) ? -t : t);
    }
    return s.value();
}

KrawtchoukKernel::KrawtchoukKernel(int h, std::uint32_t q, int jmax) : h_(h), jmax_(std::min(jmax, h)), q_(q)
{
    require(h >= 1 && q >= 2 && jmax >= 0, "bad Krawtchouk kernel parameters");
    const std::size_t w = static_cast<std::size_t>(jmax_) + 1;
    r_.assign(w * (static_cast<std::size_t>(h) + 1), 0.0);
    const double qm = q - 1.0;
    // s_j(n) = K_j / (C(n,j)(q-1)^j) for (1 + (q-1)z)^(n-x) (1 - z)^x, grown one position at a time.
    // Both updates are contractions, unlike the three-term recurrence in j.
    std::vector<double> ones(w, 0.0), s(w);
    ones[0] = 1.0;
    for (int l = 0; l <= h; ++l) {
        if (l > 0)
            for (int j = std::min(l, jmax_); j >= 1; --j)
                ones[static_cast<std::size_t>(j)] =
                    (ones[static_cast<std::size_t>(j)] * (l - j) - ones[static_cast<std::size_t>(j - 1)] * j / qm) / l;
        s = ones;
        for (int n = l + 1; n <= h; ++n)
            for (int j = std::min(n, jmax_); j >= 1; --j)
                s[static_cast<std::size_t>(j)] =
                    (s[static_cast<std::size_t>(j)] * (n - j) + s[static_cast<std::size_t>(j - 1)] * j) / n;
        std::copy(s.begin(), s.end(), r_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(l) * w));
    }
}

double q_i(std::uint32_t q, int i)
{
    if (i == 0)
        return 1.0;
    const double sgn = (i & 1) ? -1.0 : 1.0;
    return (1.0 + sgn * std::pow(q - 1.0, 1 - i)) / q;
}

std::vector<double> pi_l(const DegreeDistribution& dist, const KrawtchoukKernel& kern)
{
    const int h = kern.h();
    auto w = fold(dist, h);
    require(kern.jmax() >= std::min(dist.dmax(), h), "kernel too short for the distribution");
    const double q = kern.q();
    std::vector<double> out(static_cast<std::size_t>(h) + 1);
    for (int l = 0; l <= h; ++l) {
        double s = 0.0;
        for (int j = 1; j <= std::min(dist.dmax(), h); ++j)
            if (w[static_cast<std::size_t>(j)] > 0)
                s += w[static_cast<std::size_t>(j)] * kern.ratio(j, l);
        out[static_cast<std::size_t>(l)] = std::clamp(1.0 / q + (q - 1.0) / q * s, 0.0, 1.0);
    }
    out[0] = 1.0;
    return out;
}

std::vector<double> pi_l(const DegreeDistribution& dist, int h, std::uint32_t q)
{
    return pi_l(dist, KrawtchoukKernel(h, q, std::min(dist.dmax(), h)));
}

std::vector<double> pi_l_dual(const DegreeDistribution& dist, int h, std::uint32_t q)
{
    auto w = fold(dist, h);
    std::vector<double> qi(static_cast<std::size_t>(h) + 1);
    for (int i = 0; i <= h; ++i)
        qi[static_cast<std::size_t>(i)] = q_i(q, i);
    std::vector<double> out(static_cast<std::size_t>(h) + 1, 0.0);
    for (int l = 0; l <= h; ++l) {
        double s = 0.0;
        for (int j = 1; j <= h; ++j) {
            if (w[static_cast<std::size_t>(j)] <= 0)
                continue;
            const double lc = log_binom(h, j);
            double inner = 0.0;
            for (int i = std::max(0, j - (h - l)); i <= std::min(j, l); ++i)
                inner += std::exp(log_binom(l, i) + log_binom(h - l, j - i) - lc) * qi[static_cast<std::size_t>(i)];
            s += w[static_cast<std::size_t>(j)] * inner;
        }
        out[static_cast<std::size_t>(l)] = s;
    }
    return out;
}

std::vector<double> raptor_upper_bound_curve(const WeightEnumerator& we, const DegreeDistribution& dist,
                                             std::uint32_t q, int k, const std::vector<int>& deltas, bool tight)
{
    const int h = we.n;
    require(h >= 1 && k >= 1, "bound needs h, k >= 1");
    auto pi = pi_l(dist, h, q);
    const double shift = tight ? std::log(q - 1.0) : 0.0;
    std::vector<double> out;
    std::vector<double> terms(static_cast<std::size_t>(h));
    for (int delta : deltas) {
        const double m = static_cast<double>(k) + delta;
        require(m >= 0, "fewer than zero received symbols");
        for (int l = 1; l <= h; ++l)
            terms[static_cast<std::size_t>(l - 1)] = we.log(l) - shift + m * log_or_inf(pi[static_cast<std::size_t>(l)]);
        out.push_back(std::exp(log_sum(terms)));
    }
    return out;
}

double raptor_upper_bound(const WeightEnumerator& we, const DegreeDistribution& dist, std::uint32_t q, int k,
                          int delta, bool tight)
{
    return raptor_upper_bound_curve(we, dist, q, k, {delta}, tight)[0];
}

double lt_upper_bound(const DegreeDistribution& dist, std::uint32_t q, int k, int delta)
{
    WeightEnumerator we;
    we.n = k;
    we.log_a.assign(static_cast<std::size_t>(k) + 1, 0.0);
    for (int l = 1; l <= k; ++l)
        we.log_a[static_cast<std::size_t>(l)] = log_binom(k, l) + l * std::log(q - 1.0);
    return raptor_upper_bound(we, dist, q, k, delta, true);
}

double lt_ml_lower_bound(int k, long m, const DegreeDistribution& dist)
{
    require(k >= 1 && m >= 0, "lower bound needs k >= 1, m >= 0");
    auto w = fold(dist, k);
    const int dm = std::min(dist.dmax(), k);
    std::vector<quad> f(static_cast<std::size_t>(dm) + 1, 1); // C(k-i,d)/C(k,d)
    quad c = 1, sum = 0, peak = 0, t1 = 0, t2 = 0, prev = 0;
    for (int i = 1; i <= k; ++i) {
        for (int d = 1; d <= dm; ++d) {
            const int num = k - (i - 1) - d;
            f[static_cast<std::size_t>(d)] = num <= 0 ? quad(0) : f[static_cast<std::size_t>(d)] * num / quad(k - (i - 1));
        }
        c = c * (k - i + 1) / i;
        quad x = 0;
        for (int d = 1; d <= dm; ++d)
            x += quad(w[static_cast<std::size_t>(d)]) * f[static_cast<std::size_t>(d)];
        const quad t = c * qpow(x, m);
        if (i == 1)
            t1 = t;
        if (i == 2)
            t2 = t;
        sum += (i & 1) ? t : -t;
        peak = std::max(peak, t);
        if (t == 0 || (i > 2 && t < prev && t < 1e-36 * std::max(quad(1e-300), sum)))
            break;
        prev = t;
    }
    // Beyond 30 digits of cancellation, fall back to the second-moment bound E[X]^2 / E[X^2].
    const bool lost = peak * 1e-30 > 1e-6 * (sum > 0 ? sum : quad(1)) || sum < -1e-9;
    double v = lost ? static_cast<double>(t1 * t1 / (t1 + 2 * t2)) : static_cast<double>(sum);
    return std::clamp(v, 0.0, 1.0);
}

double lt_ml_lower_bound(int k, double eps_rel, const DegreeDistribution& dist)
{
    return lt_ml_lower_bound(k, std::lround(k * (1.0 + eps_rel)), dist);
}

BlockBounds block_bounds(int n, int k, double eps, std::uint32_t q)
{
    require(k >= 0 && k <= n && eps >= 0 && eps <= 1, "block bounds need 0 <= k <= n, 0 <= eps <= 1");
    auto pmf = binom_pmf(n, eps);
    BlockBounds b;
    KahanSum s, corr;
    for (int e = n - k + 1; e <= n; ++e)
        s.add(pmf[static_cast<std::size_t>(e)]);
    for (int e = 1; e <= n - k; ++e)
        corr.add(pmf[static_cast<std::size_t>(e)] * std::pow(static_cast<double>(q), -(n - k - e)));
    b.singleton = s.value();
    b.berlekamp = s.value() + corr.value();
    return b;
}

double di_bound(const WeightEnumerator& we, int k, double eps, bool with_a0)
{
    const int n = we.n;
    auto pmf = binom_pmf(n, eps);
    KahanSum s;
    s.add(block_bounds(n, k, eps).singleton);
    std::vector<double> lt;
    for (int e = 1; e <= n - k; ++e) {
        lt.clear();
        for (int w = 1; w <= e; ++w)
            lt.push_back(log_binom(e, w) + we.log(w) - log_binom(n, w));
        s.add(pmf[static_cast<std::size_t>(e)] * std::min(1.0, std::exp(log_sum(lt))));
    }
    if (with_a0)
        s.add(we.a(0) - 1.0);
    return s.value();
}

double concat_q(int n_c, int k, double eps)
{
    require(k >= 0 && k <= n_c, "concatenation needs k <= n_c");
    auto pmf = binom_pmf(n_c, 1.0 - eps);
    KahanSum s;
    for (int i = k; i <= n_c; ++i)
        s.add(pmf[static_cast<std::size_t>(i)]);
    return s.value();
}

Bracket concat_bounds(int n_c, int k, std::uint32_t q, double eps, int delta)
{
    auto pmf = binom_pmf(n_c, 1.0 - eps);
    KahanSum p;
    for (int i = 0; i < k; ++i)
        p.add(pmf[static_cast<std::size_t>(i)]);
    auto b = lrfc_bounds(q, delta);
    return {p.value() * b.lower, p.value() * b.upper};
}

WeightEnumerator CoWef::enumerator() const
{
    std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
    for (const auto& row : a)
        for (std::size_t w = 0; w < row.size(); ++w)
            v[w] += row[w];
    return WeightEnumerator::from_values(v);
}

CoWef hamming_cowef(int t)
{
    require(t >= 2 && t <= 7, "Hamming CO-WEF supports 2 <= t <= 7");
    const int n = (1 << t) - 1, k = n - t, half = 1 << (t - 1);
    // 2^t (1-x)^(2^(t-1)-t) (1-xX)^t - (1-x)^(2^(t-1)) (1+X)^t + (1+x)^(2^(t-1)) (1+X)^t
    Poly2 one_m_x = lin(1, -1, 0, 0), one_p_x = lin(1, 1, 0, 0), one_m_xX = lin(1, 0, 0, -1), one_p_X = lin(1, 0, 1, 0);
    Poly2 a = mul(power(one_m_x, half - t), power(one_m_xX, t));
    for (auto& row : a)
        for (auto& v : row)
            v <<= t;
    Poly2 pX = power(one_p_X, t);
    Poly2 br = add(add(a, mul(power(one_m_x, half), pX), -1), mul(power(one_p_x, half), pX), 1);
    const int e = half - t - 1;
    if (e >= 0) {
        br = mul(br, power(one_p_x, e));
    } else {
        // exact division by (1 + x)
        Poly2 qt = poly(static_cast<int>(br.size()) - 2, static_cast<int>(br[0].size()) - 1);
        std::vector<I128> carry(br[0].size(), 0);
        for (std::size_t i = 0; i + 1 < br.size(); ++i)
            for (std::size_t j = 0; j < br[0].size(); ++j) {
                qt[i][j] = br[i][j] - carry[j];
                carry[j] = qt[i][j];
            }
        br = qt;
    }
    CoWef c;
    c.k = k;
    c.n = n;
    c.a.assign(static_cast<std::size_t>(k) + 1, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
    for (std::size_t i = 0; i < br.size() && i <= static_cast<std::size_t>(k); ++i)
        for (std::size_t j = 0; j < br[i].size() && j <= static_cast<std::size_t>(t); ++j)
            c.a[i][i + j] = static_cast<double>(br[i][j] >> t);
    return c;
}

CoWef cowef_from_generator(const FieldMatrix& g)
{
    const int k = static_cast<int>(g.rows()), n = static_cast<int>(g.cols());
    const std::uint32_t q = g.q();
    double words = std::pow(static_cast<double>(q), k);
    require(words <= 1 << 24, "generator too large to enumerate");
    CoWef c;
    c.k = k;
    c.n = n;
    c.a.assign(static_cast<std::size_t>(k) + 1, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
    const auto& f = g.field();
    std::vector<Elem> u(static_cast<std::size_t>(k), 0), v(static_cast<std::size_t>(n));
    for (long idx = 0; idx < static_cast<long>(words); ++idx) {
        long r = idx;
        int wi = 0;
        for (int i = 0; i < k; ++i) {
            u[static_cast<std::size_t>(i)] = static_cast<Elem>(r % q);
            r /= q;
            wi += u[static_cast<std::size_t>(i)] != 0;
        }
        int wo = 0;
        for (int j = 0; j < n; ++j) {
            Elem s = 0;
            for (int i = 0; i < k; ++i)
                if (u[static_cast<std::size_t>(i)])
                    s = f->add(s, f->mul(u[static_cast<std::size_t>(i)], g.get(static_cast<std::size_t>(i), static_cast<std::size_t>(j))));
            wo += s != 0;
        }
        c.a[static_cast<std::size_t>(wi)][static_cast<std::size_t>(wo)] += 1.0;
    }
    return c;
}

CoWef concat_cowef(const CoWef& pre, int h_c, std::uint32_t q)
{
    require(h_c >= 0, "tail length must be nonnegative");
    CoWef c;
    c.k = pre.k;
    c.n = pre.n + h_c;
    c.a.assign(static_cast<std::size_t>(c.k) + 1, std::vector<double>(static_cast<std::size_t>(c.n) + 1, 0.0));
    auto tail = binom_pmf(h_c, (q - 1.0) / q);
    for (int i = 0; i <= c.k; ++i) {
        const auto& src = pre.a[static_cast<std::size_t>(i)];
        auto& dst = c.a[static_cast<std::size_t>(i)];
        for (int w = 0; w <= pre.n; ++w) {
            const double v = src[static_cast<std::size_t>(w)];
            if (v == 0.0)
                continue;
            if (i == 0) {
                dst[static_cast<std::size_t>(w)] += v;
                continue;
            }
            for (int x = 0; x <= h_c; ++x)
                dst[static_cast<std::size_t>(w + x)] += v * tail[static_cast<std::size_t>(x)];
        }
    }
    return c;
}

double multicast_receiver_failure(int k, double eps, int Delta, const std::function<double(int)>& pf)
{
    require(k >= 1 && Delta >= -k, "multicast needs k >= 1 and k + Delta >= 0");
    const int sent = k + Delta;
    auto s = binom_pmf(sent, 1.0 - eps);
    KahanSum acc;
    for (int m = 0; m <= sent; ++m) {
        const double p = s[static_cast<std::size_t>(m)];
        if (p == 0.0)
            continue;
        acc.add(m < k ? p : p * std::clamp(pf(m - k), 0.0, 1.0));
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

double multicast_pe(long N, int k, double eps, int Delta, const std::function<double(int)>& pf)
{
    require(N >= 1, "need at least one receiver");
    const double p = multicast_receiver_failure(k, eps, Delta, pf);
    if (p >= 1.0)
        return 1.0;
    return std::clamp(-std::expm1(static_cast<double>(N) * std::log1p(-p)), 0.0, 1.0);
}

double multicast_pe(long N, int k, double eps, int Delta, const BoundCurve& pf_curve)
{
    return multicast_pe(N, k, eps, Delta, [&](int d) { return pf_curve.at(d); });
}

BoundCurve lrfc_curve(std::uint32_t q, int dmax, bool upper)
{
    BoundCurve c;
    c.kind = upper ? BoundKind::upper : BoundKind::lower;
    for (int d = 0; d <= dmax; ++d) {
        auto b = lrfc_bounds(q, d);
        c.points.push_back({static_cast<double>(d), std::min(1.0, upper ? b.upper : b.lower)});
    }
    return c;
}

BoundCurve concat_curve(int n_c, int k, std::uint32_t q, double eps, int dmax, bool upper)
{
    BoundCurve c;
    c.kind = upper ? BoundKind::upper : BoundKind::lower;
    for (int d = 0; d <= dmax; ++d) {
        auto b = concat_bounds(n_c, k, q, eps, d);
        c.points.push_back({static_cast<double>(d), std::min(1.0, upper ? b.upper : b.lower)});
    }
    return c;
}

std::string bound_tsv(const BoundCurve& curve, const std::vector<double>& mc, const std::vector<double>& mc_stderr)
{
    std::ostringstream os;
    os.precision(10);
    os << (curve.abscissa == Abscissa::overhead ? "delta" : "eps") << "\tbound\tmc\tmc_stderr\n";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        os << curve.points[i].first << '\t' << curve.points[i].second << '\t';
        if (i < mc.size())
            os << mc[i];
        os << '\t';
        if (i < mc_stderr.size())
            os << mc_stderr[i];
        os << '\n';
    }
    return os.str();
}

std::string cer_tsv(const std::vector<double>& eps, const std::vector<std::string>& names,
                    const std::vector<std::vector<double>>& columns)
{
    require(names.size() == columns.size(), "one name per column");
    std::ostringstream os;
    os.precision(10);
    os << "eps";
    for (const auto& n : names)
        os << '\t' << n;
    os << '\n';
    for (std::size_t i = 0; i < eps.size(); ++i) {
        os << eps[i];
        for (const auto& col : columns)
            os << '\t' << (i < col.size() ? col[i] : 0.0);
        os << '\n';
    }
    return os.str();
}

} // namespace fountain
