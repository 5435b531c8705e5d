#include "fountain/spectra.hpp"

#include "fountain/common.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fountain {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double log2_safe(double x) { return x > 0.0 ? std::log2(x) : kNegInf; }

std::vector<double> folded_probs(const DegreeDistribution& dist, int h)
{
    std::vector<double> w(static_cast<std::size_t>(std::min(dist.dmax(), h)) + 1, 0.0);
    for (int d = 1; d <= dist.dmax(); ++d)
        w[static_cast<std::size_t>(std::min(d, h))] += dist[d];
    return w;
}

double objective(const DegreeDistribution& dist, double r_i, double delta, double lambda)
{
    double r = rho(dist, lambda);
    double v = r_i * hb(lambda);
    if (delta > 0.0)
        v += delta * log2_safe(r);
    if (delta < 1.0)
        v += (1.0 - delta) * log2_safe(1.0 - r);
    return v;
}

// golden section on [a, b]
LambdaMax refine(const DegreeDistribution& dist, double r_i, double delta, double a, double b)
{
    const double g = 0.61803398874989484820;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = objective(dist, r_i, delta, c), fd = objective(dist, r_i, delta, d);
    for (int it = 0; it < 300 && b - a > 1e-12 * b; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = objective(dist, r_i, delta, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = objective(dist, r_i, delta, d);
        }
    }
    return fc >= fd ? LambdaMax{c, fc} : LambdaMax{d, fd};
}

const std::vector<double>& lambda_grid()
{
    static const std::vector<double> grid = [] {
        std::vector<double> g;
        for (int i = 0; i <= 700; ++i)
            g.push_back(std::pow(10.0, -15.0 + 15.0 * i / 700.0) * 0.5);
        for (int i = 1; i < 400; ++i)
            g.push_back(0.5 + 0.5 * i / 400.0);
        g.push_back(1.0 - 1e-9);
        return g;
    }();
    return grid;
}

} // namespace

WeightEnumerator WeightEnumerator::from_values(const std::vector<double>& a)
{
    require(!a.empty(), "weight enumerator needs at least A_0");
    WeightEnumerator we;
    we.n = static_cast<int>(a.size()) - 1;
    for (double v : a) {
        require(v >= 0.0, "weight enumerator coefficients must be nonnegative");
        we.log_a.push_back(v > 0.0 ? std::log(v) : kNegInf);
    }
    return we;
}

std::vector<double> WeightEnumerator::values() const
{
    std::vector<double> v;
    for (double l : log_a)
        v.push_back(std::exp(l));
    return v;
}

double WeightEnumerator::total_log() const { return log_sum(log_a); }

WeightEnumerator we_linear_random(int h, int k, std::uint32_t q)
{
    require(h >= k && k >= 0, "linear random enumerator needs h >= k >= 0");
    require(q >= 2, "field order must be at least 2");
    WeightEnumerator we;
    we.n = h;
    we.log_a.assign(static_cast<std::size_t>(h) + 1, 0.0);
    const double red = (h - k) * std::log(static_cast<double>(q)), lq1 = std::log(q - 1.0);
    for (int l = 1; l <= h; ++l)
        we.log_a[static_cast<std::size_t>(l)] = log_binom(h, l) - red + l * lq1;
    return we;
}

WeightEnumerator we_hamming(int t)
{
    require(t >= 2 && t <= 16, "Hamming enumerator needs 2 <= t <= 16");
    const int n = (1 << t) - 1;
    std::vector<double> a(static_cast<std::size_t>(n) + 1, 0.0);
    if (t <= 7) {
        std::vector<__int128> x(static_cast<std::size_t>(n) + 2, 0);
        std::vector<__int128> c(static_cast<std::size_t>(n) + 1, 0);
        c[0] = 1;
        for (int i = 1; i <= n; ++i)
            c[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i - 1)] * (n - i + 1) / i;
        x[0] = 1;
        // (i+1) A_{i+1} = C(n,i) - A_i - (n-i+1) A_{i-1}
        for (int i = 0; i < n; ++i) {
            __int128 prev = i ? x[static_cast<std::size_t>(i - 1)] : 0;
            x[static_cast<std::size_t>(i + 1)] =
                (c[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)] - (n - i + 1) * prev) / (i + 1);
        }
        for (int i = 0; i <= n; ++i)
            a[static_cast<std::size_t>(i)] = static_cast<double>(x[static_cast<std::size_t>(i)]);
    } else {
        std::vector<long double> x(static_cast<std::size_t>(n) + 2, 0.0L);
        x[0] = 1.0L;
        for (int i = 0; i < n; ++i) {
            long double prev = i ? x[static_cast<std::size_t>(i - 1)] : 0.0L;
            long double ci = std::exp(static_cast<long double>(log_binom(n, i)));
            x[static_cast<std::size_t>(i + 1)] = std::max(
                0.0L, (ci - x[static_cast<std::size_t>(i)] - (n - i + 1) * prev) / (i + 1));
        }
        for (int i = 0; i <= n; ++i)
            a[static_cast<std::size_t>(i)] = static_cast<double>(x[static_cast<std::size_t>(i)]);
    }
    return WeightEnumerator::from_values(a);
}

double pjl(int h, int j, int l)
{
    require(j >= 0 && j <= h && l >= 0 && l <= h, "pjl needs 0 <= j, l <= h");
    const double lc = log_binom(h, l);
    double s = 0.0;
    for (int i = std::max(1, l + j - h); i <= std::min(l, j); ++i)
        if (i & 1)
            s += std::exp(log_binom(j, i) + log_binom(h - j, l - i) - lc);
    return s;
}

double pjl_dual(int h, int j, int l)
{
    require(j >= 0 && j <= h && l >= 0 && l <= h, "pjl needs 0 <= j, l <= h");
    const double lc = log_binom(h, j);
    double s = 0.0;
    for (int i = std::max(1, l + j - h); i <= std::min(l, j); ++i)
        if (i & 1)
            s += std::exp(log_binom(l, i) + log_binom(h - l, j - i) - lc);
    return s;
}

std::vector<double> p_l(const DegreeDistribution& dist, int h)
{
    require(h >= 1, "p_l needs h >= 1");
    auto w = folded_probs(dist, h);
    std::vector<double> p(static_cast<std::size_t>(h) + 1, 0.0);
    for (int l = 1; l <= h; ++l) {
        double s = 0.0;
        for (std::size_t j = 1; j < w.size(); ++j)
            if (w[j] > 0.0)
                s += w[j] * pjl(h, static_cast<int>(j), l);
        p[static_cast<std::size_t>(l)] = std::clamp(s, 0.0, 1.0);
    }
    return p;
}

WeightEnumerator raptor_ensemble_we_exact(const DegreeDistribution& dist, int h, double redundancy, int n)
{
    require(n >= 1 && h >= 1, "ensemble enumerator needs n, h >= 1");
    require(redundancy >= 0.0, "outer redundancy must be nonnegative");
    auto p = p_l(dist, h);
    std::vector<double> lp(p.size()), lq(p.size()), lc(p.size());
    for (std::size_t l = 1; l < p.size(); ++l) {
        lp[l] = p[l] > 0.0 ? std::log(p[l]) : kNegInf;
        lq[l] = p[l] < 1.0 ? std::log1p(-p[l]) : kNegInf;
        lc[l] = log_binom(h, static_cast<long>(l));
    }
    const double red = redundancy * kLn2;
    WeightEnumerator we;
    we.n = n;
    we.log_a.assign(static_cast<std::size_t>(n) + 1, kNegInf);
    std::vector<double> terms(static_cast<std::size_t>(h));
    for (int d = 0; d <= n; ++d) {
        for (int l = 1; l <= h; ++l) {
            auto li = static_cast<std::size_t>(l);
            double a = d ? d * lp[li] : 0.0;
            double b = n - d ? (n - d) * lq[li] : 0.0;
            if (d && lp[li] == kNegInf)
                a = kNegInf;
            if (n - d && lq[li] == kNegInf)
                b = kNegInf;
            terms[li - 1] = lc[li] + a + b;
        }
        double s = log_sum(terms) - red;
        if (d == 0)
            we.log_a[0] = log_add(0.0, s);
        else
            we.log_a[static_cast<std::size_t>(d)] = log_binom(n, d) + s;
    }
    return we;
}

WeightEnumerator raptor_ensemble_we(const DegreeDistribution& dist, double r_i, double r_o, int n)
{
    require(r_i > 0.0 && r_o > 0.0 && r_o <= 1.0, "rates must lie in (0, 1]");
    int h = static_cast<int>(std::lround(r_i * n));
    require(h >= 1, "r_i n rounds to zero");
    return raptor_ensemble_we_exact(dist, h, h * (1.0 - r_o), n);
}

double rho(const DegreeDistribution& dist, double lambda)
{
    double s = 0.0;
    const double x = 1.0 - 2.0 * lambda;
    for (int j = 1; j <= dist.dmax(); ++j) {
        double o = dist[j];
        if (o == 0.0)
            continue;
        double t = lambda < 0.5 ? -std::expm1(j * std::log1p(-2.0 * lambda)) : 1.0 - std::pow(x, j);
        s += o * t;
    }
    return 0.5 * s;
}

double rho_prime(const DegreeDistribution& dist, double lambda)
{
    double s = 0.0;
    const double x = 1.0 - 2.0 * lambda;
    for (int j = 1; j <= dist.dmax(); ++j)
        s += dist[j] * j * std::pow(x, j - 1);
    return s;
}

bool has_even_mass(const DegreeDistribution& dist)
{
    for (int j = 2; j <= dist.dmax(); j += 2)
        if (dist[j] > 0.0)
            return true;
    return false;
}

LambdaMax f_max(const DegreeDistribution& dist, double r_i, double delta)
{
    require(delta >= 0.0 && delta < 1.0, "delta must lie in [0, 1)");
    const auto& grid = lambda_grid();
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        v[i] = objective(dist, r_i, delta, grid[i]);
    // local maxima, best three refined
    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        bool left = i == 0 || v[i] >= v[i - 1];
        bool right = i + 1 == grid.size() || v[i] >= v[i + 1];
        if (left && right && std::isfinite(v[i]))
            peaks.push_back(i);
    }
    std::sort(peaks.begin(), peaks.end(), [&](auto a, auto b) { return v[a] > v[b]; });
    if (peaks.size() > 3)
        peaks.resize(3);
    LambdaMax best{0.0, kNegInf};
    if (delta == 0.0)
        best = {0.0, 0.0}; // limit lambda -> 0+
    for (auto i : peaks) {
        double a = i ? grid[i - 1] : grid[0] * 0.5;
        double b = i + 1 < grid.size() ? grid[i + 1] : 1.0;
        auto r = refine(dist, r_i, delta, a, b);
        if (r.value > best.value)
            best = r;
    }
    if (has_even_mass(dist)) {
        double at1 = objective(dist, r_i, delta, 1.0);
        if (at1 > best.value)
            best = {1.0, at1};
    }
    return best;
}

GrowthPoint growth_rate_at(const DegreeDistribution& dist, double r_i, double r_o, double delta)
{
    require(delta >= 0.0 && delta < 1.0, "delta must lie in [0, 1)");
    auto m = f_max(dist, r_i, delta);
    GrowthPoint p;
    p.delta = delta;
    p.lambda = m.lambda;
    p.g = hb(delta) - r_i * (1.0 - r_o) + m.value;
    double r = rho(dist, m.lambda);
    p.slope = delta > 0.0 ? std::log2((1.0 - delta) / delta) + std::log2(r / (1.0 - r)) : INFINITY;
    return p;
}

std::vector<GrowthPoint> growth_rate(const DegreeDistribution& dist, double r_i, double r_o,
                                     const std::vector<double>& grid)
{
    std::vector<GrowthPoint> out;
    out.reserve(grid.size());
    for (double d : grid)
        out.push_back(growth_rate_at(dist, r_i, r_o, d));
    return out;
}

double typical_distance_asymptotic(const DegreeDistribution& dist, double r_i, double r_o)
{
    if (growth_rate_at(dist, r_i, r_o, 0.0).g >= 0.0)
        return 0.0;
    double lo = 0.0, hi = 0.5;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (growth_rate_at(dist, r_i, r_o, mid).g > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

RegionResult region_membership(const DegreeDistribution& dist, double r_i, double r_o)
{
    require(r_i > 0.0 && r_o > 0.0 && r_o <= 1.0, "rates must be positive with r_o <= 1");
    RegionResult r;
    r.margin = r_i * (1.0 - r_o) - f_max(dist, r_i, 0.0).value;
    r.inside = r.margin > 0.0;
    return r;
}

double region_boundary_outer_rate(const DegreeDistribution& dist, double rate)
{
    require(rate > 0.0 && rate < 1.0, "rate must lie in (0, 1)");
    auto margin = [&](double r_o) { return region_membership(dist, rate / r_o, r_o).margin; };
    const int steps = 200;
    double prev = rate, mprev = margin(rate), found = -1.0;
    for (int i = 1; i <= steps; ++i) {
        double r_o = rate + (1.0 - rate) * i / steps;
        double m = margin(r_o);
        if (mprev > 0.0 && m <= 0.0)
            found = prev;
        prev = r_o;
        mprev = m;
    }
    require(found > 0.0, "no region boundary along this isorate line");
    double lo = found, hi = found + (1.0 - rate) / steps;
    for (int it = 0; it < 50; ++it) {
        double mid = 0.5 * (lo + hi);
        (margin(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double outer_bound_root()
{
    auto g = [](double r) { return hb(1.0 - r) - (1.0 - r); };
    double lo = 1e-9, hi = 0.5;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double outer_bound_phi(double mean_degree, double r_o)
{
    require(mean_degree > 0.0, "mean degree must be positive");
    require(r_o > 0.0 && r_o <= 1.0, "r_o must lie in (0, 1]");
    static const double root = outer_bound_root();
    if (r_o <= root)
        return 1.0 / r_o;
    double den = hb(1.0 - r_o) - (1.0 - r_o);
    if (den <= 0.0)
        return r_o >= 1.0 ? 0.0 : INFINITY;
    return mean_degree * std::log2(1.0 / r_o) / den;
}

bool region_outer_bound(double mean_degree, double r_i, double r_o)
{
    return r_i <= std::min(outer_bound_phi(mean_degree, r_o), 1.0 / r_o);
}

int typical_min_distance(const WeightEnumerator& we)
{
    if (we.a(0) > 1.5)
        return 0;
    double s = we.a(0) - 1.0;
    int d = 0;
    for (int w = 1; w <= we.n; ++w) {
        s += we.a(w);
        if (s >= 0.5)
            break;
        d = w;
    }
    return d;
}

WeightEnumerator expurgate(const WeightEnumerator& we, int d_s)
{
    require(d_s >= 0 && d_s <= we.n, "threshold outside 0..n");
    double theta = we.a(0) - 1.0;
    for (int w = 1; w <= d_s; ++w)
        theta += we.a(w);
    if (!(theta < 0.5))
        fail(Errc::domain_error, "no expurgated ensemble: sum of A_w up to d_s minus one is not below 1/2");
    WeightEnumerator ex = we;
    ex.log_a[0] = 0.0;
    for (int w = 1; w <= we.n; ++w)
        ex.log_a[static_cast<std::size_t>(w)] = w <= d_s ? kNegInf : we.log_a[static_cast<std::size_t>(w)] + kLn2;
    return ex;
}

double gilbert_varshamov_rate(double delta) { return 1.0 - hb(delta); }

std::string growth_tsv(const std::vector<GrowthPoint>& curve)
{
    std::ostringstream os;
    os.precision(10);
    os << "delta\tG\tlambda\tslope\n";
    for (const auto& p : curve)
        os << p.delta << '\t' << p.g << '\t' << p.lambda << '\t' << p.slope << '\n';
    return os.str();
}

std::string enumerator_tsv(const WeightEnumerator& we)
{
    std::ostringstream os;
    os.precision(12);
    os << "w\tA\tlog2_A\n";
    for (int w = 0; w <= we.n; ++w)
        os << w << '\t' << we.a(w) << '\t' << we.log(w) / kLn2 << '\n';
    return os.str();
}

} // namespace fountain
