#include "fountain/fl_analysis.hpp"

#include "fountain/mathutil.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fountain {

namespace {

// Omega over degrees 0..min(dmax, k), mass above k folded into k.
std::vector<double> folded(const DegreeDistribution& dist, int k)
{
    const int top = std::min(dist.dmax(), k);
    std::vector<double> w(static_cast<std::size_t>(top) + 1, 0.0);
    for (int d = 1; d <= dist.dmax(); ++d)
        w[static_cast<std::size_t>(std::min(d, top))] += dist[d];
    return w;
}

struct Pmf {
    int lo = 0;
    std::vector<double> p;
};

Pmf binom_range(int n, double p, double eps)
{
    Pmf out;
    if (n == 0 || p <= 0.0) {
        out.p = {1.0};
        return out;
    }
    if (p >= 1.0) {
        out.lo = n;
        out.p = {1.0};
        return out;
    }
    int mode = std::clamp(static_cast<int>(std::floor((n + 1) * p)), 0, n);
    double pm = std::exp(log_binom(n, mode) + mode * std::log(p) + (n - mode) * std::log1p(-p));
    const double odds = p / (1.0 - p);
    std::vector<double> down;
    double v = pm;
    for (int i = mode; i > 0; --i) {
        v *= static_cast<double>(i) / (n - i + 1) / odds;
        if (v < eps)
            break;
        down.push_back(v);
    }
    out.lo = mode - static_cast<int>(down.size());
    out.p.assign(down.rbegin(), down.rend());
    out.p.push_back(pm);
    v = pm;
    for (int i = mode; i < n; ++i) {
        v *= static_cast<double>(n - i) / (i + 1) * odds;
        if (v < eps)
            break;
        out.p.push_back(v);
    }
    return out;
}

// Pr{at least two of d neighbors among u active out of k}, summed directly.
double cloud_prob(int k, int u, int d)
{
    const int top = std::min(d, u);
    if (top < 2)
        return 0.0;
    int j = std::max(2, d - (k - u));
    if (j > top)
        return 0.0;
    double lt = log_binom(u, j) + log_binom(k - u, d - j) - log_binom(k, d);
    double t = std::exp(lt), s = 0.0;
    for (; j <= top; ++j) {
        s += t;
        if (j == top)
            break;
        double ratio = static_cast<double>(u - j) * (d - j) / ((j + 1.0) * (k - u - d + j + 1.0));
        t *= ratio;
        if (t < 1e-18 * s && ratio < 1.0)
            break;
    }
    return s;
}

class DpEngine {
public:
    DpEngine(int k, int m, const DegreeDistribution& dist, const DpOptions& opt, bool track)
        : k_(k), m_(m), w_(static_cast<std::size_t>(m) + 1), dist_(dist), opt_(opt), track_(track)
    {
        require(k >= 1, "analysis needs k >= 1");
        require(m >= 0, "analysis needs m >= 0");
        ymax_ = opt.ymax < 0 ? k : opt.ymax;
    }

    DpResult run(std::vector<double>* f)
    {
        DpResult res;
        res.empty_ripple.assign(static_cast<std::size_t>(k_) + 1, 0.0);
        res.ripple_mean.assign(static_cast<std::size_t>(k_) + 1, 0.0);
        res.mass.assign(static_cast<std::size_t>(k_) + 1, 0.0);
        res.degenerate.assign(static_cast<std::size_t>(k_) + 1, false);

        const double o1 = folded(dist_, k_)[1];
        layers_.assign(1, std::vector<double>(w_ * w_, 0.0));
        auto init = binom_range(m_, o1, 0.0);
        for (std::size_t i = 0; i < init.p.size(); ++i) {
            int r = init.lo + static_cast<int>(i);
            at(layers_[0], m_ - r, r) = init.p[i];
        }
        cmin_ = 0;
        cmax_ = m_;
        rmax_ = m_;
        prune();

        for (int u = k_; u >= 1; --u) {
            record(res, u);
            auto pu = transition_prob_pu(k_, u, dist_);
            res.degenerate[static_cast<std::size_t>(u)] = pu.degenerate;
            step(u, pu.p, res);
        }
        record(res, 0);
        if (f) {
            f->assign(layers_.size(), 0.0);
            for (std::size_t n = 0; n < layers_.size(); ++n)
                (*f)[n] = layer_sum(layers_[n]);
        }
        return res;
    }

private:
    double& at(std::vector<double>& t, int c, int r) { return t[static_cast<std::size_t>(c) * w_ + r]; }

    double layer_sum(const std::vector<double>& t) const
    {
        KahanSum s;
        if (t.empty())
            return 0.0;
        for (int c = cmin_; c <= cmax_; ++c)
            for (int r = 0; r <= rmax_; ++r)
                s.add(t[static_cast<std::size_t>(c) * w_ + r]);
        return s.value();
    }

    void record(DpResult& res, int u)
    {
        double mass = 0.0, rm = 0.0;
        for (auto& t : layers_) {
            if (t.empty())
                continue;
            for (int c = cmin_; c <= cmax_; ++c)
                for (int r = 0; r <= rmax_; ++r) {
                    double v = at(t, c, r);
                    mass += v;
                    rm += v * r;
                }
        }
        res.mass[static_cast<std::size_t>(u)] = mass;
        res.ripple_mean[static_cast<std::size_t>(u)] = rm;
    }

    void step(int u, double pu, DpResult& res)
    {
        // ripple exits: the resolved symbol plus Bin(r-1, 1/u) others
        std::vector<Pmf> exits(static_cast<std::size_t>(rmax_) + 1);
        for (int r = 1; r <= rmax_; ++r)
            exits[static_cast<std::size_t>(r)] = binom_range(r - 1, 1.0 / u, opt_.prune * 1e-3);
        std::vector<std::vector<double>> q(layers_.size() + (track_ ? 1 : 0));
        double empty = 0.0;
        for (std::size_t n = 0; n < layers_.size(); ++n) {
            auto& t = layers_[n];
            if (t.empty())
                continue;
            for (int c = cmin_; c <= cmax_; ++c)
                for (int r = 0; r <= rmax_; ++r) {
                    double v = at(t, c, r);
                    if (v == 0.0)
                        continue;
                    if (r == 0) {
                        empty += v;
                        std::size_t nn = track_ ? std::min<std::size_t>(n + 1, static_cast<std::size_t>(ymax_)) : 0;
                        auto& dst = q[nn];
                        if (dst.empty())
                            dst.assign(w_ * w_, 0.0);
                        at(dst, c, 0) += v;
                        continue;
                    }
                    auto& dst = q[n];
                    if (dst.empty())
                        dst.assign(w_ * w_, 0.0);
                    const Pmf& e = exits[static_cast<std::size_t>(r)];
                    for (std::size_t i = 0; i < e.p.size(); ++i)
                        at(dst, c, r - 1 - (e.lo + static_cast<int>(i))) += v * e.p[i];
                }
        }
        res.empty_ripple[static_cast<std::size_t>(u)] = empty;
        while (!q.empty() && q.back().empty())
            q.pop_back();

        // cloud symbols entering the ripple: Bin(c, p_u)
        std::vector<Pmf> enter(static_cast<std::size_t>(cmax_) + 1);
        for (int c = cmin_; c <= cmax_; ++c)
            enter[static_cast<std::size_t>(c)] = binom_range(c, pu, opt_.prune * 1e-3);
        int new_rmax = 0;
        for (int c = cmin_; c <= cmax_; ++c) {
            const Pmf& b = enter[static_cast<std::size_t>(c)];
            new_rmax = std::max(new_rmax, std::min(m_, rmax_ + b.lo + static_cast<int>(b.p.size()) - 1));
        }
        std::vector<std::vector<double>> next(q.size());
        for (std::size_t n = 0; n < q.size(); ++n) {
            auto& t = q[n];
            if (t.empty())
                continue;
            auto& dst = next[n];
            dst.assign(w_ * w_, 0.0);
            for (int c = cmin_; c <= cmax_; ++c) {
                const Pmf& b = enter[static_cast<std::size_t>(c)];
                for (int r = 0; r <= rmax_; ++r) {
                    double v = at(t, c, r);
                    if (v == 0.0)
                        continue;
                    for (std::size_t i = 0; i < b.p.size(); ++i) {
                        int bb = b.lo + static_cast<int>(i);
                        at(dst, c - bb, r + bb) += v * b.p[i];
                    }
                }
            }
        }
        layers_ = std::move(next);
        cmin_ = 0;
        rmax_ = std::max(rmax_, new_rmax);
        prune();
    }

    void prune()
    {
        int cmin = m_ + 1, cmax = -1, rmax = 0;
        for (auto& t : layers_) {
            if (t.empty())
                continue;
            bool any = false;
            for (int c = cmin_; c <= cmax_; ++c)
                for (int r = 0; r <= rmax_; ++r) {
                    double& v = at(t, c, r);
                    if (v == 0.0)
                        continue;
                    if (v < opt_.prune) {
                        v = 0.0;
                        continue;
                    }
                    any = true;
                    cmin = std::min(cmin, c);
                    cmax = std::max(cmax, c);
                    rmax = std::max(rmax, r);
                }
            if (!any)
                t.clear();
        }
        if (cmax < 0) {
            cmin_ = 0;
            cmax_ = 0;
            rmax_ = 0;
            return;
        }
        cmin_ = cmin;
        cmax_ = cmax;
        rmax_ = rmax;
    }

    int k_, m_;
    std::size_t w_;
    const DegreeDistribution& dist_;
    DpOptions opt_;
    bool track_;
    int ymax_ = 0;
    std::vector<std::vector<double>> layers_;
    int cmin_ = 0, cmax_ = 0, rmax_ = 0;
};

} // namespace

PuResult transition_prob_pu(int k, int u, const DegreeDistribution& dist)
{
    require(u >= 1 && u <= k, "p_u needs 1 <= u <= k");
    PuResult res;
    if (k < 2 || u < 2)
        return res;
    auto w = folded(dist, k);
    const int top = static_cast<int>(w.size()) - 1;
    double num = 0.0, den = 0.0;
    const double base = std::log(u - 1.0) - std::log(static_cast<double>(k)) - std::log(k - 1.0);
    for (int d = 2; d <= std::min(top, k - u + 2); ++d) {
        double od = w[static_cast<std::size_t>(d)];
        if (od == 0.0)
            continue;
        num += od * std::exp(std::log(static_cast<double>(d)) + std::log(d - 1.0) + base + log_binom(k - u, d - 2) -
                             log_binom(k - 2, d - 2));
    }
    for (int d = 2; d <= top; ++d)
        if (double od = w[static_cast<std::size_t>(d)])
            den += od * cloud_prob(k, u, d);
    if (den <= 0.0) {
        res.degenerate = true;
        return res;
    }
    res.p = std::clamp(num / den, 0.0, 1.0);
    return res;
}

DpResult expected_inactivations_dp(int k, int m, const DegreeDistribution& dist, const DpOptions& opt)
{
    DpEngine e(k, m, dist, opt, false);
    DpResult r = e.run(nullptr);
    KahanSum s;
    for (int u = 1; u <= k; ++u)
        s.add(r.empty_ripple[static_cast<std::size_t>(u)]);
    r.mean = s.value();
    return r;
}

InactivationDistribution inactivation_distribution_dp(int k, int m, const DegreeDistribution& dist,
                                                      const DpOptions& opt)
{
    DpEngine e(k, m, dist, opt, true);
    InactivationDistribution out;
    out.dp = e.run(&out.f);
    KahanSum s, mean;
    for (int u = 1; u <= k; ++u)
        s.add(out.dp.empty_ripple[static_cast<std::size_t>(u)]);
    out.dp.mean = s.value();
    for (std::size_t y = 0; y < out.f.size(); ++y)
        mean.add(static_cast<double>(y) * out.f[y]);
    out.mean = mean.value();
    return out;
}

std::vector<double> InactivationDistribution::cdf() const
{
    std::vector<double> c(f.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        c[i] = acc += f[i];
    return c;
}

BinomialApprox binomial_approx(int k, int m, const DegreeDistribution& dist)
{
    require(k >= 1 && m >= 1, "binomial approximation needs k, m >= 1");
    auto r = folded(dist, k);
    const int top = static_cast<int>(r.size()) - 1;
    r.push_back(0.0);
    BinomialApprox out;
    out.ripple.assign(static_cast<std::size_t>(k) + 1, 0.0);
    out.cumulative.assign(static_cast<std::size_t>(k) + 1, 0.0);
    double acc = 0.0;
    for (int u = k; u >= 1; --u) {
        const double uu = u;
        out.ripple[static_cast<std::size_t>(u)] = m * r[1];
        out.cumulative[static_cast<std::size_t>(u)] = acc;
        const double empty = std::pow(1.0 - r[1], m);
        acc += empty;
        std::vector<double> nr(r.size(), 0.0);
        for (int d = 2; d <= top; ++d) {
            auto i = static_cast<std::size_t>(d);
            nr[i] = std::clamp((1.0 - d / uu) * r[i] + (d + 1) / uu * r[i + 1], 0.0, 1.0);
        }
        nr[1] = std::clamp((1.0 - 1.0 / uu) * r[1] + 2.0 / uu * (top >= 2 ? r[2] : 0.0) -
                               (1.0 - 1.0 / uu) * (1.0 - empty) / m,
                           0.0, 1.0);
        r = std::move(nr);
    }
    out.ripple[0] = m * r[1];
    out.cumulative[0] = acc;
    out.mean = acc;
    return out;
}

DegreeDistribution surrogate_lt(const DegreeDistribution& theta, const DegreeDistribution& omega, int h, int k, int m)
{
    require(h >= k && k >= 1 && m >= 0, "surrogate LT needs h >= k >= 1");
    const double a = static_cast<double>(h - k), b = static_cast<double>(m);
    if (a + b == 0.0)
        return omega;
    std::vector<double> w(static_cast<std::size_t>(h) + 1, 0.0);
    for (int d = 1; d <= theta.dmax(); ++d)
        w[static_cast<std::size_t>(std::min(d, h))] += a / (a + b) * theta[d];
    for (int d = 1; d <= omega.dmax(); ++d)
        w[static_cast<std::size_t>(std::min(d, h))] += b / (a + b) * omega[d];
    return DegreeDistribution::from_weights(std::move(w));
}

DegreeDistribution r10_theta(int k)
{
    auto sz = r10_sizes(static_cast<std::size_t>(k));
    const double s = static_cast<double>(sz.s), hp = static_cast<double>(sz.hp);
    int ldpc = 3 * static_cast<int>(std::lround(k / s)) + 1;
    int hdpc = static_cast<int>(std::lround((k + s) / 2.0)) + 1;
    std::map<int, double> m;
    m[ldpc] += s / (s + hp);
    m[hdpc] += hp / (s + hp);
    return DegreeDistribution::from_map(m, 1e-12);
}

DegreeDistribution linear_random_theta(int h, std::uint32_t q)
{
    return binomial_lrfc_distribution(h, static_cast<double>(q - 1) / q);
}

DegreeDistribution precode_theta(const Precode& pre)
{
    std::vector<double> w(pre.h + 1, 0.0);
    for (auto [wt, frac] : pre.theta)
        if (wt > 0)
            w[wt] += frac;
    return DegreeDistribution::from_weights(std::move(w));
}

std::string dp_tsv(const DpResult& r)
{
    std::ostringstream os;
    os.precision(10);
    os << "u\tpr_empty_ripple\tmean_ripple\n";
    for (std::size_t u = r.ripple_mean.size(); u-- > 0;)
        os << u << '\t' << (u < r.empty_ripple.size() ? r.empty_ripple[u] : 0.0) << '\t' << r.ripple_mean[u] << '\n';
    return os.str();
}

std::string distribution_tsv(const InactivationDistribution& d)
{
    std::ostringstream os;
    os.precision(12);
    os << "y\tf\tF\n";
    auto c = d.cdf();
    for (std::size_t y = 0; y < d.f.size(); ++y)
        os << y << '\t' << d.f[y] << '\t' << c[y] << '\n';
    return os.str();
}

std::string binomial_tsv(const BinomialApprox& b)
{
    std::ostringstream os;
    os.precision(10);
    os << "u\tripple\tcum_inactivations\n";
    for (std::size_t u = b.ripple.size(); u-- > 0;)
        os << u << '\t' << b.ripple[u] << '\t' << b.cumulative[u] << '\n';
    return os.str();
}

} // namespace fountain
