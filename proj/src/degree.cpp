#include "fountain/degree.hpp"

#include "fountain/mathutil.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fountain {

DegreeDistribution DegreeDistribution::from_probs(std::vector<double> probs, double tol)
{
    require(!probs.empty(), "empty degree distribution");
    require(probs[0] == 0.0, "degree-0 mass must be zero");
    double s = 0.0;
    for (double p : probs) {
        require(p >= 0.0 && std::isfinite(p), "negative or non-finite probability");
        s += p;
    }
    require(std::fabs(s - 1.0) <= tol, "probabilities must sum to 1");
    while (probs.size() > 1 && probs.back() == 0.0)
        probs.pop_back();
    require(probs.size() > 1, "degree distribution has no mass");
    DegreeDistribution d;
    d.p_ = std::move(probs);
    d.finish();
    return d;
}

DegreeDistribution DegreeDistribution::from_weights(std::vector<double> w)
{
    require(!w.empty(), "empty degree distribution");
    w[0] = 0.0;
    double s = 0.0;
    for (double x : w) {
        require(x >= 0.0 && std::isfinite(x), "negative or non-finite weight");
        s += x;
    }
    require(s > 0.0, "degree distribution has no mass");
    for (double& x : w)
        x /= s;
    return from_probs(std::move(w), 1e-9);
}

DegreeDistribution DegreeDistribution::from_map(const std::map<int, double>& m, double tol)
{
    require(!m.empty(), "empty degree distribution");
    require(m.begin()->first >= 1, "degrees must be positive");
    std::vector<double> p(static_cast<std::size_t>(m.rbegin()->first) + 1, 0.0);
    for (auto [d, v] : m)
        p[static_cast<std::size_t>(d)] = v;
    return from_probs(std::move(p), tol);
}

void DegreeDistribution::finish()
{
    cdf_.assign(p_.size(), 0);
    double acc = 0.0;
    for (std::size_t d = 1; d < p_.size(); ++d) {
        acc += p_[d];
        cdf_[d] = prob_threshold(acc);
    }
    cdf_.back() = UINT64_MAX;
}

double DegreeDistribution::mean() const
{
    double s = 0.0;
    for (std::size_t d = 1; d < p_.size(); ++d)
        s += static_cast<double>(d) * p_[d];
    return s;
}

double DegreeDistribution::eval(double x) const
{
    double s = 0.0;
    for (std::size_t d = p_.size() - 1; d >= 1; --d)
        s = (s + p_[d]) * x;
    return s;
}

double DegreeDistribution::derivative(double x) const
{
    double s = 0.0;
    for (std::size_t d = p_.size() - 1; d >= 1; --d)
        s = s * x + static_cast<double>(d) * p_[d];
    return s;
}

int DegreeDistribution::sample(Rng& rng) const
{
    std::uint64_t x = rng.next();
    auto it = std::upper_bound(cdf_.begin() + 1, cdf_.end(), x);
    if (it == cdf_.end())
        return dmax();
    return static_cast<int>(it - cdf_.begin());
}

std::string DegreeDistribution::to_text() const
{
    std::ostringstream os;
    os.precision(17);
    for (std::size_t d = 1; d < p_.size(); ++d)
        if (p_[d] > 0.0)
            os << d << ' ' << p_[d] << '\n';
    return os.str();
}

DegreeDistribution DegreeDistribution::parse(const std::string& text)
{
    std::map<int, double> m;
    std::istringstream is(text);
    std::string line;
    int last = 0;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        int d = 0;
        double p = 0.0;
        if (!(ls >> d))
            continue;
        if (!(ls >> p))
            fail(Errc::parse_error, "distribution line needs 'd p'");
        if (d <= last)
            fail(Errc::parse_error, "degrees must be sorted and distinct");
        last = d;
        m[d] = p;
    }
    if (m.empty())
        fail(Errc::parse_error, "distribution file is empty");
    try {
        return from_map(m, 1e-9);
    } catch (const Error& e) {
        fail(Errc::parse_error, e.what());
    }
}

DegreeDistribution ideal_soliton(int k)
{
    require(k >= 2, "ideal soliton needs k >= 2");
    std::vector<double> p(static_cast<std::size_t>(k) + 1, 0.0);
    p[1] = 1.0 / k;
    for (int d = 2; d <= k; ++d)
        p[static_cast<std::size_t>(d)] = 1.0 / (static_cast<double>(d) * (d - 1));
    return DegreeDistribution::from_probs(std::move(p), 1e-12);
}

double rsd_R(const RsdParams& p)
{
    double lg = p.log2 ? std::log2(p.k / p.delta) : std::log(p.k / p.delta);
    return p.c * lg * std::sqrt(static_cast<double>(p.k));
}

int rsd_spike(const RsdParams& p)
{
    double R = rsd_R(p);
    require(R > 1.0, "robust soliton needs R > 1");
    long s = std::lround(p.k / (R - 1.0));
    return static_cast<int>(std::clamp<long>(s, 1, p.k));
}

DegreeDistribution robust_soliton(const RsdParams& p)
{
    require(p.k >= 1, "robust soliton needs k >= 1");
    require(p.c > 0.0, "robust soliton needs c > 0");
    require(p.delta > 0.0 && p.delta < 1.0, "robust soliton needs 0 < delta < 1");
    const double R = rsd_R(p);
    const int spike = rsd_spike(p);
    const double k = p.k;
    std::vector<double> w(static_cast<std::size_t>(p.k) + 1, 0.0);
    for (int d = 1; d <= p.k; ++d) {
        double psi = d == 1 ? 1.0 / k : 1.0 / (static_cast<double>(d) * (d - 1));
        double tau = 0.0;
        if (d < spike)
            tau = R / (d * k);
        else if (d == spike)
            tau = R * (p.log2 ? std::log2(R / p.delta) : std::log(R / p.delta)) / k;
        w[static_cast<std::size_t>(d)] = psi + tau;
    }
    return DegreeDistribution::from_weights(std::move(w));
}

DegreeDistribution truncated_rsd(const RsdParams& p, int dmax)
{
    require(dmax >= 1 && dmax <= p.k, "truncation degree must be in [1,k]");
    auto full = robust_soliton(p);
    if (dmax >= full.dmax())
        return full;
    std::vector<double> w(static_cast<std::size_t>(dmax) + 1, 0.0);
    for (int d = 1; d <= full.dmax(); ++d)
        w[static_cast<std::size_t>(std::min(d, dmax))] += full[d];
    return DegreeDistribution::from_weights(std::move(w));
}

DegreeDistribution r10_distribution()
{
    // cumulative thresholds out of 2^20; the four-digit table values are their rounding
    const std::pair<int, double> t[] = {{1, 10241},   {2, 491582},  {3, 712794},  {4, 831695},
                                        {10, 948446}, {11, 1032189}, {40, 1048576}};
    std::map<int, double> m;
    double prev = 0.0;
    for (auto [d, c] : t) {
        m[d] = (c - prev) / 1048576.0;
        prev = c;
    }
    return DegreeDistribution::from_map(m, 1e-12);
}

DegreeDistribution omega2_distribution()
{
    std::vector<double> w(67, 0.0);
    const std::pair<int, double> t[] = {{1, 0.0048},  {2, 0.4965},  {3, 0.1669},  {4, 0.0734},
                                        {5, 0.0822},  {8, 0.0575},  {9, 0.036},   {18, 0.0012},
                                        {19, 0.0543}, {65, 0.0182}, {66, 0.0091}};
    for (auto [d, v] : t)
        w[static_cast<std::size_t>(d)] = v;
    return DegreeDistribution::from_weights(std::move(w));
}

DegreeDistribution binomial_lrfc_distribution(int k, double p)
{
    require(k >= 1, "binomial distribution needs k >= 1");
    require(p > 0.0 && p <= 1.0, "binomial parameter must be in (0,1]");
    auto pmf = binom_pmf(k, p);
    pmf[0] = 0.0;
    return DegreeDistribution::from_weights(std::move(pmf));
}

DegreeDistribution point_mass(int d)
{
    require(d >= 1, "degree must be positive");
    std::vector<double> p(static_cast<std::size_t>(d) + 1, 0.0);
    p[static_cast<std::size_t>(d)] = 1.0;
    return DegreeDistribution::from_probs(std::move(p));
}

} // namespace fountain
