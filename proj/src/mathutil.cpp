#include "fountain/mathutil.hpp"

#include <algorithm>

namespace fountain {

namespace {

constexpr long kTable = 1 << 16;

const std::vector<double>& lf_table()
{
    static const std::vector<double> t = [] {
        std::vector<double> v(kTable);
        v[0] = 0.0;
        for (long i = 1; i < kTable; ++i)
            v[i] = v[i - 1] + std::log(static_cast<double>(i));
        return v;
    }();
    return t;
}

} // namespace

double log_factorial(long n)
{
    if (n < 0)
        return kNegInf;
    if (n < kTable)
        return lf_table()[n];
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binom(long n, long k)
{
    if (k < 0 || n < 0 || k > n)
        return kNegInf;
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double binom(long n, long k)
{
    if (k < 0 || n < 0 || k > n)
        return 0.0;
    if (n < 60) {
        k = std::min(k, n - k);
        double r = 1.0;
        for (long i = 1; i <= k; ++i)
            r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
        return std::round(r);
    }
    return std::exp(log_binom(n, k));
}

double log_add(double a, double b)
{
    if (a == kNegInf)
        return b;
    if (b == kNegInf)
        return a;
    if (a < b)
        std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

double log_sum(const std::vector<double>& terms)
{
    double mx = kNegInf;
    for (double t : terms)
        mx = std::max(mx, t);
    if (mx == kNegInf)
        return kNegInf;
    double s = 0.0;
    for (double t : terms)
        s += std::exp(t - mx);
    return mx + std::log(s);
}

std::vector<double> binom_pmf(int n, double p)
{
    std::vector<double> out(static_cast<size_t>(n) + 1, 0.0);
    if (p <= 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (p >= 1.0) {
        out[n] = 1.0;
        return out;
    }
    double lp = std::log(p), lq = std::log1p(-p);
    for (int i = 0; i <= n; ++i)
        out[i] = std::exp(log_binom(n, i) + i * lp + (n - i) * lq);
    return out;
}

double hb(double x)
{
    if (x <= 0.0 || x >= 1.0)
        return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

} // namespace fountain
