#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace fountain {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_factorial(long n);
double log_binom(long n, long k); // -inf outside 0 <= k <= n
double binom(long n, long k);

double log_add(double a, double b);
double log_sum(const std::vector<double>& terms);

// Bin(n, p) pmf over 0..n, computed by a stable recurrence.
std::vector<double> binom_pmf(int n, double p);

// Binary entropy in bits; H(0) = H(1) = 0.
double hb(double x);

class KahanSum {
public:
    void add(double x)
    {
        double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            c_ += (sum_ - t) + x;
        else
            c_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + c_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

} // namespace fountain
