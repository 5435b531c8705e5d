#pragma once

#include "fountain/common.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fountain {

// Output degree distribution, Omega_1..Omega_dmax.
class DegreeDistribution {
public:
    DegreeDistribution() = default;

    // probs[d] is the mass at degree d; probs[0] must be zero. Sum checked to tol.
    static DegreeDistribution from_probs(std::vector<double> probs, double tol = 1e-12);
    // Nonnegative weights, normalized.
    static DegreeDistribution from_weights(std::vector<double> weights);
    static DegreeDistribution from_map(const std::map<int, double>& m, double tol = 1e-12);

    int dmax() const { return static_cast<int>(p_.size()) - 1; }
    double operator[](int d) const { return d >= 1 && d <= dmax() ? p_[static_cast<std::size_t>(d)] : 0.0; }
    const std::vector<double>& probs() const { return p_; }

    double mean() const;
    double eval(double x) const;       // Omega(x)
    double derivative(double x) const; // Omega'(x)

    int sample(Rng& rng) const;

    std::string to_text() const;
    static DegreeDistribution parse(const std::string& text);

    bool operator==(const DegreeDistribution& o) const { return p_ == o.p_; }

private:
    void finish();

    std::vector<double> p_{0.0};
    std::vector<std::uint64_t> cdf_;
};

struct RsdParams {
    int k = 0;
    double c = 0.0;     // multiplier of sqrt(k)
    double delta = 0.0; // failure parameter inside the logarithm
    bool log2 = false;
};

DegreeDistribution ideal_soliton(int k);
DegreeDistribution robust_soliton(const RsdParams& p);
DegreeDistribution truncated_rsd(const RsdParams& p, int dmax);
double rsd_R(const RsdParams& p);
int rsd_spike(const RsdParams& p);
DegreeDistribution r10_distribution();
DegreeDistribution omega2_distribution();
// Bin(k, p) conditioned on d >= 1.
DegreeDistribution binomial_lrfc_distribution(int k, double p = 0.5);
DegreeDistribution point_mass(int d);

} // namespace fountain
