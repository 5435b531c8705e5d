#pragma once

#include "fountain/degree.hpp"
#include "fountain/raptor.hpp"

#include <string>
#include <vector>

namespace fountain {

struct PuResult {
    double p = 0.0;
    bool degenerate = false; // cloud empty with probability one
};

// Probability that a cloud symbol at step u enters the ripple at step u-1.
PuResult transition_prob_pu(int k, int u, const DegreeDistribution& dist);

struct DpOptions {
    double prune = 1e-15;
    int ymax = -1; // cap on tracked inactivations, -1 means k
};

struct DpResult {
    double mean = 0.0;                // E[Y]
    std::vector<double> empty_ripple; // index u = 1..k: Pr{R_u = 0}
    std::vector<double> ripple_mean;  // index u = 0..k: E[R_u]
    std::vector<double> mass;         // index u: total probability held
    std::vector<bool> degenerate;     // index u: p_u denominator vanished
};

struct InactivationDistribution {
    std::vector<double> f; // f[y]; the last entry holds mass at or beyond the cap
    double mean = 0.0;
    DpResult dp;

    std::vector<double> cdf() const;
};

DpResult expected_inactivations_dp(int k, int m, const DegreeDistribution& dist, const DpOptions& opt = {});
InactivationDistribution inactivation_distribution_dp(int k, int m, const DegreeDistribution& dist,
                                                      const DpOptions& opt = {});

struct BinomialApprox {
    double mean = 0.0;           // estimate of E[Y]
    std::vector<double> ripple;  // index u = 0..k: m r_{u,1}
    std::vector<double> cumulative; // index u: expected inactivations before reaching u
};

BinomialApprox binomial_approx(int k, int m, const DegreeDistribution& dist);

// Expected row-weight mixture of the constraint matrix.
DegreeDistribution surrogate_lt(const DegreeDistribution& theta, const DegreeDistribution& omega, int h, int k, int m);
// Two point masses for the LDPC and HDPC rows of an r10-style precode.
DegreeDistribution r10_theta(int k);
// Row weights of a uniformly random parity-check matrix, conditioned nonzero.
DegreeDistribution linear_random_theta(int h, std::uint32_t q = 2);
DegreeDistribution precode_theta(const Precode& pre);

std::string dp_tsv(const DpResult& r);
std::string distribution_tsv(const InactivationDistribution& d);
std::string binomial_tsv(const BinomialApprox& b);

} // namespace fountain
