#pragma once

#include "fountain/degree.hpp"
#include "fountain/mathutil.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fountain {

// Expected multiplicities A_0..A_n, kept as natural logs.
struct WeightEnumerator {
    int n = 0;
    std::vector<double> log_a; // -inf for A_w = 0

    static WeightEnumerator from_values(const std::vector<double>& a);
    double a(int w) const { return w < 0 || w > n ? 0.0 : std::exp(log_a[static_cast<std::size_t>(w)]); }
    double log(int w) const { return w < 0 || w > n ? kNegInf : log_a[static_cast<std::size_t>(w)]; }
    std::vector<double> values() const;
    double total_log() const; // log of sum over all weights
};

// Parity-check ensemble: A_0 = 1, A_l = C(h,l) q^-(h-k) (q-1)^l.
WeightEnumerator we_linear_random(int h, int k, std::uint32_t q = 2);
// Exact enumerator of the (2^t-1, 2^t-1-t) Hamming code.
WeightEnumerator we_hamming(int t);

// Probability that an output of degree j is one given an input word of weight l, both forms.
double pjl(int h, int j, int l);
double pjl_dual(int h, int j, int l);
std::vector<double> p_l(const DegreeDistribution& dist, int h); // index 0..h

// Fixed-rate ensemble with linear random outer code; the outer code contributes 2^-redundancy per word.
WeightEnumerator raptor_ensemble_we_exact(const DegreeDistribution& dist, int h, double redundancy, int n);
// h = round(r_i n), redundancy h (1 - r_o).
WeightEnumerator raptor_ensemble_we(const DegreeDistribution& dist, double r_i, double r_o, int n);

// rho(lambda) = 1/2 sum_j Omega_j (1 - (1 - 2 lambda)^j)
double rho(const DegreeDistribution& dist, double lambda);
double rho_prime(const DegreeDistribution& dist, double lambda);
bool has_even_mass(const DegreeDistribution& dist);

struct LambdaMax {
    double lambda = 0.0;
    double value = 0.0;
};

// max over lambda of r_i H(lambda) + delta log2 rho + (1 - delta) log2 (1 - rho)
LambdaMax f_max(const DegreeDistribution& dist, double r_i, double delta);

struct GrowthPoint {
    double delta = 0.0, g = 0.0, lambda = 0.0, slope = 0.0;
};

GrowthPoint growth_rate_at(const DegreeDistribution& dist, double r_i, double r_o, double delta);
std::vector<GrowthPoint> growth_rate(const DegreeDistribution& dist, double r_i, double r_o,
                                     const std::vector<double>& grid);
// Normalized typical minimum distance; 0 when G does not start negative.
double typical_distance_asymptotic(const DegreeDistribution& dist, double r_i, double r_o);

struct RegionResult {
    bool inside = false;
    double margin = 0.0; // r_i (1 - r_o) - max term
};

RegionResult region_membership(const DegreeDistribution& dist, double r_i, double r_o);
// Outer rate on the boundary of the region along r_i r_o = rate.
double region_boundary_outer_rate(const DegreeDistribution& dist, double rate);

double outer_bound_root(); // r_o*
double outer_bound_phi(double mean_degree, double r_o);
bool region_outer_bound(double mean_degree, double r_i, double r_o);

// Finite-length typical minimum distance.
int typical_min_distance(const WeightEnumerator& we);
// Zero below and at d_s, doubled above. Throws when sum_{w<=d_s} A_w - 1 >= 1/2.
WeightEnumerator expurgate(const WeightEnumerator& we, int d_s);

double gilbert_varshamov_rate(double delta);

std::string growth_tsv(const std::vector<GrowthPoint>& curve);
std::string enumerator_tsv(const WeightEnumerator& we);

} // namespace fountain
