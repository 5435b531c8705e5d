#pragma once

#include "fountain/degree.hpp"
#include "fountain/gf.hpp"
#include "fountain/spectra.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fountain {

enum class Abscissa { overhead, erasure };
enum class BoundKind { upper, lower, model };

struct BoundCurve {
    Abscissa abscissa = Abscissa::overhead;
    BoundKind kind = BoundKind::upper;
    std::vector<std::pair<double, double>> points;

    // Linear in log between points; past the last point the last log-slope is continued.
    double at(double x) const;
};

struct Bracket {
    double lower = 0.0, upper = 0.0;
};

// q^-d-1 <= Pf < q^-d / (q-1)
Bracket lrfc_bounds(std::uint32_t q, int delta);

// Ratios K_j(l)/K_j(0) of the Krawtchouk polynomials K_j(x; h, q), j <= jmax.
class KrawtchoukKernel {
public:
    KrawtchoukKernel(int h, std::uint32_t q, int jmax);
    int h() const { return h_; }
    std::uint32_t q() const { return q_; }
    int jmax() const { return jmax_; }
    double ratio(int j, int l) const { return r_[static_cast<std::size_t>(l) * (jmax_ + 1) + j]; }

private:
    int h_, jmax_;
    std::uint32_t q_;
    std::vector<double> r_;
};

// Direct alternating sum, divided by K_j(0) = C(h,j)(q-1)^j.
double krawtchouk_ratio_direct(int h, std::uint32_t q, int j, int l);
double krawtchouk(int h, std::uint32_t q, int j, int l); // unnormalized, for small h

// Probability that a q-ary sum of i nonzero uniform terms is zero.
double q_i(std::uint32_t q, int i);

// pi_l: probability an output symbol is zero given an intermediate word of weight l.
std::vector<double> pi_l(const DegreeDistribution& dist, const KrawtchoukKernel& kern);
std::vector<double> pi_l(const DegreeDistribution& dist, int h, std::uint32_t q);
std::vector<double> pi_l_dual(const DegreeDistribution& dist, int h, std::uint32_t q);

// Sum_l A_l pi_l^(k+delta), divided by q-1 when tight. Raw value, may exceed 1.
double raptor_upper_bound(const WeightEnumerator& we, const DegreeDistribution& dist, std::uint32_t q,
                          int k, int delta, bool tight = true);
// Same kernel and pi_l reused across an overhead grid.
std::vector<double> raptor_upper_bound_curve(const WeightEnumerator& we, const DegreeDistribution& dist,
                                             std::uint32_t q, int k, const std::vector<int>& deltas,
                                             bool tight = true);
// Ensemble version with the expected enumerator; the form is the same.
inline double raptor_ensemble_upper_bound(const WeightEnumerator& we_avg, const DegreeDistribution& dist,
                                          std::uint32_t q, int k, int delta, bool tight = true)
{
    return raptor_upper_bound(we_avg, dist, q, k, delta, tight);
}
// LT code: A_l = C(k,l)(q-1)^(l-1).
double lt_upper_bound(const DegreeDistribution& dist, std::uint32_t q, int k, int delta);
inline double clamped(double v) { return v < 0 ? 0.0 : v > 1 ? 1.0 : v; }

// Union-of-uncovered-inputs lower bound for LT codes under ML decoding, m received symbols.
double lt_ml_lower_bound(int k, long m, const DegreeDistribution& dist);
double lt_ml_lower_bound(int k, double eps_rel, const DegreeDistribution& dist);

struct BlockBounds {
    double singleton = 0.0, berlekamp = 0.0;
};

BlockBounds block_bounds(int n, int k, double eps, std::uint32_t q = 2);
// Ensemble-average upper bound from the enumerator; with_a0 adds A_0 - 1.
double di_bound(const WeightEnumerator& we, int k, double eps, bool with_a0 = false);

// Probability of collecting at least k of the first n_c symbols.
double concat_q(int n_c, int k, double eps);
Bracket concat_bounds(int n_c, int k, std::uint32_t q, double eps, int delta);

// a[i][w]: expected number of codewords of weight w from weight-i inputs.
struct CoWef {
    int k = 0, n = 0;
    std::vector<std::vector<double>> a;

    WeightEnumerator enumerator() const;
};

// Output weights count the whole codeword (systematic part included).
CoWef hamming_cowef(int t);
CoWef cowef_from_generator(const FieldMatrix& g);
// Parallel concatenation with h_c random generator columns over F_q.
CoWef concat_cowef(const CoWef& pre, int h_c, std::uint32_t q);

// Pr{a receiver fails} after k + Delta transmissions, and Pr{any of N fails}.
double multicast_receiver_failure(int k, double eps, int Delta, const std::function<double(int)>& pf);
double multicast_pe(long N, int k, double eps, int Delta, const BoundCurve& pf_curve);
double multicast_pe(long N, int k, double eps, int Delta, const std::function<double(int)>& pf);

BoundCurve lrfc_curve(std::uint32_t q, int dmax, bool upper = true);
BoundCurve concat_curve(int n_c, int k, std::uint32_t q, double eps, int dmax, bool upper = true);

// delta, bound, mc, mc_stderr; mc columns empty when not supplied.
std::string bound_tsv(const BoundCurve& curve, const std::vector<double>& mc = {},
                      const std::vector<double>& mc_stderr = {});
// eps followed by one column per named curve.
std::string cer_tsv(const std::vector<double>& eps, const std::vector<std::string>& names,
                    const std::vector<std::vector<double>>& columns);

} // namespace fountain
