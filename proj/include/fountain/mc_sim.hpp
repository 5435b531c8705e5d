#pragma once

#include "fountain/degree.hpp"
#include "fountain/gf.hpp"
#include "fountain/inactivation.hpp"
#include "fountain/raptor.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fountain {

struct ChannelSpec {
    double eps = 0.0;
    std::uint32_t q = 2;
};

// Indices 0..n-1 that survive, each erased independently with probability eps.
std::vector<std::size_t> erase(const ChannelSpec& ch, std::size_t n, Rng& rng);
// Positions of the first m survivors of an infinite stream.
std::vector<std::size_t> first_survivors(double eps, std::size_t m, Rng& rng);

enum class CodeKind { lt, lrfc, raptor, concat, block };
enum class DecodeMode { ml, inactivation, peeling };
enum class SweepVar { overhead, rel_overhead, erasure };

const char* code_kind_name(CodeKind k);
CodeKind parse_code_kind(const std::string& s);
const char* sweep_name(SweepVar v);
SweepVar parse_sweep(const std::string& s);

struct CodeConfig {
    CodeKind kind = CodeKind::lt;
    int k = 0;
    int field_m = 1; // GF(2^m) for lt and lrfc; the precode fixes it otherwise
    DegreeDistribution dist;
    PrecodeParams precode;
    int precode_draws = 1; // > 1 samples an ensemble; trial t uses code t mod draws
    DecodeMode decoder = DecodeMode::ml;
    Strategy strategy = Strategy::random;
    std::size_t n = 0; // transmitted symbols in erasure sweeps (0: k + fixed overhead from the plan)
    double eps = 0.0;  // channel seen by a receiver in overhead sweeps; only ordering-sensitive codes use it
};

struct Outcome {
    bool success = false;
    double y = 0.0; // inactivations
};

class Simulator {
public:
    Simulator(CodeConfig cfg, std::uint64_t seed);

    const CodeConfig& config() const { return cfg_; }
    std::size_t dimension() const; // k
    std::size_t nvars() const;     // h for raptor codes, k otherwise

    // Exactly m received symbols.
    Outcome fixed_receipts_trial(std::size_t m, std::uint64_t trial, Rng& rng) const;
    // n transmitted symbols, each erased with probability eps.
    Outcome channel_trial(double eps, std::size_t n, std::uint64_t trial, Rng& rng) const;

private:
    Outcome decode_received(const std::vector<std::size_t>& pos, std::size_t m, std::uint64_t trial, Rng& rng) const;
    Outcome sparse(const SparseSystem& sys, Rng& rng) const;

    CodeConfig cfg_;
    FieldPtr f_;
    std::vector<Precode> codes_;
};

struct StopRule {
    long target_failures = 200;
    long max_trials = 100000;
    long min_trials = 0;
};

struct TrialPlan {
    CodeConfig code;
    SweepVar sweep = SweepVar::overhead;
    std::vector<double> grid;
    StopRule stop;
    std::uint64_t seed = 1;
    int workers = 1;
    long batch = 64;
};

struct EstimateRow {
    double x = 0.0;
    long trials = 0, failures = 0;
    double pf = 0.0, stderr_pf = 0.0;
    double mean_y = 0.0, stderr_y = 0.0;
};

// Deterministic in the seed for any worker count.
std::vector<EstimateRow> run_plan(const TrialPlan& plan);
EstimateRow run_point(const TrialPlan& plan, const Simulator& sim, std::size_t point);

std::string plan_to_json(const TrialPlan& plan);
TrialPlan plan_from_json(const std::string& text);
std::string dist_to_json(const DegreeDistribution& d);
DegreeDistribution dist_from_json(const std::string& text);

std::string results_tsv(const TrialPlan& plan, const std::vector<EstimateRow>& rows);

// Generic seeded parallel map over trial indices: f(i) for i in [0, n), in index order.
void parallel_for(long n, int workers, const std::function<void(long)>& f);

} // namespace fountain
