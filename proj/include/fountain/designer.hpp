#pragma once

#include "fountain/degree.hpp"
#include "fountain/failure_bounds.hpp"
#include "fountain/raptor.hpp"
#include "fountain/spectra.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace fountain {

enum class DesignFamily { free, truncated_rsd };

struct Schedule {
    double t_init = -1.0; // <= 0: pick so that ~80% of early worsening moves are accepted
    double cooling = 0.97;
    int sweeps = 150;
    int moves_per_sweep = 20;
    double quantum = 0.005;
};

struct DesignSpec {
    int k = 0;
    double pf_target = 1e-2;
    double eval_point = 0.0; // eps_rel (LT) or delta (Raptor)
    double mean_max = 12.0;
    bool mean_pinned = false; // mean == mean_max instead of <=
    int dmax = 150;
    std::vector<int> support; // empty: 1..dmax
    double b = 1000.0;
    DesignFamily family = DesignFamily::free;
    Schedule schedule;
    std::uint64_t seed = 1;
    int chains = 1;
    int workers = 1;
};

// Where the objective comes from: LT (Schotsch lower bound) or Raptor (rateless upper bound + surrogate LT).
struct DesignContext {
    bool raptor = false;
    int h = 0, k = 0;
    WeightEnumerator we;
    DegreeDistribution theta;
    std::uint32_t q = 2;

    static DesignContext lt(int k);
    static DesignContext from_precode(const Precode& pre);
};

struct Evaluation {
    double upsilon = std::numeric_limits<double>::infinity();
    double e_y = 0.0;
    double bound = 1.0;
    double penalty = 0.0;
};

struct TrajectoryPoint {
    int step = 0;
    double t = 0.0, upsilon = 0.0, e_y = 0.0, bound = 0.0;
};

struct DesignResult {
    DegreeDistribution best;
    Evaluation eval;
    std::vector<TrajectoryPoint> trajectory;
    bool feasible = false;
    int chain = 0;
    double rsd_c = 0.0, rsd_delta = 0.0; // truncated-RSD family only
};

double penalty(double p_hat, double pf_target, double b);
// Hard constraints: support, dmax, mean. Tolerance on the mean is 1e-9.
bool satisfies(const DegreeDistribution& d, const DesignSpec& spec);
// Moves mass toward the mean constraint by mixing with the part of d on the other side.
std::vector<double> project_mean(std::vector<double> p, const DesignSpec& spec);
Evaluation objective(const DegreeDistribution& d, const DesignSpec& spec, const DesignContext& ctx);
// Metropolis rule: always for dU <= 0, else with probability exp(-dU/T).
bool accept_move(double d_upsilon, double temperature, Rng& rng);

DesignResult anneal(const DesignSpec& spec, const DesignContext& ctx,
                    const std::function<void(const DegreeDistribution&)>& on_candidate = {});

std::string design_spec_to_json(const DesignSpec& spec);
DesignSpec design_spec_from_json(const std::string& text);
std::string trajectory_tsv(const std::vector<TrajectoryPoint>& t);

} // namespace fountain
