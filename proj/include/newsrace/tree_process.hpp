#pragma once

#include <cstdint>
#include <vector>

#include "newsrace/degree.hpp"
#include "newsrace/random.hpp"
#include "newsrace/traversal.hpp"

namespace newsrace {

enum class TreeMode {
    GaltonWatson,  // every vertex draws its offspring count from p_k
    Unimodular,    // root draws D, every other vertex draws D* - 1
};

/// Generation counts of the race on a branching-process tree.
///
/// zf[k] counts generation-k vertices whose lineage walk
/// S_j = sum (L^R - L^F) stays strictly above -d for every j <= k.
struct TreeCompetitionResult {
    TreeMode mode = TreeMode::GaltonWatson;
    int generations = 0;
    double delay = 0.0;
    std::vector<std::int64_t> z;
    std::vector<std::int64_t> zf;
    bool truncated = false;  // some generation exceeded the population cap
    int truncated_at = -1;   // first generation not recorded

    bool extinct() const { return !truncated && z.back() == 0; }
};

constexpr std::int64_t kDefaultPopulationCap = 10'000'000;

/// Breadth-first evolution up to `generations`. Surviving vertices carry
/// their walk value; killed lineages are only counted, by plain branching.
/// On CapExceeded the result holds the generations completed so far and is
/// flagged `truncated`.
TreeCompetitionResult simulate_tree(const DegreeDistribution& offspring, TreeMode mode,
                                    const JointTraversalModel& model, int generations, double delay, Stream& rng,
                                    std::int64_t cap = kDefaultPopulationCap);

struct TauTailEstimate {
    int k = 0;
    double delay = 0.0;
    double p_hat = 1.0;  // estimate of P(tau_d > k)
    double std_error = 0.0;
    std::int64_t replications = 0;
};

/// Monte Carlo of P(tau_d > k), k = 0..k_max, from `reps` independent walks,
/// where tau_d = inf{k >= 1 : S_k <= -d}.
std::vector<TauTailEstimate> estimate_tau_tail(const JointTraversalModel& model, double delay, int k_max,
                                               std::int64_t reps, Stream& rng);

}  // namespace newsrace
