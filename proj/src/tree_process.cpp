#include "newsrace/tree_process.hpp"

#include <cmath>
#include <stdexcept>

namespace newsrace {

TreeCompetitionResult simulate_tree(const DegreeDistribution& offspring, TreeMode mode,
                                    const JointTraversalModel& model, int generations, double delay, Stream& rng,
                                    std::int64_t cap) {
    if (generations < 0) throw std::invalid_argument("generations must be >= 0");
    if (cap < 1) throw std::invalid_argument("population cap must be >= 1");

    TreeCompetitionResult res;
    res.mode = mode;
    res.generations = generations;
    res.delay = delay;
    res.z.push_back(1);
    res.zf.push_back(1);

    auto children = [&](bool is_root) {
        return mode == TreeMode::GaltonWatson ? offspring.sample_degree(rng)
                                              : offspring.sample_offspring(is_root, rng);
    };
    auto constant = [&](bool is_root) {
        return mode == TreeMode::GaltonWatson ? offspring.constant_offspring(true)
                                              : offspring.constant_offspring(is_root);
    };

    // The root is never killed, so killed vertices are never roots.
    const auto killed_const = constant(false);

    std::vector<double> alive{0.0};
    std::vector<double> next;
    std::int64_t killed = 0;
    for (int k = 1; k <= generations; ++k) {
        const bool from_root = (k == 1);
        next.clear();
        std::int64_t next_killed = 0;

        if (killed_const) {
            next_killed = killed * *killed_const;
        } else {
            for (std::int64_t i = 0; i < killed; ++i) {
                next_killed += children(false);
                if (next_killed > cap) break;
            }
        }
        bool over = next_killed > cap;
        for (double s : alive) {
            if (over) break;
            const int c = children(from_root);
            for (int j = 0; j < c; ++j) {
                const auto w = sample_pair(model, rng);
                const double walk = s + (w.correct - w.fake);
                if (walk > -delay)
                    next.push_back(walk);
                else
                    ++next_killed;
            }
            over = static_cast<std::int64_t>(next.size()) + next_killed > cap;
        }
        if (over) {
            res.truncated = true;
            res.truncated_at = k;
            break;
        }
        alive.swap(next);
        killed = next_killed;
        res.zf.push_back(static_cast<std::int64_t>(alive.size()));
        res.z.push_back(static_cast<std::int64_t>(alive.size()) + killed);
    }
    return res;
}

std::vector<TauTailEstimate> estimate_tau_tail(const JointTraversalModel& model, double delay, int k_max,
                                               std::int64_t reps, Stream& rng) {
    if (reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
    std::vector<std::int64_t> alive(static_cast<std::size_t>(k_max) + 1, 0);
    for (std::int64_t r = 0; r < reps; ++r) {
        double s = 0.0;
        ++alive[0];
        for (int k = 1; k <= k_max; ++k) {
            const auto w = sample_pair(model, rng);
            s += w.correct - w.fake;
            if (s <= -delay) break;
            ++alive[k];
        }
    }
    std::vector<TauTailEstimate> out;
    out.reserve(alive.size());
    for (int k = 0; k <= k_max; ++k) {
        const double p = static_cast<double>(alive[k]) / static_cast<double>(reps);
        out.push_back({k, delay, p, std::sqrt(p * (1.0 - p) / static_cast<double>(reps)), reps});
    }
    return out;
}

}  // namespace newsrace
