#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "newsrace/cm_graph.hpp"

namespace newsrace {

/// Outcome of one fake/correct race from a common source.
///
/// A vertex is exposed when fake news arrives strictly before correct news
/// (the source always is). fake_time holds the gated arrival time: the
/// earliest arrival over relaxations from exposed vertices only, which may be
/// finite for a blocked vertex.
struct ExposureResult {
    Vertex source = 0;
    double delay = 0.0;
    std::vector<double> correct_time;
    std::vector<double> fake_time;
    std::vector<std::uint8_t> exposed;
    std::int64_t n_fake = 0;

    std::size_t n() const { return fake_time.size(); }
};

/// C(v) = d + lR-distance from the source; +inf off the source's component.
std::vector<double> correct_arrivals(const WeightedMultiGraph& wg, Vertex source, double delay);

/// Gated lF shortest paths: a settled vertex relays fake news iff it is the
/// source or F(u) < C(u) strictly; ties go to correct news. A relay forwards
/// along every incident edge even if correct news reaches it afterwards.
/// Throws InconsistentArrivalMap if `correct` does not come from
/// correct_arrivals on the same graph, source and delay.
ExposureResult fake_exposure(const WeightedMultiGraph& wg, Vertex source, double delay,
                             std::span<const double> correct);

/// Convenience: correct_arrivals followed by fake_exposure.
ExposureResult run_competition(const WeightedMultiGraph& wg, Vertex source, double delay);

/// Fraction of all n vertices that are exposed with F(v) <= t, for each t.
std::vector<double> epidemic_curve(const ExposureResult& res, std::span<const double> grid);

/// The a-th smallest fake time among exposed vertices; +inf if fewer exist.
double time_to_reach(const ExposureResult& res, std::int64_t a);

}  // namespace newsrace
