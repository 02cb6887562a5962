#include "newsrace/competition.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

#include "newsrace/errors.hpp"

namespace newsrace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Entry {
    double time;
    Vertex v;
    bool operator>(const Entry& o) const { return time > o.time || (time == o.time && v > o.v); }
};

using MinHeap = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;

void check_source(const WeightedMultiGraph& wg, Vertex source) {
    if (source < 0 || std::size_t(source) >= wg.graph.n()) throw std::out_of_range("source outside vertex range");
}

}  // namespace

std::vector<double> correct_arrivals(const WeightedMultiGraph& wg, Vertex source, double delay) {
    check_source(wg, source);
    const auto& g = wg.graph;
    std::vector<double> dist(g.n(), kInf);
    std::vector<std::uint8_t> done(g.n(), 0);
    MinHeap heap;
    dist[source] = delay;
    heap.push({delay, source});
    while (!heap.empty()) {
        auto [t, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (const auto& inc : g.incidence(u)) {
            if (inc.other == u) continue;  // self-loop
            const double cand = t + wg.weights[inc.edge].correct;
            if (cand < dist[inc.other]) {
                dist[inc.other] = cand;
                heap.push({cand, inc.other});
            }
        }
    }
    return dist;
}

ExposureResult fake_exposure(const WeightedMultiGraph& wg, Vertex source, double delay,
                             std::span<const double> correct) {
    check_source(wg, source);
    const auto& g = wg.graph;
    if (correct.size() != g.n()) throw InconsistentArrivalMap("correct-arrival map size differs from vertex count");
    if (correct[source] != delay) throw InconsistentArrivalMap("correct-arrival map does not start at the source");

    ExposureResult res;
    res.source = source;
    res.delay = delay;
    res.correct_time.assign(correct.begin(), correct.end());
    res.fake_time.assign(g.n(), kInf);
    res.exposed.assign(g.n(), 0);

    std::vector<std::uint8_t> done(g.n(), 0);
    MinHeap heap;
    res.fake_time[source] = 0.0;
    heap.push({0.0, source});
    while (!heap.empty()) {
        auto [t, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = 1;
        // Settled in increasing F order, so the gate is final here.
        const bool relays = (u == source) || (t < res.correct_time[u]);
        if (!relays) continue;
        res.exposed[u] = 1;
        ++res.n_fake;
        for (const auto& inc : g.incidence(u)) {
            if (inc.other == u) continue;
            const double cand = t + wg.weights[inc.edge].fake;
            if (cand < res.fake_time[inc.other]) {
                res.fake_time[inc.other] = cand;
                heap.push({cand, inc.other});
            }
        }
    }
    return res;
}

ExposureResult run_competition(const WeightedMultiGraph& wg, Vertex source, double delay) {
    auto c = correct_arrivals(wg, source, delay);
    return fake_exposure(wg, source, delay, c);
}

std::vector<double> epidemic_curve(const ExposureResult& res, std::span<const double> grid) {
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(res.n_fake));
    for (std::size_t v = 0; v < res.n(); ++v)
        if (res.exposed[v]) times.push_back(res.fake_time[v]);
    std::sort(times.begin(), times.end());
    std::vector<double> out;
    out.reserve(grid.size());
    const double n = static_cast<double>(res.n());
    for (double t : grid) {
        auto count = std::upper_bound(times.begin(), times.end(), t) - times.begin();
        out.push_back(static_cast<double>(count) / n);
    }
    return out;
}

double time_to_reach(const ExposureResult& res, std::int64_t a) {
    if (a < 1) throw std::invalid_argument("time_to_reach needs a >= 1");
    if (a > res.n_fake) return kInf;
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(res.n_fake));
    for (std::size_t v = 0; v < res.n(); ++v)
        if (res.exposed[v]) times.push_back(res.fake_time[v]);
    std::nth_element(times.begin(), times.begin() + (a - 1), times.end());
    return times[static_cast<std::size_t>(a - 1)];
}

}  // namespace newsrace
