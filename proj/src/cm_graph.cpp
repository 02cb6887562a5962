#include "newsrace/cm_graph.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "newsrace/errors.hpp"

namespace newsrace {

MultiGraph::MultiGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    offset_.assign(n_ + 1, 0);
    for (const auto& e : edges_) {
        if (e.u < 0 || e.v < 0 || std::size_t(e.u) >= n_ || std::size_t(e.v) >= n_)
            throw std::out_of_range("edge endpoint outside vertex range");
        ++offset_[e.u + 1];
        ++offset_[e.v + 1];
    }
    std::partial_sum(offset_.begin(), offset_.end(), offset_.begin());
    adj_.resize(static_cast<std::size_t>(offset_.back()));
    std::vector<std::int64_t> fill(offset_.begin(), offset_.end() - 1);
    for (std::size_t id = 0; id < edges_.size(); ++id) {
        const auto& e = edges_[id];
        adj_[fill[e.u]++] = {static_cast<EdgeId>(id), e.v};
        adj_[fill[e.v]++] = {static_cast<EdgeId>(id), e.u};
    }
}

MultiGraph build_cm(const DegreeSequence& seq, Stream& rng) {
    std::vector<Vertex> half;
    half.reserve(static_cast<std::size_t>(seq.total));
    for (std::size_t v = 0; v < seq.n(); ++v) half.insert(half.end(), seq.d[v], static_cast<Vertex>(v));
    if (half.size() % 2 != 0) throw std::invalid_argument("odd number of half-edges; normalize the sequence first");
    std::shuffle(half.begin(), half.end(), rng);
    std::vector<Edge> edges(half.size() / 2);
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i] = {half[2 * i], half[2 * i + 1]};
    return MultiGraph(seq.n(), std::move(edges));
}

WeightedMultiGraph assign_weights(MultiGraph g, const JointTraversalModel& model, Stream& rng) {
    WeightedMultiGraph wg{std::move(g), {}};
    wg.weights.resize(wg.graph.m());
    for (auto& w : wg.weights) w = sample_pair(model, rng);
    return wg;
}

Components largest_component(const MultiGraph& g) {
    const std::size_t n = g.n();
    std::vector<std::int32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::int32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& e : g.edges()) {
        auto a = find(e.u), b = find(e.v);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    Components c;
    c.membership.assign(n, -1);
    std::vector<std::int32_t> id_of_root(n, -1);
    for (std::size_t v = 0; v < n; ++v) {
        auto r = find(static_cast<std::int32_t>(v));
        if (id_of_root[r] < 0) {
            id_of_root[r] = static_cast<std::int32_t>(c.sizes.size());
            c.sizes.push_back(0);
        }
        c.membership[v] = id_of_root[r];
        ++c.sizes[id_of_root[r]];
    }
    c.largest = static_cast<std::int32_t>(std::max_element(c.sizes.begin(), c.sizes.end()) - c.sizes.begin());
    return c;
}

void write_graph_dump(std::ostream& out, const WeightedMultiGraph& wg) {
    out << wg.graph.n() << ' ' << wg.graph.m() << '\n';
    char buf[160];
    for (std::size_t id = 0; id < wg.graph.m(); ++id) {
        const auto& e = wg.graph.edges()[id];
        const auto& w = wg.weights[id];
        std::snprintf(buf, sizeof buf, "%zu %d %d %.17g %.17g\n", id, e.u, e.v, w.fake, w.correct);
        out << buf;
    }
}

void write_graph_dump(const std::string& path, const WeightedMultiGraph& wg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_graph_dump(out, wg);
    if (!out) throw IoError("write failed for '" + path + "'");
}

WeightedMultiGraph read_graph_dump(std::istream& in) {
    std::size_t n = 0, m = 0;
    if (!(in >> n >> m)) throw IoError("graph dump: bad header");
    std::vector<Edge> edges(m);
    std::vector<TraversalPair> weights(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t id;
        std::string lf, lr;
        if (!(in >> id >> edges[i].u >> edges[i].v >> lf >> lr) || id != i) throw IoError("graph dump: bad edge line");
        weights[i] = {std::strtod(lf.c_str(), nullptr), std::strtod(lr.c_str(), nullptr)};
    }
    return {MultiGraph(n, std::move(edges)), std::move(weights)};
}

}  // namespace newsrace
