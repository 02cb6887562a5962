#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "newsrace/degree.hpp"
#include "newsrace/random.hpp"
#include "newsrace/traversal.hpp"

namespace newsrace {

using Vertex = std::int32_t;
using EdgeId = std::int32_t;

struct Edge {
    Vertex u;
    Vertex v;

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct Incidence {
    EdgeId edge;
    Vertex other;

    friend bool operator==(const Incidence&, const Incidence&) = default;
};

/// Multigraph with self-loops and parallel edges. Edge ids index `edges`.
/// A self-loop appears twice in the incidence list of its vertex, so
/// incidence(v).size() is the multigraph degree.
class MultiGraph {
public:
    MultiGraph() = default;
    MultiGraph(std::size_t n, std::vector<Edge> edges);

    std::size_t n() const { return n_; }
    std::size_t m() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }

    std::span<const Incidence> incidence(Vertex v) const {
        return {adj_.data() + offset_[v], adj_.data() + offset_[v + 1]};
    }
    int degree(Vertex v) const { return static_cast<int>(offset_[v + 1] - offset_[v]); }

    friend bool operator==(const MultiGraph&, const MultiGraph&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::int64_t> offset_;
    std::vector<Incidence> adj_;
};

struct WeightedMultiGraph {
    MultiGraph graph;
    std::vector<TraversalPair> weights;  // indexed by EdgeId
};

/// Uniform perfect matching of the half-edges: list them, shuffle, pair
/// consecutive entries.
MultiGraph build_cm(const DegreeSequence& seq, Stream& rng);

/// One independent sample_pair per edge, in edge-id order.
WeightedMultiGraph assign_weights(MultiGraph g, const JointTraversalModel& model, Stream& rng);

struct Components {
    std::vector<std::int32_t> membership;  // vertex -> component id
    std::vector<std::int64_t> sizes;       // component id -> size
    std::int32_t largest = 0;              // smallest id among those of maximal size
};

/// Component ids are assigned in order of each component's smallest vertex.
Components largest_component(const MultiGraph& g);

/// Header `n m`, then `edgeId u v lF lR` per edge, 17 significant digits.
void write_graph_dump(std::ostream& out, const WeightedMultiGraph& wg);
void write_graph_dump(const std::string& path, const WeightedMultiGraph& wg);
WeightedMultiGraph read_graph_dump(std::istream& in);

}  // namespace newsrace
