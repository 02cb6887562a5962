#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "newsrace/cm_graph.hpp"
#include "support.hpp"

using namespace newsrace;

namespace {

std::vector<int> degrees_of(const MultiGraph& g) {
    std::vector<int> deg(g.n(), 0);
    for (const auto& e : g.edges()) {
        ++deg[e.u];
        ++deg[e.v];
    }
    return deg;
}

}  // namespace

TEST_CASE("build_cm examples") {
    Stream rng = make_stream(1);
    for (int i = 0; i < 20; ++i) {
        auto g = build_cm(normalize_sequence(std::vector<int>{1, 1}), rng);
        REQUIRE(g.m() == 1);
        auto e = g.edges()[0];
        CHECK(std::min(e.u, e.v) == 0);
        CHECK(std::max(e.u, e.v) == 1);
    }
    auto loop = build_cm(normalize_sequence(std::vector<int>{2}), rng);
    REQUIRE(loop.m() == 1);
    CHECK(loop.edges()[0].u == 0);
    CHECK(loop.edges()[0].v == 0);
    CHECK(loop.degree(0) == 2);
}

TEST_CASE("property: degrees preserved, edge count total/2, components partition") {
    Stream rng = make_stream(2);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<int> raw(testgen::integer(rng, 1, 40));
        for (auto& x : raw) x = testgen::integer(rng, 1, 6);
        auto seq = normalize_sequence(raw);
        auto g = build_cm(seq, rng);
        CHECK(static_cast<std::int64_t>(g.m()) * 2 == seq.total);
        CHECK(degrees_of(g) == seq.d);
        for (std::size_t v = 0; v < g.n(); ++v) CHECK(g.degree(static_cast<Vertex>(v)) == seq.d[v]);
        auto comps = largest_component(g);
        std::int64_t total = 0;
        for (auto s : comps.sizes) total += s;
        CHECK(total == static_cast<std::int64_t>(g.n()));
        CHECK(comps.sizes[comps.largest] == *std::max_element(comps.sizes.begin(), comps.sizes.end()));
        for (const auto& e : g.edges()) CHECK(comps.membership[e.u] == comps.membership[e.v]);
    }
}

TEST_CASE("property: identical stream states give identical builds") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Stream a = make_stream(seed), b = make_stream(seed);
        auto seq = normalize_sequence(std::vector<int>(50, 3));
        auto ga = build_cm(seq, a);
        auto gb = build_cm(seq, b);
        CHECK(ga == gb);
        JointTraversalModel m{Marginal::exponential(1), Marginal::exponential(2), Coupling::Independent};
        auto wa = assign_weights(ga, m, a);
        auto wb = assign_weights(gb, m, b);
        for (std::size_t e = 0; e < wa.weights.size(); ++e) {
            CHECK(wa.weights[e].fake == wb.weights[e].fake);
            CHECK(wa.weights[e].correct == wb.weights[e].correct);
        }
    }
}

TEST_CASE("assign_weights examples") {
    Stream rng = make_stream(3);
    auto seq = normalize_sequence(std::vector<int>(1000, 4));
    auto g = build_cm(seq, rng);
    auto det = assign_weights(g, {Marginal::deterministic(1), Marginal::deterministic(2), Coupling::Independent}, rng);
    REQUIRE(det.weights.size() == g.m());
    for (auto w : det.weights) {
        CHECK(w.fake == 1.0);
        CHECK(w.correct == 2.0);
    }
    auto co = assign_weights(g, {Marginal::exponential(1), Marginal::exponential(1), Coupling::Comonotone}, rng);
    for (auto w : co.weights) CHECK(w.fake == w.correct);

    auto big = build_cm(normalize_sequence(std::vector<int>(50000, 4)), rng);
    auto ex = assign_weights(big, {Marginal::exponential(1), Marginal::exponential(1), Coupling::Independent}, rng);
    REQUIRE(ex.weights.size() == 100000);
    double s = 0;
    for (auto w : ex.weights) {
        CHECK(w.fake >= 0.0);
        s += w.fake;
    }
    CHECK(std::abs(s / 1e5 - 1.0) < 3.0 / std::sqrt(1e5));
}

TEST_CASE("largest_component examples") {
    MultiGraph loops(2, {{0, 0}, {1, 1}});
    auto c = largest_component(loops);
    CHECK(c.sizes == std::vector<std::int64_t>{1, 1});
    CHECK(c.largest == 0);

    MultiGraph pair(2, {{0, 1}});
    auto p = largest_component(pair);
    CHECK(p.sizes == std::vector<std::int64_t>{2});

    // (2,2,2) realizes either a triangle or a loop plus a double edge; the
    // triangle is the only pairing with no self-loop.
    Stream rng = make_stream(4);
    int triangles = 0;
    for (int i = 0; i < 200; ++i) {
        auto g = build_cm(normalize_sequence(std::vector<int>{2, 2, 2}), rng);
        const bool has_loop =
            std::any_of(g.edges().begin(), g.edges().end(), [](const Edge& e) { return e.u == e.v; });
        if (has_loop) continue;
        ++triangles;
        auto comps = largest_component(g);
        CHECK(comps.sizes.size() == 1);
        CHECK(comps.sizes[0] == 3);
    }
    CHECK(triangles > 0);
}

TEST_CASE("uniform matching of four half-edges passes chi-square at 1%") {
    Stream rng = make_stream(5);
    std::map<int, int> counts;  // partner of vertex 0
    const int builds = 10000;
    for (int i = 0; i < builds; ++i) {
        auto g = build_cm(normalize_sequence(std::vector<int>{1, 1, 1, 1}), rng);
        for (const auto& e : g.edges()) {
            if (e.u == 0) ++counts[e.v];
            if (e.v == 0) ++counts[e.u];
        }
    }
    double chi2 = 0;
    for (int v = 1; v <= 3; ++v) {
        const double expect = builds / 3.0;
        chi2 += (counts[v] - expect) * (counts[v] - expect) / expect;
    }
    CHECK(chi2 < 9.2103);  // chi-square(2) 99th percentile
}

TEST_CASE("graph dump round trip") {
    Stream rng = make_stream(6);
    auto g = build_cm(normalize_sequence(std::vector<int>{3, 3, 2, 2, 1, 1}), rng);
    auto wg = assign_weights(g, {Marginal::exponential(1.3), Marginal::uniform(0, 1), Coupling::Independent}, rng);
    std::stringstream ss;
    write_graph_dump(ss, wg);
    std::string first;
    std::getline(ss, first);
    CHECK(first == "6 6");
    ss.seekg(0);
    auto back = read_graph_dump(ss);
    CHECK(back.graph == wg.graph);
    for (std::size_t e = 0; e < wg.weights.size(); ++e) {
        CHECK(back.weights[e].fake == wg.weights[e].fake);
        CHECK(back.weights[e].correct == wg.weights[e].correct);
    }
}
