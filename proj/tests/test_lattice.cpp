#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "isingpa/error.hpp"
#include "isingpa/lattice.hpp"
#include "oracles.hpp"

using namespace isingpa;

namespace {

std::set<Vertex> as_set(const std::vector<Vertex>& v) { return {v.begin(), v.end()}; }

Vertex vx(std::initializer_list<int> c) { return Vertex{std::vector<int>(c)}; }

int oracle_p(Norm norm) { return norm.is_infinity() ? 0 : norm.p(); }

}  // namespace

TEST_CASE("norm parsing and exact membership") {
    CHECK(Norm::parse("inf").is_infinity());
    CHECK(Norm::parse("infinity").is_infinity());
    CHECK(Norm::parse("2").p() == 2);
    CHECK_THROWS_AS((void)Norm::parse("0"), Error);
    CHECK_THROWS_AS((void)Norm::parse("1.5"), Error);
    const std::vector<int> v{3, 4};
    CHECK(Norm::lp(2).within(v, 5));
    CHECK_FALSE(Norm::lp(2).within(v, 4));
    CHECK(Norm::lp(1).within(v, 7));
    CHECK_FALSE(Norm::lp(1).within(v, 6));
    CHECK(Norm::infinity().within(v, 4));
}

TEST_CASE("neighbors on the square and king lattices") {
    TorusLattice square(2, 8, 1, Norm::lp(1));
    CHECK(as_set(square.neighbors(vx({0, 0}))) == std::set<Vertex>{vx({1, 0}), vx({7, 0}), vx({0, 1}), vx({0, 7})});
    TorusLattice king(2, 8, 1, Norm::infinity());
    CHECK(king.neighbors(vx({0, 0})).size() == 8);
    TorusLattice ring(1, 4, 1, Norm::lp(1));
    CHECK(as_set(ring.neighbors(vx({3}))) == std::set<Vertex>{vx({2}), vx({0})});
}

TEST_CASE("neighbor table matches the coordinate oracle") {
    for (int d : {1, 2}) {
        for (int n : {3, 4, 5, 6}) {
            for (int rho : {1, 2}) {
                for (Norm norm : {Norm::lp(1), Norm::lp(2), Norm::infinity()}) {
                    if (d == 1 && n > 5) continue;
                    TorusLattice lat(d, n, rho, norm);
                    const oracle::Geometry g{d, n, rho, oracle_p(norm)};
                    for (Site x = 0; x < lat.site_count(); ++x) {
                        std::vector<std::size_t> got(lat.neighbor_sites(x).begin(), lat.neighbor_sites(x).end());
                        std::sort(got.begin(), got.end());
                        CHECK(got == oracle::neighbors(g, x));
                    }
                    std::vector<std::pair<std::size_t, std::size_t>> got_edges(lat.edges().begin(), lat.edges().end());
                    std::sort(got_edges.begin(), got_edges.end());
                    CHECK(got_edges == oracle::edges(g));
                }
            }
        }
    }
}

TEST_CASE("translation covariance of neighborhoods") {
    for (Norm norm : {Norm::lp(1), Norm::infinity()}) {
        TorusLattice lat(2, 5, 1, norm);
        for (Site x = 0; x < lat.site_count(); ++x) {
            for (Site y = 0; y < lat.site_count(); ++y) {
                const auto vy = lat.vertex(y);
                const auto sum = lat.translate(x, vy.coords);
                std::set<Site> shifted;
                for (Site z : lat.neighbor_sites(x)) shifted.insert(lat.translate(z, vy.coords));
                const auto direct = lat.neighbor_sites(sum);
                CHECK(shifted == std::set<Site>(direct.begin(), direct.end()));
            }
        }
    }
}

TEST_CASE("graph distance is a metric") {
    for (int d : {1, 2}) {
        for (int n = 2; n <= 6; ++n) {
            for (Norm norm : {Norm::lp(1), Norm::infinity()}) {
                TorusLattice lat(d, n, 1, norm);
                const std::size_t v = lat.site_count();
                std::vector<std::vector<int>> dist(v);
                for (Site x = 0; x < v; ++x) dist[x] = lat.distances_from(x);
                for (Site x = 0; x < v; ++x) {
                    CHECK(dist[x][x] == 0);
                    for (Site y = 0; y < v; ++y) {
                        CHECK(dist[x][y] == dist[y][x]);
                        if (x != y) CHECK(dist[x][y] > 0);
                        for (Site z = 0; z < v; ++z) CHECK(dist[x][z] <= dist[x][y] + dist[y][z]);
                    }
                }
            }
        }
    }
    TorusLattice lat(2, 8, 1, Norm::lp(1));
    CHECK(lat.graph_distance(lat.site(vx({0, 0})), lat.site(vx({3, 6}))) == 5);
}

TEST_CASE("ball sizes and internal edge counts") {
    CHECK(TorusLattice(2, 8, 1, Norm::lp(1)).ball(vx({0, 0}), 1).size() == 5);
    CHECK(TorusLattice(2, 8, 1, Norm::infinity()).ball(vx({0, 0}), 1).size() == 9);
    CHECK_THROWS_WITH_AS((void)TorusLattice(1, 4, 1, Norm::lp(1)).ball(vx({0}), 2), doctest::Contains("LatticeTooSmall"),
                         Error);
    {
        TorusLattice lat(2, 8, 1, Norm::lp(1));
        CHECK(internal_edge_count(lat, lat.ball(vx({2, 3}), 1)) == 4);
    }
    {
        TorusLattice lat(1, 8, 1, Norm::lp(1));
        CHECK(internal_edge_count(lat, lat.ball(vx({5}), 1)) == 2);
    }
    {
        // Oracle: adjacent pairs inside the 3x3 block under the king step.
        const oracle::Geometry g{2, 9, 1, 0};
        std::vector<oracle::Coords> block;
        for (int i = -1; i <= 1; ++i) {
            for (int j = -1; j <= 1; ++j) block.push_back({4 + i, 4 + j});
        }
        std::size_t expected = 0;
        for (std::size_t i = 0; i < block.size(); ++i) {
            for (std::size_t j = i + 1; j < block.size(); ++j) expected += oracle::adjacent(g, block[i], block[j]);
        }
        TorusLattice lat(2, 9, 1, Norm::infinity());
        CHECK(internal_edge_count(lat, lat.ball(vx({4, 4}), 1)) == expected);
        CHECK(expected == 20);
    }
}

TEST_CASE("ball boundary and closure") {
    TorusLattice lat(1, 9, 1, Norm::lp(1));
    const auto b = lat.ball(vx({0}), 2);
    CHECK(as_set(b.members) == std::set<Vertex>{vx({7}), vx({8}), vx({0}), vx({1}), vx({2})});
    CHECK(as_set(b.boundary) == std::set<Vertex>{vx({6}), vx({3})});
    CHECK(b.closure().size() == 7);
}

TEST_CASE("beta and alpha do not depend on n above the overlap bound") {
    for (int d : {1, 2}) {
        for (int rho : {1, 2}) {
            for (Norm norm : {Norm::lp(1), Norm::lp(2), Norm::infinity()}) {
                for (int r = 0; r <= 2; ++r) {
                    if (d == 2 && rho * r > 2) continue;
                    const int n1 = 2 * rho * r + rho + 1;
                    const int n2 = n1 + 3;
                    TorusLattice l1(d, n1, rho, norm), l2(d, n2, rho, norm);
                    const auto b1 = l1.ball(l1.vertex(0), r);
                    const auto b2 = l2.ball(l2.vertex(static_cast<Site>(l2.site_count() - 1)), r);
                    CHECK(b1.size() == b2.size());
                    CHECK(internal_edge_count(l1, b1) == internal_edge_count(l2, b2));
                    const auto shape = BallShape::get({d, rho, norm}, r);
                    CHECK(shape->size() == b1.size());
                    CHECK(shape->edges().size() == internal_edge_count(l1, b1));
                    CHECK(shape->size() == oracle::ball_offsets(d, rho, oracle_p(norm), r).size());
                }
            }
        }
    }
}

TEST_CASE("vertex and site numbering are lexicographic") {
    TorusLattice lat(2, 4, 1, Norm::lp(1));
    CHECK(lat.site(vx({1, 2})) == 6);
    CHECK(lat.vertex(6) == vx({1, 2}));
    CHECK(lat.site(vx({-1, 5})) == lat.site(vx({3, 1})));
    for (Site s = 1; s < lat.site_count(); ++s) CHECK(lat.vertex(s - 1) < lat.vertex(s));
}

TEST_CASE("invalid lattices are rejected") {
    CHECK_THROWS_AS(TorusLattice(0, 4, 1, Norm::lp(1)), Error);
    CHECK_THROWS_AS(TorusLattice(1, 0, 1, Norm::lp(1)), Error);
    CHECK_THROWS_AS(TorusLattice(1, 4, 0, Norm::lp(1)), Error);
}
