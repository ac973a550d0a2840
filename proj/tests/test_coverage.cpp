#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "tileforge/coverage.hpp"
#include "tileforge/error.hpp"

using namespace tileforge;

namespace {

GeoPolygon rect_poly(const BBox& b) {
    return GeoPolygon::make({{b.min_lon, b.min_lat},
                             {b.max_lon, b.min_lat},
                             {b.max_lon, b.max_lat},
                             {b.min_lon, b.max_lat}});
}

} // namespace

TEST_CASE("query covered by its own footprint") {
    const auto rep = check_coverage(rect_poly({0, 0, 1, 1}), {{0, 0, 1, 1}});
    CHECK(rep.covered);
    CHECK(rep.gap_area == 0.0);
    CHECK(rep.gaps.empty());
}

TEST_CASE("half-covered rectangle reports the other half") {
    const auto rep = check_coverage(rect_poly({0, 0, 2, 1}), {{0, 0, 1, 1}});
    CHECK_FALSE(rep.covered);
    REQUIRE(rep.gaps.size() == 1);
    CHECK(rep.gaps.front() == BBox{1, 0, 2, 1});
    CHECK(rep.gap_area == Catch::Approx(1.0));
}

TEST_CASE("no footprints leaves the whole query uncovered") {
    const auto rep = check_coverage(rect_poly({3, 3, 5, 4}), {});
    CHECK_FALSE(rep.covered);
    CHECK(rep.gap_area == Catch::Approx(2.0));
}

TEST_CASE("footprint containing the query bbox covers it") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 20; ++i) {
        const GeoPolygon q = fixtures::star_polygon(rng, {5.0, 5.0}, 0.4, 1.2, 10);
        const auto rep = check_coverage(q, {q.bbox()});
        REQUIRE(rep.covered);
    }
}

TEST_CASE("gap accounting is conserved and monotone") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 4.0), uw(0.3, 2.0);
    const GeoPolygon q = rect_poly({0, 0, 4, 4});
    std::vector<BBox> fps;
    double prev = polygon_area(q);
    for (int i = 0; i < 25; ++i) {
        const double w = u(rng), s = u(rng);
        fps.push_back({w, s, w + uw(rng), s + uw(rng)});
        const auto rep = check_coverage(q, fps);
        REQUIRE(rep.gap_area <= prev + 1e-9); // more footprints, never more gap
        prev = rep.gap_area;

        // conservation: gap + covered-within-query == query area
        const double covered = polygon_area(q) - rep.gap_area;
        double inter = 0.0;
        for (const auto& cell : rep.gaps) inter += cell.area();
        CHECK(rep.gap_area == Catch::Approx(inter).margin(1e-9));
        CHECK(covered >= -1e-9);
    }
}

TEST_CASE("coverage verdicts match the lattice oracle") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int n = 0; n < 25; ++n) {
        const GeoPolygon q = fixtures::star_polygon(rng, {2.0, 2.0}, 0.8, 1.6, 11);
        const BBox qb = q.bbox();
        std::vector<BBox> fps;
        const bool want_covered = n % 2 == 0;
        if (want_covered) {
            // partition the bbox into covering strips
            const int k = 2 + static_cast<int>(u01(rng) * 4);
            for (int i = 0; i < k; ++i) {
                const double x0 = qb.min_lon + qb.width() * i / k;
                const double x1 = qb.min_lon + qb.width() * (i + 1) / k;
                fps.push_back({x0, qb.min_lat, x1, qb.max_lat});
            }
        } else {
            // full cover minus a hole strictly inside the polygon kernel
            const double hw = 0.2 * qb.width(), hh = 0.2 * qb.height();
            const double cx = 2.0, cy = 2.0;
            fps.push_back({qb.min_lon, qb.min_lat, cx - hw / 2, qb.max_lat});
            fps.push_back({cx + hw / 2, qb.min_lat, qb.max_lon, qb.max_lat});
            fps.push_back({cx - hw / 2, qb.min_lat, cx + hw / 2, cy - hh / 2});
            fps.push_back({cx - hw / 2, cy + hh / 2, cx + hw / 2, qb.max_lat});
        }
        const auto rep = check_coverage(q, fps);
        const auto ref = oracle::sample_coverage(q, fps, 500);
        REQUIRE(rep.covered == ref.covered);
        if (!rep.covered)
            REQUIRE(rep.gap_area == Catch::Approx(ref.gap_area).epsilon(0.01));
    }
}

TEST_CASE("coverage result ignores footprint order") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 3.0), uw(0.2, 1.5);
    const GeoPolygon q = rect_poly({0, 0, 3, 3});
    std::vector<BBox> fps;
    for (int i = 0; i < 12; ++i) {
        const double w = u(rng), s = u(rng);
        fps.push_back({w, s, w + uw(rng), s + uw(rng)});
    }
    const auto a = check_coverage(q, fps);
    std::shuffle(fps.begin(), fps.end(), rng);
    const auto b = check_coverage(q, fps);
    CHECK(a.covered == b.covered);
    CHECK(a.gap_area == Catch::Approx(b.gap_area).margin(1e-12));
    CHECK(a.gaps.size() == b.gaps.size());
}

TEST_CASE("rect_union_area basics and Monte-Carlo agreement") {
    CHECK(rect_union_area({}) == 0.0);
    CHECK(rect_union_area({{0, 0, 1, 1}, {0, 0, 1, 1}}) == Catch::Approx(1.0));

    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(0.0, 10.0), uw(0.5, 4.0);
    std::vector<BBox> rects;
    for (int i = 0; i < 50; ++i) {
        const double w = u(rng), s = u(rng);
        rects.push_back({w, s, w + uw(rng), s + uw(rng)});
    }
    const double mc = oracle::mc_rect_union_area(rects, 1000000, 5);
    CHECK(rect_union_area(rects) == Catch::Approx(mc).epsilon(0.005));
}

TEST_CASE("self-intersecting query polygons are rejected") {
    CHECK_THROWS_AS(GeoPolygon::make({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), InvalidPolygon);
}
