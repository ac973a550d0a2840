#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tileforge/error.hpp"
#include "tileforge/geo.hpp"
#include "tileforge/geometry.hpp"
#include "tileforge/vectorize.hpp"

namespace tileforge {

struct SceneSpec {
    BBox region;
    int grid_rows = 1, grid_cols = 1;
    double overlap_frac = 0.15;           // fraction of tile extent shared with a neighbor
    int tile_width = 0, tile_height = 0;  // pixels
    int n_islands = 1;
    int vertices_min = 8, vertices_max = 16;
    double noise_flip_prob = 0.0;
    double jitter_px = 0.0;               // per-tile intensity bias amplitude
    bool stamp = true;
    std::uint64_t seed = 0;
    bool centered = false;                // pin island 0 to the region center
    double radius_frac_min = 0.55, radius_frac_max = 0.85;

    void validate() const {
        if (!region.valid() || region.area() <= 0.0)
            throw SpecInvalid("region must have positive area");
        if (grid_rows < 1 || grid_cols < 1) throw SpecInvalid("grid dims must be >= 1");
        if (overlap_frac < 0.0 || overlap_frac >= 0.5)
            throw SpecInvalid("overlap_frac must be in [0, 0.5)");
        if (tile_width < 32 || tile_height < 32)
            throw SpecInvalid("px_per_tile must be at least 32x32");
        if (n_islands < 1) throw SpecInvalid("n_islands must be >= 1");
        if (vertices_min < 3 || vertices_max < vertices_min)
            throw SpecInvalid("island_vertices range invalid");
        if (noise_flip_prob < 0.0 || noise_flip_prob > 1.0)
            throw SpecInvalid("noise_flip_prob must be in [0, 1]");
        if (jitter_px < 0.0) throw SpecInvalid("jitter_px must be >= 0");
        if (radius_frac_min <= 0.0 || radius_frac_max > 1.0 ||
            radius_frac_max < radius_frac_min)
            throw SpecInvalid("island_radius_frac range invalid");
    }
};

inline SceneSpec scene_spec_from_json(const nlohmann::json& j) {
    SceneSpec s;
    try {
        const auto& r = j.at("region");
        s.region = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                    r.at(3).get<double>()};
        s.grid_rows = j.at("grid").at(0).get<int>();
        s.grid_cols = j.at("grid").at(1).get<int>();
        s.tile_width = j.at("px_per_tile").at(0).get<int>();
        s.tile_height = j.at("px_per_tile").at(1).get<int>();
        s.n_islands = j.at("n_islands").get<int>();
        if (j.contains("overlap_frac")) s.overlap_frac = j["overlap_frac"].get<double>();
        if (j.contains("island_vertices")) {
            s.vertices_min = j["island_vertices"].at(0).get<int>();
            s.vertices_max = j["island_vertices"].at(1).get<int>();
        }
        if (j.contains("noise_flip_prob")) s.noise_flip_prob = j["noise_flip_prob"].get<double>();
        if (j.contains("jitter_px")) s.jitter_px = j["jitter_px"].get<double>();
        if (j.contains("stamp")) s.stamp = j["stamp"].get<bool>();
        if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("centered")) s.centered = j["centered"].get<bool>();
        if (j.contains("island_radius_frac")) {
            s.radius_frac_min = j["island_radius_frac"].at(0).get<double>();
            s.radius_frac_max = j["island_radius_frac"].at(1).get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw SpecInvalid(std::string("bad scene spec: ") + e.what());
    }
    s.validate();
    return s;
}

struct GroundTruth {
    std::vector<GeoPolygon> polygons;
    std::vector<std::pair<RasterTile, StampMask>> tiles;
    std::vector<TileMeta> manifest;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// fixed mapping from engine output to [0, 1); never use distribution classes,
// their sequences differ across standard library implementations
inline double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::min(hi, lo + static_cast<int>(u01(rng) * (hi - lo + 1)));
}

} // namespace detail

/// Seeded scene synthesis: star-convex islands rasterized into an
/// overlapping tile grid, with watermark stamps, per-tile intensity bias,
/// and salt-and-pepper flips layered on per the SceneSpec knobs. Same
/// SceneSpec and seed give bit-identical tiles and manifest.
inline GroundTruth generate(const SceneSpec& spec) {
    spec.validate();
    GroundTruth gt;

    const int W = spec.tile_width, H = spec.tile_height;
    const int ov_x = static_cast<int>(std::lround(spec.overlap_frac * W));
    const int ov_y = static_cast<int>(std::lround(spec.overlap_frac * H));
    const long total_x = static_cast<long>(spec.grid_cols) * W -
                         static_cast<long>(spec.grid_cols - 1) * ov_x;
    const long total_y = static_cast<long>(spec.grid_rows) * H -
                         static_cast<long>(spec.grid_rows - 1) * ov_y;
    const double lon_per_px = spec.region.width() / static_cast<double>(total_x);
    const double lat_per_px = spec.region.height() / static_cast<double>(total_y);

    // islands: radial polygons with strictly increasing vertex angles
    std::mt19937_64 rng(spec.seed);
    const double half_min = 0.5 * std::min(spec.region.width(), spec.region.height());
    const double r_base = half_min / std::sqrt(static_cast<double>(spec.n_islands));
    std::vector<GeoPoint> centers;
    std::vector<double> radii;
    for (int i = 0; i < spec.n_islands; ++i) {
        const int k = detail::uniform_int(rng, spec.vertices_min, spec.vertices_max);
        const double frac = spec.radius_frac_min +
                            (spec.radius_frac_max - spec.radius_frac_min) * detail::u01(rng);
        double R = r_base * frac;
        GeoPoint c;
        if (spec.centered && i == 0) {
            c = {0.5 * (spec.region.min_lon + spec.region.max_lon),
                 0.5 * (spec.region.min_lat + spec.region.max_lat)};
        } else {
            int failures = 0;
            for (;;) {
                const double mlon = std::min(R, 0.49 * spec.region.width());
                const double mlat = std::min(R, 0.49 * spec.region.height());
                c = {spec.region.min_lon + mlon +
                         detail::u01(rng) * (spec.region.width() - 2.0 * mlon),
                     spec.region.min_lat + mlat +
                         detail::u01(rng) * (spec.region.height() - 2.0 * mlat)};
                bool ok = true;
                for (size_t jd = 0; jd < centers.size(); ++jd) {
                    const double d = std::hypot(c.lon - centers[jd].lon, c.lat - centers[jd].lat);
                    if (d <= (R + radii[jd]) * 1.1) {
                        ok = false;
                        break;
                    }
                }
                if (ok) break;
                if (++failures % 50 == 0) R *= 0.9;
                if (R < 1e-6 * half_min) throw SpecInvalid("cannot place islands in region");
            }
        }
        centers.push_back(c);
        radii.push_back(R);
        Ring ring;
        for (int v = 0; v < k; ++v) {
            const double theta = 2.0 * 3.14159265358979323846 *
                                 (static_cast<double>(v) + 0.3 * detail::u01(rng)) /
                                 static_cast<double>(k);
            const double r = R * (0.55 + 0.45 * detail::u01(rng));
            ring.push_back({c.lon + r * std::cos(theta), c.lat + r * std::sin(theta)});
        }
        gt.polygons.push_back(GeoPolygon::make(std::move(ring)));
    }
    std::vector<BBox> island_boxes;
    for (const auto& p : gt.polygons) island_boxes.push_back(p.bbox());

    // tiles on the lattice, row-major; ids sort in construction order
    for (int r = 0; r < spec.grid_rows; ++r) {
        for (int c = 0; c < spec.grid_cols; ++c) {
            const int idx = r * spec.grid_cols + c;
            const long ox = static_cast<long>(c) * (W - ov_x);
            const long oy = static_cast<long>(r) * (H - ov_y);
            TileMeta meta;
            char id[32];
            std::snprintf(id, sizeof(id), "t%02d_%02d", r, c);
            meta.id = id;
            const double west = spec.region.min_lon + ox * lon_per_px;
            const double north = spec.region.max_lat - oy * lat_per_px;
            const double east = west + W * lon_per_px;
            const double south = north - H * lat_per_px;
            meta.nw = {west, north};
            meta.ne = {east, north};
            meta.sw = {west, south};
            meta.se = {east, south};
            meta.width_px = W;
            meta.height_px = H;
            char ts[32];
            std::snprintf(ts, sizeof(ts), "2020-01-01T%02d:%02d:%02dZ", idx / 3600,
                          (idx / 60) % 60, idx % 60);
            meta.acquired_at = ts;
            meta.validate();

            RasterTile tile;
            tile.meta = meta;
            tile.pixels.assign(static_cast<size_t>(W) * H, 50);
            const GeoTransform t = transform_of(meta);
            const BBox tb = bbox_of(meta);
            for (size_t is = 0; is < gt.polygons.size(); ++is) {
                if (!tb.intersects(island_boxes[is])) continue;
                // pixel rows covering the island's bbox in this tile
                for (int row = 0; row < H; ++row) {
                    const double lat = t.origin.lat - (row + 0.5) * t.lat_per_px;
                    if (lat < island_boxes[is].min_lat || lat > island_boxes[is].max_lat)
                        continue;
                    for (int col = 0; col < W; ++col) {
                        const double lon = t.origin.lon + (col + 0.5) * t.lon_per_px;
                        if (lon < island_boxes[is].min_lon || lon > island_boxes[is].max_lon)
                            continue;
                        if (point_in_polygon(gt.polygons[is], {lon, lat}))
                            tile.at(row, col) = 200;
                    }
                }
            }

            StampMask mask;
            if (spec.stamp) {
                const int sw_ = W / 6, sh = H / 16;
                mask.rects.push_back({8, 8, 8 + sw_, 8 + sh});
                mask.rects.push_back({W - 8 - sw_, H - 8 - sh, W - 8, H - 8});
                for (const auto& rect : mask.rects)
                    for (int row = rect[1]; row < rect[3]; ++row)
                        for (int col = rect[0]; col < rect[2]; ++col)
                            tile.at(row, col) = 255;
            }

            std::mt19937_64 trng(
                detail::splitmix64(spec.seed + (static_cast<std::uint64_t>(idx) + 1) *
                                                   0x9E3779B97F4A7C15ULL));
            const int bias =
                static_cast<int>(std::lround((2.0 * detail::u01(trng) - 1.0) * spec.jitter_px));
            if (spec.noise_flip_prob > 0.0) {
                for (auto& px : tile.pixels)
                    if (detail::u01(trng) < spec.noise_flip_prob) px = 255 - px;
            }
            if (bias != 0) {
                for (auto& px : tile.pixels)
                    px = static_cast<std::uint8_t>(std::clamp(static_cast<int>(px) + bias, 0, 255));
            }

            gt.manifest.push_back(meta);
            gt.tiles.emplace_back(std::move(tile), std::move(mask));
        }
    }
    return gt;
}

/// Per-polygon IoU scores: result polygons greedily matched to truth by
/// descending IoU; the list carries one entry per truth polygon (0 when
/// unmatched) plus a 0 for every surplus result polygon.
struct ScoreReport {
    std::vector<double> per;
    double mean = 0.0;
};

inline ScoreReport score_iou(const std::vector<GeoPolygon>& result,
                             const std::vector<GeoPolygon>& truth) {
    ScoreReport rep;
    std::vector<double> truth_score(truth.size(), 0.0);
    std::vector<char> r_used(result.size(), 0), t_used(truth.size(), 0);
    for (;;) {
        double best = 0.0;
        int bi = -1, bj = -1;
        for (size_t i = 0; i < result.size(); ++i) {
            if (r_used[i]) continue;
            for (size_t j = 0; j < truth.size(); ++j) {
                if (t_used[j]) continue;
                const double v = iou(result[i], truth[j]);
                if (v > best) {
                    best = v;
                    bi = static_cast<int>(i);
                    bj = static_cast<int>(j);
                }
            }
        }
        if (bi < 0) break;
        r_used[bi] = 1;
        t_used[bj] = 1;
        truth_score[bj] = best;
    }
    rep.per = truth_score;
    for (size_t i = 0; i < result.size(); ++i)
        if (!r_used[i]) rep.per.push_back(0.0);
    if (rep.per.empty()) {
        rep.mean = 1.0; // nothing expected, nothing produced
    } else {
        double sum = 0.0;
        for (double v : rep.per) sum += v;
        rep.mean = sum / static_cast<double>(rep.per.size());
    }
    return rep;
}

} // namespace tileforge
