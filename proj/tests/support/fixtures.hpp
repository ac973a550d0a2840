#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "tileforge/geo.hpp"

namespace fixtures {

using tileforge::BBox;
using tileforge::GeoPoint;
using tileforge::GeoPolygon;
using tileforge::RasterTile;
using tileforge::Ring;
using tileforge::TileMeta;

inline TileMeta make_meta(const std::string& id, double w, double s, double e, double n,
                          int wpx, int hpx) {
    TileMeta m;
    m.id = id;
    m.nw = {w, n};
    m.ne = {e, n};
    m.sw = {w, s};
    m.se = {e, s};
    m.width_px = wpx;
    m.height_px = hpx;
    m.acquired_at = "2020-01-01T00:00:00Z";
    m.validate();
    return m;
}

/// Rasterize a polygon into a fresh tile: pixel centers inside -> fg, else
/// bg. Uses the oracle point-in-polygon, not the library's.
inline RasterTile rasterize(const TileMeta& meta, const GeoPolygon& poly, uint8_t fg = 200,
                            uint8_t bg = 50) {
    RasterTile t;
    t.meta = meta;
    t.pixels.assign(static_cast<size_t>(meta.width_px) * meta.height_px, bg);
    const auto tr = tileforge::transform_of(meta);
    for (int r = 0; r < meta.height_px; ++r) {
        for (int c = 0; c < meta.width_px; ++c) {
            const GeoPoint p = tileforge::px_to_geo(tr, c + 0.5, r + 0.5);
            if (oracle::pip_polygon(poly, p.lon, p.lat))
                t.pixels[static_cast<size_t>(r) * meta.width_px + c] = fg;
        }
    }
    return t;
}

/// Random star-convex polygon around a center: angles sorted by
/// construction, radii in [r_min, r_max].
inline GeoPolygon star_polygon(std::mt19937_64& rng, GeoPoint center, double r_min,
                               double r_max, int k) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Ring ring;
    for (int i = 0; i < k; ++i) {
        const double theta = 2.0 * M_PI * (i + 0.3 * u01(rng)) / k;
        const double r = r_min + (r_max - r_min) * u01(rng);
        ring.push_back({center.lon + r * std::cos(theta), center.lat + r * std::sin(theta)});
    }
    return GeoPolygon::make(ring);
}

/// Fresh scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("tileforge_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace fixtures
