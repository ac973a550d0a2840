#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tileforge/catalog.hpp"
#include "tileforge/coverage.hpp"
#include "tileforge/geojson.hpp"
#include "tileforge/io.hpp"
#include "tileforge/mapreduce.hpp"
#include "tileforge/stitch.hpp"
#include "tileforge/vectorize.hpp"
#include "tileforge/wkt.hpp"

namespace tileforge {

/// The query window is not fully covered by the selected tiles; carries the
/// report (exit code 2 at the CLI).
class CoverageGap : public Error {
public:
    CoverageReport report;
    explicit CoverageGap(CoverageReport r)
        : Error("coverage gap: query window not fully covered"), report(std::move(r)) {}
};

/// Stitching left open fragments that never closed into rings (exit 3).
class StitchIncomplete : public Error {
public:
    std::vector<BoundaryFragment> leftovers;
    explicit StitchIncomplete(std::vector<BoundaryFragment> l)
        : Error("stitch incomplete: " + std::to_string(l.size()) + " open fragments remain"),
          leftovers(std::move(l)) {}
};

inline GeoPolygon polygon_of_bbox(const BBox& b) {
    return GeoPolygon::make({{b.min_lon, b.min_lat},
                             {b.max_lon, b.min_lat},
                             {b.max_lon, b.max_lat},
                             {b.min_lon, b.max_lat}});
}

struct LoadedTile {
    RasterTile raster;
    StampMask mask;
};

enum class OutputFormat { geojson, wkt, both };

struct PipelineConfig {
    std::filesystem::path catalog_path; // JSON-lines tile manifest
    std::filesystem::path tiles_root;
    std::optional<GeoPolygon> query_polygon; // exactly one of these two
    std::optional<BBox> query_bbox;
    StitchMode mode = StitchMode::lcsp;
    VectorizeParams vectorize;
    std::optional<StitchParams> stitch; // defaulted from tile resolution
    int workers = 0;                    // 0 = host parallelism
    std::optional<std::filesystem::path> out_path;
    OutputFormat format = OutputFormat::geojson;
    std::optional<std::filesystem::path> dump_stages;
};

struct StageTiming {
    std::string name;
    double seconds = 0.0;
};

struct ExtractionResult {
    std::vector<StitchedPolygon> polygons;
    std::vector<BoundaryFragment> leftovers;
    CoverageReport coverage;
    std::vector<StageTiming> timings;
    double wall_s = 0.0;
    int workers_used = 1;
};

namespace detail {

inline std::string zero_pad(const char* prefix, int n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%04d", prefix, n);
    return buf;
}

} // namespace detail

/// Three-stage plan: vectorize each tile and stitch within its grid row,
/// stitch the row results globally, then close rings into polygons. Keys are
/// row ranks ("r0000" northmost) collapsing to "all" for the global stages,
/// so a worker pool of any size produces the same record stream.
inline StagePlan plan_stitch_pipeline(const GeoPolygon& query,
                                      const std::vector<std::string>& tile_ids,
                                      const std::map<std::string, LoadedTile>& tiles,
                                      const std::map<std::string, BBox>& tile_bboxes,
                                      const VectorizeParams& vp, const StitchParams& sp,
                                      StitchMode mode, int workers) {
    (void)query; // selection and coverage already happened; the plan is shape-only
    if (tile_ids.empty()) throw EmptySelection("no tiles selected for stitching");

    StagePlan plan;
    plan.workers = std::max(1, workers);

    Stage s1;
    s1.mapper_id = "vectorize";
    s1.reducer_id = "stitch-row";
    s1.map = [&tiles, vp](const KeyedRecord& rec) {
        const auto it = tiles.find(rec.payload);
        if (it == tiles.end()) throw UnknownId(rec.payload);
        const auto frags = vectorize_tile(it->second.raster, it->second.mask, vp);
        std::vector<KeyedRecord> out;
        for (size_t i = 0; i < frags.size(); ++i)
            out.push_back({rec.key, rec.payload + ":" + detail::zero_pad("", static_cast<int>(i)),
                           fragment_to_payload(frags[i])});
        return out;
    };
    s1.reduce = [&tile_bboxes, sp, mode](const std::string& key,
                                         const std::vector<KeyedRecord>& group) {
        std::vector<BoundaryFragment> frags;
        for (const auto& r : group) frags.push_back(fragment_from_payload(r.payload));
        const auto stitched = stitch_group(std::move(frags), tile_bboxes, sp, mode);
        std::vector<KeyedRecord> out;
        for (size_t i = 0; i < stitched.size(); ++i)
            out.push_back({key, detail::zero_pad("f", static_cast<int>(i)),
                           fragment_to_payload(stitched[i])});
        return out;
    };
    plan.stages.push_back(std::move(s1));

    Stage s2;
    s2.mapper_id = "regroup";
    s2.reducer_id = "stitch-global";
    s2.map = [](const KeyedRecord& rec) {
        return std::vector<KeyedRecord>{{"all", rec.key + "/" + rec.seq, rec.payload}};
    };
    s2.reduce = [&tile_bboxes, sp, mode](const std::string& key,
                                         const std::vector<KeyedRecord>& group) {
        std::vector<BoundaryFragment> frags;
        for (const auto& r : group) frags.push_back(fragment_from_payload(r.payload));
        const auto stitched = stitch_group(std::move(frags), tile_bboxes, sp, mode);
        std::vector<KeyedRecord> out;
        for (size_t i = 0; i < stitched.size(); ++i)
            out.push_back({key, detail::zero_pad("f", static_cast<int>(i)),
                           fragment_to_payload(stitched[i])});
        return out;
    };
    plan.stages.push_back(std::move(s2));

    Stage s3;
    s3.mapper_id = "identity";
    s3.reducer_id = "close-rings";
    s3.map = [](const KeyedRecord& rec) { return std::vector<KeyedRecord>{rec}; };
    const double min_extent = std::sqrt(static_cast<double>(vp.min_object_px)) * sp.quant_cell;
    const double out_eps = vp.simplify_eps.value_or(0.25 * sp.quant_cell);
    s3.reduce = [sp, min_extent, out_eps](const std::string& key,
                                          const std::vector<KeyedRecord>& group) {
        std::vector<BoundaryFragment> frags;
        for (const auto& r : group) frags.push_back(fragment_from_payload(r.payload));
        const auto closed = close_rings(frags, sp.join_tol, min_extent, out_eps);
        std::vector<KeyedRecord> out;
        for (size_t i = 0; i < closed.polygons.size(); ++i)
            out.push_back({key, detail::zero_pad("p", static_cast<int>(i)),
                           polygon_to_payload(closed.polygons[i].polygon,
                                              closed.polygons[i].source_tiles)});
        for (size_t i = 0; i < closed.leftovers.size(); ++i)
            out.push_back({key, detail::zero_pad("l", static_cast<int>(i)),
                           fragment_to_payload(closed.leftovers[i])});
        return out;
    };
    plan.stages.push_back(std::move(s3));
    return plan;
}

/// Select by range query, verify coverage, vectorize + stitch through the
/// staged executor, and collect polygons. Throws CoverageGap when the query
/// window is not fully under selected tiles; leftovers that never closed are
/// returned, not thrown, so output can still be written before exit 3.
inline ExtractionResult run_pipeline(const PipelineConfig& cfg) {
    using clock = std::chrono::steady_clock;
    const auto wall0 = clock::now();
    auto mark = [](const clock::time_point& t0) {
        return std::chrono::duration<double>(clock::now() - t0).count();
    };

    ExtractionResult result;
    result.workers_used = cfg.workers > 0
                              ? cfg.workers
                              : std::max(1u, std::thread::hardware_concurrency());

    if (!cfg.query_polygon && !cfg.query_bbox)
        throw InputFormat("pipeline needs a query polygon or bbox");
    const GeoPolygon query =
        cfg.query_polygon ? *cfg.query_polygon : polygon_of_bbox(*cfg.query_bbox);

    auto t = clock::now();
    const auto manifest = read_manifest(cfg.catalog_path);
    const Catalog catalog = build_catalog(manifest);
    const auto selected = range_query(catalog, RangeQuery{query.bbox()});
    result.timings.push_back({"select", mark(t)});

    t = clock::now();
    std::vector<BBox> footprints;
    footprints.reserve(selected.size());
    for (const auto& id : selected) footprints.push_back(bbox_of(catalog.meta(id)));
    result.coverage = check_coverage(query, footprints);
    if (!result.coverage.covered) throw CoverageGap(result.coverage);
    result.timings.push_back({"coverage", mark(t)});

    t = clock::now();
    const auto rasters = load_tiles(catalog, selected, cfg.tiles_root);
    std::map<std::string, LoadedTile> tiles;
    std::map<std::string, BBox> tile_bboxes;
    for (const auto& raster : rasters) {
        LoadedTile lt;
        lt.raster = raster;
        const auto mask_path = cfg.tiles_root / (raster.meta.id + ".mask.json");
        if (std::filesystem::exists(mask_path)) lt.mask = read_mask_file(mask_path);
        tile_bboxes.emplace(raster.meta.id, bbox_of(raster.meta));
        tiles.emplace(raster.meta.id, std::move(lt));
    }
    result.timings.push_back({"load", mark(t)});

    // stage-1 grouping key: rank of each distinct tile-row latitude, north first
    std::vector<double> row_lats;
    for (const auto& id : selected) row_lats.push_back(catalog.meta(id).nw.lat);
    std::sort(row_lats.begin(), row_lats.end(), std::greater<double>());
    row_lats.erase(std::unique(row_lats.begin(), row_lats.end()), row_lats.end());
    std::vector<KeyedRecord> inputs;
    for (const auto& id : selected) {
        const double lat = catalog.meta(id).nw.lat;
        const int rank = static_cast<int>(
            std::lower_bound(row_lats.begin(), row_lats.end(), lat, std::greater<double>()) -
            row_lats.begin());
        inputs.push_back({detail::zero_pad("r", rank), id, id});
    }

    const StitchParams sp = cfg.stitch ? *cfg.stitch : [&] {
        const auto& first = tiles.begin()->second.raster.meta;
        const GeoTransform tr = transform_of(first);
        return StitchParams::for_pixel_size(std::max(tr.lon_per_px, tr.lat_per_px));
    }();

    const auto plan = plan_stitch_pipeline(query, selected, tiles, tile_bboxes, cfg.vectorize,
                                           sp, cfg.mode, result.workers_used);
    auto mr = run_mapreduce(std::move(inputs), plan, cfg.dump_stages);
    for (size_t s = 0; s < mr.metrics.size(); ++s) {
        const std::string tag = "stage" + std::to_string(s + 1);
        result.timings.push_back({tag + "-map", mr.metrics[s].map_s});
        result.timings.push_back({tag + "-shuffle", mr.metrics[s].shuffle_s});
        result.timings.push_back({tag + "-reduce", mr.metrics[s].reduce_s});
    }

    t = clock::now();
    for (const auto& rec : mr.records) {
        if (!rec.seq.empty() && rec.seq[0] == 'p') {
            auto [poly, sources] = polygon_from_payload(rec.payload);
            result.polygons.push_back({std::move(poly), std::move(sources)});
        } else {
            result.leftovers.push_back(fragment_from_payload(rec.payload));
        }
    }
    result.timings.push_back({"assemble", mark(t)});
    result.wall_s = mark(wall0);
    return result;
}

inline std::string emit_geojson(const ExtractionResult& result) {
    std::vector<OutputPolygon> out;
    out.reserve(result.polygons.size());
    for (const auto& sp : result.polygons)
        out.push_back({sp.polygon, sp.source_tiles, result.coverage.gap_area});
    return emit_polygons_geojson(out);
}

inline std::string emit_wkt(const ExtractionResult& result) {
    std::vector<GeoPolygon> polys;
    polys.reserve(result.polygons.size());
    for (const auto& sp : result.polygons) polys.push_back(sp.polygon);
    return emit_wkt(polys);
}

/// CoverageReport serialization shared by the coverage subcommand and the
/// pipeline's gap abort: {"covered":..., "gap_area":..., "gaps":[[w,s,e,n]...]}.
inline std::string coverage_report_json(const CoverageReport& rep) {
    nlohmann::json j;
    j["covered"] = rep.covered;
    j["gap_area"] = rep.gap_area;
    auto gaps = nlohmann::json::array();
    for (const auto& g : rep.gaps) gaps.push_back({g.min_lon, g.min_lat, g.max_lon, g.max_lat});
    j["gaps"] = std::move(gaps);
    return j.dump() + "\n";
}

inline std::string timings_json(const ExtractionResult& result) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& t : result.timings) {
        nlohmann::json e;
        e["name"] = t.name;
        e["seconds"] = t.seconds;
        stages.push_back(std::move(e));
    }
    nlohmann::json j;
    j["stages"] = std::move(stages);
    j["wall_s"] = result.wall_s;
    j["workers"] = result.workers_used;
    return j.dump() + "\n";
}

} // namespace tileforge
