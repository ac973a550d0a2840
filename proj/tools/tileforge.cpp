#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tileforge/catalog.hpp"
#include "tileforge/coverage.hpp"
#include "tileforge/geojson.hpp"
#include "tileforge/io.hpp"
#include "tileforge/pipeline.hpp"
#include "tileforge/stitch.hpp"
#include "tileforge/synth.hpp"
#include "tileforge/vectorize.hpp"
#include "tileforge/wkt.hpp"

namespace fs = std::filesystem;
using namespace tileforge;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputFormat("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const fs::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputFormat("cannot write " + path.string());
    out << data;
}

BBox parse_bbox_arg(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            v.push_back(std::stod(part));
        } catch (const std::exception&) {
            throw InputFormat("bad --bbox component: " + part);
        }
    }
    if (v.size() != 4) throw InputFormat("--bbox needs minLon,minLat,maxLon,maxLat");
    const BBox b{v[0], v[1], v[2], v[3]};
    if (!b.valid()) throw InputFormat("--bbox is not a valid window");
    return b;
}

// accepts a bare Polygon geometry, a Feature, or a FeatureCollection's
// first feature
GeoPolygon read_query_polygon(const fs::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(slurp(path));
    } catch (const nlohmann::json::exception& e) {
        throw InputFormat(std::string("bad query JSON: ") + e.what());
    }
    try {
        if (j.contains("type") && j["type"] == "FeatureCollection") {
            if (j["features"].empty()) throw InputFormat("query FeatureCollection is empty");
            return polygon_from_geometry(j["features"][0]["geometry"]);
        }
        if (j.contains("type") && j["type"] == "Feature")
            return polygon_from_geometry(j["geometry"]);
        return polygon_from_geometry(j);
    } catch (const nlohmann::json::exception& e) {
        throw InputFormat(std::string("bad query JSON: ") + e.what());
    }
}

int env_workers() {
    if (const char* w = std::getenv("TILEFORGE_WORKERS")) {
        const int n = std::atoi(w);
        if (n > 0) return n;
    }
    return 0;
}

int cmd_ingest(const std::string& manifest, const std::string& out) {
    const auto metas = read_manifest(manifest);
    const Catalog cat = build_catalog(metas);
    write_manifest(out, cat.entries());
    std::cerr << "ingested " << cat.size() << " tiles -> " << out << "\n";
    return 0;
}

int cmd_query(const std::string& catalog_path, const std::string& bbox) {
    const Catalog cat = build_catalog(read_manifest(catalog_path));
    for (const auto& id : range_query(cat, RangeQuery{parse_bbox_arg(bbox)}))
        std::cout << id << "\n";
    return 0;
}

int cmd_coverage(const std::string& catalog_path, const std::string& query_path) {
    const Catalog cat = build_catalog(read_manifest(catalog_path));
    const GeoPolygon query = read_query_polygon(query_path);
    std::vector<BBox> footprints;
    for (const auto& id : range_query(cat, RangeQuery{query.bbox()}))
        footprints.push_back(bbox_of(cat.meta(id)));
    const CoverageReport rep = check_coverage(query, footprints);
    std::cout << coverage_report_json(rep);
    return rep.covered ? 0 : 2;
}

int cmd_vectorize(const std::string& catalog_path, const std::string& tile_id,
                  const std::string& tiles_dir, const VectorizeParams& params) {
    const Catalog cat = build_catalog(read_manifest(catalog_path));
    const fs::path root =
        tiles_dir.empty() ? fs::path(catalog_path).parent_path() : fs::path(tiles_dir);
    const auto rasters = load_tiles(cat, {tile_id}, root);
    StampMask mask;
    const fs::path mask_path = root / (tile_id + ".mask.json");
    if (fs::exists(mask_path)) mask = read_mask_file(mask_path);
    const auto frags = vectorize_tile(rasters.front(), mask, params);
    std::cout << emit_fragments_geojson(frags);
    return 0;
}

int cmd_stitch(const std::string& fragments_path, const std::string& catalog_path,
               const std::string& mode_name, std::optional<double> quant,
               std::optional<int> min_lcs) {
    const auto frags = parse_fragments_geojson(slurp(fragments_path));
    const Catalog cat = build_catalog(read_manifest(catalog_path));
    std::map<std::string, BBox> bboxes;
    for (const auto& m : cat.entries()) bboxes.emplace(m.id, bbox_of(m));

    StitchMode mode;
    if (mode_name == "lcsp")
        mode = StitchMode::lcsp;
    else if (mode_name == "register")
        mode = StitchMode::register_;
    else
        throw InputFormat("--mode must be lcsp or register");

    double px = quant.value_or(0.0);
    if (px <= 0.0) {
        if (cat.size() == 0) throw InputFormat("catalog is empty, pass --quant");
        const GeoTransform t = transform_of(cat.entries().front());
        px = std::max(t.lon_per_px, t.lat_per_px);
    }
    StitchParams params = StitchParams::for_pixel_size(px);
    if (min_lcs) params.min_lcs = *min_lcs;

    const auto stitched = stitch_group(frags, bboxes, params, mode);
    const auto closed = close_rings(stitched, params.join_tol, 0.0, 0.25 * params.quant_cell);

    std::string out = "{\"type\":\"FeatureCollection\",\"features\":[";
    bool first = true;
    for (size_t i = 0; i < closed.polygons.size(); ++i) {
        if (!first) out += ",";
        first = false;
        out += "{\"type\":\"Feature\",\"geometry\":";
        out += polygon_geometry_json(closed.polygons[i].polygon);
        out += ",\"properties\":{\"object_id\":" + std::to_string(i) + ",\"source_tiles\":";
        std::string tiles_arr = "[";
        for (size_t k = 0; k < closed.polygons[i].source_tiles.size(); ++k) {
            if (k) tiles_arr += ",";
            tiles_arr += nlohmann::json(closed.polygons[i].source_tiles[k]).dump();
        }
        tiles_arr += "]";
        out += tiles_arr + ",\"gap_area\":" + fixed9(0.0) + "}}";
    }
    for (const auto& f : closed.leftovers) {
        if (!first) out += ",";
        first = false;
        out += fragment_feature_json(f);
    }
    out += "]}\n";
    std::cout << out;
    return closed.leftovers.empty() ? 0 : 3;
}

int cmd_pipeline(const PipelineConfig& cfg) {
    ExtractionResult result;
    try {
        result = run_pipeline(cfg);
    } catch (const CoverageGap& gap) {
        std::cout << coverage_report_json(gap.report);
        std::cerr << "coverage gap: " << gap.report.gaps.size() << " uncovered cells\n";
        return 2;
    }

    if (cfg.format == OutputFormat::both) {
        if (!cfg.out_path) throw InputFormat("--format both requires --out");
        spill(cfg.out_path->string() + ".geojson", emit_geojson(result));
        spill(cfg.out_path->string() + ".wkt", emit_wkt(result));
    } else {
        const std::string data =
            cfg.format == OutputFormat::geojson ? emit_geojson(result) : emit_wkt(result);
        if (cfg.out_path)
            spill(*cfg.out_path, data);
        else
            std::cout << data;
    }
    std::cerr << timings_json(result);
    if (!result.leftovers.empty()) {
        std::cerr << "warning: " << result.leftovers.size() << " fragments never closed\n";
        return 3;
    }
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(slurp(spec_path));
    } catch (const nlohmann::json::exception& e) {
        throw InputFormat(std::string("bad scene spec JSON: ") + e.what());
    }
    const SceneSpec spec = scene_spec_from_json(j);
    const GroundTruth gt = generate(spec);

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    for (const auto& [tile, mask] : gt.tiles) {
        write_pgm(dir / (tile.meta.id + ".pgm"), tile.meta.width_px, tile.meta.height_px,
                  tile.pixels);
        spill(dir / (tile.meta.id + ".json"), meta_to_json(tile.meta).dump() + "\n");
        if (!mask.rects.empty()) write_mask_file(dir / (tile.meta.id + ".mask.json"), mask);
    }
    write_manifest(dir / "manifest.jsonl", gt.manifest);
    std::vector<OutputPolygon> truth;
    for (const auto& p : gt.polygons) truth.push_back({p, {}, 0.0});
    spill(dir / "truth.geojson", emit_polygons_geojson(truth));
    std::cerr << "wrote " << gt.tiles.size() << " tiles, " << gt.polygons.size()
              << " truth polygons -> " << out_dir << "\n";
    return 0;
}

int cmd_score(const std::string& result_path, const std::string& truth_path) {
    std::vector<GeoPolygon> result, truth;
    for (auto& op : parse_polygons_geojson(slurp(result_path)))
        result.push_back(std::move(op.polygon));
    for (auto& op : parse_polygons_geojson(slurp(truth_path)))
        truth.push_back(std::move(op.polygon));
    const ScoreReport rep = score_iou(result, truth);
    nlohmann::json j;
    j["mean"] = rep.mean;
    j["per"] = rep.per;
    std::cout << j.dump() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stitch geo-referenced raster tiles into whole-object vector geometries"};
    app.require_subcommand(1);

    auto* ing = app.add_subcommand("ingest", "validate a tile manifest and write it normalized");
    std::string ing_manifest, ing_out;
    ing->add_option("--manifest", ing_manifest, "JSON-lines tile manifest")->required();
    ing->add_option("--out", ing_out, "output catalog path")->required();

    auto* qry = app.add_subcommand("query", "print ids of tiles intersecting a window");
    std::string qry_catalog, qry_bbox;
    qry->add_option("--catalog", qry_catalog, "catalog manifest")->required();
    qry->add_option("--bbox", qry_bbox, "minLon,minLat,maxLon,maxLat")->required();

    auto* cov = app.add_subcommand("coverage", "check that tiles fully cover a query polygon");
    std::string cov_catalog, cov_query;
    cov->add_option("--catalog", cov_catalog, "catalog manifest")->required();
    cov->add_option("--query", cov_query, "GeoJSON polygon file")->required();

    auto* vec = app.add_subcommand("vectorize", "trace one tile's object boundaries");
    std::string vec_catalog, vec_tile, vec_tiles;
    int vec_threshold = 128;
    double vec_eps = 0.0;
    vec->add_option("--catalog", vec_catalog, "catalog manifest")->required();
    vec->add_option("--tile", vec_tile, "tile id")->required();
    vec->add_option("--tiles", vec_tiles, "raster directory (default: beside the catalog)");
    vec->add_option("--threshold", vec_threshold, "binarization threshold (default 128)");
    auto* vec_eps_opt = vec->add_option("--eps", vec_eps, "simplification tolerance, degrees");

    auto* sti = app.add_subcommand("stitch", "merge boundary fragments into polygons");
    std::string sti_fragments, sti_catalog, sti_mode = "lcsp";
    double sti_quant = 0.0;
    int sti_min_lcs = 0;
    sti->add_option("--fragments", sti_fragments, "fragment FeatureCollection file")->required();
    sti->add_option("--catalog", sti_catalog, "catalog manifest")->required();
    sti->add_option("--mode", sti_mode, "lcsp or register");
    auto* sti_quant_opt = sti->add_option("--quant", sti_quant, "quantization cell, degrees");
    auto* sti_lcs_opt = sti->add_option("--min-lcs", sti_min_lcs, "minimum match length");

    auto* pip = app.add_subcommand("pipeline", "select, verify, vectorize, stitch, emit");
    std::string pip_catalog, pip_tiles, pip_query, pip_bbox, pip_mode = "lcsp";
    std::string pip_out, pip_format = "geojson", pip_dump;
    int pip_workers = 0;
    int pip_threshold = 128;
    double pip_eps = 0.0;
    pip->add_option("--catalog", pip_catalog, "catalog manifest")->required();
    pip->add_option("--tiles", pip_tiles, "raster directory")->required();
    pip->add_option("--query", pip_query, "GeoJSON polygon file");
    pip->add_option("--bbox", pip_bbox, "minLon,minLat,maxLon,maxLat");
    pip->add_option("--mode", pip_mode, "lcsp or register");
    pip->add_option("--workers", pip_workers, "worker threads (default: host parallelism)");
    pip->add_option("--out", pip_out, "output path (default: stdout)");
    pip->add_option("--format", pip_format, "geojson, wkt, or both");
    pip->add_option("--dump-stages", pip_dump, "write each stage's shuffled input here");
    auto* pip_threshold_opt = pip->add_option("--threshold", pip_threshold, "binarization threshold");
    auto* pip_eps_opt = pip->add_option("--eps", pip_eps, "simplification tolerance, degrees");

    auto* syn = app.add_subcommand("synth", "generate a ground-truth scene");
    std::string syn_spec, syn_out;
    syn->add_option("--spec", syn_spec, "scene spec JSON file")->required();
    syn->add_option("--out", syn_out, "output directory")->required();

    auto* sco = app.add_subcommand("score", "IoU of result polygons against truth");
    std::string sco_result, sco_truth;
    sco->add_option("--result", sco_result, "result GeoJSON")->required();
    sco->add_option("--truth", sco_truth, "truth GeoJSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 4;
    }

    try {
        if (*ing) return cmd_ingest(ing_manifest, ing_out);
        if (*qry) return cmd_query(qry_catalog, qry_bbox);
        if (*cov) return cmd_coverage(cov_catalog, cov_query);
        if (*vec) {
            VectorizeParams params;
            params.threshold = vec_threshold;
            if (vec_eps_opt->count()) params.simplify_eps = vec_eps;
            return cmd_vectorize(vec_catalog, vec_tile, vec_tiles, params);
        }
        if (*sti) {
            std::optional<double> quant;
            std::optional<int> min_lcs;
            if (sti_quant_opt->count()) quant = sti_quant;
            if (sti_lcs_opt->count()) min_lcs = sti_min_lcs;
            return cmd_stitch(sti_fragments, sti_catalog, sti_mode, quant, min_lcs);
        }
        if (*pip) {
            PipelineConfig cfg;
            cfg.catalog_path = pip_catalog;
            cfg.tiles_root = pip_tiles;
            if (pip_query.empty() == pip_bbox.empty())
                throw InputFormat("pass exactly one of --query or --bbox");
            if (!pip_query.empty()) cfg.query_polygon = read_query_polygon(pip_query);
            if (!pip_bbox.empty()) cfg.query_bbox = parse_bbox_arg(pip_bbox);
            if (pip_mode == "lcsp")
                cfg.mode = StitchMode::lcsp;
            else if (pip_mode == "register")
                cfg.mode = StitchMode::register_;
            else
                throw InputFormat("--mode must be lcsp or register");
            cfg.workers = pip_workers > 0 ? pip_workers : env_workers();
            if (!pip_out.empty()) cfg.out_path = fs::path(pip_out);
            if (pip_format == "geojson")
                cfg.format = OutputFormat::geojson;
            else if (pip_format == "wkt")
                cfg.format = OutputFormat::wkt;
            else if (pip_format == "both")
                cfg.format = OutputFormat::both;
            else
                throw InputFormat("--format must be geojson, wkt, or both");
            if (!pip_dump.empty()) cfg.dump_stages = fs::path(pip_dump);
            cfg.vectorize.threshold = pip_threshold_opt->count() ? pip_threshold : 128;
            if (pip_eps_opt->count()) cfg.vectorize.simplify_eps = pip_eps;
            return cmd_pipeline(cfg);
        }
        if (*syn) return cmd_synth(syn_spec, syn_out);
        if (*sco) return cmd_score(sco_result, sco_truth);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
