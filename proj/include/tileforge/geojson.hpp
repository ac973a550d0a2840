#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "tileforge/error.hpp"
#include "tileforge/geo.hpp"
#include "tileforge/vectorize.hpp"

namespace tileforge {

/// Fixed 9-decimal coordinate formatting. Output never contains "-0.0...":
/// a value that rounds to zero is serialized unsigned so byte comparison of
/// equal geometries cannot be broken by the sign of zero.
inline std::string fixed9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    std::string s(buf);
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
    return s;
}

namespace detail {

inline std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

inline void append_position(std::string& out, const GeoPoint& p) {
    out += "[";
    out += fixed9(p.lon);
    out += ",";
    out += fixed9(p.lat);
    out += "]";
}

inline void append_ring(std::string& out, const Ring& ring) {
    out += "[";
    for (size_t i = 0; i < ring.size(); ++i) {
        if (i) out += ",";
        append_position(out, ring[i]);
    }
    out += "]";
}

inline void append_string_array(std::string& out, const std::vector<std::string>& v) {
    out += "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += quoted(v[i]);
    }
    out += "]";
}

} // namespace detail

inline std::string polygon_geometry_json(const GeoPolygon& poly) {
    std::string out = "{\"type\":\"Polygon\",\"coordinates\":[";
    detail::append_ring(out, poly.exterior);
    for (const auto& h : poly.holes) {
        out += ",";
        detail::append_ring(out, h);
    }
    out += "]}";
    return out;
}

inline std::string linestring_geometry_json(const std::vector<GeoPoint>& pts) {
    std::string out = "{\"type\":\"LineString\",\"coordinates\":[";
    for (size_t i = 0; i < pts.size(); ++i) {
        if (i) out += ",";
        detail::append_position(out, pts[i]);
    }
    out += "]}";
    return out;
}

/// One extracted object ready for emission.
struct OutputPolygon {
    GeoPolygon polygon;
    std::vector<std::string> source_tiles;
    double gap_area = 0.0;
};

/// FeatureCollection of Polygon features, fixed key order, ending newline.
inline std::string emit_polygons_geojson(const std::vector<OutputPolygon>& polys) {
    std::string out = "{\"type\":\"FeatureCollection\",\"features\":[";
    for (size_t i = 0; i < polys.size(); ++i) {
        if (i) out += ",";
        out += "{\"type\":\"Feature\",\"geometry\":";
        out += polygon_geometry_json(polys[i].polygon);
        out += ",\"properties\":{\"object_id\":" + std::to_string(i) + ",\"source_tiles\":";
        detail::append_string_array(out, polys[i].source_tiles);
        out += ",\"gap_area\":" + fixed9(polys[i].gap_area) + "}}";
    }
    out += "]}\n";
    return out;
}

namespace detail {

inline std::string edge_or_null(const std::optional<EdgeTag>& t) {
    return t ? quoted(std::string(1, edge_tag_char(*t))) : "null";
}

} // namespace detail

inline std::string fragment_feature_json(const BoundaryFragment& f) {
    std::string out = "{\"type\":\"Feature\",\"geometry\":";
    if (f.closed) {
        std::string geom = "{\"type\":\"Polygon\",\"coordinates\":[";
        detail::append_ring(geom, f.points.points);
        geom += "]}";
        out += geom;
    } else {
        out += linestring_geometry_json(f.points.points);
    }
    std::string joined;
    for (size_t i = 0; i < f.source_tiles.size(); ++i) {
        if (i) joined += "+";
        joined += f.source_tiles[i];
    }
    out += ",\"properties\":{\"source_tile\":" + detail::quoted(joined);
    out += ",\"closed\":" + std::string(f.closed ? "true" : "false");
    out += ",\"start_edge\":" + detail::edge_or_null(f.start_edge);
    out += ",\"end_edge\":" + detail::edge_or_null(f.end_edge);
    out += "}}";
    return out;
}

/// FeatureCollection of boundary fragments (LineString when open, Polygon
/// when closed), as printed by the vectorize and stitch subcommands.
inline std::string emit_fragments_geojson(const std::vector<BoundaryFragment>& frags) {
    std::string out = "{\"type\":\"FeatureCollection\",\"features\":[";
    for (size_t i = 0; i < frags.size(); ++i) {
        if (i) out += ",";
        out += fragment_feature_json(frags[i]);
    }
    out += "]}\n";
    return out;
}

namespace detail {

inline nlohmann::json parse_json(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputFormat(std::string("bad JSON: ") + e.what());
    }
}

inline Ring ring_from_coords(const nlohmann::json& arr) {
    Ring ring;
    for (const auto& pos : arr) {
        if (!pos.is_array() || pos.size() < 2)
            throw InputFormat("coordinate position must be [lon, lat]");
        ring.push_back({pos[0].get<double>(), pos[1].get<double>()});
    }
    return ring;
}

} // namespace detail

/// Reconstructs a polygon from a GeoJSON Polygon geometry object.
inline GeoPolygon polygon_from_geometry(const nlohmann::json& geom) {
    try {
        if (geom.at("type").get<std::string>() != "Polygon")
            throw InputFormat("expected Polygon geometry");
        const auto& coords = geom.at("coordinates");
        if (!coords.is_array() || coords.empty())
            throw InputFormat("Polygon needs at least one ring");
        Ring ext = detail::ring_from_coords(coords[0]);
        std::vector<Ring> holes;
        for (size_t i = 1; i < coords.size(); ++i)
            holes.push_back(detail::ring_from_coords(coords[i]));
        return GeoPolygon::make(std::move(ext), std::move(holes));
    } catch (const nlohmann::json::exception& e) {
        throw InputFormat(std::string("bad Polygon geometry: ") + e.what());
    }
}

/// Parses the polygon FeatureCollection format written by
/// emit_polygons_geojson. Order and properties are preserved.
inline std::vector<OutputPolygon> parse_polygons_geojson(const std::string& text) {
    const auto j = detail::parse_json(text);
    std::vector<OutputPolygon> out;
    try {
        if (j.at("type").get<std::string>() != "FeatureCollection")
            throw InputFormat("expected FeatureCollection");
        for (const auto& f : j.at("features")) {
            OutputPolygon op;
            op.polygon = polygon_from_geometry(f.at("geometry"));
            if (f.contains("properties") && f["properties"].is_object()) {
                const auto& p = f["properties"];
                if (p.contains("source_tiles"))
                    for (const auto& s : p["source_tiles"])
                        op.source_tiles.push_back(s.get<std::string>());
                if (p.contains("gap_area")) op.gap_area = p["gap_area"].get<double>();
            }
            out.push_back(std::move(op));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputFormat(std::string("bad FeatureCollection: ") + e.what());
    }
    return out;
}

/// Parses a fragment FeatureCollection (the vectorize/stitch output format).
inline std::vector<BoundaryFragment> parse_fragments_geojson(const std::string& text) {
    const auto j = detail::parse_json(text);
    std::vector<BoundaryFragment> out;
    try {
        if (j.at("type").get<std::string>() != "FeatureCollection")
            throw InputFormat("expected FeatureCollection");
        for (const auto& f : j.at("features")) {
            BoundaryFragment frag;
            const auto& geom = f.at("geometry");
            const std::string type = geom.at("type").get<std::string>();
            if (type == "LineString") {
                frag.closed = false;
                frag.points = GeoPolyline{detail::ring_from_coords(geom.at("coordinates"))};
            } else if (type == "Polygon") {
                frag.closed = true;
                frag.points = GeoPolyline{detail::ring_from_coords(geom.at("coordinates").at(0))};
            } else {
                throw InputFormat("fragment geometry must be LineString or Polygon");
            }
            if (f.contains("properties") && f["properties"].is_object()) {
                const auto& p = f["properties"];
                if (p.contains("source_tile") && p["source_tile"].is_string()) {
                    const std::string joined = p["source_tile"].get<std::string>();
                    size_t start = 0;
                    while (start <= joined.size() && !joined.empty()) {
                        const size_t plus = joined.find('+', start);
                        frag.source_tiles.push_back(
                            joined.substr(start, plus == std::string::npos
                                                     ? std::string::npos
                                                     : plus - start));
                        if (plus == std::string::npos) break;
                        start = plus + 1;
                    }
                }
                auto tag = [&](const char* key) -> std::optional<EdgeTag> {
                    if (!p.contains(key) || p[key].is_null()) return std::nullopt;
                    auto t = edge_tag_from(p[key].get<std::string>());
                    if (!t) throw InputFormat("bad edge tag");
                    return t;
                };
                frag.start_edge = tag("start_edge");
                frag.end_edge = tag("end_edge");
            }
            out.push_back(std::move(frag));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputFormat(std::string("bad fragment collection: ") + e.what());
    }
    return out;
}

// Full-precision record codecs for payloads that cross the shuffle boundary.
// nlohmann prints doubles shortest-round-trip, so geometry survives staging
// exactly; the 9-decimal formatting above is applied only on final emission.

inline std::string fragment_to_payload(const BoundaryFragment& f) {
    nlohmann::json j;
    j["closed"] = f.closed;
    j["end_edge"] = f.end_edge ? nlohmann::json(std::string(1, edge_tag_char(*f.end_edge)))
                               : nlohmann::json();
    auto pts = nlohmann::json::array();
    for (const auto& p : f.points.points) pts.push_back({p.lon, p.lat});
    j["points"] = std::move(pts);
    j["source_tiles"] = f.source_tiles;
    j["start_edge"] = f.start_edge ? nlohmann::json(std::string(1, edge_tag_char(*f.start_edge)))
                                   : nlohmann::json();
    return j.dump();
}

inline BoundaryFragment fragment_from_payload(const std::string& payload) {
    const auto j = detail::parse_json(payload);
    try {
        BoundaryFragment f;
        f.closed = j.at("closed").get<bool>();
        std::vector<GeoPoint> pts;
        for (const auto& p : j.at("points")) pts.push_back({p[0].get<double>(), p[1].get<double>()});
        f.points = GeoPolyline{std::move(pts)};
        for (const auto& s : j.at("source_tiles")) f.source_tiles.push_back(s.get<std::string>());
        auto tag = [&](const char* key) -> std::optional<EdgeTag> {
            if (j.at(key).is_null()) return std::nullopt;
            auto t = edge_tag_from(j.at(key).get<std::string>());
            if (!t) throw InputFormat("bad edge tag in payload");
            return t;
        };
        f.start_edge = tag("start_edge");
        f.end_edge = tag("end_edge");
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw InputFormat(std::string("bad fragment payload: ") + e.what());
    }
}

inline std::string polygon_to_payload(const GeoPolygon& poly,
                                      const std::vector<std::string>& source_tiles) {
    nlohmann::json j;
    auto ring_json = [](const Ring& r) {
        auto arr = nlohmann::json::array();
        for (const auto& p : r) arr.push_back({p.lon, p.lat});
        return arr;
    };
    j["exterior"] = ring_json(poly.exterior);
    auto holes = nlohmann::json::array();
    for (const auto& h : poly.holes) holes.push_back(ring_json(h));
    j["holes"] = std::move(holes);
    j["source_tiles"] = source_tiles;
    return j.dump();
}

inline std::pair<GeoPolygon, std::vector<std::string>> polygon_from_payload(
    const std::string& payload) {
    const auto j = detail::parse_json(payload);
    try {
        auto ring_of = [](const nlohmann::json& arr) {
            Ring r;
            for (const auto& p : arr) r.push_back({p[0].get<double>(), p[1].get<double>()});
            return r;
        };
        Ring ext = ring_of(j.at("exterior"));
        std::vector<Ring> holes;
        for (const auto& h : j.at("holes")) holes.push_back(ring_of(h));
        std::vector<std::string> sources;
        for (const auto& s : j.at("source_tiles")) sources.push_back(s.get<std::string>());
        return {GeoPolygon::make(std::move(ext), std::move(holes)), std::move(sources)};
    } catch (const nlohmann::json::exception& e) {
        throw InputFormat(std::string("bad polygon payload: ") + e.what());
    }
}

} // namespace tileforge
