#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "tileforge/error.hpp"
#include "tileforge/geo.hpp"
#include "tileforge/geojson.hpp"

namespace tileforge {

/// `POLYGON ((lon lat, ...), (hole ...))`, same orientation, closure, and
/// 9-decimal precision rules as the GeoJSON emitter.
inline std::string polygon_to_wkt(const GeoPolygon& poly) {
    auto ring_text = [](const Ring& r) {
        std::string s = "(";
        for (size_t i = 0; i < r.size(); ++i) {
            if (i) s += ", ";
            s += fixed9(r[i].lon) + " " + fixed9(r[i].lat);
        }
        s += ")";
        return s;
    };
    std::string out = "POLYGON (" + ring_text(poly.exterior);
    for (const auto& h : poly.holes) out += ", " + ring_text(h);
    out += ")";
    return out;
}

/// One polygon per line.
inline std::string emit_wkt(const std::vector<GeoPolygon>& polys) {
    std::string out;
    for (const auto& p : polys) {
        out += polygon_to_wkt(p);
        out += "\n";
    }
    return out;
}

namespace detail {

struct WktCursor {
    const std::string& text;
    size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c))
            throw InputFormat(std::string("WKT: expected '") + c + "' at offset " +
                              std::to_string(pos));
    }
    double number() {
        skip_ws();
        size_t end = pos;
        while (end < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[end])) || text[end] == '-' ||
                text[end] == '+' || text[end] == '.' || text[end] == 'e' || text[end] == 'E'))
            ++end;
        if (end == pos) throw InputFormat("WKT: expected number at offset " + std::to_string(pos));
        const double v = std::stod(text.substr(pos, end - pos));
        pos = end;
        return v;
    }
};

inline Ring wkt_ring(WktCursor& c) {
    Ring ring;
    c.expect('(');
    for (;;) {
        const double lon = c.number();
        const double lat = c.number();
        ring.push_back({lon, lat});
        if (!c.eat(',')) break;
    }
    c.expect(')');
    return ring;
}

} // namespace detail

/// Parses one `POLYGON (...)` text.
inline GeoPolygon polygon_from_wkt(const std::string& text) {
    detail::WktCursor c{text};
    c.skip_ws();
    const std::string tag = "POLYGON";
    if (text.compare(c.pos, tag.size(), tag) != 0)
        throw InputFormat("WKT: expected POLYGON");
    c.pos += tag.size();
    c.expect('(');
    Ring ext = detail::wkt_ring(c);
    std::vector<Ring> holes;
    while (c.eat(',')) holes.push_back(detail::wkt_ring(c));
    c.expect(')');
    c.skip_ws();
    if (c.pos != text.size()) throw InputFormat("WKT: trailing text after POLYGON");
    return GeoPolygon::make(std::move(ext), std::move(holes));
}

/// Parses the one-polygon-per-line format written by emit_wkt.
inline std::vector<GeoPolygon> parse_wkt(const std::string& text) {
    std::vector<GeoPolygon> out;
    size_t start = 0;
    while (start < text.size()) {
        size_t nl = text.find('\n', start);
        if (nl == std::string::npos) nl = text.size();
        std::string line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos)
            out.push_back(polygon_from_wkt(line));
        start = nl + 1;
    }
    return out;
}

} // namespace tileforge
