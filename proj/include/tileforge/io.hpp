#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tileforge/geo.hpp"
#include "tileforge/vectorize.hpp"

namespace tileforge {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- PGM (P5)

inline void write_pgm(const fs::path& path, int width, int height,
                      const std::vector<uint8_t>& pixels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputFormat("cannot open '" + path.string() + "' for writing");
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    if (!out) throw InputFormat("short write to '" + path.string() + "'");
}

inline std::vector<uint8_t> read_pgm(const fs::path& path, int& width, int& height) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputFormat("cannot open '" + path.string() + "'");
    auto next_token = [&]() -> std::string {
        // header tokens separated by whitespace; '#' starts a comment line
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') {
                while ((c = in.get()) != EOF && c != '\n') {}
            } else if (!std::isspace(c)) {
                tok.push_back(static_cast<char>(c));
                while ((c = in.peek()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(in.get()));
                return tok;
            }
        }
        throw InputFormat("truncated PGM header in '" + path.string() + "'");
    };
    if (next_token() != "P5") throw InputFormat("'" + path.string() + "' is not binary PGM");
    try {
        width = std::stoi(next_token());
        height = std::stoi(next_token());
        const int maxval = std::stoi(next_token());
        if (maxval != 255) throw InputFormat("unsupported PGM maxval in '" + path.string() + "'");
    } catch (const std::logic_error&) {
        throw InputFormat("malformed PGM header in '" + path.string() + "'");
    }
    if (width <= 0 || height <= 0) throw InputFormat("bad PGM dimensions in '" + path.string() + "'");
    in.get(); // single whitespace after maxval
    std::vector<uint8_t> pixels(static_cast<size_t>(width) * height);
    in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(pixels.size()))
        throw InputFormat("truncated PGM payload in '" + path.string() + "'");
    return pixels;
}

// ----------------------------------------------------------- TileMeta JSON

inline nlohmann::json meta_to_json(const TileMeta& m) {
    nlohmann::json j;
    j["id"] = m.id;
    j["nw"] = {m.nw.lon, m.nw.lat};
    j["ne"] = {m.ne.lon, m.ne.lat};
    j["sw"] = {m.sw.lon, m.sw.lat};
    j["se"] = {m.se.lon, m.se.lat};
    j["width_px"] = m.width_px;
    j["height_px"] = m.height_px;
    j["acquired_at"] = m.acquired_at;
    return j;
}

inline TileMeta meta_from_json(const nlohmann::json& j) {
    auto corner = [&](const char* name) -> GeoPoint {
        const auto& c = j.at(name);
        if (!c.is_array() || c.size() != 2)
            throw InputFormat(std::string("corner '") + name + "' must be [lon, lat]");
        return {c[0].get<double>(), c[1].get<double>()};
    };
    TileMeta m;
    try {
        m.id = j.at("id").get<std::string>();
        m.nw = corner("nw");
        m.ne = corner("ne");
        m.sw = corner("sw");
        m.se = corner("se");
        m.width_px = j.at("width_px").get<int>();
        m.height_px = j.at("height_px").get<int>();
        m.acquired_at = j.at("acquired_at").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw InputFormat(std::string("malformed tile meta: ") + e.what());
    }
    m.validate();
    return m;
}

inline TileMeta read_meta_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputFormat("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputFormat("bad JSON in '" + path.string() + "': " + e.what());
    }
    return meta_from_json(j);
}

// ------------------------------------------------------- manifest (JSONL)

inline std::vector<TileMeta> read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputFormat("cannot open manifest '" + path.string() + "'");
    std::vector<TileMeta> metas;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw InputFormat("manifest '" + path.string() + "' line " +
                              std::to_string(lineno) + ": " + e.what());
        }
        metas.push_back(meta_from_json(j));
    }
    return metas;
}

inline void write_manifest(const fs::path& path, const std::vector<TileMeta>& metas) {
    std::ofstream out(path);
    if (!out) throw InputFormat("cannot open '" + path.string() + "' for writing");
    for (const auto& m : metas) out << meta_to_json(m).dump() << "\n";
}

// -------------------------------------------------------- stamp mask JSON

inline StampMask mask_from_json(const nlohmann::json& j) {
    StampMask mask;
    try {
        for (const auto& r : j.at("rects")) {
            if (!r.is_array() || r.size() != 4)
                throw InputFormat("mask rect must be [c0, r0, c1, r1]");
            mask.rects.push_back({r[0].get<int>(), r[1].get<int>(), r[2].get<int>(), r[3].get<int>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputFormat(std::string("malformed stamp mask: ") + e.what());
    }
    return mask;
}

inline nlohmann::json mask_to_json(const StampMask& mask) {
    nlohmann::json rects = nlohmann::json::array();
    for (const auto& r : mask.rects) rects.push_back({r[0], r[1], r[2], r[3]});
    return nlohmann::json{{"rects", rects}};
}

inline StampMask read_mask_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputFormat("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputFormat("bad JSON in '" + path.string() + "': " + e.what());
    }
    return mask_from_json(j);
}

inline void write_mask_file(const fs::path& path, const StampMask& mask) {
    std::ofstream out(path);
    if (!out) throw InputFormat("cannot open '" + path.string() + "' for writing");
    out << mask_to_json(mask).dump() << "\n";
}

} // namespace tileforge
