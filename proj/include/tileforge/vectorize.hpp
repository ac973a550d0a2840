#pragma once

#include <array>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tileforge/geo.hpp"
#include "tileforge/geometry.hpp"

namespace tileforge {

/// Watermark text regions in pixel space, half-open rects [c0,c1) x [r0,r1).
struct StampMask {
    std::vector<std::array<int, 4>> rects; // c0, r0, c1, r1
};

enum class EdgeTag { N, E, S, W };

inline char edge_tag_char(EdgeTag t) {
    switch (t) {
        case EdgeTag::N: return 'N';
        case EdgeTag::E: return 'E';
        case EdgeTag::S: return 'S';
        default: return 'W';
    }
}

inline std::optional<EdgeTag> edge_tag_from(const std::string& s) {
    if (s == "N") return EdgeTag::N;
    if (s == "E") return EdgeTag::E;
    if (s == "S") return EdgeTag::S;
    if (s == "W") return EdgeTag::W;
    return std::nullopt;
}

/// One piece of an object boundary from one or more tiles. Closed fragments
/// are rings (first point repeated last, no edge tags); open fragments carry
/// the tile edges their endpoints sit on.
struct BoundaryFragment {
    GeoPolyline points;
    bool closed = false;
    std::vector<std::string> source_tiles; // sorted, unique
    std::optional<EdgeTag> start_edge;
    std::optional<EdgeTag> end_edge;

    BBox bbox() const { return bbox_of_points(points.points); }
};

struct VectorizeParams {
    int threshold = 128;
    // degrees; when unset, 0.25 pixel widths of the tile being vectorized
    std::optional<double> simplify_eps;
    int min_object_px = 16;
};

// -------------------------------------------------------- texture removal

/// Replace each masked pixel with the nearest unmasked pixel value in its row
/// (ties go left, original values only). Rows fully masked stay unchanged.
inline RasterTile remove_textures(const RasterTile& tile, const StampMask& mask) {
    const int W = tile.meta.width_px;
    const int H = tile.meta.height_px;
    for (const auto& r : mask.rects) {
        if (r[0] < 0 || r[1] < 0 || r[2] > W || r[3] > H || r[0] > r[2] || r[1] > r[3])
            throw MaskOutOfBounds("stamp rect outside tile '" + tile.meta.id + "'");
    }
    RasterTile out = tile;
    if (mask.rects.empty()) return out;

    std::vector<uint8_t> masked(static_cast<size_t>(W) * H, 0);
    for (const auto& r : mask.rects)
        for (int row = r[1]; row < r[3]; ++row)
            for (int col = r[0]; col < r[2]; ++col)
                masked[static_cast<size_t>(row) * W + col] = 1;

    constexpr int none = -1;
    std::vector<int> left(W), right(W);
    for (int row = 0; row < H; ++row) {
        const uint8_t* mrow = &masked[static_cast<size_t>(row) * W];
        int last = none;
        for (int c = 0; c < W; ++c) {
            if (!mrow[c]) last = c;
            left[c] = last;
        }
        last = none;
        for (int c = W - 1; c >= 0; --c) {
            if (!mrow[c]) last = c;
            right[c] = last;
        }
        for (int c = 0; c < W; ++c) {
            if (!mrow[c]) continue;
            int src = none;
            if (left[c] != none && right[c] != none)
                src = (c - left[c] <= right[c] - c) ? left[c] : right[c];
            else if (left[c] != none)
                src = left[c];
            else if (right[c] != none)
                src = right[c];
            if (src != none) out.at(row, c) = tile.at(row, src);
        }
    }
    return out;
}

// ------------------------------------------------------------ binarization

struct BinaryGrid {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> cells; // 1 = object, 0 = background

    uint8_t at(int row, int col) const {
        return cells[static_cast<size_t>(row) * width + col];
    }
};

inline BinaryGrid binarize(const RasterTile& tile, int threshold) {
    BinaryGrid g{tile.meta.width_px, tile.meta.height_px, {}};
    g.cells.resize(tile.pixels.size());
    for (size_t i = 0; i < tile.pixels.size(); ++i)
        g.cells[i] = tile.pixels[i] >= threshold ? 1 : 0;
    return g;
}

// --------------------------------------------------------- contour tracing

/// Pixel-space contour; (col, row) indices, closed contours stored without a
/// repeated endpoint.
struct PixelContour {
    std::vector<std::pair<int, int>> points;
    bool closed = false;
    std::optional<EdgeTag> start_edge;
    std::optional<EdgeTag> end_edge;
};

namespace detail {

// clockwise Moore neighborhood starting west (screen coords, row grows down)
constexpr int moore_dr[8] = {0, -1, -1, -1, 0, 1, 1, 1};
constexpr int moore_dc[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

inline int moore_dir(int from_r, int from_c, int to_r, int to_c) {
    for (int d = 0; d < 8; ++d)
        if (from_r + moore_dr[d] == to_r && from_c + moore_dc[d] == to_c) return d;
    return 0;
}

// Moore-neighbor boundary trace; returns the boundary cycle (arm pixels
// appear twice, once per direction). The walk state is (pixel, backtrack
// direction) and the walk itself is deterministic, so the contour is closed
// at the first repeated state. Stopping on the start pixel alone is not
// enough: spurs revisit it mid-cycle, and the scan-order entry state does
// not always recur, which would orbit the boundary forever.
inline std::vector<std::pair<int, int>> moore_trace(const BinaryGrid& g, int start_r, int start_c) {
    auto fg = [&](int r, int c) {
        return r >= 0 && r < g.height && c >= 0 && c < g.width && g.at(r, c) != 0;
    };
    std::vector<std::pair<int, int>> seq;
    std::unordered_map<uint64_t, size_t> first_at;
    int cur_r = start_r, cur_c = start_c;
    int prev_r = start_r, prev_c = start_c - 1; // west of the scan-order start is background
    const size_t cap = 4 * static_cast<size_t>(g.width) * g.height + 8;
    size_t loop_begin = 0;
    bool looped = false;
    while (seq.size() < cap) {
        const int d = moore_dir(cur_r, cur_c, prev_r, prev_c);
        const uint64_t state = (static_cast<uint64_t>(cur_r) * g.width + cur_c) * 8 + d;
        const auto [it, fresh] = first_at.emplace(state, seq.size());
        if (!fresh) {
            loop_begin = it->second;
            looped = true;
            break;
        }
        seq.emplace_back(cur_c, cur_r);
        int next_r = -1, next_c = -1, back_r = prev_r, back_c = prev_c;
        for (int k = 1; k <= 8; ++k) {
            const int nd = (d + k) % 8;
            const int nr = cur_r + moore_dr[nd];
            const int nc = cur_c + moore_dc[nd];
            if (fg(nr, nc)) {
                const int pd = (d + k - 1 + 8) % 8;
                back_r = cur_r + moore_dr[pd];
                back_c = cur_c + moore_dc[pd];
                next_r = nr;
                next_c = nc;
                break;
            }
        }
        if (next_r < 0) break; // isolated pixel
        cur_r = next_r;
        cur_c = next_c;
        prev_r = back_r;
        prev_c = back_c;
    }
    if (looped && loop_begin > 0)
        seq.erase(seq.begin(), seq.begin() + static_cast<long>(loop_begin));
    return seq;
}

} // namespace detail

/// Outer boundaries of all 8-connected foreground components, ordered by
/// (topmost, then leftmost) start pixel. Components touching the image border
/// are split into open contours at border-to-border runs; components with
/// fewer than min_object_px pixels are dropped.
inline std::vector<PixelContour> trace_boundaries(const BinaryGrid& g, int min_object_px = 16) {
    const int W = g.width, H = g.height;
    std::vector<PixelContour> out;
    if (W == 0 || H == 0) return out;
    std::vector<uint8_t> seen(static_cast<size_t>(W) * H, 0);

    auto is_border = [&](const std::pair<int, int>& p) {
        return p.second == 0 || p.second == H - 1 || p.first == 0 || p.first == W - 1;
    };
    auto tag_of = [&](const std::pair<int, int>& p) -> EdgeTag {
        if (p.second == 0) return EdgeTag::N;
        if (p.first == W - 1) return EdgeTag::E;
        if (p.second == H - 1) return EdgeTag::S;
        return EdgeTag::W;
    };

    for (int r = 0; r < H; ++r) {
        for (int c = 0; c < W; ++c) {
            if (g.at(r, c) == 0 || seen[static_cast<size_t>(r) * W + c]) continue;

            // flood the component to mark it visited and count pixels
            size_t count = 0;
            std::deque<std::pair<int, int>> queue{{r, c}};
            seen[static_cast<size_t>(r) * W + c] = 1;
            while (!queue.empty()) {
                auto [qr, qc] = queue.front();
                queue.pop_front();
                ++count;
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int nr = qr + dr, nc = qc + dc;
                        if (nr < 0 || nr >= H || nc < 0 || nc >= W) continue;
                        if (g.at(nr, nc) == 0) continue;
                        uint8_t& s = seen[static_cast<size_t>(nr) * W + nc];
                        if (!s) {
                            s = 1;
                            queue.emplace_back(nr, nc);
                        }
                    }
                }
            }
            if (count < static_cast<size_t>(min_object_px)) continue;

            auto cycle = detail::moore_trace(g, r, c);

            // delete cycle edges joining two border pixels; what remains are
            // the object's genuine boundary runs
            const size_t n = cycle.size();
            size_t first_cut = n;
            for (size_t i = 0; i < n; ++i) {
                if (is_border(cycle[i]) && is_border(cycle[(i + 1) % n])) {
                    first_cut = i;
                    break;
                }
            }
            if (first_cut == n) {
                if (n >= 1) {
                    PixelContour pc;
                    pc.points = std::move(cycle);
                    pc.closed = true;
                    out.push_back(std::move(pc));
                }
                continue;
            }
            // rotate so the sequence starts just after a deleted edge, then
            // split linearly at every remaining deleted edge
            std::rotate(cycle.begin(), cycle.begin() + static_cast<long>((first_cut + 1) % n), cycle.end());
            std::vector<std::pair<int, int>> chain;
            auto flush = [&]() {
                if (chain.size() >= 2) {
                    PixelContour pc;
                    pc.closed = false;
                    pc.start_edge = tag_of(chain.front());
                    pc.end_edge = tag_of(chain.back());
                    pc.points = std::move(chain);
                    out.push_back(std::move(pc));
                }
                chain.clear();
            };
            for (size_t i = 0; i < n; ++i) {
                chain.push_back(cycle[i]);
                const bool cut = i + 1 < n ? (is_border(cycle[i]) && is_border(cycle[i + 1])) : true;
                if (cut) flush();
            }
            flush();
        }
    }
    return out;
}

// ---------------------------------------------------------- simplification

/// Douglas-Peucker; keeps both endpoints, drops points whose perpendicular
/// deviation from the simplified chain is <= eps.
inline std::vector<GeoPoint> simplify(const std::vector<GeoPoint>& pts, double eps) {
    const size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<uint8_t> keep(n, 0);
    keep[0] = 1;
    keep[n - 1] = 1;
    std::vector<std::pair<size_t, size_t>> stack{{0, n - 1}};
    while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        if (j <= i + 1) continue;
        double worst = 0.0;
        size_t at = i;
        for (size_t k = i + 1; k < j; ++k) {
            const double d = point_segment_distance(pts[k], pts[i], pts[j]);
            if (d > worst) {
                worst = d;
                at = k;
            }
        }
        if (worst > eps) {
            keep[at] = 1;
            stack.emplace_back(i, at);
            stack.emplace_back(at, j);
        }
    }
    std::vector<GeoPoint> out;
    out.reserve(n);
    for (size_t k = 0; k < n; ++k)
        if (keep[k]) out.push_back(pts[k]);
    return out;
}

namespace detail {

// drop zero-width spikes (x, y, x patterns); `cyclic` wraps around the ends
inline std::vector<std::pair<int, int>> collapse_spikes(std::vector<std::pair<int, int>> pts,
                                                        bool cyclic) {
    bool changed = true;
    while (changed && pts.size() >= 3) {
        changed = false;
        const size_t n = pts.size();
        std::vector<uint8_t> drop(n, 0);
        const size_t lo = cyclic ? 0 : 1;
        const size_t hi = cyclic ? n : n - 1;
        for (size_t i = lo; i < hi; ++i) {
            const auto& prev = pts[(i + n - 1) % n];
            const auto& next = pts[(i + 1) % n];
            if (prev == next && !drop[(i + n - 1) % n] && !drop[(i + 1) % n]) {
                drop[i] = 1;
                changed = true;
            }
        }
        if (!changed) break;
        std::vector<std::pair<int, int>> kept;
        kept.reserve(n);
        for (size_t i = 0; i < n; ++i)
            if (!drop[i]) kept.push_back(pts[i]);
        // collapse the duplicates left where a spike tip was removed
        std::vector<std::pair<int, int>> dedup;
        dedup.reserve(kept.size());
        for (const auto& p : kept)
            if (dedup.empty() || !(dedup.back() == p)) dedup.push_back(p);
        if (cyclic)
            while (dedup.size() >= 2 && dedup.front() == dedup.back()) dedup.pop_back();
        pts = std::move(dedup);
    }
    return pts;
}

} // namespace detail

/// remove_textures -> binarize -> trace -> pixel-center geo mapping ->
/// simplify; fragments are ordered as trace_boundaries orders contours.
inline std::vector<BoundaryFragment> vectorize_tile(const RasterTile& tile,
                                                    const StampMask& mask,
                                                    const VectorizeParams& params) {
    if (params.threshold < 0 || params.threshold > 255)
        throw InputFormat("threshold must be in [0, 255]");
    if (params.simplify_eps && *params.simplify_eps < 0.0)
        throw InputFormat("simplify_eps must be >= 0");

    const RasterTile clean = remove_textures(tile, mask);
    const BinaryGrid grid = binarize(clean, params.threshold);
    const auto contours = trace_boundaries(grid, params.min_object_px);

    const GeoTransform tr = transform_of(tile.meta);
    const double eps = params.simplify_eps ? *params.simplify_eps : 0.25 * tr.lon_per_px;

    // a contour living entirely inside one masked rect outlines inpainted
    // pixels, not observed ones; whatever the row fill synthesized there is
    // no evidence of an object
    auto inside_mask = [&mask](const PixelContour& contour) {
        for (const auto& rect : mask.rects) {
            bool all = true;
            for (const auto& [c, r] : contour.points) {
                if (c < rect[0] || c >= rect[2] || r < rect[1] || r >= rect[3]) {
                    all = false;
                    break;
                }
            }
            if (all) return true;
        }
        return false;
    };

    std::vector<BoundaryFragment> frags;
    for (const auto& contour : contours) {
        if (inside_mask(contour)) continue;
        auto px = detail::collapse_spikes(contour.points, contour.closed);
        if (contour.closed ? px.size() < 3 : px.size() < 2) continue;
        std::vector<GeoPoint> geo;
        geo.reserve(px.size() + 1);
        for (const auto& [c, r] : px) geo.push_back(px_to_geo(tr, c + 0.5, r + 0.5));
        if (contour.closed) geo.push_back(geo.front());
        geo = simplify(geo, eps);
        if (contour.closed) {
            // a ring needs 3 distinct points beside the closing duplicate
            if (geo.size() < 4) continue;
        } else if (geo.size() < 2) {
            continue;
        }
        BoundaryFragment f;
        f.points = GeoPolyline{std::move(geo)};
        f.closed = contour.closed;
        f.source_tiles = {tile.meta.id};
        f.start_edge = contour.start_edge;
        f.end_edge = contour.end_edge;
        frags.push_back(std::move(f));
    }
    return frags;
}

} // namespace tileforge
