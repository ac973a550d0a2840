#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tileforge/geo.hpp"
#include "tileforge/geometry.hpp"
#include "tileforge/vectorize.hpp"

namespace tileforge {

struct StitchParams {
    double quant_cell = 0.0;       // LCSP quantization cell, degrees
    int min_lcs = 3;
    double join_tol = 0.0;         // endpoint snap distance, degrees
    int icp_max_iter = 20;
    double icp_conv_tol = 1e-9;
    double icp_match_radius = 0.0;

    /// defaults expressed for a tile resolution of px_deg degrees per pixel:
    /// 1 px quantization cell, 1.5 px join tolerance, 3 px match radius
    static StitchParams for_pixel_size(double px_deg) {
        StitchParams p;
        p.quant_cell = px_deg;
        p.join_tol = 1.5 * px_deg;
        p.icp_match_radius = 3.0 * px_deg;
        return p;
    }
};

enum class StitchMode { lcsp, register_ };

/// Aligned subsequence between two fragments. Indices refer to fragment a's
/// points and, when reversed is set, to b's points traversed backward
/// (index j addresses b.points[size-1-j]).
struct FragmentMatch {
    int a_begin = 0, a_end = 0; // half-open index interval covering the matches
    int b_begin = 0, b_end = 0;
    std::vector<std::pair<int, int>> pairs; // matched (a index, b-view index), ascending
    int score = 0;                          // == pairs.size()
    bool reversed = false;
    BBox overlap; // the tile-overlap window the match was computed in
};

/// Translation-only alignment correction for fragment b.
struct RigidShift {
    double dx = 0.0;
    double dy = 0.0;
};

namespace detail {

using QCell = std::pair<long long, long long>;

inline QCell quantize(const GeoPoint& p, double cell) {
    return {static_cast<long long>(std::floor(p.lon / cell)),
            static_cast<long long>(std::floor(p.lat / cell))};
}

/// LCS over cell equality, reconstructed deterministically: ties prefer
/// consuming b, which yields the match whose a indices start earliest.
inline std::vector<std::pair<int, int>> lcs_pairs(const std::vector<QCell>& a,
                                                  const std::vector<QCell>& b) {
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    if (n == 0 || m == 0) return {};
    // dp[i][j] = LCS length of a[i..) vs b[j..)
    std::vector<int> dp(static_cast<size_t>(n + 1) * (m + 1), 0);
    auto at = [&](int i, int j) -> int& { return dp[static_cast<size_t>(i) * (m + 1) + j]; };
    for (int i = n - 1; i >= 0; --i)
        for (int j = m - 1; j >= 0; --j)
            at(i, j) = a[i] == b[j] ? at(i + 1, j + 1) + 1
                                    : std::max(at(i + 1, j), at(i, j + 1));
    std::vector<std::pair<int, int>> pairs;
    int i = 0, j = 0;
    while (i < n && j < m) {
        if (a[i] == b[j] && at(i, j) == at(i + 1, j + 1) + 1) {
            pairs.emplace_back(i, j);
            ++i;
            ++j;
        } else if (at(i, j + 1) >= at(i + 1, j)) {
            ++j;
        } else {
            ++i;
        }
    }
    return pairs;
}

/// Resample a chain so consecutive points sit at most `spacing` apart,
/// keeping every original vertex. Matching compares quantized point runs, so
/// straight stretches that simplification reduced to bare endpoints need
/// their intermediate samples restored before they can align.
inline std::vector<GeoPoint> densify(const std::vector<GeoPoint>& pts, double spacing) {
    if (pts.size() < 2 || spacing <= 0.0) return pts;
    std::vector<GeoPoint> out;
    out.reserve(pts.size() * 2);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const GeoPoint& p = pts[i];
        const GeoPoint& q = pts[i + 1];
        out.push_back(p);
        const double len = std::hypot(q.lon - p.lon, q.lat - p.lat);
        if (len <= spacing) continue;
        const int sub = static_cast<int>(std::ceil(len / spacing));
        for (int k = 1; k < sub; ++k) {
            const double t = static_cast<double>(k) / sub;
            out.push_back({p.lon + t * (q.lon - p.lon), p.lat + t * (q.lat - p.lat)});
        }
    }
    out.push_back(pts.back());
    return out;
}

inline std::vector<int> indices_in(const std::vector<GeoPoint>& pts, const BBox& zone) {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i)
        if (zone.contains(pts[i])) idx.push_back(i);
    return idx;
}

inline std::vector<QCell> cells_at(const std::vector<GeoPoint>& pts,
                                   const std::vector<int>& idx, double cell) {
    std::vector<QCell> cs;
    cs.reserve(idx.size());
    for (int i : idx) cs.push_back(quantize(pts[i], cell));
    return cs;
}

} // namespace detail

/// Longest common quantized-cell subsequence between the two fragments'
/// points inside the overlap window (expanded by join_tol), trying b forward
/// and reversed. None when the best score is below min_lcs.
inline std::optional<FragmentMatch> lcsp_match(const BoundaryFragment& a,
                                               const BoundaryFragment& b,
                                               const BBox& overlap,
                                               const StitchParams& params) {
    const BBox zone = overlap.expanded(params.join_tol);
    const auto& av = a.points.points;
    const auto ra = detail::indices_in(av, zone);
    const auto ca = detail::cells_at(av, ra, params.quant_cell);
    if (ca.empty()) return std::nullopt;

    std::optional<FragmentMatch> best;
    for (const bool reversed : {false, true}) {
        std::vector<GeoPoint> bv = b.points.points;
        if (reversed) std::reverse(bv.begin(), bv.end());
        const auto rb = detail::indices_in(bv, zone);
        const auto cb = detail::cells_at(bv, rb, params.quant_cell);
        const auto raw = detail::lcs_pairs(ca, cb);
        const int score = static_cast<int>(raw.size());
        if (score < params.min_lcs) continue;
        if (best && best->score >= score) continue; // forward preferred on ties
        FragmentMatch m;
        m.reversed = reversed;
        m.score = score;
        m.overlap = overlap;
        m.pairs.reserve(raw.size());
        for (const auto& [pi, qi] : raw) m.pairs.emplace_back(ra[pi], rb[qi]);
        m.a_begin = m.pairs.front().first;
        m.a_end = m.pairs.back().first + 1;
        m.b_begin = m.pairs.front().second;
        m.b_end = m.pairs.back().second + 1;
        best = std::move(m);
    }
    return best;
}

/// Iterative closest point, translation only; returns the cumulative shift to
/// apply to b. Pure nearest-neighbor correspondence within icp_match_radius.
inline RigidShift register_points(const std::vector<GeoPoint>& a_pts,
                                  const std::vector<GeoPoint>& b_pts,
                                  const StitchParams& params) {
    if (a_pts.empty() || b_pts.empty())
        throw NoCorrespondences("point set empty");
    double sx = 0.0, sy = 0.0;
    for (int iter = 0; iter < params.icp_max_iter; ++iter) {
        double rx = 0.0, ry = 0.0;
        int matched = 0;
        for (const auto& bp : b_pts) {
            const GeoPoint s{bp.lon + sx, bp.lat + sy};
            double best = std::numeric_limits<double>::infinity();
            const GeoPoint* nearest = nullptr;
            for (const auto& ap : a_pts) {
                const double d2 = (ap.lon - s.lon) * (ap.lon - s.lon) +
                                  (ap.lat - s.lat) * (ap.lat - s.lat);
                if (d2 < best) {
                    best = d2;
                    nearest = &ap;
                }
            }
            if (nearest && std::sqrt(best) <= params.icp_match_radius) {
                rx += nearest->lon - s.lon;
                ry += nearest->lat - s.lat;
                ++matched;
            }
        }
        if (matched == 0) {
            if (iter == 0) throw NoCorrespondences("no pairs within icp_match_radius");
            break;
        }
        rx /= matched;
        ry /= matched;
        sx += rx;
        sy += ry;
        if (std::hypot(sx, sy) > params.icp_match_radius)
            throw ShiftTooLarge("cumulative shift exceeds icp_match_radius");
        if (std::hypot(rx, ry) < params.icp_conv_tol) break;
    }
    return {sx, sy};
}

namespace detail {

// matched pairs split into contiguous blocks wherever an index jumps by more
// than this many fragment points; a block is one physically continuous run
constexpr int block_gap = 10;

struct Block {
    size_t begin = 0, end = 0; // pair-list index range, half-open
};

inline std::vector<Block> split_blocks(const std::vector<std::pair<int, int>>& pairs) {
    std::vector<Block> blocks;
    size_t start = 0;
    for (size_t k = 1; k <= pairs.size(); ++k) {
        const bool cut = k == pairs.size() ||
                         pairs[k].first - pairs[k - 1].first > block_gap ||
                         pairs[k].second - pairs[k - 1].second > block_gap;
        if (cut) {
            blocks.push_back({start, k});
            start = k;
        }
    }
    return blocks;
}

inline GeoPoint midpoint(const GeoPoint& a, const GeoPoint& b) {
    return {0.5 * (a.lon + b.lon), 0.5 * (a.lat + b.lat)};
}

inline void append_range(std::vector<GeoPoint>& out, const std::vector<GeoPoint>& src,
                         int begin, int end) {
    for (int i = begin; i < end && i < static_cast<int>(src.size()); ++i)
        if (i >= 0) out.push_back(src[i]);
}

// If the chain's first and last runs inside `zone` trace the same boundary
// (their quantized cells share an LCS of >= min_lcs points), reconcile them by
// pointwise midpoints and return the resulting closed ring.
inline std::optional<std::vector<GeoPoint>> self_splice(const std::vector<GeoPoint>& m,
                                                        const BBox& zone,
                                                        const StitchParams& params) {
    const int L = static_cast<int>(m.size());
    int h = 0;
    while (h < L && zone.contains(m[h])) ++h;
    int t = L;
    while (t > 0 && zone.contains(m[t - 1])) --t;
    if (h < 2 || L - t < 2 || h > t) return std::nullopt;

    std::vector<GeoPoint> head(m.begin(), m.begin() + h);
    std::vector<GeoPoint> tail(m.begin() + t, m.end());
    std::vector<int> hidx(head.size()), tidx(tail.size());
    for (size_t i = 0; i < head.size(); ++i) hidx[i] = static_cast<int>(i);
    for (size_t i = 0; i < tail.size(); ++i) tidx[i] = static_cast<int>(i);
    const auto pairs = lcs_pairs(cells_at(head, hidx, params.quant_cell),
                                 cells_at(tail, tidx, params.quant_cell));
    if (static_cast<int>(pairs.size()) < params.min_lcs) return std::nullopt;

    // ring: merged head/tail run, head leftover, untouched middle, tail lead-in
    std::vector<GeoPoint> ring;
    ring.reserve(m.size());
    for (const auto& [hi, ti] : pairs) ring.push_back(midpoint(head[hi], tail[ti]));
    append_range(ring, m, pairs.back().first + 1, h);
    append_range(ring, m, h, t);
    append_range(ring, m, t, t + pairs.front().second);
    return ring;
}

} // namespace detail

/// Splice two fragments along their match: unmatched lead-in from one side,
/// pointwise midpoints across each matched run, bridges between runs from
/// whichever side carries more detail, then the other side's remainder. The
/// side kept at each free end is the one dropping fewer points. When the
/// result's end runs still trace the same boundary inside the overlap window,
/// they are midpoint-reconciled and the fragment closes into a ring.
inline BoundaryFragment merge_fragments(const BoundaryFragment& a,
                                        const BoundaryFragment& b,
                                        const FragmentMatch& m,
                                        const StitchParams& params) {
    const auto& av = a.points.points;
    std::vector<GeoPoint> bv = b.points.points;
    if (m.reversed) std::reverse(bv.begin(), bv.end());

    if (m.pairs.empty() || m.score != static_cast<int>(m.pairs.size()))
        throw IncompatibleMatch("match has no pairs");
    for (size_t k = 0; k < m.pairs.size(); ++k) {
        const auto& [ai, bi] = m.pairs[k];
        if (ai < 0 || ai >= static_cast<int>(av.size()) || bi < 0 ||
            bi >= static_cast<int>(bv.size()))
            throw IncompatibleMatch("match index out of range");
        if (k > 0 && (ai <= m.pairs[k - 1].first || bi <= m.pairs[k - 1].second))
            throw IncompatibleMatch("match pairs not ascending");
    }
    if (m.a_begin != m.pairs.front().first || m.a_end != m.pairs.back().first + 1 ||
        m.b_begin != m.pairs.front().second || m.b_end != m.pairs.back().second + 1)
        throw IncompatibleMatch("ranges disagree with pairs");

    const auto blocks = detail::split_blocks(m.pairs);
    const int a_first = m.pairs.front().first, a_last = m.pairs.back().first;
    const int b_first = m.pairs.front().second, b_last = m.pairs.back().second;

    const int dropped_ab = b_first + (static_cast<int>(av.size()) - 1 - a_last);
    const int dropped_ba = a_first + (static_cast<int>(bv.size()) - 1 - b_last);
    const bool head_from_a = dropped_ab <= dropped_ba;

    std::vector<GeoPoint> out;
    out.reserve(av.size() + bv.size());
    if (head_from_a)
        detail::append_range(out, av, 0, a_first);
    else
        detail::append_range(out, bv, 0, b_first);
    for (size_t t = 0; t < blocks.size(); ++t) {
        for (size_t k = blocks[t].begin; k < blocks[t].end; ++k)
            out.push_back(detail::midpoint(av[m.pairs[k].first], bv[m.pairs[k].second]));
        if (t + 1 < blocks.size()) {
            const int a_lo = m.pairs[blocks[t].end - 1].first + 1;
            const int a_hi = m.pairs[blocks[t + 1].begin].first;
            const int b_lo = m.pairs[blocks[t].end - 1].second + 1;
            const int b_hi = m.pairs[blocks[t + 1].begin].second;
            if (a_hi - a_lo >= b_hi - b_lo)
                detail::append_range(out, av, a_lo, a_hi);
            else
                detail::append_range(out, bv, b_lo, b_hi);
        }
    }
    if (head_from_a)
        detail::append_range(out, bv, b_last + 1, static_cast<int>(bv.size()));
    else
        detail::append_range(out, av, a_last + 1, static_cast<int>(av.size()));

    std::vector<GeoPoint> dedup;
    dedup.reserve(out.size());
    for (const auto& p : out)
        if (dedup.empty() || !(dedup.back() == p)) dedup.push_back(p);
    out = std::move(dedup);

    BoundaryFragment merged;
    merged.source_tiles = a.source_tiles;
    for (const auto& s : b.source_tiles)
        if (std::find(merged.source_tiles.begin(), merged.source_tiles.end(), s) ==
            merged.source_tiles.end())
            merged.source_tiles.push_back(s);
    std::sort(merged.source_tiles.begin(), merged.source_tiles.end());

    const double gap = std::hypot(out.front().lon - out.back().lon,
                                  out.front().lat - out.back().lat);
    if (out.size() >= 3 && gap <= params.join_tol) {
        if (gap > 0.0) out.push_back(out.front());
        merged.closed = true;
    } else if (auto ring = detail::self_splice(out, m.overlap.expanded(params.join_tol), params)) {
        out = std::move(*ring);
        std::vector<GeoPoint> clean;
        for (const auto& p : out)
            if (clean.empty() || !(clean.back() == p)) clean.push_back(p);
        out = std::move(clean);
        out.push_back(out.front());
        merged.closed = true;
    } else {
        merged.closed = false;
        merged.start_edge = head_from_a ? a.start_edge
                                        : (m.reversed ? b.end_edge : b.start_edge);
        merged.end_edge = head_from_a ? (m.reversed ? b.start_edge : b.end_edge)
                                      : a.end_edge;
    }
    merged.points = GeoPolyline{std::move(out)};
    return merged;
}

namespace detail {

inline std::optional<BBox> pair_overlap(const BoundaryFragment& f,
                                        const BoundaryFragment& g,
                                        const std::map<std::string, BBox>& tile_bboxes) {
    std::optional<BBox> zone;
    for (const auto& ta : f.source_tiles) {
        for (const auto& tb : g.source_tiles) {
            if (ta == tb) continue;
            auto ia = tile_bboxes.find(ta);
            auto ib = tile_bboxes.find(tb);
            if (ia == tile_bboxes.end()) throw UnknownId(ta);
            if (ib == tile_bboxes.end()) throw UnknownId(tb);
            const BBox inter = ia->second.intersection(ib->second);
            if (!inter.valid() || inter.area() <= 0.0) continue;
            zone = zone ? zone->united(inter) : inter;
        }
    }
    return zone;
}

/// Douglas-Peucker for a closed ring (no repeated last point): anchored at
/// the smallest point and the point farthest from it, each arc simplified
/// separately so no edge of the ring is privileged.
inline Ring simplify_ring(const Ring& ring, double eps) {
    const size_t n = ring.size();
    if (n < 4 || eps <= 0.0) return ring;
    size_t a0 = 0;
    for (size_t i = 1; i < n; ++i)
        if (ring[i] < ring[a0]) a0 = i;
    size_t a1 = a0;
    double far2 = -1.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = ring[i].lon - ring[a0].lon;
        const double dy = ring[i].lat - ring[a0].lat;
        const double d2 = dx * dx + dy * dy;
        if (d2 > far2) {
            far2 = d2;
            a1 = i;
        }
    }
    if (a1 == a0) return ring;
    std::vector<GeoPoint> rot;
    rot.reserve(n + 1);
    for (size_t i = 0; i < n; ++i) rot.push_back(ring[(a0 + i) % n]);
    const size_t split = (a1 + n - a0) % n;
    std::vector<GeoPoint> arc1(rot.begin(), rot.begin() + static_cast<long>(split) + 1);
    std::vector<GeoPoint> arc2(rot.begin() + static_cast<long>(split), rot.end());
    arc2.push_back(rot.front());
    const auto s1 = simplify(arc1, eps);
    const auto s2 = simplify(arc2, eps);
    Ring out(s1.begin(), s1.end());
    out.insert(out.end(), s2.begin() + 1, s2.end() - 1);
    return out.size() >= 3 ? out : ring;
}

inline std::pair<GeoPoint, size_t> fragment_sort_key(const BoundaryFragment& f) {
    GeoPoint mn = f.points.points.front();
    for (const auto& p : f.points.points)
        if (p < mn) mn = p;
    return {mn, f.points.points.size()};
}

inline std::string joined_sources(const BoundaryFragment& f) {
    std::string s;
    for (size_t i = 0; i < f.source_tiles.size(); ++i) {
        if (i) s += "+";
        s += f.source_tiles[i];
    }
    return s;
}

} // namespace detail

/// Greedy cross-tile merging: repeatedly take the highest-scoring match among
/// fragments whose source tiles overlap and splice the pair, until nothing
/// matches. Closed fragments pass through. Output is independent of the input
/// order (fragments are canonically ordered on entry) and sorted by their
/// smallest contained point.
inline std::vector<BoundaryFragment> stitch_group(std::vector<BoundaryFragment> frags,
                                                  const std::map<std::string, BBox>& tile_bboxes,
                                                  const StitchParams& params,
                                                  StitchMode mode) {
    std::sort(frags.begin(), frags.end(),
              [](const BoundaryFragment& x, const BoundaryFragment& y) {
                  const auto jx = detail::joined_sources(x);
                  const auto jy = detail::joined_sources(y);
                  if (jx != jy) return jx < jy;
                  const auto kx = detail::fragment_sort_key(x);
                  const auto ky = detail::fragment_sort_key(y);
                  if (!(kx.first == ky.first)) return kx.first < ky.first;
                  if (kx.second != ky.second) return kx.second < ky.second;
                  return x.closed < y.closed;
              });

    std::vector<BoundaryFragment> done; // closed: never re-enter matching
    std::vector<std::pair<int, BoundaryFragment>> open;
    int next_id = 0;
    for (auto& f : frags) {
        if (f.closed) {
            done.push_back(std::move(f));
        } else {
            f.points.points = detail::densify(f.points.points, params.quant_cell);
            open.emplace_back(next_id++, std::move(f));
        }
    }

    struct PairEval {
        std::optional<FragmentMatch> match;
        RigidShift shift;
    };
    std::map<std::pair<int, int>, PairEval> cache;

    auto evaluate = [&](const BoundaryFragment& fa, const BoundaryFragment& fb) -> PairEval {
        const auto zone = detail::pair_overlap(fa, fb, tile_bboxes);
        if (!zone) return {};
        if (mode == StitchMode::lcsp) return {lcsp_match(fa, fb, *zone, params), {}};
        try {
            const BBox z = zone->expanded(params.join_tol);
            const auto ia = detail::indices_in(fa.points.points, z);
            const auto ib = detail::indices_in(fb.points.points, z);
            std::vector<GeoPoint> ap, bp;
            for (int i : ia) ap.push_back(fa.points.points[i]);
            for (int i : ib) bp.push_back(fb.points.points[i]);
            const RigidShift shift = register_points(ap, bp, params);
            BoundaryFragment shifted = fb;
            for (auto& p : shifted.points.points) {
                p.lon += shift.dx;
                p.lat += shift.dy;
            }
            return {lcsp_match(fa, shifted, *zone, params), shift};
        } catch (const NoCorrespondences&) {
            return {};
        } catch (const ShiftTooLarge&) {
            return {};
        }
    };

    while (open.size() >= 2) {
        int best_i = -1, best_j = -1, best_score = 0;
        for (size_t x = 0; x < open.size(); ++x) {
            for (size_t y = x + 1; y < open.size(); ++y) {
                const auto key = std::make_pair(open[x].first, open[y].first);
                auto it = cache.find(key);
                if (it == cache.end())
                    it = cache.emplace(key, evaluate(open[x].second, open[y].second)).first;
                if (!it->second.match) continue;
                const int score = it->second.match->score;
                if (score > best_score) {
                    best_score = score;
                    best_i = static_cast<int>(x);
                    best_j = static_cast<int>(y);
                }
            }
        }
        if (best_i < 0) break;

        const auto key = std::make_pair(open[best_i].first, open[best_j].first);
        const PairEval& ev = cache[key];
        BoundaryFragment fb = open[best_j].second;
        if (mode == StitchMode::register_) {
            for (auto& p : fb.points.points) {
                p.lon += ev.shift.dx;
                p.lat += ev.shift.dy;
            }
        }
        BoundaryFragment merged = merge_fragments(open[best_i].second, fb, *ev.match, params);

        const int keep_id = open[best_i].first;
        const int drop_id = open[best_j].first;
        open.erase(open.begin() + best_j);
        open[best_i].second = std::move(merged);
        for (auto it = cache.begin(); it != cache.end();) {
            if (it->first.first == keep_id || it->first.second == keep_id ||
                it->first.first == drop_id || it->first.second == drop_id)
                it = cache.erase(it);
            else
                ++it;
        }
        if (open[best_i].second.closed) {
            done.push_back(std::move(open[best_i].second));
            open.erase(open.begin() + best_i);
        }
    }

    std::vector<BoundaryFragment> out = std::move(done);
    for (auto& [id, f] : open) out.push_back(std::move(f));
    std::sort(out.begin(), out.end(),
              [](const BoundaryFragment& x, const BoundaryFragment& y) {
                  const auto kx = detail::fragment_sort_key(x);
                  const auto ky = detail::fragment_sort_key(y);
                  if (!(kx.first == ky.first)) return kx.first < ky.first;
                  const auto jx = detail::joined_sources(x);
                  const auto jy = detail::joined_sources(y);
                  if (jx != jy) return jx < jy;
                  return kx.second < ky.second;
              });
    return out;
}

/// A polygon assembled from fragments, with its contributing tiles.
struct StitchedPolygon {
    GeoPolygon polygon;
    std::vector<std::string> source_tiles;
};

struct CloseResult {
    std::vector<StitchedPolygon> polygons;
    std::vector<BoundaryFragment> leftovers;
};

/// Closed fragments become normalized polygons; open fragments whose own
/// endpoints sit within join_tol are snapped shut. Remaining open fragments
/// are leftovers, except those fully shadowed by an emitted polygon's
/// boundary (an object wholly inside one tile also pokes an arc into its
/// neighbor's frame; that arc carries no new information). Near-duplicate
/// polygons of the same object are collapsed to the first.
///
/// min_extent is a debris floor in degrees: rings smaller than
/// min_extent^2 in area and open leftovers spanning less than min_extent
/// are discarded. Per-tile noise at shared borders produces pixel-scale
/// nicks that would otherwise surface as objects or force exit 3; the
/// pipeline sets this to the same object-size floor the vectorizer uses.
///
/// simplify_eps > 0 runs Douglas-Peucker over each finished ring and
/// leftover, shedding the intermediate samples the stitcher works on.
inline CloseResult close_rings(const std::vector<BoundaryFragment>& frags, double join_tol,
                               double min_extent = 0.0, double simplify_eps = 0.0) {
    CloseResult res;
    std::vector<BoundaryFragment> open;
    for (const auto& f : frags) {
        std::vector<GeoPoint> pts = f.points.points;
        bool ring = f.closed;
        if (!ring && pts.size() >= 2) {
            const double gap = std::hypot(pts.front().lon - pts.back().lon,
                                          pts.front().lat - pts.back().lat);
            if (gap <= join_tol) {
                if (gap > 0.0) pts.push_back(pts.front());
                ring = true;
            }
        }
        if (!ring) {
            open.push_back(f);
            continue;
        }
        const Ring distinct = detail::open_dedup(pts);
        if (distinct.size() < 3)
            throw DegenerateRing("ring has fewer than 3 distinct points");
        if (simplify_eps > 0.0) {
            Ring slim = detail::simplify_ring(distinct, simplify_eps);
            pts.assign(slim.begin(), slim.end());
            pts.push_back(pts.front());
        }
        try {
            GeoPolygon poly = GeoPolygon::make(pts);
            if (polygon_area(poly) < min_extent * min_extent) continue;
            res.polygons.push_back({std::move(poly), f.source_tiles});
        } catch (const InvalidPolygon&) {
            // a merge produced a crossing ring: surface it instead of dying
            BoundaryFragment bad = f;
            bad.closed = false;
            open.push_back(std::move(bad));
        }
    }

    // collapse duplicated rings of one object traced from different tiles
    std::vector<StitchedPolygon> unique;
    for (auto& sp : res.polygons) {
        bool dup = false;
        for (const auto& kept : unique) {
            if (iou(kept.polygon, sp.polygon) >= 0.95) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(std::move(sp));
    }
    res.polygons = std::move(unique);

    for (auto& f : open) {
        const BBox fb = f.bbox();
        if (std::hypot(fb.width(), fb.height()) < min_extent) continue;
        bool shadowed = false;
        for (const auto& sp : res.polygons) {
            bool all_near = true;
            for (const auto& p : f.points.points) {
                if (!point_on_ring(sp.polygon.exterior, p, join_tol)) {
                    all_near = false;
                    break;
                }
            }
            if (all_near) {
                shadowed = true;
                break;
            }
        }
        if (!shadowed) {
            if (simplify_eps > 0.0)
                f.points.points = simplify(f.points.points, simplify_eps);
            res.leftovers.push_back(std::move(f));
        }
    }
    return res;
}

} // namespace tileforge
