#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "tileforge/geo.hpp"
#include "tileforge/io.hpp"

namespace tileforge {

struct RangeQuery {
    BBox window;
};

/// Immutable tile-metadata store with a bulk-loaded (sort-tile-recursive)
/// R-tree over footprints. Build once, query from any number of threads.
class Catalog {
public:
    static constexpr int fanout = 16;

    const std::vector<TileMeta>& entries() const { return metas_; }
    size_t size() const { return metas_.size(); }

    bool contains(const std::string& id) const { return by_id_.count(id) != 0; }

    const TileMeta& meta(const std::string& id) const {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) throw UnknownId(id);
        return metas_[it->second];
    }

    /// ids of all tiles whose bbox intersects the window (closed semantics:
    /// translated edge or corner contact counts), sorted lexicographically
    std::vector<std::string> query(const BBox& window) const {
        std::vector<std::string> ids;
        if (!nodes_.empty()) {
            std::vector<int> stack{root_};
            while (!stack.empty()) {
                const Node& node = nodes_[stack.back()];
                stack.pop_back();
                if (!node.mbr.intersects(window)) continue;
                if (node.leaf) {
                    for (int k = 0; k < node.count; ++k) {
                        const int e = items_[node.first + k];
                        if (bbox_of(metas_[e]).intersects(window)) ids.push_back(metas_[e].id);
                    }
                } else {
                    for (int k = 0; k < node.count; ++k) stack.push_back(node.first + k);
                }
            }
        }
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    friend Catalog build_catalog(std::vector<TileMeta> metas);

private:
    struct Node {
        BBox mbr;
        int first = 0; // child node index, or offset into items_ for leaves
        int count = 0;
        bool leaf = false;
    };

    std::vector<TileMeta> metas_;
    std::unordered_map<std::string, size_t> by_id_;
    std::vector<Node> nodes_;
    std::vector<int> items_; // leaf entry indices into metas_
    int root_ = -1;
};

/// Validates and indexes the metas; result is independent of input order.
inline Catalog build_catalog(std::vector<TileMeta> metas) {
    for (const auto& m : metas) m.validate();
    std::sort(metas.begin(), metas.end(),
              [](const TileMeta& a, const TileMeta& b) { return a.id < b.id; });
    for (size_t i = 1; i < metas.size(); ++i)
        if (metas[i].id == metas[i - 1].id) throw DuplicateId(metas[i].id);

    Catalog cat;
    cat.metas_ = std::move(metas);
    for (size_t i = 0; i < cat.metas_.size(); ++i) cat.by_id_[cat.metas_[i].id] = i;
    if (cat.metas_.empty()) return cat;

    const int n = static_cast<int>(cat.metas_.size());
    std::vector<BBox> boxes(n);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) {
        boxes[i] = bbox_of(cat.metas_[i]);
        order[i] = i;
    }

    // STR packing: sort by center lon, cut into vertical slabs, sort each slab
    // by center lat, chunk into leaves of `fanout` entries
    auto cx = [&](int i) { return 0.5 * (boxes[i].min_lon + boxes[i].max_lon); };
    auto cy = [&](int i) { return 0.5 * (boxes[i].min_lat + boxes[i].max_lat); };

    const int leaf_count = (n + Catalog::fanout - 1) / Catalog::fanout;
    const int slabs = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(leaf_count))));
    const int per_slab = slabs > 0 ? (n + slabs - 1) / slabs : n;

    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (cx(a) != cx(b)) return cx(a) < cx(b);
        return cat.metas_[a].id < cat.metas_[b].id;
    });
    for (int s = 0; s * per_slab < n; ++s) {
        auto lo = order.begin() + s * per_slab;
        auto hi = order.begin() + std::min(n, (s + 1) * per_slab);
        std::sort(lo, hi, [&](int a, int b) {
            if (cy(a) != cy(b)) return cy(a) < cy(b);
            return cat.metas_[a].id < cat.metas_[b].id;
        });
    }
    cat.items_ = order;

    auto mbr_of_leaf = [&](int first, int count) {
        BBox b = boxes[cat.items_[first]];
        for (int k = 1; k < count; ++k) b = b.united(boxes[cat.items_[first + k]]);
        return b;
    };

    std::vector<int> level; // node indices of the level being packed
    for (int off = 0; off < n; off += Catalog::fanout) {
        const int count = std::min(Catalog::fanout, n - off);
        cat.nodes_.push_back({mbr_of_leaf(off, count), off, count, true});
        level.push_back(static_cast<int>(cat.nodes_.size()) - 1);
    }
    // pack upper levels until one root remains; children of a node are
    // contiguous in nodes_, so each level is re-emitted in packed runs
    while (level.size() > 1) {
        std::vector<int> next;
        const int base = static_cast<int>(cat.nodes_.size() - level.size());
        for (size_t off = 0; off < level.size(); off += Catalog::fanout) {
            const int count = static_cast<int>(std::min<size_t>(Catalog::fanout, level.size() - off));
            const int first = base + static_cast<int>(off);
            BBox mbr = cat.nodes_[level[off]].mbr;
            for (int k = 1; k < count; ++k) mbr = mbr.united(cat.nodes_[level[off + k]].mbr);
            cat.nodes_.push_back({mbr, first, count, false});
            next.push_back(static_cast<int>(cat.nodes_.size()) - 1);
        }
        level = std::move(next);
    }
    cat.root_ = level.front();
    return cat;
}

inline std::vector<std::string> range_query(const Catalog& cat, const RangeQuery& q) {
    if (!q.window.valid()) throw InputFormat("query window has min > max");
    return cat.query(q.window);
}

/// Load the rasters for the given ids from <root_dir>/<id>.pgm.
inline std::vector<RasterTile> load_tiles(const Catalog& cat,
                                          const std::vector<std::string>& ids,
                                          const fs::path& root_dir) {
    std::vector<RasterTile> tiles;
    tiles.reserve(ids.size());
    for (const auto& id : ids) {
        const TileMeta& m = cat.meta(id);
        const fs::path file = root_dir / (id + ".pgm");
        if (!fs::exists(file)) throw MissingRaster(id);
        int w = 0, h = 0;
        RasterTile t;
        t.meta = m;
        t.pixels = read_pgm(file, w, h);
        if (w != m.width_px || h != m.height_px) throw DimensionMismatch(id);
        tiles.push_back(std::move(t));
    }
    return tiles;
}

} // namespace tileforge
