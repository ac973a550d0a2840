#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "tileforge/error.hpp"

namespace tileforge {

struct KeyedRecord {
    std::string key;
    std::string seq;     // tiebreak within a key; (key, seq) is unique
    std::string payload;
};

using MapFn = std::function<std::vector<KeyedRecord>(const KeyedRecord&)>;
using ReduceFn =
    std::function<std::vector<KeyedRecord>(const std::string&, const std::vector<KeyedRecord>&)>;

struct Stage {
    std::string mapper_id;
    std::string reducer_id;
    MapFn map;
    ReduceFn reduce;
};

struct StagePlan {
    std::vector<Stage> stages;
    int workers = 1;
};

struct StageMetrics {
    double map_s = 0.0;
    double shuffle_s = 0.0;
    double reduce_s = 0.0;
};

struct MapReduceResult {
    std::vector<KeyedRecord> records;
    std::vector<StageMetrics> metrics;
};

namespace detail {

/// Runs fn(0..n-1) on up to `workers` threads. fn must not throw; tasks are
/// claimed from a shared counter so assignment is nondeterministic, which is
/// why all outputs are written to index-addressed slots by the caller.
template <class Fn>
inline void parallel_for(int n, int workers, Fn&& fn) {
    const int w = std::max(1, std::min(workers, n));
    if (w <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (int t = 0; t < w; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

inline bool record_before(const KeyedRecord& a, const KeyedRecord& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.seq < b.seq;
}

} // namespace detail

/// Runs every stage over the records: map each input (parallel), sort the
/// union of outputs by (key, seq), reduce each key group (parallel). Results
/// are assembled in input order regardless of which thread ran what, so the
/// byte stream out is a pure function of the byte stream in.
inline MapReduceResult run_mapreduce(std::vector<KeyedRecord> records, const StagePlan& plan,
                                     const std::optional<std::filesystem::path>& dump_dir = {}) {
    if (plan.stages.empty()) throw InputFormat("plan has no stages");
    if (plan.workers < 1) throw InputFormat("plan needs at least one worker");
    using clock = std::chrono::steady_clock;

    MapReduceResult result;
    for (size_t s = 0; s < plan.stages.size(); ++s) {
        const Stage& stage = plan.stages[s];
        StageMetrics metrics;

        const auto t0 = clock::now();
        const int n = static_cast<int>(records.size());
        std::vector<std::vector<KeyedRecord>> mapped(n);
        std::vector<std::string> map_err(n);
        std::vector<char> map_failed(n, 0);
        detail::parallel_for(n, plan.workers, [&](int i) {
            try {
                mapped[i] = stage.map(records[i]);
            } catch (const std::exception& e) {
                map_failed[i] = 1;
                map_err[i] = e.what();
            } catch (...) {
                map_failed[i] = 1;
                map_err[i] = "unknown error";
            }
        });
        for (int i = 0; i < n; ++i)
            if (map_failed[i])
                throw MapperFailure(records[i].key + "/" + records[i].seq, map_err[i]);
        std::vector<KeyedRecord> shuffled;
        for (auto& chunk : mapped)
            for (auto& r : chunk) shuffled.push_back(std::move(r));
        metrics.map_s = std::chrono::duration<double>(clock::now() - t0).count();

        const auto t1 = clock::now();
        std::stable_sort(shuffled.begin(), shuffled.end(), detail::record_before);
        for (size_t i = 1; i < shuffled.size(); ++i)
            if (shuffled[i].key == shuffled[i - 1].key && shuffled[i].seq == shuffled[i - 1].seq)
                throw Error("shuffle: duplicate record (" + shuffled[i].key + ", " +
                            shuffled[i].seq + ")");
        metrics.shuffle_s = std::chrono::duration<double>(clock::now() - t1).count();

        if (dump_dir) {
            std::filesystem::create_directories(*dump_dir);
            const auto path = *dump_dir / ("stage" + std::to_string(s + 1) + ".jsonl");
            std::ofstream out(path, std::ios::binary);
            if (!out) throw Error("cannot write " + path.string());
            for (const auto& r : shuffled) {
                nlohmann::json j;
                j["key"] = r.key;
                j["payload"] = r.payload;
                j["seq"] = r.seq;
                out << j.dump() << "\n";
            }
        }

        const auto t2 = clock::now();
        std::vector<std::pair<size_t, size_t>> groups;
        for (size_t i = 0; i < shuffled.size();) {
            size_t j = i + 1;
            while (j < shuffled.size() && shuffled[j].key == shuffled[i].key) ++j;
            groups.emplace_back(i, j);
            i = j;
        }
        const int g = static_cast<int>(groups.size());
        std::vector<std::vector<KeyedRecord>> reduced(g);
        std::vector<std::string> red_err(g);
        std::vector<char> red_failed(g, 0);
        detail::parallel_for(g, plan.workers, [&](int i) {
            const auto [lo, hi] = groups[i];
            const std::vector<KeyedRecord> group(shuffled.begin() + lo, shuffled.begin() + hi);
            try {
                reduced[i] = stage.reduce(group.front().key, group);
            } catch (const std::exception& e) {
                red_failed[i] = 1;
                red_err[i] = e.what();
            } catch (...) {
                red_failed[i] = 1;
                red_err[i] = "unknown error";
            }
        });
        for (int i = 0; i < g; ++i)
            if (red_failed[i])
                throw ReducerFailure(shuffled[groups[i].first].key, red_err[i]);
        records.clear();
        for (auto& chunk : reduced)
            for (auto& r : chunk) records.push_back(std::move(r));
        metrics.reduce_s = std::chrono::duration<double>(clock::now() - t2).count();

        result.metrics.push_back(metrics);
    }
    result.records = std::move(records);
    return result;
}

} // namespace tileforge
