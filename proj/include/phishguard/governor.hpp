#pragma once

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phishguard/error.hpp"

namespace phishguard {

struct GovernorConfig {
    /// Minimum spacing, in stream seconds, between processed frames.
    double frame_interval = 1.0;
    /// Processing time above which a frame is flagged as over budget.
    double processing_budget = 0.25;

    void validate() const {
        if (!(processing_budget > 0.0 && processing_budget <= frame_interval))
            throw Error(ErrorCode::invalid_argument, "governor needs 0 < processing_budget <= frame_interval");
    }
};

struct GovernedFrame {
    std::size_t index = 0;
    double timestamp = 0.0;
    double processing_seconds = 0.0;
    bool budget_exceeded = false;
};

struct GovernorStats {
    std::size_t input = 0;
    std::size_t processed = 0;
    std::size_t dropped = 0;
    std::size_t budget_exceeded = 0;
    double total_processing = 0.0;
    double mean_processing = 0.0;
    /// 1 - total processing / (processed * frame_interval), clamped to [0, 1].
    double idle_fraction = 1.0;
};

template <typename Result>
struct GovernedRun {
    std::vector<Result> results;
    std::vector<GovernedFrame> frames;
    GovernorStats stats;
};

inline double steady_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

/// Replays a timestamped stream under the frame budget. A frame is processed
/// when its timestamp is at least one interval after the previous processed
/// frame and that frame's processing has finished; every other frame is
/// dropped, never queued. `clock` measures processing time.
template <typename Item, typename Process, typename TimestampOf>
auto run_governed(std::span<const Item> stream, const GovernorConfig& cfg, Process&& process, TimestampOf&& timestamp_of,
                  const std::function<double()>& clock = steady_seconds) {
    cfg.validate();
    using Result = std::decay_t<std::invoke_result_t<Process&, const Item&>>;
    GovernedRun<Result> run;
    run.stats.input = stream.size();

    std::optional<double> next_allowed;
    std::optional<double> previous;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const double t = timestamp_of(stream[i]);
        if (previous && t < *previous)
            throw Error(ErrorCode::invalid_argument, "frame " + std::to_string(i) + " goes back in time");
        previous = t;
        if (next_allowed && t < *next_allowed) {
            ++run.stats.dropped;
            continue;
        }
        const double start = clock();
        run.results.push_back(process(stream[i]));
        const double elapsed = std::max(0.0, clock() - start);

        GovernedFrame f{i, t, elapsed, elapsed > cfg.processing_budget};
        run.stats.budget_exceeded += f.budget_exceeded ? 1 : 0;
        run.stats.total_processing += elapsed;
        run.frames.push_back(f);
        next_allowed = t + std::max(cfg.frame_interval, elapsed);
    }
    run.stats.processed = run.frames.size();
    if (run.stats.processed > 0) {
        run.stats.mean_processing = run.stats.total_processing / static_cast<double>(run.stats.processed);
        run.stats.idle_fraction = std::clamp(
            1.0 - run.stats.total_processing / (static_cast<double>(run.stats.processed) * cfg.frame_interval), 0.0, 1.0);
    }
    return run;
}

/// Single-entry hand-off between a frame producer and the governed consumer.
/// A new frame replaces any frame not yet taken.
template <typename T>
class LatestSlot {
public:
    void put(T value) {
        {
            std::lock_guard lock(mutex_);
            if (value_) ++overwritten_;
            value_ = std::move(value);
        }
        cv_.notify_one();
    }

    void close() {
        {
            std::lock_guard lock(mutex_);
            closed_ = true;
        }
        cv_.notify_all();
    }

    /// Blocks until a value is available or the slot is closed and drained.
    std::optional<T> take() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return value_.has_value() || closed_; });
        std::optional<T> out = std::move(value_);
        value_.reset();
        return out;
    }

    std::size_t overwritten() const {
        std::lock_guard lock(mutex_);
        return overwritten_;
    }

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::optional<T> value_;
    std::size_t overwritten_ = 0;
    bool closed_ = false;
};

} // namespace phishguard
