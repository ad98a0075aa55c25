#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <vector>

namespace optima {

using PluginId = int;

// Event stream for protocol auditing. Workers add body/commit markers so
// a transaction's full lock history can be replayed by tests.
enum class LockEventKind { Acquire, Release, BodyStart, Commit, Abort };

struct LockEvent {
    std::uint64_t txn_id = 0;
    LockEventKind kind = LockEventKind::Acquire;
    PluginId plugin = -1;
    std::uint64_t sequence = 0;
};

// Replay audit over an event log. A clean log means: every transaction's
// history is acquires in ascending plugin-id order, then the body, then
// the outcome, then releases of exactly the acquired set; and per plugin
// the holding intervals never overlap.
struct LockAudit {
    long long transactions = 0;
    long long order_violations = 0;    // non-ascending acquires or events after release began
    long long pairing_violations = 0;  // releases not matching acquires, double grants
    bool clean() const { return order_violations == 0 && pairing_violations == 0; }
};

LockAudit audit_lock_events(const std::vector<LockEvent>& events);

// Exclusive locks over non-shareable plugins. Acquisition is blocking and
// must be presented in ascending plugin-id order; the manager refuses
// out-of-order requests outright since that would reopen circular waits.
class LockManager {
public:
    explicit LockManager(std::vector<PluginId> plugin_ids);

    // blocks until every lock in `ascending` is held by txn_id
    void acquire_all(std::uint64_t txn_id, std::span<const PluginId> ascending);
    void release_all(std::uint64_t txn_id, std::span<const PluginId> held);

    void note_body_start(std::uint64_t txn_id);
    void note_outcome(std::uint64_t txn_id, bool committed);

    // waits longer than the threshold raise the watchdog counter once per
    // offending acquire; the wait itself keeps blocking
    void set_watchdog_threshold(std::chrono::milliseconds threshold) { watchdog_threshold_ = threshold; }
    long long watchdog_flags() const;

    // non-zero only if an internal invariant broke (double-grant, foreign release)
    long long safety_violations() const;

    std::vector<LockEvent> snapshot_event_log() const;
    void clear_event_log();

private:
    struct Slot {
        std::mutex mutex;
        std::condition_variable available;
        std::uint64_t owner = 0;  // 0 = free
    };

    Slot& slot_for(PluginId plugin);
    void log_event(std::uint64_t txn_id, LockEventKind kind, PluginId plugin);

    std::map<PluginId, std::unique_ptr<Slot>> slots_;
    std::chrono::milliseconds watchdog_threshold_{30000};

    mutable std::mutex log_mutex_;
    std::vector<LockEvent> events_;
    std::uint64_t next_sequence_ = 0;
    long long watchdog_flags_ = 0;
    long long safety_violations_ = 0;
};

}  // namespace optima
