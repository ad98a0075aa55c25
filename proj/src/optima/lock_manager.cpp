#include "optima/lock_manager.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <stdexcept>

namespace optima {

LockAudit audit_lock_events(const std::vector<LockEvent>& events) {
    struct TxnTrace {
        std::vector<PluginId> acquired;
        std::set<PluginId> released;
        bool body_seen = false;
        bool outcome_seen = false;
        bool releasing = false;
        bool order_bad = false;
        bool pairing_bad = false;
    };
    std::map<std::uint64_t, TxnTrace> traces;
    std::map<PluginId, std::uint64_t> holder;  // current owner per plugin
    LockAudit audit;

    for (const LockEvent& event : events) {
        TxnTrace& trace = traces[event.txn_id];
        switch (event.kind) {
            case LockEventKind::Acquire:
                if (trace.body_seen || trace.releasing ||
                    (!trace.acquired.empty() && trace.acquired.back() >= event.plugin))
                    trace.order_bad = true;
                if (holder.count(event.plugin))
                    trace.pairing_bad = true;  // granted while held elsewhere
                holder[event.plugin] = event.txn_id;
                trace.acquired.push_back(event.plugin);
                break;
            case LockEventKind::BodyStart:
                if (trace.body_seen || trace.releasing) trace.order_bad = true;
                trace.body_seen = true;
                break;
            case LockEventKind::Commit:
            case LockEventKind::Abort:
                if (trace.outcome_seen || trace.releasing) trace.order_bad = true;
                trace.outcome_seen = true;
                break;
            case LockEventKind::Release: {
                if (!trace.outcome_seen) trace.order_bad = true;  // release before commit/abort
                trace.releasing = true;
                auto it = holder.find(event.plugin);
                if (it == holder.end() || it->second != event.txn_id)
                    trace.pairing_bad = true;
                else
                    holder.erase(it);
                trace.released.insert(event.plugin);
                break;
            }
        }
    }

    for (auto& [txn_id, trace] : traces) {
        ++audit.transactions;
        std::set<PluginId> acquired(trace.acquired.begin(), trace.acquired.end());
        if (acquired != trace.released) trace.pairing_bad = true;
        if (trace.order_bad) ++audit.order_violations;
        if (trace.pairing_bad) ++audit.pairing_violations;
    }
    return audit;
}

LockManager::LockManager(std::vector<PluginId> plugin_ids) {
    for (PluginId id : plugin_ids) slots_.emplace(id, std::make_unique<Slot>());
}

LockManager::Slot& LockManager::slot_for(PluginId plugin) {
    auto it = slots_.find(plugin);
    if (it == slots_.end())
        throw std::invalid_argument("lock manager: unknown plugin id " + std::to_string(plugin));
    return *it->second;
}

void LockManager::log_event(std::uint64_t txn_id, LockEventKind kind, PluginId plugin) {
    std::lock_guard<std::mutex> guard(log_mutex_);
    events_.push_back(LockEvent{txn_id, kind, plugin, next_sequence_++});
}

void LockManager::acquire_all(std::uint64_t txn_id, std::span<const PluginId> ascending) {
    if (!std::is_sorted(ascending.begin(), ascending.end()) ||
        std::adjacent_find(ascending.begin(), ascending.end()) != ascending.end())
        throw std::invalid_argument("lock manager: lock ids must be strictly ascending");

    for (PluginId plugin : ascending) {
        Slot& slot = slot_for(plugin);
        std::unique_lock<std::mutex> guard(slot.mutex);
        bool flagged = false;
        while (slot.owner != 0) {
            if (slot.available.wait_for(guard, watchdog_threshold_) == std::cv_status::timeout &&
                !flagged && slot.owner != 0) {
                flagged = true;
                std::lock_guard<std::mutex> log_guard(log_mutex_);
                ++watchdog_flags_;
            }
        }
        slot.owner = txn_id;
        guard.unlock();
        log_event(txn_id, LockEventKind::Acquire, plugin);
    }
}

void LockManager::release_all(std::uint64_t txn_id, std::span<const PluginId> held) {
    for (PluginId plugin : held) {
        Slot& slot = slot_for(plugin);
        {
            std::unique_lock<std::mutex> guard(slot.mutex);
            if (slot.owner != txn_id) {
                std::lock_guard<std::mutex> log_guard(log_mutex_);
                ++safety_violations_;
            }
            slot.owner = 0;
        }
        slot.available.notify_one();
        log_event(txn_id, LockEventKind::Release, plugin);
    }
}

void LockManager::note_body_start(std::uint64_t txn_id) {
    log_event(txn_id, LockEventKind::BodyStart, -1);
}

void LockManager::note_outcome(std::uint64_t txn_id, bool committed) {
    log_event(txn_id, committed ? LockEventKind::Commit : LockEventKind::Abort, -1);
}

long long LockManager::watchdog_flags() const {
    std::lock_guard<std::mutex> guard(log_mutex_);
    return watchdog_flags_;
}

long long LockManager::safety_violations() const {
    std::lock_guard<std::mutex> guard(log_mutex_);
    return safety_violations_;
}

std::vector<LockEvent> LockManager::snapshot_event_log() const {
    std::lock_guard<std::mutex> guard(log_mutex_);
    return events_;
}

void LockManager::clear_event_log() {
    std::lock_guard<std::mutex> guard(log_mutex_);
    events_.clear();
}

}  // namespace optima
