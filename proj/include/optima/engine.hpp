#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "optima/dispatch.hpp"
#include "optima/estimator.hpp"
#include "optima/lock_manager.hpp"
#include "optima/system.hpp"
#include "optima/transaction.hpp"

namespace optima {

struct EngineReport {
    long long committed = 0;
    long long aborted = 0;
    long long violations = 0;  // constraint-violation aborts + lock-protocol breaches
    long long created_agents = 0;
    long long watchdog_flags = 0;
    double wall_seconds = 0.0;
    double throughput = 0.0;  // committed transactions per wall second
    std::map<RoleId, int> peak_agent_counts;
};

std::string write_report_json(const EngineReport& report);

struct EngineOptions {
    EngineOptions() {
        scheduling_sa.t_max = 100.0;
        scheduling_sa.cooling = txnsp::Cooling::Linear;
        scheduling_sa.a = 0.05;
    }

    txnsp::SaParams scheduling_sa;  // batch scheduling settings
    std::chrono::milliseconds watchdog_threshold{30000};
    std::uint64_t rng_seed = 0;
    std::shared_ptr<LengthEstimator> estimator;  // defaults to MeanEstimator(1.0)
};

// raised by the context to unwind a transaction body
struct TxnAbortSignal {
    std::string reason;
    bool violation = false;
};

class Engine;

// Mediator handed to transaction bodies. Every plugin use, agent
// manipulation, and message goes through here so the constraint checks
// can run; side effects on engine-managed state are buffered and only
// become visible when the transaction commits.
class TransactionContext {
public:
    TransactionContext(Engine& engine, const Transaction& txn);

    const Transaction& transaction() const { return txn_; }
    const nlohmann::json& params() const { return txn_.params; }
    AgentId owner() const { return txn_.owners.front(); }

    // returns the application object bound to the plugin
    void* use_plugin(PluginId plugin);
    void* use_plugin(PluginId plugin, AgentId acting);

    AgentId create_agent(RoleId role);
    AgentId create_agent(RoleId role, AgentId acting);
    void start_agent(AgentId target);
    void start_agent(AgentId target, AgentId acting);
    void stop_agent(AgentId target);
    void stop_agent(AgentId target, AgentId acting);
    void destroy_agent(AgentId target);
    void destroy_agent(AgentId target, AgentId acting);

    void send_message(AgentId to, nlohmann::json payload);
    void send_message(AgentId to, nlohmann::json payload, AgentId acting);
    // snapshot of the owner's mailbox; consumed messages are removed at commit
    std::vector<Message> read_messages();
    // snapshot without consuming
    std::vector<Message> peek_messages() const;

    void request_halt();
    void request_halt(AgentId acting);

    // simulated action duration (the factory benchmark's timed waits)
    void sleep_for(double seconds);

    [[noreturn]] void abort(const std::string& reason);

    int agent_count(RoleId role) const;
    int max_agent_count(RoleId role) const;

private:
    friend class Engine;

    struct PendingCreate {
        AgentId id;
        RoleId role;
    };

    void require_owner(AgentId acting) const;
    RoleId acting_role(AgentId acting) const;

    Engine& engine_;
    const Transaction& txn_;
    std::vector<Message> outgoing_;
    std::vector<PendingCreate> creates_;
    std::vector<AgentId> starts_;
    std::vector<AgentId> stops_;
    std::vector<AgentId> destroys_;
    std::size_t mailbox_consumed_ = 0;
    bool halt_ = false;
};

class Engine {
public:
    // Binds template callbacks by template name; every template must have
    // a body. Throws std::invalid_argument if the definition is invalid.
    Engine(SystemDefinition definition, std::map<std::string, TemplateCallbacks> bindings,
           EngineOptions options = {});
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    // application object handed out by TransactionContext::use_plugin
    void bind_plugin_object(PluginId plugin, void* object);

    // Seeds the scheduler with the initial transactions and runs the
    // factory/scheduler/executor loop until a halt request drains or the
    // system quiesces. One run per engine instance.
    EngineReport run(const std::vector<TransactionRequest>& initial);

    const SystemDefinition& definition() const { return definition_; }
    LockManager& lock_manager() { return *locks_; }
    LengthEstimator& estimator() { return *estimator_; }

    // thread-safe agent queries
    int agent_count(RoleId role) const;
    int active_agent_count(RoleId role) const;
    std::vector<AgentId> active_agents(RoleId role) const;

private:
    friend class TransactionContext;

    struct Agent {
        AgentId id = -1;
        RoleId role = -1;
        bool active = true;
        std::deque<Message> mailbox;
    };

    struct Worker {
        std::thread thread;
        std::mutex mutex;
        std::condition_variable cv;
        std::deque<Transaction> queue;
    };

    // agent manager -----------------------------------------------------
    AgentId materialize_agent(RoleId role);  // bypasses capacity reservation
    AgentId reserve_agent_slot(RoleId role);  // throws TxnAbortSignal when at max_count
    void cancel_agent_slot(RoleId role);
    void commit_create(AgentId id, RoleId role);
    void apply_active_flag(AgentId id, bool active);
    void apply_destroy(AgentId id);
    void deliver(const Message& message);
    std::size_t mailbox_size(AgentId id) const;
    std::vector<Message> mailbox_snapshot(AgentId id) const;
    void consume_mailbox(AgentId id, std::size_t count);
    bool agent_live(AgentId id) const;
    RoleId role_of(AgentId id) const;  // -1 if unknown
    AgentId pick_active_agent(RoleId role);

    // factory / scheduler / executor -------------------------------------
    Transaction build_transaction(const TransactionRequest& request);
    void dispatch_batch(std::unique_lock<std::mutex>& control_lock, std::vector<Transaction> batch);
    void worker_loop(int index);
    void execute_transaction(Transaction txn);
    void publish_shutdown_aborts(std::unique_lock<std::mutex>& control_lock);
    bool any_idle_worker() const;
    void request_halt_commit();

    SystemDefinition definition_;
    std::map<TemplateId, TemplateCallbacks> callbacks_;
    std::map<PluginId, void*> plugin_objects_;
    std::unique_ptr<LockManager> locks_;
    std::shared_ptr<LengthEstimator> estimator_;
    EngineOptions options_;

    mutable std::mutex agents_mutex_;
    std::map<AgentId, Agent> agents_;
    std::map<RoleId, int> existing_counts_;  // includes uncommitted reservations
    std::map<RoleId, int> peak_counts_;
    std::map<RoleId, std::size_t> round_robin_;
    AgentId next_agent_id_ = 1;
    long long created_agents_ = 0;

    std::mutex control_mutex_;
    std::condition_variable control_cv_;
    std::deque<Transaction> pending_;
    std::deque<TransactionResult> results_;
    std::vector<char> worker_idle_;
    int in_flight_ = 0;
    bool halt_requested_ = false;
    std::atomic<bool> stop_workers_{false};
    bool ran_ = false;
    TxnId next_txn_id_ = 1;
    std::uint64_t batch_counter_ = 0;
    long long committed_ = 0;
    long long aborted_ = 0;
    long long violations_ = 0;

    std::mutex shared_queue_mutex_;
    std::condition_variable shared_queue_cv_;
    std::deque<Transaction> shared_queue_;

    std::vector<std::unique_ptr<Worker>> workers_;
};

// One-shot convenience wrapper over Engine.
EngineReport run_engine(SystemDefinition definition,
                        std::map<std::string, TemplateCallbacks> bindings,
                        const std::vector<TransactionRequest>& initial,
                        EngineOptions options = {});

}  // namespace optima
