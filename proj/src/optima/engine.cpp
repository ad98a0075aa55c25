#include "optima/engine.hpp"

#include <algorithm>
#include <stdexcept>

#include "txnsp/rng.hpp"

namespace optima {

namespace {
using Clock = std::chrono::steady_clock;
}

std::string write_report_json(const EngineReport& report) {
    nlohmann::json j;
    j["committed"] = report.committed;
    j["aborted"] = report.aborted;
    j["violations"] = report.violations;
    j["created_agents"] = report.created_agents;
    j["watchdog_flags"] = report.watchdog_flags;
    j["wall_seconds"] = report.wall_seconds;
    j["throughput"] = report.throughput;
    nlohmann::json peaks = nlohmann::json::object();
    for (const auto& [role, count] : report.peak_agent_counts)
        peaks[std::to_string(role)] = count;
    j["peak_agent_counts"] = peaks;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------
// TransactionContext
// ---------------------------------------------------------------------

TransactionContext::TransactionContext(Engine& engine, const Transaction& txn)
    : engine_(engine), txn_(txn) {}

void TransactionContext::require_owner(AgentId acting) const {
    for (AgentId owner : txn_.owners)
        if (owner == acting) return;
    throw TxnAbortSignal{"acting agent does not own this transaction", true};
}

RoleId TransactionContext::acting_role(AgentId acting) const {
    RoleId role = engine_.role_of(acting);
    if (role < 0) throw TxnAbortSignal{"acting agent no longer exists", true};
    return role;
}

void* TransactionContext::use_plugin(PluginId plugin) { return use_plugin(plugin, owner()); }

void* TransactionContext::use_plugin(PluginId plugin, AgentId acting) {
    require_owner(acting);
    const PluginDescriptor& descriptor = engine_.definition().plugin(plugin);
    if (!plugin_access_allowed(engine_.definition(), acting_role(acting), plugin))
        throw TxnAbortSignal{"plugin access denied: " + descriptor.name, true};
    if (!descriptor.shareable &&
        !std::binary_search(txn_.nonshareable_locks.begin(), txn_.nonshareable_locks.end(), plugin))
        throw TxnAbortSignal{"non-shareable plugin used without a declared lock: " + descriptor.name,
                             true};
    auto it = engine_.plugin_objects_.find(plugin);
    return it == engine_.plugin_objects_.end() ? nullptr : it->second;
}

AgentId TransactionContext::create_agent(RoleId role) { return create_agent(role, owner()); }

AgentId TransactionContext::create_agent(RoleId role, AgentId acting) {
    require_owner(acting);
    if (!manipulation_allowed(engine_.definition(), acting_role(acting), AgentVerb::Create, role, false))
        throw TxnAbortSignal{"agent creation not permitted", true};
    AgentId id = engine_.reserve_agent_slot(role);  // throws at max_count
    creates_.push_back(PendingCreate{id, role});
    return id;
}

void TransactionContext::start_agent(AgentId target) { start_agent(target, owner()); }

void TransactionContext::start_agent(AgentId target, AgentId acting) {
    require_owner(acting);
    RoleId target_role = engine_.role_of(target);
    if (target_role < 0) throw TxnAbortSignal{"start target does not exist", true};
    if (!manipulation_allowed(engine_.definition(), acting_role(acting), AgentVerb::Start, target_role,
                              acting == target))
        throw TxnAbortSignal{"agent start not permitted", true};
    starts_.push_back(target);
}

void TransactionContext::stop_agent(AgentId target) { stop_agent(target, owner()); }

void TransactionContext::stop_agent(AgentId target, AgentId acting) {
    require_owner(acting);
    RoleId target_role = engine_.role_of(target);
    if (target_role < 0) throw TxnAbortSignal{"stop target does not exist", true};
    if (!manipulation_allowed(engine_.definition(), acting_role(acting), AgentVerb::Stop, target_role,
                              acting == target))
        throw TxnAbortSignal{"agent stop not permitted", true};
    stops_.push_back(target);
}

void TransactionContext::destroy_agent(AgentId target) { destroy_agent(target, owner()); }

void TransactionContext::destroy_agent(AgentId target, AgentId acting) {
    require_owner(acting);
    RoleId target_role = engine_.role_of(target);
    if (target_role < 0) throw TxnAbortSignal{"destroy target does not exist", true};
    if (!manipulation_allowed(engine_.definition(), acting_role(acting), AgentVerb::Destroy,
                              target_role, acting == target))
        throw TxnAbortSignal{"agent destruction not permitted", true};
    destroys_.push_back(target);
}

void TransactionContext::send_message(AgentId to, nlohmann::json payload) {
    send_message(to, std::move(payload), owner());
}

void TransactionContext::send_message(AgentId to, nlohmann::json payload, AgentId acting) {
    require_owner(acting);
    RoleId receiver_role = engine_.role_of(to);
    if (receiver_role < 0) throw TxnAbortSignal{"message receiver does not exist", true};
    if (!communication_allowed(engine_.definition(), acting_role(acting), receiver_role))
        throw TxnAbortSignal{"communication not permitted", true};
    outgoing_.push_back(Message{acting, to, std::move(payload)});
}

std::vector<Message> TransactionContext::read_messages() {
    std::vector<Message> snapshot = engine_.mailbox_snapshot(owner());
    mailbox_consumed_ = std::max(mailbox_consumed_, snapshot.size());
    return snapshot;
}

std::vector<Message> TransactionContext::peek_messages() const {
    return engine_.mailbox_snapshot(owner());
}

void TransactionContext::request_halt() { request_halt(owner()); }

void TransactionContext::request_halt(AgentId acting) {
    require_owner(acting);
    if (!engine_.definition().role(acting_role(acting)).can_halt)
        throw TxnAbortSignal{"halting permission denied", true};
    halt_ = true;
}

void TransactionContext::sleep_for(double seconds) {
    if (seconds > 0.0)
        std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

void TransactionContext::abort(const std::string& reason) { throw TxnAbortSignal{reason, false}; }

int TransactionContext::agent_count(RoleId role) const { return engine_.agent_count(role); }

int TransactionContext::max_agent_count(RoleId role) const {
    return engine_.definition().role(role).max_count;
}

// ---------------------------------------------------------------------
// Engine: agent manager
// ---------------------------------------------------------------------

AgentId Engine::materialize_agent(RoleId role) {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    AgentId id = next_agent_id_++;
    agents_.emplace(id, Agent{id, role, true, {}});
    int& count = existing_counts_[role];
    ++count;
    peak_counts_[role] = std::max(peak_counts_[role], count);
    ++created_agents_;
    return id;
}

AgentId Engine::reserve_agent_slot(RoleId role) {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    int& count = existing_counts_[role];
    if (count >= definition_.role(role).max_count)
        throw TxnAbortSignal{"role at maximum agent count", true};
    ++count;
    peak_counts_[role] = std::max(peak_counts_[role], count);
    return next_agent_id_++;
}

void Engine::cancel_agent_slot(RoleId role) {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    --existing_counts_[role];
}

void Engine::commit_create(AgentId id, RoleId role) {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    agents_.emplace(id, Agent{id, role, true, {}});
    ++created_agents_;
}

void Engine::apply_active_flag(AgentId id, bool active) {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    auto it = agents_.find(id);
    if (it != agents_.end()) it->second.active = active;
}

void Engine::apply_destroy(AgentId id) {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    auto it = agents_.find(id);
    if (it == agents_.end()) return;
    --existing_counts_[it->second.role];
    agents_.erase(it);
}

void Engine::deliver(const Message& message) {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    auto it = agents_.find(message.to);
    if (it != agents_.end()) it->second.mailbox.push_back(message);
}

std::size_t Engine::mailbox_size(AgentId id) const {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    auto it = agents_.find(id);
    return it == agents_.end() ? 0 : it->second.mailbox.size();
}

std::vector<Message> Engine::mailbox_snapshot(AgentId id) const {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    auto it = agents_.find(id);
    if (it == agents_.end()) return {};
    return {it->second.mailbox.begin(), it->second.mailbox.end()};
}

void Engine::consume_mailbox(AgentId id, std::size_t count) {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    auto it = agents_.find(id);
    if (it == agents_.end()) return;
    std::size_t take = std::min(count, it->second.mailbox.size());
    it->second.mailbox.erase(it->second.mailbox.begin(),
                             it->second.mailbox.begin() + static_cast<std::ptrdiff_t>(take));
}

bool Engine::agent_live(AgentId id) const {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    auto it = agents_.find(id);
    return it != agents_.end() && it->second.active;
}

RoleId Engine::role_of(AgentId id) const {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    auto it = agents_.find(id);
    return it == agents_.end() ? -1 : it->second.role;
}

AgentId Engine::pick_active_agent(RoleId role) {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    std::vector<AgentId> live;
    for (const auto& [id, agent] : agents_)
        if (agent.role == role && agent.active) live.push_back(id);
    if (live.empty()) return -1;
    std::size_t& cursor = round_robin_[role];
    return live[cursor++ % live.size()];
}

int Engine::agent_count(RoleId role) const {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    auto it = existing_counts_.find(role);
    return it == existing_counts_.end() ? 0 : it->second;
}

int Engine::active_agent_count(RoleId role) const {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    int count = 0;
    for (const auto& [id, agent] : agents_)
        if (agent.role == role && agent.active) ++count;
    return count;
}

std::vector<AgentId> Engine::active_agents(RoleId role) const {
    std::lock_guard<std::mutex> guard(agents_mutex_);
    std::vector<AgentId> live;
    for (const auto& [id, agent] : agents_)
        if (agent.role == role && agent.active) live.push_back(id);
    return live;
}

// ---------------------------------------------------------------------
// Engine: lifecycle
// ---------------------------------------------------------------------

Engine::Engine(SystemDefinition definition, std::map<std::string, TemplateCallbacks> bindings,
               EngineOptions options)
    : definition_(std::move(definition)), options_(std::move(options)) {
    definition_.validate_and_index();

    for (const TransactionTemplate& tmpl : definition_.templates) {
        auto it = bindings.find(tmpl.name);
        if (it == bindings.end() || !it->second.body)
            throw std::invalid_argument("engine: template '" + tmpl.name + "' has no bound body");
        callbacks_[tmpl.id] = it->second;
    }

    std::vector<PluginId> lockable;
    for (const PluginDescriptor& plugin : definition_.plugins)
        if (!plugin.shareable) lockable.push_back(plugin.id);
    locks_ = std::make_unique<LockManager>(std::move(lockable));
    locks_->set_watchdog_threshold(options_.watchdog_threshold);

    estimator_ = options_.estimator ? options_.estimator : std::make_shared<MeanEstimator>(1.0);

    for (const RoleDescriptor& role : definition_.roles)
        for (int i = 0; i < role.initial_count; ++i) materialize_agent(role.id);
}

Engine::~Engine() {
    stop_workers_ = true;
    for (auto& worker : workers_) {
        if (!worker) continue;
        {
            std::lock_guard<std::mutex> guard(worker->mutex);
        }
        worker->cv.notify_all();
    }
    shared_queue_cv_.notify_all();
    for (auto& worker : workers_)
        if (worker && worker->thread.joinable()) worker->thread.join();
}

void Engine::bind_plugin_object(PluginId plugin, void* object) {
    definition_.plugin(plugin);  // existence check
    plugin_objects_[plugin] = object;
}

Transaction Engine::build_transaction(const TransactionRequest& request) {
    const TransactionTemplate& tmpl = definition_.transaction_template(request.template_id);
    Transaction txn;
    txn.txn_id = next_txn_id_++;
    txn.template_id = tmpl.id;
    txn.params = request.params;
    if (request.owners.empty())
        txn.owners.push_back(pick_active_agent(tmpl.owner_role));
    else
        txn.owners = request.owners;
    txn.declared_plugins = tmpl.required_plugins;
    txn.declared_plugins.insert(request.extra_plugins.begin(), request.extra_plugins.end());
    for (PluginId plugin : txn.declared_plugins)
        if (!definition_.plugin(plugin).shareable) txn.nonshareable_locks.push_back(plugin);
    std::sort(txn.nonshareable_locks.begin(), txn.nonshareable_locks.end());
    return txn;
}

void Engine::request_halt_commit() {
    {
        std::lock_guard<std::mutex> guard(control_mutex_);
        halt_requested_ = true;
    }
    control_cv_.notify_all();
}

bool Engine::any_idle_worker() const {
    for (char idle : worker_idle_)
        if (idle) return true;
    return false;
}

// ---------------------------------------------------------------------
// Engine: executor
// ---------------------------------------------------------------------

void Engine::execute_transaction(Transaction txn) {
    TransactionResult result;
    result.txn_id = txn.txn_id;
    result.template_id = txn.template_id;
    result.params = txn.params;

    bool owners_ok = !txn.owners.empty();
    for (AgentId owner : txn.owners)
        owners_ok = owners_ok && owner >= 0 && agent_live(owner);

    const TemplateCallbacks& callbacks = callbacks_.at(txn.template_id);
    bool committed = false;
    bool violation = false;

    if (!owners_ok) {
        result.status = TransactionResult::Status::Aborted;
        result.abort_reason = "transaction has no live owner agent";
        locks_->note_outcome(txn.txn_id, false);
        if (callbacks.on_abort) callbacks.on_abort(txn, result);
    } else {
        locks_->acquire_all(txn.txn_id, txn.nonshareable_locks);
        locks_->note_body_start(txn.txn_id);
        TransactionContext ctx(*this, txn);
        auto body_started = Clock::now();
        std::string reason;
        try {
            callbacks.body(ctx);
            committed = true;
        } catch (TxnAbortSignal& signal) {
            reason = signal.reason;
            violation = signal.violation;
        } catch (const std::exception& error) {
            reason = error.what();
        }
        result.observed_length = std::chrono::duration<double>(Clock::now() - body_started).count();

        if (committed) {
            // effects buffered by the context become visible only now
            for (const TransactionContext::PendingCreate& create : ctx.creates_)
                commit_create(create.id, create.role);
            for (AgentId id : ctx.starts_) apply_active_flag(id, true);
            for (AgentId id : ctx.stops_) apply_active_flag(id, false);
            for (AgentId id : ctx.destroys_) apply_destroy(id);
            for (const Message& message : ctx.outgoing_) deliver(message);
            consume_mailbox(txn.owners.front(), ctx.mailbox_consumed_);
            result.status = TransactionResult::Status::Committed;
            if (callbacks.on_commit) callbacks.on_commit(txn, result);
            if (ctx.halt_) request_halt_commit();
        } else {
            for (const TransactionContext::PendingCreate& create : ctx.creates_)
                cancel_agent_slot(create.role);
            result.status = TransactionResult::Status::Aborted;
            result.abort_reason = reason;
            if (callbacks.on_abort) callbacks.on_abort(txn, result);
        }
        locks_->note_outcome(txn.txn_id, committed);
        locks_->release_all(txn.txn_id, txn.nonshareable_locks);
    }

    {
        std::lock_guard<std::mutex> guard(control_mutex_);
        if (committed)
            ++committed_;
        else
            ++aborted_;
        if (violation) ++violations_;
        results_.push_back(std::move(result));
    }
    control_cv_.notify_all();
}

void Engine::worker_loop(int index) {
    const bool optimized = definition_.params.optimization;
    Worker& self = *workers_[static_cast<std::size_t>(index)];
    while (true) {
        Transaction txn;
        if (optimized) {
            std::unique_lock<std::mutex> queue_lock(self.mutex);
            if (self.queue.empty()) {
                if (stop_workers_) break;
                queue_lock.unlock();
                {
                    std::lock_guard<std::mutex> guard(control_mutex_);
                    worker_idle_[static_cast<std::size_t>(index)] = 1;
                }
                control_cv_.notify_all();
                queue_lock.lock();
                self.cv.wait(queue_lock, [&] { return !self.queue.empty() || stop_workers_; });
                if (self.queue.empty()) break;
            }
            txn = std::move(self.queue.front());
            self.queue.pop_front();
        } else {
            std::unique_lock<std::mutex> queue_lock(shared_queue_mutex_);
            if (shared_queue_.empty()) {
                if (stop_workers_) break;
                queue_lock.unlock();
                {
                    std::lock_guard<std::mutex> guard(control_mutex_);
                    worker_idle_[static_cast<std::size_t>(index)] = 1;
                }
                control_cv_.notify_all();
                queue_lock.lock();
                shared_queue_cv_.wait(queue_lock, [&] { return !shared_queue_.empty() || stop_workers_; });
                if (shared_queue_.empty()) break;
            }
            txn = std::move(shared_queue_.front());
            shared_queue_.pop_front();
        }
        {
            std::lock_guard<std::mutex> guard(control_mutex_);
            worker_idle_[static_cast<std::size_t>(index)] = 0;
        }
        execute_transaction(std::move(txn));
    }
}

// ---------------------------------------------------------------------
// Engine: factory + scheduler control loop
// ---------------------------------------------------------------------

void Engine::dispatch_batch(std::unique_lock<std::mutex>& control_lock,
                            std::vector<Transaction> batch) {
    for (Transaction& txn : batch)
        txn.estimated_length = estimator_->estimate(txn.template_id);
    txnsp::SaParams sa = options_.scheduling_sa;
    sa.rng_seed = txnsp::derive_seed(options_.rng_seed, "batch", batch_counter_++);

    control_lock.unlock();
    BatchSchedule schedule = schedule_batch(std::move(batch), definition_.params, sa);
    control_lock.lock();

    for (std::size_t k = 0; k < schedule.queues.size(); ++k) {
        auto& assigned = schedule.queues[k];
        if (assigned.empty()) continue;
        in_flight_ += static_cast<int>(assigned.size());
        Worker& worker = *workers_[k];
        {
            std::lock_guard<std::mutex> queue_lock(worker.mutex);
            for (Transaction& txn : assigned) worker.queue.push_back(std::move(txn));
        }
        worker_idle_[k] = 0;
        worker.cv.notify_one();
    }
}

void Engine::publish_shutdown_aborts(std::unique_lock<std::mutex>& control_lock) {
    std::deque<Transaction> drained;
    drained.swap(pending_);
    aborted_ += static_cast<long long>(drained.size());
    control_lock.unlock();
    for (Transaction& txn : drained) {
        TransactionResult result;
        result.txn_id = txn.txn_id;
        result.template_id = txn.template_id;
        result.params = txn.params;
        result.status = TransactionResult::Status::Aborted;
        result.abort_reason = "engine shutdown";
        const TemplateCallbacks& callbacks = callbacks_.at(txn.template_id);
        if (callbacks.on_abort) callbacks.on_abort(txn, result);
    }
    control_lock.lock();
}

EngineReport Engine::run(const std::vector<TransactionRequest>& initial) {
    std::unique_lock<std::mutex> control_lock(control_mutex_);
    if (ran_) throw std::logic_error("engine: run() can only be called once");
    ran_ = true;
    for (const TransactionRequest& request : initial)
        pending_.push_back(build_transaction(request));

    const int thread_count = definition_.params.thread_count;
    worker_idle_.assign(static_cast<std::size_t>(thread_count), 0);
    control_lock.unlock();

    const auto started = Clock::now();
    workers_.clear();
    for (int i = 0; i < thread_count; ++i) workers_.push_back(std::make_unique<Worker>());
    for (int i = 0; i < thread_count; ++i)
        workers_[static_cast<std::size_t>(i)]->thread = std::thread(&Engine::worker_loop, this, i);

    control_lock.lock();
    while (true) {
        while (!results_.empty()) {
            TransactionResult result = std::move(results_.front());
            results_.pop_front();
            --in_flight_;
            estimator_->observe(result.template_id, result.observed_length);
            const TemplateCallbacks& callbacks = callbacks_.at(result.template_id);
            if (!halt_requested_ && callbacks.result_mapper) {
                control_lock.unlock();
                std::vector<TransactionRequest> successors = callbacks.result_mapper(result);
                control_lock.lock();
                if (!halt_requested_)
                    for (const TransactionRequest& request : successors)
                        pending_.push_back(build_transaction(request));
            }
        }

        if (halt_requested_ && !pending_.empty()) {
            publish_shutdown_aborts(control_lock);
            continue;  // hooks ran unlocked; results may have arrived
        }

        if (!pending_.empty() && !halt_requested_) {
            if (!definition_.params.optimization) {
                std::deque<Transaction> ready;
                ready.swap(pending_);
                in_flight_ += static_cast<int>(ready.size());
                {
                    std::lock_guard<std::mutex> queue_lock(shared_queue_mutex_);
                    for (Transaction& txn : ready) shared_queue_.push_back(std::move(txn));
                }
                shared_queue_cv_.notify_all();
                continue;
            }
            const int batch_size = definition_.params.batch_size;
            if (static_cast<int>(pending_.size()) >= batch_size) {
                std::vector<Transaction> batch;
                batch.reserve(static_cast<std::size_t>(batch_size));
                for (int i = 0; i < batch_size; ++i) {
                    batch.push_back(std::move(pending_.front()));
                    pending_.pop_front();
                }
                dispatch_batch(control_lock, std::move(batch));
                continue;
            }
            const bool flush = in_flight_ == 0 && results_.empty();
            const bool trigger_fire = definition_.params.trigger && any_idle_worker();
            if (flush || trigger_fire) {
                std::vector<Transaction> batch(std::make_move_iterator(pending_.begin()),
                                               std::make_move_iterator(pending_.end()));
                pending_.clear();
                dispatch_batch(control_lock, std::move(batch));
                continue;
            }
        }

        if (in_flight_ == 0 && pending_.empty() && results_.empty()) break;
        control_cv_.wait(control_lock);
    }

    stop_workers_ = true;
    control_lock.unlock();
    for (auto& worker : workers_) {
        {
            std::lock_guard<std::mutex> queue_lock(worker->mutex);
        }
        worker->cv.notify_all();
    }
    {
        std::lock_guard<std::mutex> queue_lock(shared_queue_mutex_);
    }
    shared_queue_cv_.notify_all();
    for (auto& worker : workers_)
        if (worker->thread.joinable()) worker->thread.join();

    EngineReport report;
    control_lock.lock();
    report.committed = committed_;
    report.aborted = aborted_;
    report.violations = violations_ + locks_->safety_violations();
    report.watchdog_flags = locks_->watchdog_flags();
    control_lock.unlock();
    {
        std::lock_guard<std::mutex> guard(agents_mutex_);
        report.created_agents = created_agents_;
        report.peak_agent_counts = peak_counts_;
    }
    report.wall_seconds = std::chrono::duration<double>(Clock::now() - started).count();
    if (report.wall_seconds > 0.0)
        report.throughput = static_cast<double>(report.committed) / report.wall_seconds;
    return report;
}

EngineReport run_engine(SystemDefinition definition,
                        std::map<std::string, TemplateCallbacks> bindings,
                        const std::vector<TransactionRequest>& initial, EngineOptions options) {
    Engine engine(std::move(definition), std::move(bindings), std::move(options));
    return engine.run(initial);
}

}  // namespace optima
