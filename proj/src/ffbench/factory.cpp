#include "ffbench/factory.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include "txnsp/rng.hpp"

namespace ffbench {

namespace {

// plugin ids (ascending lock order for the non-shareable ones)
constexpr optima::PluginId kAssemblyQueue = 0;
constexpr optima::PluginId kConveyorBelt = 1;
constexpr optima::PluginId kInspectionQueue = 2;
constexpr optima::PluginId kOutputBin = 3;
constexpr optima::PluginId kDrillPress = 4;
constexpr optima::PluginId kWeldingStation = 5;
constexpr optima::PluginId kQaScanner = 6;

constexpr optima::RoleId kAssemblyWorker = 0;
constexpr optima::RoleId kTransporter = 1;
constexpr optima::RoleId kInspector = 2;
constexpr optima::RoleId kFloorManager = 3;

// application-side plugin state; shareable plugins synchronize themselves
class SharedQueue {
public:
    void push(int item) {
        std::lock_guard<std::mutex> guard(mutex_);
        items_.push_back(item);
    }
    bool pop(int& item) {
        std::lock_guard<std::mutex> guard(mutex_);
        if (items_.empty()) return false;
        item = items_.front();
        items_.pop_front();
        return true;
    }
    std::size_t size() const {
        std::lock_guard<std::mutex> guard(mutex_);
        return items_.size();
    }

private:
    mutable std::mutex mutex_;
    std::deque<int> items_;
};

struct BenchState {
    const BenchConfig* config = nullptr;
    const std::vector<JobDescription>* jobs = nullptr;
    optima::Engine* engine = nullptr;

    SharedQueue assembly_queue;    // job ids with assembly work left
    SharedQueue conveyor;          // assembled parts
    SharedQueue inspection_queue;  // parts waiting for the scanner
    SharedQueue output_bin;        // finished parts
};

double scaled(double seconds, const BenchConfig& config) {
    return seconds / config.simulation_speed;
}

std::set<optima::PluginId> operation_extra_plugins(const JobOperation& op) {
    std::set<optima::PluginId> extras;
    if (op.uses_drill()) extras.insert(kDrillPress);
    if (op.uses_weld()) extras.insert(kWeldingStation);
    return extras;
}

optima::TransactionRequest make_assembly_request(const BenchState& state, int job, int op_index) {
    optima::TransactionRequest request;
    request.template_id = 0;
    request.params = {{"job", job}, {"op", op_index}};
    request.extra_plugins =
        operation_extra_plugins((*state.jobs)[static_cast<std::size_t>(job)]
                                    .operations[static_cast<std::size_t>(op_index)]);
    return request;
}

optima::SystemDefinition build_system(const BenchConfig& config) {
    optima::SystemDefinition def;
    auto plugin = [&](optima::PluginId id, const char* name, bool shareable) {
        optima::PluginDescriptor p;
        p.id = id;
        p.name = name;
        p.shareable = shareable;
        def.plugins.push_back(std::move(p));
    };
    plugin(kAssemblyQueue, "assembly_queue", true);
    plugin(kConveyorBelt, "conveyor_belt", true);
    plugin(kInspectionQueue, "inspection_queue", true);
    plugin(kOutputBin, "output_bin", true);
    plugin(kDrillPress, "drill_press", false);
    plugin(kWeldingStation, "welding_station", false);
    plugin(kQaScanner, "qa_scanner", false);

    optima::RoleDescriptor worker;
    worker.id = kAssemblyWorker;
    worker.name = "assembly_worker";
    worker.plugin_permissions = {kAssemblyQueue, kConveyorBelt, kDrillPress, kWeldingStation};
    worker.initial_count = config.worker_initial;
    worker.max_count = config.worker_max;
    def.roles.push_back(std::move(worker));

    optima::RoleDescriptor transporter;
    transporter.id = kTransporter;
    transporter.name = "transporter";
    transporter.plugin_permissions = {kConveyorBelt, kInspectionQueue};
    transporter.initial_count = config.transporter_initial;
    transporter.max_count = config.transporter_max;
    def.roles.push_back(std::move(transporter));

    optima::RoleDescriptor inspector;
    inspector.id = kInspector;
    inspector.name = "inspector";
    inspector.plugin_permissions = {kInspectionQueue, kOutputBin, kQaScanner};
    inspector.initial_count = config.inspector_initial;
    inspector.max_count = config.inspector_max;
    def.roles.push_back(std::move(inspector));

    optima::RoleDescriptor manager;
    manager.id = kFloorManager;
    manager.name = "floor_manager";
    manager.supervises = {kAssemblyWorker, kTransporter, kInspector};
    manager.plugin_permissions = {kAssemblyQueue, kConveyorBelt, kInspectionQueue, kOutputBin};
    manager.can_halt = true;
    manager.initial_count = 1;
    manager.max_count = 1;
    def.roles.push_back(std::move(manager));

    auto add_template = [&](optima::TemplateId id, const char* name, optima::RoleId owner,
                            std::set<optima::PluginId> required) {
        optima::TransactionTemplate t;
        t.id = id;
        t.name = name;
        t.owner_role = owner;
        t.required_plugins = std::move(required);
        def.templates.push_back(std::move(t));
    };
    add_template(0, "assembly_op", kAssemblyWorker, {kAssemblyQueue, kConveyorBelt});
    add_template(1, "transport", kTransporter, {kConveyorBelt, kInspectionQueue});
    add_template(2, "inspect", kInspector, {kInspectionQueue, kOutputBin, kQaScanner});
    add_template(3, "manager_tick", kFloorManager,
                 {kAssemblyQueue, kConveyorBelt, kInspectionQueue, kOutputBin});

    def.params.optimization = config.optimization;
    def.params.thread_count = config.thread_count;
    def.params.batch_size = config.batch_size;
    def.params.trigger = config.trigger;
    return def;
}

std::map<std::string, optima::TemplateCallbacks> build_bindings(BenchState& state) {
    std::map<std::string, optima::TemplateCallbacks> bindings;
    const BenchConfig& config = *state.config;

    optima::TemplateCallbacks assembly;
    assembly.body = [&state, &config](optima::TransactionContext& ctx) {
        const int job = ctx.params().at("job").get<int>();
        const int op_index = ctx.params().at("op").get<int>();
        const JobDescription& desc = (*state.jobs)[static_cast<std::size_t>(job)];
        const JobOperation& op = desc.operations[static_cast<std::size_t>(op_index)];
        ctx.use_plugin(kAssemblyQueue);
        for (const JobAction& action : op.actions) {
            if (is_drilling(action.kind)) ctx.use_plugin(kDrillPress);
            if (is_welding(action.kind)) ctx.use_plugin(kWeldingStation);
            ctx.sleep_for(scaled(action.duration, config));
        }
        if (op_index + 1 == static_cast<int>(desc.operations.size())) {
            auto* conveyor = static_cast<SharedQueue*>(ctx.use_plugin(kConveyorBelt));
            conveyor->push(job);
        }
    };
    assembly.on_commit = [&state](const optima::Transaction&, const optima::TransactionResult&) {
        int done;
        state.assembly_queue.pop(done);
    };
    assembly.result_mapper = [&state](const optima::TransactionResult& result) {
        const int job = result.params.at("job").get<int>();
        const int op_index = result.params.at("op").get<int>();
        std::vector<optima::TransactionRequest> next;
        if (result.status == optima::TransactionResult::Status::Aborted) {
            next.push_back(make_assembly_request(state, job, op_index));  // retry
            return next;
        }
        const JobDescription& desc = (*state.jobs)[static_cast<std::size_t>(job)];
        if (op_index + 1 < static_cast<int>(desc.operations.size())) {
            next.push_back(make_assembly_request(state, job, op_index + 1));
        } else {
            optima::TransactionRequest transport;
            transport.template_id = 1;
            transport.params = {{"job", job}};
            next.push_back(std::move(transport));
        }
        return next;
    };
    bindings["assembly_op"] = std::move(assembly);

    optima::TemplateCallbacks transport;
    transport.body = [&state, &config](optima::TransactionContext& ctx) {
        const int job = ctx.params().at("job").get<int>();
        auto* conveyor = static_cast<SharedQueue*>(ctx.use_plugin(kConveyorBelt));
        int part;
        conveyor->pop(part);
        ctx.sleep_for(scaled((*state.jobs)[static_cast<std::size_t>(job)].transport_duration, config));
        auto* inspection = static_cast<SharedQueue*>(ctx.use_plugin(kInspectionQueue));
        inspection->push(job);
    };
    transport.result_mapper = [&state](const optima::TransactionResult& result) {
        const int job = result.params.at("job").get<int>();
        std::vector<optima::TransactionRequest> next;
        optima::TransactionRequest request;
        if (result.status == optima::TransactionResult::Status::Aborted) {
            request.template_id = 1;  // retry
        } else {
            request.template_id = 2;
        }
        request.params = {{"job", job}};
        next.push_back(std::move(request));
        return next;
    };
    bindings["transport"] = std::move(transport);

    optima::TemplateCallbacks inspect;
    inspect.body = [&state, &config](optima::TransactionContext& ctx) {
        const int job = ctx.params().at("job").get<int>();
        auto* inspection = static_cast<SharedQueue*>(ctx.use_plugin(kInspectionQueue));
        int part;
        inspection->pop(part);
        ctx.use_plugin(kQaScanner);
        ctx.sleep_for(scaled((*state.jobs)[static_cast<std::size_t>(job)].inspection_duration, config));
        auto* bin = static_cast<SharedQueue*>(ctx.use_plugin(kOutputBin));
        bin->push(job);
        // report to the floor manager
        std::vector<optima::AgentId> managers = state.engine->active_agents(kFloorManager);
        if (!managers.empty())
            ctx.send_message(managers.front(), {{"job", job}, {"status", "passed"}});
    };
    inspect.result_mapper = [&state](const optima::TransactionResult& result) {
        std::vector<optima::TransactionRequest> next;
        if (result.status == optima::TransactionResult::Status::Aborted) {
            optima::TransactionRequest retry;
            retry.template_id = 2;
            retry.params = result.params;
            next.push_back(std::move(retry));
        }
        return next;
    };
    bindings["inspect"] = std::move(inspect);

    optima::TemplateCallbacks manager;
    manager.body = [&state, &config](optima::TransactionContext& ctx) {
        ctx.sleep_for(scaled(config.manager_period, config));
        const std::size_t assembly_backlog =
            static_cast<SharedQueue*>(ctx.use_plugin(kAssemblyQueue))->size();
        const std::size_t conveyor_backlog =
            static_cast<SharedQueue*>(ctx.use_plugin(kConveyorBelt))->size();
        const std::size_t inspection_backlog =
            static_cast<SharedQueue*>(ctx.use_plugin(kInspectionQueue))->size();

        // one create/stop per role per tick, pushing capacity toward the
        // backlogged stations and shedding idle agents back to initial
        struct Adjustment {
            optima::RoleId role;
            std::size_t backlog;
            std::size_t grow_threshold;
            int initial;
        };
        const Adjustment adjustments[] = {
            {kAssemblyWorker, assembly_backlog,
             static_cast<std::size_t>(2 * std::max(1, ctx.agent_count(kAssemblyWorker))),
             config.worker_initial},
            {kTransporter, conveyor_backlog, 3, config.transporter_initial},
            {kInspector, inspection_backlog, 3, config.inspector_initial},
        };
        for (const Adjustment& adj : adjustments) {
            const int count = ctx.agent_count(adj.role);
            if (adj.backlog > adj.grow_threshold && count < ctx.max_agent_count(adj.role)) {
                ctx.create_agent(adj.role);
            } else if (adj.backlog == 0 && count > adj.initial) {
                std::vector<optima::AgentId> agents = state.engine->active_agents(adj.role);
                if (static_cast<int>(agents.size()) > adj.initial) ctx.stop_agent(agents.back());
            }
        }

        if (static_cast<int>(ctx.peek_messages().size()) >= state.config->job_count)
            ctx.request_halt();
    };
    manager.result_mapper = [](const optima::TransactionResult&) {
        std::vector<optima::TransactionRequest> next;
        optima::TransactionRequest tick;
        tick.template_id = 3;
        next.push_back(std::move(tick));
        return next;
    };
    bindings["manager_tick"] = std::move(manager);

    return bindings;
}

ActionKind draw_action(std::mt19937_64& rng, const PropensityWeights& weights) {
    const int total = weights.manual + weights.drilling + weights.welding;
    std::uniform_int_distribution<int> category(0, total - 1);
    int pick = category(rng);
    std::uniform_int_distribution<int> within5(0, 4);
    std::uniform_int_distribution<int> within2(0, 1);
    if (pick < weights.manual)
        return static_cast<ActionKind>(within5(rng));
    if (pick < weights.manual + weights.drilling)
        return within2(rng) == 0 ? ActionKind::Drill1 : ActionKind::Drill2;
    return within2(rng) == 0 ? ActionKind::Weld1 : ActionKind::Weld2;
}

double positive_normal(txnsp::NormalSampler& sampler, double mean, double sigma_fraction) {
    double value;
    do {
        value = sampler(mean, mean * sigma_fraction);
    } while (!(value > 0.0));
    return value;
}

}  // namespace

PropensityWeights propensity(ConflictLevel level) {
    switch (level) {
        case ConflictLevel::VeryLow: return {20, 1, 1};
        case ConflictLevel::Low: return {10, 1, 1};
        case ConflictLevel::Medium: return {5, 1, 1};
        case ConflictLevel::High: return {1, 1, 1};
        case ConflictLevel::VeryHigh: return {1, 2, 2};
    }
    return {1, 1, 1};
}

const char* conflict_level_name(ConflictLevel level) {
    switch (level) {
        case ConflictLevel::VeryLow: return "very_low";
        case ConflictLevel::Low: return "low";
        case ConflictLevel::Medium: return "medium";
        case ConflictLevel::High: return "high";
        case ConflictLevel::VeryHigh: return "very_high";
    }
    return "unknown";
}

bool JobOperation::uses_drill() const {
    return std::any_of(actions.begin(), actions.end(),
                       [](const JobAction& a) { return is_drilling(a.kind); });
}

bool JobOperation::uses_weld() const {
    return std::any_of(actions.begin(), actions.end(),
                       [](const JobAction& a) { return is_welding(a.kind); });
}

void BenchConfig::validate() const {
    if (job_count < 1) throw std::invalid_argument("bench: job_count must be >= 1");
    if (thread_count < 1) throw std::invalid_argument("bench: thread_count must be >= 1");
    if (!(simulation_speed > 0.0)) throw std::invalid_argument("bench: simulation_speed must be positive");
    if (batch_size < 1) throw std::invalid_argument("bench: batch_size must be >= 1");
    if (min_operations < 1 || max_operations < min_operations)
        throw std::invalid_argument("bench: invalid operation count range");
    if (min_actions < 1 || max_actions < min_actions)
        throw std::invalid_argument("bench: invalid action count range");
    if (worker_initial < 1 || transporter_initial < 1 || inspector_initial < 1)
        throw std::invalid_argument("bench: initial agent counts must be >= 1");
    if (worker_initial > worker_max || transporter_initial > transporter_max ||
        inspector_initial > inspector_max)
        throw std::invalid_argument("bench: initial counts exceed maxima");
}

BenchConfig desk_config() {
    BenchConfig config;  // defaults are the desk scale
    return config;
}

BenchConfig paper_config() {
    BenchConfig config;
    config.thread_count = 8;
    config.simulation_speed = 10.0;
    config.job_count = 500;
    config.worker_initial = 100;
    config.transporter_initial = 35;
    config.inspector_initial = 35;
    config.worker_max = 120;
    config.transporter_max = 50;
    config.inspector_max = 50;
    return config;
}

std::vector<JobDescription> generate_jobs(const BenchConfig& config) {
    config.validate();
    std::mt19937_64 rng(txnsp::derive_seed(config.seed, "jobs"));
    txnsp::NormalSampler durations(txnsp::derive_seed(config.seed, "durations"));
    const PropensityWeights weights = propensity(config.conflict_level);

    std::vector<JobDescription> jobs;
    jobs.reserve(static_cast<std::size_t>(config.job_count));
    std::uniform_int_distribution<int> op_count(config.min_operations, config.max_operations);
    std::uniform_int_distribution<int> action_count(config.min_actions, config.max_actions);

    for (int job_id = 0; job_id < config.job_count; ++job_id) {
        JobDescription job;
        job.job_id = job_id;
        const int ops = op_count(rng);
        for (int o = 0; o < ops; ++o) {
            JobOperation op;
            const int actions = action_count(rng);
            for (int a = 0; a < actions; ++a) {
                JobAction action;
                action.kind = draw_action(rng, weights);
                double mean = config.durations.manual;
                if (is_drilling(action.kind)) mean = config.durations.drilling;
                if (is_welding(action.kind)) mean = config.durations.welding;
                action.duration = positive_normal(durations, mean, config.durations.sigma_fraction);
                op.actions.push_back(action);
            }
            job.operations.push_back(std::move(op));
        }
        job.transport_duration =
            positive_normal(durations, config.durations.transport, config.durations.sigma_fraction);
        job.inspection_duration =
            positive_normal(durations, config.durations.inspection, config.durations.sigma_fraction);
        jobs.push_back(std::move(job));
    }
    return jobs;
}

BenchReport run_benchmark(const BenchConfig& config) {
    return run_benchmark(config, generate_jobs(config));
}

BenchReport run_benchmark(const BenchConfig& config, const std::vector<JobDescription>& jobs) {
    config.validate();
    if (static_cast<int>(jobs.size()) != config.job_count)
        throw std::invalid_argument("bench: job set does not match config.job_count");

    BenchState state;
    state.config = &config;
    state.jobs = &jobs;

    optima::EngineOptions options;
    options.scheduling_sa = config.scheduling_sa;
    options.rng_seed = txnsp::derive_seed(config.seed, "engine");

    optima::Engine engine(build_system(config), build_bindings(state), options);
    state.engine = &engine;
    engine.bind_plugin_object(kAssemblyQueue, &state.assembly_queue);
    engine.bind_plugin_object(kConveyorBelt, &state.conveyor);
    engine.bind_plugin_object(kInspectionQueue, &state.inspection_queue);
    engine.bind_plugin_object(kOutputBin, &state.output_bin);

    std::vector<optima::TransactionRequest> initial;
    for (const JobDescription& job : jobs) {
        for (std::size_t o = 0; o < job.operations.size(); ++o) state.assembly_queue.push(job.job_id);
        initial.push_back(make_assembly_request(state, job.job_id, 0));
    }
    optima::TransactionRequest tick;
    tick.template_id = 3;
    initial.push_back(std::move(tick));

    BenchReport report;
    report.engine = engine.run(initial);
    report.jobs_generated = config.job_count;
    report.jobs_completed = static_cast<int>(state.output_bin.size());
    if (report.engine.wall_seconds > 0.0)
        report.throughput = static_cast<double>(report.jobs_completed) / report.engine.wall_seconds;
    report.lock_audit = optima::audit_lock_events(engine.lock_manager().snapshot_event_log());
    return report;
}

std::string write_bench_report_json(const BenchConfig& config, const BenchReport& report) {
    nlohmann::json j;
    j["threads"] = config.thread_count;
    j["speed"] = config.simulation_speed;
    j["conflict_level"] = conflict_level_name(config.conflict_level);
    j["optimization"] = config.optimization;
    j["batch_size"] = config.batch_size;
    j["trigger"] = config.trigger;
    j["jobs_generated"] = report.jobs_generated;
    j["jobs_completed"] = report.jobs_completed;
    j["throughput_jobs_per_sec"] = report.throughput;
    j["engine"] = nlohmann::json::parse(optima::write_report_json(report.engine));
    j["lock_order_violations"] = report.lock_audit.order_violations;
    j["lock_pairing_violations"] = report.lock_audit.pairing_violations;
    return j.dump(2) + "\n";
}

ComparisonResult compare_optimized(const BenchConfig& config, const ComparisonOptions& options) {
    if (options.repetitions < 1) throw std::invalid_argument("compare: repetitions must be >= 1");
    if (options.batch_sizes.empty()) throw std::invalid_argument("compare: need at least one batch size");
    if (options.triggers.empty()) throw std::invalid_argument("compare: need at least one trigger option");

    ComparisonResult result;
    result.config = config;

    std::vector<std::vector<JobDescription>> job_sets;
    for (int rep = 0; rep < options.repetitions; ++rep) {
        BenchConfig set_config = config;
        set_config.seed = txnsp::derive_seed(config.seed, "jobset", static_cast<std::uint64_t>(rep));
        job_sets.push_back(generate_jobs(set_config));
    }

    for (int rep = 0; rep < options.repetitions; ++rep) {
        BenchConfig base = config;
        base.optimization = false;
        base.seed = txnsp::derive_seed(config.seed, "jobset", static_cast<std::uint64_t>(rep));
        BenchReport report = run_benchmark(base, job_sets[static_cast<std::size_t>(rep)]);
        result.base_throughputs.push_back(report.throughput);
        result.base_mean_throughput += report.throughput;
    }
    result.base_mean_throughput /= static_cast<double>(options.repetitions);

    for (int batch_size : options.batch_sizes) {
        for (bool trigger : options.triggers) {
            ComboStats stats;
            stats.batch_size = batch_size;
            stats.trigger = trigger;
            for (int rep = 0; rep < options.repetitions; ++rep) {
                BenchConfig opt = config;
                opt.optimization = true;
                opt.batch_size = batch_size;
                opt.trigger = trigger;
                opt.seed = txnsp::derive_seed(config.seed, "jobset", static_cast<std::uint64_t>(rep));
                BenchReport report = run_benchmark(opt, job_sets[static_cast<std::size_t>(rep)]);
                stats.mean_throughput += report.throughput;
                double base = result.base_throughputs[static_cast<std::size_t>(rep)];
                stats.improvements_pct.push_back(base > 0.0 ? (report.throughput - base) / base * 100.0
                                                            : 0.0);
            }
            stats.mean_throughput /= static_cast<double>(options.repetitions);
            stats.min_improvement_pct =
                *std::min_element(stats.improvements_pct.begin(), stats.improvements_pct.end());
            stats.max_improvement_pct =
                *std::max_element(stats.improvements_pct.begin(), stats.improvements_pct.end());
            for (double imp : stats.improvements_pct) stats.mean_improvement_pct += imp;
            stats.mean_improvement_pct /= static_cast<double>(stats.improvements_pct.size());
            result.combos.push_back(std::move(stats));
        }
    }

    for (std::size_t i = 1; i < result.combos.size(); ++i)
        if (result.combos[i].mean_throughput > result.combos[result.best_combo].mean_throughput)
            result.best_combo = i;
    return result;
}

std::string write_comparison_csv(const std::vector<ComparisonResult>& rows) {
    std::ostringstream out;
    out << "threads,speed,conflict_level,base_throughput,best_batch_size,best_trigger,"
           "opt_throughput,min_improvement_pct,max_improvement_pct,mean_improvement_pct\n";
    char buf[64];
    auto field = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    for (const ComparisonResult& row : rows) {
        const ComboStats& best = row.combos[row.best_combo];
        out << row.config.thread_count << ',' << field(row.config.simulation_speed) << ','
            << conflict_level_name(row.config.conflict_level) << ','
            << field(row.base_mean_throughput) << ',' << best.batch_size << ','
            << (best.trigger ? "true" : "false") << ',' << field(best.mean_throughput) << ','
            << field(best.min_improvement_pct) << ',' << field(best.max_improvement_pct) << ','
            << field(best.mean_improvement_pct) << '\n';
    }
    return out.str();
}

std::string write_comparison_json(const ComparisonResult& result) {
    nlohmann::json j;
    j["threads"] = result.config.thread_count;
    j["speed"] = result.config.simulation_speed;
    j["conflict_level"] = conflict_level_name(result.config.conflict_level);
    j["base_mean_throughput"] = result.base_mean_throughput;
    j["base_throughputs"] = result.base_throughputs;
    j["combos"] = nlohmann::json::array();
    for (std::size_t i = 0; i < result.combos.size(); ++i) {
        const ComboStats& combo = result.combos[i];
        j["combos"].push_back({{"batch_size", combo.batch_size},
                               {"trigger", combo.trigger},
                               {"mean_throughput", combo.mean_throughput},
                               {"min_improvement_pct", combo.min_improvement_pct},
                               {"max_improvement_pct", combo.max_improvement_pct},
                               {"mean_improvement_pct", combo.mean_improvement_pct},
                               {"improvements_pct", combo.improvements_pct},
                               {"best", i == result.best_combo}});
    }
    return j.dump(2) + "\n";
}

}  // namespace ffbench
