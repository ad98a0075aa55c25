#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "optima/system.hpp"

namespace optima {

using TxnId = std::uint64_t;

struct Message {
    AgentId from = -1;
    AgentId to = -1;
    nlohmann::json payload;
};

// Executable unit built from a template plus per-instance parameters.
// nonshareable_locks is the ascending lock-acquisition list derived from
// the declared plugin set.
struct Transaction {
    TxnId txn_id = 0;
    TemplateId template_id = -1;
    std::vector<AgentId> owners;
    nlohmann::json params;
    double estimated_length = 1.0;
    std::set<PluginId> declared_plugins;        // template set plus request extras
    std::vector<PluginId> nonshareable_locks;   // strictly ascending
};

struct TransactionResult {
    enum class Status { Committed, Aborted };

    TxnId txn_id = 0;
    TemplateId template_id = -1;
    Status status = Status::Committed;
    nlohmann::json params;
    double observed_length = 0.0;
    std::string abort_reason;
};

// What a result mapper (or the caller seeding the engine) asks for.
// extra_plugins widens the template's declared plugin set for this one
// transaction; assembly steps use it to lock only the stations their
// actions actually touch.
struct TransactionRequest {
    TemplateId template_id = -1;
    std::vector<AgentId> owners;  // empty: engine assigns a live agent of the owner role
    nlohmann::json params;
    std::set<PluginId> extra_plugins;
};

class TransactionContext;

struct TemplateCallbacks {
    std::function<void(TransactionContext&)> body;
    std::function<void(const Transaction&, const TransactionResult&)> on_commit;
    std::function<void(const Transaction&, const TransactionResult&)> on_abort;
    std::function<std::vector<TransactionRequest>(const TransactionResult&)> result_mapper;
};

}  // namespace optima
