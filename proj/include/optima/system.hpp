#pragma once

#include <set>
#include <string>
#include <vector>

#include "optima/lock_manager.hpp"

namespace optima {

using RoleId = int;
using TemplateId = int;
using AgentId = long long;

struct PluginDescriptor {
    PluginId id = -1;
    std::string name;
    bool shareable = false;
    // filled during validation from the roles' plugin permissions
    std::set<RoleId> authorized_roles;
};

struct RoleDescriptor {
    RoleId id = -1;
    std::string name;
    std::set<RoleId> supervises;
    std::set<PluginId> plugin_permissions;
    std::set<RoleId> comm_permissions;  // explicit pair grants
    bool can_halt = false;
    int initial_count = 0;
    int max_count = 0;
};

// Static template data; executable callbacks are bound by name when the
// engine is constructed.
struct TransactionTemplate {
    TemplateId id = -1;
    std::string name;
    RoleId owner_role = -1;
    std::set<PluginId> required_plugins;
};

struct EngineParams {
    bool optimization = true;
    int thread_count = 1;
    int batch_size = 1;
    bool trigger = false;

    void validate() const;
};

struct SystemDefinition {
    std::vector<PluginDescriptor> plugins;
    std::vector<RoleDescriptor> roles;
    std::vector<TransactionTemplate> templates;
    EngineParams params;

    // Checks id uniqueness, reference closure, count bounds, and that at
    // least one role can halt; derives plugin.authorized_roles. Throws
    // std::invalid_argument on the first failure.
    void validate_and_index();

    const PluginDescriptor& plugin(PluginId id) const;
    const RoleDescriptor& role(RoleId id) const;
    const TransactionTemplate& transaction_template(TemplateId id) const;
    const TransactionTemplate* find_template(const std::string& name) const;
};

// JSON system files: {"plugins":[…],"roles":[…],"templates":[…],"params":{…}}
SystemDefinition parse_system_json(const std::string& text);
std::string write_system_json(const SystemDefinition& def);

enum class AgentVerb { Start, Stop, Create, Destroy };

// Consistency-constraint predicates. The engine layers capacity checks
// and abort plumbing on top of these.
bool plugin_access_allowed(const SystemDefinition& def, RoleId actor_role, PluginId plugin);
bool manipulation_allowed(const SystemDefinition& def, RoleId actor_role, AgentVerb verb,
                          RoleId target_role, bool actor_is_target);
bool communication_allowed(const SystemDefinition& def, RoleId sender_role, RoleId receiver_role);

}  // namespace optima
