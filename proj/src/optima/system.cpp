#include "optima/system.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

namespace optima {

void EngineParams::validate() const {
    if (thread_count < 1) throw std::invalid_argument("engine params: thread_count must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("engine params: batch_size must be >= 1");
}

void SystemDefinition::validate_and_index() {
    params.validate();

    std::set<PluginId> plugin_ids;
    for (const PluginDescriptor& p : plugins) {
        if (p.id < 0) throw std::invalid_argument("system: plugin ids must be non-negative");
        if (!plugin_ids.insert(p.id).second)
            throw std::invalid_argument("system: duplicate plugin id " + std::to_string(p.id));
    }

    std::set<RoleId> role_ids;
    bool any_halter = false;
    for (const RoleDescriptor& r : roles) {
        if (!role_ids.insert(r.id).second)
            throw std::invalid_argument("system: duplicate role id " + std::to_string(r.id));
        if (r.initial_count < 0 || r.max_count < 0 || r.initial_count > r.max_count)
            throw std::invalid_argument("system: role " + r.name + " has invalid agent counts");
        any_halter = any_halter || r.can_halt;
    }
    if (!any_halter)
        throw std::invalid_argument("system: at least one role must hold halting permission");

    for (const RoleDescriptor& r : roles) {
        for (RoleId sub : r.supervises)
            if (!role_ids.count(sub))
                throw std::invalid_argument("system: role " + r.name + " supervises unknown role");
        for (RoleId peer : r.comm_permissions)
            if (!role_ids.count(peer))
                throw std::invalid_argument("system: role " + r.name + " grants comm to unknown role");
        for (PluginId plugin : r.plugin_permissions)
            if (!plugin_ids.count(plugin))
                throw std::invalid_argument("system: role " + r.name + " permits unknown plugin");
    }

    std::set<TemplateId> template_ids;
    std::set<std::string> template_names;
    for (const TransactionTemplate& t : templates) {
        if (!template_ids.insert(t.id).second)
            throw std::invalid_argument("system: duplicate template id " + std::to_string(t.id));
        if (!template_names.insert(t.name).second)
            throw std::invalid_argument("system: duplicate template name " + t.name);
        if (!role_ids.count(t.owner_role))
            throw std::invalid_argument("system: template " + t.name + " has unknown owner role");
        for (PluginId plugin : t.required_plugins)
            if (!plugin_ids.count(plugin))
                throw std::invalid_argument("system: template " + t.name + " requires unknown plugin");
    }

    for (PluginDescriptor& p : plugins) {
        p.authorized_roles.clear();
        for (const RoleDescriptor& r : roles)
            if (r.plugin_permissions.count(p.id)) p.authorized_roles.insert(r.id);
    }
}

const PluginDescriptor& SystemDefinition::plugin(PluginId id) const {
    for (const PluginDescriptor& p : plugins)
        if (p.id == id) return p;
    throw std::invalid_argument("system: unknown plugin id " + std::to_string(id));
}

const RoleDescriptor& SystemDefinition::role(RoleId id) const {
    for (const RoleDescriptor& r : roles)
        if (r.id == id) return r;
    throw std::invalid_argument("system: unknown role id " + std::to_string(id));
}

const TransactionTemplate& SystemDefinition::transaction_template(TemplateId id) const {
    for (const TransactionTemplate& t : templates)
        if (t.id == id) return t;
    throw std::invalid_argument("system: unknown template id " + std::to_string(id));
}

const TransactionTemplate* SystemDefinition::find_template(const std::string& name) const {
    for (const TransactionTemplate& t : templates)
        if (t.name == name) return &t;
    return nullptr;
}

namespace {

template <typename T>
std::set<T> as_id_set(const nlohmann::json& j) {
    std::set<T> out;
    for (const auto& v : j) out.insert(v.get<T>());
    return out;
}

}  // namespace

SystemDefinition parse_system_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SystemDefinition def;
    for (const auto& pj : j.at("plugins")) {
        PluginDescriptor p;
        p.id = pj.at("id").get<PluginId>();
        p.name = pj.at("name").get<std::string>();
        p.shareable = pj.at("shareable").get<bool>();
        def.plugins.push_back(std::move(p));
    }
    for (const auto& rj : j.at("roles")) {
        RoleDescriptor r;
        r.id = rj.at("id").get<RoleId>();
        r.name = rj.at("name").get<std::string>();
        if (rj.contains("supervises")) r.supervises = as_id_set<RoleId>(rj["supervises"]);
        if (rj.contains("plugin_permissions"))
            r.plugin_permissions = as_id_set<PluginId>(rj["plugin_permissions"]);
        if (rj.contains("comm_permissions"))
            r.comm_permissions = as_id_set<RoleId>(rj["comm_permissions"]);
        r.can_halt = rj.value("can_halt", false);
        r.initial_count = rj.value("initial_count", 0);
        r.max_count = rj.value("max_count", 0);
        def.roles.push_back(std::move(r));
    }
    for (const auto& tj : j.at("templates")) {
        TransactionTemplate t;
        t.id = tj.at("id").get<TemplateId>();
        t.name = tj.at("name").get<std::string>();
        t.owner_role = tj.at("owner_role").get<RoleId>();
        if (tj.contains("required_plugins"))
            t.required_plugins = as_id_set<PluginId>(tj["required_plugins"]);
        def.templates.push_back(std::move(t));
    }
    const auto& pj = j.at("params");
    def.params.optimization = pj.value("optimization", true);
    def.params.thread_count = pj.value("threads", 1);
    def.params.batch_size = pj.value("batch_size", 1);
    def.params.trigger = pj.value("trigger", false);
    def.validate_and_index();
    return def;
}

std::string write_system_json(const SystemDefinition& def) {
    nlohmann::json j;
    j["plugins"] = nlohmann::json::array();
    for (const PluginDescriptor& p : def.plugins)
        j["plugins"].push_back({{"id", p.id}, {"name", p.name}, {"shareable", p.shareable}});
    j["roles"] = nlohmann::json::array();
    for (const RoleDescriptor& r : def.roles)
        j["roles"].push_back({{"id", r.id},
                              {"name", r.name},
                              {"supervises", r.supervises},
                              {"plugin_permissions", r.plugin_permissions},
                              {"comm_permissions", r.comm_permissions},
                              {"can_halt", r.can_halt},
                              {"initial_count", r.initial_count},
                              {"max_count", r.max_count}});
    j["templates"] = nlohmann::json::array();
    for (const TransactionTemplate& t : def.templates)
        j["templates"].push_back({{"id", t.id},
                                  {"name", t.name},
                                  {"owner_role", t.owner_role},
                                  {"required_plugins", t.required_plugins}});
    j["params"] = {{"optimization", def.params.optimization},
                   {"threads", def.params.thread_count},
                   {"batch_size", def.params.batch_size},
                   {"trigger", def.params.trigger}};
    return j.dump(2) + "\n";
}

bool plugin_access_allowed(const SystemDefinition& def, RoleId actor_role, PluginId plugin) {
    return def.role(actor_role).plugin_permissions.count(plugin) > 0;
}

bool manipulation_allowed(const SystemDefinition& def, RoleId actor_role, AgentVerb verb,
                          RoleId target_role, bool actor_is_target) {
    if (verb == AgentVerb::Stop && actor_is_target) return true;  // an agent may stop itself
    return def.role(actor_role).supervises.count(target_role) > 0;
}

bool communication_allowed(const SystemDefinition& def, RoleId sender_role, RoleId receiver_role) {
    if (sender_role == receiver_role) return true;
    const RoleDescriptor& sender = def.role(sender_role);
    const RoleDescriptor& receiver = def.role(receiver_role);
    if (sender.supervises.count(receiver_role) || receiver.supervises.count(sender_role)) return true;
    // explicit grants are pair permissions; either direction suffices
    return sender.comm_permissions.count(receiver_role) > 0 ||
           receiver.comm_permissions.count(sender_role) > 0;
}

}  // namespace optima
