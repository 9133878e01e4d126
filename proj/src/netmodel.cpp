#include "cyberq/netmodel.hpp"

#include <algorithm>
#include <cstdint>
#include <queue>
#include <sstream>

#include "cyberq/errors.hpp"
#include "json.hpp"

namespace cyberq::netmodel {

namespace {

using nlohmann::ordered_json;

struct Cidr {
  std::uint32_t network = 0;
  int prefix = 0;
};

std::uint32_t prefix_mask(int prefix) {
  return prefix == 0 ? 0u : ~std::uint32_t{0} << (32 - prefix);
}

bool parse_cidr(const std::string& text, Cidr& out) {
  unsigned a, b, c, d;
  int prefix;
  char tail;
  std::istringstream in(text);
  char dot1, dot2, dot3, slash;
  if (!(in >> a >> dot1 >> b >> dot2 >> c >> dot3 >> d >> slash >> prefix)) return false;
  if (dot1 != '.' || dot2 != '.' || dot3 != '.' || slash != '/') return false;
  if (in >> tail) return false;
  if (a > 255 || b > 255 || c > 255 || d > 255 || prefix < 0 || prefix > 32) return false;
  std::uint32_t addr = (a << 24) | (b << 16) | (c << 8) | d;
  out.network = addr & prefix_mask(prefix);
  out.prefix = prefix;
  return true;
}

bool cidr_overlap(const Cidr& x, const Cidr& y) {
  std::uint32_t mask = prefix_mask(std::min(x.prefix, y.prefix));
  return (x.network & mask) == (y.network & mask);
}

void reject_unknown_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = std::any_of(allowed.begin(), allowed.end(),
                             [&](const char* k) { return it.key() == k; });
    if (!known) throw SchemaError("unknown key '" + it.key() + "' in " + where);
  }
}

const ordered_json& require(const ordered_json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError("missing key '" + std::string(key) + "' in " + where);
  return *it;
}

std::string require_string(const ordered_json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_string()) throw SchemaError("key '" + std::string(key) + "' in " + where + " must be a string");
  return v.get<std::string>();
}

double require_number(const ordered_json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number()) throw SchemaError("key '" + std::string(key) + "' in " + where + " must be a number");
  return v.get<double>();
}

std::vector<std::string> require_string_array(const ordered_json& obj, const char* key,
                                              const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_array()) throw SchemaError("key '" + std::string(key) + "' in " + where + " must be an array");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) throw SchemaError("entries of '" + std::string(key) + "' in " + where + " must be strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

HostRole role_from_string(const std::string& text) {
  if (text == "client") return HostRole::Client;
  if (text == "server") return HostRole::Server;
  if (text == "cnc") return HostRole::Cnc;
  throw SchemaError("unknown host role '" + text + "'");
}

constexpr const char* kProbKeys[kActionKindCount] = {
    "scan_network", "find_services", "execute_code_in_service", "find_data",
    "exfiltrate_data"};

ActionProbs parse_probs(const ordered_json& obj, const std::string& where) {
  if (!obj.is_object()) throw SchemaError(where + " must be an object");
  reject_unknown_keys(obj, {"success", "detection"}, where);
  return {require_number(obj, "success", where), require_number(obj, "detection", where)};
}

}  // namespace

const char* to_string(HostRole role) {
  switch (role) {
    case HostRole::Client: return "client";
    case HostRole::Server: return "server";
    case HostRole::Cnc: return "cnc";
  }
  return "?";
}

const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::ScanNetwork: return "scan_network";
    case ActionKind::FindServices: return "find_services";
    case ActionKind::ExecuteCodeInService: return "execute_code_in_service";
    case ActionKind::FindData: return "find_data";
    case ActionKind::ExfiltrateData: return "exfiltrate_data";
  }
  return "?";
}

const ActionProbs& ProbabilityTable::for_kind(ActionKind kind) const {
  switch (kind) {
    case ActionKind::ScanNetwork: return scan_network;
    case ActionKind::FindServices: return find_services;
    case ActionKind::ExecuteCodeInService: return execute_code;
    case ActionKind::FindData: return find_data;
    case ActionKind::ExfiltrateData: return exfiltrate_data;
  }
  return scan_network;
}

ActionProbs& ProbabilityTable::for_kind(ActionKind kind) {
  return const_cast<ActionProbs&>(std::as_const(*this).for_kind(kind));
}

const HostSpec* ScenarioConfig::find_host(const std::string& id) const {
  for (const auto& h : hosts)
    if (h.id == id) return &h;
  return nullptr;
}

bool ScenarioConfig::has_subnet(const std::string& name) const {
  return std::any_of(subnets.begin(), subnets.end(),
                     [&](const Subnet& s) { return s.name == name; });
}

std::vector<std::string> ScenarioConfig::client_ids() const {
  std::vector<std::string> out;
  for (const auto& h : hosts)
    if (h.role == HostRole::Client) out.push_back(h.id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> ScenarioConfig::server_ids() const {
  std::vector<std::string> out;
  for (const auto& h : hosts)
    if (h.role == HostRole::Server) out.push_back(h.id);
  std::sort(out.begin(), out.end());
  return out;
}

ScenarioConfig default_scenario(Variant variant) {
  ScenarioConfig config;
  config.subnets = {{"net1", "192.168.1.0/24"}, {"net2", "192.168.2.0/24"}};

  bool all_servers_hold_data = variant == Variant::RandomStartRandomTarget;
  for (int i = 1; i <= 5; ++i) {
    HostSpec server;
    server.id = "server" + std::to_string(i);
    server.location = "net1";
    server.role = HostRole::Server;
    server.services = {"remote-access"};
    if (all_servers_hold_data || i == 3) server.data = {"sensitive"};
    config.hosts.push_back(std::move(server));
  }
  for (int i = 1; i <= 5; ++i) {
    HostSpec client;
    client.id = "client" + std::to_string(i);
    client.location = "net2";
    client.role = HostRole::Client;
    client.services = {"workstation"};
    config.hosts.push_back(std::move(client));
  }
  HostSpec cnc;
  cnc.id = "cnc";
  cnc.location = kInternet;
  cnc.role = HostRole::Cnc;
  config.hosts.push_back(std::move(cnc));

  // Figure-1 dotted lines are not enumerated in the text; default to
  // allow-all client -> server.
  for (int c = 1; c <= 5; ++c)
    for (int s = 1; s <= 5; ++s)
      config.firewall.allowed_pairs.emplace("client" + std::to_string(c),
                                            "server" + std::to_string(s));

  config.probabilities.scan_network = {0.9, 0.2};
  config.probabilities.find_services = {0.9, 0.3};
  config.probabilities.execute_code = {0.7, 0.4};
  config.probabilities.find_data = {0.8, 0.1};
  config.probabilities.exfiltrate_data = {0.8, 0.1};

  config.start = variant == Variant::Fixed ? "client1" : kRandomClient;
  config.cnc_id = "cnc";
  config.goal_target = all_servers_hold_data ? kRandomServer : "server3";
  config.goal_data = "sensitive";
  config.rewards = {-1.0, -50.0, 100.0};
  config.max_steps = 25;
  return config;
}

bool reachable(const ScenarioConfig& config, const std::string& src,
               const std::string& dst) {
  const HostSpec* s = config.find_host(src);
  if (!s) throw UnknownHostError(src);
  const HostSpec* d = config.find_host(dst);
  if (!d) throw UnknownHostError(dst);
  if (src == dst) return true;
  if (d->location == kInternet) return true;
  if (s->location == d->location && s->location != kInternet) return true;
  return config.firewall.allowed_pairs.count({src, dst}) > 0;
}

namespace {

// Lateral-movement closure: hosts the attacker could eventually control from
// `start`, chaining through exploitable (service-bearing) local hosts.
std::set<std::string> control_closure(const ScenarioConfig& config,
                                      const std::string& start) {
  std::set<std::string> controlled = {start, config.cnc_id};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& h : config.hosts) {
      if (controlled.count(h.id) || h.location == kInternet || h.services.empty())
        continue;
      for (const auto& src : controlled) {
        if (reachable(config, src, h.id)) {
          controlled.insert(h.id);
          grew = true;
          break;
        }
      }
    }
  }
  return controlled;
}

}  // namespace

std::vector<std::string> validate(const ScenarioConfig& config) {
  std::vector<std::string> violations;
  auto add = [&](const std::string& msg) { violations.push_back(msg); };

  std::map<std::string, Cidr> parsed_subnets;
  for (const auto& sn : config.subnets) {
    if (parsed_subnets.count(sn.name)) {
      add("duplicate subnet name '" + sn.name + "'");
      continue;
    }
    Cidr cidr;
    if (!parse_cidr(sn.address_range, cidr)) {
      add("subnet '" + sn.name + "' has invalid CIDR '" + sn.address_range + "'");
      continue;
    }
    for (const auto& [other, other_cidr] : parsed_subnets) {
      if (cidr_overlap(cidr, other_cidr))
        add("subnet '" + sn.name + "' overlaps subnet '" + other + "'");
    }
    parsed_subnets[sn.name] = cidr;
  }

  std::set<std::string> ids;
  for (const auto& h : config.hosts) {
    if (!ids.insert(h.id).second) add("duplicate host id '" + h.id + "'");
    if (h.role == HostRole::Cnc) {
      if (h.location != kInternet)
        add("cnc host '" + h.id + "' must be located at INTERNET");
    } else {
      if (!config.has_subnet(h.location))
        add("host '" + h.id + "' located in unknown subnet '" + h.location + "'");
      if (h.role == HostRole::Server && h.services.empty())
        add("server '" + h.id + "' lists no services");
    }
  }

  for (const auto& [src, dst] : config.firewall.allowed_pairs) {
    if (!config.find_host(src)) add("firewall pair references unknown host '" + src + "'");
    if (!config.find_host(dst)) add("firewall pair references unknown host '" + dst + "'");
  }

  for (int k = 0; k < kActionKindCount; ++k) {
    const auto& p = config.probabilities.for_kind(static_cast<ActionKind>(k));
    if (p.success < 0 || p.success > 1)
      add(std::string("success probability of ") + kProbKeys[k] + " outside [0,1]");
    if (p.detection < 0 || p.detection > 1)
      add(std::string("detection probability of ") + kProbKeys[k] + " outside [0,1]");
  }

  const HostSpec* cnc = config.find_host(config.cnc_id);
  if (!cnc || cnc->role != HostRole::Cnc)
    add("cnc id '" + config.cnc_id + "' does not name a cnc host");

  std::vector<std::string> start_candidates;
  if (config.start == kRandomClient) {
    start_candidates = config.client_ids();
    if (start_candidates.empty()) add("RANDOM_CLIENT start but no client hosts");
  } else {
    const HostSpec* s = config.find_host(config.start);
    if (!s || s->location == kInternet)
      add("start '" + config.start + "' does not name a local host");
    else
      start_candidates = {config.start};
  }

  auto holds_data = [&](const HostSpec& h) {
    return std::find(h.data.begin(), h.data.end(), config.goal_data) != h.data.end();
  };
  std::vector<std::string> goal_hosts;
  if (config.goal_target == kRandomServer) {
    bool any_server = false;
    for (const auto& h : config.hosts) {
      if (h.role != HostRole::Server) continue;
      any_server = true;
      goal_hosts.push_back(h.id);
      if (!holds_data(h))
        add("RANDOM_SERVER goal but server '" + h.id + "' does not hold data '" +
            config.goal_data + "'");
    }
    if (!any_server) add("RANDOM_SERVER goal but no server hosts");
  } else {
    const HostSpec* t = config.find_host(config.goal_target);
    if (!t)
      add("goal target '" + config.goal_target + "' does not exist");
    else if (!holds_data(*t))
      add("goal target '" + config.goal_target + "' does not hold data '" +
          config.goal_data + "'");
    else
      goal_hosts = {config.goal_target};
  }

  if (config.rewards.step_reward >= 0) add("step reward must be negative");
  if (config.rewards.detection_penalty >= 0) add("detection penalty must be negative");
  if (config.rewards.goal_reward <= 0) add("goal reward must be positive");
  if (config.max_steps < 5) add("max_steps must be at least 5");

  // Solvability is a warning: the config is usable, just unwinnable.
  if (violations.empty() && !start_candidates.empty() && !goal_hosts.empty()) {
    bool solvable = false;
    for (const auto& start : start_candidates) {
      auto closure = control_closure(config, start);
      if (std::any_of(goal_hosts.begin(), goal_hosts.end(),
                      [&](const std::string& g) { return closure.count(g) > 0; })) {
        solvable = true;
        break;
      }
    }
    if (!solvable)
      add("SOLVABILITY: no start candidate can reach a goal host through the firewall");
  }

  return violations;
}

std::string serialize_scenario(const ScenarioConfig& config) {
  ordered_json doc;
  doc["subnets"] = ordered_json::array();
  for (const auto& sn : config.subnets)
    doc["subnets"].push_back({{"name", sn.name}, {"address_range", sn.address_range}});
  doc["hosts"] = ordered_json::array();
  for (const auto& h : config.hosts)
    doc["hosts"].push_back({{"id", h.id},
                            {"location", h.location},
                            {"role", to_string(h.role)},
                            {"services", h.services},
                            {"data", h.data}});
  doc["firewall"]["allowed_pairs"] = ordered_json::array();
  for (const auto& [src, dst] : config.firewall.allowed_pairs)
    doc["firewall"]["allowed_pairs"].push_back({src, dst});
  for (int k = 0; k < kActionKindCount; ++k) {
    const auto& p = config.probabilities.for_kind(static_cast<ActionKind>(k));
    doc["probabilities"][kProbKeys[k]] = {{"success", p.success}, {"detection", p.detection}};
  }
  doc["attacker"] = {{"start", config.start}, {"cnc", config.cnc_id}};
  doc["goal"] = {{"target", config.goal_target}, {"data", config.goal_data}};
  doc["rewards"] = {{"step", config.rewards.step_reward},
                    {"detection", config.rewards.detection_penalty},
                    {"goal", config.rewards.goal_reward}};
  doc["max_steps"] = config.max_steps;
  return doc.dump(2) + "\n";
}

ScenarioConfig parse_scenario(const std::string& document) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("top level must be an object");
  reject_unknown_keys(doc, {"subnets", "hosts", "firewall", "probabilities",
                            "attacker", "goal", "rewards", "max_steps"},
                      "scenario");

  ScenarioConfig config;

  const auto& subnets = require(doc, "subnets", "scenario");
  if (!subnets.is_array()) throw SchemaError("'subnets' must be an array");
  for (const auto& sn : subnets) {
    if (!sn.is_object()) throw SchemaError("subnet entries must be objects");
    reject_unknown_keys(sn, {"name", "address_range"}, "subnet");
    config.subnets.push_back({require_string(sn, "name", "subnet"),
                              require_string(sn, "address_range", "subnet")});
  }

  const auto& hosts = require(doc, "hosts", "scenario");
  if (!hosts.is_array()) throw SchemaError("'hosts' must be an array");
  if (hosts.empty()) throw SchemaError("'hosts' must not be empty");
  for (const auto& h : hosts) {
    if (!h.is_object()) throw SchemaError("host entries must be objects");
    reject_unknown_keys(h, {"id", "location", "role", "services", "data"}, "host");
    HostSpec host;
    host.id = require_string(h, "id", "host");
    host.location = require_string(h, "location", "host");
    host.role = role_from_string(require_string(h, "role", "host"));
    host.services = require_string_array(h, "services", "host");
    host.data = require_string_array(h, "data", "host");
    config.hosts.push_back(std::move(host));
  }

  const auto& firewall = require(doc, "firewall", "scenario");
  if (!firewall.is_object()) throw SchemaError("'firewall' must be an object");
  reject_unknown_keys(firewall, {"allowed_pairs"}, "firewall");
  const auto& pairs = require(firewall, "allowed_pairs", "firewall");
  if (!pairs.is_array()) throw SchemaError("'allowed_pairs' must be an array");
  for (const auto& p : pairs) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
      throw SchemaError("firewall pairs must be [src, dst] string pairs");
    config.firewall.allowed_pairs.emplace(p[0].get<std::string>(), p[1].get<std::string>());
  }

  const auto& probs = require(doc, "probabilities", "scenario");
  if (!probs.is_object()) throw SchemaError("'probabilities' must be an object");
  reject_unknown_keys(probs, {kProbKeys[0], kProbKeys[1], kProbKeys[2], kProbKeys[3], kProbKeys[4]},
                      "probabilities");
  for (int k = 0; k < kActionKindCount; ++k) {
    config.probabilities.for_kind(static_cast<ActionKind>(k)) =
        parse_probs(require(probs, kProbKeys[k], "probabilities"), kProbKeys[k]);
  }

  const auto& attacker = require(doc, "attacker", "scenario");
  if (!attacker.is_object()) throw SchemaError("'attacker' must be an object");
  reject_unknown_keys(attacker, {"start", "cnc"}, "attacker");
  config.start = require_string(attacker, "start", "attacker");
  config.cnc_id = require_string(attacker, "cnc", "attacker");

  const auto& goal = require(doc, "goal", "scenario");
  if (!goal.is_object()) throw SchemaError("'goal' must be an object");
  reject_unknown_keys(goal, {"target", "data"}, "goal");
  config.goal_target = require_string(goal, "target", "goal");
  config.goal_data = require_string(goal, "data", "goal");

  const auto& rewards = require(doc, "rewards", "scenario");
  if (!rewards.is_object()) throw SchemaError("'rewards' must be an object");
  reject_unknown_keys(rewards, {"step", "detection", "goal"}, "rewards");
  config.rewards.step_reward = require_number(rewards, "step", "rewards");
  config.rewards.detection_penalty = require_number(rewards, "detection", "rewards");
  config.rewards.goal_reward = require_number(rewards, "goal", "rewards");

  const auto& max_steps = require(doc, "max_steps", "scenario");
  if (!max_steps.is_number_integer()) throw SchemaError("'max_steps' must be an integer");
  config.max_steps = max_steps.get<int>();

  for (const auto& v : validate(config)) {
    if (v.rfind("SOLVABILITY:", 0) != 0) throw ValidationError(v);
  }
  return config;
}

std::string scenario_digest(const ScenarioConfig& config) {
  std::string text = serialize_scenario(config);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace cyberq::netmodel
