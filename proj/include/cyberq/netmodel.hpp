#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace cyberq::netmodel {

inline constexpr const char* kInternet = "INTERNET";
inline constexpr const char* kRandomClient = "RANDOM_CLIENT";
inline constexpr const char* kRandomServer = "RANDOM_SERVER";

struct Subnet {
  std::string name;
  std::string address_range;  // CIDR text, display/validation only
};

enum class HostRole { Client, Server, Cnc };

const char* to_string(HostRole role);

struct HostSpec {
  std::string id;
  std::string location;  // subnet name, or kInternet for the C&C host
  HostRole role = HostRole::Client;
  std::vector<std::string> services;
  std::vector<std::string> data;
};

// Consulted only for cross-subnet local traffic; intra-subnet and
// host -> INTERNET traffic is implicitly allowed.
struct FirewallPolicy {
  std::set<std::pair<std::string, std::string>> allowed_pairs;  // (src, dst)
};

enum class ActionKind {
  ScanNetwork,
  FindServices,
  ExecuteCodeInService,
  FindData,
  ExfiltrateData,
};

inline constexpr int kActionKindCount = 5;

const char* to_string(ActionKind kind);

struct ActionProbs {
  double success = 1.0;
  double detection = 0.0;
};

// Success/detection probabilities depend only on the action kind: the
// defender is a global stochastic entity, identical on every host.
struct ProbabilityTable {
  ActionProbs scan_network;
  ActionProbs find_services;
  ActionProbs execute_code;
  ActionProbs find_data;
  ActionProbs exfiltrate_data;

  const ActionProbs& for_kind(ActionKind kind) const;
  ActionProbs& for_kind(ActionKind kind);
};

struct RewardConfig {
  double step_reward = -1.0;
  double detection_penalty = -50.0;
  double goal_reward = 100.0;
};

struct ScenarioConfig {
  std::vector<Subnet> subnets;
  std::vector<HostSpec> hosts;
  FirewallPolicy firewall;
  ProbabilityTable probabilities;
  std::string start;        // host id or kRandomClient
  std::string cnc_id;
  std::string goal_target;  // host id or kRandomServer
  std::string goal_data;
  RewardConfig rewards;
  int max_steps = 25;

  const HostSpec* find_host(const std::string& id) const;
  bool has_subnet(const std::string& name) const;
  std::vector<std::string> client_ids() const;  // sorted
  std::vector<std::string> server_ids() const;  // sorted
};

enum class Variant { Fixed, RandomStart, RandomStartRandomTarget };

// The two-subnet topology used throughout: five clients in subnet 2, five
// servers in subnet 1, C&C on the Internet, allow-all client->server
// firewall, 25-action limit.
ScenarioConfig default_scenario(Variant variant);

// Throws SchemaError for malformed documents and ValidationError when a
// scenario invariant is violated. Unknown keys are rejected.
ScenarioConfig parse_scenario(const std::string& document);

std::string serialize_scenario(const ScenarioConfig& config);

// Returns violation descriptions; empty iff all invariants hold. Entries
// prefixed "SOLVABILITY:" are warnings, not hard violations.
std::vector<std::string> validate(const ScenarioConfig& config);

// True iff src==dst, both hosts share a subnet, dst is on the Internet, or
// the firewall explicitly allows the pair. Throws UnknownHostError.
bool reachable(const ScenarioConfig& config, const std::string& src,
               const std::string& dst);

// FNV-1a hash of the serialized scenario, as 16 hex digits. Used for
// provenance in summaries and Q-table files.
std::string scenario_digest(const ScenarioConfig& config);

}  // namespace cyberq::netmodel
