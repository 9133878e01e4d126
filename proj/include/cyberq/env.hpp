#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cyberq/netmodel.hpp"
#include "cyberq/random.hpp"

namespace cyberq::env {

using netmodel::ActionKind;
using netmodel::ScenarioConfig;

// One of the five parameterized attacker actions. The canonical text
// encoding doubles as the Q-table key and the deterministic tie-break
// order, so it is computed once at construction.
struct Action {
  ActionKind kind = ActionKind::ScanNetwork;
  std::string network;  // ScanNetwork
  std::string host;     // FindServices / ExecuteCodeInService / FindData; source for ExfiltrateData
  std::string service;  // ExecuteCodeInService
  std::string data;     // ExfiltrateData
  std::string dest;     // ExfiltrateData
  std::string encoding;

  static Action scan_network(std::string network);
  static Action find_services(std::string host);
  static Action execute_code(std::string host, std::string service);
  static Action find_data(std::string host);
  static Action exfiltrate(std::string src, std::string data, std::string dest);

  bool operator==(const Action& other) const { return encoding == other.encoding; }
};

// The attacker's view of the world: five monotonically growing asset sets
// (relaxed STRIPS, no delete effects) plus bookkeeping for the episode.
struct AttackerState {
  std::set<std::string> known_networks;
  std::set<std::string> known_hosts;
  std::set<std::string> controlled_hosts;
  std::set<std::pair<std::string, std::string>> known_services;  // (host, service)
  std::set<std::pair<std::string, std::string>> known_data;      // (host, data)
  int steps_taken = 0;
  std::string drawn_start;
  std::string drawn_target_host;
  std::string drawn_target_data;
};

enum class OutcomeKind { Continue, Win, Detected, Timeout };

const char* to_string(OutcomeKind kind);
OutcomeKind outcome_from_string(const std::string& text);  // throws FormatError

struct StepOutcome {
  AttackerState next_state;
  double reward = 0.0;
  bool terminal = false;
  OutcomeKind kind = OutcomeKind::Continue;
  bool detected = false;
  bool success = false;
};

// Consumes one draw per random spec element: start when RANDOM_CLIENT,
// target when RANDOM_SERVER, in that order. Fixed specs consume nothing.
AttackerState initial_state(const ScenarioConfig& config, RandomStream& rng);

// Actions whose Table-2 preconditions hold in `state`, sorted by canonical
// encoding. A remote action is legal if any controlled host can reach the
// target; the acting host is not a parameter.
std::vector<Action> valid_actions(const ScenarioConfig& config,
                                  const AttackerState& state);

// Add-only union of the action's effects. Throws PreconditionError if the
// action is not valid in `state`.
AttackerState apply_effects(const ScenarioConfig& config,
                            const AttackerState& state, const Action& action);

// True iff the target data has reached the C&C host.
bool is_goal(const ScenarioConfig& config, const AttackerState& state);

// One MDP transition. Always consumes exactly two draws: detection first,
// then success. A detected action applies no effects and ends the episode.
// Throws PreconditionError / StepAfterTerminalError.
StepOutcome step(const ScenarioConfig& config, const AttackerState& state,
                 const Action& action, RandomStream& rng);

// Deterministic state key: the five asset sets rendered sorted. Excludes
// steps_taken and the drawn start/target so the Q-function generalizes
// across draws.
std::string canonical_key(const AttackerState& state);

}  // namespace cyberq::env
