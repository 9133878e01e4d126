#include "cyberq/env.hpp"

#include <algorithm>
#include <sstream>

#include "cyberq/errors.hpp"

namespace cyberq::env {

using netmodel::HostRole;
using netmodel::HostSpec;
using netmodel::kInternet;
using netmodel::kRandomClient;
using netmodel::kRandomServer;

Action Action::scan_network(std::string network) {
  Action a;
  a.kind = ActionKind::ScanNetwork;
  a.network = std::move(network);
  a.encoding = "scan_network:" + a.network;
  return a;
}

Action Action::find_services(std::string host) {
  Action a;
  a.kind = ActionKind::FindServices;
  a.host = std::move(host);
  a.encoding = "find_services:" + a.host;
  return a;
}

Action Action::execute_code(std::string host, std::string service) {
  Action a;
  a.kind = ActionKind::ExecuteCodeInService;
  a.host = std::move(host);
  a.service = std::move(service);
  a.encoding = "execute_code:" + a.host + ":" + a.service;
  return a;
}

Action Action::find_data(std::string host) {
  Action a;
  a.kind = ActionKind::FindData;
  a.host = std::move(host);
  a.encoding = "find_data:" + a.host;
  return a;
}

Action Action::exfiltrate(std::string src, std::string data, std::string dest) {
  Action a;
  a.kind = ActionKind::ExfiltrateData;
  a.host = std::move(src);
  a.data = std::move(data);
  a.dest = std::move(dest);
  a.encoding = "exfiltrate_data:" + a.host + ":" + a.data + ":" + a.dest;
  return a;
}

const char* to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Continue: return "CONTINUE";
    case OutcomeKind::Win: return "WIN";
    case OutcomeKind::Detected: return "DETECTED";
    case OutcomeKind::Timeout: return "TIMEOUT";
  }
  return "?";
}

OutcomeKind outcome_from_string(const std::string& text) {
  if (text == "CONTINUE") return OutcomeKind::Continue;
  if (text == "WIN") return OutcomeKind::Win;
  if (text == "DETECTED") return OutcomeKind::Detected;
  if (text == "TIMEOUT") return OutcomeKind::Timeout;
  throw FormatError("unknown outcome kind '" + text + "'");
}

AttackerState initial_state(const ScenarioConfig& config, RandomStream& rng) {
  AttackerState state;
  if (config.start == kRandomClient) {
    auto clients = config.client_ids();
    state.drawn_start = clients[rng.next_index(clients.size())];
  } else {
    state.drawn_start = config.start;
  }
  if (config.goal_target == kRandomServer) {
    auto servers = config.server_ids();
    state.drawn_target_host = servers[rng.next_index(servers.size())];
  } else {
    state.drawn_target_host = config.goal_target;
  }
  state.drawn_target_data = config.goal_data;

  // The compromised host's routing table exposes the local subnets.
  for (const auto& sn : config.subnets) state.known_networks.insert(sn.name);
  state.known_hosts = {state.drawn_start, config.cnc_id};
  state.controlled_hosts = state.known_hosts;
  return state;
}

namespace {

bool is_local(const ScenarioConfig& config, const std::string& host_id) {
  const HostSpec* h = config.find_host(host_id);
  return h != nullptr && h->location != kInternet;
}

bool reachable_from_controlled(const ScenarioConfig& config,
                               const AttackerState& state,
                               const std::string& dst) {
  return std::any_of(
      state.controlled_hosts.begin(), state.controlled_hosts.end(),
      [&](const std::string& src) { return netmodel::reachable(config, src, dst); });
}

}  // namespace

std::vector<Action> valid_actions(const ScenarioConfig& config,
                                  const AttackerState& state) {
  std::vector<Action> actions;

  for (const auto& net : state.known_networks)
    actions.push_back(Action::scan_network(net));

  for (const auto& host : state.known_hosts) {
    if (is_local(config, host) && reachable_from_controlled(config, state, host))
      actions.push_back(Action::find_services(host));
  }

  for (const auto& [host, service] : state.known_services) {
    if (reachable_from_controlled(config, state, host))
      actions.push_back(Action::execute_code(host, service));
  }

  for (const auto& host : state.controlled_hosts) {
    if (is_local(config, host)) actions.push_back(Action::find_data(host));
  }

  for (const auto& [src, data] : state.known_data) {
    if (!state.controlled_hosts.count(src)) continue;
    for (const auto& dst : state.controlled_hosts) {
      if (dst != src && netmodel::reachable(config, src, dst))
        actions.push_back(Action::exfiltrate(src, data, dst));
    }
  }

  std::sort(actions.begin(), actions.end(),
            [](const Action& a, const Action& b) { return a.encoding < b.encoding; });
  return actions;
}

AttackerState apply_effects(const ScenarioConfig& config,
                            const AttackerState& state, const Action& action) {
  auto valid = valid_actions(config, state);
  if (std::find(valid.begin(), valid.end(), action) == valid.end())
    throw PreconditionError("action '" + action.encoding + "' is not valid in this state");

  AttackerState next = state;
  switch (action.kind) {
    case ActionKind::ScanNetwork:
      for (const auto& h : config.hosts)
        if (h.location == action.network) next.known_hosts.insert(h.id);
      break;
    case ActionKind::FindServices: {
      const HostSpec* h = config.find_host(action.host);
      for (const auto& s : h->services) next.known_services.insert({action.host, s});
      break;
    }
    case ActionKind::ExecuteCodeInService:
      next.controlled_hosts.insert(action.host);
      break;
    case ActionKind::FindData: {
      const HostSpec* h = config.find_host(action.host);
      for (const auto& d : h->data) next.known_data.insert({action.host, d});
      break;
    }
    case ActionKind::ExfiltrateData:
      next.known_data.insert({action.dest, action.data});
      break;
  }
  return next;
}

bool is_goal(const ScenarioConfig& config, const AttackerState& state) {
  return state.known_data.count({config.cnc_id, state.drawn_target_data}) > 0;
}

StepOutcome step(const ScenarioConfig& config, const AttackerState& state,
                 const Action& action, RandomStream& rng) {
  if (state.steps_taken >= config.max_steps || is_goal(config, state))
    throw StepAfterTerminalError("step called on a terminal state");

  const auto& probs = config.probabilities.for_kind(action.kind);
  // Fixed consumption: both draws happen on every step.
  bool detected = rng.next_bernoulli(probs.detection);
  bool success = rng.next_bernoulli(probs.success);

  StepOutcome out;
  out.detected = detected;
  out.success = !detected && success;

  if (detected) {
    out.next_state = state;  // effects not applied
    out.next_state.steps_taken = state.steps_taken + 1;
    out.kind = OutcomeKind::Detected;
    out.terminal = true;
    out.reward = config.rewards.step_reward + config.rewards.detection_penalty;
    return out;
  }

  out.next_state = out.success ? apply_effects(config, state, action) : state;
  out.next_state.steps_taken = state.steps_taken + 1;
  out.reward = config.rewards.step_reward;

  if (is_goal(config, out.next_state)) {
    out.kind = OutcomeKind::Win;
    out.terminal = true;
    out.reward += config.rewards.goal_reward;
  } else if (out.next_state.steps_taken >= config.max_steps) {
    out.kind = OutcomeKind::Timeout;
    out.terminal = true;
  } else {
    out.kind = OutcomeKind::Continue;
  }
  return out;
}

std::string canonical_key(const AttackerState& state) {
  std::ostringstream out;
  auto join = [&out](const auto& items, auto render) {
    bool first = true;
    for (const auto& item : items) {
      if (!first) out << ',';
      render(item);
      first = false;
    }
  };
  auto name = [&out](const std::string& s) { out << s; };
  auto pair = [&out](const std::pair<std::string, std::string>& p) {
    out << p.first << ':' << p.second;
  };

  out << "nets[";
  join(state.known_networks, name);
  out << "]|hosts[";
  join(state.known_hosts, name);
  out << "]|ctrl[";
  join(state.controlled_hosts, name);
  out << "]|svcs[";
  join(state.known_services, pair);
  out << "]|data[";
  join(state.known_data, pair);
  out << ']';
  return out.str();
}

}  // namespace cyberq::env
