#include "cyberq/agents.hpp"

#include <algorithm>
#include <cmath>

#include "cyberq/errors.hpp"
#include "json.hpp"

namespace cyberq::agents {

using nlohmann::ordered_json;

const char* to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Random: return "random";
    case AgentKind::Q: return "q";
    case AgentKind::NaiveQ: return "naive-q";
    case AgentKind::DoubleQ: return "double-q";
  }
  return "?";
}

AgentKind agent_kind_from_string(const std::string& text) {
  if (text == "random") return AgentKind::Random;
  if (text == "q") return AgentKind::Q;
  if (text == "naive-q") return AgentKind::NaiveQ;
  if (text == "double-q") return AgentKind::DoubleQ;
  throw FormatError("unknown agent kind '" + text + "'");
}

double epsilon_at(const EpsilonSchedule& schedule, int episode_index) {
  int span = std::max(1, schedule.total_episodes - 1);
  double t = std::min(1.0, static_cast<double>(episode_index) / span);
  return schedule.start + (schedule.end - schedule.start) * t;
}

AgentConfig default_agent_config(AgentKind kind) {
  AgentConfig config;
  config.kind = kind;
  config.gamma = 0.9;
  config.epsilon = {0.2, 0.2, default_episodes(kind)};
  switch (kind) {
    case AgentKind::Random:
      config.alpha = 0.0;
      config.epsilon = {1.0, 1.0, default_episodes(kind)};
      break;
    case AgentKind::Q:
      config.alpha = 0.3;
      break;
    case AgentKind::NaiveQ:
      config.alpha = 0.8;
      break;
    case AgentKind::DoubleQ:
      config.alpha = 0.3;
      config.epsilon = {0.2, 0.05, default_episodes(kind)};
      break;
  }
  return config;
}

int default_episodes(AgentKind kind) {
  return kind == AgentKind::NaiveQ ? 5000 : 10000;
}

double QTable::get(const std::string& state_key, const std::string& action) const {
  auto it = entries_.find({state_key, action});
  return it == entries_.end() ? 0.0 : it->second;
}

void QTable::set(const std::string& state_key, const std::string& action, double value) {
  entries_[{state_key, action}] = value;
}

double state_value(const QTable& table, const std::string& state_key,
                   std::span<const std::string> valid_actions) {
  double best = 0.0;
  bool any = false;
  for (const auto& a : valid_actions) {
    double v = table.get(state_key, a);
    if (!any || v > best) best = v;
    any = true;
  }
  return any ? best : 0.0;
}

double q_update(QTable& table, const std::string& s_key, const std::string& action,
                double reward, const std::string& next_key,
                std::span<const std::string> next_actions, double alpha,
                double gamma) {
  double old_value = table.get(s_key, action);
  double target = reward + gamma * state_value(table, next_key, next_actions);
  double value = old_value + alpha * (target - old_value);
  table.set(s_key, action, value);
  return value;
}

double naive_q_update(QTable& table, const std::string& s_key,
                      const std::string& action, double reward,
                      const std::string& next_key,
                      std::span<const std::string> next_actions, double alpha,
                      double gamma) {
  double old_value = table.get(s_key, action);
  double target = reward + gamma * state_value(table, next_key, next_actions);
  double value = alpha * old_value + (1.0 - alpha) * target;
  table.set(s_key, action, value);
  return value;
}

namespace {

// Argmax of `selector` over next_actions, first maximum wins (callers pass
// encoding-sorted lists).
const std::string* argmax_action(const QTable& selector, const std::string& state_key,
                                 std::span<const std::string> actions) {
  const std::string* best = nullptr;
  double best_value = 0.0;
  for (const auto& a : actions) {
    double v = selector.get(state_key, a);
    if (!best || v > best_value) {
      best = &a;
      best_value = v;
    }
  }
  return best;
}

}  // namespace

double double_q_update(DoubleQTables& tables, bool update_a,
                       const std::string& s_key, const std::string& action,
                       double reward, const std::string& next_key,
                       std::span<const std::string> next_actions, double alpha,
                       double gamma) {
  QTable& own = update_a ? tables.table_a : tables.table_b;
  QTable& other = update_a ? tables.table_b : tables.table_a;

  double bootstrap = 0.0;  // terminal s'
  if (const std::string* best = argmax_action(own, next_key, next_actions))
    bootstrap = other.get(next_key, *best);

  double old_value = own.get(s_key, action);
  double value = old_value + alpha * (reward + gamma * bootstrap - old_value);
  own.set(s_key, action, value);
  return value;
}

std::size_t select_index(std::span<const double> values, double epsilon,
                         RandomStream& rng) {
  if (values.empty()) throw EmptyActionSetError("no valid actions to select from");

  if (epsilon > 0.0) {
    double u = rng.next_unit();
    if (u < epsilon) {
      // Reuse the draw: u/epsilon is uniform on [0,1) given u < epsilon.
      auto idx = static_cast<std::size_t>(u / epsilon * static_cast<double>(values.size()));
      return std::min(idx, values.size() - 1);
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

std::size_t Agent::choose(const std::string& state_key,
                          std::span<const env::Action> valid, double epsilon,
                          RandomStream& rng) const {
  if (valid.empty()) throw EmptyActionSetError("no valid actions to select from");

  if (config_.kind == AgentKind::Random) {
    double u = rng.next_unit();
    return std::min(static_cast<std::size_t>(u * static_cast<double>(valid.size())),
                    valid.size() - 1);
  }

  std::vector<double> values;
  values.reserve(valid.size());
  for (const auto& a : valid) {
    double v = tables_.table_a.get(state_key, a.encoding);
    if (config_.kind == AgentKind::DoubleQ)
      v += tables_.table_b.get(state_key, a.encoding);
    values.push_back(v);
  }
  return select_index(values, epsilon, rng);
}

void Agent::observe(const std::string& state_key, const env::Action& action,
                    double reward, const std::string& next_key,
                    std::span<const env::Action> next_actions, RandomStream& rng) {
  if (config_.kind == AgentKind::Random) return;

  std::vector<std::string> encodings;
  encodings.reserve(next_actions.size());
  for (const auto& a : next_actions) encodings.push_back(a.encoding);

  switch (config_.kind) {
    case AgentKind::Q:
      q_update(tables_.table_a, state_key, action.encoding, reward, next_key,
               encodings, config_.alpha, config_.gamma);
      break;
    case AgentKind::NaiveQ:
      naive_q_update(tables_.table_a, state_key, action.encoding, reward, next_key,
                     encodings, config_.alpha, config_.gamma);
      break;
    case AgentKind::DoubleQ: {
      bool update_a = rng.next_bernoulli(0.5);
      double_q_update(tables_, update_a, state_key, action.encoding, reward,
                      next_key, encodings, config_.alpha, config_.gamma);
      break;
    }
    case AgentKind::Random:
      break;
  }
}

namespace {

ordered_json entries_to_json(const QTable& table) {
  ordered_json arr = ordered_json::array();
  for (const auto& [key, value] : table.entries())
    arr.push_back({{"state", key.first}, {"action", key.second}, {"value", value}});
  return arr;
}

void entries_from_json(const ordered_json& arr, QTable& table) {
  if (!arr.is_array()) throw FormatError("q-table entries must be an array");
  for (const auto& e : arr) {
    if (!e.is_object() || !e.contains("state") || !e.contains("action") ||
        !e.contains("value") || !e["state"].is_string() || !e["action"].is_string() ||
        !e["value"].is_number())
      throw FormatError("malformed q-table entry");
    table.set(e["state"].get<std::string>(), e["action"].get<std::string>(),
              e["value"].get<double>());
  }
}

}  // namespace

std::string serialize_qtable(const Agent& agent, const QTableMeta& meta) {
  ordered_json doc;
  doc["agent"] = to_string(agent.config().kind);
  doc["alpha"] = agent.config().alpha;
  doc["gamma"] = agent.config().gamma;
  doc["epsilon"] = {{"start", agent.config().epsilon.start},
                    {"end", agent.config().epsilon.end},
                    {"episodes", agent.config().epsilon.total_episodes}};
  doc["episodes_trained"] = meta.episodes_trained;
  doc["scenario_digest"] = meta.scenario_digest;
  doc["seed"] = meta.seed;
  doc["entries"] = entries_to_json(agent.table());
  if (agent.config().kind == AgentKind::DoubleQ)
    doc["entries_b"] = entries_to_json(agent.table_b());
  return doc.dump(2) + "\n";
}

Agent deserialize_qtable(const std::string& document, QTableMeta* meta_out) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid q-table JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("q-table document must be an object");

  for (const char* key : {"agent", "alpha", "gamma", "epsilon", "episodes_trained",
                          "scenario_digest", "seed", "entries"}) {
    if (!doc.contains(key))
      throw FormatError("q-table document missing key '" + std::string(key) + "'");
  }

  AgentConfig config;
  config.kind = agent_kind_from_string(doc["agent"].get<std::string>());
  if (!doc["alpha"].is_number() || !doc["gamma"].is_number())
    throw FormatError("alpha/gamma must be numbers");
  config.alpha = doc["alpha"].get<double>();
  config.gamma = doc["gamma"].get<double>();
  const auto& eps = doc["epsilon"];
  if (!eps.is_object() || !eps.contains("start") || !eps.contains("end") ||
      !eps.contains("episodes"))
    throw FormatError("malformed epsilon schedule");
  config.epsilon = {eps["start"].get<double>(), eps["end"].get<double>(),
                    eps["episodes"].get<int>()};

  Agent agent(config);
  entries_from_json(doc["entries"], agent.table());
  if (config.kind == AgentKind::DoubleQ) {
    if (!doc.contains("entries_b"))
      throw FormatError("double-q table document missing 'entries_b'");
    entries_from_json(doc["entries_b"], agent.table_b());
  }

  if (meta_out) {
    meta_out->config = config;
    meta_out->episodes_trained = doc["episodes_trained"].get<int>();
    meta_out->scenario_digest = doc["scenario_digest"].get<std::string>();
    meta_out->seed = doc["seed"].get<std::uint64_t>();
  }
  return agent;
}

}  // namespace cyberq::agents
