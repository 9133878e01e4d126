#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cyberq/env.hpp"
#include "cyberq/random.hpp"

namespace cyberq::agents {

enum class AgentKind { Random, Q, NaiveQ, DoubleQ };

const char* to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& text);  // throws FormatError

// Linear schedule over episodes; constant when start == end.
struct EpsilonSchedule {
  double start = 0.2;
  double end = 0.2;
  int total_episodes = 1;
};

double epsilon_at(const EpsilonSchedule& schedule, int episode_index);

struct AgentConfig {
  AgentKind kind = AgentKind::Q;
  double alpha = 0.3;
  double gamma = 0.9;
  EpsilonSchedule epsilon;
};

// Per-agent training defaults: Q and Double-Q alpha 0.3, Naive-Q alpha 0.8,
// gamma 0.9 everywhere, epsilon 0.2 (decaying to 0.05 for Double-Q).
AgentConfig default_agent_config(AgentKind kind);
int default_episodes(AgentKind kind);  // 10000, except 5000 for Naive-Q

// Dynamically grown map from (state key, action encoding) to value.
// Absent pairs read as exactly 0 without inserting.
class QTable {
 public:
  using Key = std::pair<std::string, std::string>;

  double get(const std::string& state_key, const std::string& action) const;
  void set(const std::string& state_key, const std::string& action, double value);
  std::size_t size() const { return entries_.size(); }
  const std::map<Key, double>& entries() const { return entries_; }

 private:
  std::map<Key, double> entries_;
};

struct DoubleQTables {
  QTable table_a;
  QTable table_b;
};

// V(s) = max over the listed actions of Q(s, .); 0 when the list is empty
// (terminal states).
double state_value(const QTable& table, const std::string& state_key,
                   std::span<const std::string> valid_actions);

// Q <- Q + alpha * (r + gamma * V(s') - Q). Returns the new value.
double q_update(QTable& table, const std::string& s_key, const std::string& action,
                double reward, const std::string& next_key,
                std::span<const std::string> next_actions, double alpha,
                double gamma);

// Q <- alpha * Q + (1 - alpha) * (r + gamma * V(s')). Returns the new value.
double naive_q_update(QTable& table, const std::string& s_key,
                      const std::string& action, double reward,
                      const std::string& next_key,
                      std::span<const std::string> next_actions, double alpha,
                      double gamma);

// Cross-bootstrapped update: the selected table picks the argmax action in
// s' (tie-break: smallest encoding) and bootstraps from the other table.
// `update_a` chooses which table receives the update.
double double_q_update(DoubleQTables& tables, bool update_a,
                       const std::string& s_key, const std::string& action,
                       double reward, const std::string& next_key,
                       std::span<const std::string> next_actions, double alpha,
                       double gamma);

// Epsilon-greedy over per-action values. Callers pass values aligned with a
// list already sorted by canonical encoding, so the first maximum is the
// deterministic tie-break winner. Consumes exactly one draw when eps > 0 and
// none when eps == 0: the explore draw is reused for the uniform pick.
// Throws EmptyActionSetError.
std::size_t select_index(std::span<const double> values, double epsilon,
                         RandomStream& rng);

// One tabular learner: behavior policy plus update rule. Random ignores
// updates and always explores.
class Agent {
 public:
  explicit Agent(AgentConfig config) : config_(config) {}

  const AgentConfig& config() const { return config_; }
  QTable& table() { return tables_.table_a; }
  const QTable& table() const { return tables_.table_a; }
  QTable& table_b() { return tables_.table_b; }
  const QTable& table_b() const { return tables_.table_b; }

  // Index into `valid` (sorted by encoding). Double-Q selects on the sum of
  // both tables.
  std::size_t choose(const std::string& state_key,
                     std::span<const env::Action> valid, double epsilon,
                     RandomStream& rng) const;

  // Applies the agent's update rule for one transition; `next_actions` must
  // be empty for terminal transitions (bootstrap 0). Double-Q consumes one
  // coin draw; the other kinds consume none.
  void observe(const std::string& state_key, const env::Action& action,
               double reward, const std::string& next_key,
               std::span<const env::Action> next_actions, RandomStream& rng);

 private:
  AgentConfig config_;
  DoubleQTables tables_;
};

// Provenance stored alongside the values.
struct QTableMeta {
  AgentConfig config;
  int episodes_trained = 0;
  std::string scenario_digest;
  std::uint64_t seed = 0;
};

std::string serialize_qtable(const Agent& agent, const QTableMeta& meta);

// Throws FormatError on malformed input.
Agent deserialize_qtable(const std::string& document, QTableMeta* meta_out = nullptr);

}  // namespace cyberq::agents
