#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cyberq/agents.hpp"
#include "cyberq/env.hpp"

namespace cyberq::harness {

using agents::Agent;
using agents::AgentConfig;
using env::OutcomeKind;
using netmodel::ScenarioConfig;

struct TrainingParams {
  int episodes = 1;
  std::uint64_t seed = 0;
  int window = 100;  // rolling-metric width
  bool record_trajectories = false;
};

struct MetricsRecord {
  int episode = 0;
  OutcomeKind outcome = OutcomeKind::Timeout;
  int steps = 0;
  double episode_return = 0.0;
  double epsilon = 0.0;
};

struct RunSummary {
  int episodes = 0;
  double win_rate = 0.0;        // percentages in [0, 100]
  double detection_rate = 0.0;
  double timeout_rate = 0.0;
  double mean_return = 0.0;
};

struct RollingPoint {
  int episode = 0;  // window end, 0-based
  double win_rate = 0.0;
  double detection_rate = 0.0;
  double mean_return = 0.0;
};

// Plays one full episode; applies the agent's update rule after every step
// when learning. `trajectory`, when non-null, receives one JSON line per step.
MetricsRecord run_episode(const ScenarioConfig& config, Agent& agent,
                          RandomStream& rng, bool learning, double epsilon,
                          int episode_index = 0,
                          std::ostream* trajectory = nullptr);

using ProgressFn = std::function<void(int episode, int total)>;

struct TrainResult {
  Agent agent;
  std::vector<MetricsRecord> series;
  RunSummary summary;
};

// Deterministic given (config, agent_config, params.seed): one stream per
// run, consumed in a fixed order (scenario draws, per-step agent draw, env
// draws, Double-Q coin). `progress`, when set, is called every 1000 episodes.
TrainResult train(const ScenarioConfig& config, const AgentConfig& agent_config,
                  const TrainingParams& params,
                  std::ostream* trajectory = nullptr,
                  const ProgressFn& progress = nullptr);

// Greedy (or epsilon_override-greedy) measurement with no learning updates.
RunSummary evaluate(const ScenarioConfig& config, Agent& agent, int episodes,
                    double epsilon_override, std::uint64_t seed);

// Throws EmptySeriesError.
RunSummary summarize(std::span<const MetricsRecord> series);

// Sliding-window averages aligned to the window end; first point at
// episode = window - 1. Throws WindowTooLargeError.
std::vector<RollingPoint> rolling(std::span<const MetricsRecord> series,
                                  int window);

// Metrics file: CSV, one row per episode (episode,outcome,steps,return,epsilon).
std::string metrics_to_csv(std::span<const MetricsRecord> series);
std::vector<MetricsRecord> metrics_from_csv(const std::string& text);  // throws FormatError

std::string rolling_to_csv(std::span<const RollingPoint> curve);

// Summary file: JSON with full provenance.
std::string summary_to_json(const RunSummary& summary, const AgentConfig& agent,
                            const std::string& scenario_digest,
                            std::uint64_t seed);

const char* version_string();

}  // namespace cyberq::harness
