#include "cyberq/harness.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "cyberq/errors.hpp"
#include "json.hpp"

namespace cyberq::harness {

using agents::AgentKind;
using env::Action;
using env::AttackerState;
using env::StepOutcome;
using nlohmann::ordered_json;

const char* version_string() { return "cyberq 0.1.0"; }

MetricsRecord run_episode(const ScenarioConfig& config, Agent& agent,
                          RandomStream& rng, bool learning, double epsilon,
                          int episode_index, std::ostream* trajectory) {
  AttackerState state = env::initial_state(config, rng);
  double episode_return = 0.0;
  OutcomeKind outcome = OutcomeKind::Timeout;

  std::vector<Action> valid = env::valid_actions(config, state);
  std::string state_key = env::canonical_key(state);

  while (true) {
    std::size_t choice = agent.choose(state_key, valid, epsilon, rng);
    const Action action = valid[choice];

    StepOutcome out = env::step(config, state, action, rng);
    episode_return += out.reward;

    std::vector<Action> next_valid;
    std::string next_key = env::canonical_key(out.next_state);
    if (!out.terminal) next_valid = env::valid_actions(config, out.next_state);

    if (learning)
      agent.observe(state_key, action, out.reward, next_key, next_valid, rng);

    if (trajectory) {
      ordered_json line = {{"episode", episode_index},
                           {"step", out.next_state.steps_taken - 1},
                           {"state", state_key},
                           {"action", action.encoding},
                           {"detected", out.detected},
                           {"success", out.success},
                           {"reward", out.reward},
                           {"outcome", env::to_string(out.kind)}};
      *trajectory << line.dump() << '\n';
    }

    state = std::move(out.next_state);
    if (out.terminal) {
      outcome = out.kind;
      break;
    }
    valid = std::move(next_valid);
    state_key = std::move(next_key);
  }

  return {episode_index, outcome, state.steps_taken, episode_return, epsilon};
}

TrainResult train(const ScenarioConfig& config, const AgentConfig& agent_config,
                  const TrainingParams& params, std::ostream* trajectory,
                  const ProgressFn& progress) {
  Agent agent(agent_config);
  RandomStream rng(params.seed);
  std::vector<MetricsRecord> series;
  series.reserve(static_cast<std::size_t>(params.episodes));

  for (int e = 0; e < params.episodes; ++e) {
    double eps = agent_config.kind == AgentKind::Random
                     ? 1.0
                     : agents::epsilon_at(agent_config.epsilon, e);
    series.push_back(run_episode(config, agent, rng, /*learning=*/true, eps, e,
                                 params.record_trajectories ? trajectory : nullptr));
    if (progress && (e + 1) % 1000 == 0) progress(e + 1, params.episodes);
  }

  RunSummary summary = summarize(series);
  return {std::move(agent), std::move(series), summary};
}

RunSummary evaluate(const ScenarioConfig& config, Agent& agent, int episodes,
                    double epsilon_override, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<MetricsRecord> series;
  series.reserve(static_cast<std::size_t>(episodes));
  for (int e = 0; e < episodes; ++e)
    series.push_back(
        run_episode(config, agent, rng, /*learning=*/false, epsilon_override, e));
  return summarize(series);
}

RunSummary summarize(std::span<const MetricsRecord> series) {
  if (series.empty()) throw EmptySeriesError("cannot summarize an empty series");

  int wins = 0, detections = 0;
  double total_return = 0.0;
  for (const auto& rec : series) {
    wins += rec.outcome == OutcomeKind::Win;
    detections += rec.outcome == OutcomeKind::Detected;
    total_return += rec.episode_return;
  }
  auto n = static_cast<double>(series.size());
  RunSummary summary;
  summary.episodes = static_cast<int>(series.size());
  summary.win_rate = 100.0 * wins / n;
  summary.detection_rate = 100.0 * detections / n;
  summary.timeout_rate = 100.0 - summary.win_rate - summary.detection_rate;
  summary.mean_return = total_return / n;
  return summary;
}

std::vector<RollingPoint> rolling(std::span<const MetricsRecord> series, int window) {
  if (window < 1 || static_cast<std::size_t>(window) > series.size())
    throw WindowTooLargeError("window exceeds series length");

  std::vector<RollingPoint> curve;
  curve.reserve(series.size() - window + 1);
  int wins = 0, detections = 0;
  double sum_return = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    wins += series[i].outcome == OutcomeKind::Win;
    detections += series[i].outcome == OutcomeKind::Detected;
    sum_return += series[i].episode_return;
    if (i + 1 >= static_cast<std::size_t>(window)) {
      if (i + 1 > static_cast<std::size_t>(window)) {
        const auto& old = series[i - window];
        wins -= old.outcome == OutcomeKind::Win;
        detections -= old.outcome == OutcomeKind::Detected;
        sum_return -= old.episode_return;
      }
      curve.push_back({static_cast<int>(i), 100.0 * wins / window,
                       100.0 * detections / window, sum_return / window});
    }
  }
  return curve;
}

namespace {

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

std::string metrics_to_csv(std::span<const MetricsRecord> series) {
  std::ostringstream out;
  out << "episode,outcome,steps,return,epsilon\n";
  for (const auto& rec : series) {
    out << rec.episode << ',' << env::to_string(rec.outcome) << ',' << rec.steps
        << ',' << format_double(rec.episode_return) << ','
        << format_double(rec.epsilon) << '\n';
  }
  return out.str();
}

std::vector<MetricsRecord> metrics_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "episode,outcome,steps,return,epsilon")
    throw FormatError("bad metrics header");

  std::vector<MetricsRecord> series;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 5) throw FormatError("bad metrics row: " + line);
    try {
      series.push_back({std::stoi(fields[0]), env::outcome_from_string(fields[1]),
                        std::stoi(fields[2]), std::stod(fields[3]),
                        std::stod(fields[4])});
    } catch (const std::logic_error&) {
      throw FormatError("bad metrics row: " + line);
    }
  }
  return series;
}

std::string rolling_to_csv(std::span<const RollingPoint> curve) {
  std::ostringstream out;
  out << "episode,win_rate,detection_rate,mean_return\n";
  for (const auto& p : curve) {
    out << p.episode << ',' << format_double(p.win_rate) << ','
        << format_double(p.detection_rate) << ',' << format_double(p.mean_return)
        << '\n';
  }
  return out.str();
}

std::string summary_to_json(const RunSummary& summary, const AgentConfig& agent,
                            const std::string& scenario_digest,
                            std::uint64_t seed) {
  ordered_json doc;
  doc["episodes"] = summary.episodes;
  doc["win_rate"] = summary.win_rate;
  doc["detection_rate"] = summary.detection_rate;
  doc["timeout_rate"] = summary.timeout_rate;
  doc["mean_return"] = summary.mean_return;
  doc["agent"] = {{"kind", agents::to_string(agent.kind)},
                  {"alpha", agent.alpha},
                  {"gamma", agent.gamma},
                  {"epsilon", {{"start", agent.epsilon.start},
                               {"end", agent.epsilon.end},
                               {"episodes", agent.epsilon.total_episodes}}}};
  doc["scenario_digest"] = scenario_digest;
  doc["seed"] = seed;
  doc["version"] = version_string();
  return doc.dump(2) + "\n";
}

}  // namespace cyberq::harness
