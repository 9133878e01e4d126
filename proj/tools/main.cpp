// cyberq command-line tool: scenario generation, agent training, greedy
// evaluation, and learning-curve export. Talks to the core only through the
// C API in cyberq.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cyberq.h"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;

struct StringGuard {
  char* value = nullptr;
  ~StringGuard() { cq_string_free(value); }
};

struct ScenarioGuard {
  cq_scenario* value = nullptr;
  ~ScenarioGuard() { cq_scenario_free(value); }
};

int status_to_exit(cq_status status) {
  switch (status) {
    case CQ_OK: return kExitOk;
    case CQ_ERROR_SCHEMA:
    case CQ_ERROR_VALIDATION: return kExitValidation;
    default: return kExitUsage;
  }
}

int report(cq_status status) {
  std::cerr << "error: " << cq_last_error() << "\n";
  return status_to_exit(status);
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return true;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return out.good();
}

int load_scenario(const std::string& path, ScenarioGuard& scenario) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "error: cannot read scenario file '" << path << "'\n";
    return kExitUsage;
  }
  cq_status status = cq_scenario_from_json(text.c_str(), &scenario.value);
  if (status != CQ_OK) return report(status);
  return kExitOk;
}

void print_summary_line(const std::string& summary_json) {
  auto doc = nlohmann::json::parse(summary_json);
  std::printf(
      "agent=%s episodes=%d win_rate=%.2f%% detection_rate=%.2f%% "
      "timeout_rate=%.2f%% mean_return=%.2f\n",
      doc["agent"]["kind"].get<std::string>().c_str(), doc["episodes"].get<int>(),
      doc["win_rate"].get<double>(), doc["detection_rate"].get<double>(),
      doc["timeout_rate"].get<double>(), doc["mean_return"].get<double>());
}

void progress_to_stderr(long episode, long total, void*) {
  std::fprintf(stderr, "episode %ld/%ld\n", episode, total);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cyber-attack reinforcement-learning workbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cq_version());

  // scenario
  auto* scenario_cmd = app.add_subcommand("scenario", "Write a default scenario file");
  std::string variant = "fixed";
  std::string scenario_out;
  scenario_cmd->add_option("--variant", variant, "fixed, random-start, or random-start-random-target");
  scenario_cmd->add_option("--out", scenario_out, "Output path (default stdout)");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train an agent on a scenario");
  std::string train_scenario, agent = "q";
  long episodes = 0;
  double alpha = 0, gamma = 0, epsilon = 0, epsilon_end = 0;
  unsigned long long seed = 0;
  std::string metrics_out, summary_out, qtable_out, trajectories_out;
  bool quiet = false;
  train_cmd->add_option("--scenario", train_scenario, "Scenario file")->required();
  train_cmd->add_option("--agent", agent, "random, q, naive-q, or double-q");
  auto* episodes_opt = train_cmd->add_option("--episodes", episodes, "Training episodes");
  auto* alpha_opt = train_cmd->add_option("--alpha", alpha, "Learning rate");
  auto* gamma_opt = train_cmd->add_option("--gamma", gamma, "Discount factor");
  auto* epsilon_opt = train_cmd->add_option("--epsilon", epsilon, "Exploration rate (start)");
  auto* epsilon_end_opt = train_cmd->add_option("--epsilon-end", epsilon_end, "Final exploration rate");
  train_cmd->add_option("--seed", seed, "Random seed");
  train_cmd->add_option("--metrics-out", metrics_out, "Per-episode metrics CSV");
  train_cmd->add_option("--summary-out", summary_out, "Run summary JSON");
  train_cmd->add_option("--qtable-out", qtable_out, "Learned Q-table JSON");
  train_cmd->add_option("--trajectories-out", trajectories_out, "Per-step trajectory log (JSON lines)");
  train_cmd->add_flag("--quiet", quiet, "Suppress progress output");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a trained Q-table without learning");
  std::string eval_scenario, qtable_path, eval_summary_out;
  long eval_episodes = 10000;
  double eval_epsilon = 0.0;
  bool greedy = false;
  unsigned long long eval_seed = 0;
  eval_cmd->add_option("--scenario", eval_scenario, "Scenario file")->required();
  eval_cmd->add_option("--qtable", qtable_path, "Q-table file from train")->required();
  eval_cmd->add_option("--episodes", eval_episodes, "Evaluation episodes");
  eval_cmd->add_option("--epsilon", eval_epsilon, "Exploration override (default 0)");
  eval_cmd->add_flag("--greedy", greedy, "Force epsilon 0");
  eval_cmd->add_option("--seed", eval_seed, "Random seed");
  eval_cmd->add_option("--summary-out", eval_summary_out, "Run summary JSON");
  bool eval_quiet = false;
  eval_cmd->add_flag("--quiet", eval_quiet, "Suppress the summary line");

  // plot-data
  auto* plot_cmd = app.add_subcommand("plot-data", "Export a rolling learning curve");
  std::string plot_metrics, plot_out;
  long window = 100;
  plot_cmd->add_option("--metrics", plot_metrics, "Metrics CSV from train")->required();
  plot_cmd->add_option("--window", window, "Rolling window width");
  plot_cmd->add_option("--out", plot_out, "Output curve CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (scenario_cmd->parsed()) {
    ScenarioGuard scenario;
    cq_status status = cq_scenario_default(variant.c_str(), &scenario.value);
    if (status != CQ_OK) return report(status);
    StringGuard json;
    status = cq_scenario_to_json(scenario.value, &json.value);
    if (status != CQ_OK) return report(status);
    if (scenario_out.empty()) {
      std::cout << json.value;
    } else if (!write_file(scenario_out, json.value)) {
      std::cerr << "error: cannot write '" << scenario_out << "'\n";
      return kExitUsage;
    }
    return kExitOk;
  }

  if (train_cmd->parsed()) {
    ScenarioGuard scenario;
    if (int rc = load_scenario(train_scenario, scenario); rc != kExitOk) return rc;

    cq_train_options options;
    cq_status status = cq_train_options_default(agent.c_str(), &options);
    if (status != CQ_OK) return report(status);

    if (agent == "random" && (alpha_opt->count() || gamma_opt->count()))
      std::cerr << "warning: --alpha/--gamma are ignored for the random agent\n";
    if (agent != "random") {
      if (alpha_opt->count()) options.alpha = alpha;
      if (gamma_opt->count()) options.gamma = gamma;
      if (epsilon_opt->count()) {
        options.epsilon_start = epsilon;
        options.epsilon_end = epsilon;
      }
      if (epsilon_end_opt->count()) options.epsilon_end = epsilon_end;
    }
    if (episodes_opt->count()) options.episodes = episodes;
    options.seed = seed;
    options.record_trajectories = !trajectories_out.empty();

    StringGuard metrics, summary, qtable, trajectories;
    status = cq_train(scenario.value, &options,
                      quiet ? nullptr : progress_to_stderr, nullptr,
                      &metrics.value, &summary.value, &qtable.value,
                      options.record_trajectories ? &trajectories.value : nullptr);
    if (status != CQ_OK) return report(status);

    if (!metrics_out.empty() && !write_file(metrics_out, metrics.value)) {
      std::cerr << "error: cannot write '" << metrics_out << "'\n";
      return kExitUsage;
    }
    if (!summary_out.empty() && !write_file(summary_out, summary.value)) {
      std::cerr << "error: cannot write '" << summary_out << "'\n";
      return kExitUsage;
    }
    if (!qtable_out.empty() && !write_file(qtable_out, qtable.value)) {
      std::cerr << "error: cannot write '" << qtable_out << "'\n";
      return kExitUsage;
    }
    if (!trajectories_out.empty() && !write_file(trajectories_out, trajectories.value)) {
      std::cerr << "error: cannot write '" << trajectories_out << "'\n";
      return kExitUsage;
    }
    print_summary_line(summary.value);
    return kExitOk;
  }

  if (eval_cmd->parsed()) {
    ScenarioGuard scenario;
    if (int rc = load_scenario(eval_scenario, scenario); rc != kExitOk) return rc;

    std::string qtable_text;
    if (!read_file(qtable_path, qtable_text)) {
      std::cerr << "error: cannot read q-table file '" << qtable_path << "'\n";
      return kExitUsage;
    }
    if (greedy) eval_epsilon = 0.0;

    StringGuard summary;
    cq_status status = cq_evaluate(scenario.value, qtable_text.c_str(),
                                   eval_episodes, eval_epsilon, eval_seed,
                                   &summary.value);
    if (status != CQ_OK) return report(status);
    if (!eval_summary_out.empty() && !write_file(eval_summary_out, summary.value)) {
      std::cerr << "error: cannot write '" << eval_summary_out << "'\n";
      return kExitUsage;
    }
    if (!eval_quiet) print_summary_line(summary.value);
    return kExitOk;
  }

  if (plot_cmd->parsed()) {
    std::string metrics_text;
    if (!read_file(plot_metrics, metrics_text)) {
      std::cerr << "error: cannot read metrics file '" << plot_metrics << "'\n";
      return kExitUsage;
    }
    StringGuard curve;
    cq_status status = cq_rolling_curve(metrics_text.c_str(), window, &curve.value);
    if (status != CQ_OK) return report(status);
    if (!write_file(plot_out, curve.value)) {
      std::cerr << "error: cannot write '" << plot_out << "'\n";
      return kExitUsage;
    }
    return kExitOk;
  }

  return kExitUsage;
}
