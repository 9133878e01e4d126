#include "cyberq.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "cyberq/agents.hpp"
#include "cyberq/errors.hpp"
#include "cyberq/harness.hpp"
#include "cyberq/netmodel.hpp"

using namespace cyberq;

struct cq_scenario {
  netmodel::ScenarioConfig config;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cq_status fail(cq_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Maps thrown domain errors onto the C status codes.
template <typename Fn>
cq_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const SchemaError& e) {
    return fail(CQ_ERROR_SCHEMA, e.what());
  } catch (const ValidationError& e) {
    return fail(CQ_ERROR_VALIDATION, e.what());
  } catch (const FormatError& e) {
    return fail(CQ_ERROR_FORMAT, e.what());
  } catch (const WindowTooLargeError& e) {
    return fail(CQ_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(CQ_ERROR_INTERNAL, e.what());
  }
}

bool parse_variant(const std::string& text, netmodel::Variant& out) {
  if (text == "fixed") out = netmodel::Variant::Fixed;
  else if (text == "random-start") out = netmodel::Variant::RandomStart;
  else if (text == "random-start-random-target")
    out = netmodel::Variant::RandomStartRandomTarget;
  else return false;
  return true;
}

}  // namespace

extern "C" {

const char* cq_version(void) { return harness::version_string(); }

const char* cq_last_error(void) { return g_last_error.c_str(); }

void cq_string_free(char* s) { std::free(s); }

cq_status cq_scenario_default(const char* variant, cq_scenario** out) {
  if (!variant || !out)
    return fail(CQ_ERROR_INVALID_ARGUMENT, "variant and out must be non-null");
  netmodel::Variant v;
  if (!parse_variant(variant, v))
    return fail(CQ_ERROR_INVALID_ARGUMENT,
                std::string("unknown variant '") + variant +
                    "' (expected fixed, random-start, random-start-random-target)");
  return guarded([&] {
    *out = new cq_scenario{netmodel::default_scenario(v)};
    return CQ_OK;
  });
}

cq_status cq_scenario_from_json(const char* json, cq_scenario** out) {
  if (!json || !out)
    return fail(CQ_ERROR_INVALID_ARGUMENT, "json and out must be non-null");
  return guarded([&] {
    *out = new cq_scenario{netmodel::parse_scenario(json)};
    return CQ_OK;
  });
}

cq_status cq_scenario_to_json(const cq_scenario* scenario, char** json_out) {
  if (!scenario || !json_out)
    return fail(CQ_ERROR_INVALID_ARGUMENT, "scenario and json_out must be non-null");
  return guarded([&] {
    *json_out = dup_string(netmodel::serialize_scenario(scenario->config));
    return CQ_OK;
  });
}

cq_status cq_scenario_validate(const cq_scenario* scenario, char** report_out) {
  if (!scenario || !report_out)
    return fail(CQ_ERROR_INVALID_ARGUMENT, "scenario and report_out must be non-null");
  return guarded([&] {
    std::ostringstream report;
    for (const auto& violation : netmodel::validate(scenario->config))
      report << violation << '\n';
    *report_out = dup_string(report.str());
    return CQ_OK;
  });
}

void cq_scenario_free(cq_scenario* scenario) { delete scenario; }

cq_status cq_train_options_default(const char* agent, cq_train_options* out) {
  if (!agent || !out)
    return fail(CQ_ERROR_INVALID_ARGUMENT, "agent and out must be non-null");
  return guarded([&] {
    agents::AgentKind kind = agents::agent_kind_from_string(agent);
    agents::AgentConfig config = agents::default_agent_config(kind);
    *out = {};
    out->agent = agent;
    out->episodes = agents::default_episodes(kind);
    out->alpha = config.alpha;
    out->gamma = config.gamma;
    out->epsilon_start = config.epsilon.start;
    out->epsilon_end = config.epsilon.end;
    out->seed = 0;
    out->record_trajectories = 0;
    return CQ_OK;
  });
}

cq_status cq_train(const cq_scenario* scenario, const cq_train_options* options,
                   cq_progress_fn progress, void* progress_user,
                   char** metrics_csv, char** summary_json, char** qtable_json,
                   char** trajectories_jsonl) {
  if (!scenario || !options || !options->agent)
    return fail(CQ_ERROR_INVALID_ARGUMENT, "scenario and options must be non-null");
  if (options->episodes < 1)
    return fail(CQ_ERROR_INVALID_ARGUMENT, "episodes must be at least 1");
  if (options->alpha < 0 || options->alpha > 1 || options->gamma < 0 || options->gamma > 1)
    return fail(CQ_ERROR_INVALID_ARGUMENT, "alpha and gamma must be in [0,1]");
  if (options->epsilon_start < 0 || options->epsilon_start > 1 ||
      options->epsilon_end < 0 || options->epsilon_end > 1)
    return fail(CQ_ERROR_INVALID_ARGUMENT, "epsilon must be in [0,1]");

  return guarded([&] {
    agents::AgentKind kind = agents::agent_kind_from_string(options->agent);
    agents::AgentConfig agent_config;
    agent_config.kind = kind;
    agent_config.alpha = options->alpha;
    agent_config.gamma = options->gamma;
    agent_config.epsilon = {options->epsilon_start, options->epsilon_end,
                            static_cast<int>(options->episodes)};

    harness::TrainingParams params;
    params.episodes = static_cast<int>(options->episodes);
    params.seed = options->seed;
    params.record_trajectories = options->record_trajectories != 0;

    std::ostringstream trajectory;
    harness::ProgressFn progress_fn;
    if (progress)
      progress_fn = [&](int e, int total) {
        progress(e, total, progress_user);
      };

    harness::TrainResult result = harness::train(
        scenario->config, agent_config, params,
        params.record_trajectories ? &trajectory : nullptr, progress_fn);

    std::string digest = netmodel::scenario_digest(scenario->config);
    if (metrics_csv) *metrics_csv = dup_string(harness::metrics_to_csv(result.series));
    if (summary_json)
      *summary_json = dup_string(harness::summary_to_json(
          result.summary, agent_config, digest, options->seed));
    if (qtable_json) {
      agents::QTableMeta meta{agent_config, params.episodes, digest, options->seed};
      *qtable_json = dup_string(agents::serialize_qtable(result.agent, meta));
    }
    if (trajectories_jsonl) *trajectories_jsonl = dup_string(trajectory.str());
    return CQ_OK;
  });
}

cq_status cq_evaluate(const cq_scenario* scenario, const char* qtable_json,
                      long episodes, double epsilon,
                      unsigned long long seed, char** summary_json) {
  if (!scenario || !qtable_json || !summary_json)
    return fail(CQ_ERROR_INVALID_ARGUMENT,
                "scenario, qtable_json and summary_json must be non-null");
  if (episodes < 1)
    return fail(CQ_ERROR_INVALID_ARGUMENT, "episodes must be at least 1");
  if (epsilon < 0 || epsilon > 1)
    return fail(CQ_ERROR_INVALID_ARGUMENT, "epsilon must be in [0,1]");

  return guarded([&] {
    agents::Agent agent = agents::deserialize_qtable(qtable_json);
    harness::RunSummary summary = harness::evaluate(
        scenario->config, agent, static_cast<int>(episodes), epsilon, seed);
    *summary_json = dup_string(harness::summary_to_json(
        summary, agent.config(), netmodel::scenario_digest(scenario->config), seed));
    return CQ_OK;
  });
}

cq_status cq_rolling_curve(const char* metrics_csv, long window, char** curve_csv) {
  if (!metrics_csv || !curve_csv)
    return fail(CQ_ERROR_INVALID_ARGUMENT, "metrics_csv and curve_csv must be non-null");
  if (window < 1) return fail(CQ_ERROR_INVALID_ARGUMENT, "window must be at least 1");

  return guarded([&] {
    auto series = harness::metrics_from_csv(metrics_csv);
    auto curve = harness::rolling(series, static_cast<int>(window));
    *curve_csv = dup_string(harness::rolling_to_csv(curve));
    return CQ_OK;
  });
}

}  // extern "C"
