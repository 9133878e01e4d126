#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "cyberq/agents.hpp"
#include "cyberq/errors.hpp"
#include "oracles.hpp"

using namespace cyberq;
using namespace cyberq::agents;

TEST_CASE("epsilon schedule") {
  EpsilonSchedule constant{0.2, 0.2, 10000};
  CHECK(epsilon_at(constant, 0) == 0.2);
  CHECK(epsilon_at(constant, 5000) == 0.2);

  EpsilonSchedule decay{0.2, 0.05, 10000};
  CHECK(epsilon_at(decay, 0) == doctest::Approx(0.2));
  CHECK(epsilon_at(decay, 9999) == doctest::Approx(0.05));
  CHECK(epsilon_at(decay, 50000) == doctest::Approx(0.05));  // clamped
  CHECK(epsilon_at(decay, 4999) > epsilon_at(decay, 5000));
}

TEST_CASE("q-table reads of absent keys never insert") {
  QTable table;
  CHECK(table.get("s", "a") == 0.0);
  CHECK(table.size() == 0);
  table.set("s", "a", 1.5);
  table.set("s", "a", 2.5);
  table.set("s", "b", -1.0);
  CHECK(table.size() == 2);
  CHECK(table.get("s", "a") == 2.5);
}

TEST_CASE("state value is the max over listed actions, 0 when terminal") {
  QTable table;
  std::vector<std::string> actions = {"a", "b", "c"};
  CHECK(state_value(table, "s", actions) == 0.0);
  table.set("s", "a", -1.0);
  table.set("s", "b", 3.0);
  table.set("s", "c", 2.0);
  CHECK(state_value(table, "s", actions) == 3.0);
  CHECK(state_value(table, "s", {}) == 0.0);
}

TEST_CASE("q update examples") {
  std::vector<std::string> next = {"x"};

  SUBCASE("zero step size leaves the value unchanged") {
    QTable table;
    table.set("s", "a", 4.0);
    CHECK(q_update(table, "s", "a", -1.0, "s2", next, 0.0, 0.9) == 4.0);
  }
  SUBCASE("direct substitution") {
    QTable table;
    CHECK(q_update(table, "s", "a", -1.0, "s2", next, 0.3, 0.9) ==
          doctest::Approx(-0.3));
  }
}

TEST_CASE("q update converges to the value-iteration fixed point on a chain") {
  // 3-state deterministic chain with rewards {-1, -1, +10}.
  oracle::TinyMdp mdp;
  mdp.actions = {{{1, -1.0}}, {{2, -1.0}}, {{-1, 10.0}}};
  const double gamma = 0.9;
  std::vector<double> oracle_values = oracle::value_iteration(mdp, gamma);

  QTable table;
  std::vector<std::string> keys = {"s0", "s1", "s2"};
  std::vector<std::string> only = {"advance"};
  for (int sweep = 0; sweep < 2000; ++sweep) {
    for (int s = 0; s < 3; ++s) {
      const auto& t = mdp.actions[s][0];
      std::span<const std::string> next_actions =
          t.next < 0 ? std::span<const std::string>{} : std::span<const std::string>(only);
      q_update(table, keys[s], "advance", t.reward,
               t.next < 0 ? "terminal" : keys[t.next], next_actions, 0.3, gamma);
    }
  }
  for (int s = 0; s < 3; ++s)
    CHECK(std::abs(table.get(keys[s], "advance") - oracle_values[s]) < 1e-6);
}

TEST_CASE("naive q update examples") {
  std::vector<std::string> next = {"x"};

  SUBCASE("alpha 1 keeps the old value") {
    QTable table;
    table.set("s", "a", 4.0);
    CHECK(naive_q_update(table, "s", "a", -1.0, "s2", next, 1.0, 0.9) == 4.0);
  }
  SUBCASE("alpha 0 jumps to the target") {
    QTable table;
    table.set("s", "a", 4.0);
    CHECK(naive_q_update(table, "s", "a", -1.0, "s2", next, 0.0, 0.9) ==
          doctest::Approx(-1.0));
  }
  SUBCASE("direct substitution") {
    QTable table;
    CHECK(naive_q_update(table, "s", "a", -1.0, "s2", next, 0.8, 0.9) ==
          doctest::Approx(-0.2));
  }
}

TEST_CASE("naive update with 1-alpha is identical to the standard update") {
  RandomStream rng(31);
  std::vector<std::string> next = {"n1", "n2", "n3"};
  for (int i = 0; i < 1000; ++i) {
    double q0 = rng.next_unit() * 20 - 10;
    double reward = rng.next_unit() * 20 - 10;
    double alpha = rng.next_unit();
    double gamma = rng.next_unit();

    QTable standard, naive;
    standard.set("s", "a", q0);
    naive.set("s", "a", q0);
    for (const auto& n : next) {
      double v = rng.next_unit() * 10 - 5;
      standard.set("s2", n, v);
      naive.set("s2", n, v);
    }
    double lhs = q_update(standard, "s", "a", reward, "s2", next, alpha, gamma);
    double rhs = naive_q_update(naive, "s", "a", reward, "s2", next, 1.0 - alpha, gamma);
    // The identity is algebraic; the two forms differ by floating-point
    // rounding of the same value, so compare to machine precision.
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("q update is a contraction toward the sample target") {
  RandomStream rng(8);
  for (int i = 0; i < 200; ++i) {
    double q0 = rng.next_unit() * 20 - 10;
    double reward = rng.next_unit() * 20 - 10;
    double alpha = rng.next_unit();
    double gamma = rng.next_unit();
    QTable table;
    table.set("s", "a", q0);
    double target = reward;  // terminal next state: V = 0
    double updated = q_update(table, "s", "a", reward, "t", {}, alpha, gamma);
    CHECK(std::abs(updated - target) ==
          doctest::Approx((1.0 - alpha) * std::abs(q0 - target)));
  }
}

TEST_CASE("double q update") {
  std::vector<std::string> next = {"n1", "n2"};

  SUBCASE("selected table moves, the other is untouched") {
    DoubleQTables tables;
    double v = double_q_update(tables, true, "s", "a", -1.0, "s2", next, 0.3, 0.9);
    CHECK(v == doctest::Approx(-0.3));
    CHECK(tables.table_a.get("s", "a") == doctest::Approx(-0.3));
    CHECK(tables.table_b.size() == 0);
  }
  SUBCASE("the coin swaps which table changes, symmetrically") {
    DoubleQTables tables;
    double v = double_q_update(tables, false, "s", "a", -1.0, "s2", next, 0.3, 0.9);
    CHECK(v == doctest::Approx(-0.3));
    CHECK(tables.table_b.get("s", "a") == doctest::Approx(-0.3));
    CHECK(tables.table_a.size() == 0);
  }
  SUBCASE("argmax is chosen by the updated table, value by the other") {
    DoubleQTables tables;
    tables.table_a.set("s2", "n1", 5.0);   // A's argmax
    tables.table_a.set("s2", "n2", 1.0);
    tables.table_b.set("s2", "n1", 2.0);   // B supplies the bootstrap
    tables.table_b.set("s2", "n2", 100.0);
    double v = double_q_update(tables, true, "s", "a", 0.0, "s2", next, 1.0, 1.0);
    CHECK(v == doctest::Approx(2.0));
  }
  SUBCASE("ties break toward the smallest encoding") {
    DoubleQTables tables;
    tables.table_b.set("s2", "n1", 7.0);
    tables.table_b.set("s2", "n2", -7.0);
    // All-zero A table: every next action ties; n1 must win.
    double v = double_q_update(tables, true, "s", "a", 0.0, "s2", next, 1.0, 1.0);
    CHECK(v == doctest::Approx(7.0));
  }
  SUBCASE("with mirrored tables the update equals the single-q update") {
    DoubleQTables tables;
    QTable single;
    for (const auto& [key, value] :
         std::vector<std::pair<std::string, double>>{{"n1", 2.0}, {"n2", 4.0}}) {
      tables.table_a.set("s2", key, value);
      tables.table_b.set("s2", key, value);
      single.set("s2", key, value);
    }
    double lhs = double_q_update(tables, true, "s", "a", -1.0, "s2", next, 0.3, 0.9);
    double rhs = q_update(single, "s", "a", -1.0, "s2", next, 0.3, 0.9);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("action selection") {
  SUBCASE("pure greedy picks the best value and consumes no draws") {
    RandomStream a(5), b(5);
    std::vector<double> values = {1.0, 2.0};
    CHECK(select_index(values, 0.0, a) == 1);
    CHECK(a.next_unit() == b.next_unit());
  }
  SUBCASE("epsilon 1 is uniform") {
    RandomStream rng(77);
    std::vector<double> values = {0.0, 0.0, 0.0};
    int counts[3] = {0, 0, 0};
    const int n = 30000;
    for (int i = 0; i < n; ++i) counts[select_index(values, 1.0, rng)]++;
    for (int c : counts) {
      double freq = 100.0 * c / n;
      CHECK(freq > 31.8);
      CHECK(freq < 34.8);
    }
  }
  SUBCASE("greedy ties break toward the first (smallest encoding)") {
    RandomStream rng(1);
    std::vector<double> values = {3.0, 3.0, 3.0};
    CHECK(select_index(values, 0.0, rng) == 0);
  }
  SUBCASE("exactly one draw is consumed when exploring is possible") {
    RandomStream a(9), b(9);
    std::vector<double> values = {1.0, 0.0};
    select_index(values, 0.2, a);
    b.next_unit();
    CHECK(a.next_unit() == b.next_unit());
  }
  SUBCASE("argmax is invariant under a constant shift") {
    RandomStream rng(3);
    std::vector<double> values = {0.4, -2.0, 1.5, 1.1};
    std::vector<double> shifted;
    for (double v : values) shifted.push_back(v + 123.0);
    CHECK(select_index(values, 0.0, rng) == select_index(shifted, 0.0, rng));
  }
  SUBCASE("empty action set throws") {
    RandomStream rng(0);
    CHECK_THROWS_AS(select_index({}, 0.0, rng), EmptyActionSetError);
  }
}

TEST_CASE("per-agent training defaults") {
  AgentConfig q = default_agent_config(AgentKind::Q);
  CHECK(q.alpha == 0.3);
  CHECK(q.gamma == 0.9);
  CHECK(q.epsilon.start == 0.2);
  CHECK(q.epsilon.end == 0.2);
  CHECK(default_episodes(AgentKind::Q) == 10000);

  AgentConfig naive = default_agent_config(AgentKind::NaiveQ);
  CHECK(naive.alpha == 0.8);
  CHECK(default_episodes(AgentKind::NaiveQ) == 5000);

  AgentConfig dq = default_agent_config(AgentKind::DoubleQ);
  CHECK(dq.alpha == 0.3);
  CHECK(dq.epsilon.start == 0.2);
  CHECK(dq.epsilon.end == 0.05);
  CHECK(default_episodes(AgentKind::DoubleQ) == 10000);
}

TEST_CASE("q-table serialization round-trips") {
  SUBCASE("empty table") {
    Agent agent(default_agent_config(AgentKind::Q));
    QTableMeta meta{agent.config(), 0, "digest", 1};
    std::string doc = serialize_qtable(agent, meta);
    QTableMeta back;
    Agent restored = deserialize_qtable(doc, &back);
    CHECK(restored.table().size() == 0);
    CHECK(back.scenario_digest == "digest");
    CHECK(back.seed == 1);
  }
  SUBCASE("values round-trip bit-exactly") {
    Agent agent(default_agent_config(AgentKind::Q));
    agent.table().set("s1", "a", 0.1 + 0.2);
    agent.table().set("s1", "b", -42.0);
    agent.table().set("s2", "a", 1e-17);
    QTableMeta meta{agent.config(), 100, "d", 7};
    Agent restored = deserialize_qtable(serialize_qtable(agent, meta));
    for (const auto& [key, value] : agent.table().entries())
      CHECK(restored.table().get(key.first, key.second) == value);
    CHECK(restored.table().size() == 3);
  }
  SUBCASE("double-q stores both tables") {
    Agent agent(default_agent_config(AgentKind::DoubleQ));
    agent.table().set("s", "a", 1.0);
    agent.table_b().set("s", "a", 2.0);
    QTableMeta meta{agent.config(), 1, "d", 0};
    Agent restored = deserialize_qtable(serialize_qtable(agent, meta));
    CHECK(restored.table().get("s", "a") == 1.0);
    CHECK(restored.table_b().get("s", "a") == 2.0);
  }
  SUBCASE("malformed documents are rejected") {
    CHECK_THROWS_AS(deserialize_qtable("{\"agent\":"), FormatError);
    CHECK_THROWS_AS(deserialize_qtable("{}"), FormatError);
    CHECK_THROWS_AS(deserialize_qtable("[]"), FormatError);
  }
}
