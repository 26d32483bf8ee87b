#pragma once

// JSON encoding of MDPs (see docs/formats.md):
//
//   {"S": 2, "A": 1, "H": 1,
//    "P": [[[[0.5, 0.5]], [[0.0, 1.0]]]],      // [H][S][A][S]
//    "r": [[[0.0], [1.0]]],                      // [H][S][A]
//    "initial_state_rule": {"kind": "fixed", "state": 0}}
//
// The rule may also be one of the strings "fixed", "cyclic", "seeded-random".

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "rsrl/errors.hpp"
#include "rsrl/mdp.hpp"
#include "rsrl/risk_dp.hpp"

namespace rsrl {

using json = nlohmann::json;

inline json rule_to_json(const InitialStateRule& rule) {
  switch (rule.kind) {
    case InitialStateKind::kFixed:
      return {{"kind", "fixed"}, {"state", rule.state}};
    case InitialStateKind::kCyclic:
      return {{"kind", "cyclic"}};
    case InitialStateKind::kSeededRandom:
      return {{"kind", "seeded-random"}};
  }
  return {};
}

inline InitialStateRule rule_from_json(const json& j) {
  std::string kind;
  int state = 0;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else if (j.is_object() && j.contains("kind") && j["kind"].is_string()) {
    kind = j["kind"].get<std::string>();
    if (j.contains("state")) {
      if (!j["state"].is_number_integer()) {
        throw ValidationError("initial_state_rule.state must be an integer");
      }
      state = j["state"].get<int>();
    }
  } else {
    throw ValidationError("initial_state_rule must be a string or {\"kind\": ...}");
  }
  if (kind == "fixed") return InitialStateRule::fixed(state);
  if (kind == "cyclic") return InitialStateRule::cyclic();
  if (kind == "seeded-random") return InitialStateRule::seeded_random();
  throw ValidationError("unknown initial_state_rule '" + kind + "'");
}

inline json mdp_to_json(const EpisodicMDP& mdp) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  const int H = mdp.horizon();
  json P = json::array();
  json r = json::array();
  for (int h = 0; h < H; ++h) {
    json Ph = json::array();
    json rh = json::array();
    for (int s = 0; s < S; ++s) {
      json Ps = json::array();
      json rs = json::array();
      for (int a = 0; a < A; ++a) {
        const auto row = mdp.row(h, s, a);
        Ps.push_back(json(std::vector<double>(row.begin(), row.end())));
        rs.push_back(mdp.r(h, s, a));
      }
      Ph.push_back(std::move(Ps));
      rh.push_back(std::move(rs));
    }
    P.push_back(std::move(Ph));
    r.push_back(std::move(rh));
  }
  return {{"S", S}, {"A", A}, {"H", H}, {"P", std::move(P)}, {"r", std::move(r)},
          {"initial_state_rule", rule_to_json(mdp.initial_state_rule())}};
}

namespace detail {

inline int positive_int(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 1) {
    throw ValidationError(std::string("MDP field '") + key + "' must be a positive integer");
  }
  return j[key].get<int>();
}

inline const json& sized_array(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n) {
    throw ValidationError(where + " must be an array of length " + std::to_string(n));
  }
  return j;
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + " must be a number");
  return j.get<double>();
}

}  // namespace detail

// Shape-checks, optionally renormalizes rows, then runs validate().
inline EpisodicMDP mdp_from_json(const json& j, bool renormalize_rows = false) {
  if (!j.is_object()) throw ValidationError("MDP document must be a JSON object");
  const int S = detail::positive_int(j, "S");
  const int A = detail::positive_int(j, "A");
  const int H = detail::positive_int(j, "H");
  if (!j.contains("P") || !j.contains("r")) throw ValidationError("MDP needs 'P' and 'r'");
  EpisodicMDP mdp(S, A, H);
  const auto& P = detail::sized_array(j["P"], H, "P");
  const auto& r = detail::sized_array(j["r"], H, "r");
  for (int h = 0; h < H; ++h) {
    const std::string ph = "P[" + std::to_string(h) + "]";
    const std::string rh = "r[" + std::to_string(h) + "]";
    detail::sized_array(P[h], S, ph);
    detail::sized_array(r[h], S, rh);
    for (int s = 0; s < S; ++s) {
      const std::string ps = ph + "[" + std::to_string(s) + "]";
      const std::string rs = rh + "[" + std::to_string(s) + "]";
      detail::sized_array(P[h][s], A, ps);
      detail::sized_array(r[h][s], A, rs);
      for (int a = 0; a < A; ++a) {
        const std::string pa = ps + "[" + std::to_string(a) + "]";
        detail::sized_array(P[h][s][a], S, pa);
        for (int s2 = 0; s2 < S; ++s2) {
          mdp.P(h, s, a, s2) = detail::number(P[h][s][a][s2], pa);
        }
        mdp.r(h, s, a) = detail::number(r[h][s][a], rs);
      }
    }
  }
  if (j.contains("initial_state_rule")) {
    mdp.set_initial_state_rule(rule_from_json(j["initial_state_rule"]));
  }
  if (renormalize_rows) renormalize(mdp);
  validate(mdp);
  return mdp;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline EpisodicMDP load_mdp(const std::string& path, bool renormalize_rows = false) {
  return mdp_from_json(read_json_file(path), renormalize_rows);
}

inline void save_mdp(const EpisodicMDP& mdp, const std::string& path) {
  write_text_file(path, mdp_to_json(mdp).dump(2) + "\n");
}

inline json solution_to_json(const OptimalSolution& sol, double beta) {
  const auto& v = sol.values;
  json V = json::array();
  json Q = json::array();
  json pi = json::array();
  for (int h = 0; h <= v.horizon(); ++h) {
    const auto vs = v.V_step(h);
    V.push_back(std::vector<double>(vs.begin(), vs.end()));
    json Qh = json::array();
    for (int s = 0; s < v.num_states(); ++s) {
      const auto q = v.Q_row(h, s);
      Qh.push_back(std::vector<double>(q.begin(), q.end()));
    }
    Q.push_back(std::move(Qh));
    if (h < v.horizon()) {
      const auto a = sol.policy.step(h);
      pi.push_back(std::vector<int>(a.begin(), a.end()));
    }
  }
  return {{"beta", beta}, {"V", std::move(V)}, {"Q", std::move(Q)}, {"policy", std::move(pi)}};
}

}  // namespace rsrl
