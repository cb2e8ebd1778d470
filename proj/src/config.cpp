#include "evcs/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace evcs {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown config field \"" + where + "." + it.key() + "\"");
}

template <typename T>
void maybe(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field \"") + key + "\" has the wrong type");
  }
}

void parse_tariff(const json& obj, Tariff& t) {
  reject_unknown(obj, "tariff",
                 {"periods", "p_e", "p_c", "p_d", "p_l", "billing_period_hours"});
  if (obj.contains("periods")) {
    t.periods.clear();
    for (const auto& p : obj.at("periods")) {
      reject_unknown(p, "tariff.periods[]", {"label", "start_hour", "end_hour"});
      TouPeriod w;
      maybe(p, "label", w.label);
      maybe(p, "start_hour", w.start_hour);
      maybe(p, "end_hour", w.end_hour);
      t.periods.push_back(w);
    }
  }
  maybe(obj, "p_e", t.p_e);
  maybe(obj, "p_c", t.p_c);
  maybe(obj, "p_d", t.p_d);
  maybe(obj, "p_l", t.p_l);
  maybe(obj, "billing_period_hours", t.billing_period_hours);
}

void parse_pattern(const json& obj, ArrivalPattern& p) {
  reject_unknown(obj, "pattern",
                 {"name", "lambda_by_hour", "dwell_mean", "dwell_std", "e_ini_mean", "e_ini_std",
                  "e_tgt_mean", "e_tgt_std"});
  if (obj.contains("name")) {
    std::string name = obj.at("name").get<std::string>();
    p = ArrivalPattern::builtin(name);
  }
  if (obj.contains("lambda_by_hour")) {
    auto v = obj.at("lambda_by_hour").get<std::vector<double>>();
    if (v.size() != 24) throw ConfigError("pattern.lambda_by_hour needs exactly 24 entries");
    std::copy(v.begin(), v.end(), p.lambda_by_hour.begin());
  }
  maybe(obj, "dwell_mean", p.dwell_mean);
  maybe(obj, "dwell_std", p.dwell_std);
  maybe(obj, "e_ini_mean", p.e_ini_mean);
  maybe(obj, "e_ini_std", p.e_ini_std);
  maybe(obj, "e_tgt_mean", p.e_tgt_mean);
  maybe(obj, "e_tgt_std", p.e_tgt_std);
}

void parse_station(const json& obj, StationConfig& s) {
  reject_unknown(obj, "station",
                 {"n_chargers", "n_waiting", "e_min", "e_max", "a_min", "a_max", "delta_a", "mu",
                  "horizon_hours", "dt_hours", "episode_start_hour"});
  maybe(obj, "n_chargers", s.n_chargers);
  maybe(obj, "n_waiting", s.n_waiting);
  maybe(obj, "e_min", s.e_min);
  maybe(obj, "e_max", s.e_max);
  maybe(obj, "a_min", s.a_min);
  maybe(obj, "a_max", s.a_max);
  maybe(obj, "delta_a", s.delta_a);
  maybe(obj, "mu", s.mu);
  maybe(obj, "horizon_hours", s.horizon_hours);
  maybe(obj, "dt_hours", s.dt_hours);
  maybe(obj, "episode_start_hour", s.episode_start_hour);
}

void parse_train(const json& obj, TrainConfig& t) {
  reject_unknown(obj, "train",
                 {"gamma", "lr_initial", "lr_halving_episodes", "target_sync_episodes",
                  "batch_size", "replay_capacity", "epsilon_initial", "epsilon_min",
                  "epsilon_decay_fraction", "episodes", "hidden"});
  maybe(obj, "gamma", t.gamma);
  maybe(obj, "lr_initial", t.lr_initial);
  maybe(obj, "lr_halving_episodes", t.lr_halving_episodes);
  maybe(obj, "target_sync_episodes", t.target_sync_episodes);
  maybe(obj, "batch_size", t.batch_size);
  maybe(obj, "replay_capacity", t.replay_capacity);
  maybe(obj, "epsilon_initial", t.epsilon_initial);
  maybe(obj, "epsilon_min", t.epsilon_min);
  maybe(obj, "epsilon_decay_fraction", t.epsilon_decay_fraction);
  maybe(obj, "episodes", t.episodes);
  maybe(obj, "hidden", t.hidden);
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.scenario.tariff = Tariff::standard_three_period();
  cfg.scenario.pattern = ArrivalPattern::builtin("office");
  cfg.scenario.station = StationConfig{};
  cfg.train = TrainConfig{};
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown(root, "", {"tariff", "pattern", "station", "train"});

  ExperimentConfig cfg = default_config();
  try {
    if (root.contains("tariff")) parse_tariff(root.at("tariff"), cfg.scenario.tariff);
    if (root.contains("pattern")) parse_pattern(root.at("pattern"), cfg.scenario.pattern);
    if (root.contains("station")) parse_station(root.at("station"), cfg.scenario.station);
    if (root.contains("train")) parse_train(root.at("train"), cfg.train);
    cfg.scenario.tariff.validate();
    cfg.scenario.pattern.validate();
    cfg.scenario.station.validate();
    cfg.train.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string ExperimentConfig::canonical_json() const {
  json root;
  json tj;
  for (const auto& p : scenario.tariff.periods)
    tj["periods"].push_back(
        {{"label", p.label}, {"start_hour", p.start_hour}, {"end_hour", p.end_hour}});
  tj["p_e"] = scenario.tariff.p_e;
  tj["p_c"] = scenario.tariff.p_c;
  tj["p_d"] = scenario.tariff.p_d;
  tj["p_l"] = scenario.tariff.p_l;
  tj["billing_period_hours"] = scenario.tariff.billing_period_hours;
  root["tariff"] = tj;

  json pj;
  pj["name"] = scenario.pattern.name;
  pj["lambda_by_hour"] = scenario.pattern.lambda_by_hour;
  pj["dwell_mean"] = scenario.pattern.dwell_mean;
  pj["dwell_std"] = scenario.pattern.dwell_std;
  pj["e_ini_mean"] = scenario.pattern.e_ini_mean;
  pj["e_ini_std"] = scenario.pattern.e_ini_std;
  pj["e_tgt_mean"] = scenario.pattern.e_tgt_mean;
  pj["e_tgt_std"] = scenario.pattern.e_tgt_std;
  root["pattern"] = pj;

  json sj;
  sj["n_chargers"] = scenario.station.n_chargers;
  sj["n_waiting"] = scenario.station.n_waiting;
  sj["e_min"] = scenario.station.e_min;
  sj["e_max"] = scenario.station.e_max;
  sj["a_min"] = scenario.station.a_min;
  sj["a_max"] = scenario.station.a_max;
  sj["delta_a"] = scenario.station.delta_a;
  sj["mu"] = scenario.station.mu;
  sj["horizon_hours"] = scenario.station.horizon_hours;
  sj["dt_hours"] = scenario.station.dt_hours;
  sj["episode_start_hour"] = scenario.station.episode_start_hour;
  root["station"] = sj;

  json trj;
  trj["gamma"] = train.gamma;
  trj["lr_initial"] = train.lr_initial;
  trj["lr_halving_episodes"] = train.lr_halving_episodes;
  trj["target_sync_episodes"] = train.target_sync_episodes;
  trj["batch_size"] = train.batch_size;
  trj["replay_capacity"] = train.replay_capacity;
  trj["epsilon_initial"] = train.epsilon_initial;
  trj["epsilon_min"] = train.epsilon_min;
  trj["epsilon_decay_fraction"] = train.epsilon_decay_fraction;
  trj["hidden"] = train.hidden;
  root["train"] = trj;
  return root.dump();
}

uint64_t ExperimentConfig::fingerprint() const {
  std::string s = canonical_json();
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace evcs
