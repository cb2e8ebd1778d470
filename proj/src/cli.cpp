#include "evcs/cli.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "evcs/baselines.hpp"
#include "evcs/config.hpp"
#include "evcs/runner.hpp"
#include "evcs/trainer.hpp"

namespace evcs {

namespace fs = std::filesystem;

namespace {

constexpr uint64_t kScenarioStream = 1000000;
constexpr uint64_t kPolicyStream = 3000000;

ExperimentConfig load_or_default(const std::string& path) {
  return path.empty() ? default_config() : load_config(path);
}

void ensure_writable(const fs::path& path, bool force) {
  if (!force && fs::exists(path))
    throw ConfigError(path.string() + " already exists; pass --force to overwrite");
}

void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw MissingArtifact("cannot write " + tmp.string());
    out << std::setprecision(12);
    body(out);
    if (!out) throw MissingArtifact("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void save_net_atomic(const QNet& net, const fs::path& path, const NetMeta& meta) {
  fs::path tmp = path;
  tmp += ".tmp";
  save_net(net, tmp.string(), meta);
  fs::rename(tmp, path);
}

void save_checkpoint_atomic(const QNet& net, const QNet& target, const fs::path& path,
                            const NetMeta& meta) {
  fs::path tmp = path;
  tmp += ".tmp";
  save_checkpoint(net, target, tmp.string(), meta);
  fs::rename(tmp, path);
}

void stamp(std::ostream& out, uint64_t fingerprint, uint64_t seed) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fingerprint));
  out << "# fingerprint=" << buf << " seed=" << seed << "\n";
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<int> parse_sizes(const std::string& csv) {
  std::vector<int> out;
  for (const auto& s : split_list(csv)) {
    try {
      out.push_back(std::stoi(s));
    } catch (const std::exception&) {
      throw ConfigError("bad size list entry \"" + s + "\"");
    }
    if (out.back() <= 0) throw ConfigError("sizes must be positive");
  }
  return out;
}

std::vector<int> net_sizes(const ExperimentConfig& cfg) {
  std::vector<int> sizes;
  sizes.push_back(feature_dim(cfg.scenario.tariff) + 1);
  for (int h : cfg.train.hidden) sizes.push_back(h);
  sizes.push_back(1);
  return sizes;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  int workers = std::min<int>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::unique_ptr<Policy> make_policy(const std::string& name, const ExperimentConfig& cfg,
                                    const QNet* net) {
  if (name == "cade") {
    if (!net) throw MissingArtifact("policy cade needs trained weights");
    return std::make_unique<CadePolicy>(*net);
  }
  if (name == "grd") return std::make_unique<GrdPolicy>(true);
  if (name == "grd-novgi") return std::make_unique<GrdPolicy>(false);
  if (name == "null") return std::make_unique<NullPolicy>();
  if (name == "mpc-1h") return std::make_unique<MpcPolicy>(1.0, false, cfg.scenario.pattern);
  if (name == "mpc-2h") return std::make_unique<MpcPolicy>(2.0, false, cfg.scenario.pattern);
  if (name == "mpc-ideal-1h") return std::make_unique<MpcPolicy>(1.0, true, cfg.scenario.pattern);
  if (name == "mpc-ideal-2h") return std::make_unique<MpcPolicy>(2.0, true, cfg.scenario.pattern);
  throw ConfigError("unknown policy \"" + name +
                    "\" (expected cade, grd, grd-novgi, null, mpc-1h, mpc-2h, mpc-ideal-1h, "
                    "mpc-ideal-2h, or oracle)");
}

QNet load_weights_checked(const std::string& path, const ExperimentConfig& cfg, bool force) {
  if (!fs::exists(path))
    throw MissingArtifact("weights not found at " + path + "; run train first");
  NetMeta meta;
  QNet net = load_net(path, &meta);
  if (meta.fingerprint != cfg.fingerprint() && !force)
    throw ConfigError("weights at " + path +
                      " were trained for a different config; pass --force to use them anyway");
  return net;
}

struct TrainArgs {
  std::string config_path;
  uint64_t seed = 1;
  std::string out_dir;
  int episodes = 0;
  bool resume = false;
  bool force = false;
};

int cmd_train(const TrainArgs& args) {
  ExperimentConfig cfg = load_or_default(args.config_path);
  if (args.episodes > 0) cfg.train.episodes = args.episodes;
  fs::path out(args.out_dir);
  fs::create_directories(out);
  fs::path metrics_path = out / "fig3_training.csv";
  fs::path weights_path = out / "cade_weights.evq";
  fs::path ckpt_path = out / "cade_checkpoint.evq";

  int start_episode = 0;
  QNet resume_net, resume_target;
  const QNet* rn = nullptr;
  const QNet* rt = nullptr;
  std::vector<std::string> kept_rows;
  if (args.resume) {
    if (!fs::exists(ckpt_path))
      throw MissingArtifact("no checkpoint at " + ckpt_path.string());
    NetMeta meta;
    std::tie(resume_net, resume_target) = load_checkpoint(ckpt_path.string(), &meta);
    if (meta.fingerprint != cfg.fingerprint() && !args.force)
      throw ConfigError("checkpoint " + ckpt_path.string() +
                        " belongs to a different config; pass --force to resume anyway");
    start_episode = static_cast<int>(meta.episode);
    rn = &resume_net;
    rt = &resume_target;
    if (fs::exists(metrics_path)) {
      std::ifstream in(metrics_path);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || !std::isdigit(static_cast<unsigned char>(line[0])))
          continue;
        if (std::stoi(line) < start_episode) kept_rows.push_back(line);
      }
    }
  } else {
    ensure_writable(metrics_path, args.force);
    ensure_writable(weights_path, args.force);
    ensure_writable(ckpt_path, args.force);
  }
  if (start_episode > cfg.train.episodes)
    throw ConfigError("checkpoint already covers " + std::to_string(start_episode) +
                      " episodes; raise --episodes to continue");

  std::vector<EpisodeMetrics> rows;
  TrainHooks hooks;
  hooks.on_episode = [&](const EpisodeMetrics& m) {
    rows.push_back(m);
    if ((m.episode + 1) % 50 == 0 || m.episode + 1 == cfg.train.episodes)
      std::fprintf(stderr, "episode %d  Z=%.2f  loss=%.4f  eps=%.3f\n", m.episode + 1, m.z, m.loss,
                   m.epsilon);
  };
  TrainResult result = train(cfg.scenario, cfg.train, args.seed, hooks, start_episode, rn, rt);

  write_atomic(metrics_path, [&](std::ostream& o) {
    stamp(o, cfg.fingerprint(), args.seed);
    o << "episode,Z,B_c,B_d,C_p,C_l,loss,epsilon,lr\n";
    for (const auto& line : kept_rows) o << line << '\n';
    for (const auto& m : rows)
      o << m.episode << ',' << m.z << ',' << m.b_c << ',' << m.b_d << ',' << m.c_p << ',' << m.c_l
        << ',' << m.loss << ',' << m.epsilon << ',' << m.lr << '\n';
  });
  NetMeta meta{cfg.fingerprint(), cfg.train.episodes};
  save_net_atomic(result.net, weights_path, meta);
  save_checkpoint_atomic(result.net, result.target, ckpt_path, meta);
  std::cout << "trained " << (cfg.train.episodes - start_episode) << " episodes -> "
            << weights_path.string() << "\n";
  return 0;
}

struct EvalArgs {
  std::string config_path;
  uint64_t seed = 1;
  std::string out_dir;
  std::string policies = "cade,grd,grd-novgi,null";
  int trajectories = 30;
  std::string weights;
  bool trace = false;
  bool force = false;
};

struct EvalRow {
  std::string policy;
  uint64_t seed = 0;
  Ledger ledger;
};

EpisodeOutcome run_policy_trajectory(const ExperimentConfig& cfg, const std::string& name,
                                     const QNet* net, const std::vector<EvRequest>& requests,
                                     uint64_t traj_seed, const TraceSinks& sinks = {}) {
  Station station(cfg.scenario.station, cfg.scenario.tariff);
  std::unique_ptr<Policy> policy;
  if (name == "oracle") {
    OracleResult sched =
        oracle_solve(requests, cfg.scenario.station, cfg.scenario.tariff);
    policy = std::make_unique<SchedulePolicy>(std::move(sched));
  } else {
    policy = make_policy(name, cfg, net);
  }
  return run_episode(station, requests, *policy, mix_seed(traj_seed, kPolicyStream), sinks);
}

int cmd_eval(const EvalArgs& args) {
  ExperimentConfig cfg = load_or_default(args.config_path);
  std::vector<std::string> names = split_list(args.policies);
  if (names.empty()) throw ConfigError("empty --policy list");
  if (args.trajectories <= 0) throw ConfigError("--episodes must be positive");
  fs::path out(args.out_dir);
  fs::create_directories(out);
  fs::path profit_path = out / "fig5_profit.csv";
  ensure_writable(profit_path, args.force);
  fs::path soc_path = out / "fig4_soc.csv";
  if (args.trace) ensure_writable(soc_path, args.force);

  std::optional<QNet> net;
  for (const auto& n : names)
    if (n == "cade" && !net) {
      std::string path =
          args.weights.empty() ? (out / "cade_weights.evq").string() : args.weights;
      net = load_weights_checked(path, cfg, args.force);
    }

  int n_traj = args.trajectories;
  std::vector<std::vector<EvRequest>> streams(n_traj);
  for (int k = 0; k < n_traj; ++k) {
    Rng rng = make_rng(args.seed + k, kScenarioStream);
    streams[k] = sample_episode(cfg.scenario.pattern, cfg.scenario.station, rng);
  }

  int n_tasks = static_cast<int>(names.size()) * n_traj;
  std::vector<EvalRow> rows(n_tasks);
  parallel_for(n_tasks, [&](int task) {
    int p = task / n_traj;
    int k = task % n_traj;
    EpisodeOutcome outcome =
        run_policy_trajectory(cfg, names[p], net ? &*net : nullptr, streams[k], args.seed + k);
    rows[task] = EvalRow{names[p], args.seed + k, outcome.ledger};
  });

  write_atomic(profit_path, [&](std::ostream& o) {
    stamp(o, cfg.fingerprint(), args.seed);
    o << "policy,seed,Z,B_c,B_d,C_p,C_l\n";
    for (const auto& r : rows)
      o << r.policy << ',' << r.seed << ',' << r.ledger.profit() << ',' << r.ledger.b_charge << ','
        << r.ledger.b_discharge << ',' << r.ledger.c_penalty << ',' << r.ledger.c_demand << '\n';
  });

  if (args.trace) {
    write_atomic(soc_path, [&](std::ostream& o) {
      stamp(o, cfg.fingerprint(), args.seed);
      TraceSinks sinks;
      sinks.soc = &o;
      run_policy_trajectory(cfg, names.front(), net ? &*net : nullptr, streams.front(), args.seed,
                            sinks);
    });
  }

  for (size_t p = 0; p < names.size(); ++p) {
    double mean = 0;
    for (int k = 0; k < n_traj; ++k) mean += rows[p * n_traj + k].ledger.profit();
    mean /= n_traj;
    std::cout << names[p] << " mean Z over " << n_traj << " trajectories: " << mean << "\n";
  }
  return 0;
}

// Full occupancy from step 0 to the horizon end: every decision carries the
// whole station, so per-step latency is comparable across sizes.
std::vector<EvRequest> latency_requests(const StationConfig& cfg) {
  std::vector<EvRequest> reqs;
  int steps = cfg.total_steps();
  for (int i = 0; i < cfg.n_slots(); ++i) {
    EvRequest r;
    r.id = i;
    r.t_a = 0;
    r.t_d = steps;
    r.e_ini = cfg.e_min + (i % 7) * (cfg.e_max - cfg.e_min) / 8.0;
    double cap = std::min(cfg.e_max, r.e_ini + cfg.a_max * steps * cfg.dt_hours);
    r.e_tgt = std::min(cap, std::max(r.e_ini, 0.8 * cfg.e_max));
    reqs.push_back(r);
  }
  return reqs;
}

struct LatencyStats {
  int samples = 0;
  double mean_ms = 0;
  double max_ms = 0;
};

LatencyStats measure_latency(Policy& policy, const StationConfig& cfg, const Tariff& tariff,
                             uint64_t seed, int max_samples) {
  Station station(cfg, tariff);
  std::vector<EvRequest> reqs = latency_requests(cfg);
  station.begin_episode(reqs);
  policy.begin_episode(station, reqs, mix_seed(seed, kPolicyStream));
  LatencyStats stats;
  double total = 0;
  while (!station.done() && stats.samples < max_samples) {
    station.admit_arrivals();
    auto t0 = std::chrono::steady_clock::now();
    station.connect_set(policy.choose_connected(station));
    std::vector<double> actions = policy.choose_actions(station);
    auto t1 = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    total += ms;
    stats.max_ms = std::max(stats.max_ms, ms);
    ++stats.samples;
    station.apply_actions(actions);
    station.settle_departures();
    station.update_peak(actions);
    station.advance();
  }
  if (stats.samples > 0) stats.mean_ms = total / stats.samples;
  return stats;
}

ExperimentConfig scale_config(const ExperimentConfig& base, int n_chargers) {
  ExperimentConfig cfg = base;
  double factor = static_cast<double>(n_chargers) / base.scenario.station.n_chargers;
  cfg.scenario.station.n_chargers = n_chargers;
  cfg.scenario.station.n_waiting =
      std::max(1, static_cast<int>(std::lround(base.scenario.station.n_waiting * factor)));
  for (double& lam : cfg.scenario.pattern.lambda_by_hour) lam *= factor;
  return cfg;
}

struct BenchArgs {
  std::string config_path;
  uint64_t seed = 1;
  std::string out_dir;
  std::string sizes = "10,20,50,100";
  std::string profit_sizes = "10,20,50";
  int episodes = 800;
  int trajectories = 10;
  int samples = 100;
  bool latency_only = false;
  bool profit_only = false;
  std::string weights;
  bool force = false;
};

int cmd_bench(const BenchArgs& args) {
  ExperimentConfig base = load_or_default(args.config_path);
  fs::path out(args.out_dir);
  fs::create_directories(out);

  if (!args.profit_only) {
    fs::path latency_path = out / "table3_latency.csv";
    ensure_writable(latency_path, args.force);
    std::vector<int> sizes = parse_sizes(args.sizes);
    QNet net = args.weights.empty()
                   ? QNet::init_random(net_sizes(base), mix_seed(args.seed, 1))
                   : load_weights_checked(args.weights, base, true);

    struct Row {
      std::string policy;
      int size;
      LatencyStats stats;
    };
    std::vector<Row> rows;
    for (int size : sizes) {
      ExperimentConfig cfg = scale_config(base, size);
      {
        CadePolicy policy(net);
        rows.push_back(
            {"cade", size,
             measure_latency(policy, cfg.scenario.station, cfg.scenario.tariff, args.seed,
                             args.samples)});
      }
      {
        GrdPolicy policy(true);
        rows.push_back(
            {"grd", size,
             measure_latency(policy, cfg.scenario.station, cfg.scenario.tariff, args.seed,
                             args.samples)});
      }
      {
        int mpc_samples = size <= 20 ? 4 : size <= 50 ? 2 : 1;
        MpcPolicy policy(2.0, true, cfg.scenario.pattern);
        rows.push_back(
            {"mpc-ideal-2h", size,
             measure_latency(policy, cfg.scenario.station, cfg.scenario.tariff, args.seed,
                             mpc_samples)});
      }
      std::fprintf(stderr, "latency bench size %d done\n", size);
    }
    write_atomic(latency_path, [&](std::ostream& o) {
      stamp(o, base.fingerprint(), args.seed);
      o << "policy,n_chargers,samples,mean_ms,max_ms\n";
      for (const auto& r : rows)
        o << r.policy << ',' << r.size << ',' << r.stats.samples << ',' << r.stats.mean_ms << ','
          << r.stats.max_ms << '\n';
    });
  }

  if (!args.latency_only) {
    fs::path scale_path = out / "fig6_scale.csv";
    ensure_writable(scale_path, args.force);
    std::vector<int> sizes = parse_sizes(args.profit_sizes);
    struct Row {
      int size;
      uint64_t seed;
      Ledger ledger;
    };
    std::vector<Row> rows;
    for (int size : sizes) {
      ExperimentConfig cfg = scale_config(base, size);
      cfg.train.episodes = args.episodes;
      fs::path wpath = out / ("bench_weights_" + std::to_string(size) + ".evq");
      QNet net;
      NetMeta meta;
      bool reuse = false;
      if (fs::exists(wpath)) {
        net = load_net(wpath.string(), &meta);
        reuse = meta.fingerprint == cfg.fingerprint();
      }
      if (!reuse) {
        std::fprintf(stderr, "training size %d for %d episodes\n", size, cfg.train.episodes);
        TrainResult result = train(cfg.scenario, cfg.train, args.seed);
        net = std::move(result.net);
        save_net_atomic(net, wpath, NetMeta{cfg.fingerprint(), cfg.train.episodes});
      }
      std::vector<Row> local(args.trajectories);
      parallel_for(args.trajectories, [&](int k) {
        Rng rng = make_rng(args.seed + k, kScenarioStream);
        std::vector<EvRequest> reqs = sample_episode(cfg.scenario.pattern, cfg.scenario.station, rng);
        EpisodeOutcome outcome = run_policy_trajectory(cfg, "cade", &net, reqs, args.seed + k);
        local[k] = Row{size, args.seed + k, outcome.ledger};
      });
      rows.insert(rows.end(), local.begin(), local.end());
      std::fprintf(stderr, "profit bench size %d done\n", size);
    }
    write_atomic(scale_path, [&](std::ostream& o) {
      stamp(o, base.fingerprint(), args.seed);
      o << "n_chargers,seed,Z,Z_per_charger,B_c,B_d,C_p,C_l\n";
      for (const auto& r : rows)
        o << r.size << ',' << r.seed << ',' << r.ledger.profit() << ','
          << r.ledger.profit() / r.size << ',' << r.ledger.b_charge << ',' << r.ledger.b_discharge
          << ',' << r.ledger.c_penalty << ',' << r.ledger.c_demand << '\n';
    });
  }
  return 0;
}

struct QsweepArgs {
  std::string config_path;
  uint64_t seed = 1;
  std::string out_dir;
  std::string weights;
  std::string axis = "h_onehot";
  bool force = false;
};

// The base observation one component of which each sweep varies: a connected
// vehicle near half charge with 25 kWh still to deliver, 4 h left, an empty
// waiting area, and a quarter-scale running peak.
struct SweepBase {
  double e = 55.0;
  double e_r = 25.0;
  int t_r_steps = 16;
  WaitingAggregates wait{0, 0.0};
  double peak_frac = 0.25;
};

int middle_step_of_period(const StationConfig& cfg, const Tariff& tariff, int period) {
  std::vector<int> steps;
  for (int t = 0; t < cfg.total_steps(); ++t)
    if (cfg.period_of_step(t, tariff) == period) steps.push_back(t);
  if (steps.empty()) throw ConfigError("tariff period never occurs inside the horizon");
  return steps[steps.size() / 2];
}

int cmd_qsweep(const QsweepArgs& args) {
  ExperimentConfig cfg = load_or_default(args.config_path);
  const StationConfig& sc = cfg.scenario.station;
  const Tariff& tariff = cfg.scenario.tariff;
  if (args.weights.empty()) throw ConfigError("qsweep needs --weights");
  QNet net = load_weights_checked(args.weights, cfg, args.force);
  fs::path out(args.out_dir);
  fs::create_directories(out);
  fs::path sweep_path = out / "fig7_qsweep.csv";
  ensure_writable(sweep_path, args.force);

  Station station(sc, tariff);
  SweepBase base;
  double peak = base.peak_frac * sc.n_chargers * sc.a_max;
  int on_peak = -1;
  double best_pe = -1;
  for (int h = 0; h < tariff.n_periods(); ++h)
    if (tariff.p_e[h] > best_pe) {
      best_pe = tariff.p_e[h];
      on_peak = h;
    }
  int mid_step = middle_step_of_period(sc, tariff, on_peak == 0 ? 1 % tariff.n_periods() : 0);
  int on_step = middle_step_of_period(sc, tariff, on_peak);

  // (sweep value, features) pairs for the chosen axis
  std::vector<std::pair<double, std::vector<double>>> states;
  if (args.axis == "h_onehot") {
    for (int h = 0; h < tariff.n_periods(); ++h) {
      int step = middle_step_of_period(sc, tariff, h);
      states.emplace_back(sc.hour_of_step(step),
                          build_features(sc, tariff, true, step, base.t_r_steps, base.e, base.e_r,
                                         base.wait, peak));
    }
  } else if (args.axis == "t_r") {
    for (int t_r : {32, 24, 16, 12, 8, 4, 2, 1})
      states.emplace_back(t_r * sc.dt_hours,
                          build_features(sc, tariff, true, on_step, t_r, base.e, base.e_r,
                                         base.wait, peak));
  } else if (args.axis == "n_wait") {
    for (int n = 0; n <= sc.n_waiting; ++n)
      states.emplace_back(n, build_features(sc, tariff, true, mid_step, base.t_r_steps, base.e,
                                            base.e_r, WaitingAggregates{n, 25.0 * n}, peak));
  } else if (args.axis == "L_current") {
    for (int i = 0; i <= 8; ++i) {
      double frac = i / 8.0;
      states.emplace_back(frac, build_features(sc, tariff, true, mid_step, base.t_r_steps, base.e,
                                               base.e_r, base.wait, frac * sc.n_chargers * sc.a_max));
    }
  } else {
    throw ConfigError("unknown sweep axis \"" + args.axis +
                      "\" (expected h_onehot, t_r, n_wait, or L_current)");
  }

  ActionBounds bounds = station.feasible_for_energy(base.e);
  write_atomic(sweep_path, [&](std::ostream& o) {
    stamp(o, cfg.fingerprint(), args.seed);
    o << "axis,value,a,q,argmax\n";
    for (const auto& [value, feats] : states) {
      ArgmaxResult best = q_argmax_one(net, feats, bounds, sc.delta_a, sc.a_max);
      int count = bounds.count(sc.delta_a);
      for (int i = 0; i < count; ++i) {
        double a = bounds.at(i, sc.delta_a);
        std::vector<double> x = feats;
        x.push_back(a / sc.a_max);
        Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
        double q = net.forward_one(xv);
        o << args.axis << ',' << value << ',' << a << ',' << q << ','
          << (a == best.action ? 1 : 0) << '\n';
      }
    }
  });
  std::cout << "wrote " << sweep_path.string() << "\n";
  return 0;
}

struct OracleArgs {
  std::string config_path;
  uint64_t seed = 1;
  std::string out_dir;
  bool force = false;
};

int cmd_oracle(const OracleArgs& args) {
  ExperimentConfig cfg = load_or_default(args.config_path);
  fs::path out(args.out_dir);
  fs::create_directories(out);
  fs::path sched_path = out / "oracle_schedule.csv";
  ensure_writable(sched_path, args.force);

  Rng rng = make_rng(args.seed, kScenarioStream);
  std::vector<EvRequest> requests =
      sample_episode(cfg.scenario.pattern, cfg.scenario.station, rng);
  OracleResult result;
  try {
    result = oracle_solve(requests, cfg.scenario.station, cfg.scenario.tariff);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  Station station(cfg.scenario.station, cfg.scenario.tariff);
  SchedulePolicy policy{result};
  EpisodeOutcome outcome = run_episode(station, requests, policy, args.seed);

  write_atomic(sched_path, [&](std::ostream& o) {
    stamp(o, cfg.fingerprint(), args.seed);
    write_oracle_csv(result, o);
  });
  std::cout << "oracle profit " << result.profit << " (replayed " << outcome.ledger.profit()
            << ") over " << requests.size() << " vehicles -> " << sched_path.string() << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"EV charging station laboratory: train, evaluate, and benchmark "
               "charging policies on a simulated station"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "train the charging policy");
  train_cmd->add_option("--config", train_args.config_path, "experiment config JSON");
  train_cmd->add_option("--seed", train_args.seed, "rng seed");
  train_cmd->add_option("--out", train_args.out_dir, "output directory")->required();
  train_cmd->add_option("--episodes", train_args.episodes, "override training episode count");
  train_cmd->add_flag("--resume", train_args.resume, "continue from the saved checkpoint");
  train_cmd->add_flag("--force", train_args.force, "overwrite existing outputs");

  EvalArgs eval_args;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate policies on shared arrival streams");
  eval_cmd->add_option("--config", eval_args.config_path, "experiment config JSON");
  eval_cmd->add_option("--seed", eval_args.seed, "rng seed");
  eval_cmd->add_option("--out", eval_args.out_dir, "output directory")->required();
  eval_cmd->add_option("--policy", eval_args.policies, "comma-separated policy list");
  eval_cmd->add_option("--episodes", eval_args.trajectories, "evaluation trajectories");
  eval_cmd->add_option("--weights", eval_args.weights, "trained weight file for cade");
  eval_cmd->add_flag("--trace", eval_args.trace, "write a per-step state-of-charge trace");
  eval_cmd->add_flag("--force", eval_args.force, "overwrite existing outputs");

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand("bench", "benchmark latency and scaling");
  bench_cmd->add_option("--config", bench_args.config_path, "experiment config JSON");
  bench_cmd->add_option("--seed", bench_args.seed, "rng seed");
  bench_cmd->add_option("--out", bench_args.out_dir, "output directory")->required();
  bench_cmd->add_option("--sizes", bench_args.sizes, "charger counts for the latency table");
  bench_cmd->add_option("--profit-sizes", bench_args.profit_sizes,
                        "charger counts for the profit scaling runs");
  bench_cmd->add_option("--episodes", bench_args.episodes, "training episodes per profit size");
  bench_cmd->add_option("--trajectories", bench_args.trajectories,
                        "evaluation trajectories per profit size");
  bench_cmd->add_option("--samples", bench_args.samples, "timed steps per latency point");
  bench_cmd->add_flag("--latency-only", bench_args.latency_only, "skip the profit scaling runs");
  bench_cmd->add_flag("--profit-only", bench_args.profit_only, "skip the latency table");
  bench_cmd->add_option("--weights", bench_args.weights, "weights for the latency policy");
  bench_cmd->add_flag("--force", bench_args.force, "overwrite existing outputs");

  QsweepArgs qsweep_args;
  CLI::App* qsweep_cmd = app.add_subcommand("qsweep", "export Q-value curves along one state axis");
  qsweep_cmd->add_option("--config", qsweep_args.config_path, "experiment config JSON");
  qsweep_cmd->add_option("--seed", qsweep_args.seed, "rng seed (stamped into the output)");
  qsweep_cmd->add_option("--out", qsweep_args.out_dir, "output directory")->required();
  qsweep_cmd->add_option("--weights", qsweep_args.weights, "trained weight file")->required();
  qsweep_cmd->add_option("--axis", qsweep_args.axis, "h_onehot, t_r, n_wait, or L_current");
  qsweep_cmd->add_flag("--force", qsweep_args.force, "overwrite existing outputs");

  OracleArgs oracle_args;
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "solve one tiny episode exactly");
  oracle_cmd->add_option("--config", oracle_args.config_path, "experiment config JSON");
  oracle_cmd->add_option("--seed", oracle_args.seed, "rng seed");
  oracle_cmd->add_option("--out", oracle_args.out_dir, "output directory")->required();
  oracle_cmd->add_flag("--force", oracle_args.force, "overwrite existing outputs");

  try {
    app.parse(argc, argv);
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (eval_cmd->parsed()) return cmd_eval(eval_args);
    if (bench_cmd->parsed()) return cmd_bench(bench_args);
    if (qsweep_cmd->parsed()) return cmd_qsweep(qsweep_args);
    if (oracle_cmd->parsed()) return cmd_oracle(oracle_args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const MissingArtifact& e) {
    std::cerr << "missing artifact: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace evcs
