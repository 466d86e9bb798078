#include "coloc/experiments.hpp"

#include "coloc/parallel.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace coloc {

namespace {

constexpr std::pair<Algorithm, const char*> kAlgorithms[] = {
    {Algorithm::kSfNesterov, "sf-nesterov"},
    {Algorithm::kAdmmSf, "admm-sf"},
    {Algorithm::kAdmmNc, "admm-nc"},
    {Algorithm::kAdmmH, "admm-h"},
};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument(key + ": not a number: '" + v + "'");
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument(key + ": not an integer: '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw std::invalid_argument(key + ": not a boolean: '" + v + "'");
}

std::string flag(bool b) { return b ? "true" : "false"; }

const char* weighting_name(NeighborWeighting w) {
  return w == NeighborWeighting::kDerived ? "derived" : "swapped";
}

using Setter = std::function<void(Scenario&, const std::string&, const std::string&)>;

template <typename T>
Setter real(T Scenario::*group, double T::*field) {
  return [group, field](Scenario& s, const std::string& k, const std::string& v) {
    s.*group.*field = to_double(k, v);
  };
}
template <typename T>
Setter integer(T Scenario::*group, int T::*field) {
  return [group, field](Scenario& s, const std::string& k, const std::string& v) {
    s.*group.*field = static_cast<int>(to_integer(k, v));
  };
}
template <typename T>
Setter boolean(T Scenario::*group, bool T::*field) {
  return [group, field](Scenario& s, const std::string& k, const std::string& v) {
    s.*group.*field = to_bool(k, v);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto net = &Scenario::network;
    auto eng = &Scenario::engine;
    auto mob = &Scenario::mobility;
    t["name"] = [](Scenario& s, const std::string&, const std::string& v) { s.name = v; };
    t["dim"] = integer(net, &ScenarioConfig::dim);
    t["node_count"] = integer(net, &ScenarioConfig::node_count);
    t["anchor_count"] = integer(net, &ScenarioConfig::anchor_count);
    t["area_side"] = [](Scenario& s, const std::string& k, const std::string& v) {
      s.network.area_side = to_double(k, v);
      s.mobility.area_side = s.network.area_side;
    };
    t["radius"] = real(net, &ScenarioConfig::radius);
    t["anchor_radius"] = real(net, &ScenarioConfig::anchor_radius);
    t["min_rangings"] = integer(net, &ScenarioConfig::min_rangings);
    t["sigma"] = real(net, &ScenarioConfig::sigma);
    t["layout_seed"] = [](Scenario& s, const std::string& k, const std::string& v) {
      const long long seed = to_integer(k, v);
      if (seed < 0) throw std::invalid_argument(k + " must be non-negative");
      s.network.seed = static_cast<std::uint64_t>(seed);
    };
    t["epsilon_c"] = real(eng, &EngineConfig::epsilon_c);
    t["zeta_c"] = real(eng, &EngineConfig::zeta_c);
    t["tau_c"] = real(eng, &EngineConfig::tau_c);
    t["lambda_max"] = real(eng, &EngineConfig::lambda_max);
    t["delta_c"] = real(eng, &EngineConfig::delta_c);
    t["theta_c"] = real(eng, &EngineConfig::theta_c);
    t["max_iterations"] = integer(eng, &EngineConfig::max_iterations);
    t["newton_iterations"] = integer(eng, &EngineConfig::newton_iterations);
    t["spread_switch"] = boolean(eng, &EngineConfig::spread_switch);
    t["threads"] = integer(eng, &EngineConfig::threads);
    t["sanity_factor"] = real(eng, &EngineConfig::sanity_factor);
    t["weighting"] = [](Scenario& s, const std::string& k, const std::string& v) {
      if (v == "derived") s.engine.weighting = NeighborWeighting::kDerived;
      else if (v == "swapped") s.engine.weighting = NeighborWeighting::kSwapped;
      else throw std::invalid_argument(k + ": expected derived or swapped, got '" + v + "'");
    };
    t["mean_speed_kmh"] = real(mob, &MobilityConfig::mean_speed_kmh);
    t["speed_std_kmh"] = real(mob, &MobilityConfig::speed_std_kmh);
    t["max_speed_kmh"] = real(mob, &MobilityConfig::max_speed_kmh);
    t["step_period_s"] = real(mob, &MobilityConfig::step_period_s);
    t["heading_change_prob"] = real(mob, &MobilityConfig::heading_change_prob);
    t["iterations_per_step"] = integer(mob, &MobilityConfig::iterations_per_step);
    t["anchors_move"] = boolean(mob, &MobilityConfig::anchors_move);
    t["steps"] = [](Scenario& s, const std::string& k, const std::string& v) {
      s.steps = static_cast<int>(to_integer(k, v));
    };
    t["redraw_noise"] = [](Scenario& s, const std::string& k, const std::string& v) {
      s.redraw_noise = to_bool(k, v);
    };
    t["network_file"] = [](Scenario& s, const std::string&, const std::string& v) {
      s.network_file = v;
    };
    return t;
  }();
  return table;
}

Scenario n40(double sigma, const char* name) {
  Scenario s;
  s.name = name;
  s.network.node_count = 40;
  s.network.anchor_count = 10;
  s.network.radius = 0.4;
  s.network.sigma = sigma;
  s.network.seed = 1;
  return s;
}

void annotate(RunTrace& t, const std::vector<std::pair<std::string, std::string>>& meta) {
  for (const auto& [k, v] : meta) t.set(k, v);
}

std::string with_metadata(const std::vector<std::pair<std::string, std::string>>& meta) {
  std::string out;
  for (const auto& [k, v] : meta) out += "# " + k + "=" + v + "\n";
  return out;
}

std::optional<double> try_crlb(const Network& net, double sigma) {
  try {
    return crlb_rmse(net, sigma);
  } catch (const NotLocalizable&) {
    return std::nullopt;
  }
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

}  // namespace

const char* to_string(Algorithm alg) {
  for (const auto& [a, name] : kAlgorithms) {
    if (a == alg) return name;
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (const auto& [a, n] : kAlgorithms) {
    if (name == n) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + name + "' (valid: " + join(algorithm_names()) +
                              ")");
}

std::vector<std::string> algorithm_names() {
  std::vector<std::string> out;
  for (const auto& [a, n] : kAlgorithms) out.emplace_back(n);
  return out;
}

EngineConfig configure(Algorithm alg, EngineConfig base) {
  switch (alg) {
    case Algorithm::kSfNesterov:
    case Algorithm::kAdmmSf:
      base.hybrid = false;
      base.relaxation_only = true;
      break;
    case Algorithm::kAdmmNc:
      base.hybrid = false;
      base.relaxation_only = false;
      break;
    case Algorithm::kAdmmH:
      base.hybrid = true;
      base.relaxation_only = false;
      break;
  }
  return base;
}

std::vector<std::string> scenario_names() {
  return {"n40-sigma01", "n40-sigma001", "n500", "n1000", "tracking500"};
}

Scenario named_scenario(const std::string& name) {
  if (name == "n40-sigma01") return n40(0.1, "n40-sigma01");
  if (name == "n40-sigma001") return n40(0.01, "n40-sigma001");
  if (name == "n500" || name == "n1000") {
    const bool big = name == "n1000";
    Scenario s;
    s.name = name;
    s.network.node_count = big ? 1000 : 500;
    s.network.anchor_count = big ? 20 : 10;
    s.network.radius = big ? 0.08 : 0.1;
    s.network.sigma = big ? 0.007 : 0.02;
    s.network.seed = 1;
    s.engine.tau_c = 0.001;
    return s;
  }
  if (name == "tracking500") {
    Scenario s;
    s.name = name;
    s.network.node_count = 500;
    s.network.anchor_count = 10;
    s.network.area_side = 100.0;
    s.network.radius = 8.33;
    s.network.anchor_radius = 25.0;
    s.network.min_rangings = 4;
    s.network.sigma = 1.66;
    s.network.seed = 1;
    s.engine.tau_c = 0.2;
    s.engine.max_iterations = 20;
    s.mobility.area_side = 100.0;
    s.steps = 60;
    return s;
  }
  throw std::invalid_argument("unknown scenario '" + name + "' (known: " + join(scenario_names()) +
                              ")");
}

std::vector<std::string> setting_names() {
  std::vector<std::string> out;
  for (const auto& [k, fn] : setters()) out.push_back(k);
  return out;
}

void apply_setting(Scenario& sc, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw std::invalid_argument("unknown setting '" + key + "'");
  it->second(sc, key, value);
}

Scenario read_scenario(std::istream& in, const std::filesystem::path& origin) {
  Scenario sc;
  std::string raw;
  int line_no = 0;
  bool any_setting = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "base") {
        if (any_setting) throw std::invalid_argument("base must come before other settings");
        sc = named_scenario(value);
      } else {
        apply_setting(sc, key, value);
        any_setting = true;
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!sc.network_file.empty() && sc.network_file.is_relative() && !origin.empty()) {
    sc.network_file = origin.parent_path() / sc.network_file;
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file " + path.string());
  try {
    return read_scenario(in, path);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

Scenario resolve_scenario(const std::string& name_or_path) {
  for (const auto& n : scenario_names()) {
    if (n == name_or_path) return named_scenario(n);
  }
  if (std::filesystem::exists(name_or_path)) return load_scenario(name_or_path);
  throw std::invalid_argument("'" + name_or_path + "' is neither a scenario file nor one of: " +
                              join(scenario_names()));
}

std::vector<std::pair<std::string, std::string>> describe(const Scenario& sc) {
  const auto& n = sc.network;
  const auto& e = sc.engine;
  const auto& m = sc.mobility;
  auto num = [](double v) { return format_number(v); };
  return {
      {"scenario", sc.name},
      {"network_file", sc.network_file.string()},
      {"dim", std::to_string(n.dim)},
      {"node_count", std::to_string(n.node_count)},
      {"anchor_count", std::to_string(n.anchor_count)},
      {"area_side", num(n.area_side)},
      {"radius", num(n.radius)},
      {"anchor_radius", num(n.effective_anchor_radius())},
      {"min_rangings", std::to_string(n.min_rangings)},
      {"sigma", num(n.sigma)},
      {"layout_seed", std::to_string(n.seed)},
      {"redraw_noise", flag(sc.redraw_noise)},
      {"epsilon_c", num(e.epsilon_c)},
      {"zeta_c", num(e.zeta_c)},
      {"tau_c", num(e.tau_c)},
      {"lambda_max", num(e.lambda_max)},
      {"delta_c", num(e.delta_c)},
      {"theta_c", num(e.theta_c)},
      {"max_iterations", std::to_string(e.max_iterations)},
      {"newton_iterations", std::to_string(e.newton_iterations)},
      {"spread_switch", flag(e.spread_switch)},
      {"weighting", weighting_name(e.weighting)},
      {"sanity_factor", num(e.sanity_factor)},
      {"mean_speed_kmh", num(m.mean_speed_kmh)},
      {"speed_std_kmh", num(m.speed_std_kmh)},
      {"max_speed_kmh", num(m.max_speed_kmh)},
      {"step_period_s", num(m.step_period_s)},
      {"heading_change_prob", num(m.heading_change_prob)},
      {"iterations_per_step", std::to_string(m.iterations_per_step)},
      {"anchors_move", flag(m.anchors_move)},
      {"steps", std::to_string(sc.steps)},
  };
}

Network scenario_layout(const Scenario& sc) {
  if (!sc.network_file.empty()) return load_network(sc.network_file);
  sc.network.validate();
  Rng rng(sc.network.seed);
  return generate_network(sc.network, rng);
}

Network scenario_network(const Scenario& sc, const Network& layout, std::uint64_t seed) {
  if (sc.redraw_noise) {
    std::seed_seq seq{sc.network.seed, seed, std::uint64_t{0x6e6f697365}};
    Rng rng(seq);
    return redraw_rangings(layout, sc.network.sigma, rng);
  }
  if (!sc.network_file.empty()) return layout;
  ScenarioConfig cfg = sc.network;
  cfg.seed = seed;
  Rng rng(seed);
  return generate_network(cfg, rng);
}

void ExperimentSpec::validate() const {
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (scenario.engine.max_iterations < 0) {
    throw std::invalid_argument("max_iterations must be non-negative");
  }
  if (scenario.network_file.empty()) scenario.network.validate();
  configure(algorithm, scenario.engine).validate();
}

RunTrace run_algorithm(const Network& net, Algorithm alg, const EngineConfig& cfg, int iterations,
                       bool timing) {
  if (alg == Algorithm::kSfNesterov) {
    NesterovOptions opts;
    opts.record_timing = timing;
    return nesterov_sf(net, iterations, opts);
  }
  EngineConfig c = configure(alg, cfg);
  c.record_timing = timing;
  Engine engine(net, c);
  return engine.run(iterations);
}

StaticResult run_static(const ExperimentSpec& spec) {
  spec.validate();
  const Scenario& sc = spec.scenario;
  const Network layout = scenario_layout(sc);
  const std::size_t count = spec.seeds.size();
  const bool timing = !spec.deterministic;

  std::vector<Network> nets(count);
  for (std::size_t k = 0; k < count; ++k) nets[k] = scenario_network(sc, layout, spec.seeds[k]);

  StaticResult result;
  // The bound depends on geometry only; average it when layouts differ.
  if (sc.redraw_noise || !sc.network_file.empty()) {
    result.crlb = try_crlb(layout, sc.network.sigma);
  } else {
    double sum = 0.0;
    bool ok = true;
    for (const auto& n : nets) {
      const auto b = try_crlb(n, sc.network.sigma);
      if (!b) ok = false;
      else sum += *b;
    }
    if (ok) result.crlb = sum / static_cast<double>(count);
  }

  result.traces.resize(count);
  parallel_for(count, spec.jobs, [&](std::size_t k) {
    result.traces[k] = run_algorithm(nets[k], spec.algorithm, sc.engine, spec.iterations(), timing);
  });

  auto meta = describe(sc);
  meta.emplace_back("algorithm", to_string(spec.algorithm));
  meta.emplace_back("crlb", result.crlb ? format_number(*result.crlb) : "not-localizable");
  for (std::size_t k = 0; k < count; ++k) {
    annotate(result.traces[k], meta);
    result.traces[k].set("seed", std::to_string(spec.seeds[k]));
  }
  result.mean = average_traces(result.traces);
  annotate(result.mean, meta);

  const double crlb = result.crlb.value_or(std::numeric_limits<double>::quiet_NaN());
  const double threshold = spec.threshold > 0.0 ? spec.threshold : 2.0 * crlb;
  result.summary = compare_runs({{to_string(spec.algorithm), result.mean}}, threshold, crlb).front();

  if (!spec.output_dir.empty()) {
    const std::string alg = to_string(spec.algorithm);
    for (std::size_t k = 0; k < count; ++k) {
      save_trace_csv(result.traces[k],
                     spec.output_dir / (alg + "_seed" + std::to_string(spec.seeds[k]) + ".csv"));
    }
    save_trace_csv(result.mean, spec.output_dir / (alg + "_mean.csv"));
    auto summary_meta = meta;
    summary_meta.emplace_back("seeds", std::to_string(count));
    summary_meta.emplace_back("threshold", format_number(threshold));
    write_file_atomic(spec.output_dir / (alg + "_summary.csv"),
                      with_metadata(summary_meta) +
                          render([&](std::ostream& os) { write_summary_csv(os, {result.summary}); }));
  }
  return result;
}

std::vector<SweepCell> run_sweep(const ExperimentSpec& spec, const SweepGrid& grid) {
  spec.validate();
  if (grid.size() == 0) throw std::invalid_argument("sweep grid is empty");
  const Scenario& sc = spec.scenario;
  const Network layout = scenario_layout(sc);
  const std::size_t seeds = spec.seeds.size();
  std::vector<Network> nets(seeds);
  for (std::size_t k = 0; k < seeds; ++k) nets[k] = scenario_network(sc, layout, spec.seeds[k]);

  std::vector<SweepCell> cells;
  for (double e : grid.epsilon_c) {
    for (double z : grid.zeta_c) {
      for (double t : grid.tau_c) cells.push_back(SweepCell{e, z, t});
    }
  }

  // Flatten (cell, seed) so that parallelism does not depend on grid shape.
  std::vector<std::optional<RunTrace>> runs(cells.size() * seeds);
  parallel_for(runs.size(), spec.jobs, [&](std::size_t idx) {
    const SweepCell& cell = cells[idx / seeds];
    EngineConfig cfg = sc.engine;
    cfg.epsilon_c = cell.epsilon_c;
    cfg.zeta_c = cell.zeta_c;
    cfg.tau_c = cell.tau_c;
    try {
      runs[idx] = run_algorithm(nets[idx % seeds], spec.algorithm, cfg, spec.iterations(), false);
    } catch (const DivergenceError&) {
      runs[idx].reset();
    }
  });

  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<RunTrace> ok;
    for (std::size_t k = 0; k < seeds; ++k) {
      auto& r = runs[c * seeds + k];
      if (r) ok.push_back(std::move(*r));
      else ++cells[c].diverged;
    }
    if (ok.empty()) {
      cells[c].final_rmse = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const RunTrace mean = average_traces(ok);
    cells[c].final_rmse = mean.final_rmse();
    cells[c].plateau_iteration = plateau_iteration(mean);
  }

  if (!spec.output_dir.empty()) {
    auto meta = describe(sc);
    meta.emplace_back("algorithm", to_string(spec.algorithm));
    meta.emplace_back("seeds", std::to_string(seeds));
    write_file_atomic(spec.output_dir / (std::string(to_string(spec.algorithm)) + "_sweep.csv"),
                      render([&](std::ostream& os) { write_sweep_csv(os, cells, meta); }));
  }
  return cells;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells,
                     const std::vector<std::pair<std::string, std::string>>& metadata) {
  out << with_metadata(metadata) << kSweepColumns << '\n';
  for (const auto& c : cells) {
    out << format_number(c.epsilon_c) << ',' << format_number(c.zeta_c) << ','
        << format_number(c.tau_c) << ',' << c.plateau_iteration << ','
        << format_number(c.final_rmse) << ',' << c.diverged << '\n';
  }
}

std::vector<TrackingRow> run_tracking(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.algorithm == Algorithm::kSfNesterov) {
    throw std::invalid_argument("tracking needs a distributed algorithm (admm-sf, admm-nc, admm-h)");
  }
  const Scenario& sc = spec.scenario;
  sc.mobility.validate();
  if (sc.steps < 0) throw std::invalid_argument("steps must be non-negative");
  const EngineConfig cfg = [&] {
    EngineConfig c = configure(spec.algorithm, sc.engine);
    c.record_timing = false;
    return c;
  }();
  const int per_step = sc.mobility.iterations_per_step;
  const std::size_t seeds = spec.seeds.size();
  const std::size_t rows = static_cast<std::size_t>(sc.steps) + 1;

  std::vector<std::vector<TrackingRow>> per_seed(seeds);
  parallel_for(seeds, spec.jobs, [&](std::size_t k) {
    std::seed_seq seq{sc.network.seed, spec.seeds[k], std::uint64_t{0x747261636b}};
    Rng rng(seq);
    Network net = sc.network_file.empty() ? generate_network(sc.network, rng)
                                          : load_network(sc.network_file);
    MobilityState motion = init_mobility(net, rng);
    auto& out = per_seed[k];
    out.reserve(rows);

    WarmStart warm;
    for (std::size_t step = 0; step < rows; ++step) {
      if (step > 0) net = mobility_step(net, sc.network, sc.mobility, motion, rng);
      Engine engine = step == 0 ? Engine(net, cfg) : Engine(net, cfg, warm);
      TraceRow last;
      for (int t = 0; t < per_step; ++t) last = engine.iterate();
      warm = engine.warm_start();

      TrackingRow row;
      row.step = static_cast<int>(step);
      row.rmse = per_step > 0 ? last.rmse : rmse(engine.estimates(), net.positions);
      row.crlb = try_crlb(net, sc.network.sigma).value_or(std::numeric_limits<double>::quiet_NaN());
      row.nonconvex_frac = engine.nonconvex_fraction();
      row.extended_nodes = net.extended_nodes;
      out.push_back(row);
    }
  });

  std::vector<TrackingRow> mean(rows);
  const double inv = 1.0 / static_cast<double>(seeds);
  for (std::size_t s = 0; s < rows; ++s) {
    mean[s].step = static_cast<int>(s);
    double extended = 0.0, bound = 0.0;
    int bounded = 0;
    for (const auto& run : per_seed) {
      mean[s].rmse += run[s].rmse * inv;
      mean[s].nonconvex_frac += run[s].nonconvex_frac * inv;
      extended += run[s].extended_nodes * inv;
      if (std::isfinite(run[s].crlb)) {
        bound += run[s].crlb;
        ++bounded;
      }
    }
    // Seeds whose network is not localizable at this step have no bound.
    mean[s].crlb = bounded > 0 ? bound / bounded : std::numeric_limits<double>::quiet_NaN();
    mean[s].extended_nodes = static_cast<int>(std::lround(extended));
  }

  if (!spec.output_dir.empty()) {
    auto meta = describe(sc);
    meta.emplace_back("algorithm", to_string(spec.algorithm));
    meta.emplace_back("seeds", std::to_string(seeds));
    write_file_atomic(
        spec.output_dir / (std::string(to_string(spec.algorithm)) + "_tracking.csv"),
        render([&](std::ostream& os) { write_tracking_csv(os, mean, meta); }));
  }
  return mean;
}

void write_tracking_csv(std::ostream& out, const std::vector<TrackingRow>& rows,
                        const std::vector<std::pair<std::string, std::string>>& metadata) {
  out << with_metadata(metadata) << kTrackingColumns << '\n';
  for (const auto& r : rows) {
    out << r.step << ',' << format_number(r.rmse) << ',' << format_number(r.crlb) << ','
        << format_number(r.nonconvex_frac) << ',' << r.extended_nodes << '\n';
  }
}

}  // namespace coloc
