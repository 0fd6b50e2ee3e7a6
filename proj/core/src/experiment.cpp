// Copyright 2026 The dripalm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dripalm/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>
#include <type_traits>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dripalm/baselines.hpp"
#include "dripalm/metrics.hpp"
#include "dripalm/random.hpp"
#include "dripalm/ripalm.hpp"

namespace dripalm {

namespace pt = boost::property_tree;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

// Accepts plain decimals and base^exponent.
std::optional<double> parse_double(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  const auto caret = s.find('^');
  if (caret != std::string::npos) {
    auto base = parse_double(s.substr(0, caret));
    auto exponent = parse_double(s.substr(caret + 1));
    if (!base || !exponent) return std::nullopt;
    return std::pow(*base, *exponent);
  }
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<long long> parse_integer(const std::string& text) {
  const std::string s = trim(text);
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    return std::nullopt;
  }
  return v;
}

// Typed access to one INI section, remembering which keys were read so that
// leftovers can be reported.
class Section {
 public:
  Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

  bool present() const { return tree_ != nullptr; }

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    if (!tree_) return std::nullopt;
    auto child = tree_->get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!child) return std::nullopt;
    return trim(child->data());
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(name_ + "." + key + ": " + what);
  }

  void real(const std::string& key, double& out) {
    if (auto s = raw(key)) {
      auto v = parse_double(*s);
      if (!v) fail(key, "expected a number, got '" + *s + "'");
      out = *v;
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (auto s = raw(key)) {
      auto v = parse_integer(*s);
      if (!v) fail(key, "expected an integer, got '" + *s + "'");
      out = static_cast<Int>(*v);
    }
  }

  void reals(const std::string& key, std::vector<double>& out) {
    if (auto s = raw(key)) {
      std::vector<double> values;
      for (const auto& item : split(*s, ',')) {
        auto v = parse_double(item);
        if (!v) fail(key, "expected a comma-separated list of numbers, got '" + item + "'");
        values.push_back(*v);
      }
      if (values.empty()) fail(key, "empty list");
      out = std::move(values);
    }
  }

  void text(const std::string& key, std::string& out) {
    if (auto s = raw(key)) out = *s;
  }

  void check_unknown() const {
    if (!tree_) return;
    for (const auto& [key, _] : *tree_) {
      if (!used_.count(key)) fail(key, "unknown key");
    }
  }

 private:
  std::string name_;
  const pt::ptree* tree_;
  std::set<std::string> used_;
};

std::vector<TopologySpec> parse_topologies(Section& s) {
  std::string kinds = "erdos_renyi";
  double probability = 0.2;
  std::optional<double> radius;
  s.text("kinds", kinds);
  s.real("probability", probability);
  if (auto r = s.raw("radius")) {
    auto v = parse_double(*r);
    if (!v || !(*v > 0.0)) s.fail("radius", "expected a positive number, got '" + *r + "'");
    radius = *v;
  }
  if (!(probability > 0.0 && probability <= 1.0)) {
    s.fail("probability", "must lie in (0, 1]");
  }
  std::vector<TopologySpec> out;
  for (const auto& name : split(kinds, ',')) {
    TopologyKind kind;
    try {
      kind = parse_topology_kind(name);
    } catch (const std::exception&) {
      s.fail("kinds", "unknown topology '" + name + "'");
    }
    TopologySpec spec;
    spec.kind = kind;
    spec.probability = probability;
    spec.radius = radius;
    out.push_back(spec);
  }
  if (out.empty()) s.fail("kinds", "no topology given");
  return out;
}

void check_positive(Section& s, const std::string& key, double v) {
  if (!(v > 0.0)) s.fail(key, "must be positive");
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in, const std::string& source) {
  const std::string text(std::istreambuf_iterator<char>(in), {});
  pt::ptree tree;
  try {
    std::istringstream body(text);
    pt::ini_parser::read_ini(body, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  // The ini reader drops sections without keys; a bare [nids] still selects
  // the solver with its defaults.
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    line = trim(line);
    if (line.size() < 2 || line.front() != '[' || line.back() != ']') continue;
    const pt::ptree::path_type path(trim(line.substr(1, line.size() - 2)), '\0');
    if (!tree.get_child_optional(path)) tree.put_child(path, pt::ptree());
  }
  static const std::set<std::string> kSections = {"experiment", "problem", "topology",
                                                  "dripalm",    "ideal",   "pg_extra",
                                                  "nids"};
  for (const auto& [name, child] : tree) {
    if (!kSections.count(name)) throw ConfigError(source + ": unknown section [" + name + "]");
    if (!child.data().empty() && child.empty()) {
      throw ConfigError(source + ": key '" + name + "' outside of any section");
    }
  }
  auto section = [&](const std::string& name) {
    auto child = tree.get_child_optional(name);
    return Section(name, child ? &*child : nullptr);
  };

  ExperimentConfig c;
  try {
    Section e = section("experiment");
    e.text("name", c.name);
    e.integer("repetitions", c.repetitions);
    e.integer("seed_base", c.seed_base);
    e.integer("max_comm", c.max_comm);
    e.real("kkt_tol", c.kkt_tol);
    e.integer("check_every", c.check_every);
    e.check_unknown();
    if (c.repetitions < 1) e.fail("repetitions", "must be at least 1");
    if (c.max_comm <= 0) e.fail("max_comm", "must be positive");
    if (!(c.kkt_tol >= 0.0)) e.fail("kkt_tol", "must be nonnegative");
    if (c.check_every <= 0) e.fail("check_every", "must be positive");

    Section p = section("problem");
    if (!p.present()) throw ConfigError("problem: section is required");
    std::string family = "logreg";
    p.text("family", family);
    try {
      c.family = parse_problem_family(family);
    } catch (const std::exception&) {
      p.fail("family", "expected logreg or lasso, got '" + family + "'");
    }
    if (c.family == ProblemFamily::kCustom) p.fail("family", "expected logreg or lasso");
    if (c.family == ProblemFamily::kLasso) {
      c.agents = 20;
      c.samples = 200;
    }
    p.integer("agents", c.agents);
    p.integer("dim", c.dim);
    p.integer("samples", c.samples);
    if (c.family == ProblemFamily::kLogistic) {
      p.real("lambda", c.lambda);
      p.real("label_noise", c.label_noise);
      check_positive(p, "lambda", c.lambda);
    } else {
      p.reals("lambda_c", c.lambda_c);
      p.real("density", c.density);
      p.real("noise", c.noise);
      for (double v : c.lambda_c) check_positive(p, "lambda_c", v);
      if (!(c.density > 0.0 && c.density <= 1.0)) p.fail("density", "must lie in (0, 1]");
    }
    p.check_unknown();
    if (c.agents < 2) p.fail("agents", "need at least 2 agents");
    if (c.dim < 1) p.fail("dim", "must be positive");
    if (c.samples < c.agents) p.fail("samples", "need at least one sample per agent");

    Section t = section("topology");
    if (t.present()) c.topologies = parse_topologies(t);
    t.check_unknown();

    if (Section s = section("dripalm"); s.present()) {
      DripalmSweep d;
      s.reals("rho", d.rho);
      s.real("tau", d.tau);
      s.real("sigma_growth", d.sigma_growth);
      s.real("sigma_cap", d.sigma_cap);
      s.integer("max_outer", d.max_outer);
      s.integer("max_inner", d.max_inner);
      s.check_unknown();
      for (double r : d.rho) {
        if (!(r > 0.0 && r < 1.0)) s.fail("rho", "values must lie in (0, 1)");
      }
      check_positive(s, "tau", d.tau);
      check_positive(s, "sigma_growth", d.sigma_growth);
      check_positive(s, "sigma_cap", d.sigma_cap);
      if (d.max_outer < 1) s.fail("max_outer", "must be positive");
      if (d.max_inner < 1) s.fail("max_inner", "must be positive");
      c.dripalm = d;
    }
    if (Section s = section("ideal"); s.present()) {
      if (c.family != ProblemFamily::kLogistic) {
        throw ConfigError("ideal: needs a strongly convex smooth problem (family logreg)");
      }
      IdealSweep d;
      s.reals("eps0", d.eps0);
      s.reals("alpha", d.alpha);
      s.real("sigma_growth", d.sigma_growth);
      s.real("sigma_cap", d.sigma_cap);
      s.integer("max_outer", d.max_outer);
      s.integer("max_inner", d.max_inner);
      s.check_unknown();
      for (double v : d.eps0) check_positive(s, "eps0", v);
      for (double v : d.alpha) {
        if (!(v > 0.0 && v < 1.0)) s.fail("alpha", "values must lie in (0, 1)");
      }
      check_positive(s, "sigma_growth", d.sigma_growth);
      check_positive(s, "sigma_cap", d.sigma_cap);
      if (d.max_outer < 1) s.fail("max_outer", "must be positive");
      if (d.max_inner < 1) s.fail("max_inner", "must be positive");
      c.ideal = d;
    }
    for (const char* name : {"pg_extra", "nids"}) {
      Section s = section(name);
      if (!s.present()) continue;
      SingleLoopSweep d;
      if (auto v = s.raw("step")) {
        if (*v != "auto") {
          auto step = parse_double(*v);
          if (!step || !(*step > 0.0)) s.fail("step", "expected 'auto' or a positive number");
          d.step = *step;
        }
      }
      s.check_unknown();
      (std::string(name) == "nids" ? c.nids : c.pg_extra) = d;
    }
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  if (!c.dripalm && !c.ideal && !c.pg_extra && !c.nids) {
    throw ConfigError(source + ": no solver section given");
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_experiment_config(in, path.string());
}

namespace {

std::function<double(int)> capped_growth(double growth, double cap) {
  return [growth, cap](int k) { return std::min(std::pow(growth, k), cap); };
}

// One solver setting of the sweep.
struct SolverJob {
  std::string solver;
  std::string param;
  std::function<SolveResult(const ProblemInstance&, SimNetwork&)> run;
};

std::vector<SolverJob> solver_jobs(const ExperimentConfig& c) {
  std::vector<SolverJob> jobs;
  if (c.dripalm) {
    const DripalmSweep d = *c.dripalm;
    for (double rho : d.rho) {
      DripalmConfig cfg;
      cfg.rho = rho;
      cfg.tau = [tau = d.tau](int) { return tau; };
      cfg.sigma = capped_growth(d.sigma_growth, d.sigma_cap);
      cfg.max_outer = d.max_outer;
      cfg.max_total_comm = c.max_comm;
      cfg.kkt_tol = c.kkt_tol;
      cfg.subsolver.max_inner = d.max_inner;
      jobs.push_back({"dripalm", "rho=" + format_number(rho),
                      [cfg](const ProblemInstance& p, SimNetwork& net) {
                        return run_dripalm(cfg, p, net);
                      }});
    }
  }
  if (c.ideal) {
    const IdealSweep d = *c.ideal;
    for (double eps0 : d.eps0) {
      for (double alpha : d.alpha) {
        BaselineConfig cfg;
        cfg.kind = BaselineKind::kIdeal;
        cfg.eps0 = eps0;
        cfg.eps_decay = alpha;
        cfg.sigma = capped_growth(d.sigma_growth, d.sigma_cap);
        cfg.max_outer = d.max_outer;
        cfg.subsolver.max_inner = d.max_inner;
        cfg.max_comm = c.max_comm;
        cfg.kkt_tol = c.kkt_tol;
        jobs.push_back({"ideal",
                        "eps0=" + format_number(eps0) + ";alpha=" + format_number(alpha),
                        [cfg](const ProblemInstance& p, SimNetwork& net) {
                          return run_baseline(p, net, cfg);
                        }});
      }
    }
  }
  auto single = [&](const std::optional<SingleLoopSweep>& s, BaselineKind kind) {
    if (!s) return;
    BaselineConfig cfg;
    cfg.kind = kind;
    cfg.step = s->step;
    cfg.max_comm = c.max_comm;
    cfg.kkt_tol = c.kkt_tol;
    cfg.check_every = c.check_every;
    jobs.push_back({to_string(kind), s->step ? "step=" + format_number(*s->step) : "step=auto",
                    [cfg](const ProblemInstance& p, SimNetwork& net) {
                      return run_baseline(p, net, cfg);
                    }});
  };
  single(c.pg_extra, BaselineKind::kPgExtra);
  single(c.nids, BaselineKind::kNids);
  return jobs;
}

struct Scenario {
  TopologySpec topology;
  double lambda_c = 0.0;
  std::string label;
};

std::vector<Scenario> scenarios(const ExperimentConfig& c) {
  std::vector<Scenario> out;
  for (const auto& topo : c.topologies) {
    const std::string base = "topology=" + to_string(topo.kind);
    if (c.family == ProblemFamily::kLasso) {
      for (double lc : c.lambda_c) {
        out.push_back({topo, lc, base + ";lambda_c=" + format_number(lc)});
      }
    } else {
      out.push_back({topo, 0.0, base + ";lambda=" + format_number(c.lambda)});
    }
  }
  return out;
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

ResultRow mean_of(const std::vector<const ResultRow*>& group) {
  ResultRow m;
  m.solver = group.front()->solver;
  m.param1 = group.front()->param1;
  m.param2 = group.front()->param2;
  m.replicate = "mean";
  const double n = static_cast<double>(group.size());
  int converged = 0;
  bool same_status = true;
  for (const ResultRow* r : group) {
    m.vector_rounds += r->vector_rounds;
    m.scalar_rounds += r->scalar_rounds;
    m.outer_iters += r->outer_iters;
    m.kkt += r->kkt;
    m.consensus_res += r->consensus_res;
    m.stationarity_res += r->stationarity_res;
    m.wall_time_ms += r->wall_time_ms;
    converged += r->status == "converged";
    same_status = same_status && r->status == group.front()->status;
  }
  m.vector_rounds /= n;
  m.scalar_rounds /= n;
  m.outer_iters /= n;
  m.kkt /= n;
  m.consensus_res /= n;
  m.stationarity_res /= n;
  m.wall_time_ms /= n;
  m.status = same_status ? group.front()->status
                         : "mixed:" + std::to_string(converged) + "/" +
                               std::to_string(group.size()) + "_converged";
  return m;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const RunOptions& options) {
  const std::vector<SolverJob> jobs = solver_jobs(config);
  const std::vector<Scenario> scens = scenarios(config);
  const std::uint64_t seed_base = options.seed.value_or(config.seed_base);
  const int reps = config.repetitions;

  // results[scenario][job][replicate]
  std::vector<std::vector<std::vector<ResultRow>>> results(
      scens.size(), std::vector<std::vector<ResultRow>>(
                        jobs.size(), std::vector<ResultRow>(static_cast<std::size_t>(reps))));
  std::mutex log_mutex;
  auto log = [&](const std::string& line) {
    if (!options.log) return;
    std::lock_guard lock(log_mutex);
    *options.log << line << '\n';
  };

  // A task is one replicate: every scenario and solver shares its data.
  auto run_replicate = [&](int r) {
    const std::uint64_t seed = seed_base + static_cast<std::uint64_t>(r);
    ProblemInstance logreg;
    ProblemInstance lasso_data;
    if (config.family == ProblemFamily::kLogistic) {
      logreg = gen_logreg({config.agents, config.dim, config.samples, config.lambda,
                           config.label_noise, seed});
    } else {
      lasso_data = gen_lasso({config.agents, config.dim, config.samples,
                              config.lambda_c.front(), config.density, config.noise, seed});
    }
    for (std::size_t s = 0; s < scens.size(); ++s) {
      const Scenario& sc = scens[s];
      ProblemInstance lasso;
      if (config.family == ProblemFamily::kLasso) {
        lasso = make_lasso_problem(lasso_data.meta.data, lasso_data.meta.targets,
                                   sc.lambda_c, seed);
        lasso.meta.x_true = lasso_data.meta.x_true;
      }
      const ProblemInstance& problem =
          config.family == ProblemFamily::kLogistic ? logreg : lasso;
      const Graph graph = build_topology(sc.topology, config.agents, derive_seed(seed, 1));
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        ResultRow& row = results[s][j][static_cast<std::size_t>(r)];
        row.solver = jobs[j].solver;
        row.param1 = jobs[j].param;
        row.param2 = sc.label;
        row.replicate = std::to_string(r);
        SimNetwork net = make_metropolis_network(graph, config.dim);
        const auto start = std::chrono::steady_clock::now();
        try {
          const SolveResult res = jobs[j].run(problem, net);
          row.vector_rounds = static_cast<double>(res.vector_rounds);
          row.scalar_rounds = static_cast<double>(res.scalar_rounds);
          row.outer_iters = res.outer_iters;
          row.kkt = res.final_kkt.kkt;
          row.consensus_res = res.final_kkt.consensus_res;
          row.stationarity_res = res.final_kkt.stationarity_res;
          row.status = to_string(res.status);
          if (!res.message.empty()) log(row.solver + " " + row.param1 + ": " + res.message);
        } catch (const std::exception& e) {
          row.status = "error";
          log(row.solver + " " + row.param1 + " " + row.param2 + " replicate " +
              row.replicate + " failed: " + sanitize(e.what()));
        }
        if (options.wall_time) {
          row.wall_time_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
        }
        log(row.solver + " " + row.param1 + " " + row.param2 + " replicate " +
            row.replicate + ": " + row.status + ", " + format_number(row.vector_rounds) +
            " rounds, kkt " + format_number(row.kkt));
      }
    }
  };

  const int workers = std::clamp(options.jobs, 1, reps);
  if (workers == 1) {
    for (int r = 0; r < reps; ++r) run_replicate(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int r = next++; r < reps; r = next++) run_replicate(r);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<ResultRow> rows;
  for (auto& per_scenario : results) {
    for (auto& group : per_scenario) {
      std::vector<const ResultRow*> ptrs;
      for (auto& row : group) {
        rows.push_back(row);
        ptrs.push_back(&row);
      }
      rows.push_back(mean_of(ptrs));
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.solver << ',' << r.param1 << ',' << r.param2 << ',' << r.replicate << ','
        << format_number(r.vector_rounds) << ',' << format_number(r.scalar_rounds) << ','
        << format_number(r.outer_iters) << ',' << format_number(r.kkt) << ','
        << format_number(r.consensus_res) << ',' << format_number(r.stationarity_res)
        << ',' << format_number(r.wall_time_ms) << ',' << r.status << '\n';
  }
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_csv(out, rows);
  return out.str();
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  int lineno = 1;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  if (trim(line) != kCsvHeader) throw std::runtime_error("csv:1: unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    auto fail = [&](const std::string& what) {
      throw std::runtime_error("csv:" + std::to_string(lineno) + ": " + what);
    };
    if (f.size() != 12) fail("expected 12 fields, got " + std::to_string(f.size()));
    ResultRow r;
    r.solver = f[0];
    r.param1 = f[1];
    r.param2 = f[2];
    r.replicate = f[3];
    double* numbers[] = {&r.vector_rounds, &r.scalar_rounds,    &r.outer_iters,
                         &r.kkt,           &r.consensus_res,    &r.stationarity_res,
                         &r.wall_time_ms};
    for (std::size_t k = 0; k < 7; ++k) {
      const std::string& s = f[4 + k];
      if (s == "nan") {
        *numbers[k] = std::nan("");
      } else if (auto v = parse_double(s); v && s.find('^') == std::string::npos) {
        *numbers[k] = *v;
      } else {
        fail("field " + std::to_string(5 + k) + " is not a number: '" + s + "'");
      }
    }
    r.status = f[11];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> recompute_means(const std::vector<ResultRow>& rows) {
  std::vector<std::tuple<std::string, std::string, std::string>> order;
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<const ResultRow*>>
      groups;
  for (const auto& r : rows) {
    if (r.replicate == "mean") continue;
    auto key = std::make_tuple(r.param2, r.solver, r.param1);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<ResultRow> out;
  for (const auto& key : order) out.push_back(mean_of(groups[key]));
  return out;
}

namespace {

bool close(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Leading numeric value of "key=value;...", used to order rho settings.
double leading_value(const std::string& param) {
  const auto eq = param.find('=');
  if (eq == std::string::npos) return 0.0;
  const auto parts = split(param.substr(eq + 1), ';');
  return parts.empty() ? 0.0 : parse_double(parts.front()).value_or(0.0);
}

}  // namespace

TableReport compare_table(const std::vector<ResultRow>& rows) {
  TableReport report;
  std::vector<ResultRow> means = recompute_means(rows);

  for (const auto& m : means) {
    for (const auto& r : rows) {
      if (r.replicate != "mean" || r.solver != m.solver || r.param1 != m.param1 ||
          r.param2 != m.param2) {
        continue;
      }
      if (!close(r.vector_rounds, m.vector_rounds) || !close(r.outer_iters, m.outer_iters) ||
          !close(r.kkt, m.kkt) || !close(r.scalar_rounds, m.scalar_rounds)) {
        report.mismatches.push_back(m.solver + " " + m.param1 + " " + m.param2);
      }
    }
  }

  // Within each scenario and solver, D-ripALM settings go by rho descending.
  std::stable_sort(means.begin(), means.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.param2 != b.param2 || a.solver != b.solver || a.solver != "dripalm") return false;
    return leading_value(a.param1) > leading_value(b.param1);
  });

  std::vector<std::array<std::string, 7>> table;
  table.push_back({"scenario", "solver", "params", "comm.(#)", "outer", "KKTres", "status"});
  for (const auto& m : means) {
    char comm[32], outer[32], kkt[32];
    std::snprintf(comm, sizeof comm, "%.0f", m.vector_rounds);
    std::snprintf(outer, sizeof outer, "%.1f", m.outer_iters);
    std::snprintf(kkt, sizeof kkt, "%.1e", m.kkt);
    table.push_back({m.param2, m.solver, m.param1, comm, outer, kkt, m.status});
  }
  std::array<std::size_t, 7> width{};
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t c = 0; c < table[i].size(); ++c) {
      out << std::left << std::setw(static_cast<int>(width[c])) << table[i][c];
      out << (c + 1 < table[i].size() ? "  " : "\n");
    }
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out << std::string(total - 2, '-') << '\n';
    }
  }
  report.text = out.str();
  return report;
}

namespace {

std::map<std::string, std::string> key_values(const std::vector<std::string>& args,
                                              const std::set<std::string>& allowed) {
  std::map<std::string, std::string> kv;
  for (const auto& a : args) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + a + "'");
    const std::string key = trim(a.substr(0, eq));
    if (!allowed.count(key)) throw ConfigError("unknown generator parameter '" + key + "'");
    kv[key] = a.substr(eq + 1);
  }
  return kv;
}

template <typename T>
void assign(const std::map<std::string, std::string>& kv, const std::string& key, T& out) {
  auto it = kv.find(key);
  if (it == kv.end()) return;
  if constexpr (std::is_floating_point_v<T>) {
    auto v = parse_double(it->second);
    if (!v) throw ConfigError(key + ": expected a number, got '" + it->second + "'");
    out = *v;
  } else {
    auto v = parse_integer(it->second);
    if (!v || *v < 0) {
      throw ConfigError(key + ": expected a nonnegative integer, got '" + it->second + "'");
    }
    out = static_cast<T>(*v);
  }
}

}  // namespace

LogregParams parse_logreg_params(const std::vector<std::string>& args) {
  const auto kv =
      key_values(args, {"agents", "dim", "samples", "lambda", "label_noise", "seed"});
  LogregParams p;
  assign(kv, "agents", p.agents);
  assign(kv, "dim", p.dim);
  assign(kv, "samples", p.samples);
  assign(kv, "lambda", p.lambda);
  assign(kv, "label_noise", p.label_noise);
  assign(kv, "seed", p.seed);
  return p;
}

LassoParams parse_lasso_params(const std::vector<std::string>& args) {
  const auto kv = key_values(
      args, {"agents", "dim", "samples", "lambda_c", "density", "noise", "seed"});
  LassoParams p;
  assign(kv, "agents", p.agents);
  assign(kv, "dim", p.dim);
  assign(kv, "samples", p.samples);
  assign(kv, "lambda_c", p.lambda_c);
  assign(kv, "density", p.density);
  assign(kv, "noise", p.noise);
  assign(kv, "seed", p.seed);
  return p;
}

}  // namespace dripalm
