#ifndef DIVLAB_CLI_HPP
#define DIVLAB_CLI_HPP

// Experiment driver: validates a JSON experiment config, runs the named
// command against the requested group model, and writes deterministic
// artifacts (CSV tables, JSON reports, a run manifest).  The command-line
// binary is a thin shell around execute_config so tests exercise the exact
// production path in-process.
//
// Exit codes: 0 success, 2 validation error (bad config or parameters),
// 3 resource ceiling (a partial manifest records what was emitted).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "divlab/conjugacy.hpp"
#include "divlab/divergence.hpp"
#include "divlab/group_models.hpp"
#include "divlab/io.hpp"
#include "divlab/morse.hpp"
#include "divlab/network.hpp"
#include "divlab/order.hpp"
#include "json.hpp"

namespace divlab {

struct CliOptions {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;                  // 0 = hardware concurrency
  uint64_t budget_mb = 0;           // 0 = DIVLAB_BUDGET_MB env, else unlimited
  std::optional<uint64_t> seed;     // overrides the config's seed
  bool timing = false;              // measure per-row times into the ms column
};

struct RunOutcome {
  int exit_code = 0;
  std::string message;        // human-readable summary for stdout
  std::string error;          // failure description for stderr
  RunManifest manifest;
  std::string manifest_path;  // empty when no manifest was written
};

namespace detail {

inline void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known) throw ValidationError(where + ": unknown key \"" + item.key() + "\"");
  }
}

inline const nlohmann::json& need(const nlohmann::json& obj, const char* key,
                                  const std::string& where) {
  if (!obj.contains(key)) throw ValidationError(where + ": missing required key \"" + key + "\"");
  return obj.at(key);
}

inline DivMode mode_from_string(const std::string& s) {
  if (s == "midpoint") return DivMode::Midpoint;
  if (s == "between") return DivMode::Between;
  if (s == "freecenter") return DivMode::FreeCenter;
  if (s == "small") return DivMode::Small;
  throw ValidationError("unknown divergence mode \"" + s +
                        "\" (expected midpoint | between | freecenter | small)");
}

// A scale grid is either an explicit array [4, 8, 12] or a range object
// {"from": 4, "to": 24, "step": 4}.
inline std::vector<int> parse_grid(const nlohmann::json& j, const std::string& what) {
  std::vector<int> grid;
  if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number_integer()) throw ValidationError(what + ": grid entries must be integers");
      grid.push_back(v.get<int>());
    }
  } else if (j.is_object()) {
    check_keys(j, {"from", "to", "step"}, what);
    int from = need(j, "from", what).get<int>();
    int to = need(j, "to", what).get<int>();
    int step = j.value("step", 1);
    if (step < 1) throw ValidationError(what + ": step must be positive");
    if (to < from) throw ValidationError(what + ": range is empty");
    for (int n = from; n <= to; n += step) grid.push_back(n);
  } else {
    throw ValidationError(what + ": expected an array or a {from, to, step} range");
  }
  if (grid.empty()) throw ValidationError(what + ": the grid is empty");
  return grid;
}

inline std::vector<double> parse_ladder(const nlohmann::json& j, const std::string& what) {
  std::vector<double> ladder;
  if (!j.is_array() || j.empty()) throw ValidationError(what + ": expected a nonempty array");
  for (const auto& v : j) ladder.push_back(v.get<double>());
  return ladder;
}

inline std::vector<SubgroupSpec> parse_subgroups(const nlohmann::json& j,
                                                 const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ValidationError(where + ": expected a nonempty array of subgroups");
  std::vector<SubgroupSpec> specs;
  for (const auto& s : j) {
    check_keys(s, {"label", "generators"}, where);
    SubgroupSpec spec;
    spec.label = need(s, "label", where).get<std::string>();
    for (const auto& g : need(s, "generators", where))
      spec.generators.push_back(g.get<std::string>());
    if (spec.generators.empty())
      throw ValidationError(where + ": subgroup \"" + spec.label + "\" has no generators");
    specs.push_back(std::move(spec));
  }
  return specs;
}

// Shared state threaded through a command run: where files go, what has
// been emitted so far (so a partial manifest stays truthful), and the
// resolved resource knobs.
struct RunContext {
  std::filesystem::path dir;
  RunManifest* manifest = nullptr;
  std::string prefix;
  uint64_t seed = 0;
  bool seeded = false;
  int threads = 1;
  BallOptions ball_options;
  bool timing = false;
  std::ostringstream message;

  void write(const std::string& name, const std::string& text) const {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ValidationError("cannot write output file " + (dir / name).string());
    out << text;
    if (!out.good()) throw ValidationError("failed writing output file " + (dir / name).string());
    manifest->files.push_back(name);
  }

  void flag_censoring(const std::string& name, uint64_t count, const char* what) const {
    if (count > 0)
      manifest->censoring.push_back(name + ": " + std::to_string(count) + " " + what);
  }

  uint64_t require_seed() const {
    if (!seeded)
      throw ValidationError("this command can sample, so a seed is required "
                            "(config key \"seed\" or --seed)");
    return seed;
  }
};

inline int64_t elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               t0)
      .count();
}

// Ambient ball radius: explicit config override, else the sizing policy
// applied to the largest requested scale.
inline int ambient_radius(const nlohmann::json& config, const AmbientPolicy& policy, int core) {
  if (config.contains("radius")) {
    int r = config.at("radius").get<int>();
    if (r < 1) throw ValidationError("radius must be a positive integer");
    return r;
  }
  return policy.radius_for(core);
}

inline uint64_t count_censored(const std::vector<DivPoint>& rows) {
  uint64_t n = 0;
  for (const DivPoint& p : rows)
    if (p.any && p.len.status == ExtendedLength::Status::Censored) ++n;
  return n;
}

inline std::string summarize_lengths(const std::vector<DivPoint>& rows) {
  uint64_t fin = 0, inf = 0, cen = 0, emp = 0;
  for (const DivPoint& p : rows) {
    if (!p.any)
      ++emp;
    else if (p.len.status == ExtendedLength::Status::Finite)
      ++fin;
    else if (p.len.status == ExtendedLength::Status::Infinite)
      ++inf;
    else
      ++cen;
  }
  std::ostringstream s;
  s << rows.size() << " points (" << fin << " finite, " << inf << " infinite, " << cen
    << " censored, " << emp << " empty)";
  return s.str();
}

// --- command: ball-stats ---------------------------------------------------

inline void run_ball_stats(const GroupModel& G, const nlohmann::json& config, RunContext& ctx) {
  const nlohmann::json params =
      config.contains("params") ? config.at("params") : nlohmann::json::object();
  check_keys(params, {"radius"}, "ball-stats params");
  int radius = config.contains("radius") ? config.at("radius").get<int>()
                                         : need(params, "radius", "ball-stats").get<int>();
  if (radius < 0) throw ValidationError("radius must be nonnegative");
  Ball ball = build_ball(G, radius, ctx.ball_options);
  ctx.write(ctx.prefix + "_ball.csv", ball_stats_csv(ball));
  ctx.message << G.name() << " ball of radius " << radius << ": " << ball.size() << " elements";
}

// --- command: divergence ---------------------------------------------------

inline DivergenceParams divergence_params(const nlohmann::json& params, RunContext& ctx) {
  DivergenceParams dp;
  dp.delta = params.value("delta", dp.delta);
  dp.gamma = params.value("gamma", dp.gamma);
  dp.lambda = params.value("lambda", dp.lambda);
  dp.max_scans = params.value("max_scans", dp.max_scans);
  dp.sample_scans = params.value("sample_scans", dp.sample_scans);
  dp.min_scans = params.value("min_scans", dp.min_scans);
  dp.seed = ctx.require_seed();
  dp.threads = ctx.threads;
  if (params.contains("ambient")) {
    const nlohmann::json& a = params.at("ambient");
    check_keys(a, {"multiplier", "slack", "cap"}, "ambient policy");
    dp.ambient.multiplier = a.value("multiplier", dp.ambient.multiplier);
    dp.ambient.slack = a.value("slack", dp.ambient.slack);
    dp.ambient.cap = a.value("cap", dp.ambient.cap);
  }
  if (params.contains("probes")) {
    for (const auto& p : params.at("probes")) {
      check_keys(p, {"a", "c"}, "probe");
      dp.probes.push_back({need(p, "a", "probe").get<std::string>(), p.value("c", "")});
    }
  }
  return dp;
}

inline void run_divergence(const GroupModel& G, const nlohmann::json& config, RunContext& ctx) {
  const nlohmann::json& params = need(config, "params", "divergence");
  check_keys(params,
             {"mode", "n_grid", "delta", "gamma", "lambda", "max_scans", "sample_scans",
              "min_scans", "ambient", "probes"},
             "divergence params");
  DivMode mode = mode_from_string(params.value("mode", "midpoint"));
  std::vector<int> grid = parse_grid(need(params, "n_grid", "divergence"), "n_grid");
  DivergenceParams dp = divergence_params(params, ctx);

  int core = *std::max_element(grid.begin(), grid.end());
  Ball ball = build_ball(G, ambient_radius(config, dp.ambient, core), ctx.ball_options);

  std::vector<DivPoint> rows;
  std::vector<int64_t> ms;
  if (ctx.timing) {
    for (int n : grid) {
      auto t0 = std::chrono::steady_clock::now();
      std::vector<DivPoint> part = div_function(G, ball, mode, {n}, dp);
      int64_t t = elapsed_ms(t0);
      for (DivPoint& p : part) {
        rows.push_back(std::move(p));
        ms.push_back(t);
      }
    }
  } else {
    rows = div_function(G, ball, mode, grid, dp);
  }

  const std::string label = config.value("label", G.name());
  const std::string csv_name = ctx.prefix + "_divergence.csv";
  ctx.write(csv_name, divergence_csv(label, rows, ctx.timing ? &ms : nullptr));
  ctx.flag_censoring(csv_name, count_censored(rows), "censored rows");

  std::vector<OrderSample> samples;
  for (const DivPoint& p : rows)
    if (p.any) samples.push_back(order_sample(p.n, p.len));
  ctx.write(ctx.prefix + "_plot.csv", plot_csv(samples));
  ctx.message << "divergence of " << label << ", " << to_string(mode) << " mode: "
              << summarize_lengths(rows);
}

// --- command: axis-divergence ----------------------------------------------

inline void run_axis_divergence(const GroupModel& G, const nlohmann::json& config,
                                RunContext& ctx) {
  const nlohmann::json& params = need(config, "params", "axis-divergence");
  check_keys(params, {"axis", "r_grid", "delta", "gamma"}, "axis-divergence params");
  const std::string axis = need(params, "axis", "axis-divergence").get<std::string>();
  std::vector<int> grid = parse_grid(need(params, "r_grid", "axis-divergence"), "r_grid");
  double delta = params.value("delta", kDefaultDelta);
  double gamma = params.value("gamma", kDefaultGamma);
  Word g = parse_word(G.generators(), axis);

  AmbientPolicy policy;
  int core = *std::max_element(grid.begin(), grid.end());
  Ball ball = build_ball(G, ambient_radius(config, policy, core), ctx.ball_options);

  std::vector<AxisPoint> rows;
  std::vector<int64_t> ms;
  if (ctx.timing) {
    for (int r : grid) {
      auto t0 = std::chrono::steady_clock::now();
      std::vector<AxisPoint> part = axis_divergence(G, ball, g, {r}, delta, gamma);
      int64_t t = elapsed_ms(t0);
      for (AxisPoint& p : part) {
        rows.push_back(std::move(p));
        ms.push_back(t);
      }
    }
  } else {
    rows = axis_divergence(G, ball, g, grid, delta, gamma);
  }

  const std::string label = config.value("label", G.name());
  const std::string csv_name = ctx.prefix + "_axis.csv";
  uint64_t censored = 0;
  std::vector<OrderSample> samples;
  for (const AxisPoint& p : rows) {
    if (p.len.status == ExtendedLength::Status::Censored) ++censored;
    samples.push_back(order_sample(p.r, p.len));
  }
  ctx.write(csv_name, axis_divergence_csv(label, axis, rows, ctx.timing ? &ms : nullptr));
  ctx.flag_censoring(csv_name, censored, "censored rows");
  ctx.write(ctx.prefix + "_plot.csv", plot_csv(samples));
  ctx.message << "axis divergence of " << label << " along \"" << axis << "\": " << rows.size()
              << " points, " << censored << " censored";
}

// --- command: contraction --------------------------------------------------

inline void run_contraction(const GroupModel& G, const nlohmann::json& config, RunContext& ctx) {
  const nlohmann::json& params = need(config, "params", "contraction");
  check_keys(params,
             {"axis", "span", "centers", "sample_count", "min_center_dist", "element_budget",
              "witness"},
             "contraction params");
  const std::string axis_word = need(params, "axis", "contraction").get<std::string>();
  int span = params.value("span", 0);
  if (!config.contains("radius"))
    throw ValidationError("contraction: an explicit ambient radius is required");
  int radius = config.at("radius").get<int>();
  if (radius < 1) throw ValidationError("radius must be a positive integer");

  ContractionParams cp;
  if (params.contains("centers"))
    for (const auto& c : params.at("centers")) cp.centers.push_back(c.get<std::string>());
  cp.sample_count = params.value("sample_count", cp.sample_count);
  cp.min_center_dist = params.value("min_center_dist", cp.min_center_dist);
  cp.element_budget = params.value("element_budget", cp.element_budget);
  cp.seed = ctx.require_seed();

  Ball ball = build_ball(G, radius, ctx.ball_options);
  AxisSpec axis = make_axis(G, ball, parse_word(G.generators(), axis_word), span);
  ContractionReport report = contraction_profile(G, ball, axis, cp);

  const std::string label = config.value("label", G.name());
  nlohmann::json j = contraction_json(label, axis_word, report);
  if (params.contains("witness")) {
    const nlohmann::json& w = params.at("witness");
    check_keys(w, {"L", "C", "endpoint_span", "max_detours", "probes"}, "witness params");
    WitnessParams wp;
    wp.L = w.value("L", wp.L);
    wp.C = w.value("C", wp.C);
    wp.endpoint_span = w.value("endpoint_span", wp.endpoint_span);
    wp.max_detours = w.value("max_detours", wp.max_detours);
    wp.seed = ctx.seed;
    if (w.contains("probes"))
      for (const auto& p : w.at("probes")) wp.probes.push_back(p.get<std::string>());
    j["witness"] = witness_json(morse_witness(G, ball, axis, wp));
  }

  const std::string csv_name = ctx.prefix + "_contraction.csv";
  ctx.write(csv_name, contraction_csv(report));
  uint64_t clipped = 0;
  for (const ContractionSample& s : report.samples)
    if (s.clipped) ++clipped;
  ctx.flag_censoring(csv_name, clipped, "clipped samples");
  ctx.write(ctx.prefix + "_contraction.json", j.dump(2) + "\n");
  ctx.message << "contraction profile of " << label << " along \"" << axis_word
              << "\": D_estimate = " << report.D_estimate << " over " << report.samples.size()
              << " centers";
}

// --- command: network-audit ------------------------------------------------

inline void run_network_audit(const GroupModel& G, const nlohmann::json& config,
                              RunContext& ctx) {
  const nlohmann::json& params = need(config, "params", "network-audit");
  check_keys(params, {"subgroups", "qc", "chain", "cover", "divergence"}, "network-audit params");
  std::vector<SubgroupSpec> subgroups =
      parse_subgroups(need(params, "subgroups", "network-audit"), "network-audit subgroups");
  if (!config.contains("radius"))
    throw ValidationError("network-audit: an explicit ambient radius is required");
  int radius = config.at("radius").get<int>();
  if (radius < 1) throw ValidationError("radius must be a positive integer");
  Ball ball = build_ball(G, radius, ctx.ball_options);

  const std::string label = config.value("label", G.name());
  nlohmann::json report;
  report["group"] = label;
  nlohmann::json labels = nlohmann::json::array();
  for (const SubgroupSpec& s : subgroups) labels.push_back(s.label);
  report["subgroups"] = std::move(labels);
  bool censored_anywhere = false;

  if (params.contains("qc")) {
    const nlohmann::json& q = params.at("qc");
    check_keys(q, {"C", "L", "pair_budget"}, "qc params");
    double C = q.value("C", 0.0);
    double L = q.value("L", 1.0);
    uint64_t budget = q.value("pair_budget", (uint64_t)4096);
    uint64_t seed = ctx.require_seed();
    nlohmann::json audits = nlohmann::json::array();
    for (const SubgroupSpec& s : subgroups)
      audits.push_back(quasiconvexity_json(s.label, quasiconvexity_audit(G, ball, s, C, L,
                                                                         budget, seed)));
    report["qc"] = std::move(audits);
  }

  if (params.contains("chain")) {
    const nlohmann::json& c = params.at("chain");
    check_keys(c, {"x", "tau", "eta"}, "chain params");
    report["chains"] = chain_json(chain_audit(G, ball, subgroups, c.value("x", ""),
                                              need(c, "tau", "chain").get<int>(),
                                              need(c, "eta", "chain").get<int>()));
  }

  if (params.contains("cover")) {
    const nlohmann::json& c = params.at("cover");
    check_keys(c, {"geodesic", "tau"}, "cover params");
    report["covering"] = cover_json(geodesic_cover(G, ball, subgroups,
                                                   need(c, "geodesic", "cover").get<std::string>(),
                                                   need(c, "tau", "cover").get<int>()));
  }

  if (params.contains("divergence")) {
    const nlohmann::json& d = params.at("divergence");
    check_keys(d,
               {"mode", "n_grid", "delta", "gamma", "lambda", "max_scans", "sample_scans",
                "min_scans", "ambient", "probes", "h_grid_max", "ambient_radius_h", "ladder"},
               "network divergence params");
    NetworkDivergenceParams np;
    np.mode = mode_from_string(d.value("mode", "midpoint"));
    np.div = divergence_params(d, ctx);
    np.h_grid_max = d.value("h_grid_max", np.h_grid_max);
    np.ambient_radius_h = d.value("ambient_radius_h", np.ambient_radius_h);
    if (d.contains("ladder")) np.ladder = parse_ladder(d.at("ladder"), "ladder");
    std::vector<int> grid = parse_grid(need(d, "n_grid", "network divergence"), "n_grid");
    NetworkDivergenceReport ndr = network_divergence_audit(G, ball, subgroups, grid, np);
    report["divergence"] = network_divergence_json(ndr);
    report["preceq"] = report["divergence"]["preceq"];
    censored_anywhere = censored_anywhere || ndr.censored;
    ctx.message << "network bound on " << label << ": "
                << report["preceq"]["verdict"].get<std::string>();
    if (ndr.verdict == OrderVerdict::Holds) ctx.message << " with C = " << format_real(ndr.C);
  } else {
    ctx.message << "network audit of " << label << ": " << subgroups.size() << " subgroups";
  }

  report["scale_flags"] = {{"scale_limited", true}, {"censored", censored_anywhere}};
  const std::string json_name = ctx.prefix + "_network.json";
  ctx.write(json_name, report.dump(2) + "\n");
  ctx.flag_censoring(json_name, censored_anywhere ? 1 : 0, "censored subgroup tables");
}

// --- command: conjugacy ------------------------------------------------------

inline void run_conjugacy(const GroupModel& G, const nlohmann::json& config, RunContext& ctx) {
  const nlohmann::json& params = need(config, "params", "conjugacy");
  check_keys(params, {"pairs", "r_max", "profile_r"}, "conjugacy params");
  int r_max = need(params, "r_max", "conjugacy").get<int>();
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& p : need(params, "pairs", "conjugacy")) {
    if (p.is_array() && p.size() == 2)
      pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    else if (p.is_object())
      pairs.emplace_back(need(p, "u", "pair").get<std::string>(),
                         need(p, "v", "pair").get<std::string>());
    else
      throw ValidationError("conjugacy: each pair must be [u, v] or {\"u\":…, \"v\":…}");
  }
  if (pairs.empty()) throw ValidationError("conjugacy: the pair list is empty");
  if (!config.contains("radius"))
    throw ValidationError("conjugacy: an explicit ambient radius is required");
  int radius = config.at("radius").get<int>();
  if (radius < 1) throw ValidationError("radius must be a positive integer");

  Ball ball = build_ball(G, radius, ctx.ball_options);
  ConjugatorTable table = shortest_conjugator_table(G, ball, pairs, r_max);
  ctx.write(ctx.prefix + "_conjugacy.csv", conjugacy_csv(table));

  uint64_t found = 0;
  for (const ConjugatorRow& row : table.rows)
    if (row.found) ++found;
  ctx.message << "conjugator search: " << found << "/" << table.rows.size()
              << " pairs conjugate within radius " << table.searched_radius;

  if (params.contains("profile_r")) {
    AcylindricityProfile profile =
        acylindricity_profile(G, ball, params.at("profile_r").get<int>());
    const std::string json_name = ctx.prefix + "_acylindricity.json";
    ctx.write(json_name, acylindricity_json(profile).dump(2) + "\n");
    uint64_t censored = 0;
    for (const AcylindricityPoint& p : profile.points) censored += p.censored;
    ctx.flag_censoring(json_name, censored, "censored lookups");
  }
}

// --- command: order-compare --------------------------------------------------

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read table file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void append_estimate(nlohmann::json& report, const char* key,
                            const std::vector<OrderSample>& samples, std::ostringstream& msg,
                            const char* who) {
  if (samples.size() < 4) return;
  // Exponent fits only make sense on fully exact, positive data.
  for (const OrderSample& s : samples)
    if (!std::isfinite(s.lo) || s.lo != s.hi || s.lo <= 0.0) return;
  OrderEstimate est = estimate_order(samples);
  report[key] = {{"exponent", est.exponent}, {"residual", est.residual}, {"points", est.points}};
  msg << "\n" << who << " grows like x^" << format_real(est.exponent) << " (residual "
      << format_real(est.residual) << " over " << est.points << " points)";
}

inline void ensure_comparable(const OrderSearch& search) {
  for (const OrderDecision& d : search.ladder)
    if (d.checked > 0) return;
  throw ValidationError("incompatible grids: no sample point of one table could be "
                        "compared against the other at any tested constant");
}

// Reference-curve samples at every argument the comparison will evaluate:
// the table's own scales plus the integers bracketing C*x + C for each
// ladder constant, so the interval evaluation hits exact knots.
inline std::vector<OrderSample> reference_curve(const std::vector<OrderSample>& f,
                                                const std::vector<double>& ladder,
                                                double exponent) {
  std::set<int64_t> xs;
  for (const OrderSample& s : f) xs.insert(s.x);
  for (double C : ladder) {
    for (const OrderSample& s : f) {
      double u = C * (double)s.x + C;
      xs.insert((int64_t)std::floor(u));
      xs.insert((int64_t)std::ceil(u));
    }
  }
  return power_curve(std::vector<int64_t>(xs.begin(), xs.end()), exponent);
}

inline void describe_search(std::ostringstream& msg, const OrderSearch& search,
                            double ladder_max) {
  if (search.verdict == OrderVerdict::Holds)
    msg << "holds with C = " << format_real(search.C);
  else if (search.verdict == OrderVerdict::Fails)
    msg << "fails at every C up to " << format_real(ladder_max);
  else
    msg << "is undetermined up to C = " << format_real(ladder_max);
}

inline void run_order_compare(const nlohmann::json& config, RunContext& ctx) {
  const nlohmann::json& params = need(config, "params", "order-compare");
  check_keys(params, {"f_table", "g_table", "g_power", "relation", "ladder"},
             "order-compare params");
  XYTable f = read_xy_csv(read_text_file(need(params, "f_table", "order-compare")
                                             .get<std::string>()));
  if (f.samples.empty()) throw ValidationError("f_table holds no usable samples");

  std::vector<double> ladder = default_constant_ladder();
  if (params.contains("ladder")) ladder = parse_ladder(params.at("ladder"), "ladder");
  std::sort(ladder.begin(), ladder.end());
  const std::string relation = params.value("relation", "preceq");
  if (relation != "preceq" && relation != "equiv")
    throw ValidationError("unknown relation \"" + relation + "\" (expected preceq | equiv)");

  // Tables are finite, so arguments C*x + C can leave the right-hand grid;
  // those points are skipped, and a verdict needs at least three checked
  // points covering half the table.
  OrderPolicy policy;
  policy.require_all_verifiable = false;
  policy.min_checked = 3;
  policy.min_checked_fraction = 0.5;

  if (params.contains("g_table") == params.contains("g_power"))
    throw ValidationError("order-compare needs exactly one of g_table or g_power");

  XYTable g_loaded;
  std::vector<OrderSample> g_forward;  // right-hand side of f preceq g
  std::vector<OrderSample> g_backward;  // left-hand side of g preceq f
  std::string g_desc;
  bool g_censored = false;
  if (params.contains("g_table")) {
    g_desc = params.at("g_table").get<std::string>();
    g_loaded = read_xy_csv(read_text_file(g_desc));
    if (g_loaded.samples.empty()) throw ValidationError("g_table holds no usable samples");
    g_forward = g_loaded.samples;
    g_backward = g_loaded.samples;
    g_censored = g_loaded.censored;
  } else {
    double e = params.at("g_power").get<double>();
    g_desc = "x^" + format_real(e);
    g_forward = reference_curve(f.samples, ladder, e);
    // The reverse comparison evaluates f, whose table cannot be extended,
    // so the curve is sampled on f's own scales.
    std::vector<int64_t> xs;
    for (const OrderSample& s : f.samples) xs.push_back(s.x);
    g_backward = power_curve(xs, e);
  }

  nlohmann::json report;
  report["f_censored"] = f.censored;
  report["g_censored"] = g_censored;
  report["relation"] = relation;
  const double ladder_max = ladder.back();

  if (relation == "preceq") {
    OrderSearch search = preceq_search(f.samples, g_forward, ladder, policy);
    ensure_comparable(search);
    report["search"] = search_json(search);
    ctx.message << "verdict: f preceq " << g_desc << " ";
    describe_search(ctx.message, search, ladder_max);
  } else {
    OrderSearch forward = preceq_search(f.samples, g_forward, ladder, policy);
    OrderSearch backward = preceq_search(g_backward, f.samples, ladder, policy);
    ensure_comparable(forward);
    ensure_comparable(backward);
    report["forward"] = search_json(forward);
    report["backward"] = search_json(backward);
    OrderVerdict verdict = OrderVerdict::Undetermined;
    double C = 0.0;
    if (forward.verdict == OrderVerdict::Holds && backward.verdict == OrderVerdict::Holds) {
      verdict = OrderVerdict::Holds;
      C = std::max(forward.C, backward.C);
    } else if (forward.verdict == OrderVerdict::Fails ||
               backward.verdict == OrderVerdict::Fails) {
      verdict = OrderVerdict::Fails;
    }
    report["verdict"] = verdict == OrderVerdict::Holds
                            ? "equivalent"
                            : (verdict == OrderVerdict::Fails
                                   ? "not_equivalent_up_to_" + format_real(ladder_max)
                                   : "undetermined");
    if (verdict == OrderVerdict::Holds) report["C"] = C;
    ctx.message << "verdict: f and " << g_desc << " ";
    if (verdict == OrderVerdict::Holds)
      ctx.message << "are asymptotically equivalent with C = " << format_real(C);
    else if (verdict == OrderVerdict::Fails)
      ctx.message << "are not equivalent at any C up to " << format_real(ladder_max);
    else
      ctx.message << "are undetermined up to C = " << format_real(ladder_max);
  }

  append_estimate(report, "f_order", f.samples, ctx.message, "f");
  append_estimate(report, "g_order", g_backward.empty() ? g_forward : g_backward, ctx.message,
                  "g");
  ctx.write(ctx.prefix + "_compare.json", report.dump(2) + "\n");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

inline RunOutcome execute_config(const nlohmann::json& config, const CliOptions& options) {
  RunOutcome out;
  auto t0 = std::chrono::steady_clock::now();
  detail::RunContext ctx;
  try {
    detail::check_keys(config, {"command", "group", "label", "radius", "seed", "params",
                                "out_prefix"},
                       "config");
    const std::string command = detail::need(config, "command", "config").get<std::string>();
    const std::vector<std::string> known = {"ball-stats",    "divergence", "axis-divergence",
                                            "contraction",   "network-audit", "conjugacy",
                                            "order-compare"};
    if (std::find(known.begin(), known.end(), command) == known.end())
      throw ValidationError("unknown command \"" + command + "\"");

    std::string prefix = command;
    for (char& c : prefix)
      if (c == '-') c = '_';
    ctx.prefix = config.value("out_prefix", prefix);
    ctx.dir = options.out_dir.empty() ? "." : options.out_dir;
    ctx.manifest = &out.manifest;
    ctx.timing = options.timing;
    ctx.threads = options.threads > 0
                      ? options.threads
                      : std::max(1u, std::thread::hardware_concurrency());
    if (options.seed) {
      ctx.seed = *options.seed;
      ctx.seeded = true;
    } else if (config.contains("seed")) {
      ctx.seed = config.at("seed").get<uint64_t>();
      ctx.seeded = true;
    }
    uint64_t budget_mb = options.budget_mb;
    if (budget_mb == 0) {
      if (const char* env = std::getenv("DIVLAB_BUDGET_MB"))
        budget_mb = std::strtoull(env, nullptr, 10);
    }
    ctx.ball_options.budget_bytes = budget_mb << 20;
    out.manifest.config_hash = hash_config(config);

    if (command == "order-compare") {
      detail::run_order_compare(config, ctx);
    } else {
      ModelPtr model = model_from_json(detail::need(config, "group", "config"));
      if (command == "ball-stats")
        detail::run_ball_stats(*model, config, ctx);
      else if (command == "divergence")
        detail::run_divergence(*model, config, ctx);
      else if (command == "axis-divergence")
        detail::run_axis_divergence(*model, config, ctx);
      else if (command == "contraction")
        detail::run_contraction(*model, config, ctx);
      else if (command == "network-audit")
        detail::run_network_audit(*model, config, ctx);
      else
        detail::run_conjugacy(*model, config, ctx);
    }
  } catch (const ValidationError& e) {
    out.exit_code = 2;
    out.error = e.what();
    return out;
  } catch (const nlohmann::json::exception& e) {
    out.exit_code = 2;
    out.error = std::string("config error: ") + e.what();
    return out;
  } catch (const ResourceError& e) {
    out.exit_code = 3;
    out.error = e.what();
    out.manifest.partial = true;
    out.manifest.error = e.what();
  }

  out.manifest.wall_ms = detail::elapsed_ms(t0);
  // The manifest lists every emitted file, itself included.
  const std::string manifest_name = ctx.prefix + "_manifest.json";
  out.manifest.files.push_back(manifest_name);
  std::filesystem::create_directories(ctx.dir);
  std::ofstream mout(ctx.dir / manifest_name, std::ios::binary);
  mout << manifest_json(out.manifest).dump(2) << "\n";
  if (!mout.good()) {
    if (out.exit_code == 0) out.exit_code = 3;
    out.error = "failed writing manifest " + (ctx.dir / manifest_name).string();
  }
  out.manifest_path = (ctx.dir / manifest_name).string();
  out.message = ctx.message.str();
  return out;
}

inline RunOutcome run_config_file(const CliOptions& options) {
  std::ifstream in(options.config_path, std::ios::binary);
  if (!in) {
    RunOutcome out;
    out.exit_code = 2;
    out.error = "cannot read config file " + options.config_path;
    return out;
  }
  nlohmann::json config;
  try {
    in >> config;
  } catch (const nlohmann::json::exception& e) {
    RunOutcome out;
    out.exit_code = 2;
    out.error = std::string("config parse error: ") + e.what();
    return out;
  }
  return execute_config(config, options);
}

inline int run_cli(const CliOptions& options, std::ostream& out, std::ostream& err) {
  RunOutcome outcome = run_config_file(options);
  if (!outcome.message.empty()) out << outcome.message << "\n";
  if (!outcome.error.empty()) err << "error: " << outcome.error << "\n";
  return outcome.exit_code;
}

}  // namespace divlab

#endif  // DIVLAB_CLI_HPP
