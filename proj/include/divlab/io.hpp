#ifndef DIVLAB_IO_HPP
#define DIVLAB_IO_HPP

// Deterministic serialization: CSV tables for the measurement commands, JSON
// reports for the structured audits, and the run manifest.  Identical inputs
// must produce byte-identical CSV bodies, so nothing here consults clocks or
// iteration order of unordered containers; timings are an opt-in column that
// defaults to zero.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "divlab/common.hpp"
#include "divlab/conjugacy.hpp"
#include "divlab/divergence.hpp"
#include "divlab/morse.hpp"
#include "divlab/network.hpp"
#include "divlab/order.hpp"
#include "json.hpp"

namespace divlab {

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// CSV primitives
// ---------------------------------------------------------------------------

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Shortest-round-trip style real formatting: stable across runs, no locale.
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Value cell of an extended length: the value for finite entries, the lower
// bound for censored ones (the status column disambiguates), empty when the
// length is certified infinite.
inline std::string length_value_cell(const ExtendedLength& len) {
  if (len.status == ExtendedLength::Status::Infinite) return "";
  return std::to_string(len.value);
}

// ---------------------------------------------------------------------------
// Measurement tables
// ---------------------------------------------------------------------------

inline std::string divergence_csv(const std::string& group, const std::vector<DivPoint>& table,
                                  const std::vector<int64_t>* ms = nullptr) {
  std::ostringstream out;
  out << "group,mode,n,delta,gamma,lambda,status,value,witness_a,witness_b,pairs,exhaustive,ms\n";
  for (size_t i = 0; i < table.size(); ++i) {
    const DivPoint& p = table[i];
    out << csv_escape(group) << ',' << to_string(p.mode) << ',' << p.n << ','
        << format_real(p.delta) << ',' << format_real(p.gamma) << ',' << format_real(p.lambda)
        << ',' << (p.any ? to_string(p.len.status) : "empty") << ','
        << (p.any ? length_value_cell(p.len) : "") << ',' << csv_escape(p.witness_a) << ','
        << csv_escape(p.witness_b) << ',' << p.pairs << ',' << (p.exhaustive ? 1 : 0) << ','
        << (ms ? (*ms)[i] : 0) << '\n';
  }
  return out.str();
}

inline std::string axis_divergence_csv(const std::string& group, const std::string& axis,
                                       const std::vector<AxisPoint>& table,
                                       const std::vector<int64_t>* ms = nullptr) {
  std::ostringstream out;
  out << "group,axis,r,m,r_actual,status,value,witness_a,witness_b,ms\n";
  for (size_t i = 0; i < table.size(); ++i) {
    const AxisPoint& p = table[i];
    out << csv_escape(group) << ',' << csv_escape(axis) << ',' << p.r << ',' << p.m << ','
        << p.r_actual << ',' << to_string(p.len.status) << ',' << length_value_cell(p.len) << ','
        << csv_escape(p.witness_a) << ',' << csv_escape(p.witness_b) << ','
        << (ms ? (*ms)[i] : 0) << '\n';
  }
  return out.str();
}

inline std::string ball_stats_csv(const Ball& ball) {
  std::vector<uint64_t> spheres((size_t)ball.radius() + 1, 0);
  for (uint32_t i = 0; i < ball.size(); ++i) ++spheres[(size_t)ball.dist(i)];
  std::ostringstream out;
  out << "r,sphere,ball\n";
  uint64_t total = 0;
  for (size_t r = 0; r < spheres.size(); ++r) {
    total += spheres[r];
    out << r << ',' << spheres[r] << ',' << total << '\n';
  }
  return out.str();
}

inline std::string contraction_csv(const ContractionReport& report) {
  std::ostringstream out;
  out << "center,ball_radius,proj_diameter\n";
  for (const ContractionSample& s : report.samples)
    out << csv_escape(s.center) << ',' << s.ball_radius << ',' << s.proj_diameter << '\n';
  return out.str();
}

inline std::string conjugacy_csv(const ConjugatorTable& table) {
  std::ostringstream out;
  out << "|u|,|v|,shortest_g,checked,status\n";
  for (const ConjugatorRow& row : table.rows) {
    out << row.u_len << ',' << row.v_len << ',' << row.shortest << ',' << row.checked << ','
        << (row.found ? std::string("found")
                      : "not_found_up_to_" + std::to_string(table.searched_radius))
        << '\n';
  }
  return out.str();
}

// Plot-ready (x, y, status) projection of a sample table.
inline std::string plot_csv(const std::vector<OrderSample>& samples) {
  std::ostringstream out;
  out << "x,y,status\n";
  for (const OrderSample& s : samples) {
    const bool inf = std::isinf(s.lo);
    const bool exact = s.lo == s.hi;
    out << s.x << ',' << (inf ? "" : format_real(s.lo)) << ','
        << (inf ? "infinite" : exact ? "exact" : "at_least") << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Reading tables back (order-compare input)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

inline int column_of(const std::vector<std::string>& header, const std::string& name) {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return (int)i;
  return -1;
}

}  // namespace detail

struct XYTable {
  std::vector<OrderSample> samples;
  bool censored = false;  // at least one row was a lower bound or infinite
  uint32_t skipped = 0;   // rows without a usable value
};

// Parses a measurement CSV into order samples.  Understands the divergence
// and axis tables by their headers (x = n or r, y = value, with status) and
// otherwise any table whose first two columns are numeric x, y with an
// optional third status column (exact | at_least | infinite).
inline XYTable read_xy_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty table");
  std::vector<std::string> header = detail::split_csv_line(line);
  int xcol = detail::column_of(header, "n");
  if (xcol < 0) xcol = detail::column_of(header, "r");
  if (xcol < 0) xcol = detail::column_of(header, "x");
  int ycol = detail::column_of(header, "value");
  if (ycol < 0) ycol = detail::column_of(header, "y");
  int scol = detail::column_of(header, "status");
  if (xcol < 0 || ycol < 0) {
    // Headerless numeric table: treat the first line as data, columns 0/1/2.
    xcol = 0;
    ycol = 1;
    scol = -2;  // "maybe column 2"
    in.clear();
    in.seekg(0);
  }
  XYTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = detail::split_csv_line(line);
    if ((int)cells.size() <= std::max(xcol, ycol)) {
      ++table.skipped;
      continue;
    }
    std::string status = "exact";
    if (scol >= 0 && scol < (int)cells.size())
      status = cells[(size_t)scol];
    else if (scol == -2 && cells.size() >= 3 && !cells[2].empty())
      status = cells[2];
    try {
      int64_t x = std::stoll(cells[(size_t)xcol]);
      if (status == "infinite") {
        table.samples.push_back(order_infinite(x));
        table.censored = true;
        continue;
      }
      if (cells[(size_t)ycol].empty()) {
        ++table.skipped;
        continue;
      }
      double y = std::stod(cells[(size_t)ycol]);
      if (status == "censored" || status == "at_least") {
        table.samples.push_back(order_at_least(x, y));
        table.censored = true;
      } else if (status == "empty") {
        ++table.skipped;
      } else {
        table.samples.push_back(order_exact(x, y));
      }
    } catch (const std::exception&) {
      ++table.skipped;
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// JSON reports
// ---------------------------------------------------------------------------

inline std::string verdict_label(OrderVerdict v, double ladder_max) {
  switch (v) {
    case OrderVerdict::Holds: return "preceq";
    case OrderVerdict::Fails: return "not_preceq_up_to_" + format_real(ladder_max);
    default: return "undetermined";
  }
}

inline nlohmann::json length_json(const ExtendedLength& len) {
  nlohmann::json j;
  j["status"] = to_string(len.status);
  if (len.status != ExtendedLength::Status::Infinite) j["value"] = len.value;
  return j;
}

inline nlohmann::json samples_json(const std::vector<OrderSample>& samples) {
  nlohmann::json arr = nlohmann::json::array();
  for (const OrderSample& s : samples) {
    nlohmann::json j;
    j["x"] = s.x;
    if (std::isinf(s.lo)) {
      j["infinite"] = true;
    } else {
      j["lower"] = s.lo;
      if (std::isinf(s.hi))
        j["censored"] = true;
      else if (s.hi != s.lo)
        j["upper"] = s.hi;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

inline nlohmann::json search_json(const OrderSearch& search) {
  double ladder_max = search.ladder.empty() ? 0.0 : search.ladder.back().C;
  nlohmann::json j;
  j["verdict"] = verdict_label(search.verdict, ladder_max);
  if (search.verdict == OrderVerdict::Holds) j["C"] = search.C;
  nlohmann::json rungs = nlohmann::json::array();
  for (const OrderDecision& d : search.ladder) {
    nlohmann::json rung = {{"C", d.C},
                           {"verdict", to_string(d.verdict)},
                           {"checked", d.checked},
                           {"skipped", d.skipped}};
    if (d.witness_x >= 0) rung["witness_x"] = d.witness_x;
    rungs.push_back(std::move(rung));
  }
  j["ladder"] = std::move(rungs);
  return j;
}

inline nlohmann::json contraction_json(const std::string& group, const std::string& axis,
                                       const ContractionReport& report) {
  nlohmann::json samples = nlohmann::json::array();
  for (const ContractionSample& s : report.samples) {
    samples.push_back({{"center", s.center},
                       {"axis_dist", s.axis_dist},
                       {"ball_radius", s.ball_radius},
                       {"proj_diameter", s.proj_diameter},
                       {"projected", s.projected},
                       {"exhaustive", s.exhaustive},
                       {"clipped", s.clipped}});
  }
  return {{"group", group},
          {"axis", axis},
          {"D_estimate", report.D_estimate},
          {"samples", std::move(samples)},
          {"scale_limited", true}};
}

inline nlohmann::json witness_json(const MorseWitnessReport& rep) {
  nlohmann::json paths = nlohmann::json::array();
  for (const WitnessSample& s : rep.paths)
    paths.push_back({{"via", s.via}, {"length", s.length}, {"deviation", s.deviation}});
  return {{"endpoint_distance", rep.endpoint_distance},
          {"candidates", rep.candidates},
          {"max_deviation", rep.max_deviation},
          {"scale_limited", rep.scale_limited},
          {"paths", std::move(paths)}};
}

inline nlohmann::json chain_json(const ChainAuditResult& res) {
  nlohmann::json vertices = nlohmann::json::array();
  for (const ChainVertex& v : res.vertices)
    vertices.push_back({{"subgroup", v.subgroup},
                        {"label", v.label},
                        {"rep", v.rep_word},
                        {"members", v.members.size()}});
  nlohmann::json edges = nlohmann::json::array();
  for (const ChainEdge& e : res.edges)
    edges.push_back({{"u", e.u},
                     {"v", e.v},
                     {"intersection", e.intersection_size},
                     {"diameter_lb", e.diameter_lb},
                     {"diameter_unbounded", e.diameter_unbounded},
                     {"eta_connected", e.eta_connected},
                     {"base_gap", e.base_gap},
                     {"meets_base", e.meets_base},
                     {"qualifies", e.qualifies}});
  nlohmann::json pairs = nlohmann::json::array();
  for (const ChainPairRecord& p : res.pairs)
    pairs.push_back({{"from", p.from}, {"to", p.to}, {"chain", p.chain}, {"pass", p.pass}});
  return {{"tau", res.tau},
          {"eta", res.eta},
          {"base", res.base_word},
          {"vertices", std::move(vertices)},
          {"edges", std::move(edges)},
          {"pairs", std::move(pairs)},
          {"pass", res.pass},
          {"scale_limited", res.scale_limited}};
}

inline nlohmann::json cover_json(const CoverResult& res) {
  nlohmann::json steps = nlohmann::json::array();
  for (const CoverStep& s : res.steps)
    steps.push_back({{"x", s.x_index},
                     {"next", s.next_index},
                     {"label", s.label},
                     {"rep", s.rep_word},
                     {"dist_at_x", s.dist_at_x},
                     {"dist_at_next", s.dist_at_next}});
  return {{"tau", res.tau},
          {"geodesic_length", res.geodesic_length},
          {"steps", std::move(steps)},
          {"neighborhood_ok", res.neighborhood_ok},
          {"spacing_ok", res.spacing_ok},
          {"length_ok", res.length_ok}};
}

inline nlohmann::json quasiconvexity_json(const std::string& label, const QcReport& rep) {
  nlohmann::json witnesses = nlohmann::json::array();
  for (const QcWitness& w : rep.witnesses)
    witnesses.push_back({{"a", w.a}, {"b", w.b}, {"excursion", w.excursion}});
  return {{"subgroup", label},
          {"pass", rep.pass},
          {"C", rep.C},
          {"L", rep.L},
          {"members", rep.members},
          {"pairs_checked", rep.pairs_checked},
          {"skipped_far", rep.skipped_far},
          {"skipped_exit", rep.skipped_exit},
          {"strict_failures", rep.strict_failures},
          {"max_excursion", rep.max_excursion},
          {"retried", rep.retried},
          {"retry_failures", rep.retry_failures},
          {"exhaustive", rep.exhaustive},
          {"scale_limited", rep.scale_limited},
          {"witnesses", std::move(witnesses)}};
}

inline nlohmann::json network_divergence_json(const NetworkDivergenceReport& rep) {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& t : rep.subgroup_tables)
    subs.push_back({{"label", t.label}, {"model", t.model}, {"note", t.note}});
  double ladder_max = rep.search.ladder.empty() ? 0.0 : rep.search.ladder.back().C;
  nlohmann::json j;
  j["f"] = samples_json(rep.f);
  j["g"] = samples_json(rep.g);
  j["subgroups"] = std::move(subs);
  j["preceq"] = {{"C", rep.C}, {"verdict", verdict_label(rep.verdict, ladder_max)}};
  j["censored"] = rep.censored;
  if (!rep.note.empty()) j["note"] = rep.note;
  return j;
}

inline nlohmann::json acylindricity_json(const AcylindricityProfile& profile) {
  nlohmann::json points = nlohmann::json::array();
  for (const AcylindricityPoint& p : profile.points)
    points.push_back({{"r", p.r},
                      {"f_estimate", p.f_estimate},
                      {"witness", p.witness},
                      {"translates", p.translates},
                      {"censored", p.censored}});
  return {{"points", std::move(points)},
          {"censoring_radius", profile.censoring_radius},
          {"scale_limited", profile.scale_limited}};
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

struct RunManifest {
  std::string config_hash;  // FNV-1a of the canonicalized config text
  std::string tool_version = kToolVersion;
  int64_t wall_ms = 0;
  std::vector<std::string> censoring;  // artifacts containing censored data
  std::vector<std::string> files;      // every file the run emitted
  bool partial = false;                // true when a resource ceiling struck
  std::string error;
};

inline nlohmann::json manifest_json(const RunManifest& m) {
  nlohmann::json j;
  j["config_hash"] = m.config_hash;
  j["tool_version"] = m.tool_version;
  j["wall_ms"] = m.wall_ms;
  j["censoring"] = m.censoring;
  j["files"] = m.files;
  j["partial"] = m.partial;
  if (!m.error.empty()) j["error"] = m.error;
  return j;
}

inline std::string hash_config(const nlohmann::json& config) {
  return hex64(fnv1a64(config.dump()));
}

}  // namespace divlab

#endif  // DIVLAB_IO_HPP
