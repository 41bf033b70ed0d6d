#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "weibtail/distributions.hpp"
#include "weibtail/errors.hpp"
#include "weibtail/simulation.hpp"

namespace weibtail {

// Shortest round-trip, locale-independent representation.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string to_string(const DistributionSpec& spec) {
  switch (spec.family) {
    case Family::kAbsNormal:
      return "absnormal";
    case Family::kGamma:
      return "gamma:" + format_double(spec.a) + "," + format_double(spec.b);
    case Family::kWeibull:
      return "weibull:" + format_double(spec.a) + "," + format_double(spec.b);
    case Family::kDClass:
      return "dclass:" + format_double(spec.a) + "," + format_double(spec.b);
  }
  throw DomainError("to_string: unknown family");
}

// Filesystem-safe tag, e.g. "gamma_0.25_0.25".
inline std::string dist_tag(const DistributionSpec& spec) {
  std::string s = to_string(spec);
  for (char& c : s) {
    if (c == ':' || c == ',') c = '_';
  }
  return s;
}

// One numeric per line; '#' starts a comment, blank lines are skipped.
inline std::vector<double> read_data(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string_view sv(line);
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t' || sv.front() == '\r')) {
      sv.remove_prefix(1);
    }
    while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t' || sv.back() == '\r')) {
      sv.remove_suffix(1);
    }
    if (sv.empty()) continue;
    out.push_back(detail::parse_double_strict(
        sv, ("read_data: line " + std::to_string(lineno)).c_str()));
  }
  return out;
}

inline std::vector<double> read_data_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file: " + path.string());
  return read_data(in);
}

// Flat view of one tau slice of a CurveOutput; what the CSV holds.
struct CurveTable {
  std::vector<double> tau;
  std::vector<std::size_t> k;
  std::vector<double> median_classic;
  std::vector<double> median_reduced;
  std::vector<double> mse_classic;
  std::vector<double> mse_reduced;
  std::vector<double> true_log_q;

  bool operator==(const CurveTable&) const = default;
};

inline CurveTable curve_table(const CurveOutput& out, std::size_t tau_index) {
  CurveTable t;
  const double tau = out.plan.taus.at(tau_index);
  const double tq = out.true_log_quantile.at(tau_index);
  for (std::size_t ki = 0; ki < out.plan.k_grid.size(); ++ki) {
    const auto& cell = out.cells[tau_index][ki];
    t.tau.push_back(tau);
    t.k.push_back(out.plan.k_grid[ki]);
    t.median_classic.push_back(cell.median_classic);
    t.median_reduced.push_back(cell.median_reduced);
    t.mse_classic.push_back(cell.mse_classic);
    t.mse_reduced.push_back(cell.mse_reduced);
    t.true_log_q.push_back(tq);
  }
  return t;
}

inline constexpr std::string_view kCurveCsvHeader =
    "tau,k,median_classic,median_reduced,mse_classic,mse_reduced,true_log_q";

inline void write_curves_csv(const CurveTable& t, std::ostream& os) {
  os << kCurveCsvHeader << '\n';
  for (std::size_t i = 0; i < t.k.size(); ++i) {
    os << format_double(t.tau[i]) << ',' << t.k[i] << ','
       << format_double(t.median_classic[i]) << ','
       << format_double(t.median_reduced[i]) << ','
       << format_double(t.mse_classic[i]) << ','
       << format_double(t.mse_reduced[i]) << ','
       << format_double(t.true_log_q[i]) << '\n';
  }
}

inline CurveTable parse_curves_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("curves csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCurveCsvHeader) {
    throw IoError("curves csv: unexpected header '" + line + "'");
  }
  CurveTable t;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> cols;
    std::string_view sv(line);
    for (;;) {
      const auto comma = sv.find(',');
      cols.push_back(sv.substr(0, comma));
      if (comma == std::string_view::npos) break;
      sv = sv.substr(comma + 1);
    }
    if (cols.size() != 7) {
      throw IoError("curves csv: line " + std::to_string(lineno) +
                    " has " + std::to_string(cols.size()) + " columns");
    }
    const char* who = "curves csv";
    t.tau.push_back(detail::parse_double_strict(cols[0], who));
    t.k.push_back(static_cast<std::size_t>(
        detail::parse_double_strict(cols[1], who)));
    t.median_classic.push_back(detail::parse_double_strict(cols[2], who));
    t.median_reduced.push_back(detail::parse_double_strict(cols[3], who));
    t.mse_classic.push_back(detail::parse_double_strict(cols[4], who));
    t.mse_reduced.push_back(detail::parse_double_strict(cols[5], who));
    t.true_log_q.push_back(detail::parse_double_strict(cols[6], who));
  }
  return t;
}

inline nlohmann::ordered_json boxplot_json(const BoxplotOutput::PerTau& bt) {
  nlohmann::ordered_json j;
  j["tau"] = bt.tau_exponent;
  j["k_opt"] = bt.k_opt;
  j["k_hat"] = bt.k_hat;
  j["log_classic_at_k_opt"] = bt.log_classic_at_k_opt;
  j["log_classic_at_k_hat"] = bt.log_classic_at_k_hat;
  j["true_log_quantile"] = bt.true_log_quantile;
  return j;
}

inline BoxplotOutput::PerTau boxplot_from_json(const nlohmann::json& j) {
  BoxplotOutput::PerTau bt;
  bt.tau_exponent = j.at("tau").get<double>();
  bt.k_opt = j.at("k_opt").get<std::size_t>();
  bt.k_hat = j.at("k_hat").get<std::vector<std::size_t>>();
  bt.log_classic_at_k_opt =
      j.at("log_classic_at_k_opt").get<std::vector<double>>();
  bt.log_classic_at_k_hat =
      j.at("log_classic_at_k_hat").get<std::vector<double>>();
  bt.true_log_quantile = j.at("true_log_quantile").get<double>();
  return bt;
}

inline nlohmann::ordered_json manifest_json(const SimPlan& plan) {
  nlohmann::ordered_json j;
  j["distribution"] = to_string(plan.spec);
  j["n"] = plan.n;
  j["replicates"] = plan.replicates;
  j["taus"] = plan.taus;
  j["k_grid"] = plan.k_grid;
  j["rho_plugin"] = plan.rho_plugin;
  j["seed"] = plan.seed;
  return j;
}

inline SimPlan plan_from_manifest(const nlohmann::json& j) {
  SimPlan plan;
  plan.spec = parse_distribution(j.at("distribution").get<std::string>());
  plan.n = j.at("n").get<std::size_t>();
  plan.replicates = j.at("replicates").get<std::size_t>();
  plan.taus = j.at("taus").get<std::vector<double>>();
  plan.k_grid = j.at("k_grid").get<std::vector<std::size_t>>();
  plan.rho_plugin = j.at("rho_plugin").get<double>();
  plan.seed = j.at("seed").get<std::uint64_t>();
  return plan;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open output file: " + path.string());
  return os;
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace detail

// Writes curves_<dist>_<tau>.csv per tau plus manifest.json; returns the
// file names written.
inline std::vector<std::string> write_simulation_outputs(
    const CurveOutput& out, const std::filesystem::path& dir) {
  detail::ensure_directory(dir);
  std::vector<std::string> files;
  const std::string tag = dist_tag(out.plan.spec);
  for (std::size_t t = 0; t < out.plan.taus.size(); ++t) {
    const std::string name =
        "curves_" + tag + "_" + format_double(out.plan.taus[t]) + ".csv";
    auto os = detail::open_output(dir / name);
    write_curves_csv(curve_table(out, t), os);
    if (!os) throw IoError("write failed: " + (dir / name).string());
    files.push_back(name);
  }
  auto ms = detail::open_output(dir / "manifest.json");
  ms << manifest_json(out.plan).dump(2) << '\n';
  files.push_back("manifest.json");
  return files;
}

// Writes boxplot_<dist>_<tau>.json per tau plus manifest.json.
inline std::vector<std::string> write_boxplot_outputs(
    const BoxplotOutput& out, const std::filesystem::path& dir) {
  detail::ensure_directory(dir);
  std::vector<std::string> files;
  const std::string tag = dist_tag(out.plan.spec);
  for (const auto& bt : out.per_tau) {
    const std::string name =
        "boxplot_" + tag + "_" + format_double(bt.tau_exponent) + ".json";
    auto os = detail::open_output(dir / name);
    os << boxplot_json(bt).dump(2) << '\n';
    if (!os) throw IoError("write failed: " + (dir / name).string());
    files.push_back(name);
  }
  auto ms = detail::open_output(dir / "manifest.json");
  ms << manifest_json(out.plan).dump(2) << '\n';
  files.push_back("manifest.json");
  return files;
}

}  // namespace weibtail
