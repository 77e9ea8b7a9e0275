#include "besq/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace besq {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("malformed number: '" + std::string(s) + "'");
  return v;
}

}  // namespace

void write_path_csv(std::ostream& os, const PathRecord& path) {
  const char* prefix = path.view == PathView::sympolys ? "e" : "X";
  os << "t";
  for (int i = 1; i <= path.p; ++i) os << ',' << prefix << i;
  os << '\n';
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    os << format_double(path.times[k]);
    for (double v : path.states[k]) os << ',' << format_double(v);
    os << '\n';
  }
}

PathRecord read_path_csv(std::istream& is) {
  PathRecord rec;
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty CSV");
  {
    std::stringstream hs(line);
    std::string col;
    int ncols = 0;
    while (std::getline(hs, col, ',')) {
      if (ncols == 0) {
        if (col != "t") throw std::invalid_argument("CSV header must start with t");
      } else if (ncols == 1) {
        rec.view = col.starts_with("e") ? PathView::sympolys : PathView::particles;
      }
      ++ncols;
    }
    rec.p = ncols - 1;
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(parse_double(cell));
    if (static_cast<int>(row.size()) != rec.p + 1)
      throw std::invalid_argument("CSV row width mismatch");
    rec.times.push_back(row[0]);
    rec.states.emplace_back(row.begin() + 1, row.end());
  }
  return rec;
}

nlohmann::json events_json(const PathRecord& path) {
  nlohmann::json events = nlohmann::json::array();
  for (const Event& e : path.events) {
    nlohmann::json j;
    j["kind"] = event_kind_name(e.kind);
    j["time"] = e.time;
    if (e.i > 0) j["i"] = e.i;
    if (e.j > 0) j["j"] = e.j;
    j["value"] = e.value;
    events.push_back(std::move(j));
  }
  nlohmann::json out;
  out["events"] = std::move(events);
  out["aborted"] = path.aborted;
  if (path.aborted) out["abort_reason"] = path.abort_reason;
  // Grid-time detection bias: event times are right-biased by up to one step.
  out["time_bias"] = "right-biased by at most one base step";
  return out;
}

nlohmann::json path_json(const PathRecord& path) {
  nlohmann::json out;
  switch (path.view) {
    case PathView::particles: out["view"] = "particles"; break;
    case PathView::sympolys: out["view"] = "sympolys"; break;
    case PathView::eigenvalues: out["view"] = "eigenvalues"; break;
  }
  out["p"] = path.p;
  out["times"] = path.times;
  out["states"] = path.states;
  if (!path.aux.empty()) out["aux"] = path.aux;
  out.update(events_json(path));
  return out;
}

nlohmann::json report_json(const ClassificationReport& report) {
  nlohmann::json j;
  j["n_star"] = report.n_star;
  j["rk_plus"] = report.rk.plus;
  j["rk_minus"] = report.rk.minus;
  j["rk"] = report.rk.nonzero;
  j["unique_strong"] = report.unique_strong;
  j["nonneg_exists"] = report.nonneg_exists;
  j["structure_n"] = report.structure_n;
  j["hits_zero"] = nlohmann::json::array();
  j["goes_negative"] = nlohmann::json::array();
  for (auto v : report.hits_zero) j["hits_zero"].push_back(v != 0);
  for (auto v : report.goes_negative) j["goes_negative"].push_back(v != 0);
  j["alpha_reflected"] = report.alpha_reflected;
  return j;
}

nlohmann::json summary_json(const McSummary& summary) {
  nlohmann::json j;
  j["estimate"] = summary.estimate;
  j["std_error"] = summary.std_error;
  j["ci95"] = {summary.ci_lo, summary.ci_hi};
  j["n_reps"] = summary.n_reps;
  j["completion_rate"] = summary.completion_rate;
  return j;
}

nlohmann::json hitting_json(const HittingTimes& ht, double horizon) {
  auto encode = [&](const std::vector<double>& t, const std::vector<std::uint8_t>& censored) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
      nlohmann::json e;
      e["time"] = censored[i] ? horizon : t[i];
      e["censored"] = censored[i] != 0;
      arr.push_back(std::move(e));
    }
    return arr;
  };
  nlohmann::json j;
  j["t0"] = encode(ht.t0, ht.t0_censored);
  j["t_minus"] = encode(ht.t_minus, ht.t_minus_censored);
  j["warnings"] = ht.warnings;
  return j;
}

}  // namespace besq
