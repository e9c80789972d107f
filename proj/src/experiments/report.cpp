#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <Eigen/Core>

#include "kef/experiments.hpp"

namespace fs = std::filesystem;

namespace kef::exp {

bool Check::pass() const { return std::isfinite(value) && value <= bound; }

bool CaseRecord::pass() const {
  if (!diagnostic.empty()) return false;
  for (const auto& c : residuals)
    if (!c.pass()) return false;
  for (const auto& c : margins)
    if (!(std::isfinite(c.value) && c.value >= c.bound)) return false;
  return true;
}

Summary SuiteReport::summary() const {
  Summary s;
  s.cases = cases.size();
  s.min_margin = INFINITY;
  for (const auto& c : cases) {
    if (c.pass()) ++s.passed;
    for (const auto& r : c.residuals) s.max_residual = std::max(s.max_residual, r.value);
    for (const auto& m : c.margins) s.min_margin = std::min(s.min_margin, m.value);
  }
  if (!std::isfinite(s.min_margin)) s.min_margin = 0.0;
  s.pass = s.passed == s.cases;
  return s;
}

namespace {

// JSON has no NaN or infinity; they travel as strings.
Json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double from_num(const Json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan") return NAN;
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    throw ConfigError("report: unexpected string '" + s + "' where a number was expected");
  }
  return j.get<double>();
}

Json checks_json(const std::vector<Check>& v, const char* bound_name) {
  Json a = Json::array();
  for (const auto& c : v) a.push_back({{"name", c.name}, {"value", num(c.value)}, {bound_name, num(c.bound)}});
  return a;
}

std::vector<Check> checks_from(const Json& a, const char* bound_name) {
  std::vector<Check> v;
  for (const auto& c : a) v.push_back({c.at("name").get<std::string>(), from_num(c.at("value")), from_num(c.at(bound_name))});
  return v;
}

bool same(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return std::memcmp(&a, &b, sizeof a) == 0 || a == b;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string stamp_now() {
  auto now = std::chrono::system_clock::now();
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d%02d%02dT%02d%02d%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, int(ms));
  return buf;
}

}  // namespace

Json to_json(const CaseRecord& c) {
  Json j;
  j["id"] = c.id;
  j["inputs"] = c.inputs;
  Json v = Json::object();
  for (const auto& [k, x] : c.values) v[k] = num(x);
  j["values"] = v;
  j["residuals"] = checks_json(c.residuals, "tolerance");
  j["margins"] = checks_json(c.margins, "floor");
  j["pass"] = c.pass();
  j["diagnostic"] = c.diagnostic;
  if (!c.series.empty()) {
    Json s = Json::object();
    for (const auto& [name, ser] : c.series) {
      Json rows = Json::array();
      for (const auto& r : ser.rows) {
        Json row = Json::array();
        for (double x : r) row.push_back(num(x));
        rows.push_back(row);
      }
      s[name] = {{"columns", ser.columns}, {"rows", rows}};
    }
    j["series"] = s;
  }
  return j;
}

CaseRecord case_from_json(const Json& j) {
  CaseRecord c;
  c.id = j.at("id").get<std::string>();
  c.inputs = j.at("inputs");
  for (const auto& [k, x] : j.at("values").items()) c.values.emplace_back(k, from_num(x));
  c.residuals = checks_from(j.at("residuals"), "tolerance");
  c.margins = checks_from(j.at("margins"), "floor");
  c.diagnostic = j.at("diagnostic").get<std::string>();
  if (j.contains("series")) {
    for (const auto& [name, s] : j.at("series").items()) {
      Series ser;
      ser.columns = s.at("columns").get<std::vector<std::string>>();
      for (const auto& r : s.at("rows")) {
        std::vector<double> row;
        for (const auto& x : r) row.push_back(from_num(x));
        ser.rows.push_back(std::move(row));
      }
      c.series.emplace_back(name, std::move(ser));
    }
  }
  return c;
}

Json to_json(const SuiteReport& r) {
  Json j;
  j["suite"] = r.suite;
  Summary s = r.summary();
  j["summary"] = {{"pass", s.pass},
                  {"cases", s.cases},
                  {"passed", s.passed},
                  {"max_residual", num(s.max_residual)},
                  {"min_margin", num(s.min_margin)}};
  j["config"] = r.config;
  Json cases = Json::array();
  for (const auto& c : r.cases) cases.push_back(to_json(c));
  j["cases"] = cases;
  j["environment"] = r.environment;
  j["timing"] = r.timing;
  return j;
}

SuiteReport report_from_json(const Json& j) {
  SuiteReport r;
  r.suite = j.at("suite").get<std::string>();
  r.config = j.at("config");
  for (const auto& c : j.at("cases")) r.cases.push_back(case_from_json(c));
  r.environment = j.value("environment", Json::object());
  r.timing = j.value("timing", Json::object());
  return r;
}

std::string to_csv(const SuiteReport& r) {
  std::ostringstream os;
  os << "case,field,name,value,bound,pass\n";
  for (const auto& c : r.cases) {
    for (const auto& [k, v] : c.values) os << c.id << ",value," << k << "," << fmt(v) << ",,\n";
    for (const auto& x : c.residuals)
      os << c.id << ",residual," << x.name << "," << fmt(x.value) << "," << fmt(x.bound) << ","
         << (x.pass() ? 1 : 0) << "\n";
    for (const auto& x : c.margins)
      os << c.id << ",margin," << x.name << "," << fmt(x.value) << "," << fmt(x.bound) << ","
         << (x.value >= x.bound ? 1 : 0) << "\n";
    os << c.id << ",case,pass,,," << (c.pass() ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string series_csv(const Series& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.columns.size(); ++i) os << (i ? "," : "") << s.columns[i];
  os << "\n";
  for (const auto& r : s.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt(r[i]);
    os << "\n";
  }
  return os.str();
}

bool same_numbers(const SuiteReport& a, const SuiteReport& b, std::string* first_difference) {
  auto differ = [&](const std::string& what) {
    if (first_difference) *first_difference = what;
    return false;
  };
  if (a.suite != b.suite) return differ("suite");
  Json ca = a.config, cb = b.config;
  ca.erase("run.workers");
  cb.erase("run.workers");
  if (ca != cb) return differ("config");
  if (a.cases.size() != b.cases.size()) return differ("case count");
  for (std::size_t i = 0; i < a.cases.size(); ++i) {
    const auto &x = a.cases[i], &y = b.cases[i];
    if (x.id != y.id || x.inputs != y.inputs || x.diagnostic != y.diagnostic) return differ(x.id);
    if (x.values.size() != y.values.size()) return differ(x.id + " values");
    for (std::size_t k = 0; k < x.values.size(); ++k)
      if (x.values[k].first != y.values[k].first || !same(x.values[k].second, y.values[k].second))
        return differ(x.id + " " + x.values[k].first);
    auto cmp = [&](const std::vector<Check>& p, const std::vector<Check>& q) {
      if (p.size() != q.size()) return false;
      for (std::size_t k = 0; k < p.size(); ++k)
        if (p[k].name != q[k].name || !same(p[k].value, q[k].value) || !same(p[k].bound, q[k].bound))
          return false;
      return true;
    };
    if (!cmp(x.residuals, y.residuals)) return differ(x.id + " residuals");
    if (!cmp(x.margins, y.margins)) return differ(x.id + " margins");
    if (x.series.size() != y.series.size()) return differ(x.id + " series");
    for (std::size_t k = 0; k < x.series.size(); ++k) {
      const auto &s = x.series[k].second, &t = y.series[k].second;
      if (x.series[k].first != y.series[k].first || s.columns != t.columns || s.rows.size() != t.rows.size())
        return differ(x.id + " series");
      for (std::size_t r = 0; r < s.rows.size(); ++r) {
        if (s.rows[r].size() != t.rows[r].size()) return differ(x.id + " series");
        for (std::size_t q = 0; q < s.rows[r].size(); ++q)
          if (!same(s.rows[r][q], t.rows[r][q])) return differ(x.id + " series");
      }
    }
  }
  return true;
}

void write_atomic(const std::string& path, const std::string& content) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) throw Error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, p);
}

std::string write_report(const SuiteReport& r, const SuiteConfig& cfg) {
  fs::path dir = fs::path(cfg.output_dir) / r.suite;
  fs::create_directories(dir);
  std::string stamp = stamp_now();
  fs::path base = dir / stamp;
  for (int k = 1; fs::exists(fs::path(base.string() + ".json")); ++k)
    base = dir / (stamp + "-" + std::to_string(k));
  std::string json_path = base.string() + ".json";
  SuiteReport out = r;
  out.environment["timestamp"] = stamp;
  if (cfg.format != "csv") write_atomic(json_path, to_json(out).dump(1) + "\n");
  if (cfg.format != "json") {
    write_atomic(base.string() + ".csv", to_csv(out));
    for (const auto& c : out.cases)
      for (const auto& [name, s] : c.series)
        write_atomic(base.string() + "." + c.id + "." + name + ".csv", series_csv(s));
  }

  fs::path index = fs::path(cfg.output_dir) / "index.json";
  Json idx = Json::object();
  if (fs::exists(index)) {
    std::ifstream f(index);
    try {
      idx = Json::parse(f);
    } catch (const Json::exception&) {
      idx = Json::object();
    }
  }
  Summary s = out.summary();
  idx[r.suite] = {{"pass", s.pass},
                  {"max_residual", num(s.max_residual)},
                  {"min_margin", num(s.min_margin)},
                  {"cases", s.cases},
                  {"passed", s.passed},
                  {"timestamp", stamp},
                  {"report", cfg.format != "csv" ? json_path : base.string() + ".csv"}};
  write_atomic(index.string(), idx.dump(1) + "\n");
  return json_path;
}

SuiteReport read_report(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read report '" + path + "'");
  try {
    return report_from_json(Json::parse(f));
  } catch (const Json::exception& e) {
    throw ConfigError("malformed report '" + path + "': " + e.what());
  }
}

std::vector<std::string> plot_columns(const std::string& kind) {
  if (kind == "continuity") return {"t", "c_t", "I-J", "E_0", "E_1", "F"};
  if (kind == "witness") return {"b", "I", "E_n"};
  throw ConfigError("unknown plot kind '" + kind + "' (expected continuity or witness)");
}

std::vector<std::string> emit_plot_data(const SuiteReport& r, const std::string& kind,
                                        const std::string& dir) {
  std::vector<std::string> header = plot_columns(kind);
  const std::string series_name = kind == "continuity" ? "trajectory" : "sweep";
  fs::create_directories(dir);
  auto write = [&](const std::string& stem, const std::vector<std::string>& cols,
                   const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    os << "#";
    for (const auto& col : cols) os << " " << col;
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? " " : "") << fmt(row[i]);
      os << "\n";
    }
    std::string path = (fs::path(dir) / (stem + ".dat")).string();
    write_atomic(path, os.str());
    return path;
  };
  std::vector<std::string> out;
  for (const auto& c : r.cases)
    for (const auto& [name, s] : c.series) {
      if (name != series_name) continue;
      // schema columns picked by name; E_0..E_n follow the series itself
      std::vector<std::string> cols;
      for (const auto& h : header) {
        if (h == "E_0" && kind == "continuity") {
          for (const auto& sc : s.columns)
            if (sc.rfind("E_", 0) == 0) cols.push_back(sc);
        } else if (h.rfind("E_", 0) != 0 || kind != "continuity") {
          cols.push_back(h);
        }
      }
      std::vector<std::vector<double>> rows;
      for (const auto& row : s.rows) {
        std::vector<double> o;
        for (const auto& col : cols) {
          auto it = std::find(s.columns.begin(), s.columns.end(), col);
          o.push_back(it == s.columns.end() ? NAN : row[it - s.columns.begin()]);
        }
        rows.push_back(std::move(o));
      }
      out.push_back(write(kind + "." + c.id, cols, rows));
    }
  if (out.empty()) out.push_back(write(kind, header, {}));
  return out;
}

}  // namespace kef::exp
