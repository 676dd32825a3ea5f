#include "lpsens/report.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lpsens/error.hpp"
#include "lpsens/weights.hpp"

namespace lpsens {

std::string to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::Leverage: return "leverage";
    case WeightKind::Lewis: return "lewis";
    case WeightKind::Sensitivity: return "sensitivity";
    case WeightKind::Estimate: return "estimate";
  }
  return "unknown";
}

ErrorMetrics log_ratio_metrics(const Vector& approx, const Vector& truth) {
  if (approx.size() != truth.size()) throw InputError("log_ratio_metrics: length mismatch");
  ErrorMetrics m;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < approx.size(); ++i) {
    const double a = approx(i);
    const double t = truth(i);
    if (!(a > 0.0) || !(t > 0.0) || !std::isfinite(a) || !std::isfinite(t)) continue;
    const double r = std::abs(std::log(a / t));
    sum += r;
    m.max_abs_log_ratio = std::max(m.max_abs_log_ratio, r);
    ++m.compared;
  }
  if (m.compared > 0) m.mean_abs_log_ratio = sum / static_cast<double>(m.compared);
  return m;
}

namespace {

using Json = nlohmann::ordered_json;

// JSON has no literal for inf or nan; those travel as strings.
Json encode(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double decode(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw InputError("report: bad number '" + s + "'");
}

Json encode(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(encode(v(i)));
  return arr;
}

Vector decode_vector(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = decode(j[i]);
  return v;
}

Json encode(const NamedValues& values) {
  Json obj = Json::object();
  for (const auto& [k, v] : values) obj[k] = encode(v);
  return obj;
}

NamedValues decode_named(const Json& j) {
  NamedValues out;
  for (const auto& [k, v] : j.items()) out.emplace_back(k, decode(v));
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InputError("report: bad number '" + s + "'");
  }
  return v;
}

std::size_t parse_size(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InputError("report: bad integer '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Splits one line of the long-format CSV, honouring double quotes.
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_vector(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!same_bits(a(i), b(i))) return false;
  }
  return true;
}

bool same_named(const NamedValues& a, const NamedValues& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first || !same_bits(a[i].second, b[i].second)) return false;
  }
  return true;
}

bool same_optional(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || same_bits(*a, *b);
}

}  // namespace

std::string to_json(const SensitivityReport& r) {
  Json j;
  j["command"] = r.command;
  j["input"] = {{"path", r.input}, {"n", r.n}, {"d", r.d}};
  j["p"] = encode(r.p);
  j["method"] = r.method;
  j["seed"] = r.seed;
  j["config"] = encode(r.config);
  if (r.total) j["total"] = encode(*r.total);
  if (r.max) j["max"] = encode(*r.max);
  if (r.estimates) j["estimates"] = encode(*r.estimates);
  if (r.oracle) j["oracle"] = encode(*r.oracle);
  if (r.oracle_total) j["oracle_total"] = encode(*r.oracle_total);
  if (r.oracle_max) j["oracle_max"] = encode(*r.oracle_max);
  if (r.metrics) {
    j["metrics"] = {{"mean_abs_log_ratio", encode(r.metrics->mean_abs_log_ratio)},
                    {"max_abs_log_ratio", encode(r.metrics->max_abs_log_ratio)},
                    {"compared", r.metrics->compared}};
  }
  j["diagnostics"] = encode(r.diagnostics);
  j["timings"] = encode(r.timings);
  if (!r.table.columns.empty()) {
    Json rows = Json::array();
    for (const auto& row : r.table.rows) {
      Json jr = Json::array();
      for (double v : row) jr.push_back(encode(v));
      rows.push_back(jr);
    }
    j["table"] = {{"columns", r.table.columns}, {"rows", rows}};
  }
  return j.dump(2) + "\n";
}

SensitivityReport report_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("report: invalid JSON: ") + e.what());
  }
  try {
    SensitivityReport r;
    r.command = j.at("command").get<std::string>();
    r.input = j.at("input").at("path").get<std::string>();
    r.n = j.at("input").at("n").get<std::size_t>();
    r.d = j.at("input").at("d").get<std::size_t>();
    r.p = decode(j.at("p"));
    r.method = j.at("method").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config = decode_named(j.at("config"));
    if (j.contains("total")) r.total = decode(j["total"]);
    if (j.contains("max")) r.max = decode(j["max"]);
    if (j.contains("estimates")) r.estimates = decode_vector(j["estimates"]);
    if (j.contains("oracle")) r.oracle = decode_vector(j["oracle"]);
    if (j.contains("oracle_total")) r.oracle_total = decode(j["oracle_total"]);
    if (j.contains("oracle_max")) r.oracle_max = decode(j["oracle_max"]);
    if (j.contains("metrics")) {
      const Json& m = j["metrics"];
      r.metrics = ErrorMetrics{decode(m.at("mean_abs_log_ratio")),
                               decode(m.at("max_abs_log_ratio")),
                               m.at("compared").get<std::size_t>()};
    }
    r.diagnostics = decode_named(j.at("diagnostics"));
    r.timings = decode_named(j.at("timings"));
    if (j.contains("table")) {
      r.table.columns = j["table"].at("columns").get<std::vector<std::string>>();
      for (const auto& row : j["table"].at("rows")) {
        std::vector<double> values;
        for (const auto& v : row) values.push_back(decode(v));
        r.table.rows.push_back(std::move(values));
      }
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("report: missing or mistyped field: ") + e.what());
  }
}

std::string to_csv(const SensitivityReport& r) {
  std::ostringstream out;
  auto line = [&](const std::string& section, const std::string& key, const std::string& index,
                  const std::string& value) {
    out << section << ',' << quote(key) << ',' << index << ',' << quote(value) << '\n';
  };
  auto scalar = [&](const std::string& key, double v) { line("scalar", key, "", format_double(v)); };
  auto vec = [&](const std::string& section, const Vector& v) {
    line(section, "length", "", std::to_string(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      line(section, "", std::to_string(i), format_double(v(i)));
    }
  };

  out << "section,key,index,value\n";
  line("meta", "command", "", r.command);
  line("meta", "input", "", r.input);
  line("meta", "method", "", r.method);
  line("meta", "n", "", std::to_string(r.n));
  line("meta", "d", "", std::to_string(r.d));
  line("meta", "seed", "", std::to_string(r.seed));
  scalar("p", r.p);
  for (const auto& [k, v] : r.config) line("config", k, "", format_double(v));
  if (r.total) scalar("total", *r.total);
  if (r.max) scalar("max", *r.max);
  if (r.oracle_total) scalar("oracle_total", *r.oracle_total);
  if (r.oracle_max) scalar("oracle_max", *r.oracle_max);
  if (r.metrics) {
    line("metrics", "mean_abs_log_ratio", "", format_double(r.metrics->mean_abs_log_ratio));
    line("metrics", "max_abs_log_ratio", "", format_double(r.metrics->max_abs_log_ratio));
    line("metrics", "compared", "", std::to_string(r.metrics->compared));
  }
  if (r.estimates) vec("estimates", *r.estimates);
  if (r.oracle) vec("oracle", *r.oracle);
  for (const auto& [k, v] : r.diagnostics) line("diagnostics", k, "", format_double(v));
  for (const auto& [k, v] : r.timings) line("timings", k, "", format_double(v));
  for (std::size_t c = 0; c < r.table.columns.size(); ++c) {
    line("table_columns", r.table.columns[c], std::to_string(c), "");
  }
  for (std::size_t i = 0; i < r.table.rows.size(); ++i) {
    for (std::size_t c = 0; c < r.table.rows[i].size(); ++c) {
      line("table", std::to_string(i), std::to_string(c), format_double(r.table.rows[i][c]));
    }
  }
  return out.str();
}

SensitivityReport report_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  if (!std::getline(in, raw) || raw != "section,key,index,value") {
    throw InputError("report: CSV header must be section,key,index,value");
  }
  SensitivityReport r;
  std::optional<ErrorMetrics> metrics;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.empty()) continue;
    const auto f = split_fields(raw);
    if (f.size() != 4) {
      throw InputError("report: line " + std::to_string(line_no) + " needs 4 fields");
    }
    const std::string& section = f[0];
    const std::string& key = f[1];
    const std::string& value = f[3];
    if (section == "meta") {
      if (key == "command") r.command = value;
      else if (key == "input") r.input = value;
      else if (key == "method") r.method = value;
      else if (key == "n") r.n = parse_size(value);
      else if (key == "d") r.d = parse_size(value);
      else if (key == "seed") r.seed = parse_size(value);
    } else if (section == "scalar") {
      const double v = parse_double(value);
      if (key == "p") r.p = v;
      else if (key == "total") r.total = v;
      else if (key == "max") r.max = v;
      else if (key == "oracle_total") r.oracle_total = v;
      else if (key == "oracle_max") r.oracle_max = v;
    } else if (section == "config") {
      r.config.emplace_back(key, parse_double(value));
    } else if (section == "metrics") {
      if (!metrics) metrics.emplace();
      if (key == "mean_abs_log_ratio") metrics->mean_abs_log_ratio = parse_double(value);
      else if (key == "max_abs_log_ratio") metrics->max_abs_log_ratio = parse_double(value);
      else if (key == "compared") metrics->compared = parse_size(value);
    } else if (section == "estimates" || section == "oracle") {
      std::optional<Vector>& target = section == "estimates" ? r.estimates : r.oracle;
      if (key == "length") {
        target = Vector::Zero(static_cast<Eigen::Index>(parse_size(value)));
      } else {
        const std::size_t i = parse_size(f[2]);
        if (!target || i >= static_cast<std::size_t>(target->size())) {
          throw InputError("report: line " + std::to_string(line_no) + " index out of range");
        }
        (*target)(static_cast<Eigen::Index>(i)) = parse_double(value);
      }
    } else if (section == "diagnostics") {
      r.diagnostics.emplace_back(key, parse_double(value));
    } else if (section == "timings") {
      r.timings.emplace_back(key, parse_double(value));
    } else if (section == "table_columns") {
      r.table.columns.push_back(key);
    } else if (section == "table") {
      const std::size_t i = parse_size(key);
      if (i >= r.table.rows.size()) r.table.rows.resize(i + 1);
      r.table.rows[i].push_back(parse_double(value));
    } else {
      throw InputError("report: unknown section '" + section + "' on line " +
                       std::to_string(line_no));
    }
  }
  r.metrics = metrics;
  return r;
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void save_report(const std::string& path, const SensitivityReport& report) {
  std::string text;
  if (ends_with(path, ".json")) {
    text = to_json(report);
  } else if (ends_with(path, ".csv")) {
    text = to_csv(report);
  } else {
    throw InputError("report path must end in .json or .csv: " + path);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

SensitivityReport load_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (ends_with(path, ".json")) return report_from_json(buf.str());
  if (ends_with(path, ".csv")) return report_from_csv(buf.str());
  throw InputError("report path must end in .json or .csv: " + path);
}

void print_report(std::ostream& out, const SensitivityReport& r) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(6);
  out << "command   " << r.command << "\n";
  out << "input     " << r.input << " (" << r.n << " x " << r.d << ")\n";
  out << "p         " << r.p << "\n";
  if (!r.method.empty()) out << "method    " << r.method << "\n";
  out << "seed      " << r.seed << "\n";
  for (const auto& [k, v] : r.config) out << "  " << std::left << std::setw(20) << k << v << "\n";
  if (r.total) out << "total     " << *r.total << "\n";
  if (r.max) out << "max       " << *r.max << "\n";
  if (r.oracle_total) out << "exact total  " << *r.oracle_total << "\n";
  if (r.oracle_max) out << "exact max    " << *r.oracle_max << "\n";
  if (r.metrics) {
    out << "|log ratio| mean " << r.metrics->mean_abs_log_ratio << ", max "
        << r.metrics->max_abs_log_ratio << " over " << r.metrics->compared << " rows\n";
  }
  if (r.estimates) {
    const Vector& e = *r.estimates;
    const Eigen::Index shown = std::min<Eigen::Index>(e.size(), 10);
    out << "estimates (" << e.size() << " rows";
    if (shown < e.size()) out << ", first " << shown;
    out << ")\n";
    for (Eigen::Index i = 0; i < shown; ++i) {
      out << "  " << std::setw(6) << i << "  " << e(i);
      if (r.oracle) out << "  exact " << (*r.oracle)(i);
      out << "\n";
    }
  } else if (r.oracle) {
    out << "exact values (" << r.oracle->size() << ")\n";
    const Eigen::Index shown = std::min<Eigen::Index>(r.oracle->size(), 10);
    for (Eigen::Index i = 0; i < shown; ++i) {
      out << "  " << std::setw(6) << i << "  " << (*r.oracle)(i) << "\n";
    }
  }
  if (!r.table.columns.empty()) {
    for (const auto& c : r.table.columns) out << std::setw(18) << c;
    out << "\n";
    for (const auto& row : r.table.rows) {
      for (double v : row) out << std::setw(18) << v;
      out << "\n";
    }
  }
  for (const auto& [k, v] : r.diagnostics) {
    out << "  " << std::left << std::setw(20) << k << v << "\n";
  }
  for (const auto& [k, v] : r.timings) out << "time " << k << " " << v << " s\n";
  out.flags(flags);
  out.precision(precision);
}

bool same_report(const SensitivityReport& a, const SensitivityReport& b, bool ignore_timings) {
  if (a.command != b.command || a.input != b.input || a.n != b.n || a.d != b.d ||
      !same_bits(a.p, b.p) || a.method != b.method || a.seed != b.seed) {
    return false;
  }
  if (!same_named(a.config, b.config) || !same_named(a.diagnostics, b.diagnostics)) return false;
  if (!ignore_timings && !same_named(a.timings, b.timings)) return false;
  if (!same_optional(a.total, b.total) || !same_optional(a.max, b.max) ||
      !same_optional(a.oracle_total, b.oracle_total) || !same_optional(a.oracle_max, b.oracle_max)) {
    return false;
  }
  if (a.estimates.has_value() != b.estimates.has_value() ||
      (a.estimates && !same_vector(*a.estimates, *b.estimates))) {
    return false;
  }
  if (a.oracle.has_value() != b.oracle.has_value() ||
      (a.oracle && !same_vector(*a.oracle, *b.oracle))) {
    return false;
  }
  if (a.metrics.has_value() != b.metrics.has_value()) return false;
  if (a.metrics && (!same_bits(a.metrics->mean_abs_log_ratio, b.metrics->mean_abs_log_ratio) ||
                    !same_bits(a.metrics->max_abs_log_ratio, b.metrics->max_abs_log_ratio) ||
                    a.metrics->compared != b.metrics->compared)) {
    return false;
  }
  if (a.table.columns != b.table.columns || a.table.rows.size() != b.table.rows.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.table.rows.size(); ++i) {
    const auto& ra = a.table.rows[i];
    const auto& rb = b.table.rows[i];
    if (ra.size() != rb.size()) return false;
    for (std::size_t c = 0; c < ra.size(); ++c) {
      if (!same_bits(ra[c], rb[c])) return false;
    }
  }
  return true;
}

}  // namespace lpsens
