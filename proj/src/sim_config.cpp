#include "frmanova/sim_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "frmanova/errors.hpp"

namespace frmanova {

namespace {

/// One parsed right-hand side. Scalars keep their literal text so integer
/// fields (notably 64-bit seeds) never round-trip through double.
struct ConfigValue {
  enum class Kind { scalar, string, list };
  Kind kind = Kind::scalar;
  std::string text;
  std::vector<ConfigValue> items;
  int line = 0;
};

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw ValidationError(origin + ", line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

/// Strips a # comment, respecting double quotes.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    else if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

ConfigValue parse_scalar(std::string_view text, const std::string& origin, int line) {
  ConfigValue v;
  v.line = line;
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    v.kind = ConfigValue::Kind::string;
    v.text = std::string(text.substr(1, text.size() - 2));
  } else {
    if (text.empty()) fail(origin, line, "empty value");
    if (text.find('"') != std::string_view::npos) {
      fail(origin, line, "unterminated string");
    }
    v.kind = ConfigValue::Kind::scalar;
    v.text = std::string(text);
  }
  return v;
}

ConfigValue parse_value(std::string_view text, const std::string& origin, int line) {
  text = trim(text);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') fail(origin, line, "unterminated list");
    ConfigValue v;
    v.kind = ConfigValue::Kind::list;
    v.line = line;
    std::string_view body = trim(text.substr(1, text.size() - 2));
    while (!body.empty()) {
      const std::size_t comma = body.find(',');
      const std::string_view item =
          trim(comma == std::string_view::npos ? body : body.substr(0, comma));
      if (item.empty()) fail(origin, line, "empty list element");
      v.items.push_back(parse_scalar(item, origin, line));
      if (comma == std::string_view::npos) break;
      body = trim(body.substr(comma + 1));
      if (body.empty()) fail(origin, line, "trailing comma in list");
    }
    return v;
  }
  return parse_scalar(text, origin, line);
}

double to_double(const ConfigValue& v, const std::string& origin) {
  if (v.kind != ConfigValue::Kind::scalar) fail(origin, v.line, "expected a number");
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (ec != std::errc{} || ptr != v.text.data() + v.text.size()) {
    fail(origin, v.line, "expected a number, got '" + v.text + "'");
  }
  return out;
}

int to_int(const ConfigValue& v, const std::string& origin) {
  if (v.kind != ConfigValue::Kind::scalar) fail(origin, v.line, "expected an integer");
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (ec != std::errc{} || ptr != v.text.data() + v.text.size()) {
    fail(origin, v.line, "expected an integer, got '" + v.text + "'");
  }
  return out;
}

std::uint64_t to_seed(const ConfigValue& v, const std::string& origin) {
  if (v.kind != ConfigValue::Kind::scalar) fail(origin, v.line, "expected an integer seed");
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (ec != std::errc{} || ptr != v.text.data() + v.text.size()) {
    fail(origin, v.line, "expected an unsigned integer seed, got '" + v.text + "'");
  }
  return out;
}

std::string to_string_value(const ConfigValue& v, const std::string& origin) {
  if (v.kind != ConfigValue::Kind::string) fail(origin, v.line, "expected a quoted string");
  return v.text;
}

/// "all" or a list of quoted names, parsed elementwise.
template <typename T, typename Parse>
std::vector<T> to_name_set(const ConfigValue& v, const std::string& origin,
                           std::vector<T> all, Parse parse) {
  if (v.kind == ConfigValue::Kind::string) {
    if (v.text == "all") return all;
    return {parse(v.text, origin, v.line)};
  }
  if (v.kind != ConfigValue::Kind::list) {
    fail(origin, v.line, "expected \"all\" or a list of names");
  }
  if (v.items.empty()) fail(origin, v.line, "empty name list");
  std::vector<T> out;
  for (const ConfigValue& item : v.items) {
    out.push_back(parse(to_string_value(item, origin), origin, item.line));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (out[i] == out[j]) fail(origin, v.line, "duplicate name in list");
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

const char* to_string(StudyMode mode) noexcept {
  return mode == StudyMode::global_size_power ? "global" : "pairwise";
}

void SimulateConfig::validate() const {
  if (rhos.empty()) throw ValidationError("config needs at least one rho value");
  if (statistics.empty()) throw ValidationError("config needs at least one statistic");
  if (methods.empty()) throw ValidationError("config needs at least one method");
  for (const double rho : rhos) {
    SimulationSpec spec = base;
    spec.rho = rho;
    spec.validate();
  }
}

SimulateConfig parse_simulate_config(std::istream& in, const std::string& origin) {
  std::map<std::string, ConfigValue> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(strip_comment(line));
    if (content.empty()) continue;
    const std::size_t eq = content.find('=');
    if (eq == std::string_view::npos) {
      fail(origin, line_no, "expected key = value");
    }
    const std::string key{trim(content.substr(0, eq))};
    if (key.empty()) fail(origin, line_no, "missing key");
    if (entries.contains(key)) fail(origin, line_no, "duplicate key '" + key + "'");
    entries.emplace(key, parse_value(content.substr(eq + 1), origin, line_no));
  }

  SimulateConfig config;
  const auto take = [&](const char* key) -> const ConfigValue* {
    const auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    return &it->second;
  };

  if (const auto* v = take("mode")) {
    const std::string mode = to_string_value(*v, origin);
    if (mode == "global") config.mode = StudyMode::global_size_power;
    else if (mode == "pairwise") config.mode = StudyMode::pairwise_fwer;
    else fail(origin, v->line, "unknown mode '" + mode + "' (use global or pairwise)");
  }
  if (const auto* v = take("model")) {
    config.base.model = parse_mean_model(to_string_value(*v, origin));
  }
  if (const auto* v = take("distribution")) {
    const std::string name = to_string_value(*v, origin);
    if (name == "normal") config.base.distribution = ErrorLaw::normal;
    else if (name == "lognormal") config.base.distribution = ErrorLaw::lognormal;
    else fail(origin, v->line, "unknown distribution '" + name + "'");
  }
  if (const auto* v = take("rho")) {
    config.rhos.clear();
    if (v->kind == ConfigValue::Kind::list) {
      for (const ConfigValue& item : v->items) config.rhos.push_back(to_double(item, origin));
    } else {
      config.rhos.push_back(to_double(*v, origin));
    }
  }
  if (const auto* v = take("xi")) config.base.xi = to_double(*v, origin);
  if (const auto* v = take("n")) config.base.n = to_int(*v, origin);
  if (const auto* v = take("p")) config.base.p = to_int(*v, origin);
  if (const auto* v = take("B")) config.base.B = to_int(*v, origin);
  if (const auto* v = take("runs")) config.base.n_runs = to_int(*v, origin);
  if (const auto* v = take("alpha")) config.base.alpha = to_double(*v, origin);
  if (const auto* v = take("seed")) config.base.seed = to_seed(*v, origin);
  if (const auto* v = take("threads")) config.threads = to_int(*v, origin);
  if (const auto* v = take("statistics")) {
    config.statistics = to_name_set<StatisticKind>(
        *v, origin, {StatisticKind::C, StatisticKind::D, StatisticKind::E},
        [](const std::string& name, const std::string& org, int ln) {
          try {
            return parse_statistic_kind(name);
          } catch (const ValidationError& e) {
            fail(org, ln, e.what());
          }
        });
  }
  if (const auto* v = take("methods")) {
    config.methods = to_name_set<ResamplingMethod>(
        *v, origin,
        {ResamplingMethod::P1, ResamplingMethod::P2, ResamplingMethod::B1,
         ResamplingMethod::B2, ResamplingMethod::B3},
        [](const std::string& name, const std::string& org, int ln) {
          try {
            return parse_resampling_method(name);
          } catch (const ValidationError& e) {
            fail(org, ln, e.what());
          }
        });
  }

  static constexpr const char* known[] = {"mode", "model", "distribution", "rho",  "xi",
                                          "n",    "p",     "B",            "runs", "alpha",
                                          "seed", "threads", "statistics", "methods"};
  for (const auto& [key, value] : entries) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known)) {
      fail(origin, value.line, "unknown key '" + key + "'");
    }
  }

  config.validate();
  return config;
}

SimulateConfig load_simulate_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return parse_simulate_config(in, path.string());
}

std::vector<StudyResult> run_study(const SimulateConfig& config) {
  config.validate();
  std::vector<StudyResult> results;
  results.reserve(config.rhos.size());
  for (const double rho : config.rhos) {
    SimulationSpec spec = config.base;
    spec.rho = rho;
    SimulationSummary summary =
        config.mode == StudyMode::global_size_power
            ? estimate_rejection_rates(spec, config.statistics, config.methods, config.threads)
            : estimate_fwer(spec, config.statistics, config.methods, config.threads);
    results.push_back({rho, std::move(summary)});
  }
  return results;
}

void write_study_csv(std::ostream& out, std::span<const StudyResult> results) {
  out << "rho,statistic,method,measure,percent\n";
  char percent[32];
  const auto row = [&](const StudyResult& result, const SimulationSummary::Cell& cell,
                       const std::string& measure, double rate) {
    std::snprintf(percent, sizeof(percent), "%.1f", 100.0 * rate);
    out << format_double(result.rho) << ',' << to_string(cell.statistic) << ','
        << to_string(cell.method) << ',' << measure << ',' << percent << '\n';
  };
  for (const StudyResult& result : results) {
    for (const auto& cell : result.summary.cells) {
      if (cell.per_pair.empty()) {
        row(result, cell, "rejection", cell.rejection_rate);
      } else {
        row(result, cell, "any_rejection", cell.rejection_rate);
        if (cell.fwer) row(result, cell, "fwer", *cell.fwer);
        for (const auto& pr : cell.per_pair) {
          row(result, cell,
              "pair " + std::to_string(pr.first) + "-" + std::to_string(pr.second), pr.rate);
        }
      }
    }
  }
}

void write_study_csv(const std::filesystem::path& path, std::span<const StudyResult> results) {
  auto out = open_for_write(path);
  write_study_csv(out, results);
}

}  // namespace frmanova
