#include "bhsim/config_file.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace bhsim {

std::string_view config_error_kind_name(ConfigErrorKind kind) {
  switch (kind) {
    case ConfigErrorKind::missing_file:
      return "missing file";
    case ConfigErrorKind::syntax:
      return "syntax error";
    case ConfigErrorKind::unknown_key:
      return "unknown key";
    case ConfigErrorKind::bad_value:
      return "bad value";
    case ConfigErrorKind::invalid:
      return "invalid scenario";
  }
  return "error";
}

ConfigError::ConfigError(ConfigErrorKind kind, std::size_t line, const std::string& message)
    : std::runtime_error(line == 0 ? fmt::format("{}: {}", config_error_kind_name(kind), message)
                                   : fmt::format("line {}: {}: {}", line, config_error_kind_name(kind), message)),
      kind_(kind),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct BadValue {
  std::string why;
};

template <typename T>
T parse_number(std::string_view v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (v.empty() || ec != std::errc{} || ptr != end) throw BadValue{fmt::format("'{}' is not a number", v)};
  return out;
}

double parse_double(std::string_view v) { return parse_number<double>(v); }
std::uint32_t parse_u32(std::string_view v) { return parse_number<std::uint32_t>(v); }
std::uint64_t parse_u64(std::string_view v) { return parse_number<std::uint64_t>(v); }

bool parse_bool(std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw BadValue{fmt::format("'{}' is not true or false", v)};
}

// "[23, 24]" and "23,24" are both accepted.
std::string_view strip_brackets(std::string_view v) {
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') return trim(v.substr(1, v.size() - 2));
  return v;
}

std::set<NodeId> parse_id_set(std::string_view v) {
  std::set<NodeId> out;
  for (auto item : split(strip_brackets(v), ',')) out.insert(NodeId{parse_u32(item)});
  return out;
}

std::vector<Flow> parse_flows(std::string_view v) {
  std::vector<Flow> out;
  for (auto item : split(strip_brackets(v), ',')) {
    const auto parts = split(item, '>');
    if (parts.size() != 2) throw BadValue{fmt::format("flow '{}' is not src>dst", item)};
    out.push_back(Flow{NodeId{parse_u32(parts[0])}, NodeId{parse_u32(parts[1])}});
  }
  return out;
}

std::vector<Position> parse_positions(std::string_view v) {
  std::vector<Position> out;
  for (auto item : split(v, ';')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw BadValue{fmt::format("position '{}' is not x:y", item)};
    out.push_back(Position{parse_double(parts[0]), parse_double(parts[1])});
  }
  return out;
}

using Setter = std::function<void(ScenarioConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"num_nodes", [](auto& c, auto v) { c.num_nodes = parse_u32(v); }},
      {"area.width", [](auto& c, auto v) { c.area.width = parse_double(v); }},
      {"area.height", [](auto& c, auto v) { c.area.height = parse_double(v); }},
      {"radio_range", [](auto& c, auto v) { c.radio_range = parse_double(v); }},
      {"speed", [](auto& c, auto v) { c.speed = parse_double(v); }},
      {"pause_seconds", [](auto& c, auto v) { c.pause_seconds = parse_double(v); }},
      {"mobility.tick", [](auto& c, auto v) { c.mobility_tick = parse_double(v); }},
      {"duration_seconds", [](auto& c, auto v) { c.duration_seconds = parse_double(v); }},
      {"drain_seconds", [](auto& c, auto v) { c.drain_seconds = parse_double(v); }},
      {"seed", [](auto& c, auto v) { c.seed = parse_u64(v); }},
      {"latency", [](auto& c, auto v) { c.latency = parse_double(v); }},
      {"rrep_window_seconds", [](auto& c, auto v) { c.rrep_window_seconds = parse_double(v); }},
      {"gratuitous_rrep", [](auto& c, auto v) { c.gratuitous_rrep = parse_bool(v); }},
      {"discovery.timeout", [](auto& c, auto v) { c.discovery_timeout = parse_double(v); }},
      {"discovery.retries", [](auto& c, auto v) { c.discovery_retries = parse_u32(v); }},
      {"placement.connected", [](auto& c, auto v) { c.require_connected = parse_bool(v); }},
      {"positions", [](auto& c, auto v) { c.positions = parse_positions(v); }},
      {"cbr.flows", [](auto& c, auto v) { c.cbr.flows = parse_flows(v); }},
      {"cbr.num_flows", [](auto& c, auto v) { c.cbr.num_random_flows = parse_u32(v); }},
      {"cbr.rate_pps", [](auto& c, auto v) { c.cbr.rate_pps = parse_double(v); }},
      {"cbr.payload_bytes", [](auto& c, auto v) { c.cbr.payload_bytes = parse_u32(v); }},
      {"attack.enabled", [](auto& c, auto v) { c.attack.enabled = parse_bool(v); }},
      {"attack.members", [](auto& c, auto v) { c.attack.members = parse_id_set(v); }},
      {"attack.cooperative", [](auto& c, auto v) { c.attack.cooperative = parse_bool(v); }},
      {"attack.seq_inflation", [](auto& c, auto v) { c.attack.seq_inflation = parse_u64(v); }},
      {"attack.hop_count", [](auto& c, auto v) { c.attack.advertised_hop_count = parse_u32(v); }},
      {"attack.respond_delay", [](auto& c, auto v) { c.attack.respond_delay_seconds = parse_double(v); }},
      {"detection.enabled", [](auto& c, auto v) { c.detection.enabled = parse_bool(v); }},
      {"detection.max_rounds", [](auto& c, auto v) { c.detection.max_rounds = parse_u32(v); }},
      {"detection.warmup_flows", [](auto& c, auto v) { c.detection.warmup_flows = parse_u32(v); }},
  };
  return table;
}

// Line of the key a validation message is about, or 0.
std::size_t blame_line(std::string_view message, const std::map<std::string, std::size_t, std::less<>>& lines) {
  static const std::vector<std::pair<std::string_view, std::vector<std::string_view>>> subjects = {
      {"attack member", {"attack.members"}},
      {"attack enabled", {"attack.enabled", "attack.members"}},
      {"flow ", {"cbr.flows"}},
      {"area", {"area.width", "area.height"}},
      {"position", {"positions"}},
      {"cbr.num_flows", {"cbr.num_flows", "num_nodes"}},
  };
  for (const auto& [prefix, keys] : subjects) {
    if (!message.starts_with(prefix)) continue;
    for (auto key : keys) {
      if (auto it = lines.find(key); it != lines.end()) return it->second;
    }
    return 0;
  }
  for (const auto& [key, line] : lines) {
    if (message.starts_with(key)) return line;
  }
  return 0;
}

}  // namespace

ScenarioConfig parse_scenario_text(std::string_view text) {
  ScenarioConfig cfg = paper_scenario();
  std::map<std::string, std::size_t, std::less<>> seen;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(ConfigErrorKind::syntax, line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(ConfigErrorKind::syntax, line_no, "empty key");

    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(ConfigErrorKind::unknown_key, line_no, fmt::format("'{}'", key));
    if (!seen.emplace(std::string(key), line_no).second) {
      throw ConfigError(ConfigErrorKind::syntax, line_no, fmt::format("'{}' set twice", key));
    }
    try {
      it->second(cfg, value);
    } catch (const BadValue& e) {
      throw ConfigError(ConfigErrorKind::bad_value, line_no, fmt::format("{}: {}", key, e.why));
    }
  }

  try {
    validate_scenario(cfg);
  } catch (const ScenarioError& e) {
    throw ConfigError(ConfigErrorKind::invalid, blame_line(e.what(), seen), e.what());
  }
  return cfg;
}

ScenarioConfig parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(ConfigErrorKind::missing_file, 0, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

}  // namespace bhsim
