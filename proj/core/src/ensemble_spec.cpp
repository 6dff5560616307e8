#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "wickgl/error.hpp"
#include "wickgl/montecarlo.hpp"

namespace wickgl {

namespace {

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) {
    return c != ' ' && c != '\t' && c != '\r';
  };
  while (!s.empty() && !not_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && !not_space(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw DomainError(fmt::format("line {}: {}", line, what));
}

template <typename T>
T parse_number(std::string_view text, int line, std::string_view key) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    fail(line, fmt::format("bad value '{}' for {}", text, key));
  }
  return value;
}

struct PendingMode {
  std::vector<int> coords;
  int line = 0;
  bool set = false;
};

struct Section {
  EstimateTarget target;
  PendingMode k1, k2;
  int header_line = 0;
  bool kind_set = false;
};

std::vector<int> parse_mode(std::string_view text, int line,
                            std::string_view key) {
  std::vector<int> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_number<int>(trim(text.substr(0, comma)), line, key));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

void apply(Section& s, std::string_view key, std::string_view value, int line) {
  EstimateTarget& t = s.target;
  auto real = [&] { return parse_number<double>(value, line, key); };
  auto integer = [&] { return parse_number<int>(value, line, key); };
  if (key == "kind") {
    if (value == "fixed") {
      t.fixed = true;
    } else {
      try {
        t.kind = parse_wick_kind(std::string(value));
      } catch (const DomainError&) {
        fail(line, fmt::format("unknown kind '{}'", value));
      }
      t.fixed = false;
    }
    s.kind_set = true;
  } else if (key == "dim") {
    t.dim = integer();
  } else if (key == "cutoff") {
    t.cutoff = integer();
  } else if (key == "profile") {
    try {
      t.profile = parse_profile_kind(value);
    } catch (const DomainError&) {
      fail(line, fmt::format("unknown profile '{}'", value));
    }
  } else if (key == "radius") {
    t.profile_radius = real();
  } else if (key == "n") {
    t.n1 = t.n2 = integer();
  } else if (key == "n1") {
    t.n1 = integer();
  } else if (key == "n2") {
    t.n2 = integer();
  } else if (key == "k" || key == "k1" || key == "k2") {
    const PendingMode m{parse_mode(value, line, key), line, true};
    if (key != "k2") s.k1 = m;
    if (key != "k1") s.k2 = m;
  } else if (key == "tau") {
    t.time.tau = real();
  } else if (key == "t0") {
    t.time.t0 = real();
  } else if (key == "t1") {
    t.time.t1 = real();
  } else if (key == "t2") {
    t.time.t2 = real();
  } else if (key == "samples") {
    const long long m = parse_number<long long>(value, line, key);
    if (m < 0) fail(line, "samples must be >= 0");
    t.samples = static_cast<std::size_t>(m);
  } else if (key == "seed") {
    t.seed = parse_number<std::uint64_t>(value, line, key);
  } else if (key == "dt") {
    t.dt = real();
  } else if (key == "burn_in") {
    t.burn_in = real();
  } else if (key == "bias_relative") {
    t.bias_relative = real();
  } else if (key == "bias_absolute") {
    t.bias_absolute = real();
  } else if (key == "z_max") {
    t.z_max = real();
  } else if (key == "estimate") {
    t.fixed_estimate = real();
  } else if (key == "stderr") {
    t.fixed_stderr = real();
  } else if (key == "oracle") {
    t.fixed_oracle = real();
  } else {
    fail(line, fmt::format("unknown key '{}'", key));
  }
}

Mode resolve_mode(const PendingMode& m, int dim, int fallback_line,
                  const char* key) {
  Mode out{};
  if (!m.set) return out;
  if (static_cast<int>(m.coords.size()) != dim) {
    fail(m.line ? m.line : fallback_line,
         fmt::format("{} has {} coordinates, dim is {}", key, m.coords.size(),
                     dim));
  }
  std::copy(m.coords.begin(), m.coords.end(), out.begin());
  return out;
}

EstimateTarget finish(const Section& s) {
  EstimateTarget t = s.target;
  if (!s.kind_set) fail(s.header_line, "target has no kind");
  if (t.dim < 1 || t.dim > kMaxDim) {
    fail(s.header_line, fmt::format("dim must be in [1, {}]", kMaxDim));
  }
  if (t.cutoff < 1) fail(s.header_line, "cutoff must be >= 1");
  if (!(t.z_max > 0.0)) fail(s.header_line, "z_max must be > 0");
  t.k1 = resolve_mode(s.k1, t.dim, s.header_line, "k1");
  t.k2 = resolve_mode(s.k2, t.dim, s.header_line, "k2");
  return t;
}

}  // namespace

EnsembleSpec parse_ensemble_spec(const std::string& text) {
  EnsembleSpec spec;
  Section defaults;
  std::optional<Section> current;
  std::set<std::string> names;
  bool seen_target = false;
  bool in_defaults = false;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  auto close = [&] {
    if (current) spec.targets.push_back(finish(*current));
    current.reset();
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = trim(raw);
    if (s.empty() || s.front() == '#' || s.front() == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      const std::string name(trim(s.substr(1, s.size() - 2)));
      if (name.empty()) fail(line, "empty section name");
      close();
      if (name == "defaults") {
        if (seen_target) fail(line, "[defaults] must precede every target");
        in_defaults = true;
        defaults.header_line = line;
        continue;
      }
      if (!names.insert(name).second) {
        fail(line, fmt::format("duplicate target '{}'", name));
      }
      in_defaults = false;
      seen_target = true;
      current = defaults;
      current->target.name = name;
      current->header_line = line;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) fail(line, "expected key = value");
    const std::string_view key = trim(s.substr(0, eq));
    const std::string_view value = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (value.empty()) fail(line, fmt::format("empty value for {}", key));
    if (in_defaults) {
      apply(defaults, key, value, line);
    } else if (current) {
      apply(*current, key, value, line);
    } else {
      fail(line, "key outside any section");
    }
  }
  close();
  return spec;
}

EnsembleSpec load_ensemble_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open ensemble spec: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ensemble_spec(ss.str());
}

}  // namespace wickgl
