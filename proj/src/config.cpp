#include "aniso/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "aniso/errors.hpp"

namespace aniso {

namespace {

[[noreturn]] void fail(std::size_t line, std::string_view key, const std::string& what) {
  std::string msg = "line " + std::to_string(line);
  if (!key.empty()) msg += ", key '" + std::string(key) + "'";
  throw ConfigError(msg + ": " + what);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Json document() {
    Json root = Json::object();
    Json* table = &root;
    std::string table_name;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        const std::string name = read_key();
        skip_spaces();
        expect(']', name);
        table = &open_table(root, name);
        table_name = name;
      } else {
        const std::size_t key_line = line_;
        const std::string key = read_key();
        skip_spaces();
        expect('=', key);
        Json v = value(key);
        Json* target = table;
        std::string leaf = key;
        descend(target, leaf, key_line, key);
        if (target->contains(leaf)) fail(key_line, key, "duplicate key");
        (*target)[leaf] = std::move(v);
      }
      skip_spaces();
      if (!at_end() && peek() == '#') skip_comment();
      if (!at_end() && peek() != '\n') fail(line_, "", "unexpected text after value");
    }
    return root;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }
  void skip_comment() {
    while (!at_end() && peek() != '\n') ++pos_;
  }
  // Whitespace, newlines and comments.
  void skip_blank_lines() {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '\n') {
        ++pos_;
        ++line_;
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }
  void expect(char c, std::string_view key) {
    if (at_end() || peek() != c) fail(line_, key, std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string read_key() {
    skip_spaces();
    const std::size_t start = pos_;
    while (!at_end()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.') {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) fail(line_, "", "expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  Json& open_table(Json& root, const std::string& name) {
    Json* t = &root;
    std::size_t start = 0;
    while (true) {
      const std::size_t dot = name.find('.', start);
      const std::string part = name.substr(start, dot - start);
      if (part.empty()) fail(line_, name, "empty table name");
      Json& next = (*t)[part];
      if (next.is_null()) next = Json::object();
      if (!next.is_object()) fail(line_, name, "table name collides with a value");
      t = &next;
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    return *t;
  }

  // Dotted keys address nested tables.
  void descend(Json*& target, std::string& leaf, std::size_t line, const std::string& key) {
    std::size_t dot;
    while ((dot = leaf.find('.')) != std::string::npos) {
      const std::string part = leaf.substr(0, dot);
      if (part.empty()) fail(line, key, "empty key segment");
      Json& next = (*target)[part];
      if (next.is_null()) next = Json::object();
      if (!next.is_object()) fail(line, key, "key collides with a value");
      target = &next;
      leaf = leaf.substr(dot + 1);
    }
    if (leaf.empty()) fail(line, key, "empty key segment");
  }

  Json value(const std::string& key) {
    skip_spaces();
    if (at_end() || peek() == '\n') fail(line_, key, "missing value");
    const char c = peek();
    if (c == '"') return string(key);
    if (c == '[') return array(key);
    if (c == '{') return inline_table(key);
    return scalar(key);
  }

  Json string(const std::string& key) {
    ++pos_;
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail(line_, key, "unterminated string");
      const char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail(line_, key, "unterminated escape");
      const char e = s_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: fail(line_, key, std::string("unknown escape \\") + e);
      }
    }
    return out;
  }

  Json array(const std::string& key) {
    ++pos_;
    const std::size_t open = line_;
    Json arr = Json::array();
    while (true) {
      skip_blank_lines();
      if (at_end()) fail(open, key, "unterminated array");
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(value(key));
      skip_blank_lines();
      if (at_end()) fail(open, key, "unterminated array");
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != ']') {
        fail(line_, key, "expected ',' or ']' in array");
      }
    }
  }

  Json inline_table(const std::string& key) {
    ++pos_;
    const std::size_t open = line_;
    Json obj = Json::object();
    while (true) {
      skip_blank_lines();
      if (at_end()) fail(open, key, "unterminated inline table");
      if (peek() == '}') {
        ++pos_;
        return obj;
      }
      const std::string inner = read_key();
      const std::string full = key + "." + inner;
      skip_spaces();
      expect('=', full);
      Json v = value(full);
      Json* target = &obj;
      std::string leaf = inner;
      descend(target, leaf, line_, full);
      if (target->contains(leaf)) fail(line_, full, "duplicate key");
      (*target)[leaf] = std::move(v);
      skip_blank_lines();
      if (at_end()) fail(open, key, "unterminated inline table");
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != '}') {
        fail(line_, key, "expected ',' or '}' in inline table");
      }
    }
  }

  Json scalar(const std::string& key) {
    const std::size_t start = pos_;
    while (!at_end()) {
      const char c = peek();
      if (c == ',' || c == ']' || c == '}' || c == '#' || c == '\n' || c == ' ' || c == '\t' ||
          c == '\r') {
        break;
      }
      ++pos_;
    }
    const std::string_view tok = s_.substr(start, pos_ - start);
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
    if (tok == "-inf") return -std::numeric_limits<double>::infinity();
    if (tok.empty()) fail(line_, key, "missing value");
    std::string_view digits = tok;
    if (digits.front() == '+') digits.remove_prefix(1);
    const bool integral = digits.find_first_of(".eE") == std::string_view::npos;
    if (integral) {
      if (digits.front() == '-') {
        std::int64_t v = 0;
        const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (r.ec == std::errc() && r.ptr == digits.data() + digits.size()) return v;
      } else {
        std::uint64_t v = 0;
        const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (r.ec == std::errc() && r.ptr == digits.data() + digits.size()) return v;
      }
    } else {
      double v = 0.0;
      const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (r.ec == std::errc() && r.ptr == digits.data() + digits.size()) return v;
    }
    fail(line_, key, "cannot read value '" + std::string(tok) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) throw ConfigError("cannot write NaN");
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), r.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string inline_value(const Json& v) {
  switch (v.type()) {
    case Json::value_t::string:
      return quote(v.get<std::string>());
    case Json::value_t::boolean:
      return v.get<bool>() ? "true" : "false";
    case Json::value_t::number_integer:
      return std::to_string(v.get<std::int64_t>());
    case Json::value_t::number_unsigned:
      return std::to_string(v.get<std::uint64_t>());
    case Json::value_t::number_float:
      return format_double(v.get<double>());
    case Json::value_t::array: {
      std::string out = "[";
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ", ";
        out += inline_value(v[k]);
      }
      return out + "]";
    }
    case Json::value_t::object: {
      std::string out = "{ ";
      bool first = true;
      for (const auto& [k, item] : v.items()) {
        if (!first) out += ", ";
        first = false;
        out += k + " = " + inline_value(item);
      }
      return out + (first ? "}" : " }");
    }
    default:
      throw ConfigError("cannot write a null value");
  }
}

bool is_section(const std::string& key, const std::vector<std::string>& sections) {
  for (const auto& s : sections) {
    if (s == key) return true;
  }
  return false;
}

// Typed readers with key diagnostics.
struct Reader {
  const Json& j;
  std::string where;

  [[noreturn]] void bad(const std::string& key, const std::string& what) const {
    throw ConfigError("key '" + where + key + "': " + what);
  }
  bool has(const std::string& key) const { return j.contains(key); }
  const Json& at(const std::string& key) const {
    if (!j.contains(key)) bad(key, "missing");
    return j.at(key);
  }
  double num(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_number()) bad(key, "expected a number");
    return v.get<double>();
  }
  double num(const std::string& key, double def) const { return has(key) ? num(key) : def; }
  std::uint64_t count(const std::string& key, std::uint64_t def) const {
    if (!has(key)) return def;
    const Json& v = at(key);
    if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0))) {
      bad(key, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  bool flag(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const Json& v = at(key);
    if (!v.is_boolean()) bad(key, "expected true or false");
    return v.get<bool>();
  }
  std::string str(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_string()) bad(key, "expected a string");
    return v.get<std::string>();
  }
  std::string str(const std::string& key, const std::string& def) const {
    return has(key) ? str(key) : def;
  }
  std::vector<double> list(const std::string& key) const {
    if (!has(key)) return {};
    const Json& v = at(key);
    if (!v.is_array()) bad(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) bad(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  std::vector<Point> points(const std::string& key) const {
    if (!has(key)) return {};
    const Json& v = at(key);
    if (!v.is_array()) bad(key, "expected an array of points");
    std::vector<Point> out;
    for (const auto& e : v) {
      if (!e.is_array()) bad(key, "expected an array of points");
      Point p;
      for (const auto& c : e) {
        if (!c.is_number()) bad(key, "point coordinates must be numbers");
        p.push_back(c.get<double>());
      }
      out.push_back(std::move(p));
    }
    return out;
  }
  void only(std::initializer_list<const char*> keys) const {
    if (!j.is_object()) throw ConfigError("key '" + where + "': expected a table");
    for (const auto& [k, v] : j.items()) {
      bool known = false;
      for (const char* allowed : keys) known = known || k == allowed;
      if (!known) bad(k, "unknown key");
    }
  }
};

Json array_of(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Json array_of(const std::vector<Point>& v) {
  Json a = Json::array();
  for (const auto& p : v) a.push_back(array_of(p));
  return a;
}

template <class F>
auto with_context(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

}  // namespace

Json parse_text(std::string_view text) { return Parser(text).document(); }

std::string emit_text(const Json& doc, const std::vector<std::string>& sections) {
  if (!doc.is_object()) throw ConfigError("document root must be a table");
  std::string out;
  for (const auto& [k, v] : doc.items()) {
    if (v.is_object() && is_section(k, sections)) continue;
    out += k + " = " + inline_value(v) + "\n";
  }
  for (const auto& [k, v] : doc.items()) {
    if (!(v.is_object() && is_section(k, sections))) continue;
    out += "\n[" + k + "]\n";
    for (const auto& [ik, iv] : v.items()) out += ik + " = " + inline_value(iv) + "\n";
  }
  return out;
}

Json to_json(const ScaleFunction& f) {
  Json j = Json::object();
  switch (f.kind()) {
    case ScaleKind::power: {
      j["kind"] = "power";
      j["alpha"] = f.alpha();
      const ScaleFunction def = ScaleFunction::power(f.alpha());
      if (f.r_min() != def.r_min() || f.r_max() != def.r_max()) {
        j["r_min"] = f.r_min();
        j["r_max"] = f.r_max();
      }
      break;
    }
    case ScaleKind::power_log:
      j["kind"] = "power_log";
      j["alpha"] = f.alpha();
      j["beta"] = f.beta();
      j["r_min"] = f.r_min();
      j["r_max"] = f.r_max();
      break;
    case ScaleKind::tabulated:
      j["kind"] = "tabulated";
      j["r"] = array_of(f.table_r());
      j["phi"] = array_of(f.table_phi());
      break;
  }
  return j;
}

ScaleFunction scale_from_json(const Json& j) {
  const Reader r{j, "phi."};
  const std::string kind = r.str("kind");
  return with_context("phi", [&] {
    if (kind == "power") {
      r.only({"kind", "alpha", "r_min", "r_max"});
      if (r.has("r_min") || r.has("r_max")) {
        const ScaleFunction def = ScaleFunction::power(r.num("alpha"));
        return ScaleFunction::power(r.num("alpha"), r.num("r_min", def.r_min()),
                                    r.num("r_max", def.r_max()));
      }
      return ScaleFunction::power(r.num("alpha"));
    }
    if (kind == "power_log") {
      r.only({"kind", "alpha", "beta", "r_min", "r_max"});
      return ScaleFunction::power_log(r.num("alpha"), r.num("beta"), r.num("r_min", 1e-6),
                                      r.num("r_max", 1e6));
    }
    if (kind == "tabulated") {
      r.only({"kind", "r", "phi"});
      return ScaleFunction::tabulated(r.list("r"), r.list("phi"));
    }
    r.bad("kind", "unknown scaling function kind '" + kind + "'");
  });
}

Json to_json(const Domain& d) {
  Json j = Json::object();
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FullSpace>) {
          j["shape"] = "full_space";
          j["dim"] = s.dim;
        } else if constexpr (std::is_same_v<S, HalfSpace>) {
          j["shape"] = "half_space";
          j["dim"] = s.dim;
          j["axis"] = s.axis;
          j["offset"] = s.offset;
        } else if constexpr (std::is_same_v<S, Ball>) {
          j["shape"] = "ball";
          j["center"] = array_of(s.center);
          j["radius"] = s.radius;
        } else if constexpr (std::is_same_v<S, Annulus>) {
          j["shape"] = "annulus";
          j["center"] = array_of(s.center);
          j["r_in"] = s.r_in;
          j["r_out"] = s.r_out;
        } else {
          j["shape"] = "rounded_box";
          j["center"] = array_of(s.center);
          j["half_widths"] = array_of(s.half_widths);
          j["corner_radius"] = s.corner_radius;
        }
      },
      d.shape());
  return j;
}

Domain domain_from_json(const Json& j) {
  const Reader r{j, "domain."};
  const std::string shape = r.str("shape");
  return with_context("domain", [&] {
    if (shape == "full_space") {
      r.only({"shape", "dim"});
      return Domain::full_space(r.count("dim", 1));
    }
    if (shape == "half_space") {
      r.only({"shape", "dim", "axis", "offset"});
      const std::size_t dim = r.count("dim", 1);
      return Domain::half_space(dim, r.count("axis", dim - 1), r.num("offset", 0.0));
    }
    if (shape == "ball") {
      r.only({"shape", "center", "radius"});
      return Domain::ball(r.list("center"), r.num("radius"));
    }
    if (shape == "annulus") {
      r.only({"shape", "center", "r_in", "r_out"});
      return Domain::annulus(r.list("center"), r.num("r_in"), r.num("r_out"));
    }
    if (shape == "rounded_box") {
      r.only({"shape", "center", "half_widths", "corner_radius"});
      return Domain::rounded_box(r.list("center"), r.list("half_widths"), r.num("corner_radius"));
    }
    r.bad("shape", "unknown shape '" + shape + "'");
  });
}

KappaSpec KappaConfig::make() const {
  if (kind == "one") return KappaSpec::one();
  if (kind == "constant") return KappaSpec::constant_value(value, kappa0);
  if (kind == "cosine") return KappaSpec::cosine(amplitude, frequency);
  throw ConfigError("key 'kappa.kind': unknown kappa kind '" + kind + "'");
}

Json to_json(const KappaConfig& k) {
  Json j = Json::object();
  j["kind"] = k.kind;
  if (k.kind == "constant") {
    j["value"] = k.value;
    j["kappa0"] = k.kappa0;
  } else if (k.kind == "cosine") {
    j["amplitude"] = k.amplitude;
    j["frequency"] = k.frequency;
  }
  return j;
}

KappaConfig kappa_from_json(const Json& j) {
  const Reader r{j, "kappa."};
  KappaConfig k;
  k.kind = r.str("kind");
  if (k.kind == "one") {
    r.only({"kind"});
  } else if (k.kind == "constant") {
    r.only({"kind", "value", "kappa0"});
    k.value = r.num("value");
    k.kappa0 = r.num("kappa0", std::max(k.value, 1.0 / k.value));
  } else if (k.kind == "cosine") {
    r.only({"kind", "amplitude", "frequency"});
    k.amplitude = r.num("amplitude");
    k.frequency = r.num("frequency", 1.0);
  } else {
    r.bad("kind", "unknown kappa kind '" + k.kind + "'");
  }
  with_context("kappa", [&] { return k.make(); });
  return k;
}

namespace {

constexpr std::array<std::pair<ExperimentKind, const char*>, 9> kKindNames{{
    {ExperimentKind::validate_scalefn, "validate-scalefn"},
    {ExperimentKind::check_dgamma, "check-dgamma"},
    {ExperimentKind::verify_free_kernel, "verify-free-kernel"},
    {ExperimentKind::verify_dhke, "verify-dhke"},
    {ExperimentKind::verify_survival, "verify-survival"},
    {ExperimentKind::verify_exit, "verify-exit"},
    {ExperimentKind::verify_green, "verify-green"},
    {ExperimentKind::fit_eigenvalue, "fit-eigenvalue"},
    {ExperimentKind::generator_identity, "generator-identity"},
}};

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "unknown";
}

ExperimentKind experiment_kind(std::string_view name) {
  for (const auto& [kind, n] : kKindNames) {
    if (name == n) return kind;
  }
  throw ConfigError("key 'experiment': unknown experiment '" + std::string(name) + "'");
}

const std::vector<ExperimentKind>& all_experiment_kinds() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> v;
    for (const auto& [kind, name] : kKindNames) v.push_back(kind);
    return v;
  }();
  return kinds;
}

void ExperimentConfig::validate() const {
  auto need = [](bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError("key '" + key + "': " + what);
  };
  const std::size_t dim = domain.dim();
  auto dims_match = [&](const std::vector<Point>& pts, const std::string& key) {
    for (const auto& p : pts) need(p.size() == dim, key, "point dimension differs from the domain");
  };
  need(!name.empty(), "name", "must not be empty");
  need(n_paths >= 100, "n_paths", "must be at least 100");
  need(ratio_ceiling > 1.0, "ratio_ceiling", "must exceed 1");
  need(max_rel_se > 0.0, "max_rel_se", "must be positive");
  need(tolerance >= 0.0, "tolerance", "must be >= 0");
  for (double v : t) need(v > 0.0, "t", "times must be positive");
  for (double v : depths) need(v > 0.0, "depths", "depths must be positive");
  for (double v : radii) need(v > 0.0, "radii", "radii must be positive");
  for (double v : halfwidth) need(v > 0.0, "halfwidth", "half-widths must be positive");
  need(halfwidth.empty() || halfwidth.size() == dim, "halfwidth", "one half-width per coordinate");
  need(boundary_point.empty() || boundary_point.size() == dim, "boundary_point",
       "dimension differs from the domain");
  dims_match(x, "x");
  dims_match(y, "y");
  try {
    SimConfig sc;
    sc.eps_small_jump = sim.eps_small_jump;
    sc.eps_max = sim.eps_max;
    sc.eps_depth_ratio = sim.eps_depth_ratio;
    sc.dt_check = sim.dt_check;
    sc.horizon = sim.horizon;
    sc.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("table 'sim': ") + e.what());
  }

  switch (kind) {
    case ExperimentKind::validate_scalefn:
      break;
    case ExperimentKind::check_dgamma:
      need(gamma > 0.0 && gamma <= 1.0, "gamma", "must lie in (0, 1]");
      need(x.size() == y.size(), "y", "x and y lists must have equal length");
      break;
    case ExperimentKind::verify_free_kernel:
      need(!t.empty(), "t", "grid must not be empty");
      need(x.size() == 1, "x", "exactly one start point");
      need(!diffs.empty() || !y.empty(), "diffs", "give diffs or y");
      break;
    case ExperimentKind::verify_dhke:
      need(!t.empty(), "t", "grid must not be empty");
      need(!depths.empty(), "depths", "grid must not be empty");
      need(y.size() == 1, "y", "exactly one target point");
      need(domain.dim() == 1 || !std::holds_alternative<FullSpace>(domain.shape()), "domain",
           "needs a boundary");
      break;
    case ExperimentKind::verify_survival:
      need(t.size() == 1, "t", "exactly one time");
      need(depths.size() >= 2, "depths", "at least two depths");
      need(!std::holds_alternative<FullSpace>(domain.shape()), "domain", "needs a boundary");
      break;
    case ExperimentKind::verify_exit:
      need(std::holds_alternative<Ball>(domain.shape()), "domain", "must be a ball");
      need(radii.size() >= 2, "radii", "at least two radii");
      break;
    case ExperimentKind::verify_green:
      need(domain.bounded(), "domain", "must be bounded");
      need(x.size() == y.size(), "y", "x and y lists must have equal length");
      need(!x.empty() || !depths.empty(), "x", "give point pairs or depths");
      need(depths.empty() || !x.empty(), "x", "depth series needs a start point");
      break;
    case ExperimentKind::fit_eigenvalue:
      need(domain.bounded(), "domain", "must be bounded");
      need(t.size() >= 3, "t", "at least three times");
      need(!x.empty(), "x", "at least one start point");
      break;
    case ExperimentKind::generator_identity:
      need(!x.empty() || !depths.empty(), "depths", "give points or depths");
      for (const auto& p : x) need(!p.empty() && p.back() > 0.0, "x", "last coordinate must be positive");
      break;
  }
}

Json to_json(const ExperimentConfig& c) {
  Json j = Json::object();
  j["experiment"] = to_string(c.kind);
  j["name"] = c.name;
  j["phi"] = to_json(c.phi);
  j["domain"] = to_json(c.domain);
  j["kappa"] = to_json(c.kappa);
  auto opt_list = [&](const char* key, const std::vector<double>& v) {
    if (!v.empty()) j[key] = array_of(v);
  };
  auto opt_points = [&](const char* key, const std::vector<Point>& v) {
    if (!v.empty()) j[key] = array_of(v);
  };
  opt_list("t", c.t);
  opt_points("x", c.x);
  opt_points("y", c.y);
  opt_list("depths", c.depths);
  opt_list("radii", c.radii);
  opt_list("diffs", c.diffs);
  opt_list("halfwidth", c.halfwidth);
  opt_list("boundary_point", c.boundary_point);
  j["gamma"] = c.gamma;
  j["n_paths"] = c.n_paths;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["deterministic"] = c.deterministic;
  j["ratio_ceiling"] = c.ratio_ceiling;
  j["tolerance"] = c.tolerance;
  j["max_rel_se"] = c.max_rel_se;
  j["allow_inconclusive"] = c.allow_inconclusive;
  j["out"] = c.out;
  j["plot_data"] = c.plot_data;
  Json sim = Json::object();
  sim["eps_small_jump"] = c.sim.eps_small_jump;
  sim["eps_max"] = c.sim.eps_max;
  sim["eps_depth_ratio"] = c.sim.eps_depth_ratio;
  sim["dt_check"] = c.sim.dt_check;
  sim["horizon"] = c.sim.horizon;
  j["sim"] = sim;
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  const Reader r{j, ""};
  r.only({"experiment", "name", "phi", "domain", "kappa", "t", "x", "y", "depths", "radii", "diffs",
          "halfwidth", "boundary_point", "gamma", "n_paths", "seed", "threads", "deterministic",
          "ratio_ceiling", "tolerance", "max_rel_se", "allow_inconclusive", "out", "plot_data",
          "sim"});
  ExperimentConfig c;
  c.kind = experiment_kind(r.str("experiment"));
  c.name = r.str("name", to_string(c.kind));
  if (r.has("phi")) c.phi = scale_from_json(r.at("phi"));
  if (r.has("domain")) c.domain = domain_from_json(r.at("domain"));
  if (r.has("kappa")) c.kappa = kappa_from_json(r.at("kappa"));
  c.t = r.list("t");
  c.x = r.points("x");
  c.y = r.points("y");
  c.depths = r.list("depths");
  c.radii = r.list("radii");
  c.diffs = r.list("diffs");
  c.halfwidth = r.list("halfwidth");
  c.boundary_point = r.list("boundary_point");
  c.gamma = r.num("gamma", c.gamma);
  c.n_paths = r.count("n_paths", c.n_paths);
  c.seed = r.count("seed", c.seed);
  c.threads = static_cast<unsigned>(r.count("threads", c.threads));
  c.deterministic = r.flag("deterministic", c.deterministic);
  c.ratio_ceiling = r.num("ratio_ceiling", c.ratio_ceiling);
  c.tolerance = r.num("tolerance", c.tolerance);
  c.max_rel_se = r.num("max_rel_se", c.max_rel_se);
  c.allow_inconclusive = r.flag("allow_inconclusive", c.allow_inconclusive);
  c.out = r.str("out", c.out);
  c.plot_data = r.flag("plot_data", c.plot_data);
  if (r.has("sim")) {
    const Reader s{r.at("sim"), "sim."};
    s.only({"eps_small_jump", "eps_max", "eps_depth_ratio", "dt_check", "horizon"});
    c.sim.eps_small_jump = s.num("eps_small_jump", c.sim.eps_small_jump);
    c.sim.eps_max = s.num("eps_max", c.sim.eps_max);
    c.sim.eps_depth_ratio = s.num("eps_depth_ratio", c.sim.eps_depth_ratio);
    c.sim.dt_check = s.num("dt_check", c.sim.dt_check);
    c.sim.horizon = s.num("horizon", c.sim.horizon);
  }
  c.validate();
  return c;
}

std::string serialize(const ExperimentConfig& c) { return emit_text(to_json(c), {"sim"}); }

ExperimentConfig parse_config(std::string_view text) { return config_from_json(parse_text(text)); }

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace aniso
