#include "robinlab/scenario.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "robinlab/error.hpp"

namespace robinlab {

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{
      "gap",          "positivity",     "domination",    "conservation", "gaussian_plain",
      "gaussian_gap", "intermediate",   "gaussian_rho",  "rho_metric",   "davies",
      "green_laplace", "green_bound",   "beurling_deny", "phase",
  };
  return names;
}

std::vector<std::string> domain_presets() { return {"square", "lshape", "cube", "disk", "ball", "file"}; }
std::vector<std::string> theta_presets() {
  return {"constant:c", "indicator:axis,lo,hi", "linear:a,b"};
}
std::vector<std::string> kernel_presets() { return {"constant:c", "separable:a", "gaussian:s"}; }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line;
};

class Fields {
 public:
  std::map<std::string, Entry> entries;

  bool has(const std::string& key) const { return entries.count(key) > 0; }
  int line(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? 0 : it->second.line;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    used_.push_back(key);
    auto it = entries.find(key);
    return it == entries.end() ? fallback : it->second.value;
  }

  double number(const std::string& key, double fallback) {
    used_.push_back(key);
    auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    return parse_number(it->second.value, it->second.line, key);
  }

  int integer(const std::string& key, int fallback) {
    const double v = number(key, fallback);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("expected an integer", line(key), key);
    return static_cast<int>(v);
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
    used_.push_back(key);
    auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    std::vector<double> out;
    for (const auto& item : split(it->second.value, ',')) out.push_back(parse_number(item, it->second.line, key));
    if (out.empty()) throw ConfigError("expected a comma-separated list of numbers", it->second.line, key);
    return out;
  }

  std::vector<std::string> words(const std::string& key) {
    used_.push_back(key);
    auto it = entries.find(key);
    if (it == entries.end()) return {};
    return split(it->second.value, ',');
  }

  void reject_unknown() const {
    for (const auto& [key, entry] : entries)
      if (std::find(used_.begin(), used_.end(), key) == used_.end())
        throw ConfigError("unknown field", entry.line, key);
  }

  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  static double parse_number(const std::string& s, int line, const std::string& key) {
    const std::string t = trim(s);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
      throw ConfigError("expected a number, got '" + t + "'", line, key);
    }
    return v;
  }

 private:
  std::vector<std::string> used_;
};

Fields tokenize(const std::string& text) {
  Fields f;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  static const std::vector<std::string> sections{"domain", "coefficient", "boundary", "spectrum",
                                                 "time",   "checks",      "output",   "run"};
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
        throw ConfigError("unknown section '" + section + "'", line, section);
      }
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    if (section.empty()) throw ConfigError("field outside of any section", line);
    const std::string key = section + "." + trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (value.empty()) throw ConfigError("empty value", line, key);
    if (f.has(key)) throw ConfigError("duplicate field (first at line " + std::to_string(f.line(key)) + ")", line, key);
    f.entries[key] = {value, line};
  }
  return f;
}

template <typename Preset>
Preset parse_preset(const std::string& text, int line, const std::string& key,
                    const std::map<std::string, int>& arity) {
  Preset p;
  const auto colon = text.find(':');
  p.name = trim(text.substr(0, colon));
  p.args.clear();
  if (colon != std::string::npos) {
    for (const auto& item : Fields::split(text.substr(colon + 1), ','))
      p.args.push_back(Fields::parse_number(item, line, key));
  }
  auto it = arity.find(p.name);
  if (it == arity.end()) throw ConfigError("unknown preset '" + p.name + "'", line, key);
  if (static_cast<int>(p.args.size()) != it->second) {
    throw ConfigError("preset '" + p.name + "' takes " + std::to_string(it->second) + " argument(s)", line, key);
  }
  return p;
}

void require_positive(Fields& f, const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError("must be positive", f.line(key), key);
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& name) {
  Fields f = tokenize(text);
  Scenario sc;
  sc.name = name;
  for (const auto& [key, entry] : f.entries) sc.echo[key] = entry.value;

  // domain
  sc.domain.preset = f.text("domain.preset", "square");
  const auto presets = domain_presets();
  if (std::find(presets.begin(), presets.end(), sc.domain.preset) == presets.end()) {
    throw ConfigError("unknown domain preset '" + sc.domain.preset + "'", f.line("domain.preset"), "domain.preset");
  }
  sc.domain.subdivisions = f.integer("domain.subdivisions", sc.domain.subdivisions);
  if (sc.domain.subdivisions < 1) {
    throw ConfigError("must be at least 1", f.line("domain.subdivisions"), "domain.subdivisions");
  }
  sc.domain.radius = f.number("domain.radius", sc.domain.radius);
  require_positive(f, "domain.radius", sc.domain.radius);
  sc.domain.path = f.text("domain.path", "");
  if (sc.domain.preset == "file" && sc.domain.path.empty()) {
    throw ConfigError("preset 'file' needs a path", f.line("domain.preset"), "domain.path");
  }

  // coefficient
  sc.coefficient.kind = f.text("coefficient.kind", "identity");
  if (sc.coefficient.kind != "identity" && sc.coefficient.kind != "scalar" && sc.coefficient.kind != "piecewise") {
    throw ConfigError("expected identity, scalar or piecewise", f.line("coefficient.kind"), "coefficient.kind");
  }
  sc.coefficient.value = f.number("coefficient.value", 1.0);
  sc.coefficient.inside = f.number("coefficient.inside", 1.0);
  sc.coefficient.outside = f.number("coefficient.outside", 1.0);
  sc.coefficient.split = f.number("coefficient.split", 0.5);
  require_positive(f, "coefficient.value", sc.coefficient.value);
  require_positive(f, "coefficient.inside", sc.coefficient.inside);
  require_positive(f, "coefficient.outside", sc.coefficient.outside);

  // boundary
  if (!f.has("boundary.kind")) throw ConfigError("missing boundary condition", 0, "boundary.kind");
  const std::string kind = f.text("boundary.kind", "");
  const int kind_line = f.line("boundary.kind");
  if (kind == "robin") {
    sc.boundary.kind = BoundaryKind::Robin;
  } else if (kind == "neumann") {
    sc.boundary.kind = BoundaryKind::Neumann;
  } else if (kind == "dirichlet") {
    sc.boundary.kind = BoundaryKind::Dirichlet;
  } else {
    throw ConfigError("expected dirichlet, neumann or robin", kind_line, "boundary.kind");
  }
  sc.boundary.recipe = f.text("boundary.theta_recipe", "");
  if (sc.boundary.kind == BoundaryKind::Robin) {
    if (sc.boundary.recipe.empty()) {
      throw ConfigError("robin boundary needs a theta_recipe", kind_line, "boundary.theta_recipe");
    }
    if (sc.boundary.recipe != "multiplication" && sc.boundary.recipe != "composite" &&
        sc.boundary.recipe != "hs_kernel") {
      throw ConfigError("expected multiplication, composite or hs_kernel", f.line("boundary.theta_recipe"),
                        "boundary.theta_recipe");
    }
  } else if (!sc.boundary.recipe.empty()) {
    throw ConfigError("theta_recipe is only allowed for robin", f.line("boundary.theta_recipe"),
                      "boundary.theta_recipe");
  }
  static const std::map<std::string, int> theta_arity{{"constant", 1}, {"indicator", 3}, {"linear", 2}};
  static const std::map<std::string, int> kernel_arity{{"constant", 1}, {"separable", 1}, {"gaussian", 1}};
  if (f.has("boundary.theta")) {
    sc.boundary.theta =
        parse_preset<ThetaPreset>(f.text("boundary.theta", ""), f.line("boundary.theta"), "boundary.theta", theta_arity);
  }
  if (f.has("boundary.kernel")) {
    sc.boundary.kernel = parse_preset<KernelPreset>(f.text("boundary.kernel", ""), f.line("boundary.kernel"),
                                                    "boundary.kernel", kernel_arity);
  }
  sc.boundary.c1 = f.number("boundary.c1", 0.0);
  sc.boundary.c2 = f.number("boundary.c2", 0.0);
  sc.boundary.c3 = f.number("boundary.c3", 0.0);
  sc.boundary.alpha = f.number("boundary.alpha", 0.5);
  sc.boundary.epsilon = f.number("boundary.epsilon", 1.0);
  if (sc.boundary.recipe == "multiplication" && !f.has("boundary.theta")) {
    throw ConfigError("multiplication recipe needs a theta preset", kind_line, "boundary.theta");
  }
  if (sc.boundary.recipe == "hs_kernel" && !f.has("boundary.kernel")) {
    throw ConfigError("hs_kernel recipe needs a kernel preset", kind_line, "boundary.kernel");
  }
  if (sc.boundary.recipe == "composite") {
    for (const auto& [key, v] : {std::pair{"boundary.c1", sc.boundary.c1}, std::pair{"boundary.c2", sc.boundary.c2},
                                 std::pair{"boundary.c3", sc.boundary.c3}}) {
      if (v < 0.0) throw ConfigError("must be >= 0", f.line(key), key);
    }
    if (!(sc.boundary.alpha >= 0.5 && sc.boundary.alpha < 1.0)) {
      throw ConfigError("alpha must lie in [1/2, 1)", f.line("boundary.alpha"), "boundary.alpha");
    }
    require_positive(f, "boundary.epsilon", sc.boundary.epsilon);
  }

  // spectrum and time grid
  sc.eigen_count = f.integer("spectrum.count", 0);
  if (sc.eigen_count < 0) throw ConfigError("must be >= 0", f.line("spectrum.count"), "spectrum.count");
  sc.times = f.numbers("time.grid", sc.times);
  for (double t : sc.times)
    if (!(t > 0.0)) throw ConfigError("times must be positive", f.line("time.grid"), "time.grid");

  // checks
  ChecksSpec& c = sc.checks;
  c.run = f.words("checks.run");
  for (const auto& name : c.run) {
    const auto& known = known_checks();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw ConfigError("unknown check '" + name + "'", f.line("checks.run"), "checks.run");
    }
    if (std::count(c.run.begin(), c.run.end(), name) > 1) {
      throw ConfigError("check '" + name + "' listed twice", f.line("checks.run"), "checks.run");
    }
  }
  const std::vector<std::pair<const char*, double*>> tolerances{
      {"checks.positivity_tol", &c.positivity_tol},   {"checks.domination_tol", &c.domination_tol},
      {"checks.conservation_tol", &c.conservation_tol}, {"checks.davies_tol", &c.davies_tol},
      {"checks.green_tol", &c.green_tol},             {"checks.fit_cap", &c.fit_cap},
      {"checks.rho_tol", &c.rho_tol},                 {"checks.green_refine_factor", &c.green_refine_factor},
  };
  for (const auto& [key, slot] : tolerances) {
    *slot = f.number(key, *slot);
    require_positive(f, key, *slot);
  }
  c.davies_lambdas = f.numbers("checks.davies_lambdas", c.davies_lambdas);
  c.davies_times = f.numbers("checks.davies_times", c.davies_times);
  for (double t : c.davies_times)
    if (!(t > 0.0)) throw ConfigError("times must be positive", f.line("checks.davies_times"), "checks.davies_times");
  c.green_z = f.number("checks.green_z", c.green_z);
  c.green_bound_z = f.number("checks.green_bound_z", c.green_bound_z);
  c.samples = f.integer("checks.samples", c.samples);
  if (c.samples < 1) throw ConfigError("must be at least 1", f.line("checks.samples"), "checks.samples");

  sc.kernel_sample = f.text("output.kernel_sample", sc.kernel_sample);
  if (sc.kernel_sample != "center_row" && sc.kernel_sample != "all" && sc.kernel_sample != "none") {
    throw ConfigError("expected center_row, all or none", f.line("output.kernel_sample"), "output.kernel_sample");
  }
  const double seed = f.number("run.seed", static_cast<double>(sc.seed));
  if (seed < 0 || seed != std::floor(seed) || seed > 9.007199254740992e15) {
    throw ConfigError("seed must be a nonnegative integer", f.line("run.seed"), "run.seed");
  }
  sc.seed = static_cast<std::uint64_t>(seed);

  f.reject_unknown();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Scenario sc = parse_scenario(ss.str(), path.stem().string());
  if (sc.domain.preset == "file" && sc.domain.path.is_relative()) {
    sc.domain.path = path.parent_path() / sc.domain.path;
  }
  return sc;
}

Mesh build_mesh(const DomainSpec& spec) {
  if (spec.preset == "square") return generate_unit_square_mesh(spec.subdivisions);
  if (spec.preset == "lshape") return generate_lshape_mesh(spec.subdivisions);
  if (spec.preset == "cube") return generate_cube_mesh(spec.subdivisions);
  if (spec.preset == "disk") return generate_disk_mesh(spec.subdivisions, spec.radius);
  if (spec.preset == "ball") return generate_ball_mesh(spec.subdivisions, spec.radius);
  if (spec.preset == "file") return load_mesh(spec.path);
  throw InvalidArgument("unknown domain preset '" + spec.preset + "'");
}

CoefficientField build_coefficient(const CoefficientSpec& spec, int dim) {
  if (spec.kind == "identity") return CoefficientField::identity(dim);
  if (spec.kind == "scalar") return CoefficientField::scalar(dim, spec.value);
  if (spec.kind == "piecewise") return CoefficientField::piecewise(dim, spec.inside, spec.outside, spec.split);
  throw InvalidArgument("unknown coefficient kind '" + spec.kind + "'");
}

Vector evaluate_theta(const ThetaPreset& preset, const BoundaryMesh& bmesh) {
  Vector v(bmesh.vertex_count());
  for (int i = 0; i < bmesh.vertex_count(); ++i) {
    const Point& x = bmesh.vertices[i];
    if (preset.name == "constant") {
      v[i] = preset.args[0];
    } else if (preset.name == "indicator") {
      const int axis = static_cast<int>(preset.args[0]);
      if (axis < 0 || axis >= bmesh.dim) throw InvalidArgument("indicator axis out of range");
      v[i] = (x[axis] >= preset.args[1] && x[axis] <= preset.args[2]) ? 1.0 : 0.0;
    } else if (preset.name == "linear") {
      v[i] = preset.args[0] + preset.args[1] * x[0];
    } else {
      throw InvalidArgument("unknown theta preset '" + preset.name + "'");
    }
  }
  return v;
}

KernelSpec make_kernel(const KernelPreset& preset) {
  KernelSpec k;
  const double a = preset.args.empty() ? 1.0 : preset.args[0];
  k.name = preset.name;
  if (preset.name == "constant") {
    k.eval = [a](const Point&, const Point&) { return a; };
  } else if (preset.name == "separable") {
    k.eval = [a](const Point& x, const Point& y) { return (1.0 + a * x[0]) * (1.0 + a * y[0]); };
  } else if (preset.name == "gaussian") {
    if (!(a > 0.0)) throw InvalidArgument("gaussian kernel width must be positive");
    k.eval = [a](const Point& x, const Point& y) { return std::exp(-(x - y).squaredNorm() / (a * a)); };
  } else {
    throw InvalidArgument("unknown kernel preset '" + preset.name + "'");
  }
  return k;
}

}  // namespace robinlab
