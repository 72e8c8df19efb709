#include "robinlab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "json.hpp"

#include "robinlab/error.hpp"

namespace robinlab {

using nlohmann::json;

bool RunReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

// JSON has no infinities; keep them as strings so the tree round-trips
json num(double v) {
  if (v == 0.0) return 0.0;
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    if (s == "nan") return std::nan("");
  }
  throw ParseError("expected a number in report JSON");
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> nums(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(num(x));
  return v;
}

json to_tree(const CheckReport& c) {
  json j;
  j["name"] = c.name;
  j["passed"] = c.passed;
  j["worst_margin"] = num(c.worst_margin);
  j["degenerate"] = c.degenerate;
  j["note"] = c.note;
  if (c.witness) {
    j["witness"] = {{"i", c.witness->i}, {"j", c.witness->j}, {"t", num(c.witness->t)}};
  } else {
    j["witness"] = nullptr;
  }
  json p = json::object();
  for (const auto& [k, v] : c.parameters) p[k] = num(v);
  j["parameters"] = p;
  return j;
}

CheckReport check_from_tree(const json& j) {
  CheckReport c;
  c.name = j.at("name").get<std::string>();
  c.passed = j.at("passed").get<bool>();
  c.worst_margin = num(j.at("worst_margin"));
  c.degenerate = j.at("degenerate").get<bool>();
  c.note = j.at("note").get<std::string>();
  if (!j.at("witness").is_null()) {
    const json& w = j.at("witness");
    c.witness = Witness{w.at("i").get<int>(), w.at("j").get<int>(), num(w.at("t"))};
  }
  for (const auto& [k, v] : j.at("parameters").items()) c.parameters[k] = num(v);
  return c;
}

json to_tree(const GaussianFit& f) {
  return {{"form", to_string(f.form)},  {"C", num(f.C)},
          {"c", num(f.c)},              {"valid", f.valid},
          {"violations", f.violations}, {"degenerate", f.degenerate},
          {"samples", f.samples},       {"times", nums(f.times)},
          {"margins", nums(f.margins)}};
}

GaussianFit fit_from_tree(const json& j) {
  GaussianFit f;
  f.form = bound_form_from_string(j.at("form").get<std::string>());
  f.C = num(j.at("C"));
  f.c = num(j.at("c"));
  f.valid = j.at("valid").get<bool>();
  f.violations = j.at("violations").get<int>();
  f.degenerate = j.at("degenerate").get<bool>();
  f.samples = j.at("samples").get<long long>();
  f.times = nums(j.at("times"));
  f.margins = nums(j.at("margins"));
  return f;
}

}  // namespace

std::string report_to_json(const RunReport& r) {
  json j;
  j["scenario"] = r.scenario;
  j["config"] = r.config;
  j["seed"] = r.seed;
  j["boundary"] = r.boundary;
  j["mesh"] = {{"dim", r.mesh.dim},
               {"vertices", r.mesh.vertices},
               {"cells", r.mesh.cells},
               {"boundary_facets", r.mesh.boundary_facets},
               {"volume", num(r.mesh.volume)},
               {"boundary_measure", num(r.mesh.boundary_measure)},
               {"h_min", num(r.mesh.h_min)},
               {"h_max", num(r.mesh.h_max)}};
  if (r.theta) {
    const ThetaSummary& t = *r.theta;
    j["theta"] = {{"recipe", t.recipe},
                  {"nonnegative", t.nonnegative},
                  {"pairing", num(t.pairing)},
                  {"norm_estimate", num(t.norm_estimate)},
                  {"small_part_norm", num(t.small_part_norm)},
                  {"delta", num(t.delta)},
                  {"epsilon", num(t.epsilon)},
                  {"parts", t.parts}};
  } else {
    j["theta"] = nullptr;
  }
  const SpectrumSummary& s = r.spectrum;
  j["spectrum"] = {{"method", s.method},
                   {"eigenvalues", nums(s.eigenvalues)},
                   {"max_residual", num(s.max_residual)},
                   {"orthonormality_defect", num(s.orthonormality_defect)},
                   {"lambda1", num(s.lambda1)},
                   {"pairing", num(s.pairing)},
                   {"gap_present", s.gap_present},
                   {"verdict", s.verdict}};
  j["checks"] = json::array();
  for (const auto& c : r.checks) j["checks"].push_back(to_tree(c));
  j["fits"] = json::array();
  for (const auto& f : r.fits) j["fits"].push_back(to_tree(f));
  j["status"] = r.all_passed() ? "pass" : "fail";
  return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    RunReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.config = j.at("config").get<std::map<std::string, std::string>>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.boundary = j.at("boundary").get<std::string>();
    const json& m = j.at("mesh");
    r.mesh = {m.at("dim").get<int>(),          m.at("vertices").get<int>(),  m.at("cells").get<int>(),
              m.at("boundary_facets").get<int>(), num(m.at("volume")),       num(m.at("boundary_measure")),
              num(m.at("h_min")),               num(m.at("h_max"))};
    if (!j.at("theta").is_null()) {
      const json& t = j.at("theta");
      ThetaSummary ts;
      ts.recipe = t.at("recipe").get<std::string>();
      ts.nonnegative = t.at("nonnegative").get<bool>();
      ts.pairing = num(t.at("pairing"));
      ts.norm_estimate = num(t.at("norm_estimate"));
      ts.small_part_norm = num(t.at("small_part_norm"));
      ts.delta = num(t.at("delta"));
      ts.epsilon = num(t.at("epsilon"));
      ts.parts = t.at("parts").get<std::vector<std::string>>();
      r.theta = ts;
    }
    const json& s = j.at("spectrum");
    r.spectrum.method = s.at("method").get<std::string>();
    r.spectrum.eigenvalues = nums(s.at("eigenvalues"));
    r.spectrum.max_residual = num(s.at("max_residual"));
    r.spectrum.orthonormality_defect = num(s.at("orthonormality_defect"));
    r.spectrum.lambda1 = num(s.at("lambda1"));
    r.spectrum.pairing = num(s.at("pairing"));
    r.spectrum.gap_present = s.at("gap_present").get<bool>();
    r.spectrum.verdict = s.at("verdict").get<std::string>();
    for (const auto& c : j.at("checks")) r.checks.push_back(check_from_tree(c));
    for (const auto& f : j.at("fits")) r.fits.push_back(fit_from_tree(f));
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report JSON: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("malformed report JSON: ") + e.what());
  }
}

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "both") return OutputFormat::Both;
  throw InvalidArgument("format must be json, csv or both");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move output into '" + path.string() + "'");
  }
}

std::vector<std::filesystem::path> emit_report(const RunArtifacts& a, const std::filesystem::path& dir,
                                               OutputFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& content) {
    write_file_atomic(dir / name, content);
    written.push_back(dir / name);
  };
  const RunReport& r = a.report;

  if (format != OutputFormat::Csv) {
    put("report.json", report_to_json(r));
    json t = json::object();
    for (const auto& [stage, seconds] : a.timings) t[stage] = seconds;
    put("timing.json", t.dump(2) + "\n");
  }
  if (format == OutputFormat::Json) return written;

  std::ostringstream spec;
  spec << "k,lambda\n";
  for (std::size_t k = 0; k < r.spectrum.eigenvalues.size(); ++k)
    spec << k + 1 << ',' << format_double(r.spectrum.eigenvalues[k]) << '\n';
  put("spectrum.csv", spec.str());

  const int dim = r.mesh.dim;
  for (const KernelDump& k : a.kernels) {
    std::ostringstream out;
    out << "i,j";
    for (int d = 0; d < dim; ++d) out << ",xi_" << d + 1;
    for (int d = 0; d < dim; ++d) out << ",xj_" << d + 1;
    out << ",value\n";
    for (std::size_t p = 0; p < k.pairs.size(); ++p) {
      const auto [i, j] = k.pairs[p];
      out << i << ',' << j;
      for (int d = 0; d < dim; ++d) out << ',' << format_double(a.vertices[i][d]);
      for (int d = 0; d < dim; ++d) out << ',' << format_double(a.vertices[j][d]);
      out << ',' << format_double(k.values[p]) << '\n';
    }
    put("kernel_t" + format_double(k.t) + ".csv", out.str());
  }

  std::ostringstream fit;
  fit << "form,C,c,violations\n";
  for (const auto& f : r.fits)
    fit << to_string(f.form) << ',' << format_double(f.C) << ',' << format_double(f.c) << ',' << f.violations << '\n';
  put("fit.csv", fit.str());

  std::ostringstream checks;
  checks << "name,pass,margin\n";
  for (const auto& c : r.checks) checks << c.name << ',' << (c.passed ? 1 : 0) << ',' << format_double(c.worst_margin) << '\n';
  put("checks.csv", checks.str());
  return written;
}

}  // namespace robinlab
