#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "robinlab/error.hpp"
#include "robinlab/report.hpp"

using namespace robinlab;
namespace fs = std::filesystem;

namespace {

RunReport sample_report() {
  RunReport r;
  r.scenario = "sample";
  r.config = {{"boundary.kind", "robin"}, {"domain.preset", "square"}};
  r.seed = 123456789012345ull;
  r.boundary = "robin";
  r.mesh = {2, 25, 32, 16, 1.0, 4.0, 0.25, 0.35355339059327379};
  ThetaSummary t;
  t.recipe = "multiplication";
  t.nonnegative = true;
  t.pairing = 4.0;
  t.norm_estimate = 1.0000000000000002;
  t.parts = {"compact:multiplication"};
  r.theta = t;
  r.spectrum.method = "dense";
  r.spectrum.eigenvalues = {3.4144374899762346, 12.9, 0.1 + 0.2};
  r.spectrum.max_residual = 1e-14;
  r.spectrum.lambda1 = 3.4144374899762346;
  r.spectrum.pairing = 4.0;
  r.spectrum.gap_present = true;
  r.spectrum.verdict = "gap confirmed";
  CheckReport c;
  c.name = "positivity";
  c.passed = false;
  c.worst_margin = -1.5e-9;
  c.witness = Witness{3, 7, 0.01};
  c.parameters = {{"tolerance", 1e-8}, {"ratio", HUGE_VAL}};
  c.note = "quote \" and newline \n";
  r.checks.push_back(c);
  CheckReport d;
  d.name = "gap";
  d.passed = true;
  d.degenerate = true;
  r.checks.push_back(d);
  GaussianFit f;
  f.form = BoundForm::RhoForm;
  f.C = 12.5;
  f.c = 0.2;
  f.valid = true;
  f.times = {0.01, 1};
  f.margins = {0.0, 1e-300};
  f.samples = 5000000000ll;
  r.fits.push_back(f);
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Report, JsonRoundTrip) {
  const RunReport r = sample_report();
  const std::string text = report_to_json(r);
  const RunReport back = report_from_json(text);
  EXPECT_EQ(back, r);
  EXPECT_EQ(report_to_json(back), text);
  EXPECT_NE(text.find("\"status\": \"fail\""), std::string::npos);
}

TEST(Report, MalformedJsonIsAParseError) {
  EXPECT_THROW(report_from_json("{"), ParseError);
  EXPECT_THROW(report_from_json("{\"scenario\": 1}"), ParseError);
}

TEST(Report, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.01), "0.01");
  EXPECT_EQ(format_double(-0.0), "0");
}

TEST(Report, EmitWritesAllCompanions) {
  RunArtifacts a;
  a.report = sample_report();
  a.vertices = {Point(0, 0, 0), Point(1, 0, 0)};
  a.kernels.push_back(KernelDump{0.01, {{0, 0}, {0, 1}}, {2.0, 0.5}});
  a.timings = {{"mesh", 0.1}};
  const fs::path dir = fs::temp_directory_path() / "robinlab_emit_test";
  fs::remove_all(dir);
  const auto written = emit_report(a, dir, OutputFormat::Both);
  EXPECT_EQ(written.size(), 6u);
  EXPECT_EQ(report_from_json(slurp(dir / "report.json")), a.report);
  const std::string spectrum = slurp(dir / "spectrum.csv");
  EXPECT_EQ(lines(spectrum), 1 + 3);
  EXPECT_EQ(spectrum.substr(0, 9), "k,lambda\n");
  EXPECT_EQ(lines(slurp(dir / "checks.csv")), 1 + 2);
  EXPECT_EQ(lines(slurp(dir / "fit.csv")), 1 + 1);
  const std::string kernel = slurp(dir / "kernel_t0.01.csv");
  EXPECT_EQ(kernel, "i,j,xi_1,xi_2,xj_1,xj_2,value\n0,0,0,0,0,0,2\n0,1,0,0,1,0,0.5\n");
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_EQ(e.path().string().find(".tmp"), std::string::npos);
  fs::remove_all(dir);

  const auto json_only = emit_report(a, dir, OutputFormat::Json);
  EXPECT_EQ(json_only.size(), 2u);
  EXPECT_FALSE(fs::exists(dir / "checks.csv"));
  fs::remove_all(dir);
}

TEST(Report, AtomicWriteReplacesContent) {
  const fs::path p = fs::temp_directory_path() / "robinlab_atomic.txt";
  write_file_atomic(p, "first\n");
  write_file_atomic(p, "second\n");
  EXPECT_EQ(slurp(p), "second\n");
  fs::remove(p);
  EXPECT_THROW(write_file_atomic("/nonexistent-dir/x/y.txt", "z"), Error);
}

TEST(Report, OutputFormatNames) {
  EXPECT_EQ(output_format_from_string("both"), OutputFormat::Both);
  EXPECT_THROW(output_format_from_string("xml"), InvalidArgument);
}
