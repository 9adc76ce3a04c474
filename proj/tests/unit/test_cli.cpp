#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "support.hpp"
#include "tvcert/cli.hpp"
#include "tvcert/io.hpp"
#include "tvcert/report.hpp"

using namespace tvtest;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() : path(std::filesystem::temp_directory_path() / "tvcert_cli_test") {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

int run_quiet(const RunConfig& c, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  const int code = run(c, out, err);
  if (out_text) *out_text = out.str();
  return code;
}

}  // namespace

TEST_CASE("certify: constant u with zero subgradient exits 0") {
  TempDir tmp;
  Raster r{8, 8, 4, std::vector<double>(8 * 8 * 4, 0.0)};
  for (int k = 0; k < 64; ++k) r.data[k * 4] = 0.5;
  write_fld(tmp.file("c.fld"), r);
  RunConfig c;
  c.command = "certify";
  c.input = tmp.file("c.fld");
  c.output = tmp.file("out");
  c.report = ReportFormat::json;
  std::string text;
  CHECK(run_quiet(c, &text) == kExitCertified);
  CHECK(Json::parse(text)["verdict"] == "certified");
  CHECK(std::filesystem::exists(tmp.file("out.json")));
}

TEST_CASE("certify: forged sup-norm 2 field exits 2") {
  TempDir tmp;
  Raster r{8, 8, 4, std::vector<double>(8 * 8 * 4, 0.0)};
  for (int k = 0; k < 64; ++k) {
    r.data[k * 4] = 1.0;
    r.data[k * 4 + 2] = (k % 8 == 7) ? 0.0 : 2.0;
  }
  write_fld(tmp.file("f.fld"), r);
  RunConfig c;
  c.command = "certify";
  c.input = tmp.file("f.fld");
  CHECK(run_quiet(c) == kExitRefuted);
}

TEST_CASE("malformed input and bad configuration exit 1") {
  TempDir tmp;
  write_bytes(tmp.file("bad.fld"), "FLD 4 4 4\nshort");
  RunConfig c;
  c.command = "certify";
  c.input = tmp.file("bad.fld");
  CHECK(run_quiet(c) == kExitError);
  c.input = tmp.file("missing.fld");
  CHECK(run_quiet(c) == kExitError);
  RunConfig neg;
  neg.command = "denoise";
  neg.lambda = -1.0;
  CHECK(run_quiet(neg) == kExitError);
  RunConfig unknown;
  unknown.command = "frobnicate";
  CHECK(run_quiet(unknown) == kExitError);
}

TEST_CASE("flow on constant input: zero TV, monotone, CSV written") {
  TempDir tmp;
  write_fld(tmp.file("k.fld"), Raster{6, 6, 1, std::vector<double>(36, 0.25)});
  RunConfig c;
  c.command = "flow";
  c.input = tmp.file("k.fld");
  c.tau = 0.05;
  c.steps = 3;
  c.output = tmp.file("flow");
  CHECK(run_quiet(c) == kExitCertified);
  const std::string csv = read_bytes(tmp.file("flow.csv"));
  CHECK(csv.rfind("t,tv,a0,amplitude\n", 0) == 0);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(line.find(",0,") != std::string::npos);
  }
  // constant data is extinct after the first step
  CHECK(rows == 2);
  RunConfig missing_tau = c;
  missing_tau.tau.reset();
  CHECK(run_quiet(missing_tau) == kExitError);
}

TEST_CASE("calibrate disc exits 0; rerun gives identical JSON") {
  RunConfig c;
  c.command = "calibrate";
  c.height = c.width = 256;
  c.report = ReportFormat::json;
  std::string a, b;
  CHECK(run_quiet(c, &a) == kExitCertified);
  CHECK(run_quiet(c, &b) == kExitCertified);
  CHECK(a == b);
}

TEST_CASE("denoise then oracle on the result") {
  TempDir tmp;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  Raster r{12, 12, 1, {}};
  for (int k = 0; k < 144; ++k) r.data.push_back(n(rng));
  write_fld(tmp.file("n.fld"), r);
  RunConfig c;
  c.command = "denoise";
  c.input = tmp.file("n.fld");
  c.output = tmp.file("d");
  c.h = 1.0;
  CHECK(run_quiet(c) == kExitCertified);
  const Raster u = read_raster(tmp.file("d.u.fld"));
  CHECK(u.height == 12);
  const Raster g = read_raster(tmp.file("d.g.fld"));
  CHECK(g.channels == 2);

  // oracle input: u and u* = 2 lambda (u0 - u)
  Raster pair{12, 12, 2, {}};
  for (int k = 0; k < 144; ++k) {
    pair.data.push_back(u.data[k]);
    pair.data.push_back(2.0 * c.lambda * (r.data[k] - u.data[k]));
  }
  write_fld(tmp.file("p.fld"), pair);
  RunConfig o;
  o.command = "oracle";
  o.input = tmp.file("p.fld");
  o.samples = 200;
  o.h = 1.0;
  CHECK(run_quiet(o) == kExitCertified);
}
