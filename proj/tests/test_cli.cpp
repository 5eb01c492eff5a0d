#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

int run(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return rc < 0 ? rc : WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

long count_lines(const std::string& text) {
  long n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

const std::string bin = BUSEMANN_LAB_BIN;

}  // namespace

TEST_CASE("eval phitau at the tube centre is zero") {
  REQUIRE(run(bin + " eval --what phitau --point 0 0 0 0 1 > /tmp/cli_phitau.json") == 0);
  const std::string out = slurp("/tmp/cli_phitau.json");
  CHECK(out.find("\"phi_tau\": 0.0") != std::string::npos);
}

TEST_CASE("eval w at the origin returns y") {
  REQUIRE(run(bin + " eval --what w --point 0 0 0 0 > /tmp/cli_w.json") == 0);
  CHECK(slurp("/tmp/cli_w.json").find("\"w\": 1.0") != std::string::npos);
}

TEST_CASE("scan-tube is deterministic and sized by the grid") {
  const std::string flags =
      " scan-tube --t-count 3 --eta-count 2 --restarts 8 --audit-samples 20000";
  REQUIRE(run(bin + flags + " --output /tmp/cli_scan_a.csv > /dev/null") == 0);
  REQUIRE(run(bin + flags + " --output /tmp/cli_scan_b.csv > /dev/null") == 0);
  const std::string a = slurp("/tmp/cli_scan_a.csv");
  const std::string b = slurp("/tmp/cli_scan_b.csv");
  REQUIRE(!a.empty());
  CHECK(a == b);  // byte-identical
  CHECK(count_lines(a) == 1 + 3 * 2);  // header + t_count * eta_count rows
  CHECK(a.rfind("t,eta11,eta12,eta21,eta22,xprime,phi_tau,phi_w_lower,phi_w_upper,cap,verdict\n",
                0) == 0);
  // summary sidecar exists and reports the row count
  CHECK(slurp("/tmp/cli_scan_a.csv.summary.json").find("\"rows\": 6") != std::string::npos);
}

TEST_CASE("report summarizes a scan CSV") {
  REQUIRE(run(bin + " report --input /tmp/cli_scan_a.csv > /tmp/cli_report.json") == 0);
  const std::string out = slurp("/tmp/cli_report.json");
  CHECK(out.find("\"rows\": 6") != std::string::npos);
  CHECK(out.find("n_gap_certified") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run(bin + " --bogus > /dev/null 2>&1") == 2);
  CHECK(run(bin + " eval --point 0 > /dev/null 2>&1") == 2);  // missing --what
  CHECK(run(bin + " eval --what nonsense --point 0 > /dev/null 2>&1") == 2);
  CHECK(run(bin + " probe --kind nonsense > /dev/null 2>&1") == 2);
}

TEST_CASE("I/O errors exit with code 4") {
  CHECK(run(bin + " report --input /tmp/definitely_missing_scan.csv > /dev/null 2>&1") == 4);
  CHECK(run(bin + " scan-tube --t-count 1 --eta-count 1 --restarts 8 --audit-samples 20000"
                  " --output /nonexistent_dir/scan.csv > /dev/null 2>&1") == 4);
}
