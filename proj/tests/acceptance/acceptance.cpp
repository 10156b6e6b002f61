// Acceptance run: one PASS/FAIL line per criterion, then a verdict.
//
//   freqinv_acceptance [--known-failures 3,4,5] [--out DIR]
//
// Exit status is 0 when every criterion passes or is listed as a known
// failure, 1 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "freqinv/pipeline.hpp"
#include "freqinv/verify.hpp"

using namespace freqinv;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double distance(const Point& a, const Point& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                   (a[2] - b[2]) * (a[2] - b[2]));
}

std::string fmt_point(const Point& p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.2f, %.2f, %.2f)", p[0], p[1], p[2]);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Outcome {
  int id;
  std::string name;
  bool passed;
  std::string detail;
};

struct CaseRun {
  Scenario scenario;
  ForwardResult forward;
  InversionResult inversion;
  double seconds = 0.0;
};

CaseRun run_case(const std::string& file) {
  const Scenario s = load_scenario(fs::path(FREQINV_SCENARIO_DIR) / file);
  const auto t0 = Clock::now();
  ForwardResult f = run_forward(s);
  InversionRunOptions o;
  o.keep_iterates = true;
  InversionResult inv = run_inversion(s, f.data, o);
  CaseRun r{s, std::move(f), std::move(inv), since(t0)};
  std::printf("  ran %s in %.1f s: max c %.4f at %s, %zu component(s), %zu cylinder(s)\n",
              file.c_str(), r.seconds, r.inversion.summary.max_c,
              fmt_point(r.inversion.summary.argmax).c_str(),
              r.inversion.summary.centroids.size(), r.inversion.state.cylinders.size());
  std::fflush(stdout);
  return r;
}

// Greedy one-to-one matching of expected centres to component centroids.
bool components_match(const std::vector<Point>& found, const std::vector<Point>& expected,
                      double tol, std::string& detail) {
  std::ostringstream os;
  os << found.size() << " component(s)";
  for (const auto& c : found) os << " " << fmt_point(c);
  detail = os.str();
  if (found.size() != expected.size()) return false;
  std::vector<bool> used(found.size(), false);
  for (const auto& e : expected) {
    bool hit = false;
    for (std::size_t j = 0; j < found.size() && !hit; ++j)
      if (!used[j] && distance(found[j], e) <= tol) used[j] = hit = true;
    if (!hit) return false;
  }
  return true;
}

std::string max_detail(double max_c, double lo, double hi) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "max c %.4f (accept [%.1f, %.1f])", max_c, lo, hi);
  return buf;
}

Outcome plane_wave() {
  const auto t0 = Clock::now();
  const double coarse = plane_wave_error(3.0, 0.2, 2.0);
  const double fine = plane_wave_error(3.0, 0.1, 2.0);
  const double seconds = since(t0);
  const double ratio = coarse / fine;
  char buf[160];
  std::snprintf(buf, sizeof buf, "error %.4f%% at step 0.2, ratio %.3f to step 0.1, %.1f s",
                100.0 * coarse, ratio, seconds);
  return {1, "plane-wave identity",
          coarse <= 0.02 && ratio >= 3.4 && ratio <= 4.6 && seconds <= 60.0, buf};
}

Outcome background() {
  const auto t0 = Clock::now();
  const Scenario s = load_scenario(fs::path(FREQINV_SCENARIO_DIR) / "background.json");
  const ForwardResult f = run_forward(s);
  const InversionResult r = run_inversion(s, f.data);
  const double seconds = since(t0);
  const bool ones = (r.state.c.array() == 1.0).all();
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu cylinder(s), c %s 1, %.1f s", r.state.cylinders.size(),
                ones ? "==" : "!=", seconds);
  return {2, "background reconstruction",
          ones && r.state.cylinders.empty() && seconds <= 120.0, buf};
}

Outcome case1(const CaseRun& r) {
  const auto& sum = r.inversion.summary;
  const Point centre = r.scenario.inclusions.at(0).center;
  const double d = distance(sum.argmax, centre);
  const bool ok = sum.max_c >= 2.7 && sum.max_c <= 3.3 && d <= 0.5 && r.seconds <= 1800.0;
  char buf[160];
  std::snprintf(buf, sizeof buf, ", argmax %s at distance %.2f, %.1f s",
                fmt_point(sum.argmax).c_str(), d, r.seconds);
  return {3, "case 1 reproduction", ok, max_detail(sum.max_c, 2.7, 3.3) + buf};
}

Outcome two_component_case(int id, const std::string& name, const CaseRun& r, double lo,
                           double hi) {
  const auto& sum = r.inversion.summary;
  std::vector<Point> expected;
  for (const auto& inc : r.scenario.inclusions) expected.push_back(inc.center);
  std::string comp;
  const bool match = components_match(sum.centroids, expected, 0.5, comp);
  const bool ok = match && sum.max_c >= lo && sum.max_c <= hi;
  return {id, name, ok, max_detail(sum.max_c, lo, hi) + ", " + comp};
}

Outcome localization(const std::vector<const CaseRun*>& runs) {
  bool ok = true;
  std::ostringstream os;
  for (const CaseRun* r : runs) {
    const double cell = r->scenario.step * (1.0 + 1e-9);
    os << r->scenario.name << ":";
    for (const auto& c : r->inversion.state.cylinders) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " (%.2f, %.2f)", c.x1 + 0.0, c.x2 + 0.0);
      os << buf;
    }
    for (const auto& inc : r->scenario.inclusions) {
      bool hit = false;
      for (const auto& c : r->inversion.state.cylinders)
        hit = hit || (std::abs(c.x1 - inc.center[0]) <= cell &&
                      std::abs(c.x2 - inc.center[1]) <= cell);
      ok = ok && hit;
    }
    os << "; ";
  }
  return {6, "tail localization", ok, os.str()};
}

Outcome cross_solver() {
  const auto t0 = Clock::now();
  const double d = ls_pde_disagreement(2.5, 0.5, 0.2, 2.0, 0.1, 0.5);
  const double seconds = since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "relative disagreement %.4f%% on 26^3, %.1f s", 100.0 * d,
                seconds);
  return {7, "cross-solver oracle", d <= 0.03 && seconds <= 600.0, buf};
}

Outcome born() {
  const BornStudy b = born_scaling(2.5, 0.2, 2.0, 0.05, 0.5);
  char buf[160];
  std::snprintf(buf, sizeof buf, "remainders %.3e and %.3e, ratio %.3f", b.remainder_eps,
                b.remainder_half, b.ratio());
  return {8, "Born scaling", b.ratio() >= 3.2 && b.ratio() <= 4.8, buf};
}

Outcome invariants(const std::vector<const CaseRun*>& runs, const fs::path& out) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> low(0.05, 5.0), step(0.01, 0.5);
  std::uniform_int_distribution<int> count(2, 60);
  int ladder_bad = 0;
  const int ladders = 1000;
  for (int trial = 0; trial < ladders; ++trial) {
    const double kl = low(rng), h = step(rng);
    const int N = count(rng);
    const FrequencyLadder lad{kl, kl + N * h, h, N};
    for (int n = 1; n <= lad.N; ++n) {
      const double a = lad.A(n);
      if (!(a > 1.0 && a < 2.0)) {
        ++ladder_bad;
        break;
      }
    }
  }

  int iterates = 0, below = 0;
  for (const CaseRun* r : runs)
    for (const auto& c : r->inversion.state.iterates) {
      ++iterates;
      if (c.minCoeff() < 1.0) ++below;
    }

  const CaseRun& first = *runs.front();
  fs::create_directories(out);
  write_field_vtk(out / "c_comp_a.vtk", first.inversion.state.grid, first.inversion.state.c);
  const ForwardResult again = run_forward(first.scenario);
  const InversionResult rerun = run_inversion(first.scenario, again.data);
  write_field_vtk(out / "c_comp_b.vtk", rerun.state.grid, rerun.state.c);
  const bool same = slurp(out / "c_comp_a.vtk") == slurp(out / "c_comp_b.vtk");

  char buf[200];
  std::snprintf(buf, sizeof buf,
                "A_n outside (1, 2) on %d of %d ladders; c < 1 on %d of %d iterates; "
                "repeat %s run VTK %s",
                ladder_bad, ladders, below, iterates, first.scenario.name.c_str(),
                same ? "identical" : "differs");
  return {9, "invariant suite", ladder_bad == 0 && below == 0 && iterates > 0 && same, buf};
}

Outcome error_decrease(const CaseRun& r) {
  Scenario s = r.scenario;
  s.noise_level = 0.0;
  InversionRunOptions o;
  o.track_error = true;
  const InversionResult inv = run_inversion(s, r.forward.data, o);
  std::map<int, double> last;
  for (const auto& rec : inv.state.history)
    if (rec.error_max) last[rec.n] = *rec.error_max;
  const int n_last = inv.state.history.empty() ? 0 : inv.state.history.back().n;
  if (!last.count(1) || !last.count(n_last) || n_last < 2)
    return {10, "error decrease", false, "missing error history"};
  char buf[160];
  std::snprintf(buf, sizeof buf, "max |c - c_true| %.4f at n = 1, %.4f at n = %d",
                last[1], last[n_last], n_last);
  return {10, "error decrease", last[n_last] < last[1], buf};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> known;
  fs::path out = fs::temp_directory_path() / "freqinv_acceptance";
  app.add_option("--known-failures", known, "Criteria allowed to fail")->delimiter(',');
  app.add_option("--out", out, "Scratch directory");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> allowed(known.begin(), known.end());

  std::vector<Outcome> results;
  auto report = [&](Outcome o) {
    std::printf("[%s] %d. %s: %s\n", o.passed ? "PASS" : "FAIL", o.id, o.name.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    results.push_back(std::move(o));
  };

  try {
    report(plane_wave());
    report(background());
    const CaseRun c1 = run_case("case1.json");
    report(case1(c1));
    const CaseRun c2 = run_case("case2.json");
    report(two_component_case(4, "case 2 reproduction", c2, 2.6, 3.6));
    const CaseRun c3 = run_case("case3.json");
    report(two_component_case(5, "case 3 reproduction", c3, 2.7, 3.3));
    report(localization({&c1, &c2, &c3}));
    report(cross_solver());
    report(born());
    report(invariants({&c1, &c2, &c3}, out));
    report(error_decrease(c1));
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }

  int passed = 0, unexpected = 0;
  for (const auto& r : results) {
    passed += r.passed ? 1 : 0;
    unexpected += (!r.passed && !allowed.count(r.id)) ? 1 : 0;
  }
  std::printf("acceptance: %d of %zu criteria passed", passed, results.size());
  if (passed < static_cast<int>(results.size()))
    std::printf(", %zu known failure(s) allowed", results.size() - passed - unexpected);
  std::printf("\n");
  return unexpected ? 1 : 0;
}
