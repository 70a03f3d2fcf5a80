// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each criterion also has a wall-clock budget that counts as part
// of the criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "certinpaint/cli.hpp"
#include "certinpaint/density.hpp"
#include "certinpaint/dual.hpp"
#include "certinpaint/energy.hpp"
#include "certinpaint/grid.hpp"
#include "certinpaint/netpbm.hpp"
#include "certinpaint/solver.hpp"
#include "oracle/oracle.hpp"
#include "support/instances.hpp"

namespace {

using namespace certinpaint;
using certinpaint::testing::Instance;

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> body;
};

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double sup_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Every solve in criteria 6-7 lands here for criterion 8.
struct MaxPrincipleLog {
  int checked = 0;
  int failed = 0;
  double worst_margin = std::numeric_limits<double>::infinity();

  void add(const ImageField& u, const ImageField& f, const DamageMask& mask) {
    const MaxPrincipleCheck c = check_max_principle(u, f, mask);
    ++checked;
    if (!c.passed) ++failed;
    worst_margin = std::min(worst_margin, c.margin);
  }
};

MaxPrincipleLog g_max_principle;

// 1. F(P) + F*(DF(P)) = P : DF(P).
Outcome fenchel_young() {
  Outcome out;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> radius(0.0, 100.0);
  std::uniform_int_distribution<int> channels(1, 3);
  double worst = 0.0;
  for (double mu : {1.5, 2.0, 3.0}) {
    const DensityParams params(mu);
    for (int k = 0; k < 1000; ++k) {
      std::vector<double> p(2 * channels(rng));
      for (auto& v : p) v = unit(rng);
      const double scale = radius(rng) / frobenius_norm(p);
      for (auto& v : p) v *= scale;
      const std::vector<double> q = density_gradient(params, p);
      double pq = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) pq += p[i] * q[i];
      const double lhs = density_value(params, p) + phi_conjugate(params, frobenius_norm(q));
      worst = std::max(worst, std::abs(lhs - pq));
    }
  }
  out.require(worst <= 1e-9, fmt::format("max defect {:.3e}", worst));
  out.detail = out.detail.empty() ? fmt::format("max |defect| {:.2e} over 3000 samples", worst)
                                  : out.detail;
  return out;
}

// 2. Closed form against the nested quadrature.
Outcome closed_form_vs_quadrature() {
  Outcome out;
  double worst = 0.0;
  for (double mu : {1.5, 2.0, 3.0}) {
    for (double t : {0.1, 1.0, 10.0, 100.0}) {
      const double exact = oracle::phi_by_quadrature(mu, t);
      const double rel = std::abs(phi(DensityParams(mu), t) - exact) / exact;
      worst = std::max(worst, rel);
      out.require(rel <= 1e-10, fmt::format("mu={} t={} rel {:.3e}", mu, t, rel));
    }
  }
  if (out.passed) out.detail = fmt::format("max rel error {:.2e} on 12 points", worst);
  return out;
}

// 3. Analytic Euler residual against central differences of the energy.
Outcome gradient_correctness() {
  Outcome out;
  std::mt19937_64 rng(303);
  double worst = 0.0;
  int combos = 0;
  for (double mu : {1.5, 2.0, 3.0}) {
    for (double delta : {0.0, 1e-3, 0.1}) {
      for (double zeta : {1.5, 2.0, 3.0}) {
        const ModelParams params(2.0, zeta, DensityParams(mu, delta));
        const ImageField u = testing::random_field(6, 6, 1, 0.0, 1.0, rng);
        const ImageField f = testing::random_field(6, 6, 1, 0.0, 1.0, rng);
        const DamageMask mask = testing::random_mask(6, 6, 0.3, rng);
        const ImageField g = euler_residual(u, f, mask, params);
        const double step = 1e-6 * (1.0 + sup_abs(u.values()));
        const ImageField fd = oracle::fd_gradient(u, f, mask, params, step);
        const double rel = sup_diff(g.values(), fd.values()) / sup_abs(g.values());
        worst = std::max(worst, rel);
        ++combos;
        out.require(rel <= 1e-6,
                    fmt::format("mu={} delta={} zeta={} rel {:.3e}", mu, delta, zeta, rel));
      }
    }
  }
  if (out.passed) out.detail = fmt::format("max rel error {:.2e} over {} combos", worst, combos);
  return out;
}

// 4. <grad u, p> = -<u, div p>.
Outcome adjointness() {
  Outcome out;
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> side(1, 32);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int w = side(rng), h = side(rng), m = k % 2 == 0 ? 1 : 3;
    const ImageField u = testing::random_field(w, h, m, -1.0, 1.0, rng);
    const GradientField p = testing::random_gradient_field(w, h, m, -1.0, 1.0, rng);
    const double lhs = inner_product(gradient(u), p);
    const double rhs = inner_product(u, divergence(p));
    const double defect = std::abs(lhs + rhs) / (1.0 + std::abs(lhs));
    worst = std::max(worst, defect);
  }
  out.require(worst <= 1e-10, fmt::format("max defect {:.3e}", worst));
  if (out.passed) out.detail = fmt::format("max scaled defect {:.2e} over 100 pairs", worst);
  return out;
}

// 5. R[DF(grad u)] <= I[u] and <= I[v] for independent admissible v.
Outcome weak_duality() {
  Outcome out;
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> side(2, 10);
  std::uniform_real_distribution<double> lambda(0.1, 50.0);
  double min_slack = std::numeric_limits<double>::infinity();
  int samples = 0;
  for (double zeta : {1.5, 2.0, 3.0}) {
    for (int k = 0; k < 200; ++k) {
      const int w = side(rng), h = side(rng), m = k % 3 == 0 ? 3 : 1;
      const ModelParams params(lambda(rng), zeta, DensityParams(2.0));
      const ImageField f = testing::random_field_in_ball(w, h, m, 1.0, rng);
      const DamageMask mask = testing::random_mask(w, h, 0.4, rng);
      const double bound = known_sup_norm(f, mask);
      const ImageField u = testing::random_field_in_ball(w, h, m, bound, rng);
      const ImageField v = testing::random_field_in_ball(w, h, m, bound, rng);
      const DualPair dp = dual_from_primal(u, params);
      const double r = dual_value(dp.tau, f, mask, params, bound);
      const double iu = primal_energy(u, f, mask, params);
      const double iv = primal_energy(v, f, mask, params);
      min_slack = std::min({min_slack, iu - r, iv - r});
      ++samples;
      out.require(r <= iu + 1e-10 && r <= iv + 1e-10,
                  fmt::format("zeta={} sample {} R {:.12g} I[u] {:.12g} I[v] {:.12g}", zeta, k,
                              r, iu, iv));
    }
  }
  if (out.passed) {
    out.detail = fmt::format("{} fields, min I - R {:.3e}", samples, min_slack);
  }
  return out;
}

ContinuationResult solve(const Instance& inst, const ModelParams& params, const SolverConfig& cfg) {
  ContinuationResult r = continuation(inst.f, inst.mask, params, cfg);
  g_max_principle.add(r.u, inst.f, inst.mask);
  return r;
}

// 6. Continuation against the brute-force minimizer on tiny instances.
Outcome oracle_equivalence() {
  Outcome out;
  struct Case {
    std::string name;
    Instance inst;
    ModelParams params;
  };
  std::vector<Case> cases;
  cases.push_back({"bridge 1x5", testing::bridge_instance(),
                   ModelParams(1e4, 2.0, DensityParams(2.0))});
  std::mt19937_64 rng(606);
  const int dims[9][2] = {{2, 2}, {3, 1}, {2, 3}, {4, 1}, {4, 2}, {2, 4}, {3, 2}, {1, 6}, {2, 2}};
  const double mus[9] = {2.0, 1.5, 3.0, 2.0, 2.5, 2.0, 1.5, 3.0, 2.0};
  const double zetas[9] = {2.0, 1.5, 2.0, 3.0, 2.0, 1.5, 3.0, 2.0, 2.0};
  const double lambdas[9] = {1.0, 5.0, 0.5, 10.0, 2.0, 20.0, 3.0, 1.0, 100.0};
  for (int k = 0; k < 9; ++k) {
    const int w = dims[k][0], h = dims[k][1];
    ImageField f = testing::random_field(w, h, 1, 0.0, 1.0, rng);
    DamageMask mask = testing::random_mask(w, h, 0.35, rng);
    cases.push_back({fmt::format("random {}x{}", w, h), {std::move(f), std::move(mask)},
                     ModelParams(lambdas[k], zetas[k], DensityParams(mus[k]))});
  }

  SolverConfig cfg;
  cfg.gap_tol = 1e-8;
  double worst = 0.0;
  for (const Case& c : cases) {
    const double bound = known_sup_norm(c.inst.f, c.inst.mask);
    const oracle::BruteForceResult bf =
        oracle::brute_force_minimize(c.inst.f, c.inst.mask, c.params, bound);
    const ContinuationResult r = solve(c.inst, c.params, cfg);
    const double diff = std::abs(r.certificate.primal_value - bf.energy);
    worst = std::max(worst, diff);
    out.require(diff <= 1e-4, fmt::format("{}: |I - I_bf| = {:.3e}", c.name, diff));
    if (c.name == "bridge 1x5") {
      const std::vector<double> ramp{0.0, 0.25, 0.5, 0.75, 1.0};
      const double err = sup_diff(r.u.values(), ramp);
      out.require(err <= 1e-2, fmt::format("bridge ramp error {:.3e}", err));
    }
  }
  if (out.passed) {
    out.detail = fmt::format("{} instances, max |I - I_bf| {:.2e}", cases.size(), worst);
  }
  return out;
}

// Runs of criteria 7 and 10 share the full-schedule solves.
struct CertifiedRun {
  double zeta;
  double gap_tol;
  ContinuationResult early;  // stops at gap_tol
  ContinuationResult full;   // gap_tol = 0, runs to delta_min
};

std::vector<CertifiedRun> g_certified;

// 7. 16x16 block inpainting certifies before the viscosity floor.
Outcome certified_solve() {
  Outcome out;
  const Instance inst = testing::checkerboard_instance(16, 8, 4);
  std::string summary;
  for (const auto& [zeta, tol] : {std::pair{2.0, 1e-4}, {1.5, 1e-3}, {3.0, 1e-3}}) {
    const auto start = std::chrono::steady_clock::now();
    const ModelParams params(10.0, zeta, DensityParams(2.0));
    SolverConfig cfg;
    cfg.gap_tol = tol;
    CertifiedRun run{zeta, tol, solve(inst, params, cfg), {}};
    cfg.gap_tol = 0.0;
    run.full = solve(inst, params, cfg);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const auto& rec = run.early.records;
    out.require(run.early.converged && !rec.empty(), fmt::format("zeta={} not certified", zeta));
    if (!rec.empty()) {
      out.require(rec.back().delta > cfg.delta_min * (1.0 + 1e-9),
                  fmt::format("zeta={} certified only at delta {:.1e}", zeta, rec.back().delta));
      out.require(run.early.certificate.relative_gap <= tol,
                  fmt::format("zeta={} gap {:.3e}", zeta, run.early.certificate.relative_gap));
    }
    out.require(seconds < 60.0, fmt::format("zeta={} took {:.1f} s", zeta, seconds));
    summary += fmt::format("{}zeta={}: gap {:.2e} at delta {:.0e}", summary.empty() ? "" : ", ",
                           zeta, run.early.certificate.relative_gap,
                           rec.empty() ? 0.0 : rec.back().delta);
    g_certified.push_back(std::move(run));
  }
  if (out.passed) out.detail = summary;
  return out;
}

// 8. Maximum principle on every solve so far plus randomized instances.
Outcome max_principle() {
  Outcome out;
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<int> side(3, 10);
  std::uniform_real_distribution<double> lambda(0.5, 30.0);
  std::uniform_real_distribution<double> mu(1.3, 3.5);
  const double zetas[3] = {1.5, 2.0, 3.0};
  for (int k = 0; k < 20; ++k) {
    const int w = side(rng), h = side(rng), m = k % 4 == 0 ? 3 : 1;
    const Instance inst{testing::random_field_in_ball(w, h, m, 1.0, rng),
                        testing::random_mask(w, h, 0.4, rng)};
    const ModelParams params(lambda(rng), zetas[k % 3], DensityParams(mu(rng)));
    SolverConfig cfg;
    cfg.init = k % 2 == 0 ? InitStrategy::kMeanFill : InitStrategy::kRandomFill;
    cfg.seed = static_cast<std::uint64_t>(k);
    solve(inst, params, cfg);
  }
  out.require(g_max_principle.failed == 0,
              fmt::format("{} of {} solves violate", g_max_principle.failed,
                          g_max_principle.checked));
  out.require(g_max_principle.worst_margin >= -1e-8,
              fmt::format("worst margin {:.3e}", g_max_principle.worst_margin));
  if (out.passed) {
    out.detail = fmt::format("{} solves, worst margin L - sup|u| = {:.2e}", g_max_principle.checked,
                             g_max_principle.worst_margin);
  }
  return out;
}

// 9. Two seeded starts give the same smooth minimizers and the same limit
// on the gradient and on the known region.
Outcome uniqueness() {
  Outcome out;
  std::mt19937_64 rng(909);
  std::vector<std::pair<std::string, Instance>> instances;
  instances.emplace_back("checkerboard 16x16", testing::checkerboard_instance(16, 8, 4));
  instances.emplace_back("random 10x8 rgb", Instance{testing::random_field_in_ball(10, 8, 3, 1.0, rng),
                                                     testing::random_mask(10, 8, 0.3, rng)});
  const ModelParams params(10.0, 2.0, DensityParams(2.0));
  double worst_smooth = 0.0, worst_grad = 0.0, worst_known = 0.0;
  for (const auto& [name, inst] : instances) {
    SolverConfig a, b;
    a.init = b.init = InitStrategy::kRandomFill;
    a.seed = 1;
    b.seed = 2;
    const ImageField ua = initial_guess(inst.f, inst.mask, a);
    const ImageField ub = initial_guess(inst.f, inst.mask, b);
    out.require(sup_diff(ua.values(), ub.values()) > 0.1, name + ": starts do not differ");
    for (double delta : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
      const InnerResult ra = minimize_smooth(ua, delta, inst.f, inst.mask, params, a);
      const InnerResult rb = minimize_smooth(ub, delta, inst.f, inst.mask, params, b);
      const double d = sup_diff(ra.u.values(), rb.u.values());
      worst_smooth = std::max(worst_smooth, d);
      out.require(d <= 1e-6, fmt::format("{} delta={:.0e}: sup diff {:.3e}", name, delta, d));
    }

    a.gap_tol = b.gap_tol = 0.0;
    const ContinuationResult ca = continuation(inst.f, inst.mask, params, a);
    const ContinuationResult cb = continuation(inst.f, inst.mask, params, b);
    g_max_principle.add(ca.u, inst.f, inst.mask);
    g_max_principle.add(cb.u, inst.f, inst.mask);
    const double dg = sup_diff(gradient(ca.u).values(), gradient(cb.u).values());
    double dk = 0.0;
    for (std::size_t i = 0; i < inst.f.pixel_count(); ++i) {
      if (inst.mask.damaged(i)) continue;
      dk = std::max(dk, sup_diff(ca.u.pixel(i), cb.u.pixel(i)));
    }
    worst_grad = std::max(worst_grad, dg);
    worst_known = std::max(worst_known, dk);
    out.require(dg <= 1e-5, fmt::format("{}: gradient diff {:.3e}", name, dg));
    out.require(dk <= 1e-5, fmt::format("{}: known-region diff {:.3e}", name, dk));
  }
  if (out.passed) {
    out.detail = fmt::format("smooth {:.1e}, final grad {:.1e}, final known {:.1e}", worst_smooth,
                             worst_grad, worst_known);
  }
  return out;
}

// 10. delta * sum |grad u_delta|^2 along the full schedule.
Outcome viscosity_decay() {
  Outcome out;
  std::string summary;
  out.require(!g_certified.empty(), "criterion 7 runs missing");
  for (const CertifiedRun& run : g_certified) {
    const auto& rec = run.full.records;
    if (rec.size() < 3) {
      out.require(false, fmt::format("zeta={}: only {} outer steps", run.zeta, rec.size()));
      continue;
    }
    const std::size_t n = rec.size();
    const bool decreasing = rec[n - 1].viscous_dissipation < rec[n - 2].viscous_dissipation &&
                            rec[n - 2].viscous_dissipation < rec[n - 3].viscous_dissipation;
    out.require(decreasing, fmt::format("zeta={}: tail not decreasing", run.zeta));
    out.require(rec.back().viscous_dissipation <= 1e-6,
                fmt::format("zeta={}: final {:.3e}", run.zeta, rec.back().viscous_dissipation));
    summary += fmt::format("{}zeta={}: {:.1e}", summary.empty() ? "" : ", ", run.zeta,
                           rec.back().viscous_dissipation);
  }
  if (out.passed) out.detail = "final values " + summary;
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 11. Bit-exact Netpbm round trip and byte-identical CLI artifacts.
Outcome cli_round_trip() {
  Outcome out;
  const std::filesystem::path dir = std::filesystem::path(CERTINPAINT_TEST_TMPDIR) / "acceptance";
  std::filesystem::create_directories(dir);

  std::mt19937_64 rng(1111);
  std::uniform_int_distribution<int> byte(0, 255);
  for (NetpbmFormat format : {NetpbmFormat::kP5, NetpbmFormat::kP6}) {
    NetpbmImage img;
    img.format = format;
    img.width = 13;
    img.height = 7;
    img.maxval = 255;
    img.samples.resize(static_cast<std::size_t>(13) * 7 * img.channels());
    for (auto& s : img.samples) s = static_cast<std::uint16_t>(byte(rng));
    const auto src = dir / fmt::format("src{}", magic(format));
    const auto dst = dir / fmt::format("dst{}", magic(format));
    write_netpbm(src, img);
    save_image(dst, load_image(src), format, 255);
    out.require(slurp(src) == slurp(dst), fmt::format("{} round trip differs", magic(format)));
  }

  const Instance inst = testing::checkerboard_instance(16, 8, 4);
  write_netpbm(dir / "board.pgm", from_field(inst.f, NetpbmFormat::kP5, 255));
  NetpbmImage mask_img{NetpbmFormat::kP5, 16, 16, 255, {}};
  for (std::size_t i = 0; i < inst.mask.pixel_count(); ++i) {
    mask_img.samples.push_back(inst.mask.damaged(i) ? 255 : 0);
  }
  write_netpbm(dir / "board_mask.pgm", mask_img);

  // Identical argument lists, so the path echo in the report matches too.
  std::vector<int> codes;
  std::vector<std::vector<std::string>> artifacts;
  const std::vector<std::string> outputs{(dir / "out.pgm").string(), (dir / "report.txt").string(),
                                         (dir / "log.csv").string()};
  for (int run = 0; run < 2; ++run) {
    for (const auto& p : outputs) std::filesystem::remove(p);
    codes.push_back(run_cli({"certinpaint", "--input", (dir / "board.pgm").string(), "--mask",
                             (dir / "board_mask.pgm").string(), "--output", outputs[0],
                             "--report", outputs[1], "--log-csv", outputs[2], "--init", "random",
                             "--seed", "7", "--no-timing", "--quiet"}));
    artifacts.emplace_back();
    for (const auto& p : outputs) artifacts.back().push_back(slurp(p));
  }
  out.require(codes[0] == kExitCertified && codes[1] == kExitCertified,
              fmt::format("exit codes {} {}", codes[0], codes[1]));
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    out.require(!artifacts[0][k].empty() && artifacts[0][k] == artifacts[1][k],
                outputs[k] + " differs between runs");
  }
  if (out.passed) out.detail = "P5/P6 bit-exact, output/report/CSV byte-identical, exit 0";
  return out;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Fenchel-Young equality", 1.0, fenchel_young},
      {2, "closed form vs quadrature", 5.0, closed_form_vs_quadrature},
      {3, "Euler residual vs finite differences", 10.0, gradient_correctness},
      {4, "gradient/divergence adjointness", 2.0, adjointness},
      {5, "weak duality fuzz", 10.0, weak_duality},
      {6, "oracle equivalence", 60.0, oracle_equivalence},
      {7, "certified 16x16 solve", 180.0, certified_solve},
      {8, "maximum principle", 60.0, max_principle},
      {9, "uniqueness analogues", 120.0, uniqueness},
      {10, "viscosity decay", 1.0, viscosity_decay},
      {11, "CLI round trip and determinism", 5.0, cli_round_trip},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds) {
      o.passed = false;
      o.detail += fmt::format("{}over budget {:.0f} s", o.detail.empty() ? "" : "; ",
                              c.budget_seconds);
    }
    if (!o.passed) ++failures;
    std::printf("[%s] criterion %2d: %-38s %7.2f s  %s\n", o.passed ? "PASS" : "FAIL", c.id,
                c.title.c_str(), seconds, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
