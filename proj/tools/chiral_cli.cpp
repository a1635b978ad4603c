// chiral: soliton profiles, the verification suite and quasideterminant
// identity checks from the command line.
//
// Exit codes: 0 pass, 1 verification failure, 2 usage or config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chiral/chiral.hpp"

namespace {

using namespace chiral;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Overrides {
  std::optional<double> p, q, h;
  std::vector<double> thetas;
  std::optional<std::size_t> K;
  std::optional<std::string> grid;
  std::optional<std::string> config;
  std::optional<std::uint64_t> rng_seed;
  std::string out;
  std::string format;
};

void add_common(CLI::App* cmd, Overrides& o, const std::string& default_format) {
  o.format = default_format;
  cmd->add_option("--p", o.p, "seed current p (j+ = diag(ip, -ip))");
  cmd->add_option("--q", o.q, "seed current q (j- = diag(iq, -iq))");
  cmd->add_option("--theta", o.thetas, "eigenvalue angle mu = e^{i theta}; repeat for a chain")
      ->take_all();
  cmd->add_option("--K", o.K, "number of Darboux steps");
  cmd->add_option("--grid", o.grid, "tmin,tmax,xmin,xmax,nt,nx");
  cmd->add_option("--h", o.h, "finite-difference step");
  cmd->add_option("--config", o.config, "JSON config file");
  cmd->add_option("--out", o.out, "output file (default: stdout)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--rng-seed", o.rng_seed, "seed for random draws");
}

Grid parse_grid(const std::string& text, Grid g) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 6) throw ConfigError("--grid expects tmin,tmax,xmin,xmax,nt,nx");
  try {
    std::size_t used = 0;
    auto real = [&](const std::string& s) {
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    };
    auto count = [&](const std::string& s) {
      const long long v = std::stoll(s, &used);
      if (used != s.size() || v < 0) throw std::invalid_argument(s);
      return static_cast<std::size_t>(v);
    };
    g.t_min = real(parts[0]);
    g.t_max = real(parts[1]);
    g.x_min = real(parts[2]);
    g.x_max = real(parts[3]);
    g.nt = count(parts[4]);
    g.nx = count(parts[5]);
  } catch (const std::exception&) {
    throw ConfigError("--grid: malformed value '" + text + "'");
  }
  return g;
}

/// defaults < config file < flags
SuiteConfig resolve(const Overrides& o) {
  SuiteConfig c = o.config ? load_config_file(*o.config) : SuiteConfig{};
  if (o.p) c.p = *o.p;
  if (o.q) c.q = *o.q;
  if (!o.thetas.empty()) c.thetas = o.thetas;
  if (o.K) c.K = *o.K;
  if (o.grid) c.grid = parse_grid(*o.grid, c.grid);
  if (o.h) c.grid.h = *o.h;
  if (o.rng_seed) c.rng_seed = *o.rng_seed;
  c.validate();
  return c;
}

/// Writes to --out, or stdout when it is empty.
void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + out + "'");
  f << text;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ------------------------------------------------------------------ profile

int cmd_profile(const Overrides& o, bool closed_form) {
  const SuiteConfig c = resolve(o);
  const std::vector<double> th = c.chain_thetas();
  for (double t : th) su2::require_theta(t);
  if (closed_form && c.K > 2) throw ConfigError("--closed-form supports K = 1 or 2");

  const DarbouxChain chain = su2::su2_chain(c.p, c.q, th);
  auto field = [&](SpacetimePoint x) -> Matrix {
    if (!closed_form) return iterate_product(chain, 0.0, x).g;
    if (c.K == 1) return su2::one_soliton({c.p, c.q, th[0]}, x).g;
    return su2::two_soliton({c.p, c.q, th[0], th[1]}, x).g;
  };

  static const char* kColumns[] = {"t",      "x",      "xplus",  "xminus", "re_g11",
                                   "im_g11", "re_g12", "im_g12", "re_g21", "im_g21",
                                   "re_g22", "im_g22", "abs_Y"};
  std::vector<std::vector<double>> rows;
  rows.reserve(c.grid.size());
  for (std::size_t i = 0; i < c.grid.nt; ++i)
    for (std::size_t j = 0; j < c.grid.nx; ++j) {
      const SpacetimePoint x = c.grid.point(i, j);
      const Matrix g = field(x);
      // |Y| is the off-diagonal entry of g g0^-1, the soliton envelope.
      const Matrix rel = g * chain.base().g_inverse(x);
      rows.push_back({c.grid.t(i), c.grid.x(j), x.xplus, x.xminus, g(0, 0).real(),
                      g(0, 0).imag(), g(0, 1).real(), g(0, 1).imag(), g(1, 0).real(),
                      g(1, 0).imag(), g(1, 1).real(), g(1, 1).imag(), std::abs(rel(0, 1))});
    }

  std::string text;
  if (o.format == "json") {
    Json j{{"columns", kColumns}, {"config_echo", config_to_json(c)},
           {"source", closed_form ? "closed_form" : "engine"}, {"rows", rows}};
    text = j.dump(2) + "\n";
  } else {
    for (std::size_t k = 0; k < std::size(kColumns); ++k) text += (k ? "," : "") + std::string(kColumns[k]);
    text += "\n";
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < r.size(); ++k) text += (k ? "," : "") + num(r[k]);
      text += "\n";
    }
  }
  emit(o.out, text);
  return kPass;
}

// ------------------------------------------------------------------- verify

int cmd_verify(const Overrides& o) {
  const SuiteConfig c = resolve(o);
  const ResidualReport report = run_full_suite(c);
  emit(o.out, report_json(report, c).dump(2) + "\n");
  for (const ResidualEntry& e : report.entries())
    if (!e.pass) std::cerr << "FAIL " << e.name << " value=" << num(e.value) << " tolerance=" << num(e.tolerance) << "\n";
  return report.all_pass() ? kPass : kFail;
}

// --------------------------------------------------------------- identities

int cmd_identities(std::size_t count, std::uint64_t seed, std::size_t dim, const std::string& out) {
  if (count < 1) throw ConfigError("--count must be >= 1");
  if (dim < 1) throw ConfigError("--dim must be >= 1");
  const Tolerances tol;
  std::mt19937_64 rng(seed);
  std::size_t resamples = 0;
  double jac = 0.0, hom = 0.0, ratio = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    const BlockGrid g = draw_identity_grid(rng, dim, tol.condition_reject, resamples);
    jac = std::max(jac, check_nc_jacobi(g));
    hom = std::max(hom, check_homological(g));
    if (dim == 1) {
      Matrix x(3);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = g.block(i, j)(0, 0);
      const Complex a = qdet_block(g)(0, 0);
      const Complex b = determinant_ratio(x, 2, 2);
      ratio = std::max(ratio, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    }
  }
  const Json ctx{{"count", count}, {"block_dim", dim}, {"resamples", resamples}, {"rng_seed", seed}};
  ResidualReport report;
  report.add(make_entry("quasidet.nc_jacobi", jac, tol.identity, ctx));
  report.add(make_entry("quasidet.homological", hom, tol.identity, ctx));
  if (dim == 1) report.add(make_entry("quasidet.ratio", ratio, tol.algebraic, ctx));
  report.sort();
  emit(out, report.to_json(ctx).dump(2) + "\n");
  return report.all_pass() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Principal chiral model solitons by Darboux transformation"};
  app.require_subcommand(1);
  // -h would clash with the --h step flag.
  app.set_help_flag("--help", "print this help message and exit");

  Overrides prof, ver;
  bool closed_form = false;
  auto* profile = app.add_subcommand("profile", "emit g on a t,x grid");
  profile->set_help_flag("--help", "print this help message and exit");
  add_common(profile, prof, "csv");
  profile->add_flag("--closed-form", closed_form, "use the SU(2) closed forms (K = 1, 2)");

  auto* verify = app.add_subcommand("verify", "run the full verification suite");
  verify->set_help_flag("--help", "print this help message and exit");
  add_common(verify, ver, "json");

  std::size_t count = 100, dim = 2;
  std::uint64_t seed = 20240601;
  std::string id_out;
  auto* identities = app.add_subcommand("identities", "check quasideterminant identities");
  identities->add_option("--count", count, "number of random grids");
  identities->add_option("--rng-seed", seed, "seed for random draws");
  identities->add_option("--dim", dim, "block dimension");
  identities->add_option("--out", id_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*profile) return cmd_profile(prof, closed_form);
    if (*verify) {
      if (ver.format != "json") throw ConfigError("verify writes JSON only");
      return cmd_verify(ver);
    }
    return cmd_identities(count, seed, dim, id_out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
}
