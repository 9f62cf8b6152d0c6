// rauzy-lab: experiment harness around the renormalization library.
//
//   rauzy-lab <renormalize|cocycle|converge|selftest>
//             --config path.json [--out dir] [--seed N] [--precision std|dd]
//
// Exit codes: 0 success, 1 usage/config error, 2 dynamical obstruction
// (connection), 3 internal identity violation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rauzy/experiments.hpp"
#include "rauzy/json_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rauzy;
using jsonio::fmt;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConnection = 2;
constexpr int kExitIdentity = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void atomic_write(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file: " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const std::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  return cfg;
}

template <class R>
Giem<R> load_map(const json& cfg, const std::string& key, const fs::path& cfg_dir) {
  if (cfg.contains(key)) return jsonio::map_from_json<R>(cfg.at(key));
  std::string file_key = key + "_file";
  if (cfg.contains(file_key)) {
    fs::path p = cfg.at(file_key).get<std::string>();
    if (p.is_relative()) p = cfg_dir / p;
    std::ifstream in(p);
    if (!in) throw UsageError("cannot read map file: " + p.string());
    json j;
    in >> j;
    return jsonio::map_from_json<R>(j);
  }
  throw UsageError("config is missing \"" + key + "\" (inline) or \"" + file_key + "\"");
}

int get_depth(const json& cfg, int def = 10) {
  int n = cfg.value("depth", def);
  if (n < 0 || n > 40) throw UsageError("depth must lie in [0, 40]");
  return n;
}

int get_grid(const json& cfg, int def = 4097) {
  int g = cfg.value("grid", def);
  if (g != 1025 && g != 4097 && g != 8193) throw UsageError("grid must be 1025, 4097 or 8193");
  return g;
}

std::string csv_header() { return "n,alpha,quantity,value\n"; }

// ---------------------------------------------------------------------------
// renormalize
// ---------------------------------------------------------------------------
template <class R>
int cmd_renormalize(const json& cfg, const fs::path& cfg_dir, const fs::path& out) {
  Giem<R> f = load_map<R>(cfg, "map", cfg_dir);
  int depth = get_depth(cfg);
  RenormResult<R> r = renormalize(f, depth);

  json states = json::array();
  for (const auto& s : r.levels) states.push_back(jsonio::state_to_json(s));
  json doc;
  doc["states"] = states;
  json steps = json::array();
  for (const auto& st : r.path.steps) steps.push_back(jsonio::step_to_json(st));
  doc["steps"] = steps;
  if (r.connection_level) doc["connection_level"] = *r.connection_level;
  if (r.drift_level) doc["drift_level"] = *r.drift_level;
  atomic_write(out / "states.json", doc.dump(2) + "\n");

  std::ostringstream lengths;
  lengths << csv_header();
  for (const auto& s : r.levels)
    for (Letter l = 0; l < s.pair.d(); ++l)
      lengths << s.level << ',' << s.pair.alphabet.symbols[l] << ",length,"
              << fmt(to_double(s.lengths[l])) << '\n';
  atomic_write(out / "lengths.csv", lengths.str());

  std::ostringstream types;
  types << "n,type,winner,loser\n";
  for (size_t i = 0; i < r.path.steps.size(); ++i) {
    const RauzyStep& st = r.path.steps[i];
    types << i << ',' << st.eps << ',' << st.before.alphabet.symbols[st.winner] << ','
          << st.before.alphabet.symbols[st.loser] << '\n';
  }
  atomic_write(out / "types.csv", types.str());

  if (r.connection_level) {
    std::cerr << "connection at level " << *r.connection_level << "\n";
    return kExitConnection;
  }
  if (r.drift_level) {
    std::cerr << "round-off drift stopped induction at level " << *r.drift_level << "\n";
    return kExitConnection;
  }
  std::cout << "renormalize: wrote " << r.levels.size() << " levels to " << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// cocycle
// ---------------------------------------------------------------------------
template <class R>
int cmd_cocycle(const json& cfg, const fs::path& cfg_dir, const fs::path& out) {
  Giem<R> f = load_map<R>(cfg, "map", cfg_dir);
  int depth = get_depth(cfg, 20);
  RenormResult<R> r = renormalize(f, depth);
  if (r.connection_level) {
    std::cerr << "connection at level " << *r.connection_level << "\n";
    return kExitConnection;
  }
  CocyclePath cp = CocyclePath::from(r.path);

  json doc;
  bool identities_ok = true;
  json checks = json::array();
  for (const auto& t : cp.thetas) {
    bool ok = check_theta_omega(t.before, t.eps) && det(t.m) == 1;
    identities_ok = identities_ok && ok;
    checks.push_back(ok);
  }
  doc["identity_checks"] = checks;

  bool q_ok = true;
  for (int n = 1; n <= r.depth(); ++n) {
    auto q = cp.prefix[n - 1] * ones_vector(f.d());
    for (Letter l = 0; l < f.d(); ++l)
      if (q[l] != r.levels[n].times[l]) q_ok = false;
  }
  doc["q_identity"] = q_ok;

  json products = json::array();
  for (const auto& p : cp.prefix) products.push_back(jsonio::bigmat_to_json(p));
  doc["prefix_products"] = products;
  json steps = json::array();
  for (const auto& st : r.path.steps) steps.push_back(jsonio::step_to_json(st));
  doc["steps"] = steps;

  if (cp.length() >= 4) {
    Eigen::VectorXd u = canonical_unstable_seed(f.pair);
    try {
      GrowthEstimate g = growth_estimate(cp, u, GrowthDirection::forward_unstable);
      json gl = json::array();
      for (double v : g.log_norms) gl.push_back(fmt(v));
      doc["growth"] = {{"log_norms", gl}, {"mu_hat", fmt(g.mu_hat)}};
    } catch (const std::exception& e) {
      doc["growth"] = {{"error", e.what()}};
    }
    try {
      SubspaceBasis sb = stable_subspace_approx(cp, cp.length());
      json vec = json::array();
      for (int i = 0; i < sb.vectors[0].size(); ++i) vec.push_back(fmt(sb.vectors[0](i)));
      doc["stable"] = {{"vector", vec}, {"angular_diameter", fmt(sb.residual)}};
    } catch (const std::exception& e) {
      doc["stable"] = {{"error", e.what()}};
    }
  }
  if (f.d() > 2 && r.depth() >= 8) {
    try {
      std::vector<int> ladder{r.depth() / 4, r.depth() / 2, 3 * r.depth() / 4, r.depth()};
      CentralLimit cl = central_space_limit(r.path, ladder);
      json inc = json::array();
      for (double v : cl.increments) inc.push_back(fmt(v));
      doc["central"] = {{"dim", cl.last.dim}, {"accepted", cl.accepted}, {"increments", inc}};
    } catch (const std::exception& e) {
      doc["central"] = {{"error", e.what()}};
    }
  }

  atomic_write(out / "theta_products.json", doc.dump(2) + "\n");
  if (!identities_ok || !q_ok) {
    std::cerr << "cocycle: exact identity violated (implementation bug)\n";
    return kExitIdentity;
  }
  std::cout << "cocycle: " << cp.length() << " steps, identities ok, report in "
            << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// converge
// ---------------------------------------------------------------------------
template <class R>
int cmd_converge(const json& cfg, const fs::path& cfg_dir, const fs::path& out) {
  std::string experiment = cfg.value("experiment", std::string("vs_moebius"));
  int depth = get_depth(cfg, 10);
  if (depth < 1) throw UsageError("converge needs depth >= 1");
  int grid = get_grid(cfg);
  Giem<R> f = load_map<R>(cfg, "map", cfg_dir);

  std::ostringstream csv;
  csv << csv_header();
  json summary;
  summary["experiment"] = experiment;
  summary["depth"] = depth;
  summary["grid"] = grid;

  try {
    if (experiment == "vs_moebius") {
      TrendSeries t = moebius_comparison_trend(f, depth, grid);
      for (size_t i = 0; i < t.levels.size(); ++i) {
        csv << t.levels[i] << ",*,c1_distance," << fmt(t.c1[i]) << '\n';
        csv << t.levels[i] << ",*,l1_d2_distance," << fmt(t.l1[i]) << '\n';
      }
      summary["c1_log_slope"] = fmt(t.c1_slope);
      summary["l1_log_slope"] = fmt(t.l1_slope);
      summary["c1_sumsq"] = fmt(t.c1_sumsq);
      bool floor = true;
      for (double v : t.c1)
        if (v >= 1e-9) floor = false;
      summary["trend_pass"] = (t.c1_slope < 0.0 && t.l1_slope < 0.0) || floor;
    } else if (experiment == "vs_affine_model") {
      ModelTrend t = affine_model_trend(f, depth, grid);
      for (size_t i = 0; i < t.dist.levels.size(); ++i) {
        csv << t.dist.levels[i] << ",*,c1_distance," << fmt(t.dist.c1[i]) << '\n';
        csv << t.dist.levels[i] << ",*,zeta_gap," << fmt(t.zeta_gap[i]) << '\n';
      }
      summary["c1_log_slope"] = fmt(t.dist.c1_slope);
      summary["zeta_sumsq"] = fmt(t.zeta_sumsq);
      summary["model_matched_steps"] = t.model.matched_steps;
      json slopes = json::array();
      for (double s : t.model.log_slopes) slopes.push_back(fmt(s));
      summary["model_log_slopes"] = slopes;
      summary["trend_pass"] = t.dist.c1_slope < 0.0;
    } else if (experiment == "pair") {
      Giem<R> g = load_map<R>(cfg, "map_g", cfg_dir);
      TrendSeries t = pair_distance_trend(f, g, depth, grid);
      for (size_t i = 0; i < t.levels.size(); ++i)
        csv << t.levels[i] << ",*,c1_distance," << fmt(t.c1[i]) << '\n';
      summary["c1_log_slope"] = fmt(t.c1_slope);
      summary["c1_sumsq"] = fmt(t.c1_sumsq);
      summary["trend_pass"] = t.c1_slope < 0.0;
    } else {
      throw UsageError("unknown experiment: " + experiment +
                       " (expected vs_moebius, vs_affine_model or pair)");
    }
  } catch (const ConnectionError& e) {
    std::cerr << "connection at level " << e.level << "\n";
    return kExitConnection;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    std::string what = e.what();
    if (what.find("connection") != std::string::npos) {
      std::cerr << what << "\n";
      return kExitConnection;
    }
    throw;
  }

  atomic_write(out / "convergence.csv", csv.str());
  atomic_write(out / "summary.json", summary.dump(2) + "\n");
  std::cout << "converge: " << experiment << " report in " << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------
int cmd_selftest(const fs::path& out, uint64_t seed) {
  std::ostringstream rep;
  int failures = 0;
  auto record = [&](const std::string& name, bool ok) {
    rep << (ok ? "ok   " : "FAIL ") << name << '\n';
    if (!ok) ++failures;
  };

  {
    bool ok = true;
    for (auto start : {pair_d2(), pair_d3()}) {
      RauzyClass rc = rauzy_class(start);
      for (const auto& p : rc.vertices)
        for (int eps : {0, 1})
          ok = ok && check_theta_omega(p, eps) && det(theta_matrix(p, eps).m) == 1;
    }
    record("conjugacy identity on both enumerated classes", ok);
  }
  {
    auto f = golden_standard();
    auto r = renormalize(f, 20);
    CocyclePath cp = CocyclePath::from(r.path);
    bool ok = r.depth() == 20;
    for (int n = 1; ok && n <= 20; ++n) {
      auto q = cp.prefix[n - 1] * ones_vector(2);
      for (Letter l = 0; l < 2; ++l) ok = ok && q[l] == r.levels[n].times[l];
    }
    record("return times equal cocycle products of ones", ok);
  }
  {
    CocyclePath alt = CocyclePath::from(alternating_path(pair_d2(), 20));
    Eigen::VectorXd u(2);
    u << 1.0, 1.0;
    double mu = growth_estimate(alt, u, GrowthDirection::forward_unstable).mu_hat;
    record("alternating-path growth rate near the golden ratio",
           mu > 1.55 && mu < 1.70);
  }
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    bool ok = true;
    for (int trial = 0; trial < 200 && ok; ++trial) {
      int len = 1 + static_cast<int>(unif(rng) * 40);
      std::vector<double> r(len);
      for (double& v : r) v = unif(rng);
      for (double lambda : {0.3, 0.5, 0.9}) {
        SmoothingSequences s = l2_smoothing_sequences(r, lambda, len + 5);
        ok = ok && s.x_bound_ok && s.z_bound_ok && s.y_le_x;
      }
    }
    record("quadratic bounds of the smoothing sequences", ok);
  }
  {
    std::mt19937_64 rng(seed + 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    bool ok = true;
    for (int trial = 0; trial < 3 && ok; ++trial) {
      auto f = random_genus_one_giem(rng);
      auto r = renormalize(f, 6);
      const auto& s = r.levels[r.depth()];
      for (int pt = 0; pt < 20 && ok; ++pt) {
        double x = unif(rng) * to_double(s.domain_len);
        Letter l = -1;
        for (Letter c = 0; c < s.pair.d(); ++c) {
          double a = to_double(s.fund_start(c));
          if (x >= a && x < a + to_double(s.lengths[c])) l = c;
        }
        if (l < 0) { ok = false; break; }
        FirstReturn fr = brute_force_first_return(f, to_double(s.domain_len), x);
        ok = ok && BigInt(fr.steps) == s.times[l] &&
             std::abs(fr.value - to_double(eval_return_map(s, f, l, x).value)) < 1e-9;
      }
    }
    record("return-map words match the brute-force oracle", ok);
  }

  rep << (failures == 0 ? "selftest: all checks passed\n"
                        : "selftest: " + std::to_string(failures) + " check(s) failed\n");
  atomic_write(out / "selftest.txt", rep.str());
  std::cout << rep.str();
  return failures == 0 ? 0 : kExitIdentity;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renormalization experiments for generalized interval exchange maps"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", precision = "std";
  uint64_t seed = 1;
  for (const char* name : {"renormalize", "cocycle", "converge", "selftest"}) {
    CLI::App* sub = app.add_subcommand(name);
    auto* copt = sub->add_option("--config", config_path, "experiment config (JSON)");
    if (std::string(name) != "selftest") copt->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--precision", precision, "std | dd")
        ->check(CLI::IsMember({"std", "dd"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const std::string sub = app.get_subcommands().front()->get_name();
    fs::path out(out_dir);
    if (sub == "selftest") return cmd_selftest(out, seed);

    json cfg = load_config(config_path);
    fs::path cfg_dir = fs::path(config_path).parent_path();
    if (sub == "renormalize")
      return precision == "dd" ? cmd_renormalize<dd>(cfg, cfg_dir, out)
                               : cmd_renormalize<double>(cfg, cfg_dir, out);
    if (sub == "cocycle")
      return precision == "dd" ? cmd_cocycle<dd>(cfg, cfg_dir, out)
                               : cmd_cocycle<double>(cfg, cfg_dir, out);
    if (sub == "converge")
      return precision == "dd" ? cmd_converge<dd>(cfg, cfg_dir, out)
                               : cmd_converge<double>(cfg, cfg_dir, out);
    std::cerr << "unknown subcommand\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConnectionError& e) {
    std::cerr << "connection at level " << e.level << "\n";
    return kExitConnection;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitIdentity;
  }
}
