#include "growthwave/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <set>

#include "growthwave/error.hpp"
#include "growthwave/growth.hpp"
#include "growthwave/oscillation.hpp"
#include "growthwave/poisson.hpp"
#include "growthwave/seqspace.hpp"
#include "growthwave/support.hpp"
#include "growthwave/wavelet.hpp"

namespace growthwave::cli {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- formatting

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(fs::path path, const std::vector<std::string>& header) : path_(std::move(path)) {
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(double x) { return cell(format_number(x)); }

CsvWriter& CsvWriter::cell(long long x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (!row_start_) buffer_ += ',';
  buffer_.append(buf, res.ptr);
  row_start_ = false;
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (!row_start_) buffer_ += ',';
  row_start_ = false;
  if (s.find_first_of(",\"\r\n") == std::string::npos) {
    buffer_ += s;
    return *this;
  }
  buffer_ += '"';
  for (char c : s) {
    if (c == '"') buffer_ += '"';
    buffer_ += c;
  }
  buffer_ += '"';
  return *this;
}

void CsvWriter::end_row() {
  buffer_ += "\r\n";
  row_start_ = true;
}

fs::path CsvWriter::close() {
  std::ofstream os(path_, std::ios::binary);
  os << buffer_;
  if (!os) throw ValidationError("cannot write " + path_.string());
  return path_;
}

// ---------------------------------------------------------------- config

namespace {

int get_int(const json& j, const char* key, int fallback, int lo, int hi) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) throw ValidationError(std::string("config field '") + key + "' must be an integer");
  const auto v = j[key].get<long long>();
  if (v < lo || v > hi)
    throw ValidationError(std::string("config field '") + key + "' = " + std::to_string(v) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

double get_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ValidationError(std::string("config field '") + key + "' must be a number");
  return j[key].get<double>();
}

std::vector<double> get_numbers(const json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw ValidationError(std::string("config field '") + key + "' must be an array of numbers");
  for (const auto& x : j[key]) {
    if (!x.is_number()) throw ValidationError(std::string("config field '") + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Weight parse_weight(const json& w) {
  if (!w.is_object() || !w.contains("family") || !w["family"].is_string())
    throw ValidationError("config field 'weight' needs a string 'family'");
  const auto family = w["family"].get<std::string>();
  if (family == "power") return Weight::power(get_number(w, "a", 1.0));
  if (family == "logpow") return Weight::log_power(get_number(w, "b", 1.0));
  if (family == "table") return Weight::table(get_numbers(w, "t"), get_numbers(w, "v"));
  throw ValidationError("unknown weight family '" + family + "' (expected power, logpow or table)");
}

}  // namespace

RunConfig parse_config(const json& raw) {
  if (!raw.is_object()) throw ValidationError("config must be a JSON object");
  static const std::set<std::string> known{"weight", "A", "J", "l_max", "order", "tab_depth", "j0", "seed",
                                           "trials", "scales", "threads", "boundary", "options", "out"};
  for (const auto& [key, _] : raw.items())
    if (!known.count(key)) throw ValidationError("unknown config field '" + key + "'");

  RunConfig c;
  c.raw = raw;
  if (raw.contains("weight")) c.weight = parse_weight(raw["weight"]);
  c.A = get_number(raw, "A", 0.0);
  c.J = get_int(raw, "J", 12, 8, 20);
  c.l_max = get_int(raw, "l_max", 8, 1, 64);
  c.order = get_int(raw, "order", 0, 0, 20);
  c.tab_depth = get_int(raw, "tab_depth", 12, 8, 16);
  c.j0 = get_int(raw, "j0", 3, 1, c.J - 1);
  if (raw.contains("seed")) {
    if (!raw["seed"].is_number_unsigned()) throw ValidationError("config field 'seed' must be a non-negative integer");
    c.seed = raw["seed"].get<std::uint64_t>();
  }
  c.trials = get_int(raw, "trials", 100, 1, 1000000);
  c.scales = get_numbers(raw, "scales");
  c.threads = static_cast<unsigned>(get_int(raw, "threads", static_cast<int>(default_threads()), 1, 1024));
  c.boundary = raw.value("boundary", json::object());
  if (!c.boundary.is_object()) throw ValidationError("config field 'boundary' must be an object");
  c.options = raw.value("options", json::object());
  if (!c.options.is_object()) throw ValidationError("config field 'options' must be an object");
  if (raw.contains("out")) {
    if (!raw["out"].is_string()) throw ValidationError("config field 'out' must be a string");
    c.out = raw["out"].get<std::string>();
  } else if (const char* env = std::getenv("GROWTHWAVE_OUT"); env && *env) {
    c.out = env;
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read config " + path.string());
  json raw;
  try {
    raw = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(raw);
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"plan", "synth",   "extend", "characterize",
                                              "pairing", "osc", "seq",    "selftest"};
  return names;
}

// ---------------------------------------------------------------- pipeline helpers

namespace {

struct Context {
  const RunConfig& cfg;
  std::string command;
  fs::path dir;
  RunResult result;
  json effective = json::object();
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(Context& ctx, const std::string& name, json results) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = ctx.command;
  doc["config"] = ctx.cfg.raw;
  doc["effective"] = ctx.effective;
  doc["timestamp"] = utc_timestamp();
  doc["results"] = std::move(results);
  const fs::path p = ctx.dir / name;
  std::ofstream os(p, std::ios::binary);
  os << doc.dump(2) << '\n';
  if (!os) throw ValidationError("cannot write " + p.string());
  ctx.result.artifacts.push_back(p);
}

void add_csv(Context& ctx, CsvWriter& w) { ctx.result.artifacts.push_back(w.close()); }

ScalePlan plan_for(Context& ctx) {
  auto plan = make_plan(ctx.cfg.weight, ctx.cfg.A, ctx.cfg.l_max);
  ctx.effective["A"] = plan.A;
  ctx.effective["alphas"] = plan.alphas;
  ctx.effective["m"] = plan.m;
  return plan;
}

WaveletBasis basis_for(Context& ctx, const ScalePlan& plan, int fallback_order = 0) {
  int order = ctx.cfg.order > 0 ? ctx.cfg.order : (fallback_order > 0 ? fallback_order : required_order(plan));
  ctx.effective["order"] = order;
  return build_basis(order, ctx.cfg.tab_depth, ctx.cfg.j0);
}

GridFunction sampled(int J, const std::function<double(double)>& f) {
  Eigen::VectorXd s(Eigen::Index(1) << J);
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = f(static_cast<double>(i) / static_cast<double>(s.size()));
  return GridFunction(std::move(s));
}

GridFunction boundary_for(Context& ctx, const ScalePlan& plan, const WaveletBasis& basis,
                          const std::string& default_kind) {
  const auto& b = ctx.cfg.boundary;
  const std::string kind = b.value("kind", default_kind);
  const int J = ctx.cfg.J;
  ctx.effective["boundary_kind"] = kind;
  if (kind == "constant") return GridFunction::constant(J, get_number(b, "value", 1.0));
  if (kind == "cosine") {
    const double k = get_number(b, "k", 1.0), amp = get_number(b, "amplitude", 1.0);
    return sampled(J, [=](double x) { return amp * std::cos(2.0 * std::numbers::pi * k * x); });
  }
  if (kind == "step") {
    const double lo = get_number(b, "a", 0.25), hi = get_number(b, "b", 0.75);
    return sampled(J, [=](double x) { return (x >= lo && x < hi) ? 1.0 : 0.0; });
  }
  if (kind == "random") {
    auto u = random_member(ctx.cfg.weight, plan, basis, get_number(b, "B", 1.0), ctx.cfg.seed, J);
    return b.value("normalize", true) ? normalize_member(u, ctx.cfg.weight) : u;
  }
  throw ValidationError("unknown boundary kind '" + kind + "' (expected constant, cosine, step or random)");
}

json optional_long(const std::optional<long>& x) { return x ? json(*x) : json(nullptr); }

// ---------------------------------------------------------------- commands

void cmd_plan(Context& ctx) {
  const auto& v = ctx.cfg.weight;
  auto plan = plan_for(ctx);
  json r;
  r["weight"] = v.describe();
  r["A"] = plan.A;
  r["alphas"] = plan.alphas;
  r["m"] = plan.m;
  r["gamma"] = plan.gamma;
  r["power_type_gap"] = optional_long(plan.power_type_gap);
  r["doubling_constant"] = doubling_constant(v);
  r["default_band_base"] = default_band_base(v);
  r["required_order"] = required_order(plan);
  std::vector<double> va;
  CsvWriter csv(ctx.dir / "plan.csv", {"l", "alpha", "v"});
  for (std::size_t l = 0; l < plan.alphas.size(); ++l) {
    va.push_back(v.dyadic(static_cast<double>(plan.alphas[l])));
    csv.cell(static_cast<long long>(l)).cell(static_cast<long long>(plan.alphas[l])).cell(va.back());
    csv.end_row();
  }
  r["v_at_alpha"] = va;
  write_json(ctx, "plan.json", r);
  add_csv(ctx, csv);
}

void cmd_synth(Context& ctx) {
  const auto& v = ctx.cfg.weight;
  const int J = ctx.cfg.J;
  auto plan = plan_for(ctx);
  const std::string mode = ctx.cfg.options.value("mode", "random");
  ctx.effective["mode"] = mode;
  ctx.effective["seed"] = ctx.cfg.seed;
  if (mode == "counterexample") {
    auto basis = basis_for(ctx, plan, 1);
    const int d_max = get_int(ctx.cfg.options, "d_max", 4, 1, 32);
    auto ce = counterexample_series(v, plan, basis, d_max, J);
    json r;
    r["a"] = ce.a;
    r["interval"] = {ce.interval_lo, ce.interval_hi};
    r["step"] = ce.step;
    r["k"] = ce.k;
    CsvWriter csv(ctx.dir / "counterexample.csv", {"d", "l_d", "s_d", "norm", "ratio", "coeff_ratio"});
    json terms = json::array();
    for (const auto& t : ce.terms) {
      terms.push_back({{"d", t.d}, {"l_d", t.l_d}, {"s_d", t.s_d}, {"norm", t.norm}, {"ratio", t.ratio},
                       {"coeff_ratio", t.coeff_ratio}});
      csv.cell(static_cast<long long>(t.d)).cell(static_cast<long long>(t.l_d)).cell(static_cast<long long>(t.s_d));
      csv.cell(t.norm).cell(t.ratio).cell(t.coeff_ratio);
      csv.end_row();
    }
    r["terms"] = terms;
    write_json(ctx, "counterexample.json", r);
    add_csv(ctx, csv);
    return;
  }
  if (mode != "random") throw ValidationError("unknown synth mode '" + mode + "' (expected random or counterexample)");
  auto basis = basis_for(ctx, plan);
  const double B = get_number(ctx.cfg.options, "B", 1.0);
  auto u = random_member(v, plan, basis, B, ctx.cfg.seed, J);
  auto blocks = block_decompose(analyze(u, basis), truncate_plan(plan, J - 1), basis);
  json r;
  r["B"] = B;
  r["sup_norm"] = u.sup_norm();
  r["growth_norm"] = growth_norm(HarmonicField(u), v);
  std::vector<double> sups;
  for (const auto& g : blocks.blocks) sups.push_back(g.sup_norm());
  r["block_sup"] = sups;
  r["block_alphas"] = blocks.alphas;
  CsvWriter csv(ctx.dir / "boundary.csv", {"x", "u"});
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    csv.cell(static_cast<double>(i) / static_cast<double>(u.size())).cell(u.samples()(i));
    csv.end_row();
  }
  write_json(ctx, "synth.json", r);
  add_csv(ctx, csv);
}

void cmd_extend(Context& ctx) {
  const auto& v = ctx.cfg.weight;
  auto plan = plan_for(ctx);
  auto basis = basis_for(ctx, plan);
  HarmonicField field(boundary_for(ctx, plan, basis, "constant"));
  auto ts = ctx.cfg.scales.empty() ? half_dyadic_scales(ctx.cfg.J) : ctx.cfg.scales;
  CsvWriter csv(ctx.dir / "extend.csv", {"t", "sup_abs_u", "mean_u", "v", "ratio"});
  double worst = 0.0;
  for (double t : ts) {
    if (!(t > 0.0)) throw ValidationError("extension scales must be positive");
    auto u = field.at(t);
    const double ratio = u.sup_norm() / v(t);
    worst = std::max(worst, ratio);
    csv.cell(t).cell(u.sup_norm()).cell(u.mean()).cell(v(t)).cell(ratio);
    csv.end_row();
  }
  json r;
  r["max_ratio"] = worst;
  r["growth_norm"] = growth_norm(field, v);
  r["boundary_sup"] = field.boundary().sup_norm();
  write_json(ctx, "extend.json", r);
  add_csv(ctx, csv);
}

json report_json(const GrowthReport& g) {
  return {{"K_direct", g.K_direct},
          {"K_wavelet", g.K_wavelet},
          {"equivalence_ratio", g.equivalence_ratio},
          {"h_v0_trend", g.h_v0_trend},
          {"first_quarter_mean", g.first_quarter_mean},
          {"last_quarter_mean", g.last_quarter_mean},
          {"h_v0_candidate", g.h_v0_candidate},
          {"block_ratio", g.block_ratio},
          {"N", g.N},
          {"M_profile", g.M_profile},
          {"v_at_N", g.v_at_N}};
}

void cmd_characterize(Context& ctx) {
  const auto& v = ctx.cfg.weight;
  auto plan = plan_for(ctx);
  auto basis = basis_for(ctx, plan);
  const double C = get_number(ctx.cfg.options, "C", 50.0);
  ctx.effective["C"] = C;
  const std::string kind = ctx.cfg.boundary.value("kind", "constant");
  if (kind == "random" && ctx.cfg.trials > 1) {
    // ensemble over derived seeds
    ctx.effective["seed"] = ctx.cfg.seed;
    ctx.effective["trials"] = ctx.cfg.trials;
    const double B = get_number(ctx.cfg.boundary, "B", 1.0);
    std::vector<GrowthReport> reps(static_cast<std::size_t>(ctx.cfg.trials));
    parallel_for(reps.size(), ctx.cfg.threads, [&](std::size_t n) {
      auto u = normalize_member(random_member(v, plan, basis, B, derive_seed(ctx.cfg.seed, n), ctx.cfg.J), v);
      reps[n] = characterize(HarmonicField(u), v, basis, plan);
    });
    CsvWriter csv(ctx.dir / "members.csv",
                  {"member", "K_direct", "K_wavelet", "equivalence_ratio", "max_block_ratio", "h_v0_candidate"});
    double lo = INFINITY, hi = 0.0, block = 0.0;
    for (std::size_t n = 0; n < reps.size(); ++n) {
      const auto& g = reps[n];
      double mb = 0.0;
      for (double b : g.block_ratio) mb = std::max(mb, b);
      lo = std::min(lo, g.equivalence_ratio);
      hi = std::max(hi, g.equivalence_ratio);
      block = std::max(block, mb);
      csv.cell(static_cast<long long>(n)).cell(g.K_direct).cell(g.K_wavelet).cell(g.equivalence_ratio).cell(mb);
      csv.cell(std::string(g.h_v0_candidate ? "true" : "false"));
      csv.end_row();
    }
    json r;
    r["members"] = reps.size();
    r["min_equivalence_ratio"] = lo;
    r["max_equivalence_ratio"] = hi;
    r["max_block_ratio"] = block;
    r["pass"] = lo >= 1.0 / C && hi <= C;
    write_json(ctx, "characterize.json", r);
    add_csv(ctx, csv);
    return;
  }
  HarmonicField field(boundary_for(ctx, plan, basis, "constant"));
  auto g = characterize(field, v, basis, plan);
  json r = report_json(g);
  r["pass"] = g.equivalence_ratio >= 1.0 / C && g.equivalence_ratio <= C;
  CsvWriter csv(ctx.dir / "m_profile.csv", {"N", "M_N", "v_2^-N", "ratio"});
  for (std::size_t i = 0; i < g.N.size(); ++i) {
    csv.cell(static_cast<long long>(g.N[i])).cell(g.M_profile[i]).cell(g.v_at_N[i]).cell(g.M_profile[i] / g.v_at_N[i]);
    csv.end_row();
  }
  write_json(ctx, "characterize.json", r);
  add_csv(ctx, csv);
}

void cmd_pairing(Context& ctx) {
  const auto& v = ctx.cfg.weight;
  auto plan = plan_for(ctx);
  auto basis = basis_for(ctx, plan);
  HarmonicField field(boundary_for(ctx, plan, basis, "random"));
  const int J = ctx.cfg.J;
  auto deltas = get_numbers(ctx.cfg.options, "deltas");
  if (deltas.empty()) deltas = {1.0, 0.5, 0.25, 0.125, 0.0625};
  std::mt19937_64 rng(derive_seed(ctx.cfg.seed, 0x5157));
  CsvWriter csv(ctx.dir / "pairing.csv", {"delta", "max_abs_pairing", "sigma_l1", "ratio", "Sigma_l1"});
  json main = json::array();
  double worst = 0.0;
  for (double delta : deltas) {
    // seeded trigonometric polynomial with band <= 1/delta
    const long band = static_cast<long>(std::floor(1.0 / delta + 1e-12));
    std::vector<double> ca, cb;
    for (long k = 0; k <= band; ++k) {
      ca.push_back(2.0 * random_unit(rng) - 1.0);
      cb.push_back(2.0 * random_unit(rng) - 1.0);
    }
    auto sigma = sampled(J, [&](double x) {
      double s = 0.0;
      for (long k = 0; k <= band; ++k) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(k) * x;
        s += ca[static_cast<std::size_t>(k)] * std::cos(th) + cb[static_cast<std::size_t>(k)] * std::sin(th);
      }
      return s;
    });
    auto rep = pairing_bound_check(field, sigma, delta, v);
    const double sig = sigma_kernel(delta, J).l1_norm;
    worst = std::max(worst, rep.ratio);
    main.push_back({{"delta", delta}, {"max_abs_pairing", rep.max_abs_pairing}, {"sigma_l1", rep.sigma_l1},
                    {"ratio", rep.ratio}, {"Sigma_l1", sig}});
    csv.cell(delta).cell(rep.max_abs_pairing).cell(rep.sigma_l1).cell(rep.ratio).cell(sig);
    csv.end_row();
  }
  const int r_fold = get_int(ctx.cfg.options, "r_fold", plan.m + 2, 1, 64);
  auto scales = ctx.cfg.scales;
  if (scales.empty())
    for (int j = 1; j <= 6; ++j) scales.push_back(std::exp2(-j));
  auto dil = dilated_test_pairing(field, r_fold, scales, v, plan.m);
  CsvWriter dcsv(ctx.dir / "dilated.csv", {"a", "max_ratio"});
  for (std::size_t i = 0; i < dil.a.size(); ++i) {
    dcsv.cell(dil.a[i]).cell(dil.max_ratio_per_a[i]);
    dcsv.end_row();
  }
  json r;
  r["sigma_pairing"] = main;
  r["sigma_pairing_max_ratio"] = worst;
  r["r_fold"] = r_fold;
  r["dilated_max_ratio"] = dil.max_ratio;
  r["dilated_a"] = dil.a;
  r["dilated_ratio"] = dil.max_ratio_per_a;
  write_json(ctx, "pairing.json", r);
  add_csv(ctx, csv);
  add_csv(ctx, dcsv);
}

void cmd_osc(Context& ctx) {
  const auto& v = ctx.cfg.weight;
  auto plan = plan_for(ctx);
  auto basis = basis_for(ctx, plan);
  ctx.effective["seed"] = ctx.cfg.seed;
  ctx.effective["minimal_usable_level"] = minimal_usable_level(v);
  HarmonicField field(boundary_for(ctx, plan, basis, "random"));
  auto tr = build_martingale(field, v, plan, basis);
  auto sq = square_function(tr);

  CsvWriter mcsv(ctx.dir / "martingale.csv",
                 {"L", "alpha", "tower_residual", "max_increment", "max_abs_I_minus_Gamma", "max_S2_per_term"});
  for (std::size_t L = 0; L < tr.alphas.size(); ++L) {
    mcsv.cell(static_cast<long long>(L)).cell(static_cast<long long>(tr.alphas[L]));
    if (L < tr.increments.size()) {
      mcsv.cell(tr.tower_residual[L]).cell(tr.increments[L].sup_norm());
    } else {
      mcsv.cell(std::string()).cell(std::string());
    }
    mcsv.cell(tr.approximation_defect[L]);
    if (L < sq.max_S2_per_term.size()) {
      mcsv.cell(sq.max_S2_per_term[L]);
    } else {
      mcsv.cell(std::string());
    }
    mcsv.end_row();
  }
  json r;
  r["alphas"] = tr.alphas;
  r["tower_residual"] = tr.tower_residual;
  r["approximation_defect"] = tr.approximation_defect;
  r["max_lambda_decay"] = tr.max_lambda_decay;
  r["max_block_average"] = tr.max_block_average;
  r["max_S2_per_term"] = sq.max_S2_per_term;
  r["max_increment"] = sq.max_increment;
  r["S2_monotone"] = sq.monotone;
  r["scale_insensitivity"] = scale_insensitivity(field, v, plan);
  r["growth_norm"] = growth_norm(field, v);

  const bool lil = ctx.cfg.options.value("lil", true);
  if (lil) {
    ctx.effective["trials"] = ctx.cfg.trials;
    auto rep = lil_montecarlo(v, plan, basis, ctx.cfg.trials, ctx.cfg.seed, ctx.cfg.J, ctx.cfg.threads);
    CsvWriter lcsv(ctx.dir / "lil_trials.csv", {"trial", "alpha", "s", "statistic"});
    for (std::size_t n = 0; n < rep.trials.size(); ++n)
      for (std::size_t i = 0; i < rep.alphas.size(); ++i) {
        if (!rep.usable[i]) continue;
        lcsv.cell(static_cast<long long>(n)).cell(static_cast<long long>(rep.alphas[i]));
        lcsv.cell(std::exp2(-static_cast<double>(rep.alphas[i]))).cell(rep.trials[n].statistic[i]);
        lcsv.end_row();
      }
    json l;
    l["alphas"] = rep.alphas;
    l["usable"] = rep.usable;
    l["ensemble_max"] = rep.ensemble_max;
    l["quantile95"] = rep.quantile95;
    l["fraction_naive_decreasing"] = rep.fraction_decreasing;
    l["all_within_log_bound"] = rep.all_within_log_bound;
    l["minimal_usable_level"] = rep.minimal_usable;
    r["lil"] = l;
    add_csv(ctx, lcsv);
  }
  write_json(ctx, "osc.json", r);
  add_csv(ctx, mcsv);
}

void cmd_seq(Context& ctx) {
  const auto& v = ctx.cfg.weight;
  auto plan = plan_for(ctx);
  auto basis = basis_for(ctx, plan);
  const int J = ctx.cfg.J;
  ctx.effective["seed"] = ctx.cfg.seed;
  ctx.effective["levels"] = grid_levels(plan, J);

  json r;
  std::vector<double> energy_residual;
  RefinementTable tab(basis, 5);
  for (int j = 1; j <= 5; ++j) energy_residual.push_back(std::abs(tab(j).squaredNorm() - std::exp2(-j)));
  r["gamma_energy_residual"] = energy_residual;

  auto genuine = sample_coefficients(boundary_for(ctx, plan, basis, "random"), basis, plan);
  r["genuine_weighted_norm"] = weighted_norm(genuine, v);
  r["genuine_defect"] = sup_abs(consistency_defect(genuine, basis));
  r["fixed_point_residual"] = sup_abs(project_to_ell(genuine, basis) + (-1.0) * genuine);

  auto a = random_sequence(v, plan, J, ctx.cfg.seed);
  auto delta = consistency_defect(a, basis);
  auto pa = project_to_ell(a, basis);
  r["random_weighted_norm"] = weighted_norm(a, v);
  r["projected_weighted_norm"] = weighted_norm(pa, v);
  r["projection_ratio"] = weighted_norm(pa, v) / weighted_norm(a, v);
  r["projected_defect"] = sup_abs(consistency_defect(pa, basis));
  r["idempotence_residual"] = sup_abs(project_to_ell(pa, basis) + (-1.0) * pa);
  auto back = sample_coefficients(synthesize_from_sequence(pa, basis, J), basis, plan);
  r["round_trip_residual"] = sup_abs(back + (-1.0) * pa);

  CsvWriter csv(ctx.dir / "defect.csv", {"j", "k", "delta"});
  for (std::size_t i = 0; i < delta.levels.size(); ++i)
    for (Eigen::Index k = 0; k < delta.entries[i].size(); ++k) {
      csv.cell(static_cast<long long>(delta.levels[i])).cell(static_cast<long long>(k)).cell(delta.entries[i](k));
      csv.end_row();
    }
  write_json(ctx, "seq.json", r);
  add_csv(ctx, csv);
}

struct Check {
  std::string name;
  double value;
  double threshold;
  bool pass;
};

void cmd_selftest(Context& ctx) {
  std::vector<Check> checks;
  auto le = [&](std::string name, double value, double threshold) {
    checks.push_back({std::move(name), value, threshold, value <= threshold});
  };
  const int J = std::min(ctx.cfg.J, 11);
  ctx.effective["J"] = J;
  std::mt19937_64 rng(ctx.cfg.seed);
  auto f = sampled(J, [&](double x) { return std::sin(6.0 * x) + (x < 0.4 ? 1.0 : 0.0); });

  auto semigroup = (poisson_extend(poisson_extend(f, 0.01), 0.03) - poisson_extend(f, 0.04)).sup_norm();
  le("poisson_semigroup", semigroup, 1e-10 * f.sup_norm());

  auto basis = build_basis(4, 12, 3);
  le("wavelet_round_trip", (synthesize(analyze(f, basis), basis) - f).sup_norm(), 1e-10);

  auto p1 = Weight::power(1.0);
  auto plan = make_plan(p1, 2.0, 6);
  checks.push_back({"plan_power1_m", static_cast<double>(plan.m), 2.0, plan.m == 2 && plan.alphas[1] == 1});

  auto g = growth_norm(HarmonicField(GridFunction::constant(J, 1.0)), p1);
  le("growth_norm_constant", std::abs(g - 1.0), 1e-12);

  auto dplan = make_plan(p1, 0.0, 8);
  auto u = normalize_member(random_member(p1, dplan, basis, 1.0, rng(), J), p1);
  auto tr = build_martingale(HarmonicField(u), p1, dplan, basis);
  double tower = 0.0;
  for (double x : tr.tower_residual) tower = std::max(tower, x);
  le("martingale_tower", tower, 1e-12);
  checks.push_back({"square_function_monotone", 0.0, 0.0, square_function(tr).monotone});

  auto a = random_sequence(p1, dplan, J, rng());
  auto pa = project_to_ell(a, basis);
  le("projection_defect", sup_abs(consistency_defect(pa, basis)), 1e-8);
  le("projection_idempotence", sup_abs(project_to_ell(pa, basis) + (-1.0) * pa), 1e-10);
  auto s = sample_coefficients(f, basis, dplan);
  le("projection_fixed_point", sup_abs(project_to_ell(s, basis) + (-1.0) * s), 1e-8);

  auto lp = Weight::log_power(1.0);
  auto ce = counterexample_series(lp, make_plan(lp, 0.0, 4), build_basis(1, 12, 3), 3, J);
  double worst = INFINITY;
  for (const auto& t : ce.terms) worst = std::min(worst, t.ratio / (0.5 * ce.a * t.d));
  checks.push_back({"counterexample_growth", worst, 1.0, worst >= 1.0});

  json list = json::array();
  bool all = true;
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
    all = all && c.pass;
  }
  json r;
  r["checks"] = list;
  r["all_pass"] = all;
  write_json(ctx, "selftest.json", r);
  if (!all) throw NumericalError("selftest: one or more invariant checks failed (see selftest.json)");
}

void emit(std::ostream& diag, const char* kind, int code, const std::string& message) {
  json d{{"error", kind}, {"exit_code", code}, {"message", message}};
  diag << d.dump() << '\n';
}

}  // namespace

RunResult run(const std::string& command, const RunConfig& config, std::ostream& diag) {
  Context ctx{config, command, config.out, {}};
  try {
    static const std::map<std::string, void (*)(Context&)> table{
        {"plan", cmd_plan},         {"synth", cmd_synth},     {"extend", cmd_extend}, {"characterize", cmd_characterize},
        {"pairing", cmd_pairing},   {"osc", cmd_osc},         {"seq", cmd_seq},       {"selftest", cmd_selftest}};
    auto it = table.find(command);
    if (it == table.end()) throw ValidationError("unknown command '" + command + "'");
    std::error_code ec;
    fs::create_directories(ctx.dir, ec);
    if (ec || !fs::is_directory(ctx.dir))
      throw ValidationError("output directory " + ctx.dir.string() + " cannot be created");
    ctx.effective["J"] = config.J;
    ctx.effective["weight"] = config.weight.describe();
    it->second(ctx);
    ctx.result.exit_code = 0;
  } catch (const ValidationError& e) {
    emit(diag, "validation", 1, e.what());
    ctx.result.exit_code = 1;
  } catch (const NumericalError& e) {
    emit(diag, "numerical", 2, e.what());
    ctx.result.exit_code = 2;
  } catch (const std::exception& e) {
    emit(diag, "internal", 2, e.what());
    ctx.result.exit_code = 2;
  }
  return ctx.result;
}

RunResult run_from_file(const std::string& command, const fs::path& config_path, std::optional<std::uint64_t> seed,
                        std::optional<fs::path> out, std::ostream& diag) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const std::exception& e) {
    emit(diag, "validation", 1, e.what());
    return {1, {}};
  }
  if (seed) cfg.seed = *seed;
  if (out) cfg.out = *out;
  return run(command, cfg, diag);
}

}  // namespace growthwave::cli
