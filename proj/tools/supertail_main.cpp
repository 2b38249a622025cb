// Command-line front end: one experiment descriptor in, a JSON summary and
// CSV series out. Exit codes: 0 success, 2 validation error, 3 numerical
// failure.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "supertail/serde.hpp"

namespace st = supertail;
using st::json;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> n_mc;
  std::optional<std::string> out;
  std::string format = "both";  // csv | json | both
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());

  bool want_csv() const { return format == "csv" || format == "both"; }
  bool want_json() const { return format == "json" || format == "both"; }
};

struct Descriptor {
  std::string kind;
  std::uint64_t seed = 0;
  std::uint64_t n_mc = 1000000;
  std::string output = "report";
  json params;
};

Descriptor parse_descriptor(const std::string& path, const Overrides& ov) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open descriptor " + path);
  json j = json::parse(in);
  Descriptor d;
  if (!j.contains("kind")) throw std::invalid_argument("descriptor: missing 'kind'");
  d.kind = j.at("kind");
  if (!j.contains("seed") && !ov.seed)
    throw std::invalid_argument(
        "descriptor: missing 'seed' (seeds are mandatory; there is no "
        "wall-clock default)");
  d.seed = ov.seed ? *ov.seed : j.at("seed").get<std::uint64_t>();
  if (j.contains("n_mc")) d.n_mc = j.at("n_mc").get<std::uint64_t>();
  if (ov.n_mc) d.n_mc = *ov.n_mc;
  if (j.contains("output")) d.output = j.at("output");
  if (ov.out) d.output = *ov.out;
  d.params = j.value("params", json::object());
  return d;
}

std::vector<double> load_side(const json& spec) {
  if (spec.contains("sample"))
    return spec.at("sample").get<std::vector<double>>();
  if (spec.contains("path")) {
    st::CsvOptions opt;
    if (spec.contains("delimiter"))
      opt.delimiter = spec.at("delimiter").get<std::string>().at(0);
    opt.has_header = spec.value("has_header", true);
    opt.scale = spec.value("scale", 1.0);
    if (spec.value("drop_nonpositive", false))
      opt.nonpositive = st::CsvOptions::NonPositive::drop;
    return st::load_losses(spec.at("path"), spec.value("column", "0"), opt);
  }
  throw std::invalid_argument("data spec needs 'sample' or 'path'");
}

void emit_json(const Descriptor& d, const Overrides& ov, const json& j) {
  if (ov.want_json())
    st::write_text_file(d.output + ".json", j.dump(2) + "\n");
}

void emit_csv(const Overrides& ov, const std::string& path,
              const std::string& content) {
  if (ov.want_csv()) st::write_text_file(path, content);
}

st::ExperimentOptions exp_options(const Descriptor& d, const Overrides& ov) {
  st::ExperimentOptions o;
  o.threads = ov.threads;
  o.couple = d.params.value("coupled", true);
  return o;
}

double resolve_rho(const json& params, const std::string& value_key,
                   const std::string& spec_key) {
  if (params.contains(value_key)) return params.at(value_key).get<double>();
  if (params.contains(spec_key)) {
    const json& s = params.at(spec_key);
    return st::resolve_risk_value(st::risk_measure_from_json(s.at("measure")),
                                  st::loss_distribution_from_json(
                                      s.at("marginal")));
  }
  throw std::invalid_argument("missing '" + value_key + "' or '" + spec_key +
                              "'");
}

int run_dominance(const Descriptor& d, const Overrides& ov) {
  auto marginal = st::loss_distribution_from_json(d.params.at("marginal"));
  auto copula = st::copula_from_json(d.params.at("copula"));
  auto theta = d.params.at("theta").get<std::vector<double>>();
  std::vector<double> grid =
      d.params.contains("grid")
          ? d.params.at("grid").get<std::vector<double>>()
          : st::default_dominance_grid(marginal);
  st::RngStream stream(d.seed);
  auto rep = st::penalty_experiment(marginal, copula, theta, grid, d.n_mc,
                                    stream, exp_options(d, ov));
  emit_json(d, ov, st::to_json(rep));
  emit_csv(ov, d.output + ".csv", st::dominance_csv(rep));
  std::cout << "dominance: " << st::verdict_name(rep.overall) << " over "
            << rep.rows.size() << " thresholds, n_mc=" << rep.n_mc << " -> "
            << d.output << ".{json,csv}\n";
  return 0;
}

int run_truncated(const Descriptor& d, const Overrides& ov) {
  auto marginal = st::loss_distribution_from_json(d.params.at("marginal"));
  auto copula = st::copula_from_json(d.params.at("copula"));
  auto theta = d.params.at("theta").get<std::vector<double>>();
  auto caps = d.params.at("caps").get<std::vector<double>>();
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < caps.size(); ++i)
    c = std::min(c, caps[i] * theta[i]);
  std::vector<double> grid;
  if (d.params.contains("grid")) {
    grid = d.params.at("grid").get<std::vector<double>>();
  } else {
    double z = marginal.lower_bound();
    for (int i = 1; i <= 11; ++i)
      grid.push_back(z + (c - z) * static_cast<double>(i) / 11.0);
  }
  auto p_grid = d.params.value("p_grid", std::vector<double>{0.5, 0.6, 0.7});
  st::RngStream stream(d.seed);
  auto rep = st::truncated_penalty_experiment(marginal, copula, theta, caps,
                                              grid, p_grid, d.n_mc, stream,
                                              exp_options(d, ov));
  json j = st::to_json(rep.dominance);
  j["c_bound"] = rep.c_bound;
  j["region_p_max"] = rep.region_p_max;
  j["mismatches"] = rep.mismatches;
  json vr = json::array();
  for (const auto& r : rep.var_rows)
    vr.push_back(json{{"p", r.p},
                      {"lhs", r.lhs},
                      {"lhs_ci", {r.lhs_lo, r.lhs_hi}},
                      {"rhs", r.rhs},
                      {"gap", r.gap},
                      {"in_valid_region", r.in_valid_region}});
  j["var_comparison"] = vr;
  emit_json(d, ov, j);
  emit_csv(ov, d.output + ".csv", st::dominance_csv(rep.dominance));
  emit_csv(ov, d.output + "_var.csv", st::var_comparison_csv(rep.var_rows));
  std::uint64_t mism = 0;
  for (auto m : rep.mismatches) mism += m;
  std::cout << "truncated: " << st::verdict_name(rep.dominance.overall)
            << ", indicator mismatches=" << mism << " -> " << d.output
            << ".{json,csv}, " << d.output << "_var.csv\n";
  return 0;
}

int run_collective(const Descriptor& d, const Overrides& ov) {
  auto marginal = st::loss_distribution_from_json(d.params.at("marginal"));
  auto weight_law = st::weight_law_from_json(d.params.at("weight_law"));
  auto count_law = st::count_law_from_json(d.params.at("count_law"));
  std::vector<double> grid_avg =
      d.params.contains("grid_avg")
          ? d.params.at("grid_avg").get<std::vector<double>>()
          : st::default_dominance_grid(marginal, 21);
  std::vector<double> grid_wsum =
      d.params.contains("grid_wsum")
          ? d.params.at("grid_wsum").get<std::vector<double>>()
          : grid_avg;
  st::RngStream stream(d.seed);
  auto rep = st::collective_risk_experiment(marginal, weight_law, count_law,
                                            grid_avg, grid_wsum, d.n_mc,
                                            stream, exp_options(d, ov));
  json j;
  j["average_form"] = st::to_json(rep.average_form);
  j["weighted_form"] = st::to_json(rep.weighted_form);
  j["strictness_expected"] = rep.strictness_expected;
  emit_json(d, ov, j);
  emit_csv(ov, d.output + "_avg.csv", st::dominance_csv(rep.average_form));
  emit_csv(ov, d.output + "_wsum.csv", st::dominance_csv(rep.weighted_form));
  std::cout << "collective: avg="
            << st::verdict_name(rep.average_form.overall)
            << " wsum=" << st::verdict_name(rep.weighted_form.overall)
            << " -> " << d.output << "_{avg,wsum}.csv\n";
  return 0;
}

int run_portfolio(const Descriptor& d, const Overrides& ov) {
  const json& pj = d.params.at("problem");
  st::PositionProblem prob{
      st::loss_distribution_from_json(pj.at("marginal")),
      st::copula_from_json(pj.at("copula")),
      pj.at("n_assets").get<std::size_t>(),
      st::risk_measure_from_json(pj.at("rho")),
      pj.contains("g") ? st::compensation_from_json(pj.at("g"))
                       : st::CompensationFn::zero(),
      st::PositionProblem::Constraint::free,
      1.0};
  if (pj.contains("constraint")) {
    const json& cj = pj.at("constraint");
    if (cj.at("type") == "fixed_total") {
      prob.constraint = st::PositionProblem::Constraint::fixed_total;
      prob.total = cj.at("total");
    } else if (cj.at("type") != "free") {
      throw std::invalid_argument("constraint type must be fixed_total|free");
    }
  }
  std::string mode = d.params.value("mode", "optimize");
  st::RngStream stream(d.seed);
  json j;
  if (mode == "evaluate") {
    auto w = d.params.at("w").get<std::vector<double>>();
    st::ExtReal v = st::evaluate_position(prob, w, d.n_mc, stream,
                                          ov.threads);
    j["mode"] = "evaluate";
    j["w"] = w;
    j["value"] = v.is_finite() ? json(v.value()) : json("inf");
    std::cout << "portfolio evaluate: value=" << v.str() << " -> "
              << d.output << ".json\n";
  } else if (mode == "optimize") {
    double w_max = d.params.value("w_max", 1e3);
    auto res = st::optimize_position(prob, d.n_mc, stream, w_max, ov.threads);
    j["mode"] = "optimize";
    j["w"] = res.w;
    j["value"] =
        res.value.is_finite() ? json(res.value.value()) : json("inf");
    j["certificate"] = {{"reduction", res.certificate.reduction},
                        {"route", res.certificate.route},
                        {"ties", res.certificate.ties},
                        {"unbounded_below", res.certificate.unbounded_below},
                        {"message", res.certificate.message}};
    std::cout << "portfolio optimize: value=" << res.value.str()
              << (res.certificate.unbounded_below ? " (unbounded_below)" : "")
              << " -> " << d.output << ".json\n";
  } else {
    throw std::invalid_argument("portfolio mode must be evaluate|optimize");
  }
  emit_json(d, ov, j);
  return 0;
}

int run_superadd(const Descriptor& d, const Overrides& ov) {
  std::vector<st::LossDistribution> losses;
  for (const auto& lj : d.params.at("losses"))
    losses.push_back(st::loss_distribution_from_json(lj));
  auto theta = d.params.at("theta").get<std::vector<double>>();
  auto p_grid = d.params.at("p_grid").get<std::vector<double>>();
  st::RngStream stream(d.seed);
  auto rep = st::var_superadditivity_report(losses, theta, p_grid, d.n_mc,
                                            stream, exp_options(d, ov));
  json j;
  j["gap_monotone"] = rep.gap_monotone;
  j["heterogeneous"] = rep.heterogeneous;
  if (!rep.note.empty()) j["note"] = rep.note;
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back(json{{"p", r.p},
                        {"var_sum", r.var_sum},
                        {"var_sum_ci", {r.var_sum_lo, r.var_sum_hi}},
                        {"sum_var", r.sum_var},
                        {"gap", r.gap}});
  j["rows"] = rows;
  emit_json(d, ov, j);
  emit_csv(ov, d.output + ".csv", st::superadd_csv(rep));
  std::cout << "superadd: " << rep.rows.size()
            << " levels, gap_monotone=" << (rep.gap_monotone ? "yes" : "no")
            << " -> " << d.output << ".{json,csv}\n";
  return 0;
}

int run_equilibrium(const Descriptor& d, const Overrides& ov) {
  json j;
  if (d.kind == "equilibrium_internal") {
    st::InternalMarketSpec spec;
    spec.exposures = d.params.at("exposures").get<std::vector<double>>();
    for (const auto& cj : d.params.at("costs"))
      spec.costs.push_back(st::cost_from_json(cj));
    if (d.params.contains("risk_values")) {
      spec.risk_values =
          d.params.at("risk_values").get<std::vector<double>>();
    } else {
      auto rho = st::risk_measure_from_json(d.params.at("rho"));
      auto marginal =
          st::loss_distribution_from_json(d.params.at("marginal"));
      double v = st::resolve_risk_value(rho, marginal);
      spec.risk_values.assign(spec.exposures.size(), v);
      spec.positively_homogeneous = rho.positively_homogeneous();
    }
    st::Interval iv = st::internal_equilibrium_price_interval(spec);
    j["price_interval"] = iv.empty() ? json() : json{iv.lo, iv.hi};
    j["empty"] = iv.empty();
    if (iv.empty()) {
      j["note"] =
          "the sufficient condition certifies no equilibrium here; "
          "existence is unknown, not ruled out";
    } else {
      // canonical stay-put allocation; every permutation of the initial
      // exposure vectors clears equally well
      json alloc = json::array();
      for (std::size_t i = 0; i < spec.size(); ++i) {
        std::vector<double> row(spec.size(), 0.0);
        row[i] = spec.exposures[i];
        alloc.push_back(row);
      }
      j["allocation"] = alloc;
      j["allocation_note"] =
          "any permutation of the initial exposure vectors is an equally "
          "valid equilibrium allocation";
    }
    if (d.params.contains("validate")) {
      const json& vj = d.params.at("validate");
      auto price = vj.at("price").get<std::vector<double>>();
      auto alloc =
          vj.at("allocation").get<std::vector<std::vector<double>>>();
      auto res = st::validate_internal_equilibrium(spec, price, alloc);
      j["validation"] = {{"price_constant", res.price_constant},
                         {"allocation_is_permutation",
                          res.allocation_is_permutation},
                         {"necessary_condition", res.necessary_condition},
                         {"clearance", res.clearance},
                         {"all_pass", res.all_pass()}};
    }
    std::cout << "equilibrium_internal: interval "
              << (iv.empty() ? "(empty)"
                             : "[" + st::fmt_double(iv.lo) + ", " +
                                   st::fmt_double(iv.hi) + "]")
              << " -> " << d.output << ".json\n";
  } else if (d.kind == "equilibrium_external") {
    st::ExternalMarketSpec spec;
    spec.n = d.params.at("n").get<std::size_t>();
    spec.k = d.params.at("k").get<std::size_t>();
    spec.a = d.params.at("a").get<double>();
    spec.rho_internal = resolve_rho(d.params, "rho_internal", "internal");
    spec.rho_external = resolve_rho(d.params, "rho_external", "external");
    spec.cost_internal = st::cost_from_json(d.params.at("cost_internal"));
    spec.cost_external = st::cost_from_json(d.params.at("cost_external"));
    auto res = st::external_equilibrium(
        spec, d.params.value("tol_scale", 1e-10));
    j = st::to_json(res);
    std::cout << "equilibrium_external: case=" << st::case_name(res.tag)
              << " p=" << st::fmt_double(res.price[0]) << " -> " << d.output
              << ".json\n";
  } else if (d.kind == "equilibrium_es") {
    auto marginal = st::loss_distribution_from_json(d.params.at("marginal"));
    auto exposures = d.params.at("exposures").get<std::vector<double>>();
    double q = d.params.at("q");
    st::RngStream stream(d.seed);
    auto res = st::es_finite_mean_equilibrium(exposures.size(), exposures,
                                              marginal, q, d.n_mc, stream,
                                              ov.threads);
    j["price"] = res.price;
    j["price_se"] = res.price_se;
    j["allocation"] = res.allocation;
    j["var_q_aggregate"] = res.var_q_aggregate;
    j["euler_lhs"] = res.euler_lhs;
    j["euler_rhs"] = res.euler_rhs;
    j["tail_count"] = res.tail_count;
    std::cout << "equilibrium_es: sum(a_i p_i)="
              << st::fmt_double(res.euler_lhs) << " vs tail ES "
              << st::fmt_double(res.euler_rhs) << " -> " << d.output
              << ".json\n";
  } else {
    throw std::invalid_argument(
        "equilibrium descriptor kind must be equilibrium_internal, "
        "equilibrium_external or equilibrium_es");
  }
  emit_json(d, ov, j);
  return 0;
}

int run_hill(const Descriptor& d, const Overrides& ov) {
  std::vector<double> sample = load_side(d.params.at("data"));
  std::vector<st::HillResult> series;
  if (d.params.contains("k_min") || d.params.contains("k_max")) {
    series = st::hill_plot(sample, d.params.at("k_min").get<std::size_t>(),
                           d.params.at("k_max").get<std::size_t>());
  } else {
    std::size_t k = d.params.contains("k")
                        ? d.params.at("k").get<std::size_t>()
                        : st::default_threshold_k(sample.size());
    series.push_back(st::hill_estimator(sample, k));
  }
  json j;
  j["n"] = sample.size();
  json rows = json::array();
  for (const auto& r : series)
    rows.push_back(json{{"k", r.k},
                        {"threshold", r.threshold},
                        {"alpha_hat", r.alpha_hat},
                        {"ci_low", r.ci_low},
                        {"ci_high", r.ci_high}});
  j["rows"] = rows;
  emit_json(d, ov, j);
  emit_csv(ov, d.output + ".csv", st::hill_csv(series));
  const auto& last = series.back();
  std::cout << "hill: k=" << last.k << " alpha_hat="
            << st::fmt_double(last.alpha_hat) << " ci=["
            << st::fmt_double(last.ci_low) << ", "
            << st::fmt_double(last.ci_high) << "] -> " << d.output
            << ".{json,csv}\n";
  return 0;
}

int run_empirical(const Descriptor& d, const Overrides& ov) {
  std::vector<double> a = load_side(d.params.at("a"));
  std::vector<double> b = load_side(d.params.at("b"));
  std::string construct = d.params.value("construct", "raw");
  st::RngStream stream(d.seed);
  if (construct == "sums") {
    // build the comonotone-sum and independent-sum samples from the two
    // datasets, then compare those
    std::size_t n_out = d.params.value("n_out", std::size_t{10000});
    auto fa = st::LossDistribution::empirical(a);
    auto fb = st::LossDistribution::empirical(b);
    auto como = st::comonotonic_sum(fa, fb);
    std::vector<double> ind =
        st::independent_sum(fa, fb, n_out, stream.substream(1), ov.threads);
    std::vector<double> com = st::sample(como, n_out, stream.substream(2),
                                         ov.threads);
    a = std::move(com);  // H0: comonotone sum <=_st independent sum
    b = std::move(ind);
  } else if (construct != "raw") {
    throw std::invalid_argument("empirical construct must be raw|sums");
  }
  std::string mode = d.params.value("mode", "both");
  json j;
  j["n_a"] = a.size();
  j["n_b"] = b.size();
  if (mode == "fsd" || mode == "both") {
    auto rep = st::empirical_fsd(a, b);
    j["dominance_holds_everywhere"] = rep.dominance_holds_everywhere;
    if (!rep.dominance_holds_everywhere)
      j["first_violation_t"] = rep.first_violation_t;
    j["max_violation"] = rep.max_violation;
    emit_csv(ov, d.output + ".csv", st::empirical_fsd_csv(rep));
  }
  if (mode == "test" || mode == "both") {
    std::uint64_t n_boot = d.params.value("n_boot", std::uint64_t{999});
    auto res = st::one_sided_dominance_test(a, b, n_boot,
                                            stream.substream(3));
    j["test"] = {{"statistic", res.statistic},
                 {"p_value", res.p_value},
                 {"n_boot", res.n_boot}};
  }
  if (mode != "fsd" && mode != "test" && mode != "both")
    throw std::invalid_argument("empirical mode must be fsd|test|both");
  emit_json(d, ov, j);
  std::cout << "empirical: wrote " << d.output << ".json";
  if (j.contains("test"))
    std::cout << " (p_value=" << st::fmt_double(j["test"]["p_value"]) << ")";
  std::cout << "\n";
  return 0;
}

json example_descriptor(const std::string& kind) {
  json j;
  j["kind"] = kind;
  j["seed"] = 20240901;
  j["n_mc"] = 1000000;
  j["output"] = "out/" + kind;
  json& p = j["params"];
  if (kind == "dominance") {
    p["marginal"] = {{"type", "pareto"}, {"alpha", 1.0}};
    p["copula"] = {{"type", "independence"}};
    p["theta"] = {0.5, 0.5};
    p["grid"] = {1.25, 2.0, 5.0};
    p["coupled"] = true;
  } else if (kind == "truncated") {
    p["marginal"] = {{"type", "pareto"}, {"alpha", 1.0}};
    p["copula"] = {{"type", "independence"}};
    p["theta"] = {0.5, 0.5};
    p["caps"] = {10.0, 10.0};
    p["grid"] = {2.0, 4.0};
    p["p_grid"] = {0.5, 0.75};
  } else if (kind == "collective") {
    p["marginal"] = {{"type", "pareto"}, {"alpha", 1.0}};
    p["weight_law"] = {{"type", "dirac"}, {"value", 1.0}};
    p["count_law"] = {{"type", "uniform_int"}, {"lo", 1}, {"hi", 2}};
    p["grid_avg"] = {2.0, 4.0, 8.0};
    p["grid_wsum"] = {2.0, 4.0, 8.0};
  } else if (kind == "portfolio") {
    p["problem"] = {{"marginal", {{"type", "pareto"}, {"alpha", 1.0}}},
                    {"copula", {{"type", "independence"}}},
                    {"n_assets", 2},
                    {"rho", {{"type", "var"}, {"p", 0.5}}},
                    {"constraint",
                     {{"type", "fixed_total"}, {"total", 1.0}}}};
    p["mode"] = "optimize";
  } else if (kind == "superadd") {
    json losses = json::array();
    const double xi[] = {1.19, 1.17, 1.01, 1.39, 1.23, 1.22};
    const double beta[] = {774, 254, 233, 412, 107, 243};
    for (int i = 0; i < 6; ++i)
      losses.push_back({{"type", "gpd"}, {"xi", xi[i]}, {"beta", beta[i]}});
    p["losses"] = losses;
    p["theta"] = {1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6};
    p["p_grid"] = {0.95, 0.96, 0.97, 0.98, 0.99};
  } else if (kind == "equilibrium_internal") {
    p["exposures"] = {1.0, 1.0};
    p["costs"] = json::array(
        {{{"type", "zero"}}, {{"type", "zero"}}});
    p["rho"] = {{"type", "var"}, {"p", 0.95}};
    p["marginal"] = {{"type", "pareto"}, {"alpha", 0.8}};
  } else if (kind == "equilibrium_external") {
    p["n"] = 2;
    p["k"] = 1;
    p["a"] = 2.0;
    p["rho_internal"] = 4.0;
    p["rho_external"] = 2.0;
    p["cost_internal"] = {{"type", "quadratic"}, {"lambda", 1.0}};
    p["cost_external"] = {{"type", "quadratic"}, {"lambda", 1.0}};
  } else if (kind == "equilibrium_es") {
    p["marginal"] = {{"type", "normal"}, {"mu", 0.0}, {"sigma", 1.0}};
    p["exposures"] = {1.0, 1.0};
    p["q"] = 0.9;
  } else if (kind == "hill") {
    p["data"] = {{"path", "losses.csv"}, {"column", "loss"}};
    p["k_min"] = 10;
    p["k_max"] = 200;
  } else if (kind == "empirical_compare") {
    p["a"] = {{"path", "losses_a.csv"}, {"column", "loss"}};
    p["b"] = {{"path", "losses_b.csv"}, {"column", "loss"}};
    p["construct"] = "sums";
    p["n_out"] = 10000;
    p["mode"] = "both";
    p["n_boot"] = 999;
  } else {
    throw std::invalid_argument("unknown descriptor kind: " + kind);
  }
  return j;
}

int dispatch(const std::string& subcommand, const std::string& path,
             const Overrides& ov) {
  if (ov.format != "csv" && ov.format != "json" && ov.format != "both")
    throw std::invalid_argument("unknown --format '" + ov.format +
                                "' (use csv, json or both)");
  Descriptor d = parse_descriptor(path, ov);
  auto expect = [&](std::initializer_list<const char*> kinds) {
    for (const char* k : kinds)
      if (d.kind == k) return;
    std::string allowed;
    for (const char* k : kinds) allowed += std::string(k) + " ";
    throw std::invalid_argument("descriptor kind '" + d.kind +
                                "' does not match subcommand (expected: " +
                                allowed + ")");
  };
  if (subcommand == "dominance") {
    expect({"dominance"});
    return run_dominance(d, ov);
  }
  if (subcommand == "truncated") {
    expect({"truncated"});
    return run_truncated(d, ov);
  }
  if (subcommand == "collective") {
    expect({"collective"});
    return run_collective(d, ov);
  }
  if (subcommand == "portfolio") {
    expect({"portfolio"});
    return run_portfolio(d, ov);
  }
  if (subcommand == "superadd") {
    expect({"superadd"});
    return run_superadd(d, ov);
  }
  if (subcommand == "equilibrium") {
    expect({"equilibrium_internal", "equilibrium_external", "equilibrium_es"});
    return run_equilibrium(d, ov);
  }
  if (subcommand == "hill") {
    expect({"hill"});
    return run_hill(d, ov);
  }
  if (subcommand == "empirical") {
    expect({"empirical_compare"});
    return run_empirical(d, ov);
  }
  throw std::invalid_argument("unknown subcommand " + subcommand);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "supertail: diversification, risk-measure and market analysis for "
      "extremely heavy-tailed losses"};
  app.require_subcommand(1);

  Overrides ov;
  std::string descriptor_path;
  std::string example_kind;
  std::string example_out = "-";

  const std::vector<std::string> run_subs = {
      "dominance", "truncated", "collective", "portfolio",
      "superadd",  "equilibrium", "hill",      "empirical"};
  for (const auto& name : run_subs) {
    auto* sub = app.add_subcommand(name, "run a '" + name + "' descriptor");
    sub->add_option("descriptor", descriptor_path, "experiment descriptor")
        ->required();
    sub->add_option("--seed", ov.seed, "override the descriptor seed");
    sub->add_option("--n-mc", ov.n_mc, "override the Monte Carlo size");
    sub->add_option("--threads", ov.threads,
                    "worker threads (results are thread-count invariant)");
    sub->add_option("--out", ov.out, "override the output path prefix");
    sub->add_option("--format", ov.format, "series format: csv, json or both");
  }
  auto* ex = app.add_subcommand("example", "emit an example descriptor");
  ex->add_option("kind", example_kind, "descriptor kind")->required();
  ex->add_option("--out", example_out, "output file ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ex->parsed()) {
      json j = example_descriptor(example_kind);
      if (example_out == "-") {
        std::cout << j.dump(2) << "\n";
      } else {
        st::write_text_file(example_out, j.dump(2) + "\n");
        std::cout << "wrote " << example_out << "\n";
      }
      return 0;
    }
    for (const auto& name : run_subs)
      if (app.get_subcommand(name)->parsed())
        return dispatch(name, descriptor_path, ov);
    std::cerr << "no subcommand\n";
    return 2;
  } catch (const st::numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "descriptor error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
