#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "supertail/supertail.hpp"

namespace supertail {

using json = nlohmann::json;

// Stable shortest round-trip formatting so reports are byte-identical
// across runs and thread counts.
inline std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// -------- loss distributions --------

inline json to_json(const LossDistribution& d);

namespace detail {
inline json convex_fn_to_json(const PiecewiseConvexFn& f) {
  json j;
  j["value_at_one"] = f.value_at_one();
  j["knots"] = f.knots();
  j["slopes"] = f.slopes();
  if (f.power_tail()) {
    j["power_tail"] = {{"coeff", f.power_tail()->coeff},
                       {"exponent", f.power_tail()->exponent}};
  }
  return j;
}

inline PiecewiseConvexFn convex_fn_from_json(const json& j) {
  std::optional<PiecewiseConvexFn::PowerTail> tail;
  if (j.contains("power_tail"))
    tail = PiecewiseConvexFn::PowerTail{j["power_tail"]["coeff"],
                                        j["power_tail"]["exponent"]};
  return PiecewiseConvexFn(j.at("value_at_one"),
                           j.value("knots", std::vector<double>{}),
                           j.value("slopes", std::vector<double>{}), tail);
}
}  // namespace detail

inline json to_json(const LossDistribution& d) {
  using K = LossDistribution::Kind;
  json j;
  switch (d.kind()) {
    case K::pareto: {
      const auto& p = static_cast<const detail::ParetoDist&>(d.impl());
      j["type"] = "pareto";
      j["alpha"] = p.alpha;
      break;
    }
    case K::gpd: {
      const auto& g = static_cast<const detail::GpdDist&>(d.impl());
      j["type"] = "gpd";
      j["xi"] = g.xi;
      j["beta"] = g.beta;
      break;
    }
    case K::convex_transform: {
      const auto& c =
          static_cast<const detail::ConvexTransformDist&>(d.impl());
      j["type"] = "convex_transform";
      j["f"] = detail::convex_fn_to_json(c.f);
      break;
    }
    case K::truncated: {
      const auto& t = static_cast<const detail::TruncatedDist&>(d.impl());
      j["type"] = "truncated";
      j["base"] = to_json(LossDistribution::wrap(t.base));
      j["cap"] = t.cap;
      break;
    }
    case K::tail_graft: {
      const auto& t = static_cast<const detail::TailGraftDist&>(d.impl());
      j["type"] = "tail_graft";
      j["base"] = to_json(LossDistribution::wrap(t.base));
      j["x"] = t.x;
      j["body"] = to_json(LossDistribution::wrap(t.body));
      j["grid_points"] = t.grid_points;
      break;
    }
    case K::empirical: {
      const auto& e = static_cast<const detail::EmpiricalDist&>(d.impl());
      j["type"] = "empirical";
      j["sample"] = e.sample;
      break;
    }
    case K::normal: {
      const auto& n = static_cast<const detail::NormalDist&>(d.impl());
      j["type"] = "normal";
      j["mu"] = n.mu;
      j["sigma"] = n.sigma;
      break;
    }
    case K::comonotone_sum: {
      const auto& c =
          static_cast<const detail::ComonotoneSumDist&>(d.impl());
      j["type"] = "comonotone_sum";
      json parts = json::array();
      for (const auto& p : c.parts)
        parts.push_back(to_json(LossDistribution::wrap(p)));
      j["components"] = parts;
      break;
    }
  }
  return j;
}

inline LossDistribution loss_distribution_from_json(const json& j) {
  std::string type = j.at("type");
  if (type == "pareto") return LossDistribution::pareto(j.at("alpha"));
  if (type == "gpd") return LossDistribution::gpd(j.at("xi"), j.at("beta"));
  if (type == "convex_transform")
    return LossDistribution::convex_transform(
        detail::convex_fn_from_json(j.at("f")));
  if (type == "truncated")
    return LossDistribution::truncated(
        loss_distribution_from_json(j.at("base")), j.at("cap"));
  if (type == "tail_graft")
    return LossDistribution::tail_graft(
        loss_distribution_from_json(j.at("base")), j.at("x"),
        loss_distribution_from_json(j.at("body")),
        j.value("grid_points", std::size_t{1024}));
  if (type == "empirical")
    return LossDistribution::empirical(
        j.at("sample").get<std::vector<double>>());
  if (type == "normal")
    return LossDistribution::normal(j.at("mu"), j.at("sigma"));
  if (type == "comonotone_sum") {
    std::vector<LossDistribution> parts;
    for (const auto& p : j.at("components"))
      parts.push_back(loss_distribution_from_json(p));
    return LossDistribution::comonotone_sum(parts);
  }
  throw std::invalid_argument("unknown loss distribution type: " + type);
}

// -------- copulas --------

inline json to_json(const CopulaSpec& c) {
  json j;
  switch (c.kind()) {
    case CopulaSpec::Kind::independence:
      j["type"] = "independence";
      break;
    case CopulaSpec::Kind::comonotone:
      j["type"] = "comonotone";
      break;
    case CopulaSpec::Kind::mixture: {
      j["type"] = "mixture";
      j["weights"] = c.weights();
      json comps = json::array();
      for (const auto& cc : c.components()) comps.push_back(to_json(cc));
      j["components"] = comps;
      break;
    }
    case CopulaSpec::Kind::gaussian_nsd:
      j["type"] = "gaussian_nsd";
      j["dim"] = c.gaussian_dim();
      j["corr"] = c.corr();  // row-major
      break;
  }
  return j;
}

inline CopulaSpec copula_from_json(const json& j) {
  std::string type = j.at("type");
  if (type == "independence") return CopulaSpec::independence();
  if (type == "comonotone") return CopulaSpec::comonotone();
  if (type == "mixture") {
    std::vector<CopulaSpec> comps;
    for (const auto& c : j.at("components"))
      comps.push_back(copula_from_json(c));
    return CopulaSpec::mixture(j.at("weights").get<std::vector<double>>(),
                               std::move(comps));
  }
  if (type == "gaussian_nsd")
    return CopulaSpec::gaussian_nsd(j.at("dim"),
                                    j.at("corr").get<std::vector<double>>());
  throw std::invalid_argument("unknown copula type: " + type);
}

// -------- distortion / utility / risk measures --------

inline json to_json(const DistortionFn& h) {
  json j;
  switch (h.kind()) {
    case DistortionFn::Kind::identity: j["type"] = "identity"; break;
    case DistortionFn::Kind::var_step:
      j["type"] = "var_step";
      j["p"] = h.level();
      break;
    case DistortionFn::Kind::es_ramp:
      j["type"] = "es_ramp";
      j["p"] = h.level();
      break;
    case DistortionFn::Kind::ess_inf: j["type"] = "ess_inf"; break;
    case DistortionFn::Kind::ess_sup: j["type"] = "ess_sup"; break;
    case DistortionFn::Kind::inf_sup_mix:
      j["type"] = "inf_sup_mix";
      j["lambda"] = h.mix_lambda();
      break;
    case DistortionFn::Kind::table:
      j["type"] = "table";
      j["t"] = h.nodes_t();
      j["h"] = h.nodes_h();
      break;
  }
  return j;
}

inline DistortionFn distortion_from_json(const json& j) {
  std::string type = j.at("type");
  if (type == "identity") return DistortionFn::identity();
  if (type == "var_step") return DistortionFn::var_step(j.at("p"));
  if (type == "es_ramp") return DistortionFn::es_ramp(j.at("p"));
  if (type == "ess_inf") return DistortionFn::ess_inf();
  if (type == "ess_sup") return DistortionFn::ess_sup();
  if (type == "inf_sup_mix") return DistortionFn::inf_sup_mix(j.at("lambda"));
  if (type == "table")
    return DistortionFn::table(j.at("t").get<std::vector<double>>(),
                               j.at("h").get<std::vector<double>>());
  throw std::invalid_argument("unknown distortion type: " + type);
}

inline json to_json(const MonotoneFn& v) {
  return json{{"knots", v.knots()},
              {"slopes", v.slopes()},
              {"value_at_first_knot", v.value_at_first_knot()}};
}

inline MonotoneFn monotone_fn_from_json(const json& j) {
  return MonotoneFn(j.at("knots").get<std::vector<double>>(),
                    j.at("slopes").get<std::vector<double>>(),
                    j.at("value_at_first_knot"));
}

inline json to_json(const RiskMeasureSpec& r) {
  json j;
  switch (r.kind()) {
    case RiskMeasureSpec::Kind::var:
      j["type"] = "var";
      j["p"] = r.p();
      break;
    case RiskMeasureSpec::Kind::es:
      j["type"] = "es";
      j["p"] = r.p();
      break;
    case RiskMeasureSpec::Kind::rvar:
      j["type"] = "rvar";
      j["p"] = r.p();
      j["q"] = r.q();
      break;
    case RiskMeasureSpec::Kind::distortion:
      j["type"] = "distortion";
      j["h"] = to_json(r.h());
      break;
    case RiskMeasureSpec::Kind::expected_disutility:
      j["type"] = "expected_disutility";
      j["v"] = to_json(r.v());
      break;
  }
  return j;
}

inline RiskMeasureSpec risk_measure_from_json(const json& j) {
  std::string type = j.at("type");
  if (type == "var") return RiskMeasureSpec::var(j.at("p"));
  if (type == "es") return RiskMeasureSpec::es(j.at("p"));
  if (type == "rvar") return RiskMeasureSpec::rvar(j.at("p"), j.at("q"));
  if (type == "distortion")
    return RiskMeasureSpec::distortion(distortion_from_json(j.at("h")));
  if (type == "expected_disutility")
    return RiskMeasureSpec::expected_disutility(
        monotone_fn_from_json(j.at("v")));
  throw std::invalid_argument("unknown risk measure type: " + type);
}

// -------- cost / compensation --------

inline json to_json(const CostFunction& c) {
  json j;
  switch (c.kind()) {
    case CostFunction::Kind::zero: j["type"] = "zero"; break;
    case CostFunction::Kind::linear:
      j["type"] = "linear";
      j["lambda"] = c.lambda();
      break;
    case CostFunction::Kind::quadratic:
      j["type"] = "quadratic";
      j["lambda"] = c.lambda();
      break;
    case CostFunction::Kind::excess_only:
      j["type"] = "excess_only";
      j["lambda"] = c.lambda();
      break;
    case CostFunction::Kind::piecewise:
      j["type"] = "piecewise";
      j["x"] = c.nodes_x();
      j["d"] = c.nodes_d();
      break;
  }
  return j;
}

inline CostFunction cost_from_json(const json& j) {
  std::string type = j.at("type");
  if (type == "zero") return CostFunction::zero();
  if (type == "linear") return CostFunction::linear(j.at("lambda"));
  if (type == "quadratic") return CostFunction::quadratic(j.at("lambda"));
  if (type == "excess_only") return CostFunction::excess_only(j.at("lambda"));
  if (type == "piecewise")
    return CostFunction::piecewise(j.at("x").get<std::vector<double>>(),
                                   j.at("d").get<std::vector<double>>());
  throw std::invalid_argument("unknown cost function type: " + type);
}

inline json to_json(const CompensationFn& g) {
  return json{{"value_at_zero", g.value_at_zero()},
              {"knots", g.knots()},
              {"slopes", g.slopes()}};
}

inline CompensationFn compensation_from_json(const json& j) {
  return CompensationFn(j.value("value_at_zero", 0.0),
                        j.value("knots", std::vector<double>{}),
                        j.at("slopes").get<std::vector<double>>());
}

// -------- count / weight laws --------

inline json to_json(const CountLaw& c) {
  json j;
  switch (c.kind()) {
    case CountLaw::Kind::dirac:
      j["type"] = "dirac";
      j["value"] = c.lo();
      break;
    case CountLaw::Kind::uniform_int:
      j["type"] = "uniform_int";
      j["lo"] = c.lo();
      j["hi"] = c.hi();
      break;
    case CountLaw::Kind::poisson:
      j["type"] = "poisson";
      j["lambda"] = c.lambda();
      break;
  }
  return j;
}

inline CountLaw count_law_from_json(const json& j) {
  std::string type = j.at("type");
  if (type == "dirac") return CountLaw::dirac(j.at("value"));
  if (type == "uniform_int")
    return CountLaw::uniform_int(j.at("lo"), j.at("hi"));
  if (type == "poisson") return CountLaw::poisson(j.at("lambda"));
  throw std::invalid_argument("unknown count law type: " + type);
}

inline json to_json(const WeightLaw& w) {
  json j;
  switch (w.kind()) {
    case WeightLaw::Kind::dirac:
      j["type"] = "dirac";
      j["value"] = w.lo();
      break;
    case WeightLaw::Kind::uniform:
      j["type"] = "uniform";
      j["lo"] = w.lo();
      j["hi"] = w.hi();
      break;
  }
  return j;
}

inline WeightLaw weight_law_from_json(const json& j) {
  std::string type = j.at("type");
  if (type == "dirac") return WeightLaw::dirac(j.at("value"));
  if (type == "uniform") return WeightLaw::uniform(j.at("lo"), j.at("hi"));
  throw std::invalid_argument("unknown weight law type: " + type);
}

// -------- report writers --------

inline json to_json(const DominanceRow& r) {
  json j;
  j["t"] = r.t;
  j["lhs"] = r.lhs;
  j["lhs_ci"] = {r.lhs_lo, r.lhs_hi};
  j["rhs"] = r.rhs;
  j["rhs_ci"] = {r.rhs_lo, r.rhs_hi};
  if (std::isfinite(r.rhs_analytic)) j["rhs_analytic"] = r.rhs_analytic;
  if (std::isfinite(r.ratio)) j["ratio"] = r.ratio;
  j["verdict"] = verdict_name(r.verdict);
  return j;
}

inline json to_json(const DominanceReport& rep) {
  json j;
  j["n_mc"] = rep.n_mc;
  j["coupled"] = rep.coupled;
  j["overall"] = verdict_name(rep.overall);
  json rows = json::array();
  for (const auto& r : rep.rows) rows.push_back(to_json(r));
  j["rows"] = rows;
  return j;
}

inline std::string dominance_csv(const DominanceReport& rep) {
  std::ostringstream os;
  os << "t,lhs,lhs_ci_lo,lhs_ci_hi,rhs,rhs_ci_lo,rhs_ci_hi,rhs_analytic,"
        "ratio,verdict\n";
  for (const auto& r : rep.rows) {
    os << fmt_double(r.t) << ',' << fmt_double(r.lhs) << ','
       << fmt_double(r.lhs_lo) << ',' << fmt_double(r.lhs_hi) << ','
       << fmt_double(r.rhs) << ',' << fmt_double(r.rhs_lo) << ','
       << fmt_double(r.rhs_hi) << ','
       << (std::isfinite(r.rhs_analytic) ? fmt_double(r.rhs_analytic) : "")
       << ',' << (std::isfinite(r.ratio) ? fmt_double(r.ratio) : "") << ','
       << verdict_name(r.verdict) << '\n';
  }
  return os.str();
}

inline std::string superadd_csv(const SuperadditivityReport& rep) {
  std::ostringstream os;
  os << "p,var_sum,var_sum_ci,sum_var,gap\n";
  for (const auto& r : rep.rows) {
    double half = 0.5 * (r.var_sum_hi - r.var_sum_lo);
    os << fmt_double(r.p) << ',' << fmt_double(r.var_sum) << ','
       << fmt_double(half) << ',' << fmt_double(r.sum_var) << ','
       << fmt_double(r.gap) << '\n';
  }
  return os.str();
}

inline std::string hill_csv(const std::vector<HillResult>& series) {
  std::ostringstream os;
  os << "k,threshold,alpha_hat,ci_low,ci_high\n";
  for (const auto& r : series) {
    os << r.k << ',' << fmt_double(r.threshold) << ','
       << fmt_double(r.alpha_hat) << ',' << fmt_double(r.ci_low) << ','
       << fmt_double(r.ci_high) << '\n';
  }
  return os.str();
}

inline std::string empirical_fsd_csv(const EmpiricalFsdReport& rep) {
  std::ostringstream os;
  os << "t,f_a,f_b,diff\n";
  for (const auto& r : rep.rows)
    os << fmt_double(r.t) << ',' << fmt_double(r.f_a) << ','
       << fmt_double(r.f_b) << ',' << fmt_double(r.diff) << '\n';
  return os.str();
}

inline std::string var_comparison_csv(
    const std::vector<VarComparisonRow>& rows) {
  std::ostringstream os;
  os << "p,lhs,lhs_ci_lo,lhs_ci_hi,rhs,gap,in_valid_region\n";
  for (const auto& r : rows)
    os << fmt_double(r.p) << ',' << fmt_double(r.lhs) << ','
       << fmt_double(r.lhs_lo) << ',' << fmt_double(r.lhs_hi) << ','
       << fmt_double(r.rhs) << ',' << fmt_double(r.gap) << ','
       << (r.in_valid_region ? 1 : 0) << '\n';
  return os.str();
}

inline json to_json(const EquilibriumResult& r) {
  json j;
  j["case"] = case_name(r.tag);
  j["price"] = r.price;
  j["u_star"] = r.u_star;
  j["w_star"] = r.w_star;
  j["internal_alloc"] = r.internal_alloc;
  j["external_alloc"] = r.external_alloc;
  j["clearance_residual"] = r.clearance_residual;
  j["bisection_residual"] = r.bisection_residual;
  if (r.tag == EquilibriumCase::no_trade)
    j["price_interval"] = {r.price_interval.lo, r.price_interval.hi};
  j["externals_split_each_loss"] = r.externals_split_each_loss;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace supertail
