#include "dynpov/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <type_traits>
#include <variant>

#include "dynpov/error.hpp"

namespace dynpov {
namespace {

[[noreturn]] void parse_fail(const std::string& what) {
  throw Error(ErrorKind::ParseError, what);
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) parse_fail(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

template <typename T>
T integer(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    parse_fail(std::string("field '") + key + "' must be a nonnegative integer");
  }
  return v.get<T>();
}

std::string text(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) parse_fail(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const Json& v, const char* what) {
  if (!v.is_array()) parse_fail(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) parse_fail(std::string(what) + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

std::string format_number(double x) {
  if (!std::isfinite(x)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  std::string s(buf, res.ptr);
  if (s == "-0") s = "0";
  return s;
}

Json to_json(const Matrix3& m) {
  Json rows = Json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return rows;
}

Matrix3 matrix_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) parse_fail("matrix must be a 3x3 array of arrays");
  Matrix3 m;
  for (int i = 0; i < 3; ++i) {
    const auto row = numbers(j[static_cast<std::size_t>(i)], "matrix row");
    if (row.size() != 3) parse_fail("matrix must be a 3x3 array of arrays");
    for (int c = 0; c < 3; ++c) m(i, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

Json to_json(const ModelParams& params) {
  const auto& m = params.moments;
  return Json{
      {"mu", params.mu.weights()},
      {"lambda", to_json(params.lambda.matrix())},
      {"thresholds", {{"y_ep", params.thresholds.y_ep()}, {"y_p", params.thresholds.y_p()}}},
      {"moments",
       {{"y1", m.y1},
        {"y2", m.y2},
        {"y1_2", m.y1_2},
        {"y2_2", m.y2_2},
        {"zbar1", m.zbar1},
        {"zbar2", m.zbar2},
        {"q1", m.q1},
        {"q2", m.q2}}},
  };
}

ModelParams model_params_from_json(const Json& j, bool require_moments) {
  ModelParams p;
  const auto mu = numbers(field(j, "mu"), "mu");
  if (mu.size() != 3) parse_fail("mu must have 3 entries");
  p.mu = Distribution3({mu[0], mu[1], mu[2]});
  p.lambda = GeneratorMatrix(matrix_from_json(field(j, "lambda")));
  const Json& thr = field(j, "thresholds");
  p.thresholds = PovertyThresholds(number(thr, "y_ep"), number(thr, "y_p"));
  if (j.contains("moments") || require_moments) {
    const Json& m = field(j, "moments");
    p.moments = ClassIncomeMoments{number(m, "y1"),    number(m, "y2"),    number(m, "y1_2"),
                                   number(m, "y2_2"),  number(m, "zbar1"), number(m, "zbar2"),
                                   number(m, "q1"),    number(m, "q2")};
    validate_params(p);
  }
  return p;
}

ModelParams model_params_from_json(const Json& j) { return model_params_from_json(j, true); }

Json to_json(const IncomeLaw& law) {
  return std::visit(
      [](const auto& l) -> Json {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, PointMassLaw>) {
          return {{"type", "point_mass"}, {"value", l.value}};
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          return {{"type", "uniform"}, {"lo", l.lo}, {"hi", l.hi}};
        } else if constexpr (std::is_same_v<T, TruncatedExponentialLaw>) {
          return {{"type", "truncated_exponential"}, {"rate", l.rate}, {"lo", l.lo}, {"hi", l.hi}};
        } else {
          return {{"type", "empirical"}, {"sample", l.sample}};
        }
      },
      law);
}

IncomeLaw income_law_from_json(const Json& j) {
  const std::string type = text(j, "type");
  if (type == "point_mass") return PointMassLaw{number(j, "value")};
  if (type == "uniform") return UniformLaw{number(j, "lo"), number(j, "hi")};
  if (type == "truncated_exponential") {
    return TruncatedExponentialLaw{number(j, "rate"), number(j, "lo"), number(j, "hi")};
  }
  if (type == "empirical") return EmpiricalLaw{numbers(field(j, "sample"), "sample")};
  parse_fail("unknown income law type '" + type + "'");
}

Json to_json(const ClassDistributionSpec& spec) {
  Json j{{"c1", to_json(spec.c1)}, {"c2", to_json(spec.c2)}};
  if (spec.c3) j["c3"] = to_json(*spec.c3);
  return j;
}

ClassDistributionSpec distribution_spec_from_json(const Json& j) {
  ClassDistributionSpec spec{income_law_from_json(field(j, "c1")),
                             income_law_from_json(field(j, "c2")), std::nullopt};
  if (j.contains("c3") && !j.at("c3").is_null()) spec.c3 = income_law_from_json(j.at("c3"));
  return spec;
}

std::string_view to_string(PairDenominator d) noexcept {
  return d == PairDenominator::NSquared ? "n_squared" : "n_times_n_minus_1";
}

PairDenominator pair_denominator_from_string(std::string_view name) {
  if (name == "n_squared") return PairDenominator::NSquared;
  if (name == "n_times_n_minus_1") return PairDenominator::NTimesNMinusOne;
  throw Error(ErrorKind::InvalidArgument,
              "pair_denominator must be n_squared or n_times_n_minus_1, got '" + std::string(name) +
                  "'");
}

Json to_json(const EstimationReport& report) {
  Json j = to_json(report.params);
  j["eta"] = report.eta;
  j["origin_year"] = report.origin_year();
  j["window"] = report.window;
  j["p_hat"] = to_json(report.p_hat.matrix());
  Json counts = Json::array();
  for (const auto& row : report.counts.k) counts.push_back(row);
  j["counts"] = counts;
  const auto& d = report.diagnostics;
  Json eig = Json::array();
  for (const auto& v : d.p_eigenvalues) eig.push_back({{"re", v.real()}, {"im", v.imag()}});
  j["diagnostics"] = {
      {"p_eigenvalues", eig},
      {"eigenvalues_real_positive", d.eigenvalues_real_positive},
      {"irreducible", d.irreducible},
      {"roundtrip_error", d.roundtrip_error},
      {"class_sizes", d.class_sizes},
      {"households", d.households},
  };
  return j;
}

SimConfig sim_config_from_json(const Json& j) {
  try {
    SimConfig c;
    const Json& params = field(j, "params");
    const bool has_moments = params.contains("moments");
    c.params = model_params_from_json(params, false);
    c.dist_spec = distribution_spec_from_json(field(j, "dist_spec"));
    PairDenominator denominator = PairDenominator::NSquared;
    if (j.contains("pair_denominator")) {
      denominator = pair_denominator_from_string(text(j, "pair_denominator"));
    }
    if (!has_moments) {
      validate_spec(c.dist_spec, c.params.thresholds);
      c.params.moments = moments_from_spec(c.dist_spec, denominator);
      validate_params(c.params);
    }
    c.n_agents = integer<std::size_t>(j, "n_agents");
    c.grid = numbers(field(j, "grid"), "grid");
    c.replications = integer<std::size_t>(j, "replications");
    c.seed = integer<std::uint64_t>(j, "seed");
    c.alpha = number(j, "alpha");
    if (j.contains("gini_numerator")) {
      c.index_options.gini_numerator = gini_numerator_from_string(text(j, "gini_numerator"));
    }
    if (j.contains("threads")) c.threads = integer<unsigned>(j, "threads");
    validate_config(c);
    return c;
  } catch (const Json::exception& e) {
    parse_fail(std::string("sim config: ") + e.what());
  }
}

Json to_json(const SimConfig& config) {
  return Json{
      {"params", to_json(config.params)},
      {"dist_spec", to_json(config.dist_spec)},
      {"n_agents", config.n_agents},
      {"grid", config.grid},
      {"replications", config.replications},
      {"seed", config.seed},
      {"alpha", config.alpha},
      {"gini_numerator", to_string(config.index_options.gini_numerator)},
      {"threads", config.threads},
  };
}

Json to_json(const CoverageReport& report) {
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    cells.push_back({
        {"index", to_string(c.kind)},
        {"t", c.t},
        {"defined", c.defined},
        {"value_inf", finite_or_null(c.value_inf)},
        {"variance_inf", finite_or_null(c.variance_inf)},
        {"ci_low", finite_or_null(c.ci_low)},
        {"ci_high", finite_or_null(c.ci_high)},
        {"coverage", finite_or_null(c.coverage)},
        {"mean_z", finite_or_null(c.mean_z)},
        {"var_z", finite_or_null(c.var_z)},
        {"n_used", c.n_used},
        {"n_excluded", c.n_excluded},
    });
  }
  return Json{{"n_agents", report.n_agents},
              {"replications", report.replications},
              {"alpha", report.alpha},
              {"seed", report.seed},
              {"cells", cells}};
}

void write_index_csv(std::ostream& out, std::span<const IndexRow> rows, bool with_forecast,
                     bool with_status) {
  out << "kind,t,value,variance,ci_low,ci_high,n,alpha,year";
  if (with_forecast) out << ",forecast";
  if (with_status) out << ",status";
  out << '\n';
  for (const auto& r : rows) {
    out << to_string(r.kind) << ',' << format_number(r.t) << ',' << cell(r.value) << ','
        << cell(r.variance) << ',' << cell(r.ci_low) << ',' << cell(r.ci_high) << ','
        << (r.n ? std::to_string(*r.n) : std::string()) << ',' << cell(r.alpha) << ','
        << cell(r.year);
    if (with_forecast) out << ',' << (r.forecast ? (*r.forecast ? "true" : "false") : "");
    if (with_status) out << ',' << r.status.value_or("");
    out << '\n';
  }
}

std::vector<IndexRow> index_rows(std::span<const IndexSeries> series,
                                 std::optional<int> origin_year) {
  std::vector<IndexRow> rows;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      IndexRow r;
      r.kind = s.kind;
      r.t = p.t;
      r.value = p.value;
      r.variance = p.variance_inf;
      r.ci_low = p.ci_low;
      r.ci_high = p.ci_high;
      r.n = p.n;
      r.alpha = p.alpha;
      if (origin_year) r.year = static_cast<double>(*origin_year) + p.t;
      rows.push_back(r);
    }
  }
  return rows;
}

void write_coverage_csv(std::ostream& out, const CoverageReport& report) {
  out << "index,t,coverage,mean_z,var_z,n_excluded\n";
  for (const auto& c : report.cells) {
    out << to_string(c.kind) << ',' << format_number(c.t) << ',' << format_number(c.coverage) << ','
        << format_number(c.mean_z) << ',' << format_number(c.var_z) << ',' << c.n_excluded << '\n';
  }
}

void write_cohort_csv(std::ostream& out, const CohortRun& run) {
  out << "replication,t,H,I,G,S,status,n1,n2,n3\n";
  for (std::size_t rep = 0; rep < run.replications; ++rep) {
    for (std::size_t k = 0; k < run.grid.size(); ++k) {
      const auto& e = run.at(rep, k);
      const auto& c = run.counts_at(rep, k);
      out << rep << ',' << format_number(run.grid[k]) << ',' << format_number(e.h) << ','
          << cell(e.i) << ',' << cell(e.g) << ',' << cell(e.s) << ',' << to_string(e.status) << ','
          << c.n1 << ',' << c.n2 << ',' << c.n3 << '\n';
    }
  }
}

}  // namespace dynpov
