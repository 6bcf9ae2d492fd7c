#include "rtmix/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rtmix/format.hpp"

namespace rtmix {

namespace {

using Json = nlohmann::ordered_json;

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& values) {
  Json out = Json::array();
  for (double v : values) out.push_back(number(v));
  return out;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string lpad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

void write_draws_csv(const PosteriorDraws& draws, std::ostream& out) {
  out << "chain,iter";
  for (const auto& name : draws.names()) out << ',' << name;
  out << '\n';
  for (std::size_t c = 0; c < draws.n_chains(); ++c) {
    for (std::size_t s = 0; s < draws.n_samples(); ++s) {
      out << c + 1 << ',' << s + 1;
      for (double v : draws.row(c, s)) out << ',' << format_double(v);
      out << '\n';
    }
  }
}

std::string diagnostics_json(const Diagnostics& d) {
  Json j = Json::object();
  for (std::size_t k = 0; k < d.names.size(); ++k)
    j[d.names[k]] = {{"rhat", number(d.rhat[k])}, {"ess", number(d.ess[k])}};
  j["divergences"] = d.divergences;
  j["warnings"] = d.warnings;
  return j.dump(2) + "\n";
}

std::string names_json(const std::vector<std::string>& names) {
  return Json(names).dump() + "\n";
}

std::vector<SummaryRow> summarize(const PosteriorDraws& draws, ModelKind kind) {
  const std::size_t n_population = kind == ModelKind::Linear ? 5 : 8;
  auto row_of = [](std::string name, std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return SummaryRow{std::move(name), mean(v), quantile_sorted(v, 0.025),
                      quantile_sorted(v, 0.975)};
  };
  std::vector<SummaryRow> rows;
  for (std::size_t k = 0; k < n_population && k < draws.n_coordinates(); ++k)
    rows.push_back(row_of(draws.names()[k], draws.pooled(k)));
  if (kind == ModelKind::Mixture && draws.n_coordinates() >= n_population) {
    const auto sr = draws.pooled(draws.index_of("p_sr"));
    const auto orr = draws.pooled(draws.index_of("p_or"));
    std::vector<double> diff(sr.size());
    for (std::size_t s = 0; s < sr.size(); ++s) diff[s] = sr[s] - orr[s];
    rows.insert(rows.begin() + 2, row_of("p_sr-p_or", std::move(diff)));
  }
  return rows;
}

std::string summary_table(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << pad("", 16) << lpad("mean", 8) << lpad("lower", 8) << lpad("upper", 8)
      << '\n';
  for (const auto& r : rows)
    out << pad(r.name, 16) << lpad(format_fixed(r.mean, 2), 8)
        << lpad(format_fixed(r.lower, 2), 8) << lpad(format_fixed(r.upper, 2), 8)
        << '\n';
  return out.str();
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "parameter,mean,lower,upper\n";
  for (const auto& r : rows)
    out << r.name << ',' << format_double(r.mean) << ',' << format_double(r.lower)
        << ',' << format_double(r.upper) << '\n';
}

std::string report_json(const ElpdReport& r) {
  Json j;
  j["model"] = r.model;
  j["total"] = number(r.total);
  j["se"] = number(r.se_total);
  j["pointwise"] = numbers(r.pointwise);
  j["warnings"] = r.warnings;
  char plan[19];
  std::snprintf(plan, sizeof plan, "%016llx",
                static_cast<unsigned long long>(r.plan_fingerprint));
  j["fold_plan"] = plan;
  return j.dump(2) + "\n";
}

std::string comparison_json(const ElpdComparison& c) {
  Json j;
  j["model_a"] = c.model_a;
  j["model_b"] = c.model_b;
  j["diff"] = number(c.diff);
  j["se_diff"] = number(c.se_diff);
  j["winner"] = c.winner();
  j["pointwise_diff"] = numbers(c.pointwise_diff);
  return j.dump(2) + "\n";
}

std::string elpd_table(const ElpdReport& a, const ElpdReport& b,
                       const ElpdComparison& c) {
  auto cell = [](double v, double se) {
    return format_fixed(v, 0) + " (" + format_fixed(se, 0) + ")";
  };
  std::ostringstream out;
  out << pad("model", 12) << "elpd (SE)\n";
  out << pad(a.model, 12) << cell(a.total, a.se_total) << '\n';
  out << pad(b.model, 12) << cell(b.total, b.se_total) << '\n';
  out << pad("difference", 12) << cell(c.diff, c.se_diff) << "  ("
      << c.model_a << " - " << c.model_b << ")\n";
  out << "winner: " << c.winner() << '\n';
  return out.str();
}

std::string recovery_json(const RecoveryReport& r) {
  Json j;
  j["level"] = r.level;
  j["coverage_rate"] = number(r.coverage_rate);
  Json params = Json::array();
  for (const auto& p : r.parameters)
    params.push_back({{"name", p.name},
                      {"true", number(p.truth)},
                      {"mean", number(p.mean)},
                      {"lower", number(p.lower)},
                      {"upper", number(p.upper)},
                      {"covered", p.covered}});
  j["parameters"] = params;
  return j.dump(2) + "\n";
}

std::string ppc_json(const PpcSummary& s) {
  Json j;
  j["model"] = s.model;
  j["replicates"] = s.replicates;
  Json stats = Json::array();
  for (const auto& st : s.statistics)
    stats.push_back({{"condition", std::string(condition_label(st.condition))},
                     {"statistic", st.statistic},
                     {"observed", number(st.observed)},
                     {"replicate_mean", number(st.replicate_mean)},
                     {"replicate_lower", number(st.replicate_lower)},
                     {"replicate_upper", number(st.replicate_upper)},
                     {"p_upper", number(st.p_upper)},
                     {"extreme", st.extreme}});
  j["statistics"] = stats;
  return j.dump(2) + "\n";
}

void write_ppc_csv(const PpcSummary& s, std::ostream& out) {
  out << "replicate,draw,condition,median,log_sd,q90\n";
  for (const auto& r : s.replicate_statistics) {
    out << r.replicate + 1 << ',' << r.draw + 1 << ',' << condition_label(r.condition)
        << ',' << format_double(r.median) << ',' << format_double(r.log_sd) << ','
        << format_double(r.q90) << '\n';
  }
}

std::string ppc_table(const PpcSummary& s) {
  std::ostringstream out;
  out << pad("condition", 11) << pad("statistic", 11) << lpad("observed", 10)
      << lpad("lower", 10) << lpad("upper", 10) << lpad("p_upper", 9) << '\n';
  for (const auto& st : s.statistics) {
    const int decimals = st.statistic == "log_sd" ? 3 : 1;
    out << pad(std::string(condition_label(st.condition)), 11)
        << pad(st.statistic, 11) << lpad(format_fixed(st.observed, decimals), 10)
        << lpad(format_fixed(st.replicate_lower, decimals), 10)
        << lpad(format_fixed(st.replicate_upper, decimals), 10)
        << lpad(format_fixed(st.p_upper, 3), 9) << (st.extreme ? "  *" : "")
        << '\n';
  }
  return out.str();
}

}  // namespace rtmix
