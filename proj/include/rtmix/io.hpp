#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rtmix/crossval.hpp"
#include "rtmix/diagnostics.hpp"
#include "rtmix/model.hpp"
#include "rtmix/sampler.hpp"
#include "rtmix/simulate.hpp"

namespace rtmix {

// `chain,iter,<coordinate names...>` with 1-based chain and iteration.
void write_draws_csv(const PosteriorDraws& draws, std::ostream& out);

// {"<coordinate>": {"rhat": r, "ess": n}, ..., "divergences": [...],
//  "warnings": [...]}. Non-finite numbers are written as null.
std::string diagnostics_json(const Diagnostics& diagnostics);

// JSON array of coordinate names.
std::string names_json(const std::vector<std::string>& names);

struct SummaryRow {
  std::string name;
  double mean = 0.0;
  double lower = 0.0;  // 2.5% draw quantile
  double upper = 0.0;  // 97.5% draw quantile
};

// Population-level parameters (random effects omitted); the mixture model
// also gets a derived p_sr-p_or row.
std::vector<SummaryRow> summarize(const PosteriorDraws& draws, ModelKind kind);
std::string summary_table(const std::vector<SummaryRow>& rows);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);

std::string report_json(const ElpdReport& report);
std::string comparison_json(const ElpdComparison& comparison);

// Two-row "elpd (SE)" table followed by the difference and the winner.
std::string elpd_table(const ElpdReport& a, const ElpdReport& b,
                       const ElpdComparison& comparison);

std::string recovery_json(const RecoveryReport& report);
std::string ppc_json(const PpcSummary& summary);
// `replicate,draw,condition,median,log_sd,q90`
void write_ppc_csv(const PpcSummary& summary, std::ostream& out);
std::string ppc_table(const PpcSummary& summary);

}  // namespace rtmix
