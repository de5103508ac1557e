#pragma once

#include <optional>
#include <string>
#include <vector>

#include "marlot/harness/episode.hpp"
#include "marlot/marl/checkpoint.hpp"

namespace marlot::harness {

struct RepetitionStats {
  int violations = 0;
  std::vector<int> violation_runs;  // 1-based run numbers
  std::optional<int> top_k;         // run number of the k-th violation
  std::uint64_t trace_hash = 0;     // combined hash of all episode traces
};

struct CampaignReport {
  std::string method, scenario, sut;
  int lanes = 0, budget = 0, repetitions = 0, n_svs = 0;
  int k = 5;
  std::uint64_t seed = 0;
  std::vector<RepetitionStats> reps;
  double violation_rate = 0.0;   // percent, averaged across repetitions
  std::optional<double> top_k;   // averaged where found; absent when fewer
                                 // than half the repetitions find k

  nlohmann::ordered_json to_json() const;
  static CampaignReport from_json(const nlohmann::json& j);
};

/// Fills per-repetition top-k plus the averaged rate and top-k fields from
/// the recorded violation runs.
void compute_campaign_metrics(CampaignReport& report);

/// Runs budget x repetitions episodes of the configured method. `checkpoint`
/// is required for marl_ot and single_rl. When `trace_dir` is non-empty,
/// every episode trace is exported there.
CampaignReport run_campaign(const Config& cfg,
                            const std::optional<marl::Checkpoint>& checkpoint,
                            const std::string& trace_dir = "");

/// Aggregates reports into a road-type by method/lane table (CSV).
std::string reports_to_csv(const std::vector<CampaignReport>& reports);

}  // namespace marlot::harness
