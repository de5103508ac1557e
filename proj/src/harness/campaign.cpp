#include "marlot/harness/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "marlot/baselines/nsga2.hpp"
#include "marlot/fuzzer/orchestrator.hpp"

namespace marlot::harness {

namespace {

std::uint64_t combine_hash(std::uint64_t acc, std::uint64_t h) {
  acc ^= h + 0x9e3779b97f4a7c15ULL + (acc << 6) + (acc >> 2);
  return acc;
}

struct EpisodeDriver {
  const Config& cfg;
  const sim::RoadNetwork& net;
  const std::optional<marl::Checkpoint>& ckpt;
  SutPolicy sut;

  EpisodeResult run(int rep, int episode, Rng& rng, RepetitionStats& stats,
                    const std::string& trace_dir,
                    const std::vector<std::vector<Maneuver>>* chromosome) {
    SvController controller = make_controller(chromosome);
    nlohmann::ordered_json extra;
    extra["campaign_seed"] = cfg.seed;
    extra["repetition"] = rep;
    extra["episode"] = episode;
    EpisodeResult result = run_episode(cfg, net, sut, controller, rng, extra);

    std::string ref = "rep" + std::to_string(rep) + "/ep" + std::to_string(episode);
    if (!trace_dir.empty()) {
      const std::string name = cfg.method + "_r" + std::to_string(rep) + "_e" +
                               std::to_string(episode) + ".jsonl";
      const auto path = std::filesystem::path(trace_dir) / name;
      if (result.violation.has_value()) {
        result.violation->trace_ref = name;
        result.trace.violation = result.violation;
      }
      export_trace(result.trace, path.string());
      ref = name;
    }
    if (result.violation.has_value() && result.violation->trace_ref.empty()) {
      result.violation->trace_ref = ref;
      result.trace.violation = result.violation;
    }
    stats.trace_hash = combine_hash(stats.trace_hash, result.trace.hash());
    return result;
  }

 private:
  SvController make_controller(
      const std::vector<std::vector<Maneuver>>* chromosome) {
    if (cfg.method == "random") {
      return [](const sim::WorldState& world, const sim::RoadNetwork&,
                Rng& r) {
        std::vector<fuzzer::SvDirective> out(world.surrounding.size());
        for (auto& d : out) {
          d.maneuver = baselines::random_maneuver(r);
          d.owner = fuzzer::OwnerKind::Marl;
        }
        return out;
      };
    }
    if (cfg.method == "ga") {
      const auto genes = *chromosome;  // copy: controller outlives caller loop
      return [genes](const sim::WorldState& world, const sim::RoadNetwork&,
                     Rng&) {
        std::vector<fuzzer::SvDirective> out(world.surrounding.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
          const auto& seq = genes[i];
          const std::size_t t =
              std::min<std::size_t>(world.step, seq.size() - 1);
          out[i].maneuver = seq[t];
          out[i].owner = fuzzer::OwnerKind::Marl;
        }
        return out;
      };
    }
    // marl_ot and single_rl share the orchestrator; single_rl disables the
    // rule-based patterns.
    fuzzer::FuzzerConfig fz = cfg.fuzzer;
    if (cfg.method == "single_rl") fz.patterns_enabled = false;
    auto orch =
        std::make_shared<fuzzer::Orchestrator>(*ckpt, cfg.n_svs, fz);
    return [orch](const sim::WorldState& world, const sim::RoadNetwork& n,
                  Rng& r) { return orch->step(world, n, r); };
  }
};

}  // namespace

CampaignReport run_campaign(const Config& cfg,
                            const std::optional<marl::Checkpoint>& checkpoint,
                            const std::string& trace_dir) {
  if ((cfg.method == "marl_ot" || cfg.method == "single_rl") &&
      !checkpoint.has_value()) {
    throw ConfigError("method " + cfg.method + " requires a checkpoint");
  }
  if (!trace_dir.empty()) {
    std::filesystem::create_directories(trace_dir);
  }

  const auto blocks = scenario_blocks(cfg.scenario, cfg.seed);
  const auto net =
      build_road(blocks, cfg.lanes, Rng::derive(cfg.seed, 7).next_u64());

  CampaignReport report;
  report.method = cfg.method;
  report.scenario = cfg.scenario;
  report.sut = cfg.sut;
  report.lanes = cfg.lanes;
  report.budget = cfg.budget;
  report.repetitions = cfg.repetitions;
  report.n_svs = cfg.n_svs;
  report.seed = cfg.seed;

  EpisodeDriver driver{cfg, net, checkpoint, make_sut_policy(cfg)};

  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    RepetitionStats stats;
    Rng rep_rng = Rng::derive(cfg.seed, 100 + static_cast<std::uint64_t>(rep));

    if (cfg.method == "ga") {
      const int cap = episode_step_cap(cfg, net);
      Rng ga_rng = Rng::derive(cfg.seed, 500 + static_cast<std::uint64_t>(rep));
      const auto evaluator = [&](const baselines::Chromosome& c,
                                 int episode_index) {
        Rng ep_rng = Rng::derive(
            rep_rng.next_u64(), static_cast<std::uint64_t>(episode_index));
        const auto result = driver.run(rep, episode_index, ep_rng, stats,
                                       trace_dir, &c.genes);
        baselines::GaEpisodeOutcome out;
        out.violation = result.violation.has_value();
        out.min_gap = result.min_ego_clearance;
        return out;
      };
      const auto ga_result = baselines::ga_run(cfg.n_svs, cap, cfg.budget,
                                               evaluator, cfg.ga, ga_rng);
      for (std::size_t e = 0; e < ga_result.violations.size(); ++e) {
        if (ga_result.violations[e]) {
          stats.violations += 1;
          stats.violation_runs.push_back(static_cast<int>(e) + 1);
        }
      }
    } else {
      for (int e = 0; e < cfg.budget; ++e) {
        Rng ep_rng =
            Rng::derive(rep_rng.next_u64(), static_cast<std::uint64_t>(e));
        const auto result =
            driver.run(rep, e, ep_rng, stats, trace_dir, nullptr);
        if (result.violation.has_value()) {
          stats.violations += 1;
          stats.violation_runs.push_back(e + 1);
        }
      }
    }

    report.reps.push_back(std::move(stats));
  }

  compute_campaign_metrics(report);
  return report;
}

void compute_campaign_metrics(CampaignReport& report) {
  double rate_acc = 0.0;
  int found = 0;
  double top_acc = 0.0;
  for (auto& rep : report.reps) {
    rep.violations = static_cast<int>(rep.violation_runs.size());
    rep.top_k.reset();
    if (rep.violations >= report.k) {
      rep.top_k = rep.violation_runs[report.k - 1];
    }
    rate_acc += 100.0 * rep.violations / report.budget;
    if (rep.top_k.has_value()) {
      found += 1;
      top_acc += *rep.top_k;
    }
  }
  report.violation_rate =
      report.reps.empty() ? 0.0 : rate_acc / report.repetitions;
  report.top_k.reset();
  if (found > 0 && found * 2 >= report.repetitions) {
    report.top_k = top_acc / found;
  }
}

nlohmann::ordered_json CampaignReport::to_json() const {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["scenario"] = scenario;
  j["sut"] = sut;
  j["lanes"] = lanes;
  j["budget"] = budget;
  j["repetitions"] = repetitions;
  j["n_svs"] = n_svs;
  j["k"] = k;
  j["seed"] = seed;
  j["violation_rate"] = violation_rate;
  if (top_k.has_value()) {
    j["top_k"] = *top_k;
  } else {
    j["top_k"] = nullptr;
  }
  auto reps_json = nlohmann::ordered_json::array();
  for (const auto& rep : reps) {
    nlohmann::ordered_json r;
    r["violations"] = rep.violations;
    r["violation_runs"] = rep.violation_runs;
    if (rep.top_k.has_value()) {
      r["top_k"] = *rep.top_k;
    } else {
      r["top_k"] = nullptr;
    }
    r["trace_hash"] = rep.trace_hash;
    reps_json.push_back(std::move(r));
  }
  j["reps"] = reps_json;
  return j;
}

CampaignReport CampaignReport::from_json(const nlohmann::json& j) {
  CampaignReport report;
  report.method = j.at("method").get<std::string>();
  report.scenario = j.at("scenario").get<std::string>();
  report.sut = j.at("sut").get<std::string>();
  report.lanes = j.at("lanes").get<int>();
  report.budget = j.at("budget").get<int>();
  report.repetitions = j.at("repetitions").get<int>();
  report.n_svs = j.at("n_svs").get<int>();
  report.k = j.at("k").get<int>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.violation_rate = j.at("violation_rate").get<double>();
  if (!j.at("top_k").is_null()) {
    report.top_k = j.at("top_k").get<double>();
  }
  for (const auto& r : j.at("reps")) {
    RepetitionStats stats;
    stats.violations = r.at("violations").get<int>();
    stats.violation_runs = r.at("violation_runs").get<std::vector<int>>();
    if (!r.at("top_k").is_null()) stats.top_k = r.at("top_k").get<int>();
    stats.trace_hash = r.at("trace_hash").get<std::uint64_t>();
    report.reps.push_back(std::move(stats));
  }
  return report;
}

std::string reports_to_csv(const std::vector<CampaignReport>& reports) {
  // rows: road type; columns: (method, lanes, sut) pairs found in the input
  std::set<std::string> scenarios;
  std::set<std::string> columns;
  std::map<std::string, const CampaignReport*> cell;
  for (const auto& r : reports) {
    scenarios.insert(r.scenario);
    const std::string col =
        r.method + "_L" + std::to_string(r.lanes) + "_" + r.sut;
    columns.insert(col);
    cell[r.scenario + "|" + col] = &r;
  }
  std::ostringstream os;
  os << "road_type";
  for (const auto& col : columns) {
    os << "," << col << "_rate," << col << "_top5";
  }
  os << "\n";
  for (const auto& sc : scenarios) {
    os << sc;
    for (const auto& col : columns) {
      const auto it = cell.find(sc + "|" + col);
      if (it == cell.end()) {
        os << ",,";
        continue;
      }
      os << "," << it->second->violation_rate << ",";
      if (it->second->top_k.has_value()) {
        os << *it->second->top_k;
      } else {
        os << "None";
      }
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace marlot::harness
