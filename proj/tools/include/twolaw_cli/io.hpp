#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "twolaw/bounds.hpp"
#include "twolaw/density.hpp"
#include "twolaw/ensemble.hpp"
#include "twolaw_cli/config.hpp"

namespace twolaw::cli {

using Json = nlohmann::ordered_json;

/// 17 significant digits; the determinism contract for all emitted numbers.
std::string g17(double x);

void ensure_directory(const std::string& dir);
void write_text_file(const std::string& path, const std::string& content);

/// One CSV per observable: t,mean,var,n.
void write_stats_csv(const std::string& dir, const EnsembleStats& stats);

/// stats.json mirror of the per-observable CSVs.
Json stats_json(const EnsembleStats& stats);

/// events.csv: trajectory,time,selected,label,delta_s,delta_e,weight.
void write_events_csv(const std::string& dir, const EnsembleStats& stats,
                      const std::vector<std::string>& labels);

/// Deterministic companion series: density.csv with t, rho_i_i, rho_re_i_j,
/// rho_im_i_j (i < j).
void write_density_csv(const std::string& dir, const DensitySeries& series);

void write_manifest(const std::string& dir, const ScenarioConfig& config,
                    double resolved_dt_value, std::uint64_t master_seed);

void write_sweep_csv(const std::string& dir, const std::string& axis,
                     const std::vector<SweepRow>& rows,
                     const std::vector<std::string>& final_obs);

void write_bounds_csv(const std::string& path,
                      const std::vector<BoundRow>& rows, double tau0_ref_s);
Json bounds_json(const std::vector<BoundRow>& rows, double tau0_ref_s);

}  // namespace twolaw::cli
