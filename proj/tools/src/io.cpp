#include "twolaw_cli/io.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "twolaw/version.hpp"

namespace twolaw::cli {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
  if (!out) throw Error("write failed: " + path);
}

namespace {

std::string sanitize(const std::string& name) {
  std::string s = name;
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
      c = '_';
  return s;
}

}  // namespace

void write_stats_csv(const std::string& dir, const EnsembleStats& stats) {
  for (std::size_t o = 0; o < stats.names.size(); ++o) {
    std::string body = "t,mean,var,n\n";
    for (std::size_t s = 0; s < stats.times.size(); ++s) {
      const Moments& m = stats.moments[o][s];
      body += g17(stats.times[s]);
      body += ',';
      body += g17(m.mean);
      body += ',';
      body += g17(m.variance());
      body += ',';
      body += std::to_string(m.n);
      body += '\n';
    }
    write_text_file(dir + "/obs_" + sanitize(stats.names[o]) + ".csv", body);
  }
}

Json stats_json(const EnsembleStats& stats) {
  Json j;
  j["t"] = stats.times;
  for (std::size_t o = 0; o < stats.names.size(); ++o) {
    Json col;
    std::vector<double> mean, var;
    std::vector<std::int64_t> n;
    for (std::size_t s = 0; s < stats.times.size(); ++s) {
      mean.push_back(stats.moments[o][s].mean);
      var.push_back(stats.moments[o][s].variance());
      n.push_back(stats.moments[o][s].n);
    }
    col["mean"] = mean;
    col["var"] = var;
    col["n"] = n;
    j["observables"][stats.names[o]] = col;
  }
  return j;
}

void write_events_csv(const std::string& dir, const EnsembleStats& stats,
                      const std::vector<std::string>& labels) {
  std::string body = "trajectory,time,selected,label,delta_s,delta_e,weight\n";
  for (const SlimEvent& ev : stats.events) {
    body += std::to_string(ev.trajectory);
    body += ',';
    body += g17(ev.time);
    body += ',';
    body += std::to_string(ev.selected);
    body += ',';
    body += ev.selected >= 0 &&
                    ev.selected < static_cast<int>(labels.size())
                ? labels[static_cast<std::size_t>(ev.selected)]
                : "cell" + std::to_string(ev.selected);
    body += ',';
    body += g17(ev.delta_s);
    body += ',';
    body += g17(ev.delta_e);
    body += ',';
    body += g17(ev.weight);
    body += '\n';
  }
  write_text_file(dir + "/events.csv", body);
}

void write_density_csv(const std::string& dir, const DensitySeries& series) {
  const int d = series.dim();
  std::string body = "t";
  for (int i = 0; i < d; ++i) body += ",rho_" + std::to_string(i) + "_" + std::to_string(i);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      body += ",rho_re_" + std::to_string(i) + "_" + std::to_string(j);
      body += ",rho_im_" + std::to_string(i) + "_" + std::to_string(j);
    }
  body += '\n';
  for (std::size_t s = 0; s < series.times.size(); ++s) {
    body += g17(series.times[s]);
    const MatrixXcd& rho = series.rhos[s];
    for (int i = 0; i < d; ++i) {
      body += ',';
      body += g17(rho(i, i).real());
    }
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        body += ',';
        body += g17(rho(i, j).real());
        body += ',';
        body += g17(rho(i, j).imag());
      }
    body += '\n';
  }
  write_text_file(dir + "/density.csv", body);
}

void write_manifest(const std::string& dir, const ScenarioConfig& config,
                    double resolved_dt_value, std::uint64_t master_seed) {
  Json j;
  j["tool"] = "twolaw";
  j["version"] = kVersion;
  j["config"] = serialize_config(config);
  j["resolved"]["dt"] = resolved_dt_value;
  j["resolved"]["master_seed"] = master_seed;
  j["resolved"]["n_samples"] = config.n_samples;
  j["resolved"]["observables"] = resolved_observables(config);
  write_text_file(dir + "/manifest.json", j.dump(2) + "\n");
}

void write_sweep_csv(const std::string& dir, const std::string& axis,
                     const std::vector<SweepRow>& rows,
                     const std::vector<std::string>& final_obs) {
  std::string body = "axis,value,total_events,event_rate,events_per_traj";
  for (const std::string& name : final_obs) body += ",final_" + sanitize(name);
  body += '\n';
  for (const SweepRow& row : rows) {
    body += axis;
    body += ',';
    body += g17(row.axis_value);
    body += ',';
    body += std::to_string(row.stats.total_events);
    body += ',';
    body += g17(row.stats.event_rate());
    body += ',';
    body += g17(row.stats.events_per_trajectory.mean);
    for (const std::string& name : final_obs) {
      const int o = row.stats.observable_index(name);
      body += ',';
      body += g17(row.stats.moments[static_cast<std::size_t>(o)].back().mean);
    }
    body += '\n';
  }
  write_text_file(dir + "/sweep.csv", body);
}

void write_bounds_csv(const std::string& path,
                      const std::vector<BoundRow>& rows, double tau0_ref_s) {
  std::string body =
      "label,mass_kg,length_m,direction,t0_bound_joule,reference_t0_joule,"
      "discrepant,fluct_power_w\n";
  for (const BoundRow& row : rows) {
    body += row.label;
    body += ',';
    body += g17(row.mass_kg);
    body += ',';
    body += g17(row.length_m);
    body += ',';
    body += row.direction;
    body += ',';
    body += g17(row.t0_bound);
    body += ',';
    body += row.reference_t0 > 0.0 ? g17(row.reference_t0) : "";
    body += ',';
    body += row.discrepant ? "yes" : "no";
    body += ',';
    body += g17(row.t0_bound / tau0_ref_s);
    body += '\n';
  }
  write_text_file(path, body);
}

Json bounds_json(const std::vector<BoundRow>& rows, double tau0_ref_s) {
  Json j;
  j["tau0_reference_s"] = tau0_ref_s;
  j["note"] =
      "t0 bounds from lambda0 = h / sqrt(2 pi m T0); fluct_power_w = "
      "T0 / tau0 with the reference tau0";
  Json list = Json::array();
  for (const BoundRow& row : rows) {
    Json r;
    r["label"] = row.label;
    r["mass_kg"] = row.mass_kg;
    r["length_m"] = row.length_m;
    r["direction"] = row.direction;
    r["t0_bound_joule"] = row.t0_bound;
    if (row.reference_t0 > 0.0) {
      r["reference_t0_joule"] = row.reference_t0;
      r["discrepant"] = row.discrepant;
    }
    r["fluct_power_w"] = row.t0_bound / tau0_ref_s;
    list.push_back(r);
  }
  j["rows"] = list;
  return j;
}

}  // namespace twolaw::cli
