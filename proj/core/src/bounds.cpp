#include "twolaw/bounds.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "twolaw/errors.hpp"

namespace twolaw {

double lambda0(double mass_kg, double t0_joule) {
  if (!(mass_kg > 0.0) || !(t0_joule > 0.0))
    throw InvariantError("lambda0: mass and t0 must be > 0");
  return si::kPlanck / std::sqrt(2.0 * std::numbers::pi * mass_kg * t0_joule);
}

double t0_from_lambda0(double mass_kg, double lambda_m) {
  if (!(mass_kg > 0.0) || !(lambda_m > 0.0))
    throw InvariantError("t0_from_lambda0: mass and lambda must be > 0");
  return si::kPlanck * si::kPlanck /
         (2.0 * std::numbers::pi * mass_kg * lambda_m * lambda_m);
}

Lambda0Max lambda0_max(double mass_kg, double t0_joule, double tau0_s) {
  if (tau0_s < 0.0) throw InvariantError("lambda0_max: tau0 must be >= 0");
  const double l0 = lambda0(mass_kg, t0_joule);
  const double growth = si::kHbar * tau0_s / (2.0 * mass_kg * l0);
  Lambda0Max out;
  out.value = std::sqrt(l0 * l0 + growth * growth);
  out.negligible_growth =
      t0_joule * tau0_s < 4.0 * std::numbers::pi * si::kHbar;
  return out;
}

std::vector<BoundRow> bounds_report(const std::vector<ExperimentRecord>& records) {
  std::vector<BoundRow> rows;
  rows.reserve(records.size());
  for (const ExperimentRecord& rec : records) {
    BoundRow row;
    row.label = rec.label;
    row.mass_kg = rec.mass_kg;
    row.length_m = rec.length_m;
    row.direction = rec.direction;
    row.t0_bound = t0_from_lambda0(rec.mass_kg, rec.length_m);
    row.reference_t0 = rec.reference_t0;
    row.discrepant =
        rec.reference_t0 > 0.0 &&
        std::abs(std::log10(row.t0_bound / rec.reference_t0)) > 0.5;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ExperimentRecord> parse_experiment_records(std::istream& in) {
  std::vector<ExperimentRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) continue;

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      std::size_t a = field.find_first_not_of(" \t");
      std::size_t b = field.find_last_not_of(" \t");
      fields.push_back(a == std::string::npos
                           ? std::string()
                           : field.substr(a, b - a + 1));
    }
    if (fields.size() < 4 || fields.size() > 5) {
      std::ostringstream os;
      os << "experiment records line " << lineno
         << ": expected 'label, mass_kg, length_m, direction[, reference_t0]'";
      throw InvariantError(os.str());
    }
    ExperimentRecord rec;
    rec.label = fields[0];
    try {
      rec.mass_kg = std::stod(fields[1]);
      rec.length_m = std::stod(fields[2]);
    } catch (const std::exception&) {
      std::ostringstream os;
      os << "experiment records line " << lineno << ": bad number";
      throw InvariantError(os.str());
    }
    rec.direction = fields[3];
    if (rec.direction != "upper" && rec.direction != "lower") {
      std::ostringstream os;
      os << "experiment records line " << lineno
         << ": direction must be 'upper' or 'lower'";
      throw InvariantError(os.str());
    }
    if (fields.size() == 5 && !fields[4].empty()) {
      try {
        rec.reference_t0 = std::stod(fields[4]);
      } catch (const std::exception&) {
        std::ostringstream os;
        os << "experiment records line " << lineno << ": bad reference value";
        throw InvariantError(os.str());
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ExperimentRecord> load_experiment_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open experiment records file: " + path);
  return parse_experiment_records(in);
}

}  // namespace twolaw
