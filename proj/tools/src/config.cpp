#include "twolaw_cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "twolaw/models.hpp"
#include "twolaw/wavepacket.hpp"

namespace twolaw::cli {

namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Entry {
  std::string value;
  int line = 0;
  int col = 0;
  mutable bool used = false;
};

struct RawConfig {
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::vector<ConfigIssue> issues;

  const Entry* find(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.used = true;
    return &k->second;
  }

  void issue(const Entry* e, const std::string& path, const std::string& msg) {
    issues.push_back(
        ConfigIssue{e ? e->line : 0, e ? e->col : 0, path, msg});
  }
};

RawConfig scan(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    std::string body = hash == std::string::npos ? line : line.substr(0, hash);
    const std::string t = trim(body);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3) {
        raw.issues.push_back(ConfigIssue{
            lineno, 1, "", "malformed section header: " + t});
        continue;
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      raw.issues.push_back(
          ConfigIssue{lineno, 1, "", "expected 'key = value': " + t});
      continue;
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) {
      raw.issues.push_back(ConfigIssue{lineno, 1, "", "empty key"});
      continue;
    }
    if (section.empty()) {
      raw.issues.push_back(
          ConfigIssue{lineno, 1, key, "key outside any [section]"});
      continue;
    }
    const int col = static_cast<int>(body.find_first_not_of(" \t", eq + 1)) + 1;
    if (raw.sections[section].count(key)) {
      raw.issues.push_back(ConfigIssue{lineno, col, section + "." + key,
                                       "duplicate key"});
      continue;
    }
    raw.sections[section][key] = Entry{value, lineno, col, false};
  }
  return raw;
}

bool parse_double_token(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_complex_token(const std::string& s, std::complex<double>& out) {
  const std::string t = trim(s);
  if (t.size() < 5 || t.front() != '(' || t.back() != ')') return false;
  const std::size_t comma = t.find(',');
  if (comma == std::string::npos) return false;
  double re, im;
  if (!parse_double_token(trim(t.substr(1, comma - 1)), re)) return false;
  if (!parse_double_token(trim(t.substr(comma + 1, t.size() - comma - 2)), im))
    return false;
  out = {re, im};
  return true;
}

class Fetch {
 public:
  Fetch(RawConfig& raw) : raw_(raw) {}

  double number(const std::string& section, const std::string& key,
                double fallback) {
    const Entry* e = raw_.find(section, key);
    if (!e) return fallback;
    double v;
    if (!parse_double_token(e->value, v)) {
      raw_.issue(e, section + "." + key, "expected a number, got '" + e->value + "'");
      return fallback;
    }
    return v;
  }

  int integer(const std::string& section, const std::string& key,
              int fallback) {
    const double v = number(section, key, fallback);
    if (v != std::floor(v)) {
      raw_.issue(raw_.find(section, key), section + "." + key,
                 "expected an integer");
      return fallback;
    }
    return static_cast<int>(v);
  }

  std::uint64_t unsigned64(const std::string& section, const std::string& key,
                           std::uint64_t fallback) {
    const Entry* e = raw_.find(section, key);
    if (!e) return fallback;
    try {
      std::size_t pos = 0;
      const std::uint64_t v = std::stoull(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      raw_.issue(e, section + "." + key, "expected an unsigned integer");
      return fallback;
    }
  }

  std::string word(const std::string& section, const std::string& key,
                   const std::string& fallback) {
    const Entry* e = raw_.find(section, key);
    return e ? e->value : fallback;
  }

  std::vector<std::string> words(const std::string& section,
                                 const std::string& key) {
    const Entry* e = raw_.find(section, key);
    std::vector<std::string> out;
    if (!e) return out;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (!t.empty()) out.push_back(t);
    }
    return out;
  }

  std::vector<double> numbers(const std::string& section,
                              const std::string& key) {
    const Entry* e = raw_.find(section, key);
    std::vector<double> out;
    if (!e) return out;
    std::stringstream ss(e->value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double v;
      if (!parse_double_token(trim(item), v)) {
        raw_.issue(e, section + "." + key, "bad number '" + trim(item) + "'");
        return out;
      }
      out.push_back(v);
    }
    return out;
  }

  // Whitespace-separated (re,im) groups.
  std::vector<std::complex<double>> complex_list(const std::string& section,
                                                 const std::string& key) {
    const Entry* e = raw_.find(section, key);
    std::vector<std::complex<double>> out;
    if (!e) return out;
    std::string buf;
    int depth = 0;
    auto flush = [&]() {
      if (buf.empty()) return true;
      std::complex<double> z;
      if (!parse_complex_token(buf, z)) {
        raw_.issue(e, section + "." + key, "bad complex entry '" + buf + "'");
        return false;
      }
      out.push_back(z);
      buf.clear();
      return true;
    };
    for (char c : e->value) {
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (std::isspace(static_cast<unsigned char>(c)) && depth == 0) {
        if (!flush()) return out;
      } else {
        buf.push_back(c);
      }
    }
    flush();
    return out;
  }

  bool has(const std::string& section, const std::string& key) const {
    auto s = raw_.sections.find(section);
    return s != raw_.sections.end() && s->second.count(key) > 0;
  }

 private:
  RawConfig& raw_;
};

std::vector<std::string> valid_observable_names(const ScenarioConfig& c);

std::vector<ConfigIssue> validate(const ScenarioConfig& c) {
  std::vector<ConfigIssue> issues;
  auto bad = [&](const std::string& path, const std::string& msg) {
    issues.push_back(ConfigIssue{0, 0, path, msg});
  };

  switch (c.model) {
    case ModelKind::TwoLevel:
    case ModelKind::Cyclic:
      if (!(c.v1 > 0.0)) bad("model.v1", "must be > 0");
      if (c.temperature < 0.0) bad("model.temperature", "must be >= 0");
      if (c.model == ModelKind::Cyclic) {
        if (c.v2 < 0.0) bad("model.v2", "must be >= 0");
        if (c.photon_modes < 1) bad("model.photon_modes", "must be >= 1");
        if (c.band_width < 0.0) bad("model.band_width", "must be >= 0");
      }
      break;
    case ModelKind::Decay:
      if (c.n_band < 10) bad("model.n_band", "must be >= 10");
      if (!(c.bandwidth > 0.0)) bad("model.bandwidth", "must be > 0");
      if (c.coupling < 0.0) bad("model.coupling", "must be >= 0");
      else if (c.coupling > c.bandwidth / 10.0)
        bad("model.coupling", "must be << bandwidth (at most bandwidth/10)");
      break;
    case ModelKind::Wavepacket: {
      if (!(c.mass > 0.0)) bad("model.mass", "must be > 0");
      if (c.grid_n < 8 || (c.grid_n & (c.grid_n - 1)) != 0)
        bad("model.grid_n", "must be a power of two >= 8");
      if (!(c.grid_dx > 0.0)) bad("model.grid_dx", "must be > 0");
      if (c.cell_width < c.grid_dx - 1e-12)
        bad("model.cell_width", "must be >= grid_dx");
      else {
        const double ratio = c.cell_width / c.grid_dx;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
          bad("model.cell_width", "not commensurate with grid_dx");
      }
      if (!(c.sigma > 0.0)) bad("initial.sigma", "must be > 0");
      break;
    }
    case ModelKind::Custom: {
      if (c.dim < 1) bad("model.dim", "must be >= 1");
      if (static_cast<int>(c.e0.size()) != c.dim)
        bad("model.e0", "expected " + std::to_string(c.dim) + " entries");
      if (static_cast<int>(c.h1_rows.size()) != c.dim) {
        bad("model.h1_row", "expected rows h1_row_0 .. h1_row_" +
                                std::to_string(c.dim - 1));
      } else {
        bool shape_ok = true;
        for (int i = 0; i < c.dim; ++i)
          if (static_cast<int>(c.h1_rows[static_cast<std::size_t>(i)].size()) !=
              c.dim) {
            bad("model.h1_row_" + std::to_string(i),
                "expected " + std::to_string(c.dim) + " complex entries");
            shape_ok = false;
          }
        if (shape_ok && c.dim >= 1) {
          double asym = 0.0;
          double scale = 0.0;
          for (int i = 0; i < c.dim; ++i)
            for (int j = 0; j < c.dim; ++j) {
              const auto a = c.h1_rows[static_cast<std::size_t>(i)]
                                      [static_cast<std::size_t>(j)];
              const auto b = std::conj(c.h1_rows[static_cast<std::size_t>(j)]
                                                [static_cast<std::size_t>(i)]);
              asym = std::max(asym, std::abs(a - b));
              scale = std::max(scale, std::abs(a));
            }
          if (asym > 1e-12 * std::max(1.0, scale))
            bad("model.h1",
                "H1 is not Hermitian, max asymmetry " + fmt_double(asym));
        }
      }
      break;
    }
  }

  if (!(c.t0 > 0.0)) bad("collapse.t0", "must be > 0");
  if (c.gamma0 < 0.0) bad("collapse.gamma0", "must be >= 0");

  if (c.model == ModelKind::Cyclic && 2 * (c.photon_modes + 1) > 4096)
    bad("model.photon_modes", "composite dimension exceeds the dense limit");
  if (c.model == ModelKind::Decay && c.n_band + 1 > 4096)
    bad("model.n_band", "dimension exceeds the dense limit");
  if (c.model == ModelKind::Custom && c.dim > 4096)
    bad("model.dim", "dimension exceeds the dense limit");

  const int dim = c.model == ModelKind::TwoLevel ? 2
                  : c.model == ModelKind::Cyclic ? 2 * (c.photon_modes + 1)
                  : c.model == ModelKind::Decay  ? c.n_band + 1
                  : c.model == ModelKind::Custom ? c.dim
                                                 : c.grid_n;

  switch (c.initial) {
    case InitialKind::Gaussian:
      if (c.model != ModelKind::Wavepacket)
        bad("initial.kind", "gaussian requires the wavepacket model");
      break;
    case InitialKind::Canonical:
      if (c.model != ModelKind::TwoLevel)
        bad("initial.kind", "canonical is supported for the two_level model");
      break;
    case InitialKind::Basis:
      if (c.model == ModelKind::Wavepacket)
        bad("initial.kind", "basis requires a discrete model");
      else if (c.initial_index < 0 || c.initial_index >= std::max(dim, 1))
        bad("initial.index", "out of range");
      break;
    case InitialKind::Superposition: {
      if (c.model == ModelKind::Wavepacket) {
        bad("initial.kind", "superposition requires a discrete model");
        break;
      }
      if (static_cast<int>(c.amplitudes.size()) != dim) {
        bad("initial.amplitudes",
            "expected " + std::to_string(dim) + " complex amplitudes");
        break;
      }
      double norm2 = 0.0;
      for (const auto& a : c.amplitudes) norm2 += std::norm(a);
      if (std::abs(norm2 - 1.0) > 1e-6)
        bad("initial.amplitudes",
            "not normalized: |psi|^2 = " + fmt_double(norm2));
      break;
    }
    case InitialKind::Ground:
      if (c.model == ModelKind::Wavepacket)
        bad("initial.kind", "ground requires a discrete model");
      break;
  }

  if (!(c.t_end > 0.0)) bad("integration.t_end", "must be > 0");
  if (c.n_samples < 1 || c.n_samples > 1000000)
    bad("integration.n_samples", "must be in [1, 1e6]");
  if (c.dt < 0.0) bad("integration.dt", "must be >= 0 (0 = auto)");

  if (issues.empty() && c.dt > 0.0) {
    const double scale = std::max(frequency_scale(c), c.gamma0);
    if (c.dt * scale > 0.05 + 1e-12)
      bad("integration.dt", "too large: dt * max(omega0, gamma0) = " +
                                fmt_double(c.dt * scale) + " > 0.05");
    if (c.dt > c.t_end) bad("integration.dt", "exceeds t_end");
  }

  if (c.n_traj < 1) bad("ensemble.n_traj", "must be >= 1");
  if (c.threads < 0) bad("ensemble.threads", "must be >= 0");

  if (issues.empty()) {
    const std::vector<std::string> names = resolved_observables(c);
    if (names.empty()) bad("output.observables", "must be nonempty");
    const std::vector<std::string> valid = valid_observable_names(c);
    for (const std::string& n : names)
      if (std::find(valid.begin(), valid.end(), n) == valid.end())
        bad("output.observables", "unknown observable '" + n + "'");
  }
  return issues;
}

std::vector<std::string> model_labels(const ScenarioConfig& c) {
  switch (c.model) {
    case ModelKind::TwoLevel:
      return {"up", "down"};
    case ModelKind::Cyclic: {
      std::vector<std::string> l;
      for (int p = 0; p <= c.photon_modes; ++p)
        for (const char* s : {"up", "down"})
          l.push_back(std::string(s) +
                      (p == 0 ? "_vac" : "_ph" + std::to_string(p)));
      return l;
    }
    case ModelKind::Decay: {
      std::vector<std::string> l{"unstable"};
      for (int k = 1; k <= c.n_band; ++k) l.push_back("band" + std::to_string(k));
      return l;
    }
    case ModelKind::Custom: {
      std::vector<std::string> l;
      for (int i = 0; i < c.dim; ++i) l.push_back(std::to_string(i));
      return l;
    }
    case ModelKind::Wavepacket:
      return {};
  }
  return {};
}

std::vector<std::string> valid_observable_names(const ScenarioConfig& c) {
  std::vector<std::string> names;
  if (c.model == ModelKind::Wavepacket) {
    names = {"width", "center", "kinetic", "event_count"};
    return names;
  }
  const std::vector<std::string> labels = model_labels(c);
  const int dim = static_cast<int>(labels.size());
  for (int i = 0; i < dim; ++i) {
    names.push_back("pop_" + labels[static_cast<std::size_t>(i)]);
    names.push_back("pop_" + std::to_string(i));
  }
  if (dim <= 8) {
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) {
        names.push_back("coh_re_" + std::to_string(i) + "_" + std::to_string(j));
        names.push_back("coh_im_" + std::to_string(i) + "_" + std::to_string(j));
      }
  }
  names.push_back("entropy");
  names.push_back("event_count");
  names.push_back("survival");
  return names;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error(format(issues)), issues_(std::move(issues)) {}

std::string ConfigError::format(const std::vector<ConfigIssue>& issues) {
  std::ostringstream os;
  os << "configuration invalid (" << issues.size() << " issue"
     << (issues.size() == 1 ? "" : "s") << ")";
  for (const ConfigIssue& i : issues) {
    os << "\n  ";
    if (i.line > 0) os << "line " << i.line << ":" << i.col << " ";
    if (!i.path.empty()) os << i.path << ": ";
    os << i.message;
  }
  return os.str();
}

const char* model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::TwoLevel: return "two_level";
    case ModelKind::Cyclic: return "cyclic";
    case ModelKind::Decay: return "decay";
    case ModelKind::Wavepacket: return "wavepacket";
    case ModelKind::Custom: return "custom";
  }
  return "?";
}

const char* initial_name(InitialKind kind) {
  switch (kind) {
    case InitialKind::Ground: return "ground";
    case InitialKind::Basis: return "basis";
    case InitialKind::Superposition: return "superposition";
    case InitialKind::Canonical: return "canonical";
    case InitialKind::Gaussian: return "gaussian";
  }
  return "?";
}

ScenarioConfig parse_config(const std::string& text, const std::string&) {
  RawConfig raw = scan(text);
  Fetch fetch(raw);
  ScenarioConfig c;

  const std::string type = fetch.word("model", "type", "two_level");
  const Entry* type_entry = nullptr;
  {
    auto s = raw.sections.find("model");
    if (s != raw.sections.end()) {
      auto k = s->second.find("type");
      if (k != s->second.end()) type_entry = &k->second;
    }
  }
  if (type == "two_level") c.model = ModelKind::TwoLevel;
  else if (type == "cyclic") c.model = ModelKind::Cyclic;
  else if (type == "decay") c.model = ModelKind::Decay;
  else if (type == "wavepacket") c.model = ModelKind::Wavepacket;
  else if (type == "custom") c.model = ModelKind::Custom;
  else
    raw.issue(type_entry, "model.type",
              "unknown model '" + type +
                  "' (two_level|cyclic|decay|wavepacket|custom)");

  switch (c.model) {
    case ModelKind::TwoLevel:
      c.v1 = fetch.number("model", "v1", c.v1);
      c.temperature = fetch.number("model", "temperature", c.temperature);
      c.initial = InitialKind::Ground;
      break;
    case ModelKind::Cyclic:
      c.v1 = fetch.number("model", "v1", c.v1);
      c.temperature = fetch.number("model", "temperature", c.temperature);
      c.v2 = fetch.number("model", "v2", c.v2);
      c.photon_modes = fetch.integer("model", "photon_modes", c.photon_modes);
      c.band_width = fetch.number("model", "band_width", c.band_width);
      c.initial = InitialKind::Ground;
      break;
    case ModelKind::Decay:
      c.n_band = fetch.integer("model", "n_band", c.n_band);
      c.bandwidth = fetch.number("model", "bandwidth", c.bandwidth);
      c.coupling = fetch.number("model", "coupling", c.coupling);
      c.initial = InitialKind::Basis;
      c.initial_index = 0;
      break;
    case ModelKind::Wavepacket:
      c.mass = fetch.number("model", "mass", c.mass);
      c.grid_n = fetch.integer("model", "grid_n", c.grid_n);
      c.grid_dx = fetch.number("model", "grid_dx", c.grid_dx);
      c.cell_width = fetch.number("model", "cell_width", c.cell_width);
      c.initial = InitialKind::Gaussian;
      break;
    case ModelKind::Custom:
      c.dim = fetch.integer("model", "dim", 0);
      c.e0 = fetch.numbers("model", "e0");
      for (int i = 0; i < std::max(c.dim, 0); ++i) {
        const std::string key = "h1_row_" + std::to_string(i);
        if (fetch.has("model", key))
          c.h1_rows.push_back(fetch.complex_list("model", key));
        else
          break;
      }
      c.initial = InitialKind::Basis;
      break;
  }

  c.t0 = fetch.number("collapse", "t0", c.t0);
  c.gamma0 = fetch.number("collapse", "gamma0", c.gamma0);

  const std::string init = fetch.word("initial", "kind", initial_name(c.initial));
  if (init == "ground") c.initial = InitialKind::Ground;
  else if (init == "basis") c.initial = InitialKind::Basis;
  else if (init == "superposition") c.initial = InitialKind::Superposition;
  else if (init == "canonical") c.initial = InitialKind::Canonical;
  else if (init == "gaussian") c.initial = InitialKind::Gaussian;
  else
    raw.issue(nullptr, "initial.kind",
              "unknown kind '" + init +
                  "' (ground|basis|superposition|canonical|gaussian)");
  c.initial_index = fetch.integer("initial", "index", c.initial_index);
  c.amplitudes = fetch.complex_list("initial", "amplitudes");
  c.sigma = fetch.number("initial", "sigma", c.sigma);
  c.center = fetch.number("initial", "center", c.center);
  c.momentum = fetch.number("initial", "momentum", c.momentum);

  c.dt = fetch.number("integration", "dt", c.dt);
  c.t_end = fetch.number("integration", "t_end", c.t_end);
  c.n_samples = fetch.integer("integration", "n_samples", c.n_samples);

  c.n_traj = fetch.integer("ensemble", "n_traj", c.n_traj);
  c.master_seed = fetch.unsigned64("ensemble", "master_seed", c.master_seed);
  c.threads = fetch.integer("ensemble", "threads", c.threads);

  c.observables = fetch.words("output", "observables");

  // Unknown keys are reported, not ignored.
  for (const auto& [section, keys] : raw.sections)
    for (const auto& [key, entry] : keys)
      if (!entry.used)
        raw.issues.push_back(ConfigIssue{entry.line, entry.col,
                                         section + "." + key,
                                         "unknown key for this model"});

  std::vector<ConfigIssue> issues = std::move(raw.issues);
  if (issues.empty()) {
    std::vector<ConfigIssue> v = validate(c);
    issues.insert(issues.end(), v.begin(), v.end());
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError({ConfigIssue{0, 0, "", "cannot open file: " + path}});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "[model]\n";
  os << "type = " << model_name(c.model) << "\n";
  switch (c.model) {
    case ModelKind::TwoLevel:
      os << "v1 = " << fmt_double(c.v1) << "\n";
      os << "temperature = " << fmt_double(c.temperature) << "\n";
      break;
    case ModelKind::Cyclic:
      os << "v1 = " << fmt_double(c.v1) << "\n";
      os << "temperature = " << fmt_double(c.temperature) << "\n";
      os << "v2 = " << fmt_double(c.v2) << "\n";
      os << "photon_modes = " << c.photon_modes << "\n";
      os << "band_width = " << fmt_double(c.band_width) << "\n";
      break;
    case ModelKind::Decay:
      os << "n_band = " << c.n_band << "\n";
      os << "bandwidth = " << fmt_double(c.bandwidth) << "\n";
      os << "coupling = " << fmt_double(c.coupling) << "\n";
      break;
    case ModelKind::Wavepacket:
      os << "mass = " << fmt_double(c.mass) << "\n";
      os << "grid_n = " << c.grid_n << "\n";
      os << "grid_dx = " << fmt_double(c.grid_dx) << "\n";
      os << "cell_width = " << fmt_double(c.cell_width) << "\n";
      break;
    case ModelKind::Custom: {
      os << "dim = " << c.dim << "\n";
      os << "e0 = ";
      for (std::size_t i = 0; i < c.e0.size(); ++i)
        os << (i ? ", " : "") << fmt_double(c.e0[i]);
      os << "\n";
      for (std::size_t i = 0; i < c.h1_rows.size(); ++i) {
        os << "h1_row_" << i << " = ";
        for (std::size_t j = 0; j < c.h1_rows[i].size(); ++j)
          os << (j ? " " : "") << "(" << fmt_double(c.h1_rows[i][j].real())
             << "," << fmt_double(c.h1_rows[i][j].imag()) << ")";
        os << "\n";
      }
      break;
    }
  }
  os << "\n[collapse]\n";
  os << "t0 = " << fmt_double(c.t0) << "\n";
  os << "gamma0 = " << fmt_double(c.gamma0) << "\n";
  os << "\n[initial]\n";
  os << "kind = " << initial_name(c.initial) << "\n";
  if (c.initial == InitialKind::Basis)
    os << "index = " << c.initial_index << "\n";
  if (c.initial == InitialKind::Superposition) {
    os << "amplitudes = ";
    for (std::size_t i = 0; i < c.amplitudes.size(); ++i)
      os << (i ? " " : "") << "(" << fmt_double(c.amplitudes[i].real()) << ","
         << fmt_double(c.amplitudes[i].imag()) << ")";
    os << "\n";
  }
  if (c.initial == InitialKind::Gaussian) {
    os << "sigma = " << fmt_double(c.sigma) << "\n";
    os << "center = " << fmt_double(c.center) << "\n";
    os << "momentum = " << fmt_double(c.momentum) << "\n";
  }
  os << "\n[integration]\n";
  os << "dt = " << fmt_double(c.dt) << "\n";
  os << "t_end = " << fmt_double(c.t_end) << "\n";
  os << "n_samples = " << c.n_samples << "\n";
  os << "\n[ensemble]\n";
  os << "n_traj = " << c.n_traj << "\n";
  os << "master_seed = " << c.master_seed << "\n";
  os << "threads = " << c.threads << "\n";
  os << "\n[output]\n";
  os << "observables = ";
  const std::vector<std::string> names = resolved_observables(c);
  for (std::size_t i = 0; i < names.size(); ++i)
    os << (i ? ", " : "") << names[i];
  os << "\n";
  return os.str();
}

double frequency_scale(const ScenarioConfig& c) {
  switch (c.model) {
    case ModelKind::TwoLevel:
      return 2.0 * c.v1;
    case ModelKind::Cyclic: {
      // Propagation is exact; dt only has to resolve the emission transfer
      // and the collapse gate.
      if (c.v2 > 0.0) {
        const CyclicModel model(c.v1, c.v2, c.photon_modes, c.band_width);
        return 1.0 / model.tau();
      }
      return 2.0 * c.v1;
    }
    case ModelKind::Decay: {
      if (c.gamma0 > 0.0 && c.coupling > 0.0) {
        const DecayModel model(c.n_band, c.bandwidth, c.coupling);
        return model.golden_rule_rate(CollapseParams(
            c.t0 > 0.0 ? c.t0 : 1.0, c.gamma0));
      }
      return c.bandwidth / 2.0;
    }
    case ModelKind::Wavepacket:
      return 1.0 / (2.0 * c.mass * c.sigma * c.sigma) +
             c.momentum * c.momentum / (2.0 * c.mass);
    case ModelKind::Custom: {
      double lo = 0.0, hi = 0.0, row = 0.0;
      for (double e : c.e0) {
        lo = std::min(lo, e);
        hi = std::max(hi, e);
      }
      for (const auto& r : c.h1_rows) {
        double acc = 0.0;
        for (const auto& z : r) acc += std::abs(z);
        row = std::max(row, acc);
      }
      return (hi - lo) + 2.0 * row;
    }
  }
  return 1.0;
}

double resolved_dt(const ScenarioConfig& c) {
  if (c.dt > 0.0) return c.dt;
  const double scale = std::max({frequency_scale(c), c.gamma0, 1e-6});
  return std::min(0.01 / scale, c.t_end);
}

std::vector<std::string> resolved_observables(const ScenarioConfig& c) {
  std::vector<std::string> requested = c.observables;
  if (requested.empty()) {
    switch (c.model) {
      case ModelKind::TwoLevel:
        requested = {"populations", "coherences", "events"};
        break;
      case ModelKind::Cyclic:
        requested = {"pop_up_vac", "pop_down_vac", "events"};
        break;
      case ModelKind::Decay:
        requested = {"survival", "events"};
        break;
      case ModelKind::Wavepacket:
        requested = {"width", "center", "kinetic", "events"};
        break;
      case ModelKind::Custom:
        requested = {"populations", "events"};
        break;
    }
  }
  const int dim = c.model == ModelKind::TwoLevel ? 2
                  : c.model == ModelKind::Cyclic ? 2 * (c.photon_modes + 1)
                  : c.model == ModelKind::Decay  ? c.n_band + 1
                  : c.model == ModelKind::Custom ? c.dim
                                                 : 0;
  std::vector<std::string> out;
  auto push = [&](const std::string& n) {
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  };
  for (const std::string& name : requested) {
    if (name == "events") {
      push("event_count");
    } else if (name == "populations" && dim > 0 && dim <= 8) {
      for (int i = 0; i < dim; ++i) push("pop_" + std::to_string(i));
    } else if (name == "coherences" && dim > 0 && dim <= 4) {
      for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
          push("coh_re_" + std::to_string(i) + "_" + std::to_string(j));
          push("coh_im_" + std::to_string(i) + "_" + std::to_string(j));
        }
    } else {
      push(name);
    }
  }
  return out;
}

}  // namespace twolaw::cli
