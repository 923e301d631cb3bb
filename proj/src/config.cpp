#include "tailest/config.hpp"

#include "tailest/io.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace tailest {

namespace {

void cfg_fail(const std::string& msg) { throw std::invalid_argument(msg); }

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

scalar_t to_scalar(const std::string& section, const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const scalar_t v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    cfg_fail("[" + section + "] " + key + ": cannot parse number '" + value + "'");
  }
  return 0.0;
}

scalar_t need_scalar(const ConfigSection& s, const std::string& key) {
  const std::string* v = s.find(key);
  if (!v) cfg_fail("[" + s.name + "] missing key '" + key + "'");
  return to_scalar(s.name, key, *v);
}

scalar_t opt_scalar(const ConfigSection& s, const std::string& key, scalar_t fallback) {
  const std::string* v = s.find(key);
  return v ? to_scalar(s.name, key, *v) : fallback;
}

std::string need_string(const ConfigSection& s, const std::string& key) {
  const std::string* v = s.find(key);
  if (!v) cfg_fail("[" + s.name + "] missing key '" + key + "'");
  return *v;
}

std::vector<count_t> parse_n_grid(const ConfigSection& s, const std::string& value) {
  std::vector<count_t> grid;
  std::string item;
  std::stringstream ss(value);
  while (std::getline(ss, item, ',')) {
    std::stringstream inner(item);
    std::string piece;
    while (inner >> piece) {
      try {
        grid.push_back(std::stoll(piece));
      } catch (const std::exception&) {
        cfg_fail("[" + s.name + "] n_grid: cannot parse '" + piece + "'");
      }
    }
  }
  if (grid.empty()) cfg_fail("[" + s.name + "] n_grid is empty");
  return grid;
}

}  // namespace

const std::string* ConfigSection::find(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return &v;
  }
  return nullptr;
}

ConfigFile ConfigFile::parse(const std::string& text, const std::string& origin) {
  ConfigFile file;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  ConfigSection* current = nullptr;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') {
        cfg_fail(origin + ": line " + std::to_string(line_no) + ": unterminated section header");
      }
      file.sections.push_back({trim(body.substr(1, body.size() - 2)), {}});
      current = &file.sections.back();
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      cfg_fail(origin + ": line " + std::to_string(line_no) + ": expected key = value");
    }
    if (!current) {
      cfg_fail(origin + ": line " + std::to_string(line_no) + ": key outside any section");
    }
    current->entries.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
  }
  return file;
}

std::string ConfigFile::serialize() const {
  std::ostringstream os;
  for (const auto& section : sections) {
    os << "[" << section.name << "]\n";
    for (const auto& [k, v] : section.entries) os << k << " = " << v << "\n";
    os << "\n";
  }
  return os.str();
}

DistributionModel model_from_section(const ConfigSection& section) {
  const std::string kind = need_string(section, "kind");
  if (kind == "pareto") {
    return DistributionModel::exact_pareto(need_scalar(section, "alpha"),
                                           need_scalar(section, "C"));
  }
  if (kind == "perturbed") {
    return DistributionModel::perturbed_pareto(need_scalar(section, "alpha"),
                                               need_scalar(section, "beta"),
                                               need_scalar(section, "C"),
                                               need_scalar(section, "c"));
  }
  if (kind == "piecewise") {
    return DistributionModel::piecewise_lb(need_scalar(section, "alpha"),
                                           need_scalar(section, "t"),
                                           need_scalar(section, "K"));
  }
  cfg_fail("[" + section.name + "] unknown model kind '" + kind + "'");
  throw std::logic_error("unreachable");
}

SecondOrderParams params_from_section(const ConfigSection& section) {
  SecondOrderParams p;
  p.alpha = need_scalar(section, "alpha");
  p.beta = need_scalar(section, "beta");
  p.C = need_scalar(section, "C");
  p.Cprime = need_scalar(section, "Cprime");
  p.validate();
  return p;
}

namespace {

MethodSpec method_from_section(const ConfigSection& section, const SecondOrderParams& truth) {
  MethodSpec spec;
  const std::string kind = need_string(section, "kind");
  if (const std::string* label = section.find("label")) spec.label = *label;
  if (kind == "fixed_k") {
    spec.kind = MethodSpec::Kind::FixedK;
    spec.k = static_cast<int>(need_scalar(section, "k"));
  } else if (kind == "oracle") {
    spec.kind = MethodSpec::Kind::OracleK;
  } else if (kind == "consistency") {
    spec.kind = MethodSpec::Kind::ConsistencyK;
  } else if (kind == "rough_plugin") {
    spec.kind = MethodSpec::Kind::RoughPlugin;
    spec.beta = need_scalar(section, "beta");
  } else if (kind == "adaptive") {
    spec.kind = MethodSpec::Kind::Adaptive;
    spec.adaptive.delta = need_scalar(section, "delta");
    const std::string* a = section.find("A");
    if (!a) cfg_fail("[method] adaptive requires A = <number> or A = auto");
    if (*a == "auto") {
      spec.adaptive.A = threshold_A(spec.adaptive.delta, truth);
    } else {
      spec.adaptive.A = to_scalar(section.name, "A", *a);
    }
    spec.adaptive.count_floor_multiplier = opt_scalar(section, "count_floor_multiplier", 24.0);
    spec.adaptive.validate();
  } else if (kind == "hill") {
    spec.kind = MethodSpec::Kind::Hill;
    spec.r = need_scalar(section, "r");
  } else if (kind == "generalized") {
    spec.kind = MethodSpec::Kind::Generalized;
    spec.u = need_scalar(section, "u");
    spec.v = need_scalar(section, "v");
  } else if (kind == "quantile_dual") {
    spec.kind = MethodSpec::Kind::QuantileDual;
    spec.q_u = need_scalar(section, "q_u");
    spec.q_v = need_scalar(section, "q_v");
  } else {
    cfg_fail("[method] unknown kind '" + kind + "'");
  }
  return spec;
}

}  // namespace

RunConfig RunConfig::from_config(const ConfigFile& file, std::optional<seed_t> seed_override) {
  const ConfigSection* experiment = nullptr;
  const ConfigSection* model = nullptr;
  const ConfigSection* truth = nullptr;
  std::vector<const ConfigSection*> methods;
  for (const auto& section : file.sections) {
    if (section.name == "experiment") experiment = &section;
    else if (section.name == "model") model = &section;
    else if (section.name == "truth") truth = &section;
    else if (section.name == "method") methods.push_back(&section);
    else cfg_fail("unknown section [" + section.name + "]");
  }
  if (!experiment) cfg_fail("missing [experiment] section");
  if (!model) cfg_fail("missing [model] section");
  if (!truth) cfg_fail("missing [truth] section");
  if (methods.empty()) cfg_fail("at least one [method] section is required");

  RunConfig run;
  run.experiment.model = model_from_section(*model);
  run.experiment.truth = params_from_section(*truth);

  // Reproducibility is seed-driven: a missing base_seed is an error, never
  // replaced by wall-clock time.
  if (seed_override) {
    run.experiment.base_seed = *seed_override;
  } else {
    const std::string* seed = experiment->find("base_seed");
    if (!seed) cfg_fail("[experiment] missing base_seed (wall-clock seeding is not supported)");
    try {
      run.experiment.base_seed = std::stoull(*seed);
    } catch (const std::exception&) {
      cfg_fail("[experiment] base_seed: cannot parse '" + *seed + "'");
    }
  }
  run.experiment.trials = static_cast<int>(need_scalar(*experiment, "trials"));
  run.experiment.n_grid = parse_n_grid(*experiment, need_string(*experiment, "n_grid"));
  for (const auto* section : methods) {
    run.experiment.methods.push_back(method_from_section(*section, run.experiment.truth));
  }
  run.experiment.validate();
  return run;
}

RunConfig RunConfig::from_file(const std::string& path, std::optional<seed_t> seed_override) {
  return from_config(ConfigFile::parse(read_text_file(path), path), seed_override);
}

ConfigFile RunConfig::resolved() const {
  ConfigFile file;
  const auto scalar_entry = [](const std::string& k, scalar_t v) {
    return std::make_pair(k, fmt_g17(v));
  };

  ConfigSection exp{"experiment", {}};
  exp.entries.emplace_back("base_seed", std::to_string(experiment.base_seed));
  exp.entries.emplace_back("trials", std::to_string(experiment.trials));
  std::string grid;
  for (size_t i = 0; i < experiment.n_grid.size(); ++i) {
    if (i) grid += ", ";
    grid += std::to_string(experiment.n_grid[i]);
  }
  exp.entries.emplace_back("n_grid", grid);
  file.sections.push_back(std::move(exp));

  ConfigSection model{"model", {}};
  const auto& m = experiment.model;
  switch (m.kind()) {
    case DistributionModel::Kind::ExactPareto:
      model.entries.emplace_back("kind", "pareto");
      model.entries.push_back(scalar_entry("alpha", m.alpha()));
      model.entries.push_back(scalar_entry("C", m.C()));
      break;
    case DistributionModel::Kind::PerturbedPareto:
      model.entries.emplace_back("kind", "perturbed");
      model.entries.push_back(scalar_entry("alpha", m.alpha()));
      model.entries.push_back(scalar_entry("beta", m.beta()));
      model.entries.push_back(scalar_entry("C", m.C()));
      model.entries.push_back(scalar_entry("c", m.c()));
      break;
    case DistributionModel::Kind::PiecewiseLB:
      model.entries.emplace_back("kind", "piecewise");
      model.entries.push_back(scalar_entry("alpha", m.alpha()));
      model.entries.push_back(scalar_entry("t", m.t()));
      model.entries.push_back(scalar_entry("K", m.K()));
      break;
  }
  file.sections.push_back(std::move(model));

  ConfigSection truth{"truth", {}};
  truth.entries.push_back(scalar_entry("alpha", experiment.truth.alpha));
  truth.entries.push_back(scalar_entry("beta", experiment.truth.beta));
  truth.entries.push_back(scalar_entry("C", experiment.truth.C));
  truth.entries.push_back(scalar_entry("Cprime", experiment.truth.Cprime));
  file.sections.push_back(std::move(truth));

  for (const auto& spec : experiment.methods) {
    ConfigSection method{"method", {}};
    if (!spec.label.empty()) method.entries.emplace_back("label", spec.label);
    switch (spec.kind) {
      case MethodSpec::Kind::FixedK:
        method.entries.emplace_back("kind", "fixed_k");
        method.entries.emplace_back("k", std::to_string(spec.k));
        break;
      case MethodSpec::Kind::OracleK:
        method.entries.emplace_back("kind", "oracle");
        break;
      case MethodSpec::Kind::ConsistencyK:
        method.entries.emplace_back("kind", "consistency");
        break;
      case MethodSpec::Kind::RoughPlugin:
        method.entries.emplace_back("kind", "rough_plugin");
        method.entries.push_back(scalar_entry("beta", spec.beta));
        break;
      case MethodSpec::Kind::Adaptive:
        method.entries.emplace_back("kind", "adaptive");
        method.entries.push_back(scalar_entry("delta", spec.adaptive.delta));
        method.entries.push_back(scalar_entry("A", spec.adaptive.A));
        method.entries.push_back(
            scalar_entry("count_floor_multiplier", spec.adaptive.count_floor_multiplier));
        break;
      case MethodSpec::Kind::Hill:
        method.entries.emplace_back("kind", "hill");
        method.entries.push_back(scalar_entry("r", spec.r));
        break;
      case MethodSpec::Kind::Generalized:
        method.entries.emplace_back("kind", "generalized");
        method.entries.push_back(scalar_entry("u", spec.u));
        method.entries.push_back(scalar_entry("v", spec.v));
        break;
      case MethodSpec::Kind::QuantileDual:
        method.entries.emplace_back("kind", "quantile_dual");
        method.entries.push_back(scalar_entry("q_u", spec.q_u));
        method.entries.push_back(scalar_entry("q_v", spec.q_v));
        break;
    }
    file.sections.push_back(std::move(method));
  }
  return file;
}

}  // namespace tailest
