#include "mixer/io.hpp"

#include <fstream>
#include <numeric>

#include <json.hpp>

#include "mixer/core.hpp"

namespace mixer {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return doc;
}

void dump_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw Error("write failed: " + path);
}

const json& require(const json& doc, const char* field,
                    const std::string& path) {
  auto it = doc.find(field);
  if (it == doc.end())
    throw ValidationError(path + ": missing field \"" + field + "\"");
  return *it;
}

std::vector<int> as_int_vector(const json& node, const char* field,
                               const std::string& path) {
  if (!node.is_array())
    throw ValidationError(path + ": field \"" + field + "\" must be an array");
  std::vector<int> out;
  out.reserve(node.size());
  for (const auto& v : node) {
    if (!v.is_number_integer())
      throw ValidationError(path + ": field \"" + field +
                            "\" must contain integers");
    out.push_back(v.get<int>());
  }
  return out;
}

json report_to_json(const SolveReport& r) {
  return json{{"final_objective", r.final_objective},
              {"miqp_objective", r.miqp_objective},
              {"phi_orth_final", r.phi_orth_final},
              {"phi_dist_final", r.phi_dist_final},
              {"d_trajectory", r.d_trajectory},
              {"outer_iterations", r.outer_iterations},
              {"total_inner_iterations", r.total_inner_iterations},
              {"total_backtracks", r.total_backtracks},
              {"wall_time", r.wall_time},
              {"universe_estimate", r.universe_estimate},
              {"converged_feasible", r.converged_feasible}};
}

SolveReport report_from_json(const json& j, const std::string& path) {
  SolveReport r;
  r.final_objective = require(j, "final_objective", path).get<double>();
  r.miqp_objective = require(j, "miqp_objective", path).get<double>();
  r.phi_orth_final = require(j, "phi_orth_final", path).get<double>();
  r.phi_dist_final = require(j, "phi_dist_final", path).get<double>();
  r.d_trajectory =
      require(j, "d_trajectory", path).get<std::vector<double>>();
  r.outer_iterations = require(j, "outer_iterations", path).get<int>();
  r.total_inner_iterations =
      require(j, "total_inner_iterations", path).get<int>();
  r.total_backtracks = require(j, "total_backtracks", path).get<int>();
  r.wall_time = require(j, "wall_time", path).get<double>();
  r.universe_estimate = require(j, "universe_estimate", path).get<int>();
  r.converged_feasible = require(j, "converged_feasible", path).get<bool>();
  return r;
}

json config_to_json(const SolverConfig& c) {
  return json{{"inner_tol", c.inner_tol},
              {"max_inner_iters", c.max_inner_iters},
              {"max_outer_iters", c.max_outer_iters},
              {"armijo_c", c.armijo_c},
              {"armijo_shrink", c.armijo_shrink},
              {"max_backtracks", c.max_backtracks},
              {"initial_step", c.initial_step},
              {"perturb_scale", c.perturb_scale},
              {"binary_tol", c.binary_tol},
              {"rng_seed", c.rng_seed}};
}

SolverConfig config_from_json(const json& j, const std::string& path) {
  SolverConfig c;
  c.inner_tol = require(j, "inner_tol", path).get<double>();
  c.max_inner_iters = require(j, "max_inner_iters", path).get<int>();
  c.max_outer_iters = require(j, "max_outer_iters", path).get<int>();
  c.armijo_c = require(j, "armijo_c", path).get<double>();
  c.armijo_shrink = require(j, "armijo_shrink", path).get<double>();
  c.max_backtracks = require(j, "max_backtracks", path).get<int>();
  c.initial_step = require(j, "initial_step", path).get<double>();
  c.perturb_scale = require(j, "perturb_scale", path).get<double>();
  c.binary_tol = require(j, "binary_tol", path).get<double>();
  c.rng_seed = require(j, "rng_seed", path).get<std::uint64_t>();
  return c;
}

}  // namespace

AffinityMatrix AffinityFile::validated() const {
  return validate_affinity(affinity, partition());
}

AffinityFile read_affinity_file(const std::string& path) {
  const json doc = load_json(path);
  AffinityFile file;
  file.views = as_int_vector(require(doc, "views", path), "views", path);
  for (std::size_t i = 0; i < file.views.size(); ++i)
    if (file.views[i] < 1)
      throw ValidationError(path + ": \"views\"[" + std::to_string(i) +
                            "] must be a positive integer");
  const std::size_t m = static_cast<std::size_t>(
      std::accumulate(file.views.begin(), file.views.end(), 0));

  const json& aff = require(doc, "affinity", path);
  if (!aff.is_array() || aff.size() != m)
    throw ValidationError(path + ": \"affinity\" must be an array of " +
                          std::to_string(m) + " rows");
  file.affinity.resize(m, m);
  for (std::size_t r = 0; r < m; ++r) {
    const json& row = aff[r];
    if (!row.is_array() || row.size() != m)
      throw ValidationError(path + ": \"affinity\" row " + std::to_string(r) +
                            " must have " + std::to_string(m) + " entries");
    for (std::size_t c = 0; c < m; ++c) {
      if (!row[c].is_number())
        throw ValidationError(path + ": \"affinity\"[" + std::to_string(r) +
                              "][" + std::to_string(c) + "] must be a number");
      file.affinity(r, c) = row[c].get<double>();
    }
  }

  if (doc.contains("labels")) {
    auto labels = as_int_vector(doc["labels"], "labels", path);
    if (labels.size() != m)
      throw ValidationError(path + ": \"labels\" must have " +
                            std::to_string(m) + " entries, got " +
                            std::to_string(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] < 0)
        throw ValidationError(path + ": \"labels\"[" + std::to_string(i) +
                              "] must be nonnegative");
    file.labels = std::move(labels);
  }
  return file;
}

void write_affinity_file(const std::string& path, const AffinityFile& file) {
  json doc;
  doc["views"] = file.views;
  json aff = json::array();
  for (Eigen::Index r = 0; r < file.affinity.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < file.affinity.cols(); ++c)
      row.push_back(file.affinity(r, c));
    aff.push_back(std::move(row));
  }
  doc["affinity"] = std::move(aff);
  if (file.labels) doc["labels"] = *file.labels;
  dump_json(path, doc);
}

ResultFile read_result_file(const std::string& path) {
  const json doc = load_json(path);
  ResultFile file;
  file.labels = as_int_vector(require(doc, "labels", path), "labels", path);
  file.universe_estimate = require(doc, "universe_estimate", path).get<int>();
  file.report = report_from_json(require(doc, "report", path), path);
  file.config = config_from_json(require(doc, "config", path), path);
  return file;
}

void write_result_file(const std::string& path, const ResultFile& file) {
  json doc;
  doc["labels"] = file.labels;
  doc["universe_estimate"] = file.universe_estimate;
  doc["report"] = report_to_json(file.report);
  doc["config"] = config_to_json(file.config);
  dump_json(path, doc);
}

}  // namespace mixer
