#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixer/solver.hpp"
#include "mixer/types.hpp"

namespace mixer {

/// On-disk affinity document: "views" (partition), "affinity" (m x m),
/// optional "labels" (ground truth).
struct AffinityFile {
  std::vector<int> views;
  Matrix affinity;
  std::optional<std::vector<int>> labels;

  ViewPartition partition() const { return ViewPartition(views); }
  /// Run the raw matrix through validate_affinity against the partition.
  AffinityMatrix validated() const;
};

/// On-disk solve result: "labels", "universe_estimate", "report", "config".
struct ResultFile {
  std::vector<int> labels;
  int universe_estimate = 0;
  SolveReport report;
  SolverConfig config;
};

AffinityFile read_affinity_file(const std::string& path);
void write_affinity_file(const std::string& path, const AffinityFile& file);

ResultFile read_result_file(const std::string& path);
void write_result_file(const std::string& path, const ResultFile& file);

}  // namespace mixer
