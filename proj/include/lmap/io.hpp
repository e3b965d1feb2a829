#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmap/aggregate.hpp"
#include "lmap/align.hpp"
#include "lmap/evaluate.hpp"
#include "lmap/identify.hpp"
#include "lmap/service.hpp"
#include "lmap/trajectory.hpp"

namespace lmap {

// --- Recordings JSONL (ingest input) ---------------------------------------

struct AnnotationInput {
  std::optional<double> t;          // seconds since recording start
  std::optional<double> timestamp;  // absolute, seconds since the epoch
  std::string text;
  std::optional<Point2d> position;
  std::size_t line = 0;
};

struct RecordingInput {
  std::string recording_id;
  std::optional<double> start_time;
  std::vector<TrajectorySample> trajectory;
  std::vector<AnnotationInput> annotations;
  std::size_t line = 0;
};

/// One recording per non-blank line. Errors name the offending line.
std::vector<RecordingInput> read_recordings_jsonl(std::istream& in);

struct IngestOptions {
  const CategoryTable* table = nullptr;
  std::optional<Endpoint> labeling_endpoint;
  /// Categories offered to the labeling service; defaults to the table labels.
  std::vector<std::string> categories;
  ServiceOptions service;
  StationaryParams stationary;
};

struct IngestStats {
  std::size_t observations = 0;
  std::size_t unlabeled = 0;
  std::size_t service_fallbacks = 0;
};

/// Positions every annotation (explicit x/y, else the stationary position on
/// the trajectory) and labels it: labeling service first when configured,
/// falling back to the rule table on a service error; rule table otherwise.
/// Notes nothing matches keep their raw text as label with labeled = false.
std::vector<Observation> ingest(const std::vector<RecordingInput>& recordings,
                                const IngestOptions& options, IngestStats* stats = nullptr);

CategoryTable read_category_table(std::istream& in);

// --- Observations JSONL ------------------------------------------------------

nlohmann::json observation_to_json(const Observation& obs);
Observation observation_from_json(const nlohmann::json& j);
void write_observations_jsonl(std::ostream& out, const std::vector<Observation>& observations);
std::vector<Observation> read_observations_jsonl(std::istream& in);

// --- Map / ground truth / transforms / report JSON ---------------------------

nlohmann::json map_to_json(const SemanticLandmarkMap& map);
/// Clusters read back carry label, position and notes but no members.
SemanticLandmarkMap map_from_json(const nlohmann::json& j);

GroundTruth ground_truth_from_json(const nlohmann::json& j);
nlohmann::json ground_truth_to_json(const GroundTruth& truth);

nlohmann::json alignment_to_json(const AlignmentResult& result,
                                 const std::vector<std::string>& recording_ids);

nlohmann::json report_to_json(const EvalReport& report);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace lmap
