#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lmap/align.hpp"
#include "lmap/core.hpp"
#include "lmap/evaluate.hpp"

namespace lmap {

/// How many landmarks each synthetic record visits.
enum class Condition { Few, Many, Mixed, All };

Condition parse_condition(std::string_view name);
std::string_view to_string(Condition condition);

struct SimConfig {
  std::size_t n_landmarks = 30;
  double duplication_ratio = 0.0;
  double noise_sigma = 0.5;
  Condition condition = Condition::Many;
  std::size_t num_records = 3;
  std::uint64_t seed = 0;
  double area_side = 10.0;
  double min_separation = 1.0;
  bool drop_duplicates_in_alignment = false;
  AlignmentConfig alignment;

  void validate() const;
};

struct SimEnvironment {
  std::vector<GroundTruthLandmark> landmarks;
  std::size_t n_unique = 0;

  /// Ids carried by two or more landmarks.
  std::set<std::string> duplicated_ids() const;
  GroundTruth truth() const { return {landmarks}; }
};

/// Number of distinct base ids, floor((1 - p) N), at least one.
std::size_t unique_id_count(std::size_t n_landmarks, double duplication_ratio);

std::string landmark_id(std::size_t k);

/// Landmarks uniform in [0, area_side]^2 with rejection on min_separation
/// (10,000 draws at most). The first N' get "ID-00", "ID-01", ...; the rest
/// reuse ids drawn with replacement from those. Throws InputError when the
/// layout cannot be packed.
SimEnvironment generate_environment(const SimConfig& config, std::mt19937_64& rng);

/// few: U{3..6}; many: U{12..15}; mixed: the first max(1, round(0.1 n))
/// records are many-sized, the rest few-sized; all: every landmark. Sizes are
/// capped at n_landmarks.
std::size_t sample_record_size(Condition condition, std::size_t record_index,
                               std::size_t num_records, std::size_t n_landmarks,
                               std::mt19937_64& rng);

/// Adds independent N(0, sigma^2) noise to each coordinate.
void inject_noise(std::span<Point2d> points, double sigma, std::mt19937_64& rng);

/// Visits K distinct landmarks in random order, perturbs them, then rotates
/// the whole record by a uniform angle and shifts it so that the first visit
/// sits at the origin.
Recording synthesize_record(const SimEnvironment& env, std::size_t k, double sigma,
                            std::mt19937_64& rng, std::string recording_id = "rec-00");

/// The records of one simulation cell. Record r draws from a stream keyed by
/// (seed, r), so the first R records do not depend on how many follow.
std::vector<Recording> synthesize_records(const SimConfig& config, const SimEnvironment& env);

struct ExperimentOutcome {
  double positional_error = 0;
  std::size_t coverage = 0;
  double objective = 0;
  std::size_t iterations = 0;
  std::size_t restart_index = 0;
  std::size_t cluster_count = 0;
  std::size_t matched_pairs = 0;
  bool degenerate = false;
  double runtime_s = 0;
};

/// Environment -> records -> exact-id relatedness -> alignment -> clusters ->
/// evaluation against the environment. Deterministic in config.seed apart
/// from runtime_s.
ExperimentOutcome run_experiment(const SimConfig& config);

struct SweepRow {
  std::size_t config_index = 0;
  SimConfig config;
  bool failed = false;
  std::string error;
  ExperimentOutcome outcome;
};

struct SweepMeans {
  SimConfig config;
  std::size_t runs = 0;
  std::size_t failed = 0;
  double positional_error = 0;
  double coverage = 0;
  double objective = 0;
  double runtime_s = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // grid order, then seed order

  std::vector<SweepMeans> means() const;
};

struct SweepOptions {
  std::size_t seeds_per_config = 5;
  std::uint64_t seed_base = 0;
  std::size_t jobs = 0;  // 0 = hardware concurrency
};

/// Runs every (config, seed) cell. The seed of each grid entry is replaced by
/// seed_base + k. Failing cells become failed rows.
SweepResult sweep(const std::vector<SimConfig>& grid, const SweepOptions& options = {});

/// fig7a, fig7b or fig7c; `base` supplies every field the preset leaves open.
std::vector<SimConfig> preset_grid(std::string_view name, const SimConfig& base = {});

inline constexpr const char* kSweepCsvHeader =
    "condition,n_landmarks,p,sigma,num_records,seed,drop_duplicates,positional_error_m,coverage,"
    "objective,runtime_s";
inline constexpr const char* kMeansCsvHeader =
    "condition,n_landmarks,p,sigma,num_records,drop_duplicates,runs,failed,"
    "mean_positional_error_m,mean_coverage,mean_objective,mean_runtime_s";

/// Failed rows leave the metric cells empty. Without `include_runtime` the
/// runtime cells are left empty so output is byte-reproducible.
void write_sweep_csv(std::ostream& out, const SweepResult& result, bool include_runtime = true);
void write_means_csv(std::ostream& out, const SweepResult& result, bool include_runtime = true);

}  // namespace lmap
