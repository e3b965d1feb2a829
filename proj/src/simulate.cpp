#include "lmap/simulate.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>
#include <thread>

#include "lmap/aggregate.hpp"
#include "lmap/random.hpp"
#include "lmap/relatedness.hpp"

namespace lmap {
namespace {

// Stream labels for derive_rng.
constexpr std::uint64_t kEnvironmentStream = 0xe2f1;
constexpr std::uint64_t kRecordStream = 0x4ec0;

constexpr double kRecordEpoch = 1735689600.0;  // 2025-01-01T00:00:00Z

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

Condition parse_condition(std::string_view name) {
  if (name == "few") return Condition::Few;
  if (name == "many") return Condition::Many;
  if (name == "mixed") return Condition::Mixed;
  if (name == "all") return Condition::All;
  throw InputError("unknown condition '" + std::string(name) + "' (few, many, mixed, all)");
}

std::string_view to_string(Condition condition) {
  switch (condition) {
    case Condition::Few: return "few";
    case Condition::Many: return "many";
    case Condition::Mixed: return "mixed";
    case Condition::All: return "all";
  }
  return "?";
}

void SimConfig::validate() const {
  if (n_landmarks < 1) throw InputError("simulation: n_landmarks must be at least 1");
  if (!(duplication_ratio >= 0 && duplication_ratio < 1)) {
    throw InputError("simulation: duplication ratio p must lie in [0, 1)");
  }
  if (!(noise_sigma >= 0) || !std::isfinite(noise_sigma)) {
    throw InputError("simulation: noise sigma must be finite and non-negative");
  }
  if (num_records < 1) throw InputError("simulation: num_records must be at least 1");
  if (!(area_side > 0)) throw InputError("simulation: area_side must be positive");
  if (!(min_separation >= 0)) throw InputError("simulation: min_separation must be non-negative");
  alignment.validate();
}

std::set<std::string> SimEnvironment::duplicated_ids() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& l : landmarks) ++counts[l.id];
  std::set<std::string> out;
  for (const auto& [id, c] : counts) {
    if (c > 1) out.insert(id);
  }
  return out;
}

std::size_t unique_id_count(std::size_t n_landmarks, double duplication_ratio) {
  // The epsilon keeps products such as 0.9 * 30 from flooring to 26.
  const double exact = (1.0 - duplication_ratio) * static_cast<double>(n_landmarks);
  const auto floored = static_cast<std::size_t>(std::floor(exact + 1e-9));
  return std::clamp<std::size_t>(floored, 1, n_landmarks);
}

std::string landmark_id(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ID-%02zu", k);
  return buf;
}

SimEnvironment generate_environment(const SimConfig& config, std::mt19937_64& rng) {
  config.validate();
  std::uniform_real_distribution<double> coord(0.0, config.area_side);
  std::vector<Point2d> positions;
  positions.reserve(config.n_landmarks);
  const double min_sq = config.min_separation * config.min_separation;
  std::size_t attempts = 0;
  while (positions.size() < config.n_landmarks) {
    if (++attempts > 10000) {
      throw InputError("cannot place " + std::to_string(config.n_landmarks) + " landmarks " +
                       fmt("%g", config.min_separation) + " m apart in a " +
                       fmt("%g", config.area_side) + " m square; use a larger area");
    }
    const double x = coord(rng);
    const double y = coord(rng);
    const Point2d p(x, y);
    bool clear = true;
    for (const auto& q : positions) {
      if ((p - q).squaredNorm() < min_sq) {
        clear = false;
        break;
      }
    }
    if (clear) positions.push_back(p);
  }

  SimEnvironment env;
  env.n_unique = unique_id_count(config.n_landmarks, config.duplication_ratio);
  std::uniform_int_distribution<std::size_t> pick(0, env.n_unique - 1);
  env.landmarks.reserve(config.n_landmarks);
  for (std::size_t k = 0; k < config.n_landmarks; ++k) {
    const std::size_t id = k < env.n_unique ? k : pick(rng);
    env.landmarks.push_back({landmark_id(id), positions[k]});
  }
  return env;
}

std::size_t sample_record_size(Condition condition, std::size_t record_index,
                               std::size_t num_records, std::size_t n_landmarks,
                               std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> few(3, 6), many(12, 15);
  std::size_t k = 0;
  switch (condition) {
    case Condition::Few: k = few(rng); break;
    case Condition::Many: k = many(rng); break;
    case Condition::Mixed: {
      const std::size_t many_count =
          std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.1 * static_cast<double>(num_records))));
      k = record_index < many_count ? many(rng) : few(rng);
      break;
    }
    case Condition::All: k = n_landmarks; break;
  }
  return std::min(k, n_landmarks);
}

void inject_noise(std::span<Point2d> points, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (auto& p : points) {
    // Draw even at sigma = 0 so the stream does not depend on sigma.
    const double nx = gauss(rng);
    const double ny = gauss(rng);
    p += sigma * Point2d(nx, ny);
  }
}

Recording synthesize_record(const SimEnvironment& env, std::size_t k, double sigma,
                            std::mt19937_64& rng, std::string recording_id) {
  const std::size_t n = env.landmarks.size();
  if (k > n) {
    throw InputError("synthesize_record: K = " + std::to_string(k) + " exceeds " +
                     std::to_string(n) + " landmarks");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(k);

  std::vector<Point2d> points;
  points.reserve(k);
  for (std::size_t idx : order) points.push_back(env.landmarks[idx].position);
  inject_noise(points, sigma, rng);

  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  const Rotation2<double> rotation = rotation_matrix(angle(rng));
  for (auto& p : points) p = rotation * p;
  if (!points.empty()) {
    const Point2d origin = points.front();
    for (auto& p : points) p -= origin;
  }

  Recording rec;
  rec.recording_id = std::move(recording_id);
  rec.observations.reserve(k);
  for (std::size_t v = 0; v < k; ++v) {
    Observation o;
    o.recording_id = rec.recording_id;
    o.obs_index = v;
    o.label = env.landmarks[order[v]].id;
    o.position = points[v];
    o.note = "visited " + o.label;
    o.timestamp = kRecordEpoch + 60.0 * static_cast<double>(v);
    rec.observations.push_back(std::move(o));
  }
  return rec;
}

std::vector<Recording> synthesize_records(const SimConfig& config, const SimEnvironment& env) {
  std::vector<Recording> records;
  records.reserve(config.num_records);
  for (std::size_t r = 0; r < config.num_records; ++r) {
    auto rng = derive_rng(config.seed, {kRecordStream, r});
    const std::size_t k =
        sample_record_size(config.condition, r, config.num_records, env.landmarks.size(), rng);
    char id[32];
    std::snprintf(id, sizeof id, "rec-%02zu", r);
    Recording rec = synthesize_record(env, k, config.noise_sigma, rng, id);
    for (auto& o : rec.observations) o.timestamp += 3600.0 * static_cast<double>(r);
    records.push_back(std::move(rec));
  }
  return records;
}

ExperimentOutcome run_experiment(const SimConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  auto env_rng = derive_rng(config.seed, {kEnvironmentStream});
  const SimEnvironment env = generate_environment(config, env_rng);
  const std::vector<Recording> records = synthesize_records(config, env);

  std::vector<Observation> observations;
  std::vector<std::string> recording_ids;
  for (const auto& rec : records) {
    recording_ids.push_back(rec.recording_id);
    observations.insert(observations.end(), rec.observations.begin(), rec.observations.end());
  }

  RelatednessOptions rel_options;
  rel_options.drop_duplicate_labels = config.drop_duplicates_in_alignment;
  const std::set<std::string> flagged =
      config.drop_duplicates_in_alignment ? env.duplicated_ids() : std::set<std::string>{};
  RelatednessMatrix relatedness = build_matrix(observations, exact_id_scorer(), rel_options, flagged);
  const std::vector<std::size_t> excluded = duplicate_label_indices(observations, rel_options, flagged);

  AlignmentProblem problem(observations, relatedness, recording_ids);
  AlignmentConfig align_config = config.alignment;
  align_config.seed = config.seed;
  const AlignmentResult aligned = optimize(problem, align_config);

  const auto clusters = cluster(observations, aligned.transforms, relatedness, {}, excluded);
  const SemanticLandmarkMap map = assemble_map(clusters);
  const EvalReport report = positional_error(map, env.truth());

  ExperimentOutcome out;
  out.positional_error = report.positional_error;
  out.coverage = report.coverage;
  out.objective = aligned.objective;
  out.iterations = aligned.iterations;
  out.restart_index = aligned.restart_index;
  out.cluster_count = report.cluster_count;
  out.matched_pairs = report.matched_pairs;
  out.degenerate = aligned.degenerate;
  out.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

SweepResult sweep(const std::vector<SimConfig>& grid, const SweepOptions& options) {
  if (grid.empty()) throw InputError("sweep: empty grid");
  if (options.seeds_per_config < 1) throw InputError("sweep: need at least one seed per config");

  SweepResult result;
  result.rows.resize(grid.size() * options.seeds_per_config);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (std::size_t s = 0; s < options.seeds_per_config; ++s) {
      auto& row = result.rows[c * options.seeds_per_config + s];
      row.config_index = c;
      row.config = grid[c];
      row.config.seed = options.seed_base + s;
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < result.rows.size(); i = next++) {
      auto& row = result.rows[i];
      try {
        row.outcome = run_experiment(row.config);
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
      }
    }
  };

  std::size_t jobs = options.jobs ? options.jobs : std::thread::hardware_concurrency();
  jobs = std::clamp<std::size_t>(jobs, 1, result.rows.size());
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return result;
}

std::vector<SweepMeans> SweepResult::means() const {
  std::vector<SweepMeans> out;
  std::map<std::size_t, std::size_t> slot;
  for (const auto& row : rows) {
    auto [it, inserted] = slot.try_emplace(row.config_index, out.size());
    if (inserted) {
      SweepMeans m;
      m.config = row.config;
      out.push_back(m);
    }
    auto& m = out[it->second];
    ++m.runs;
    if (row.failed) {
      ++m.failed;
      continue;
    }
    m.positional_error += row.outcome.positional_error;
    m.coverage += static_cast<double>(row.outcome.coverage);
    m.objective += row.outcome.objective;
    m.runtime_s += row.outcome.runtime_s;
  }
  for (auto& m : out) {
    const std::size_t ok = m.runs - m.failed;
    if (ok == 0) continue;
    const double k = static_cast<double>(ok);
    m.positional_error /= k;
    m.coverage /= k;
    m.objective /= k;
    m.runtime_s /= k;
  }
  return out;
}

std::vector<SimConfig> preset_grid(std::string_view name, const SimConfig& base) {
  std::vector<SimConfig> grid;
  const Condition conditions[] = {Condition::Few, Condition::Many, Condition::Mixed};
  if (name == "fig7a") {
    for (Condition c : conditions) {
      for (std::size_t records : {3, 6, 9, 12, 15}) {
        SimConfig cfg = base;
        cfg.condition = c;
        cfg.num_records = records;
        cfg.noise_sigma = 0.5;
        cfg.duplication_ratio = 0.0;
        cfg.drop_duplicates_in_alignment = false;
        grid.push_back(cfg);
      }
    }
  } else if (name == "fig7b") {
    for (Condition c : conditions) {
      for (double sigma : {0.1, 0.5, 1.0}) {
        SimConfig cfg = base;
        cfg.condition = c;
        cfg.num_records = 15;
        cfg.noise_sigma = sigma;
        cfg.duplication_ratio = 0.0;
        cfg.drop_duplicates_in_alignment = false;
        grid.push_back(cfg);
      }
    }
  } else if (name == "fig7c") {
    for (Condition c : conditions) {
      for (bool drop : {false, true}) {
        for (double p : {0.0, 0.05, 0.1}) {
          SimConfig cfg = base;
          cfg.condition = c;
          cfg.num_records = 15;
          cfg.noise_sigma = 0.5;
          cfg.duplication_ratio = p;
          cfg.drop_duplicates_in_alignment = drop;
          grid.push_back(cfg);
        }
      }
    }
  } else {
    throw InputError("unknown preset '" + std::string(name) + "' (fig7a, fig7b, fig7c)");
  }
  return grid;
}

namespace {

void write_config_cells(std::ostream& out, const SimConfig& c) {
  out << to_string(c.condition) << ',' << c.n_landmarks << ',' << fmt("%g", c.duplication_ratio)
      << ',' << fmt("%g", c.noise_sigma) << ',' << c.num_records;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result, bool include_runtime) {
  out << kSweepCsvHeader << '\n';
  for (const auto& row : result.rows) {
    write_config_cells(out, row.config);
    out << ',' << row.config.seed << ',' << (row.config.drop_duplicates_in_alignment ? 1 : 0);
    if (row.failed) {
      out << ",,,,\n";
      continue;
    }
    out << ',' << fmt("%.9g", row.outcome.positional_error) << ',' << row.outcome.coverage << ','
        << fmt("%.9g", row.outcome.objective) << ',';
    if (include_runtime) out << fmt("%.4f", row.outcome.runtime_s);
    out << '\n';
  }
}

void write_means_csv(std::ostream& out, const SweepResult& result, bool include_runtime) {
  out << kMeansCsvHeader << '\n';
  for (const auto& m : result.means()) {
    write_config_cells(out, m.config);
    out << ',' << (m.config.drop_duplicates_in_alignment ? 1 : 0) << ',' << m.runs << ','
        << m.failed;
    if (m.runs == m.failed) {
      out << ",,,,\n";
      continue;
    }
    out << ',' << fmt("%.9g", m.positional_error) << ',' << fmt("%.9g", m.coverage) << ','
        << fmt("%.9g", m.objective) << ',';
    if (include_runtime) out << fmt("%.4f", m.runtime_s);
    out << '\n';
  }
}

}  // namespace lmap
