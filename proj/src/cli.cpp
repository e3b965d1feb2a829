#include "lmap/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "lmap/aggregate.hpp"
#include "lmap/align.hpp"
#include "lmap/evaluate.hpp"
#include "lmap/io.hpp"
#include "lmap/relatedness.hpp"
#include "lmap/render.hpp"
#include "lmap/simulate.hpp"

namespace lmap {
namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

/// Writes to `path`, or to `out` when path is empty or "-".
void emit(const std::string& path, const std::string& contents, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
  } else {
    write_text_file(path, contents);
  }
}

struct ServiceFlags {
  double timeout_s = 10.0;
};

// --- ingest -----------------------------------------------------------------

struct IngestArgs {
  std::string recordings;
  std::string table;
  std::string labeling_endpoint;
  std::vector<std::string> categories;
  std::string out;
  double speed_threshold = 0.2;
  double window = 3.0;
};

int cmd_ingest(const IngestArgs& a, const ServiceFlags& svc, std::ostream& out, std::ostream& err) {
  auto in = open_input(a.recordings);
  const auto recordings = read_recordings_jsonl(in);

  std::optional<CategoryTable> table;
  if (!a.table.empty()) {
    auto tin = open_input(a.table);
    table = read_category_table(tin);
  }
  IngestOptions options;
  options.table = table ? &*table : nullptr;
  if (!a.labeling_endpoint.empty()) options.labeling_endpoint = Endpoint::parse(a.labeling_endpoint);
  options.categories = a.categories;
  options.service.timeout_s = svc.timeout_s;
  options.stationary = {a.speed_threshold, a.window};

  IngestStats stats;
  const auto observations = ingest(recordings, options, &stats);
  std::ostringstream buf;
  write_observations_jsonl(buf, observations);
  emit(a.out, buf.str(), out);
  err << "ingested " << stats.observations << " observations from " << recordings.size()
      << " recordings (" << stats.unlabeled << " unlabeled, " << stats.service_fallbacks
      << " service fallbacks)\n";
  return kExitOk;
}

// --- align ------------------------------------------------------------------

struct AlignArgs {
  std::string observations;
  std::string provider = "exact-id";
  std::string embedding_endpoint;
  RelatednessOptions relatedness;
  bool include_same_recording = false;
  std::vector<std::string> duplicate_labels;
  AlignmentConfig optimizer;
  double link_threshold = 0.5;
  std::string transforms_out;
  std::string map_out;
};

int cmd_align(AlignArgs a, const ServiceFlags& svc, std::ostream& out, std::ostream& err) {
  auto in = open_input(a.observations);
  const auto observations = read_observations_jsonl(in);
  if (observations.empty()) throw InputError("'" + a.observations + "' holds no observations");

  a.relatedness.exclude_same_recording = !a.include_same_recording;
  LabelScorer scorer;
  switch (parse_provider(a.provider)) {
    case ProviderKind::ExactId: scorer = exact_id_scorer(); break;
    case ProviderKind::Lexical: scorer = lexical_scorer(a.relatedness.tau); break;
    case ProviderKind::Service: {
      if (a.embedding_endpoint.empty()) {
        throw InputError("--provider service needs --embedding-endpoint or EMBEDDING_ENDPOINT");
      }
      auto client = std::make_shared<EmbeddingClient>(Endpoint::parse(a.embedding_endpoint),
                                                       ServiceOptions{svc.timeout_s});
      scorer = service_scorer(client, a.relatedness.tau);
      break;
    }
  }

  const std::set<std::string> flagged(a.duplicate_labels.begin(), a.duplicate_labels.end());
  const RelatednessMatrix relatedness = build_matrix(observations, scorer, a.relatedness, flagged);
  const auto excluded = duplicate_label_indices(observations, a.relatedness, flagged);

  const AlignmentProblem problem(observations, relatedness);
  const AlignmentResult result = optimize(problem, a.optimizer);
  if (result.degenerate) {
    err << "degenerate problem: " << problem.num_recordings()
        << " recordings but no relatedness between any two of them\n";
    return kExitDegenerate;
  }

  ClusterOptions cluster_options;
  cluster_options.link_threshold = a.link_threshold;
  const SemanticLandmarkMap map = assemble_map(
      cluster(observations, result.transforms, relatedness, cluster_options, excluded));

  if (!a.transforms_out.empty()) {
    write_text_file(a.transforms_out,
                    alignment_to_json(result, problem.recording_ids()).dump(2) + "\n");
  }
  const std::string map_text = map_to_json(map).dump(2) + "\n";
  if (!a.map_out.empty()) write_text_file(a.map_out, map_text);

  out << "objective: " << result.objective << "\n"
      << "iterations: " << result.iterations << "\n"
      << "restart: " << result.restart_index << "\n"
      << "clusters: " << map.clusters.size() << "\n";
  if (a.map_out.empty()) out << map_text;
  return kExitOk;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string map;
  std::string truth;
  std::string out;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const SemanticLandmarkMap map = map_from_json(read_json_file(a.map));
  const GroundTruth truth = ground_truth_from_json(read_json_file(a.truth));
  EvalReport report;
  try {
    report = positional_error(map, truth);
  } catch (const DegenerateError& e) {
    err << "unmatchable: " << e.what() << "\n";
    return kExitDegenerate;
  }
  char line[160];
  std::snprintf(line, sizeof line, "positional_error_m: %.6f\n", report.positional_error);
  out << line << "coverage: " << report.coverage << " / " << truth.landmarks.size() << "\n"
      << "matched_pairs: " << report.matched_pairs << "\n"
      << "clusters: " << report.cluster_count << "\n";
  std::snprintf(line, sizeof line, "scale: %.6f\n", report.scale);
  out << line;
  const std::string json_text = report_to_json(report).dump(2) + "\n";
  if (a.out.empty()) {
    out << json_text;
  } else {
    write_text_file(a.out, json_text);
  }
  return kExitOk;
}

// --- simulate / sweep ---------------------------------------------------------

struct SimArgs {
  std::vector<std::size_t> n{30};
  std::vector<double> p{0.0};
  std::vector<double> sigma{0.5};
  std::vector<std::string> condition{"many"};
  std::vector<std::size_t> records{3};
  std::vector<int> drop{0};
  bool drop_flag = false;
  std::string preset;
  std::size_t seeds = 5;
  std::uint64_t seed_base = 0;
  std::size_t jobs = 0;
  double area_side = 10.0;
  double min_separation = 1.0;
  AlignmentConfig optimizer;
  bool omit_runtime = false;
  std::string out;
  std::string means_out;
};

std::vector<SimConfig> build_grid(const SimArgs& a) {
  SimConfig base;
  base.area_side = a.area_side;
  base.min_separation = a.min_separation;
  base.alignment = a.optimizer;
  if (!a.preset.empty()) return preset_grid(a.preset, base);

  std::vector<SimConfig> grid;
  for (const auto& cond : a.condition) {
    for (auto n : a.n) {
      for (auto p : a.p) {
        for (auto sigma : a.sigma) {
          for (auto records : a.records) {
            for (auto drop : a.drop) {
              SimConfig cfg = base;
              cfg.condition = parse_condition(cond);
              cfg.n_landmarks = n;
              cfg.duplication_ratio = p;
              cfg.noise_sigma = sigma;
              cfg.num_records = records;
              cfg.drop_duplicates_in_alignment = drop != 0;
              cfg.validate();
              grid.push_back(cfg);
            }
          }
        }
      }
    }
  }
  return grid;
}

int cmd_sweep(const SimArgs& a, std::ostream& out, std::ostream& err) {
  const auto grid = build_grid(a);
  SweepOptions options;
  options.seeds_per_config = a.seeds;
  options.seed_base = a.seed_base;
  options.jobs = a.jobs;
  const SweepResult result = sweep(grid, options);

  std::ostringstream rows, means;
  write_sweep_csv(rows, result, !a.omit_runtime);
  write_means_csv(means, result, !a.omit_runtime);
  emit(a.out, rows.str(), out);
  std::string means_path = a.means_out;
  if (means_path.empty() && !a.out.empty() && a.out != "-") means_path = a.out + ".means.csv";
  if (!means_path.empty()) {
    write_text_file(means_path, means.str());
  } else {
    err << means.str();
  }

  std::size_t failed = 0;
  for (const auto& row : result.rows) {
    if (row.failed) {
      ++failed;
      err << "cell failed (" << to_string(row.config.condition) << ", records "
          << row.config.num_records << ", seed " << row.config.seed << "): " << row.error << "\n";
    }
  }
  err << result.rows.size() << " rows, " << failed << " failed\n";
  return kExitOk;
}

// --- render -------------------------------------------------------------------

struct RenderArgs {
  std::string map;
  std::string truth;
  std::string out;
};

int cmd_render(const RenderArgs& a, std::ostream& out) {
  const SemanticLandmarkMap map = map_from_json(read_json_file(a.map));
  std::optional<GroundTruth> truth;
  if (!a.truth.empty()) truth = ground_truth_from_json(read_json_file(a.truth));
  emit(a.out, render_svg(map, truth ? &*truth : nullptr), out);
  return kExitOk;
}

void add_optimizer_flags(CLI::App* cmd, AlignmentConfig& cfg) {
  cmd->add_option("--lr", cfg.learning_rate, "gradient descent learning rate")->capture_default_str();
  cmd->add_option("--max-iters", cfg.max_iters, "iteration cap per restart")->capture_default_str();
  cmd->add_option("--rel-tol", cfg.rel_tol, "relative objective change to stop at")->capture_default_str();
  cmd->add_option("--restarts", cfg.restarts, "number of starts (restart 0 is identity)")
      ->capture_default_str();
  cmd->add_option("--restart-scale", cfg.restart_translation_scale,
                  "translation range for random restarts, meters")
      ->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantic landmark mapping from unaligned recordings", "lmap"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults");

  ServiceFlags svc;
  app.add_option("--http-timeout", svc.timeout_s, "timeout for external services, seconds")
      ->envname("HTTP_TIMEOUT")
      ->capture_default_str();

  IngestArgs ingest_args;
  auto* ingest_cmd = app.add_subcommand("ingest", "recordings JSONL -> observations JSONL");
  ingest_cmd->add_option("recordings", ingest_args.recordings, "recordings JSONL")->required();
  ingest_cmd->add_option("--table", ingest_args.table, "category table JSON {label: [keywords]}");
  ingest_cmd->add_option("--labeling-endpoint", ingest_args.labeling_endpoint,
                         "text labeling service URL")
      ->envname("LABELING_ENDPOINT")
      ->configurable(false);
  ingest_cmd->add_option("--categories", ingest_args.categories,
                         "categories for the labeling service (default: table labels)")
      ->delimiter(',');
  ingest_cmd->add_option("--speed-threshold", ingest_args.speed_threshold, "stop speed, m/s")
      ->capture_default_str();
  ingest_cmd->add_option("--window", ingest_args.window, "stop window, seconds")->capture_default_str();
  ingest_cmd->add_option("-o,--out", ingest_args.out, "output path (default stdout)");

  AlignArgs align_args;
  auto* align_cmd = app.add_subcommand("align", "observations JSONL -> transforms + map");
  align_cmd->add_option("observations", align_args.observations, "observations JSONL")->required();
  align_cmd->add_option("--provider", align_args.provider, "exact-id, lexical or service")
      ->capture_default_str();
  align_cmd->add_option("--embedding-endpoint", align_args.embedding_endpoint,
                        "text embedding service URL")
      ->envname("EMBEDDING_ENDPOINT")
      ->configurable(false);
  align_cmd->add_option("--tau", align_args.relatedness.tau, "embedding kernel bandwidth")
      ->capture_default_str();
  align_cmd->add_option("--sparsify-below", align_args.relatedness.sparsify_below,
                        "zero relatedness scores below this")
      ->capture_default_str();
  align_cmd->add_flag("--include-same-recording", align_args.include_same_recording,
                      "keep relatedness between observations of one recording");
  align_cmd->add_flag("--drop-duplicates", align_args.relatedness.drop_duplicate_labels,
                      "leave duplicated labels out of the alignment");
  align_cmd->add_option("--duplicate-labels", align_args.duplicate_labels,
                        "labels known to be duplicated")
      ->delimiter(',');
  align_cmd->add_option("--seed", align_args.optimizer.seed, "restart seed")->capture_default_str();
  add_optimizer_flags(align_cmd, align_args.optimizer);
  align_cmd->add_option("--link-threshold", align_args.link_threshold, "cluster edge threshold")
      ->capture_default_str();
  align_cmd->add_option("--transforms-out", align_args.transforms_out, "transforms JSON path");
  align_cmd->add_option("--map-out", align_args.map_out, "map JSON path (default stdout)");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "score a map against ground truth");
  eval_cmd->add_option("map", eval_args.map, "map JSON")->required();
  eval_cmd->add_option("truth", eval_args.truth, "ground truth JSON")->required();
  eval_cmd->add_option("-o,--out", eval_args.out, "report JSON path (default stdout)");

  SimArgs sim_args;
  auto* simulate_cmd = app.add_subcommand("simulate", "one synthetic configuration over seeds");
  auto* sweep_cmd = app.add_subcommand("sweep", "grid of synthetic configurations");
  for (auto* cmd : {simulate_cmd, sweep_cmd}) {
    const bool lists = cmd == sweep_cmd;
    auto* n = cmd->add_option("--n", sim_args.n, "landmark count N");
    auto* p = cmd->add_option("--p", sim_args.p, "duplication ratio");
    auto* sigma = cmd->add_option("--sigma", sim_args.sigma, "noise std, meters");
    auto* condition = cmd->add_option("--condition", sim_args.condition, "few, many, mixed or all");
    auto* records = cmd->add_option("--records", sim_args.records, "records per cell");
    for (auto* opt : {n, p, sigma, condition, records}) {
      opt->capture_default_str();
      if (lists) {
        opt->delimiter(',');
      } else {
        opt->expected(1);
      }
    }
    if (lists) {
      cmd->add_option("--drop-duplicates", sim_args.drop, "0/1 list")->delimiter(',');
      cmd->add_option("--preset", sim_args.preset, "fig7a, fig7b or fig7c");
    } else {
      cmd->add_flag("--drop-duplicates", sim_args.drop_flag, "leave duplicated ids out of alignment");
    }
    cmd->add_option("--seeds", sim_args.seeds, "seeds per configuration")->capture_default_str();
    cmd->add_option("--seed-base", sim_args.seed_base, "first seed")->capture_default_str();
    cmd->add_option("--jobs", sim_args.jobs, "worker threads (0 = all cores)")->capture_default_str();
    cmd->add_option("--area", sim_args.area_side, "area side, meters")->capture_default_str();
    cmd->add_option("--min-separation", sim_args.min_separation, "meters")->capture_default_str();
    add_optimizer_flags(cmd, sim_args.optimizer);
    cmd->add_flag("--omit-runtime", sim_args.omit_runtime,
                  "leave runtime cells empty for byte-reproducible CSV");
    cmd->add_option("-o,--out", sim_args.out, "rows CSV path (default stdout)");
    cmd->add_option("--means-out", sim_args.means_out, "per-config means CSV path");
  }

  RenderArgs render_args;
  auto* render_cmd = app.add_subcommand("render", "map JSON -> SVG");
  render_cmd->add_option("map", render_args.map, "map JSON")->required();
  render_cmd->add_option("--truth", render_args.truth, "ground truth JSON");
  render_cmd->add_option("-o,--out", render_args.out, "SVG path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitInput;
  }

  try {
    if (*ingest_cmd) return cmd_ingest(ingest_args, svc, out, err);
    if (*align_cmd) return cmd_align(align_args, svc, out, err);
    if (*eval_cmd) return cmd_eval(eval_args, out, err);
    if (*simulate_cmd) {
      sim_args.drop = {sim_args.drop_flag ? 1 : 0};
      return cmd_sweep(sim_args, out, err);
    }
    if (*sweep_cmd) {
      if (!sim_args.preset.empty() &&
          (sweep_cmd->count("--n") || sweep_cmd->count("--p") || sweep_cmd->count("--sigma") ||
           sweep_cmd->count("--condition") || sweep_cmd->count("--records") ||
           sweep_cmd->count("--drop-duplicates"))) {
        err << "error: --preset fixes the grid; drop the grid flags\n" << sweep_cmd->help();
        return kExitInput;
      }
      return cmd_sweep(sim_args, out, err);
    }
    if (*render_cmd) return cmd_render(render_args, out);
  } catch (const DegenerateError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const TransportError& e) {
    err << "service error: " << e.what() << "\n";
    return kExitService;
  } catch (const ProtocolError& e) {
    err << "service error: " << e.what() << "\n";
    return kExitService;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace lmap
