#include "lmap/io.hpp"

#include <cmath>
#include <limits>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lmap/timestamp.hpp"

namespace lmap {

using nlohmann::json;

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

double finite_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InputError(where + "missing '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw InputError(where + "'" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InputError(where + "'" + key + "' must be finite");
  return d;
}

std::string string_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw InputError(where + "'" + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw InputError(at_line(line) + "malformed JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw InputError(at_line(line) + "expected a JSON object");
    fn(j, line);
  }
}

}  // namespace

std::vector<RecordingInput> read_recordings_jsonl(std::istream& in) {
  std::vector<RecordingInput> out;
  for_each_line(in, [&](const json& j, std::size_t line) {
    const std::string where = at_line(line);
    RecordingInput rec;
    rec.line = line;
    rec.recording_id = string_field(j, "recording_id", where);
    if (rec.recording_id.empty()) throw InputError(where + "empty recording_id");
    if (j.contains("start_time")) {
      rec.start_time = parse_iso8601(string_field(j, "start_time", where));
    }
    if (j.contains("trajectory")) {
      if (!j["trajectory"].is_array()) throw InputError(where + "'trajectory' must be a list");
      for (const auto& s : j["trajectory"]) {
        TrajectorySample sample{finite_number(s, "t", where), finite_number(s, "x", where),
                                finite_number(s, "y", where)};
        if (sample.t < 0) throw InputError(where + "trajectory time must be non-negative");
        if (!rec.trajectory.empty() && !(sample.t > rec.trajectory.back().t)) {
          throw InputError(where + "trajectory times must be strictly increasing");
        }
        rec.trajectory.push_back(sample);
      }
    }
    if (!j.contains("annotations") || !j["annotations"].is_array()) {
      throw InputError(where + "'annotations' must be a list");
    }
    for (const auto& a : j["annotations"]) {
      AnnotationInput ann;
      ann.line = line;
      ann.text = string_field(a, "text", where);
      if (ann.text.empty()) throw InputError(where + "annotation text is empty");
      if (a.contains("t")) ann.t = finite_number(a, "t", where);
      if (a.contains("timestamp")) ann.timestamp = parse_iso8601(string_field(a, "timestamp", where));
      if (!ann.t && !ann.timestamp) {
        throw InputError(where + "annotation needs 't' or 'timestamp'");
      }
      const bool has_x = a.contains("x"), has_y = a.contains("y");
      if (has_x != has_y) throw InputError(where + "annotation gives only one of x/y");
      if (has_x) ann.position = Point2d(finite_number(a, "x", where), finite_number(a, "y", where));
      if (!ann.position && rec.trajectory.empty()) {
        throw InputError(where + "annotation has no x/y and the recording has no trajectory");
      }
      rec.annotations.push_back(std::move(ann));
    }
    out.push_back(std::move(rec));
  });
  return out;
}

CategoryTable read_category_table(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("category table: malformed JSON (") + e.what() + ")");
  }
  if (!j.is_object()) {
    throw InputError("category table: expected an object mapping labels to keyword lists");
  }
  std::vector<CategoryEntry> entries;
  for (const auto& [label, keywords] : j.items()) {
    if (!keywords.is_array()) throw InputError("category table: '" + label + "' needs a list");
    CategoryEntry e{label, {}};
    for (const auto& k : keywords) {
      if (!k.is_string()) throw InputError("category table: keywords must be strings");
      e.keywords.push_back(k.get<std::string>());
    }
    entries.push_back(std::move(e));
  }
  return CategoryTable(std::move(entries));
}

std::vector<Observation> ingest(const std::vector<RecordingInput>& recordings,
                                const IngestOptions& options, IngestStats* stats) {
  IngestStats local;
  std::vector<std::string> categories = options.categories;
  if (categories.empty() && options.table) categories = options.table->labels();
  if (options.labeling_endpoint && categories.empty()) {
    throw InputError("labeling service needs a category list or a category table");
  }

  std::vector<Observation> out;
  for (const auto& rec : recordings) {
    const double start = rec.start_time.value_or(0.0);
    double previous = -std::numeric_limits<double>::infinity();
    std::size_t index = 0;
    for (const auto& ann : rec.annotations) {
      const std::string where = at_line(ann.line);
      Observation obs;
      obs.recording_id = rec.recording_id;
      obs.obs_index = index++;
      obs.note = ann.text;
      obs.timestamp = ann.timestamp ? *ann.timestamp : start + *ann.t;
      if (obs.timestamp < previous) {
        throw InputError(where + "annotation times must be non-decreasing within '" +
                         rec.recording_id + "'");
      }
      previous = obs.timestamp;

      if (ann.position) {
        obs.position = *ann.position;
      } else {
        if (!ann.t && !rec.start_time) {
          throw InputError(where + "a 'timestamp' annotation placed on the trajectory needs the "
                                   "recording's 'start_time'");
        }
        const double rel = ann.t ? *ann.t : *ann.timestamp - start;
        try {
          obs.position = stationary_position(rec.trajectory, rel, options.stationary);
        } catch (const OutOfRangeError& e) {
          throw OutOfRangeError(where + e.what());
        } catch (const InputError& e) {
          throw InputError(where + e.what());
        }
      }

      std::optional<std::string> label;
      if (options.labeling_endpoint) {
        try {
          label = label_via_service(ann.text, categories, *options.labeling_endpoint,
                                    options.service);
        } catch (const std::exception&) {
          if (!options.table) throw;
          ++local.service_fallbacks;
        }
      }
      if (!label && options.table) label = identify_label(ann.text, *options.table);
      if (label) {
        obs.label = *label;
      } else {
        obs.label = ann.text;
        obs.labeled = false;
        ++local.unlabeled;
      }
      out.push_back(std::move(obs));
    }
  }
  local.observations = out.size();
  if (stats) *stats = local;
  return out;
}

json observation_to_json(const Observation& obs) {
  return {{"recording_id", obs.recording_id},
          {"obs_index", obs.obs_index},
          {"label", obs.label},
          {"x", obs.position.x()},
          {"y", obs.position.y()},
          {"note", obs.note},
          {"timestamp", format_iso8601(obs.timestamp)},
          {"labeled", obs.labeled}};
}

Observation observation_from_json(const json& j) {
  const std::string where;
  Observation obs;
  obs.recording_id = string_field(j, "recording_id", where);
  if (obs.recording_id.empty()) throw InputError("empty recording_id");
  if (j.contains("obs_index")) {
    if (!j["obs_index"].is_number_unsigned()) throw InputError("'obs_index' must be a count");
    obs.obs_index = j["obs_index"].get<std::size_t>();
  }
  obs.label = string_field(j, "label", where);
  obs.position = Point2d(finite_number(j, "x", where), finite_number(j, "y", where));
  obs.note = j.contains("note") ? string_field(j, "note", where) : std::string{};
  obs.timestamp = j.contains("timestamp") ? parse_iso8601(string_field(j, "timestamp", where)) : 0.0;
  obs.labeled = j.value("labeled", true);
  return obs;
}

void write_observations_jsonl(std::ostream& out, const std::vector<Observation>& observations) {
  for (const auto& o : observations) out << observation_to_json(o).dump() << '\n';
}

std::vector<Observation> read_observations_jsonl(std::istream& in) {
  std::vector<Observation> out;
  for_each_line(in, [&](const json& j, std::size_t line) {
    try {
      out.push_back(observation_from_json(j));
    } catch (const InputError& e) {
      throw InputError(at_line(line) + e.what());
    }
  });
  return out;
}

json map_to_json(const SemanticLandmarkMap& map) {
  json landmarks = json::array();
  for (const auto& c : map.clusters) {
    json notes = json::array();
    for (const auto& n : c.notes) {
      notes.push_back({{"text", n.text}, {"timestamp", format_iso8601(n.timestamp)}});
    }
    landmarks.push_back({{"label", c.label},
                         {"x", c.position.x()},
                         {"y", c.position.y()},
                         {"notes", std::move(notes)}});
  }
  return {{"frame_note", map.frame_note}, {"landmarks", std::move(landmarks)}};
}

SemanticLandmarkMap map_from_json(const json& j) {
  if (!j.is_object() || !j.contains("landmarks") || !j["landmarks"].is_array()) {
    throw InputError("map file: expected an object with a 'landmarks' list");
  }
  SemanticLandmarkMap map;
  map.frame_note = j.contains("frame_note") ? string_field(j, "frame_note", "map file: ") : "";
  for (const auto& l : j["landmarks"]) {
    const std::string where = "map file: ";
    LandmarkCluster c;
    c.label = string_field(l, "label", where);
    c.position = Point2d(finite_number(l, "x", where), finite_number(l, "y", where));
    if (l.contains("notes")) {
      if (!l["notes"].is_array()) throw InputError(where + "'notes' must be a list");
      for (const auto& n : l["notes"]) {
        c.notes.push_back({string_field(n, "text", where),
                           parse_iso8601(string_field(n, "timestamp", where))});
      }
    }
    map.clusters.push_back(std::move(c));
  }
  return map;
}

GroundTruth ground_truth_from_json(const json& j) {
  if (!j.is_object() || !j.contains("landmarks") || !j["landmarks"].is_array()) {
    throw InputError("ground truth: expected an object with a 'landmarks' list");
  }
  GroundTruth truth;
  for (const auto& l : j["landmarks"]) {
    const std::string where = "ground truth: ";
    truth.landmarks.push_back(
        {string_field(l, "id", where), Point2d(finite_number(l, "x", where), finite_number(l, "y", where))});
  }
  return truth;
}

json ground_truth_to_json(const GroundTruth& truth) {
  json landmarks = json::array();
  for (const auto& l : truth.landmarks) {
    landmarks.push_back({{"id", l.id}, {"x", l.position.x()}, {"y", l.position.y()}});
  }
  return {{"landmarks", std::move(landmarks)}};
}

json alignment_to_json(const AlignmentResult& result, const std::vector<std::string>& recording_ids) {
  json transforms = json::array();
  for (const auto& id : recording_ids) {
    const auto& t = result.transforms.at(id);
    transforms.push_back({{"recording_id", id}, {"theta", t.theta}, {"tx", t.tx()}, {"ty", t.ty()}});
  }
  return {{"gauge_recording", recording_ids.empty() ? std::string{} : recording_ids.front()},
          {"objective", result.objective},
          {"iterations", result.iterations},
          {"restart_index", result.restart_index},
          {"degenerate", result.degenerate},
          {"transforms", std::move(transforms)}};
}

json report_to_json(const EvalReport& r) {
  return {{"positional_error_m", r.positional_error},
          {"coverage", r.coverage},
          {"matched_pairs", r.matched_pairs},
          {"anchor_pairs", r.anchor_pairs},
          {"cluster_count", r.cluster_count},
          {"scale", r.scale},
          {"transform",
           {{"theta", r.applied_transform.theta},
            {"tx", r.applied_transform.tx()},
            {"ty", r.applied_transform.ty()}}}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON (" + e.what() + ")");
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw InputError("failed writing '" + path + "'");
}

}  // namespace lmap
