#include <doctest.h>

#include <fstream>
#include <sstream>

#include "lmap/io.hpp"
#include "lmap/timestamp.hpp"
// Last: the resolver header it pulls in defines a macro that clashes with Eigen.
#include "fake_service.hpp"

using namespace lmap;

namespace {

const std::string kFixtures = LMAP_FIXTURES;

std::ifstream fixture(const std::string& name) {
  std::ifstream in(kFixtures + "/" + name);
  REQUIRE(in.good());
  return in;
}

CategoryTable store_table() {
  auto in = fixture("categories.json");
  return read_category_table(in);
}

std::string error_of(const std::string& jsonl) {
  std::istringstream in(jsonl);
  try {
    read_recordings_jsonl(in);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("category table file") {
  const auto table = store_table();
  CHECK(table.labels() == std::vector<std::string>{"Beverages", "Snacks", "Stationery"});
  std::istringstream bad("[1, 2]");
  CHECK_THROWS_AS(read_category_table(bad), InputError);
  std::istringstream empty_kw(R"({"A": [""]})");
  CHECK_THROWS_AS(read_category_table(empty_kw), InputError);
}

TEST_CASE("ingest positions and labels the store fixture") {
  auto in = fixture("store_recordings.jsonl");
  const auto recs = read_recordings_jsonl(in);
  REQUIRE(recs.size() == 2);
  const auto table = store_table();
  IngestOptions opts;
  opts.table = &table;
  IngestStats stats;
  const auto obs = ingest(recs, opts, &stats);
  REQUIRE(obs.size() == 5);
  CHECK(stats.observations == 5);
  CHECK(stats.unlabeled == 1);

  CHECK(obs[0].recording_id == "alice");
  CHECK(obs[0].label == "Snacks");
  CHECK(obs[0].position == Point2d(2, 0));
  CHECK(obs[0].timestamp == parse_iso8601("2025-01-17T11:30:04Z"));
  CHECK(obs[1].label == "Beverages");
  CHECK(obs[1].position == Point2d(4, 2));
  CHECK(obs[2].label == "Snacks");
  CHECK(obs[2].position == Point2d(0, 0));
  CHECK(obs[3].label == "Beverages");
  CHECK(obs[3].position == Point2d(1.5, -2.5));
  CHECK(obs[4].label == "mystery aisle");
  CHECK_FALSE(obs[4].labeled);
  CHECK(obs[4].obs_index == 2);
}

TEST_CASE("recording parse errors name the line") {
  CHECK(error_of("{\"recording_id\": \"a\", \"annotations\": []}\n\nnot json\n").rfind("line 3:", 0) == 0);
  CHECK(error_of("{\"annotations\": []}\n").rfind("line 1:", 0) == 0);
  CHECK(error_of("{\"recording_id\": \"a\", \"annotations\": [{\"text\": \"x\", \"t\": 1}]}\n")
            .find("no trajectory") != std::string::npos);
  CHECK(error_of("{\"recording_id\": \"a\", \"annotations\": [{\"text\": \"x\", \"x\": 1, \"y\": 1}]}\n")
            .find("'t' or 'timestamp'") != std::string::npos);
  CHECK(error_of("{\"recording_id\": \"a\", \"trajectory\": [{\"t\": 1, \"x\": 0, \"y\": 0}, {\"t\": 1, \"x\": 0, \"y\": 0}], "
                 "\"annotations\": []}\n")
            .find("strictly increasing") != std::string::npos);
  CHECK(error_of("{\"recording_id\": \"a\", \"annotations\": [{\"text\": \"x\", \"t\": 1, \"x\": 1}]}\n")
            .find("x/y") != std::string::npos);
}

TEST_CASE("ingest rejects annotations outside the trajectory or out of order") {
  std::istringstream far(R"({"recording_id": "a", "trajectory": [{"t": 0, "x": 0, "y": 0}], "annotations": [{"text": "tea", "t": 60}]})");
  const auto recs = read_recordings_jsonl(far);
  CHECK_THROWS_AS(ingest(recs, {}), OutOfRangeError);
  std::istringstream back(R"({"recording_id": "a", "annotations": [{"text": "a", "t": 5, "x": 0, "y": 0}, {"text": "b", "t": 2, "x": 0, "y": 0}]})");
  CHECK_THROWS_AS(ingest(read_recordings_jsonl(back), {}), InputError);
}

TEST_CASE("labeling service with table fallback") {
  lmap::testing::FakeServices fake;
  std::istringstream in(
      R"({"recording_id": "office", "annotations": [{"text": "Room 3 is occupied", "t": 0, "x": 0, "y": 0}, {"text": "explode near the chips", "t": 1, "x": 1, "y": 0}]})");
  const auto recs = read_recordings_jsonl(in);
  const auto table = store_table();
  IngestOptions opts;
  opts.labeling_endpoint = Endpoint::parse(fake.url("/label"));
  opts.categories = {"MTG-03", "MTG-05", "Snacks"};
  opts.table = &table;
  IngestStats stats;
  const auto obs = ingest(recs, opts, &stats);
  CHECK(obs[0].label == "MTG-03");
  CHECK(obs[1].label == "Snacks");
  CHECK(stats.service_fallbacks == 1);
  CHECK(fake.label_calls == 2);

  opts.table = nullptr;
  CHECK_THROWS_AS(ingest(recs, opts), TransportError);
  opts.categories.clear();
  CHECK_THROWS_AS(ingest(recs, opts), InputError);
}

TEST_CASE("observations round trip") {
  Observation o;
  o.recording_id = "r";
  o.obs_index = 4;
  o.label = "Snacks";
  o.position = Point2d(0.1, -1e-7);
  o.note = "line\n\"quoted\" ünïcode";
  o.timestamp = parse_iso8601("2025-01-17T11:36:37Z");
  o.labeled = false;
  std::ostringstream out;
  write_observations_jsonl(out, {o, o});
  std::istringstream in(out.str());
  const auto back = read_observations_jsonl(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].recording_id == o.recording_id);
  CHECK(back[0].obs_index == 4);
  CHECK(back[0].label == o.label);
  CHECK(back[0].position == o.position);
  CHECK(back[0].note == o.note);
  CHECK(back[0].timestamp == o.timestamp);
  CHECK_FALSE(back[0].labeled);
  CHECK(observation_to_json(o)["timestamp"] == "2025-01-17T11:36:37Z");

  std::istringstream bad("{\"recording_id\": \"r\", \"label\": \"x\", \"x\": 1}\n");
  try {
    read_observations_jsonl(bad);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).rfind("line 1:", 0) == 0);
  }
}

TEST_CASE("map, ground truth and report JSON") {
  SemanticLandmarkMap map;
  LandmarkCluster c;
  c.label = "Beverages";
  c.position = Point2d(1.25, -3);
  c.notes = {{"Calpis Water 500 (21 bottles)", parse_iso8601("2025-01-17T11:36:37Z")}};
  map.clusters.push_back(c);
  map.frame_note = kDefaultFrameNote;
  const auto j = map_to_json(map);
  CHECK(j["landmarks"][0]["notes"][0]["timestamp"] == "2025-01-17T11:36:37Z");
  const auto back = map_from_json(j);
  REQUIRE(back.clusters.size() == 1);
  CHECK(back.clusters[0].label == "Beverages");
  CHECK(back.clusters[0].position == c.position);
  CHECK(back.clusters[0].notes == c.notes);
  CHECK(back.frame_note == map.frame_note);
  CHECK_THROWS_AS(map_from_json(nlohmann::json::array()), InputError);

  auto truth_in = fixture("truth.json");
  const auto truth = ground_truth_from_json(nlohmann::json::parse(truth_in));
  REQUIRE(truth.landmarks.size() == 4);
  CHECK(truth.landmarks[2].id == "ID-02");
  CHECK(truth.landmarks[2].position == Point2d(1, 3));
  CHECK(ground_truth_from_json(ground_truth_to_json(truth)).landmarks[3].position == Point2d(3, 4));

  EvalReport r;
  r.positional_error = 0.25;
  r.coverage = 3;
  const auto rj = report_to_json(r);
  CHECK(rj["positional_error_m"] == 0.25);
  CHECK(rj["coverage"] == 3);
  CHECK_THROWS_AS(read_json_file(kFixtures + "/missing.json"), InputError);
}
