#include <doctest.h>

#include "lmap/relatedness.hpp"
#include "lmap/service.hpp"
// Last: the resolver header it pulls in defines a macro that clashes with Eigen.
#include "fake_service.hpp"

using namespace lmap;
using lmap::testing::FakeServices;

TEST_CASE("endpoint parsing") {
  const auto ep = Endpoint::parse("http://localhost:8080/v1/label");
  CHECK(ep.scheme_host_port == "http://localhost:8080");
  CHECK(ep.path == "/v1/label");
  CHECK(Endpoint::parse("http://h:1").path == "/");
  CHECK_THROWS_AS(Endpoint::parse("localhost:8080"), InputError);
  CHECK_THROWS_AS(Endpoint::parse("http:///x"), InputError);
}

TEST_CASE("labeling service") {
  FakeServices fake;
  const auto ep = Endpoint::parse(fake.url("/label"));
  CHECK(label_via_service("Room 3 is occupied", {"MTG-03", "MTG-05"}, ep) == "MTG-03");
  CHECK_THROWS_AS(label_via_service("bogus", {"MTG-03"}, ep), ProtocolError);
  CHECK_THROWS_AS(label_via_service("explode", {"MTG-03"}, ep), TransportError);
  CHECK_THROWS_AS(label_via_service("x", {}, ep), InputError);
  ServiceOptions quick;
  quick.timeout_s = 0.5;
  CHECK_THROWS_AS(label_via_service("x", {"A"}, Endpoint::parse(lmap::testing::unreachable_url("/label")), quick),
                  TransportError);
}

TEST_CASE("embedding service") {
  FakeServices fake;
  const auto ep = Endpoint::parse(fake.url("/embed"));
  CHECK_THROWS_AS(embed_via_service({}, ep), InputError);

  EmbeddingClient client(ep);
  const auto v = client.embed({"Snacks", "Tea", "Snacks", "Pens"});
  REQUIRE(v.size() == 4);
  for (const auto& x : v) {
    CHECK(x.size() == 3);
    CHECK(std::abs(x.norm() - 1.0) < 1e-12);
  }
  CHECK(v[0] == v[2]);
  CHECK(client.requests_sent() == 1);

  // Cached labels are not requested again.
  const auto again = client.embed({"Tea", "Snacks"});
  CHECK(client.requests_sent() == 1);
  CHECK(again[0] == v[1]);
  client.embed({"Tea", "Milk"});
  CHECK(client.requests_sent() == 2);

  CHECK_THROWS_AS(embed_via_service({"Snacks", "wide"}, ep), ProtocolError);
  CHECK_THROWS_AS(client.embed({"wide"}), ProtocolError);

  ServiceOptions quick;
  quick.timeout_s = 0.5;
  CHECK_THROWS_AS(embed_via_service({"a"}, Endpoint::parse(lmap::testing::unreachable_url("/embed")), quick),
                  TransportError);
}

TEST_CASE("service scorer plugs into build_matrix") {
  FakeServices fake;
  auto client = std::make_shared<EmbeddingClient>(Endpoint::parse(fake.url("/embed")));
  std::vector<Observation> o(3);
  o[0].recording_id = "r0";
  o[0].label = "Snacks";
  o[1].recording_id = "r1";
  o[1].label = "Snacks";
  o[2].recording_id = "r1";
  o[2].label = "Tea";
  RelatednessOptions opts;
  opts.sparsify_below = 0.0;
  const auto m = build_matrix(o, service_scorer(client, opts.tau), opts);
  CHECK(m(0, 1) == 1.0);
  CHECK(m(1, 2) == 0.0);
  CHECK(m(0, 2) > 0.0);
  CHECK(m(0, 2) < 1.0);
  CHECK(fake.embed_calls == 1);
}
