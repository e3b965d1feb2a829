#include <doctest.h>

#include <string>

#include "lmap/render.hpp"

using namespace lmap;

namespace {

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

LandmarkCluster at(std::string label, Point2d p) {
  LandmarkCluster c;
  c.label = std::move(label);
  c.position = p;
  return c;
}

}  // namespace

TEST_CASE("single landmark golden file") {
  SemanticLandmarkMap map;
  map.clusters.push_back(at("A", Point2d(0, 0)));
  const std::string expected =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"100.00\" height=\"100.00\" viewBox=\"0 0 100.00 100.00\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<g stroke=\"#dddddd\" stroke-width=\"1\">\n"
      "<line x1=\"0.00\" y1=\"0.00\" x2=\"0.00\" y2=\"100.00\"/>\n"
      "<line x1=\"50.00\" y1=\"0.00\" x2=\"50.00\" y2=\"100.00\"/>\n"
      "<line x1=\"100.00\" y1=\"0.00\" x2=\"100.00\" y2=\"100.00\"/>\n"
      "<line x1=\"0.00\" y1=\"100.00\" x2=\"100.00\" y2=\"100.00\"/>\n"
      "<line x1=\"0.00\" y1=\"50.00\" x2=\"100.00\" y2=\"50.00\"/>\n"
      "<line x1=\"0.00\" y1=\"0.00\" x2=\"100.00\" y2=\"0.00\"/>\n"
      "</g>\n"
      "<g font-family=\"sans-serif\" font-size=\"12\">\n"
      "<circle class=\"landmark\" cx=\"50.00\" cy=\"50.00\" r=\"8\" fill=\"none\" stroke=\"orange\" stroke-width=\"2\"/>\n"
      "<text x=\"60.00\" y=\"40.00\">A</text>\n"
      "</g>\n"
      "</svg>\n";
  CHECK(render_svg(map) == expected);
}

TEST_CASE("empty map draws only the grid") {
  const auto svg = render_svg({});
  CHECK(svg.find("width=\"600.00\"") != std::string::npos);
  CHECK(count(svg, "<line") == 26);
  CHECK(count(svg, "<circle") == 0);
}

TEST_CASE("labels are escaped and y grows upward") {
  SemanticLandmarkMap map;
  map.clusters.push_back(at("Tea & <Milk>", Point2d(0, 0)));
  map.clusters.push_back(at("B", Point2d(0, 2)));
  const auto svg = render_svg(map);
  CHECK(svg.find("Tea &amp; &lt;Milk&gt;") != std::string::npos);
  CHECK(svg.find("cx=\"50.00\" cy=\"150.00\"") != std::string::npos);
  CHECK(svg.find("cx=\"50.00\" cy=\"50.00\"") != std::string::npos);
}

TEST_CASE("with ground truth the map is drawn in the truth frame") {
  GroundTruth truth;
  truth.landmarks = {{"ID-00", Point2d(0, 0)}, {"ID-01", Point2d(4, 0)}, {"ID-02", Point2d(0, 3)}};
  SemanticLandmarkMap map;
  // Same layout, doubled and shifted.
  map.clusters = {at("ID-00", Point2d(10, 10)), at("ID-01", Point2d(18, 10)), at("ID-02", Point2d(10, 16))};
  const auto svg = render_svg(map, &truth);
  CHECK(count(svg, "class=\"truth\"") == 3);
  CHECK(count(svg, "class=\"landmark\"") == 3);
  CHECK(svg.find("width=\"300.00\" height=\"250.00\"") != std::string::npos);
  CHECK(svg.find("<circle class=\"landmark\" cx=\"250.00\" cy=\"200.00\"") != std::string::npos);
  CHECK(svg == render_svg(map, &truth));

  SemanticLandmarkMap lonely;
  lonely.clusters = {at("ID-00", Point2d(0, 0))};
  const auto fallback = render_svg(lonely, &truth);
  CHECK(fallback.find("<!-- not aligned to ground truth") != std::string::npos);
}
