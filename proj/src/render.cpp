#include "lmap/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

namespace lmap {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const SemanticLandmarkMap& map, const GroundTruth* truth,
                       const RenderOptions& options) {
  std::vector<Point2d> drawn;
  drawn.reserve(map.clusters.size());
  std::string note;
  std::optional<Similarity2d> to_truth;
  if (truth) {
    try {
      const EvalReport report = positional_error(map, *truth);
      to_truth = Similarity2d{report.scale, report.applied_transform};
    } catch (const std::exception& e) {
      note = std::string("not aligned to ground truth: ") + e.what();
    }
  }
  for (const auto& c : map.clusters) drawn.push_back(to_truth ? (*to_truth)(c.position) : c.position);

  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_x;
  auto extend = [&](const Point2d& p) {
    min_x = std::min(min_x, p.x());
    min_y = std::min(min_y, p.y());
    max_x = std::max(max_x, p.x());
    max_y = std::max(max_y, p.y());
  };
  for (const auto& p : drawn) extend(p);
  if (truth) {
    for (const auto& l : truth->landmarks) extend(l.position);
  }
  if (!std::isfinite(min_x)) {
    min_x = min_y = 0;
    max_x = max_y = 10;
  }
  min_x = std::floor(min_x - options.margin_m);
  min_y = std::floor(min_y - options.margin_m);
  max_x = std::ceil(max_x + options.margin_m);
  max_y = std::ceil(max_y + options.margin_m);

  const double ppm = options.pixels_per_meter;
  const double width = (max_x - min_x) * ppm, height = (max_y - min_y) * ppm;
  auto sx = [&](double x) { return (x - min_x) * ppm; };
  auto sy = [&](double y) { return (max_y - y) * ppm; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
      << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!note.empty()) svg << "<!-- " << escape_xml(note) << " -->\n";

  svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double x = min_x; x <= max_x + 1e-9; x += 1.0) {
    svg << "<line x1=\"" << num(sx(x)) << "\" y1=\"0.00\" x2=\"" << num(sx(x)) << "\" y2=\""
        << num(height) << "\"/>\n";
  }
  for (double y = min_y; y <= max_y + 1e-9; y += 1.0) {
    svg << "<line x1=\"0.00\" y1=\"" << num(sy(y)) << "\" x2=\"" << num(width) << "\" y2=\""
        << num(sy(y)) << "\"/>\n";
  }
  svg << "</g>\n";

  if (truth) {
    svg << "<g fill=\"black\">\n";
    for (const auto& l : truth->landmarks) {
      svg << "<circle class=\"truth\" cx=\"" << num(sx(l.position.x())) << "\" cy=\""
          << num(sy(l.position.y())) << "\" r=\"3\"/>\n";
    }
    svg << "</g>\n";
  }

  svg << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t k = 0; k < map.clusters.size(); ++k) {
    const double cx = sx(drawn[k].x()), cy = sy(drawn[k].y());
    svg << "<circle class=\"landmark\" cx=\"" << num(cx) << "\" cy=\"" << num(cy)
        << "\" r=\"8\" fill=\"none\" stroke=\"orange\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(cx + 10) << "\" y=\"" << num(cy - 10) << "\">"
        << escape_xml(map.clusters[k].label) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace lmap
