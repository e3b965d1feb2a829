#include <doctest.h>

#include <cmath>
#include <random>
#include <map>
#include <set>

#include "lmap/relatedness.hpp"
#include "test_support.hpp"

using namespace lmap;

namespace {

Observation obs(std::string rec, std::string label, double x = 0, double y = 0) {
  Observation o;
  o.recording_id = std::move(rec);
  o.label = std::move(label);
  o.position = Point2d(x, y);
  return o;
}

// Cosine of two trigram multisets built without any hashing.
double trigram_cosine(const std::string& a, const std::string& b) {
  auto grams = [](const std::string& s) {
    std::map<std::string, int> out;
    std::string padded = "\x02" + s + "\x03";
    for (auto& c : padded) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (std::size_t k = 0; k + 3 <= padded.size(); ++k) ++out[padded.substr(k, 3)];
    return out;
  };
  const auto ga = grams(a), gb = grams(b);
  double dot = 0, na = 0, nb = 0;
  for (const auto& [g, c] : ga) {
    na += c * c;
    if (auto it = gb.find(g); it != gb.end()) dot += c * it->second;
  }
  for (const auto& [g, c] : gb) nb += c * c;
  return dot / std::sqrt(na * nb);
}

void check_invariants(const RelatednessMatrix& m) {
  const auto& v = m.values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    CHECK(v(i, i) == 0.0);
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      CHECK(v(i, j) == v(j, i));
      CHECK(v(i, j) >= 0.0);
      CHECK(v(i, j) <= 1.0);
    }
  }
}

}  // namespace

TEST_CASE("exact-id scores") {
  CHECK(exact_id_score("ID-00", "ID-00") == 1.0);
  CHECK(exact_id_score("ID-00", "ID-01") == 0.0);
  CHECK(exact_id_score("Snacks", "snacks") == 0.0);
}

TEST_CASE("lexical embedding") {
  for (const char* label : {"a", "Snacks", "Green tea", "MTG-03", "x y z"}) {
    const auto v = lexical_embed(label);
    CHECK(v.size() == kLexicalDimension);
    CHECK(std::abs(v.norm() - 1.0) < 1e-9);
    CHECK(v == lexical_embed(label));
  }
  CHECK_THROWS_AS(lexical_embed(""), InputError);

  // By hand: Snack shares 4 of its 5 trigrams with Snacks' 6, none with Beverage.
  CHECK(trigram_cosine("Snack", "Snacks") == doctest::Approx(4 / std::sqrt(30.0)));
  CHECK(trigram_cosine("Snack", "Beverage") == 0.0);
  const double near = lexical_embed("Snack").dot(lexical_embed("Snacks"));
  const double far = lexical_embed("Snack").dot(lexical_embed("Beverage"));
  CHECK(near > far);
  // Bucket collisions can only add overlap.
  CHECK(near >= trigram_cosine("Snack", "Snacks") - 1e-12);
}

TEST_CASE("Gaussian kernel") {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(4), v = Eigen::VectorXd::Zero(4);
  u[0] = 1;
  v[1] = 1;
  CHECK(score_from_vectors(u, u, 0.5) == 1.0);
  CHECK(score_from_vectors(u, v, 0.5) == doctest::Approx(std::exp(-2.0 / (2 * 0.25))));
  CHECK(score_from_vectors(u, v, 0.5) == doctest::Approx(0.0183156388887));
  CHECK(score_from_vectors(u, v, 1e6) == doctest::Approx(1.0));
  CHECK_THROWS_AS(score_from_vectors(u, Eigen::VectorXd::Zero(3), 0.5), InputError);
  CHECK_THROWS_AS(score_from_vectors(u, v, 0.0), InputError);
}

TEST_CASE("build_matrix examples") {
  const RelatednessOptions opts;
  {
    const auto m = build_matrix({obs("r0", "ID-00"), obs("r1", "ID-00")}, exact_id_scorer(), opts);
    CHECK(m(0, 1) == 1.0);
  }
  {
    const auto m = build_matrix({obs("r0", "ID-00"), obs("r0", "ID-00")}, exact_id_scorer(), opts);
    CHECK(m(0, 1) == 0.0);
  }
  {
    const auto m = build_matrix({obs("r0", "A"), obs("r1", "A"), obs("r1", "B")}, exact_id_scorer(), opts);
    CHECK(m(0, 1) == 1.0);
    CHECK(m(0, 2) == 0.0);
    CHECK(m(1, 2) == 0.0);
    CHECK(m.nonzero_entries().size() == 1);
  }
  {
    RelatednessOptions keep = opts;
    keep.exclude_same_recording = false;
    const auto m = build_matrix({obs("r0", "A"), obs("r0", "A")}, exact_id_scorer(), keep);
    CHECK(m(0, 1) == 1.0);
  }
  CHECK_THROWS_AS(build_matrix({}, exact_id_scorer(), opts), InputError);
}

TEST_CASE("duplicate labels are detected within a recording and zeroed on request") {
  const std::vector<Observation> o = {obs("r0", "A", 0, 0), obs("r0", "A", 5, 0), obs("r1", "A", 1, 1),
                                      obs("r0", "B", 0, 0), obs("r1", "B", 0, 2), obs("r1", "C", 0, 0),
                                      obs("r0", "C", 2, 0)};
  CHECK(detect_duplicate_labels(o) == std::set<std::string>{"A"});
  RelatednessOptions opts;
  opts.drop_duplicate_labels = true;
  const auto m = build_matrix(o, exact_id_scorer(), opts);
  CHECK(m(0, 2) == 0.0);
  CHECK(m(1, 2) == 0.0);
  CHECK(m(3, 4) == 1.0);
  CHECK(m(5, 6) == 1.0);
  CHECK(duplicate_label_indices(o, opts) == std::vector<std::size_t>{0, 1, 2});

  const auto flagged = build_matrix(o, exact_id_scorer(), opts, {"C"});
  CHECK(flagged(5, 6) == 0.0);
  CHECK(flagged(3, 4) == 1.0);

  opts.drop_duplicate_labels = false;
  CHECK(build_matrix(o, exact_id_scorer(), opts)(0, 2) == 1.0);
  CHECK(duplicate_label_indices(o, opts).empty());
}

TEST_CASE("matrix validation") {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(RelatednessMatrix{bad}, InputError);
  bad(1, 0) = 0.5;
  CHECK_NOTHROW(RelatednessMatrix{bad});
  bad(0, 0) = 0.1;
  CHECK_THROWS_AS(RelatednessMatrix{bad}, InputError);
  RelatednessMatrix m(3);
  CHECK_THROWS_AS(m.set(1, 1, 0.5), InputError);
  CHECK_THROWS_AS(m.set(0, 1, 1.5), InputError);
  m.set(2, 0, 0.25);
  CHECK(m(0, 2) == 0.25);
  CHECK(parse_provider("exact-id") == ProviderKind::ExactId);
  CHECK(parse_provider("lexical") == ProviderKind::Lexical);
  CHECK_THROWS_AS(parse_provider("resnet"), InputError);
}

TEST_CASE("property: invariants hold for every provider and option combination") {
  std::mt19937_64 rng(23);
  const std::vector<std::string> vocab = {"Snacks", "Snack", "Beverages", "Tea", "Green tea",
                                          "Pens", "Paper", "ID-00", "ID-01"};
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Observation> o;
    const int n = 2 + static_cast<int>(rng() % 12);
    for (int k = 0; k < n; ++k) {
      o.push_back(obs("r" + std::to_string(rng() % 3), vocab[rng() % vocab.size()],
                      static_cast<double>(rng() % 10), static_cast<double>(rng() % 10)));
    }
    for (bool exclude : {false, true}) {
      for (bool drop : {false, true}) {
        for (double sparsify : {0.0, 0.1, 0.5}) {
          RelatednessOptions opts;
          opts.exclude_same_recording = exclude;
          opts.drop_duplicate_labels = drop;
          opts.sparsify_below = sparsify;
          const auto exact = build_matrix(o, exact_id_scorer(), opts);
          const auto lex = build_matrix(o, lexical_scorer(opts.tau), opts);
          check_invariants(exact);
          check_invariants(lex);
          CHECK((exact.values().array() * (1 - exact.values().array())).abs().maxCoeff() == 0.0);

          // Sparsification never raises an entry.
          RelatednessOptions dense = opts;
          dense.sparsify_below = 0.0;
          const auto lex_dense = build_matrix(o, lexical_scorer(opts.tau), dense);
          CHECK((lex.values().array() <= lex_dense.values().array()).all());
          for (Eigen::Index i = 0; i < lex.values().rows(); ++i) {
            for (Eigen::Index j = 0; j < lex.values().cols(); ++j) {
              const double v = lex.values()(i, j);
              CHECK((v == 0.0 || v >= sparsify));
              if (exclude && o[i].recording_id == o[j].recording_id) CHECK(v == 0.0);
            }
          }
        }
      }
    }
  }
}
