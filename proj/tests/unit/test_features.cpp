#include "doctest.h"

#include "worked_examples.hpp"

#include "mlp/error.hpp"
#include "mlp/features.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

using namespace mlp;
using namespace mlp::features;

namespace {

FeatureBuild build(const std::vector<SolutionInput>& in, Encoding enc = Encoding::Binary) {
  return build_matrix(in, expr::SimplificationLevel::ArithmeticOnly, enc);
}

// Rows keyed by vocabulary text so matrices compare independently of row order.
std::map<std::string, std::vector<int>> rows_by_key(const FeatureMatrix& m) {
  std::map<std::string, std::vector<int>> out;
  for (std::size_t i = 0; i < m.num_features(); ++i) {
    std::vector<int> row;
    for (Eigen::Index j = 0; j < m.y.cols(); ++j) row.push_back(m.y(static_cast<Eigen::Index>(i), j));
    out[m.vocabulary[i]] = row;
  }
  return out;
}

}  // namespace

TEST_SUITE("build_matrix") {
  TEST_CASE("product question pair gives the 7 x 2 matrix") {
    auto fb = build(fixtures::product_pair());
    REQUIRE(fb.matrix.num_features() == 7);
    REQUIRE(fb.matrix.num_solutions() == 2);
    // first appearance order lines up with the worked layout directly
    const int expected[7][2] = {{1, 1}, {1, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 1}, {0, 1}};
    for (int i = 0; i < 7; ++i) {
      CHECK(fb.matrix.y(i, 0) == expected[i][0]);
      CHECK(fb.matrix.y(i, 1) == expected[i][1]);
    }
    CHECK(fb.opaque_segments == 0);
  }

  TEST_CASE("repeated expression is a single presence in Binary mode") {
    auto fb = build({SolutionInput::from_body("s", "2x = x + x = 2x")});
    REQUIRE(fb.matrix.num_features() == 1);
    CHECK(fb.matrix.y(0, 0) == 1);
    CHECK(fb.solutions[0].length() == 3);
    CHECK(fb.solutions[0].distinct == std::vector<std::size_t>{0});
  }

  TEST_CASE("Counts mode records multiplicity") {
    auto fb = build({SolutionInput::from_body("s", "2x = x + x = 2x")}, Encoding::Counts);
    CHECK(fb.matrix.y(0, 0) == 3);
  }

  TEST_CASE("notational variants share one row") {
    auto fb = build({SolutionInput::from_expressions("p", {"1/e^x"}),
                     SolutionInput::from_expressions("q", {"e^(-x)"})});
    REQUIRE(fb.matrix.num_features() == 1);
    CHECK(fb.matrix.y(0, 0) == 1);
    CHECK(fb.matrix.y(0, 1) == 1);
  }

  TEST_CASE("blank inputs are filtered and reported") {
    auto fb = build({SolutionInput::from_body("a", "x+1"), SolutionInput::from_body("b", "   "),
                     SolutionInput::from_expressions("c", {"", " "})});
    CHECK(fb.matrix.num_solutions() == 1);
    CHECK(fb.filtered == std::vector<std::string>{"b", "c"});
  }

  TEST_CASE("empty and all-blank corpora") {
    CHECK_THROWS_AS(build({}), Error);
    try {
      build({});
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptyCorpus);
    }
    try {
      build({SolutionInput::from_body("a", "")});
      FAIL("expected AllBlank");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::AllBlank);
    }
  }

  TEST_CASE("unparseable segments become opaque features") {
    auto fb = build({SolutionInput::from_expressions("a", {"x +* 2", "x+1"}),
                     SolutionInput::from_expressions("b", {"  x +* 2 "})});
    CHECK(fb.opaque_segments == 2);
    REQUIRE(fb.matrix.num_features() == 2);
    CHECK(fb.matrix.vocabulary[0] == "\"x +* 2\"");
    CHECK(fb.matrix.y(0, 1) == 1);
  }

  TEST_CASE("prose-only body is one opaque feature") {
    auto fb = build({SolutionInput::from_body("a", "not sure")});
    REQUIRE(fb.matrix.num_features() == 1);
    CHECK(fb.matrix.vocabulary[0] == "\"not sure\"");
  }

  TEST_CASE("keys are used verbatim") {
    auto fb = build({SolutionInput::from_keys("a", {"(feat 1)", "(feat 2)"}),
                     SolutionInput::from_keys("b", {"(feat 2)"})});
    CHECK(fb.matrix.vocabulary == std::vector<std::string>{"(feat 1)", "(feat 2)"});
    CHECK(fb.matrix.y(1, 1) == 1);
  }

  TEST_CASE("opaque keys escape quotes and backslashes") {
    CHECK(opaque_key("a\"b\\c") == "\"a\\\"b\\\\c\"");
  }
}

TEST_SUITE("prefix_vector") {
  TEST_CASE("full prefix equals the column and single prefix has one entry") {
    auto fb = build(fixtures::derivative_pair());
    for (std::size_t j = 0; j < 2; ++j) {
      const auto& s = fb.solutions[j];
      const auto full = prefix_vector(s, s.length(), fb.matrix.num_features());
      CHECK(full == fb.matrix.y.col(static_cast<Eigen::Index>(j)));
      const auto one = prefix_vector(s, 1, fb.matrix.num_features());
      CHECK(one.sum() == 1);
      CHECK(one(static_cast<Eigen::Index>(s.sequence[0])) == 1);
    }
  }

  TEST_CASE("two-step prefix of the slipped derivative") {
    auto fb = build(fixtures::derivative_pair());
    const auto& s = fb.solutions[1];
    const auto v2 = prefix_vector(s, 2, fb.matrix.num_features());
    CHECK(v2.sum() == 2);
    CHECK(v2(static_cast<Eigen::Index>(s.sequence[0])) == 1);
    CHECK(v2(static_cast<Eigen::Index>(s.sequence[1])) == 1);
    CHECK(v2(static_cast<Eigen::Index>(s.sequence[2])) == 0);
  }

  TEST_CASE("out of range prefix lengths") {
    auto fb = build(fixtures::derivative_pair());
    for (std::size_t v : {std::size_t{0}, fb.solutions[0].length() + 1}) {
      try {
        prefix_vector(fb.solutions[0], v, fb.matrix.num_features());
        FAIL("expected IndexOutOfRange");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IndexOutOfRange);
      }
    }
  }
}

TEST_SUITE("feature properties") {
  // Random corpora drawn from a small expression pool.
  std::vector<SolutionInput> random_corpus(std::mt19937_64& rng, std::size_t n) {
    static const std::vector<std::string> pool = {"x+1", "2x", "x^2", "sin x", "e^x", "1/x",
                                                  "x + x", "3", "x^2+2x+1", "(x+1)^2"};
    std::vector<SolutionInput> out;
    for (std::size_t j = 0; j < n; ++j) {
      std::uniform_int_distribution<std::size_t> len(1, 5), pick(0, pool.size() - 1);
      std::vector<std::string> items;
      for (std::size_t t = len(rng); t > 0; --t) items.push_back(pool[pick(rng)]);
      out.push_back(SolutionInput::from_expressions("s" + std::to_string(j), items));
    }
    return out;
  }

  TEST_CASE("prefix supports grow monotonically") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      auto fb = build(random_corpus(rng, 8));
      for (const auto& s : fb.solutions) {
        for (std::size_t v = 1; v < s.length(); ++v) {
          auto a = prefix_vector(s, v, fb.matrix.num_features());
          auto b = prefix_vector(s, v + 1, fb.matrix.num_features());
          CHECK(((a.array() != 0) <= (b.array() != 0)).all());
        }
      }
    }
  }

  TEST_CASE("permuting solutions permutes columns only") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      auto corpus = random_corpus(rng, 10);
      auto shuffled = corpus;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      auto a = build(corpus);
      auto b = build(shuffled);
      REQUIRE(a.matrix.num_features() == b.matrix.num_features());
      auto rows_a = rows_by_key(a.matrix);
      auto rows_b = rows_by_key(b.matrix);
      for (std::size_t jb = 0; jb < shuffled.size(); ++jb) {
        const auto ja = static_cast<std::size_t>(
            std::stoi(shuffled[jb].learner_id.substr(1)));
        for (const auto& [key, row] : rows_a) CHECK(rows_b[key][jb] == row[ja]);
      }
    }
  }

  TEST_CASE("every row and column is nonzero and keys are unique") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
      auto fb = build(random_corpus(rng, 12));
      const auto& y = fb.matrix.y;
      CHECK((y.rowwise().sum().array() > 0).all());
      CHECK((y.colwise().sum().array() > 0).all());
      CHECK(((y.array() == 0) || (y.array() == 1)).all());
      std::set<std::string> keys(fb.matrix.vocabulary.begin(), fb.matrix.vocabulary.end());
      CHECK(keys.size() == fb.matrix.num_features());
    }
  }
}
