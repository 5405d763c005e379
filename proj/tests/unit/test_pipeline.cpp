#include "doctest.h"

#include "temp_dir.hpp"

#include "mlp/error.hpp"
#include "mlp/eval/synth.hpp"
#include "mlp/io/dataset_io.hpp"
#include "mlp/pipeline.hpp"

#include <cmath>
#include <functional>

using namespace mlp;
using mlp::testing::fixture;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error");
  return ErrorKind::Io;
}

eval::SyntheticCorpus corpus(std::uint64_t seed = 1) {
  eval::SyntheticSpec spec;
  spec.n = 48;
  spec.v = 40;
  spec.k = 4;
  spec.support = 8;
  spec.grades = {3, 2, 1, 0};
  spec.seed = seed;
  return eval::synth_generate(spec);
}

AnalysisOptions bayes_options() {
  AnalysisOptions o;
  o.method = Method::Bayes;
  o.bayes.iterations = 400;
  o.bayes.burn_in = 150;
  return o;
}

std::map<std::string, double> all_reps(const Analysis& a, double g) {
  std::map<std::string, double> out;
  for (const auto& id : a.representative_ids()) out[id] = g;
  return out;
}

// Representatives graded with the planted truth.
std::map<std::string, double> truth_reps(const Analysis& a, const eval::SyntheticCorpus& c) {
  std::map<std::string, double> out;
  for (const auto& id : a.representative_ids()) out[id] = c.grades[a.index_of(id)];
  return out;
}

}  // namespace

TEST_CASE("method names") {
  for (Method m : {Method::Spectral, Method::Affinity, Method::Bayes}) CHECK(parse_method(to_string(m)) == m);
  CHECK(parse_method("spectral") == Method::Spectral);
  CHECK(kind_of([] { parse_method("kmeans"); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("spectral clustering requires a K in range") {
  const auto c = corpus();
  AnalysisOptions o;
  o.method = Method::Spectral;
  CHECK(kind_of([&] { run_analysis(c.dataset, o); }) == ErrorKind::InvalidArgument);
  o.k = 0;
  CHECK(kind_of([&] { run_analysis(c.dataset, o); }) == ErrorKind::InvalidArgument);
  o.k = 49;
  CHECK(kind_of([&] { run_analysis(c.dataset, o); }) == ErrorKind::InvalidArgument);
  o.k = 48;
  CHECK(run_analysis(c.dataset, o).assignment.k == 48);
}

TEST_CASE("blank solutions never reach the clustering") {
  const Dataset d = io::load_dataset(fixture("blank_filter.json"));
  Dataset raw = d;
  raw.solutions.push_back(features::SolutionInput::from_body("z", "   "));
  raw.grades.push_back(1.0);
  const Analysis a = run_analysis(raw, AnalysisOptions{});
  CHECK(a.size() == 2);
  CHECK(a.dataset.filtered.back() == "z");
  CHECK(kind_of([&] { a.index_of("z"); }) == ErrorKind::IndexOutOfRange);
}

TEST_CASE("grade report errors") {
  const auto c = corpus();
  for (Method m : {Method::Affinity, Method::Bayes}) {
    AnalysisOptions o = bayes_options();
    o.method = m;
    const Analysis a = run_analysis(c.dataset, o);
    auto g = all_reps(a, 1);

    auto missing = g;
    missing.erase(missing.begin());
    CHECK(kind_of([&] { grade_report(a, missing); }) == ErrorKind::MissingGrades);
    CHECK(kind_of([&] { grade_report(a, {}); }) == ErrorKind::MissingGrades);

    auto unknown = g;
    unknown["nobody"] = 1;
    CHECK(kind_of([&] { grade_report(a, unknown); }) == ErrorKind::IndexOutOfRange);

    auto too_high = g;
    too_high.begin()->second = 3.5;
    CHECK(kind_of([&] { grade_report(a, too_high); }) == ErrorKind::InvalidArgument);
    too_high.begin()->second = std::nan("");
    CHECK(kind_of([&] { grade_report(a, too_high); }) == ErrorKind::InvalidArgument);

    auto extra = g;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (!g.count(a.id(j))) {
        extra[a.id(j)] = 1;
        break;
      }
    }
    CHECK(kind_of([&] { grade_report(a, extra); }) == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("one grade everywhere propagates unchanged") {
  const auto c = corpus(3);
  for (Method m : {Method::Spectral, Method::Affinity, Method::Bayes}) {
    CAPTURE(to_string(m));
    AnalysisOptions o = bayes_options();
    o.method = m;
    o.k = 4;
    const Analysis a = run_analysis(c.dataset, o);
    const auto r = grade_report(a, all_reps(a, 2));
    CHECK(r.entries.size() == a.size());
    for (const auto& e : r.entries) {
      CHECK(e.grade == doctest::Approx(2.0).epsilon(1e-12));
      CHECK(e.rounded == 2.0);
    }
  }
}

TEST_CASE("report entries agree with the analysis") {
  const auto c = corpus(4);
  for (Method m : {Method::Spectral, Method::Affinity, Method::Bayes}) {
    CAPTURE(to_string(m));
    AnalysisOptions o = bayes_options();
    o.method = m;
    o.k = 4;
    const Analysis a = run_analysis(c.dataset, o);
    const auto grades = truth_reps(a, c);
    const auto r = grade_report(a, grades);
    CHECK(r.method == m);
    CHECK(r.g_max == 3);
    CHECK(r.cluster_grades.size() == a.representatives.indices.size());
    std::size_t reps = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const auto& e = r.entries[j];
      CHECK(e.id == a.id(j));
      CHECK(e.cluster == a.assignment.labels[j]);
      CHECK(e.grade >= 0);
      CHECK(e.grade <= 3);
      CHECK(e.rounded == std::round(e.grade));
      if (e.representative) {
        ++reps;
        CHECK(e.grade == grades.at(e.id));
      } else if (m != Method::Bayes) {
        CHECK(e.grade == r.cluster_grades[e.cluster]);
      }
    }
    CHECK(reps == grades.size());
  }
}

TEST_CASE("feedback needs a Bayesian analysis") {
  const auto c = corpus(5);
  AnalysisOptions o;
  const Analysis ap = run_analysis(c.dataset, o);
  CHECK(kind_of([&] { solution_feedback(ap, all_reps(ap, 3), ap.id(0)); }) == ErrorKind::InvalidArgument);

  const Analysis b = run_analysis(c.dataset, bayes_options());
  const auto grades = truth_reps(b, c);
  CHECK(kind_of([&] { solution_feedback(b, grades, "nobody"); }) == ErrorKind::IndexOutOfRange);
  CHECK(kind_of([&] { solution_feedback(b, {}, b.id(0)); }) == ErrorKind::MissingGrades);

  const auto report = grade_report(b, grades);
  for (std::size_t j = 0; j < b.size(); ++j) {
    const auto f = solution_feedback(b, grades, b.id(j));
    REQUIRE(f.steps.size() == b.features.solutions[j].length());
    // The full prefix is the whole solution.
    if (!report.entries[j].representative) {
      CHECK(f.steps.back().expected_grade == doctest::Approx(report.entries[j].grade).epsilon(1e-9));
    }
    if (f.first_alert) {
      CHECK(f.steps[*f.first_alert - 1].alert);
      for (std::size_t v = 0; v + 1 < *f.first_alert; ++v) CHECK_FALSE(f.steps[v].alert);
    }
  }
}

TEST_CASE("resuming needs the Bayesian method and a matching trace") {
  const auto c = corpus(6);
  const Analysis b = run_analysis(c.dataset, bayes_options());
  AnalysisOptions ap;
  CHECK(kind_of([&] { resume_analysis(c.dataset, ap, *b.trace); }) == ErrorKind::InvalidArgument);
  const auto other = corpus(7);
  Dataset smaller = other.dataset;
  smaller.solutions.pop_back();
  smaller.grades.pop_back();
  CHECK(kind_of([&] { resume_analysis(smaller, bayes_options(), *b.trace); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("analyses are deterministic in the seed") {
  const auto c = corpus(8);
  for (Method m : {Method::Spectral, Method::Affinity, Method::Bayes}) {
    AnalysisOptions o = bayes_options();
    o.method = m;
    o.k = 5;
    o.seed = 17;
    const Analysis a = run_analysis(c.dataset, o);
    const Analysis b = run_analysis(c.dataset, o);
    CHECK(a.assignment.labels == b.assignment.labels);
    CHECK(a.representatives.indices == b.representatives.indices);
  }
}
