#include "doctest.h"

#include "oracles.hpp"

#include "mlp/bayes/gibbs.hpp"
#include "mlp/bayes/grading.hpp"
#include "mlp/bayes/model.hpp"
#include "mlp/bayes/posterior.hpp"
#include "mlp/cluster/assignment.hpp"
#include "mlp/error.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace mlp;
using namespace mlp::bayes;

namespace {

features::FeatureMatrix matrix_from(const Eigen::MatrixXi& y) {
  features::FeatureMatrix m;
  m.y = y;
  for (Eigen::Index i = 0; i < y.rows(); ++i) m.vocabulary.push_back("(feat " + std::to_string(i) + ")");
  return m;
}

Eigen::VectorXi vec(std::initializer_list<int> v) {
  Eigen::VectorXi out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (int x : v) out(i++) = x;
  return out;
}

Eigen::VectorXd vecd(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// K groups on disjoint supports; each member keeps a feature with prob 0.85.
features::FeatureMatrix planted(std::uint64_t seed, int k, int per, int width,
                                std::vector<std::size_t>& truth) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(0.85);
  Eigen::MatrixXi y = Eigen::MatrixXi::Zero(k * width, k * per);
  truth.clear();
  for (int c = 0; c < k; ++c) {
    for (int m = 0; m < per; ++m) {
      const int j = c * per + m;
      truth.push_back(static_cast<std::size_t>(c));
      for (int f = 0; f < width; ++f) y(c * width + f, j) = keep(rng);
      y(c * width, j) = 1;
    }
  }
  return matrix_from(y);
}

}  // namespace

TEST_SUITE("likelihood and prior") {
  TEST_CASE("multinomial likelihood") {
    CHECK(multinomial_log_likelihood(vec({1, 0}), vecd({0.5, 0.5})) == doctest::Approx(std::log(0.5)));
    CHECK(multinomial_log_likelihood(vec({1, 1, 0}), vecd({0.2, 0.3, 0.5})) ==
          doctest::Approx(std::log(0.06)));
    CHECK_THROWS_AS(multinomial_log_likelihood(vec({0, 0}), vecd({0.5, 0.5})), Error);
  }

  TEST_CASE("sparse and dense likelihood agree") {
    const Eigen::VectorXd phi = vecd({0.1, 0.2, 0.3, 0.4});
    const features::SparseColumn col = {{0, 2}, {3, 1}};
    CHECK(multinomial_log_likelihood(col, phi.array().log().matrix()) ==
          doctest::Approx(multinomial_log_likelihood(vec({2, 0, 0, 1}), phi)));
  }

  TEST_CASE("CRP conditional") {
    const std::vector<std::size_t> sizes = {2, 1};
    auto m = crp_conditional(sizes, 4, 1.0);
    CHECK(m.occupied[0] == doctest::Approx(0.5));
    CHECK(m.occupied[1] == doctest::Approx(0.25));
    CHECK(m.fresh == doctest::Approx(0.25));

    auto lone = crp_conditional(std::vector<std::size_t>{}, 1, 0.7);
    CHECK(lone.fresh == doctest::Approx(1.0));

    auto tiny = crp_conditional(sizes, 4, 1e-12);
    CHECK(tiny.fresh < 1e-11);

    try {
      crp_conditional(sizes, 5, 1.0);
      FAIL("expected CountMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CountMismatch);
    }
  }

  TEST_CASE("CRP masses sum to one") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 200; ++t) {
      std::uniform_int_distribution<std::size_t> ks(0, 6), sz(1, 9);
      std::vector<std::size_t> sizes(ks(rng));
      for (auto& s : sizes) s = sz(rng);
      const std::size_t n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) + 1;
      const double alpha = std::exp(std::uniform_real_distribution<double>(-5, 5)(rng));
      auto m = crp_conditional(sizes, n, alpha);
      const double total = std::accumulate(m.occupied.begin(), m.occupied.end(), m.fresh);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_SUITE("new cluster marginal") {
  TEST_CASE("closed cases") {
    CHECK(new_cluster_log_marginal(vec({4}), 0.3) == doctest::Approx(0.0));
    CHECK(new_cluster_log_marginal(vec({1, 0}), 1.0) == doctest::Approx(std::log(0.5)));
    CHECK(new_cluster_log_marginal(vec({1, 1}), 1.0) == doctest::Approx(std::log(1.0 / 6)));
  }

  TEST_CASE("agrees with simplex quadrature") {
    std::mt19937_64 rng(17);
    std::bernoulli_distribution bit(0.5);
    for (int v : {2, 3}) {
      for (double beta : {0.5, 1.0, 2.0}) {
        for (int t = 0; t < 5; ++t) {
          std::vector<int> y(static_cast<std::size_t>(v));
          do {
            for (auto& x : y) x = bit(rng);
          } while (std::all_of(y.begin(), y.end(), [](int x) { return x == 0; }));
          Eigen::VectorXi ye(v);
          for (int i = 0; i < v; ++i) ye(i) = y[static_cast<std::size_t>(i)];
          const double got = std::exp(new_cluster_log_marginal(ye, beta));
          const double want = oracle::simplex_marginal(y, beta);
          CHECK(std::abs(got - want) / want <= 1e-6);
        }
      }
    }
  }
}

TEST_SUITE("hyperparameters") {
  TEST_CASE("alpha draws stay positive") {
    Rng rng(3);
    double a = 1;
    for (int i = 0; i < 100000; ++i) {
      a = sample_alpha(5, 100, a, 1, 1, rng);
      REQUIRE(a > 0);
    }
  }

  TEST_CASE("alpha chain mean matches quadrature") {
    for (auto [k, n] : {std::pair<std::size_t, std::size_t>{5, 100}, {1, 1}}) {
      Rng rng(k * 131 + n);
      double a = 1;
      std::vector<double> xs;
      for (int i = 0; i < 1000; ++i) a = sample_alpha(k, n, a, 1, 1, rng);
      for (int i = 0; i < 100000; ++i) {
        a = sample_alpha(k, n, a, 1, 1, rng);
        xs.push_back(a);
      }
      const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
      const double want = oracle::alpha_posterior_mean(k, n, 1, 1);
      CHECK(std::abs(mean - want) <= 3 * oracle::batch_standard_error(xs));
    }
  }

  TEST_CASE("beta fixed point matches the evidence maximum") {
    std::mt19937_64 rng(5);
    int checked = 0;
    for (int t = 0; t < 5; ++t) {
      Eigen::MatrixXd counts(8, 3);
      for (Eigen::Index c = 0; c < 3; ++c) {
        // skewed columns so the optimum is finite
        std::gamma_distribution<double> g(0.4, 1.0);
        Eigen::VectorXd p(8);
        for (Eigen::Index i = 0; i < 8; ++i) p(i) = g(rng) + 1e-9;
        p /= p.sum();
        std::discrete_distribution<int> draw(p.data(), p.data() + 8);
        counts.col(c).setZero();
        for (int m = 0; m < 40; ++m) counts(draw(rng), c) += 1;
      }
      const auto r = update_beta(counts, 1.0);
      REQUIRE_FALSE(r.capped);
      CHECK(std::abs(r.beta - oracle::beta_argmax(counts)) <= 1e-3);
      // stationary: one more application barely moves it
      const auto again = update_beta(counts, r.beta, BetaOptions{1});
      CHECK(std::abs(again.beta - r.beta) / r.beta < 1e-8);
      ++checked;
    }
    CHECK(checked == 5);
  }

  TEST_CASE("uniform counts push beta to the cap") {
    Eigen::MatrixXd counts = Eigen::MatrixXd::Constant(5, 1, 4.0);
    const auto r = update_beta(counts, 1.0);
    CHECK(r.capped);
    CHECK(r.beta == 1e6);
  }

  TEST_CASE("all-zero counts leave beta unchanged") {
    const auto r = update_beta(Eigen::MatrixXd::Zero(3, 2), 0.7);
    CHECK(r.beta == 0.7);
  }

  TEST_CASE("log Dirichlet draws lie on the simplex even for tiny parameters") {
    Rng rng(9);
    for (double b : {1e-6, 1e-3, 0.5, 3.0}) {
      auto lp = sample_log_dirichlet(Eigen::VectorXd::Constant(20, b), rng);
      CHECK(lp.allFinite());
      CHECK(lp.array().exp().sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_SUITE("gibbs") {
  TEST_CASE("identical solutions collapse to one cluster") {
    Eigen::MatrixXi y = Eigen::MatrixXi::Zero(6, 20);
    y.topRows(3).setOnes();
    ModelHyperparams hp;
    hp.iterations = 600;
    hp.burn_in = 100;
    hp.seed = 4;
    const auto trace = gibbs_run(matrix_from(y), hp);
    const auto s = summarize_posterior(trace.samples);
    CHECK(s.k_hat == 1);
    CHECK(s.k_hat_probability() >= 0.95);
  }

  TEST_CASE("exhaustive one- vs two-cluster posterior for identical copies") {
    // CRP mass of a partition is alpha^K prod Gamma(n_k) up to a K-free factor,
    // and each block contributes its Dirichlet-multinomial evidence
    const int n = 20;
    auto block = [](int size) {
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(6, 1);
      c.topRows(3).setConstant(size);
      return c;
    };
    auto p_one = [&](double alpha, double beta) {
      const double single = std::log(alpha) + std::lgamma(n) + oracle::log_evidence(block(n), beta);
      std::vector<double> splits;
      for (int m = 1; m < n; ++m) {
        // C(n, m) / 2 unordered partitions with these block sizes
        const double ways =
            std::lgamma(n + 1) - std::lgamma(m + 1) - std::lgamma(n - m + 1) - std::log(2.0);
        splits.push_back(ways + 2 * std::log(alpha) + std::lgamma(m) + std::lgamma(n - m) +
                         oracle::log_evidence(block(m), beta) +
                         oracle::log_evidence(block(n - m), beta));
      }
      double top = single;
      for (double s : splits) top = std::max(top, s);
      double mass_two = 0;
      for (double s : splits) mass_two += std::exp(s - top);
      return std::exp(single - top) / (std::exp(single - top) + mass_two);
    };
    CHECK(p_one(1.0, 1.0) > 0.5);
    // the sampler tunes beta to the evidence maximum, where one cluster dominates
    CHECK(p_one(1.0, oracle::beta_argmax(block(n))) >= 0.95);
  }

  TEST_CASE("counts stay consistent after every sweep") {
    std::vector<std::size_t> truth;
    auto y = planted(8, 3, 10, 5, truth);
    ModelHyperparams hp;
    hp.iterations = 200;
    hp.burn_in = 50;
    hp.check_invariants = true;
    CHECK_NOTHROW(gibbs_run(y, hp));
  }

  TEST_CASE("recovers planted clusters") {
    std::vector<std::size_t> truth;
    auto y = planted(2, 4, 15, 6, truth);
    ModelHyperparams hp;
    hp.iterations = 1500;
    hp.burn_in = 300;
    hp.seed = 11;
    const auto s = summarize_posterior(gibbs_run(y, hp).samples);
    CHECK(s.k_hat == 4);
    CHECK(cluster::adjusted_rand_index(s.z_hat, truth) >= 0.9);
    for (Eigen::Index k = 0; k < s.phi_hat.cols(); ++k) {
      CHECK(s.phi_hat.col(k).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("deterministic and resumable") {
    std::vector<std::size_t> truth;
    auto y = planted(3, 3, 8, 4, truth);
    ModelHyperparams hp;
    hp.iterations = 300;
    hp.burn_in = 100;
    hp.seed = 77;
    const auto a = gibbs_run(y, hp);
    const auto b = gibbs_run(y, hp);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t l = 0; l < a.samples.size(); ++l) {
      CHECK(a.samples[l].z == b.samples[l].z);
      CHECK(a.samples[l].phi == b.samples[l].phi);
      CHECK(a.samples[l].log_likelihood == b.samples[l].log_likelihood);
    }

    auto half = hp;
    half.iterations = 170;
    auto partial = gibbs_run(y, half);
    partial.hyperparams.iterations = 300;
    const auto resumed = gibbs_resume(y, partial);
    REQUIRE(resumed.samples.size() == a.samples.size());
    CHECK(resumed.k_history == a.k_history);
    for (std::size_t l = 0; l < a.samples.size(); ++l) {
      CHECK(resumed.samples[l].phi == a.samples[l].phi);
      CHECK(resumed.samples[l].alpha == a.samples[l].alpha);
    }
  }

  TEST_CASE("too few solutions") {
    CHECK_THROWS_AS(gibbs_run(matrix_from(Eigen::MatrixXi::Ones(2, 1)), ModelHyperparams{}), Error);
  }
}

TEST_SUITE("posterior summary") {
  TraceSample sample(std::vector<std::size_t> z, Eigen::MatrixXd phi, double ll) {
    TraceSample s;
    s.k = static_cast<std::size_t>(phi.cols());
    s.z = std::move(z);
    s.phi = std::move(phi);
    s.log_likelihood = ll;
    return s;
  }

  Eigen::MatrixXd two_cols(double a, double b) {
    Eigen::MatrixXd m(2, 2);
    m << a, b,
         1 - a, 1 - b;
    return m;
  }

  TEST_CASE("K-hat is the mode, ties to the smaller K") {
    std::vector<TraceSample> t;
    for (std::size_t k : {3, 3, 4, 3}) {
      t.push_back(sample(std::vector<std::size_t>(4, 0), Eigen::MatrixXd::Constant(2, k, 0.5), 0));
    }
    CHECK(summarize_posterior(t).k_hat == 3);
    t.pop_back();
    t.push_back(sample(std::vector<std::size_t>(4, 0), Eigen::MatrixXd::Constant(2, 4, 0.5), 0));
    CHECK(summarize_posterior(t).k_hat == 3);  // 2 vs 2
  }

  TEST_CASE("swapped labels are realigned") {
    std::vector<TraceSample> plain, swapped;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);
    for (int l = 0; l < 40; ++l) {
      const double a = 0.9 + jitter(rng);
      const double b = 0.2 + jitter(rng);
      const double ll = -10.0 - l * 0.01 + (l == 7 ? 5 : 0);
      plain.push_back(sample({0, 0, 1}, two_cols(a, b), ll));
      if (l % 2) {
        swapped.push_back(sample({1, 1, 0}, two_cols(b, a), ll));
      } else {
        swapped.push_back(plain.back());
      }
    }
    const auto p = summarize_posterior(plain);
    const auto s = summarize_posterior(swapped);
    CHECK((p.phi_hat - s.phi_hat).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(p.z_hat == s.z_hat);
    CHECK(p.l_max == 7);

    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(2, 2);
    for (const auto& x : plain) mean += x.phi;
    mean /= 40.0;
    CHECK((s.phi_hat - mean).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("a fixed relabeling of every sample changes nothing") {
    std::mt19937_64 rng(10);
    std::vector<TraceSample> t, relabeled;
    const std::vector<std::size_t> perm = {2, 0, 1};
    for (int l = 0; l < 30; ++l) {
      Eigen::MatrixXd phi(4, 3);
      for (Eigen::Index i = 0; i < phi.size(); ++i) phi(i) = std::uniform_real_distribution<double>(0.1, 1)(rng);
      phi = phi.array().rowwise() / phi.colwise().sum().array();
      std::vector<std::size_t> z(6);
      for (auto& x : z) x = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
      t.push_back(sample(z, phi, -l * 0.3));
      Eigen::MatrixXd q(4, 3);
      std::vector<std::size_t> zq(6);
      for (std::size_t c = 0; c < 3; ++c) q.col(static_cast<Eigen::Index>(perm[c])) = phi.col(static_cast<Eigen::Index>(c));
      for (std::size_t j = 0; j < 6; ++j) zq[j] = perm[z[j]];
      relabeled.push_back(sample(zq, q, -l * 0.3));
    }
    const auto a = summarize_posterior(t);
    const auto b = summarize_posterior(relabeled);
    CHECK(a.phi_hat == b.phi_hat);
    CHECK(a.z_hat == b.z_hat);
  }

  TEST_CASE("empty trace") {
    try {
      summarize_posterior({});
      FAIL("expected EmptyTrace");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptyTrace);
    }
  }

  TEST_CASE("hungarian matches brute force") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 50; ++t) {
      const int n = 1 + t % 6;
      Eigen::MatrixXd c(n, n);
      for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = std::uniform_real_distribution<double>(0, 10)(rng);
      const auto h = hungarian(c);
      double got = 0;
      for (int r = 0; r < n; ++r) got += c(r, static_cast<Eigen::Index>(h[r]));
      std::vector<int> p(n);
      std::iota(p.begin(), p.end(), 0);
      double best = 1e300;
      do {
        double s = 0;
        for (int r = 0; r < n; ++r) s += c(r, p[r]);
        best = std::min(best, s);
      } while (std::next_permutation(p.begin(), p.end()));
      CHECK(got == doctest::Approx(best));
    }
  }
}

TEST_SUITE("grading") {
  TEST_CASE("weighted grade") {
    Eigen::MatrixXd phi(2, 2);
    phi << 0.5, 0.5,
           0.5, 0.5;
    CHECK(grade_b(vec({1, 0}), phi, {3, 0}) == doctest::Approx(1.5));
    CHECK(grade_b(vec({1, 1}), phi, {2, 2}) == doctest::Approx(2));

    Eigen::MatrixXd skew(2, 2);
    skew << 0.99, 0.01,
            0.01, 0.99;
    CHECK(grade_b(vec({1, 0}), skew, {3, 0}) == doctest::Approx(2.97));
  }

  TEST_CASE("missing grades") {
    try {
      grade_b(vec({1, 0}), Eigen::MatrixXd::Constant(2, 2, 0.5), {3});
      FAIL("expected MissingGrades");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MissingGrades);
    }
  }

  TEST_CASE("rounding is half away from zero") {
    CHECK(round_grade(2.5) == 3);
    CHECK(round_grade(1.5) == 2);
    CHECK(round_grade(0.49) == 0);
  }

  TEST_CASE("representatives under the Bayesian rule") {
    Eigen::MatrixXi y(4, 4);
    y << 1, 1, 0, 0,
         1, 1, 0, 0,
         0, 1, 1, 1,
         0, 0, 1, 1;
    Eigen::MatrixXd phi(4, 2);
    phi << 0.49, 0.01,
           0.49, 0.01,
           0.01, 0.49,
           0.01, 0.49;
    auto reps = select_representatives_b(phi, matrix_from(y));
    CHECK(reps.method == cluster::RepresentativeMethod::Bayesian);
    CHECK(reps.indices == std::vector<std::size_t>{0, 2});

    auto single = select_representatives_b(Eigen::MatrixXd::Constant(4, 1, 0.25), matrix_from(y));
    CHECK(single.indices == std::vector<std::size_t>{0});  // shortest solutions tie, lowest index wins

    // Unrestricted, the short column 0 wins both clusters of a flat phi.
    Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(4, 2, 0.25);
    CHECK(select_representatives_b(flat, matrix_from(y)).indices == std::vector<std::size_t>{0, 0});
    const std::vector<std::size_t> labels{0, 0, 1, 1};
    CHECK(select_representatives_b(flat, matrix_from(y), labels).indices == std::vector<std::size_t>{0, 2});
    // An empty cluster falls back to every solution.
    const std::vector<std::size_t> lumped{0, 0, 0, 0};
    auto shared = select_representatives_b(flat, matrix_from(y), lumped);
    CHECK(shared.indices == std::vector<std::size_t>{0, 0});
    CHECK(shared.shared() == std::vector<std::size_t>{0});
    CHECK_THROWS(select_representatives_b(flat, matrix_from(y), std::vector<std::size_t>{0, 1}));
  }

  TEST_CASE("grades stay within the instructor range and full prefix equals the grade") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 100; ++t) {
      const int v = 6, k = 3;
      Eigen::MatrixXd phi(v, k);
      for (Eigen::Index i = 0; i < phi.size(); ++i) phi(i) = std::uniform_real_distribution<double>(0.01, 1)(rng);
      phi = phi.array().rowwise() / phi.colwise().sum().array();
      std::vector<double> grades(k);
      for (auto& g : grades) g = std::uniform_int_distribution<int>(0, 3)(rng);

      features::SolutionFeatures s;
      const int len = std::uniform_int_distribution<int>(1, 5)(rng);
      for (int e = 0; e < len; ++e) s.sequence.push_back(std::uniform_int_distribution<std::size_t>(0, v - 1)(rng));
      s.keys.assign(s.sequence.size(), "k");
      const Eigen::VectorXi full = features::prefix_vector(s, s.length(), v);

      const double g = grade_b(full, phi, grades);
      CHECK(g >= *std::min_element(grades.begin(), grades.end()));
      CHECK(g <= *std::max_element(grades.begin(), grades.end()));
      const auto fb = feedback_trace(s, phi, grades, 3.0);
      CHECK(std::abs(fb.steps.back().expected_grade - g) <= 1e-12);
      for (const auto& step : fb.steps) {
        CHECK(step.p_incorrect >= 0);
        CHECK(step.p_incorrect <= 1);
      }
    }
  }

  TEST_CASE("likelihood scaling leaves feedback unchanged") {
    Eigen::MatrixXd phi(3, 2);
    phi << 0.6, 0.1,
           0.3, 0.3,
           0.1, 0.6;
    features::SolutionFeatures s;
    s.sequence = {0, 1, 2, 0};
    s.keys = {"a", "b", "c", "a"};
    // scaling the first row for every cluster multiplies each likelihood by the same constant
    Eigen::MatrixXd scaled = phi;
    scaled.row(0) *= 0.37;
    for (const std::vector<double>& grades : {std::vector<double>{3, 1}, {0, 3}, {2, 2}}) {
      const auto a = feedback_trace(s, phi, grades, 3.0);
      const auto b = feedback_trace(s, scaled, grades, 3.0);
      for (std::size_t v = 0; v < a.steps.size(); ++v) {
        CHECK(std::abs(a.steps[v].expected_grade - b.steps[v].expected_grade) <= 1e-12);
        CHECK(std::abs(a.steps[v].p_incorrect - b.steps[v].p_incorrect) <= 1e-12);
      }
      CHECK(a.first_alert == b.first_alert);
    }
  }

  TEST_CASE("alerts fire at the first low expected grade") {
    Eigen::MatrixXd phi(3, 2);
    phi << 0.90, 0.05,
           0.05, 0.90,
           0.05, 0.05;
    features::SolutionFeatures s;
    s.sequence = {0, 1, 1};
    s.keys = {"a", "b", "b"};
    const auto fb = feedback_trace(s, phi, {3, 0}, 3.0);
    CHECK_FALSE(fb.steps[0].alert);
    CHECK(fb.steps[1].alert);
    REQUIRE(fb.first_alert.has_value());
    CHECK(*fb.first_alert == 2);

    const auto none = feedback_trace(s, phi, {3, 3}, 3.0);
    CHECK_FALSE(none.first_alert.has_value());
    for (const auto& step : none.steps) CHECK(step.p_incorrect == 0);
  }
}
