#include "mlp/eval/synth.hpp"

#include "mlp/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

namespace mlp::eval {

namespace {

std::size_t stride(const SyntheticSpec& spec) {
  const auto shared = static_cast<std::size_t>(std::lround(spec.overlap * static_cast<double>(spec.support)));
  return std::max<std::size_t>(1, spec.support - std::min(shared, spec.support));
}

std::string feature_key(std::size_t i) { return "(feat " + std::to_string(i) + ")"; }

// Largest-remainder apportionment of n items to the given weights, at least
// one item each.
std::vector<std::size_t> cluster_sizes(const SyntheticSpec& spec) {
  std::vector<double> w = spec.weights;
  if (w.empty()) {
    for (std::size_t c = 0; c < spec.k; ++c) w.push_back(static_cast<double>(spec.k - c));
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  const std::size_t spare = spec.n - spec.k;
  std::vector<std::size_t> sizes(spec.k, 1);
  std::vector<std::pair<double, std::size_t>> rest;
  std::size_t used = 0;
  for (std::size_t c = 0; c < spec.k; ++c) {
    const double exact = static_cast<double>(spare) * w[c] / total;
    const auto whole = static_cast<std::size_t>(std::floor(exact));
    sizes[c] += whole;
    used += whole;
    rest.emplace_back(exact - static_cast<double>(whole), c);
  }
  std::stable_sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; used < spare; ++i, ++used) ++sizes[rest[i % rest.size()].second];
  return sizes;
}

}  // namespace

void SyntheticSpec::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::InvalidSpec, m); };
  if (k < 1) bad("K* must be at least 1");
  if (k > n) bad("K* exceeds N");
  if (support < 1) bad("supports must be nonempty");
  if (support > v) bad("support size exceeds V");
  if (!(overlap >= 0 && overlap < 1)) bad("overlap must lie in [0, 1)");
  if (!(noise >= 0 && noise < 0.5)) bad("noise rate must lie in [0, 0.5)");
  if (!(g_max > 0)) bad("g_max must be positive");
  if (grades.empty()) bad("need at least one cluster grade");
  for (double g : grades) {
    if (!(g >= 0 && g <= g_max)) bad("cluster grade outside [0, g_max]");
  }
  if (!weights.empty()) {
    if (weights.size() != k) bad("weights must have one entry per cluster");
    for (double w : weights) {
      if (!(w > 0) || !std::isfinite(w)) bad("weights must be positive");
    }
  }
}

std::vector<std::size_t> planted_support(const SyntheticSpec& spec, std::size_t c) {
  std::vector<std::size_t> rows;
  const std::size_t start = c * stride(spec);
  for (std::size_t i = 0; i < spec.support; ++i) rows.push_back((start + i) % spec.v);
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

SyntheticCorpus synth_generate(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution flip(spec.noise);

  std::vector<std::size_t> labels;
  const auto sizes = cluster_sizes(spec);
  for (std::size_t c = 0; c < spec.k; ++c) labels.insert(labels.end(), sizes[c], c);
  std::shuffle(labels.begin(), labels.end(), rng);

  std::vector<std::vector<bool>> windows(spec.k, std::vector<bool>(spec.v, false));
  for (std::size_t c = 0; c < spec.k; ++c) {
    for (std::size_t r : planted_support(spec, c)) windows[c][r] = true;
  }

  SyntheticCorpus out;
  out.labels = labels;
  out.dataset.question.id = spec.question_id;
  out.dataset.question.statement = "Planted-cluster corpus";
  out.dataset.question.g_max = spec.g_max;
  const int width = static_cast<int>(std::to_string(spec.n).size());
  for (std::size_t j = 0; j < spec.n; ++j) {
    const std::size_t c = labels[j];
    std::vector<std::string> keys;
    // Redraw the rare all-off solution so nothing comes out blank.
    while (keys.empty()) {
      for (std::size_t r = 0; r < spec.v; ++r) {
        if (windows[c][r] != flip(rng)) keys.push_back(feature_key(r));
      }
    }
    std::shuffle(keys.begin(), keys.end(), rng);
    char id[32];
    std::snprintf(id, sizeof id, "s%0*zu", width, j + 1);
    out.dataset.solutions.push_back(features::SolutionInput::from_keys(id, std::move(keys)));
    const double g = spec.grades[c % spec.grades.size()];
    out.grades.push_back(g);
    out.dataset.grades.emplace_back(g);
  }
  return out;
}

}  // namespace mlp::eval
