#include "bcv/sbm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bcv/rng.hpp"

namespace bcv {

namespace {

void validate_pi(const std::vector<double>& pi, const char* name) {
  if (pi.empty()) throw std::invalid_argument(std::string(name) + " must be nonempty");
  double sum = 0.0;
  for (double p : pi) {
    if (p < 0.0) throw std::invalid_argument(std::string(name) + " has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument(std::string(name) + " must sum to 1 (got " +
                                std::to_string(sum) + ")");
  }
}

std::vector<int> draw_labels(const std::vector<double>& pi, int n, Rng& rng) {
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = rng.discrete(pi);
  return labels;
}

bool all_nonempty(const std::vector<int>& labels, int K) {
  std::vector<char> seen(K, 0);
  int found = 0;
  for (int c : labels) {
    if (!seen[c]) {
      seen[c] = 1;
      if (++found == K) return true;
    }
  }
  return found == K;
}

}  // namespace

void SbmSpec::validate_block_matrix() const {
  if (K1 < 1 || K2 < 1) throw std::invalid_argument("SbmSpec: K1, K2 must be positive");
  if (B.rows() != K1 || B.cols() != K2) {
    throw std::invalid_argument("SbmSpec: B must be K1 x K2");
  }
  for (int r = 0; r < B.rows(); ++r) {
    for (int c = 0; c < B.cols(); ++c) {
      const double v = B(r, c);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("SbmSpec: B(" + std::to_string(r) + "," +
                                    std::to_string(c) + ") = " + std::to_string(v) +
                                    " outside [0,1]");
      }
    }
  }
}

void SbmSpec::validate() const {
  validate_block_matrix();
  if (const auto* m = std::get_if<MultinomialMembership>(&membership)) {
    validate_pi(m->pi1, "SbmSpec: pi1");
    validate_pi(m->pi2, "SbmSpec: pi2");
    if (static_cast<int>(m->pi1.size()) != K1 || static_cast<int>(m->pi2.size()) != K2) {
      throw std::invalid_argument("SbmSpec: pi lengths must equal K1, K2");
    }
  } else {
    const auto& e = std::get<ExplicitLabels>(membership);
    for (int c : e.c1) {
      if (c < 0 || c >= K1) throw std::invalid_argument("SbmSpec: c1 label out of range");
    }
    for (int c : e.c2) {
      if (c < 0 || c >= K2) throw std::invalid_argument("SbmSpec: c2 label out of range");
    }
  }
}

SbmSample generate_sbm(const SbmSpec& spec, int n1, int n2, std::uint64_t seed) {
  spec.validate();
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("generate_sbm: n1, n2 must be positive");

  Rng rng(derive_seed(seed, 0x5b31ULL));

  std::vector<int> c1, c2;
  if (const auto* e = std::get_if<ExplicitLabels>(&spec.membership)) {
    if (static_cast<int>(e->c1.size()) != n1 || static_cast<int>(e->c2.size()) != n2) {
      throw std::invalid_argument("generate_sbm: explicit label lengths must equal n1, n2");
    }
    c1 = e->c1;
    c2 = e->c2;
  } else {
    // Empty communities make (K1, K2) unidentifiable, so redraw until every
    // community on each side is populated.
    const auto& m = std::get<MultinomialMembership>(spec.membership);
    constexpr int kMaxRetries = 100;
    bool ok = false;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
      c1 = draw_labels(m.pi1, n1, rng);
      c2 = draw_labels(m.pi2, n2, rng);
      if (all_nonempty(c1, spec.K1) && all_nonempty(c2, spec.K2)) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw std::runtime_error(
          "generate_sbm: failed to draw labels with all communities nonempty "
          "after 100 attempts");
    }
  }

  std::vector<std::pair<int, int>> edges;
  const double expected = spec.B.mean() * static_cast<double>(n1) * n2;
  edges.reserve(static_cast<std::size_t>(expected * 1.2) + 16);
  for (int i = 0; i < n1; ++i) {
    const int ki = c1[i];
    for (int j = 0; j < n2; ++j) {
      if (rng.bernoulli(spec.B(ki, c2[j]))) edges.emplace_back(i, j);
    }
  }

  return SbmSample{BipartiteGraph(n1, n2, std::move(edges)),
                   LabelVector(std::move(c1), 1), LabelVector(std::move(c2), 2)};
}

Eigen::MatrixXd true_mean_matrix(const SbmSpec& spec, const LabelVector& c1,
                                 const LabelVector& c2) {
  spec.validate_block_matrix();
  const int n1 = static_cast<int>(c1.size());
  const int n2 = static_cast<int>(c2.size());
  for (int c : c1.labels) {
    if (c < 0 || c >= spec.K1) throw std::invalid_argument("true_mean_matrix: c1 label out of range");
  }
  for (int c : c2.labels) {
    if (c < 0 || c >= spec.K2) throw std::invalid_argument("true_mean_matrix: c2 label out of range");
  }
  Eigen::MatrixXd P(n1, n2);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) P(i, j) = spec.B(c1[i], c2[j]);
  }
  return P;
}

}  // namespace bcv
