// Shared test helpers: seeded generators for random instances and naive
// loop-based reference evaluations, kept independent of the library's
// Eigen-product implementations.
#pragma once

#include <random>
#include <vector>

#include "mixer/types.hpp"

namespace testutil {

inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline mixer::ViewPartition random_partition(std::mt19937_64& rng,
                                             int max_views, int max_card) {
  const int n = 1 + static_cast<int>(u01(rng) * max_views);
  std::vector<int> cards;
  for (int i = 0; i < n; ++i)
    cards.push_back(1 + static_cast<int>(u01(rng) * max_card));
  return mixer::ViewPartition(cards);
}

inline mixer::Matrix random_affinity_values(int m, std::mt19937_64& rng) {
  mixer::Matrix S(m, m);
  for (int a = 0; a < m; ++a) {
    S(a, a) = 1.0;
    for (int b = a + 1; b < m; ++b) {
      const double v = u01(rng);
      S(a, b) = v;
      S(b, a) = v;
    }
  }
  return S;
}

inline mixer::AffinityMatrix random_affinity(const mixer::ViewPartition& p,
                                             std::mt19937_64& rng) {
  return mixer::AffinityMatrix(p, random_affinity_values(p.total(), rng));
}

/// Random point of the row-wise simplex (normalized positive rows).
inline mixer::Matrix random_row_stochastic(int m, std::mt19937_64& rng) {
  mixer::Matrix U(m, m);
  for (int r = 0; r < m; ++r) {
    double sum = 0.0;
    for (int c = 0; c < m; ++c) {
      U(r, c) = u01(rng) + 1e-12;
      sum += U(r, c);
    }
    for (int c = 0; c < m; ++c) U(r, c) /= sum;
  }
  return U;
}

/// Random binary matrix with exactly one 1 per row.
inline mixer::Matrix random_binary_rows(int m, std::mt19937_64& rng) {
  mixer::Matrix U = mixer::Matrix::Zero(m, m);
  for (int r = 0; r < m; ++r)
    U(r, static_cast<int>(u01(rng) * m)) = 1.0;
  return U;
}

// Naive loop evaluations straight from the definitions.

inline double naive_phi_orth(const mixer::Matrix& U, const mixer::Matrix& Po) {
  const int m = static_cast<int>(U.rows());
  double out = 0.0;
  for (int c1 = 0; c1 < m; ++c1)
    for (int c2 = 0; c2 < m; ++c2) {
      double utu = 0.0;
      for (int r = 0; r < m; ++r) utu += U(r, c1) * U(r, c2);
      out += utu * Po(c1, c2);
    }
  return out;
}

inline double naive_phi_dist(const mixer::Matrix& U, const mixer::Matrix& Pd) {
  const int m = static_cast<int>(U.rows());
  double out = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double uut = 0.0;
      for (int c = 0; c < m; ++c) uut += U(a, c) * U(b, c);
      out += uut * Pd(a, b);
    }
  return out;
}

inline double naive_data_term(const mixer::Matrix& U, const mixer::Matrix& S) {
  const int m = static_cast<int>(U.rows());
  double out = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double uut = 0.0;
      for (int c = 0; c < m; ++c) uut += U(a, c) * U(b, c);
      out += uut * (1.0 - 2.0 * S(a, b));
    }
  return out;
}

inline double naive_objective(const mixer::Matrix& U, const mixer::Matrix& S,
                              double d, const mixer::PenaltyPair& P) {
  return naive_data_term(U, S) +
         d * (naive_phi_orth(U, P.p_orth) + naive_phi_dist(U, P.p_dist));
}

inline double naive_frobenius(const mixer::Matrix& U, const mixer::Matrix& S) {
  const int m = static_cast<int>(U.rows());
  double out = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double uut = 0.0;
      for (int c = 0; c < m; ++c) uut += U(a, c) * U(b, c);
      const double r = uut - S(a, b);
      out += r * r;
    }
  return out;
}

/// Central finite differences of the naive objective.
inline mixer::Matrix fd_gradient(const mixer::Matrix& U,
                                 const mixer::Matrix& S, double d,
                                 const mixer::PenaltyPair& P,
                                 double h = 1e-6) {
  const int m = static_cast<int>(U.rows());
  mixer::Matrix g(m, m);
  mixer::Matrix W = U;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      const double saved = W(r, c);
      W(r, c) = saved + h;
      const double plus = naive_objective(W, S, d, P);
      W(r, c) = saved - h;
      const double minus = naive_objective(W, S, d, P);
      W(r, c) = saved;
      g(r, c) = (plus - minus) / (2.0 * h);
    }
  return g;
}

}  // namespace testutil
