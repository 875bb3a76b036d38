#pragma once

/**
 * Set partitions of [m] and the combinatorial formulas built on them:
 * the partition moment formula for rho^[m](f_1 (x) ... (x) f_m) with
 * (|block|-1)! weights, and the alternating rising-factorial summation
 * identity used by the pathwise-gradient reduction.
 */

#include "dfcalc/bracket.hpp"
#include "dfcalc/measure.hpp"
#include "dfcalc/scalar.hpp"
#include "dfcalc/tensor.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace dfcalc {

struct SetPartition {
  std::vector<std::vector<int>> blocks;  // disjoint, nonempty, covering 0..m-1
};

/// Streams every set partition of {0..m-1} exactly once (restricted growth
/// strings in lexicographic order).
template <class Fn>
void for_each_partition(int m, Fn&& fn) {
  if (m < 1) throw std::invalid_argument("for_each_partition: m >= 1 required");
  std::vector<int> rgs(static_cast<std::size_t>(m), 0);
  auto emit = [&]() {
    int nblocks = 0;
    for (int v : rgs) nblocks = std::max(nblocks, v + 1);
    SetPartition p;
    p.blocks.assign(static_cast<std::size_t>(nblocks), {});
    for (int i = 0; i < m; ++i) p.blocks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])].push_back(i);
    fn(p);
  };
  while (true) {
    emit();
    // next restricted growth string: rgs[i] <= 1 + max(rgs[0..i-1])
    int i = m - 1;
    for (; i > 0; --i) {
      int mx = 0;
      for (int jj = 0; jj < i; ++jj) mx = std::max(mx, rgs[static_cast<std::size_t>(jj)]);
      if (rgs[static_cast<std::size_t>(i)] <= mx) break;
    }
    if (i == 0) return;
    rgs[static_cast<std::size_t>(i)] += 1;
    for (int jj = i + 1; jj < m; ++jj) rgs[static_cast<std::size_t>(jj)] = 0;
  }
}

inline std::vector<SetPartition> partitions(int m) {
  std::vector<SetPartition> out;
  for_each_partition(m, [&](const SetPartition& p) { out.push_back(p); });
  return out;
}

/// rho^[m](f_1 (x) ... (x) f_m) = sum over partitions sigma of
/// prod_blocks (|I|-1)! rho(prod_{k in I} f_k).
template <class S>
S moment_partition_formula(const FiniteMeasure<S>& rho, const std::vector<TensorFn<S>>& fs) {
  const int m = static_cast<int>(fs.size());
  if (m < 1) throw std::invalid_argument("moment_partition_formula: m >= 1");
  for (const auto& f : fs)
    if (f.order() != 1 || f.dims() != rho.dims())
      throw std::invalid_argument("moment_partition_formula: factors must be one-variable");
  S total = scalar_traits<S>::zero();
  for_each_partition(m, [&](const SetPartition& p) {
    S term = scalar_traits<S>::one();
    for (const auto& block : p.blocks) {
      term *= factorial_s<S>(static_cast<int>(block.size()) - 1);
      S integral = scalar_traits<S>::zero();
      for (int x = 0; x < rho.dims(); ++x) {
        S prod = rho.weight(x);
        for (int k : block) prod *= fs[static_cast<std::size_t>(k)].values()[static_cast<std::size_t>(x)];
        integral += prod;
      }
      term *= integral;
    }
    total += term;
  });
  return total;
}

/// Both sides of the alternating summation identity
///   sum_{n=j}^{m} (-1)^(n-j) (theta+2n-1)/(n-j)! * (theta+j)^(n-1)
///     = (-1)^(m-j) (theta+j)^(m) / (m-j)!
/// for m >= 2 and 1 <= j <= m-1.
template <class S>
TwoSidedCheck<S> rising_sum_identity(const S& theta, int m, int j) {
  if (m < 2 || j < 1 || j > m - 1) throw std::invalid_argument("rising_sum_identity: need m>=2, 1<=j<=m-1");
  if (!(theta > scalar_traits<S>::zero())) throw std::invalid_argument("rising_sum_identity: theta > 0");
  S lhs = scalar_traits<S>::zero();
  for (int n = j; n <= m; ++n) {
    S term = (theta + S(2 * n - 1)) / factorial_s<S>(n - j) * rising_factorial(theta + S(j), n - 1);
    if ((n - j) % 2 == 1) term = -term;
    lhs += term;
  }
  S rhs = rising_factorial(theta + S(j), m) / factorial_s<S>(m - j);
  if ((m - j) % 2 == 1) rhs = -rhs;
  return {lhs, rhs, scalar_traits<S>::eq(lhs, rhs)};
}

}  // namespace dfcalc
