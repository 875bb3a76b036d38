#pragma once

/**
 * Finite measures and simplex points on the phase space X = {0,..,d-1}.
 *
 * FiniteMeasure holds the parameter measure rho (theta = total mass > 0,
 * zero weights allowed: the corresponding Dirichlet components are
 * deterministically 0). SimplexPoint is a realization of the process, a
 * probability vector.
 */

#include "dfcalc/scalar.hpp"
#include "dfcalc/tensor.hpp"

#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace dfcalc {

template <class S>
class FiniteMeasure {
 public:
  FiniteMeasure(std::vector<S> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw std::invalid_argument("measure needs at least one atom");
    S th = scalar_traits<S>::zero();
    for (const auto& w : weights_) {
      if (w < scalar_traits<S>::zero()) throw std::invalid_argument("negative weight");
      th += w;
    }
    if (!(th > scalar_traits<S>::zero())) throw std::invalid_argument("theta must be > 0");
    theta_ = th;
  }

  int dims() const { return static_cast<int>(weights_.size()); }
  const std::vector<S>& weights() const { return weights_; }
  const S& weight(int x) const { return weights_[static_cast<std::size_t>(x)]; }
  const S& theta() const { return theta_; }

  bool in_support(int x) const { return weights_[static_cast<std::size_t>(x)] > scalar_traits<S>::zero(); }

  /// All tuple coordinates inside supp(rho); such tuples carry all of the
  /// rho^[n] mass (a new atom can only first appear through rho itself).
  bool tuple_in_support(std::span<const int> idx) const {
    for (int x : idx)
      if (!in_support(x)) return false;
    return true;
  }

  bool has_zero_weight() const {
    for (const auto& w : weights_)
      if (!(w > scalar_traits<S>::zero())) return true;
    return false;
  }

  /// rho(f) for a one-variable function.
  S integrate(const TensorFn<S>& f) const {
    if (f.order() != 1 || f.dims() != dims()) throw std::invalid_argument("integrate: shape");
    S acc = scalar_traits<S>::zero();
    for (int x = 0; x < dims(); ++x) acc += weights_[static_cast<std::size_t>(x)] * f.values()[static_cast<std::size_t>(x)];
    return acc;
  }

  /// rho + delta_{x_1} + ... + delta_{x_k}; the Palm shift of the parameter
  /// measure (each occurrence adds one unit of mass).
  FiniteMeasure with_diracs(std::span<const int> atoms) const {
    std::vector<S> w = weights_;
    for (int a : atoms) {
      if (a < 0 || a >= dims()) throw std::out_of_range("palm shift atom out of range");
      w[static_cast<std::size_t>(a)] += scalar_traits<S>::one();
    }
    return FiniteMeasure(std::move(w));
  }

 private:
  std::vector<S> weights_;
  S theta_;
};

template <class S>
FiniteMeasure<S> palm_shift(const FiniteMeasure<S>& rho, std::span<const int> atoms) {
  return rho.with_diracs(atoms);
}

template <class S>
FiniteMeasure<S> palm_shift(const FiniteMeasure<S>& rho, std::initializer_list<int> atoms) {
  return rho.with_diracs(std::span<const int>(atoms.begin(), atoms.size()));
}

template <class S>
class SimplexPoint {
 public:
  explicit SimplexPoint(std::vector<S> probs, double tol = 1e-12) : probs_(std::move(probs)) {
    if (probs_.empty()) throw std::invalid_argument("empty simplex point");
    S total = scalar_traits<S>::zero();
    for (const auto& p : probs_) {
      if (p < scalar_traits<S>::zero()) throw std::invalid_argument("negative probability");
      total += p;
    }
    if (!scalar_traits<S>::eq(total, scalar_traits<S>::one(), tol))
      throw std::invalid_argument("probabilities must sum to 1");
  }

  int dims() const { return static_cast<int>(probs_.size()); }
  const std::vector<S>& probs() const { return probs_; }
  const S& prob(int x) const { return probs_[static_cast<std::size_t>(x)]; }

  /// mu(f).
  S integrate(const TensorFn<S>& f) const {
    if (f.order() != 1 || f.dims() != dims()) throw std::invalid_argument("integrate: shape");
    S acc = scalar_traits<S>::zero();
    for (int x = 0; x < dims(); ++x) acc += probs_[static_cast<std::size_t>(x)] * f.values()[static_cast<std::size_t>(x)];
    return acc;
  }

 private:
  std::vector<S> probs_;
};

template <class S>
FiniteMeasure<double> measure_to_double(const FiniteMeasure<S>& rho) {
  std::vector<double> w(static_cast<std::size_t>(rho.dims()));
  for (int x = 0; x < rho.dims(); ++x) w[static_cast<std::size_t>(x)] = to_double(rho.weight(x));
  return FiniteMeasure<double>(std::move(w));
}

}  // namespace dfcalc
