#pragma once

/**
 * Dense functions on [d]^n ("tensors").
 *
 * Storage is row-major: index(x_1..x_n) = sum_i x_i * d^(n-1-i), atoms are
 * 0-based. Order 0 is a single scalar (the empty product convention: an
 * order-0 function integrates to itself under any mu^0 / mu^[0]).
 *
 * Orders and dimensions stay desk-scale (d <= ~6, n <= ~10); there is no
 * sparse path.
 */

#include "dfcalc/scalar.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace dfcalc {

inline std::size_t pow_sz(int d, int n) {
  std::size_t r = 1;
  for (int i = 0; i < n; ++i) {
    if (r > (SIZE_MAX / static_cast<std::size_t>(d)))
      throw std::overflow_error("tensor index space overflow");
    r *= static_cast<std::size_t>(d);
  }
  return r;
}

/// Odometer over [d]^n. idx must hold n ints, initially all 0.
/// Returns false after the last tuple.
inline bool next_tuple(std::span<int> idx, int d) {
  for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i) {
    if (++idx[i] < d) return true;
    idx[i] = 0;
  }
  return false;
}

template <class S>
class TensorFn {
 public:
  TensorFn() : order_(0), d_(1), values_(1, scalar_traits<S>::zero()) {}

  TensorFn(int order, int d)
      : order_(order), d_(d), values_(pow_sz(d, order), scalar_traits<S>::zero()) {
    if (order < 0 || d < 1) throw std::invalid_argument("TensorFn: bad shape");
  }

  static TensorFn constant(int d, S value) {
    TensorFn t(0, d);
    t.values_[0] = std::move(value);
    return t;
  }

  static TensorFn from_values(int order, int d, std::vector<S> values) {
    TensorFn t(order, d);
    if (values.size() != t.values_.size())
      throw std::invalid_argument("TensorFn: values length != d^order");
    t.values_ = std::move(values);
    return t;
  }

  /// Fills from a callable on index tuples.
  template <class Fn>
  static TensorFn build(int order, int d, Fn&& fn) {
    TensorFn t(order, d);
    std::vector<int> idx(static_cast<std::size_t>(order), 0);
    std::size_t flat = 0;
    if (order == 0) {
      t.values_[0] = fn(std::span<const int>(idx));
      return t;
    }
    do {
      t.values_[flat++] = fn(std::span<const int>(idx));
    } while (next_tuple(idx, d));
    return t;
  }

  int order() const { return order_; }
  int dims() const { return d_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<S>& values() const { return values_; }
  std::vector<S>& values() { return values_; }

  std::size_t flat_index(std::span<const int> idx) const {
    std::size_t f = 0;
    for (int i = 0; i < order_; ++i) f = f * static_cast<std::size_t>(d_) + static_cast<std::size_t>(idx[i]);
    return f;
  }

  const S& at(std::span<const int> idx) const { return values_[flat_index(idx)]; }
  S& at(std::span<const int> idx) { return values_[flat_index(idx)]; }

  const S& at(std::initializer_list<int> idx) const {
    return at(std::span<const int>(idx.begin(), idx.size()));
  }

  /// Order-0 access.
  const S& scalar() const {
    if (order_ != 0) throw std::logic_error("scalar() on tensor of positive order");
    return values_[0];
  }

  bool operator==(const TensorFn& o) const {
    return order_ == o.order_ && d_ == o.d_ && values_ == o.values_;
  }

  bool approx_equal(const TensorFn& o, double tol) const {
    if (order_ != o.order_ || d_ != o.d_) return false;
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (!scalar_traits<S>::eq(values_[i], o.values_[i], tol)) return false;
    return true;
  }

  bool is_zero() const {
    const S z = scalar_traits<S>::zero();
    return std::all_of(values_.begin(), values_.end(), [&](const S& v) { return v == z; });
  }

  TensorFn& operator+=(const TensorFn& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  TensorFn& operator-=(const TensorFn& o) {
    require_same_shape(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  TensorFn& operator*=(const S& c) {
    for (auto& v : values_) v *= c;
    return *this;
  }
  friend TensorFn operator+(TensorFn a, const TensorFn& b) { return a += b; }
  friend TensorFn operator-(TensorFn a, const TensorFn& b) { return a -= b; }
  friend TensorFn operator*(TensorFn a, const S& c) { return a *= c; }
  friend TensorFn operator*(const S& c, TensorFn a) { return a *= c; }

  /// Entrywise product (functions multiplied pointwise on [d]^n).
  TensorFn hadamard(const TensorFn& o) const {
    require_same_shape(o);
    TensorFn r(order_, d_);
    for (std::size_t i = 0; i < values_.size(); ++i) r.values_[i] = values_[i] * o.values_[i];
    return r;
  }

  /// (f (x) g)(x_1..x_{m+n}) = f(x_1..x_m) g(x_{m+1}..x_{m+n}).
  TensorFn outer(const TensorFn& o) const {
    if (d_ != o.d_) throw std::invalid_argument("outer: dims mismatch");
    TensorFn r(order_ + o.order_, d_);
    std::size_t nb = o.values_.size();
    for (std::size_t i = 0; i < values_.size(); ++i)
      for (std::size_t j = 0; j < nb; ++j) r.values_[i * nb + j] = values_[i] * o.values_[j];
    return r;
  }

  /// Fixes the arguments at `positions` to `atoms`, returning the tensor of
  /// the remaining order-(n-k) function (remaining slots keep their order).
  TensorFn fix_positions(std::span<const int> positions, std::span<const int> atoms) const {
    if (positions.size() != atoms.size()) throw std::invalid_argument("fix_positions: size mismatch");
    std::vector<bool> fixed(static_cast<std::size_t>(order_), false);
    for (int p : positions) {
      if (p < 0 || p >= order_ || fixed[static_cast<std::size_t>(p)])
        throw std::invalid_argument("fix_positions: bad/repeated position");
      fixed[static_cast<std::size_t>(p)] = true;
    }
    int out_order = order_ - static_cast<int>(positions.size());
    std::vector<int> full(static_cast<std::size_t>(order_), 0);
    for (std::size_t k = 0; k < positions.size(); ++k) full[static_cast<std::size_t>(positions[k])] = atoms[k];
    std::vector<int*> free_slots;
    for (int i = 0; i < order_; ++i)
      if (!fixed[static_cast<std::size_t>(i)]) free_slots.push_back(&full[static_cast<std::size_t>(i)]);

    TensorFn r(out_order, d_);
    std::vector<int> idx(static_cast<std::size_t>(out_order), 0);
    std::size_t flat = 0;
    if (out_order == 0) {
      r.values_[0] = at(std::span<const int>(full));
      return r;
    }
    do {
      for (int i = 0; i < out_order; ++i) *free_slots[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)];
      r.values_[flat++] = at(std::span<const int>(full));
    } while (next_tuple(idx, d_));
    return r;
  }

  /// Contracts the last axis against the weight vector w (length d).
  TensorFn contract_last(std::span<const S> w) const {
    if (order_ == 0) throw std::logic_error("contract_last on order-0 tensor");
    if (static_cast<int>(w.size()) != d_) throw std::invalid_argument("contract_last: weight length");
    TensorFn r(order_ - 1, d_);
    for (std::size_t i = 0; i < r.values_.size(); ++i) {
      S acc = scalar_traits<S>::zero();
      for (int x = 0; x < d_; ++x) acc += values_[i * static_cast<std::size_t>(d_) + static_cast<std::size_t>(x)] * w[static_cast<std::size_t>(x)];
      r.values_[i] = acc;
    }
    return r;
  }

  bool is_symmetric() const;
  TensorFn symmetrized() const;

 private:
  void require_same_shape(const TensorFn& o) const {
    if (order_ != o.order_ || d_ != o.d_) throw std::invalid_argument("tensor shape mismatch");
  }

  int order_;
  int d_;
  std::vector<S> values_;
};

/// f~ = (1/m!) sum_pi f((x_pi(1)..x_pi(m))). Orbit-mean implementation:
/// all entries sharing a sorted index multiset get their common average,
/// O(d^m log m) instead of m! per entry.
template <class S>
TensorFn<S> TensorFn<S>::symmetrized() const {
  if (order_ <= 1) return *this;
  const int d = d_, n = order_;
  std::size_t total = values_.size();
  // orbit key = flat index of the sorted tuple
  std::vector<std::size_t> key(total);
  std::vector<int> idx(static_cast<std::size_t>(n), 0), sorted_idx(static_cast<std::size_t>(n));
  std::size_t flat = 0;
  do {
    sorted_idx.assign(idx.begin(), idx.end());
    std::sort(sorted_idx.begin(), sorted_idx.end());
    key[flat++] = flat_index(sorted_idx);
  } while (next_tuple(idx, d));

  std::vector<S> orbit_sum(total, scalar_traits<S>::zero());
  std::vector<std::uint32_t> orbit_count(total, 0);
  for (std::size_t i = 0; i < total; ++i) {
    orbit_sum[key[i]] += values_[i];
    orbit_count[key[i]]++;
  }
  TensorFn r(n, d);
  for (std::size_t i = 0; i < total; ++i) r.values_[i] = orbit_sum[key[i]] / S(static_cast<long>(orbit_count[key[i]]));
  return r;
}

template <class S>
bool TensorFn<S>::is_symmetric() const {
  if (order_ <= 1) return true;
  // symmetric iff every entry equals its sorted representative
  const int d = d_, n = order_;
  std::vector<int> idx(static_cast<std::size_t>(n), 0), sorted_idx(static_cast<std::size_t>(n));
  std::size_t flat = 0;
  do {
    sorted_idx.assign(idx.begin(), idx.end());
    std::sort(sorted_idx.begin(), sorted_idx.end());
    if (!(values_[flat] == values_[flat_index(sorted_idx)])) return false;
    ++flat;
  } while (next_tuple(idx, d));
  return true;
}

template <class S>
TensorFn<double> tensor_to_double(const TensorFn<S>& t) {
  std::vector<double> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) v[i] = to_double(t.values()[i]);
  return TensorFn<double>::from_values(t.order(), t.dims(), std::move(v));
}

}  // namespace dfcalc
