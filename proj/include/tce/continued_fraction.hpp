#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace tce {

using Quotient = std::uint64_t;

// Index (m, n) of the semiconvergent [0; lambda_1, ..., lambda_m, n].
// The sentinel (-1, 0) is admitted only by delta().
struct SemiIndex {
  int m = 0;
  std::uint64_t n = 0;

  friend bool operator==(const SemiIndex&, const SemiIndex&) = default;
  // Lexicographic order; on the strict index set it coincides with w-order.
  friend auto operator<=>(const SemiIndex&, const SemiIndex&) = default;
};

inline std::string to_string(const SemiIndex& idx) {
  return "(" + std::to_string(idx.m) + "," + std::to_string(idx.n) + ")";
}

struct ConvergentPair {
  BigInt p;
  BigInt q;
  friend bool operator==(const ConvergentPair&, const ConvergentPair&) = default;
};

// An irrational lambda in (0,1) given by its partial quotients: a finite
// prefix followed by an optional periodic tail. Without a tail the value is
// treated as an irrational known only to bounded depth; requests past the
// prefix throw DepthExhausted.
class ContinuedFraction {
 public:
  ContinuedFraction() : ContinuedFraction({}, {1}) {}

  ContinuedFraction(std::vector<Quotient> prefix, std::vector<Quotient> tail)
      : prefix_(std::move(prefix)), tail_(std::move(tail)), memo_(std::make_shared<Memo>()) {
    for (Quotient a : prefix_)
      if (a == 0) throw InvalidParameters("partial quotients must be positive");
    for (Quotient a : tail_)
      if (a == 0) throw InvalidParameters("partial quotients must be positive");
    if (prefix_.empty() && tail_.empty())
      throw InvalidParameters("continued fraction needs at least one partial quotient");
    canonicalize();
  }

  static ContinuedFraction periodic(std::vector<Quotient> tail) { return {{}, std::move(tail)}; }
  static ContinuedFraction truncated(std::vector<Quotient> prefix) { return {std::move(prefix), {}}; }
  static ContinuedFraction golden() { return periodic({1}); }
  static ContinuedFraction sqrt2_minus_1() { return periodic({2}); }

  const std::vector<Quotient>& prefix() const { return prefix_; }
  const std::vector<Quotient>& tail() const { return tail_; }
  bool has_tail() const { return !tail_.empty(); }

  // Number of available partial quotients, or nullopt when unbounded.
  std::optional<std::size_t> depth() const {
    if (has_tail()) return std::nullopt;
    return prefix_.size();
  }

  bool provides(std::size_t k) const { return has_tail() || k <= prefix_.size(); }

  // lambda_k for k >= 1; lambda_0 = 0.
  Quotient quotient(std::size_t k) const {
    if (k == 0) return 0;
    if (k <= prefix_.size()) return prefix_[k - 1];
    if (!has_tail())
      throw DepthExhausted("partial quotient lambda_" + std::to_string(k) + " unavailable (depth " +
                           std::to_string(prefix_.size()) + ")");
    return tail_[(k - 1 - prefix_.size()) % tail_.size()];
  }

  // (p_m, q_m) for m >= -2 with seeds (0,1), (1,0), (0,1) at m = -2, -1, 0.
  ConvergentPair convergent(int m) const {
    if (m < -2) throw IndexOutOfRange("convergent index below -2");
    std::lock_guard<std::mutex> lock(memo_->mu);
    auto& p = memo_->p;
    auto& q = memo_->q;
    if (p.empty()) {
      p = {0, 1, 0};
      q = {1, 0, 1};
    }
    const std::size_t want = static_cast<std::size_t>(m + 2);
    while (p.size() <= want) {
      const std::size_t k = p.size() - 2;  // index being produced
      const Quotient a = quotient(k);
      p.push_back(a * p[k + 1] + p[k]);
      q.push_back(a * q[k + 1] + q[k]);
    }
    return {p[want], q[want]};
  }

  // Value to about `bits` bits, from the first convergent with q_k^2 >= 2^(bits+4).
  Real to_float(unsigned bits) const {
    {
      std::lock_guard<std::mutex> lock(memo_->mu);
      auto it = memo_->floats.find(bits);
      if (it != memo_->floats.end()) return it->second;
    }
    const BigInt target = BigInt(1) << (bits / 2 + 3);
    int k = 0;
    ConvergentPair c = convergent(k);
    while (c.q < target) c = convergent(++k);
    PrecisionScope scope(bits + 8);
    Real value = Real(c.p) / Real(c.q);
    std::lock_guard<std::mutex> lock(memo_->mu);
    memo_->floats.emplace(bits, value);
    return value;
  }

  friend bool operator==(const ContinuedFraction& x, const ContinuedFraction& y) {
    return x.memo_ == y.memo_ || (x.prefix_ == y.prefix_ && x.tail_ == y.tail_);
  }

  std::string describe() const {
    std::ostringstream os;
    os << "[0;";
    const char* sep = " ";
    for (Quotient a : prefix_) {
      os << sep << a;
      sep = ", ";
    }
    if (has_tail()) {
      os << sep << "(";
      for (std::size_t i = 0; i < tail_.size(); ++i) os << (i ? ", " : "") << tail_[i];
      os << ")*";
    } else {
      os << sep << "...";
    }
    os << "]";
    return os.str();
  }

 private:
  struct Memo {
    std::mutex mu;
    std::vector<BigInt> p, q;
    std::map<unsigned, Real> floats;
  };

  // Shortest period, and no prefix element that could be folded into the tail.
  void canonicalize() {
    if (tail_.empty()) return;
    const std::size_t len = tail_.size();
    for (std::size_t period = 1; period <= len; ++period) {
      if (len % period) continue;
      bool ok = true;
      for (std::size_t i = period; i < len && ok; ++i) ok = tail_[i] == tail_[i - period];
      if (ok) {
        tail_.resize(period);
        break;
      }
    }
    while (!prefix_.empty() && prefix_.back() == tail_.back()) {
      std::rotate(tail_.rbegin(), tail_.rbegin() + 1, tail_.rend());
      prefix_.pop_back();
    }
  }

  std::vector<Quotient> prefix_;
  std::vector<Quotient> tail_;
  std::shared_ptr<Memo> memo_;
};

inline ConvergentPair convergent(const ContinuedFraction& cf, int m) {
  if (m < -1) throw IndexOutOfRange("convergent index must be >= -1");
  return cf.convergent(m);
}

inline bool in_index_set(const ContinuedFraction& cf, const SemiIndex& idx) {
  return idx.m >= 0 && idx.n <= cf.quotient(static_cast<std::size_t>(idx.m) + 1);
}

inline bool in_strict_index_set(const ContinuedFraction& cf, const SemiIndex& idx) {
  return idx.m >= 0 && idx.n < cf.quotient(static_cast<std::size_t>(idx.m) + 1);
}

inline void require_index(const ContinuedFraction& cf, const SemiIndex& idx) {
  if (idx.m < 0) throw IndexOutOfRange("semiconvergent index needs m >= 0, got " + to_string(idx));
  if (!in_index_set(cf, idx))
    throw IndexOutOfRange("index " + to_string(idx) + " exceeds lambda_{m+1} = " +
                          std::to_string(cf.quotient(static_cast<std::size_t>(idx.m) + 1)));
}

// (P_{m,n}, Q_{m,n}) = (n p_m + p_{m-1}, n q_m + q_{m-1}) for n >= 1, the
// convergent itself for n = 0.
inline ConvergentPair semiconvergent(const ContinuedFraction& cf, const SemiIndex& idx) {
  require_index(cf, idx);
  ConvergentPair c = cf.convergent(idx.m);
  if (idx.n == 0) return c;
  ConvergentPair prev = cf.convergent(idx.m - 1);
  return {idx.n * c.p + prev.p, idx.n * c.q + prev.q};
}

// g^m(lambda): drops the first m partial quotients.
inline ContinuedFraction gauss_shift(const ContinuedFraction& cf, std::size_t m) {
  if (m == 0) return cf;
  const auto& prefix = cf.prefix();
  if (m < prefix.size())
    return ContinuedFraction({prefix.begin() + static_cast<std::ptrdiff_t>(m), prefix.end()}, cf.tail());
  if (!cf.has_tail())
    throw DepthExhausted("gauss_shift by " + std::to_string(m) + " leaves no partial quotients (depth " +
                         std::to_string(prefix.size()) + ")");
  std::vector<Quotient> tail = cf.tail();
  const std::size_t shift = (m - prefix.size()) % tail.size();
  std::rotate(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(shift), tail.end());
  return ContinuedFraction::periodic(std::move(tail));
}

// w(m, n) = lambda_1 + ... + lambda_m + n.
inline std::uint64_t w_index(const ContinuedFraction& cf, const SemiIndex& idx) {
  require_index(cf, idx);
  std::uint64_t w = idx.n;
  for (int k = 1; k <= idx.m; ++k) w += cf.quotient(static_cast<std::size_t>(k));
  return w;
}

// Sign of Delta_{m,n}: positive iff (m even and n = 0) or (m odd and n > 0).
inline int delta_sign(const SemiIndex& idx) {
  const bool even = idx.m % 2 == 0;
  return (even == (idx.n == 0)) ? 1 : -1;
}

// Rewrites (m, lambda_{m+1}) as (m+1, 0); other indices are returned unchanged.
inline SemiIndex normalize_index(const ContinuedFraction& cf, SemiIndex idx) {
  if (idx.n == cf.quotient(static_cast<std::size_t>(idx.m) + 1)) return {idx.m + 1, 0};
  return idx;
}

// Successor in the strict index set (w increases by one).
inline SemiIndex next_index(const ContinuedFraction& cf, const SemiIndex& idx) {
  return normalize_index(cf, {idx.m, idx.n + 1});
}

// Inverse of w on the strict index set.
inline SemiIndex index_at(const ContinuedFraction& cf, std::uint64_t w) {
  int m = 0;
  for (;;) {
    const Quotient a = cf.quotient(static_cast<std::size_t>(m) + 1);
    if (w < a) return {m, w};
    w -= a;
    ++m;
  }
}

}  // namespace tce
