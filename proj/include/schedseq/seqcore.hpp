#pragma once

// Core value types and exact integer primitives: slot symbols, periodic
// sequences, cyclic shifts, the CRT correspondence, Hamming correlations and
// group divisions.
//
// Channel and group indices are 0-based everywhere in the library. The
// 1-based "T1"/"R2" notation only appears at the I/O boundary (io.hpp).

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace schedseq {

using Slot = std::int64_t;

// ---------------------------------------------------------------------------
// Integer helpers

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::int64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  // b > 0
  return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

inline Slot mod(Slot a, Slot n) {
  Slot r = a % n;
  return r < 0 ? r + n : r;
}

// ---------------------------------------------------------------------------
// Symbols

enum class Action : std::uint8_t { Transmit, Receive };

struct Symbol {
  Action kind = Action::Receive;
  int channel = 0;

  static constexpr Symbol transmit(int ch) { return {Action::Transmit, ch}; }
  static constexpr Symbol receive(int ch) { return {Action::Receive, ch}; }

  constexpr bool is_transmit(int ch) const { return kind == Action::Transmit && channel == ch; }
  constexpr bool is_receive(int ch) const { return kind == Action::Receive && channel == ch; }

  friend constexpr bool operator==(const Symbol&, const Symbol&) = default;
};

// ---------------------------------------------------------------------------
// Sequences

struct BinarySequence {
  std::vector<std::uint8_t> bits;

  BinarySequence() = default;
  explicit BinarySequence(std::vector<std::uint8_t> b) : bits(std::move(b)) {
    for (auto& x : bits)
      if (x > 1) throw std::invalid_argument("BinarySequence: entries must be 0 or 1");
  }
  static BinarySequence zeros(std::size_t length) {
    return BinarySequence(std::vector<std::uint8_t>(length, 0));
  }
  static BinarySequence with_ones(std::size_t length, const std::vector<Slot>& positions) {
    BinarySequence s = zeros(length);
    for (Slot t : positions) s.bits.at(static_cast<std::size_t>(t)) = 1;
    return s;
  }

  std::size_t length() const { return bits.size(); }
  std::size_t weight() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
  }
  std::vector<Slot> ones() const {
    std::vector<Slot> out;
    for (std::size_t t = 0; t < bits.size(); ++t)
      if (bits[t]) out.push_back(static_cast<Slot>(t));
    return out;
  }
  std::uint8_t operator[](std::size_t t) const { return bits[t]; }

  friend bool operator==(const BinarySequence&, const BinarySequence&) = default;
};

struct ScheduleSequence {
  std::vector<Symbol> symbols;
  int owner_group = 0;

  std::size_t length() const { return symbols.size(); }
  const Symbol& operator[](std::size_t t) const { return symbols[t]; }

  std::size_t transmit_count() const {
    return static_cast<std::size_t>(std::count_if(
        symbols.begin(), symbols.end(), [](const Symbol& s) { return s.kind == Action::Transmit; }));
  }
  std::size_t receive_count(int channel) const {
    return static_cast<std::size_t>(std::count_if(
        symbols.begin(), symbols.end(), [&](const Symbol& s) { return s.is_receive(channel); }));
  }

  // Assignment T: every transmission happens on the owner's channel.
  bool satisfies_assignment() const {
    return std::all_of(symbols.begin(), symbols.end(), [&](const Symbol& s) {
      return s.kind != Action::Transmit || s.channel == owner_group;
    });
  }

  friend bool operator==(const ScheduleSequence&, const ScheduleSequence&) = default;
};

// Replace 1 by `one` and 0 by `zero`.
inline ScheduleSequence relabel(const BinarySequence& b, Symbol one, Symbol zero, int owner_group) {
  ScheduleSequence s;
  s.owner_group = owner_group;
  s.symbols.reserve(b.length());
  for (auto bit : b.bits) s.symbols.push_back(bit ? one : zero);
  return s;
}

namespace detail {
template <class T>
std::vector<T> rotate_left(const std::vector<T>& in, Slot tau) {
  const auto n = static_cast<Slot>(in.size());
  if (n == 0) return in;
  if (tau < 0 || tau >= n) throw std::out_of_range("cyclic_shift: offset outside Z_L");
  std::vector<T> out(in.size());
  for (Slot t = 0; t < n; ++t) out[static_cast<std::size_t>(t)] = in[static_cast<std::size_t>((t + tau) % n)];
  return out;
}
}  // namespace detail

// Output index t holds the input value at (t + tau) mod L.
inline BinarySequence cyclic_shift(const BinarySequence& s, Slot tau) {
  BinarySequence out;
  out.bits = detail::rotate_left(s.bits, tau);
  return out;
}

inline ScheduleSequence cyclic_shift(const ScheduleSequence& s, Slot tau) {
  return {detail::rotate_left(s.symbols, tau), s.owner_group};
}

// H(tau) = sum_t s1(t) * s2(t + tau mod L)
inline std::size_t hamming_cross_correlation(const BinarySequence& s1, const BinarySequence& s2, Slot tau) {
  if (s1.length() != s2.length())
    throw std::invalid_argument("hamming_cross_correlation: length mismatch");
  const auto n = static_cast<Slot>(s1.length());
  if (n == 0) return 0;
  if (tau < 0 || tau >= n) throw std::out_of_range("hamming_cross_correlation: offset outside Z_L");
  std::size_t h = 0;
  for (Slot t = 0; t < n; ++t)
    h += static_cast<std::size_t>(s1.bits[static_cast<std::size_t>(t)] & s2.bits[static_cast<std::size_t>((t + tau) % n)]);
  return h;
}

// ---------------------------------------------------------------------------
// CRT correspondence Z_pq <-> Z_p x Z_q

class CrtCorrespondence {
 public:
  CrtCorrespondence(std::int64_t p, std::int64_t q) : p_(p), q_(q) {
    if (p < 1 || q < 1) throw std::invalid_argument("CRT: moduli must be positive");
    if (std::gcd(p, q) != 1) throw std::invalid_argument("CRT: moduli must be coprime");
    // Bezout: x*p + y*q = 1, so e_p = y*q is 1 mod p and 0 mod q.
    std::int64_t old_r = p, r = q, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
      const std::int64_t quot = old_r / r;
      old_r = std::exchange(r, old_r - quot * r);
      old_s = std::exchange(s, old_s - quot * s);
      old_t = std::exchange(t, old_t - quot * t);
    }
    const std::int64_t n = p * q;
    e_p_ = mod(mod(old_t, n) * q % n, n);
    e_q_ = mod(mod(old_s, n) * p % n, n);
  }

  std::int64_t p() const { return p_; }
  std::int64_t q() const { return q_; }
  std::int64_t size() const { return p_ * q_; }

  std::pair<std::int64_t, std::int64_t> forward(std::int64_t t) const {
    if (t < 0 || t >= size()) throw std::out_of_range("crt_map: t outside Z_pq");
    return {t % p_, t % q_};
  }

  std::int64_t inverse(std::int64_t a, std::int64_t b) const {
    if (a < 0 || a >= p_ || b < 0 || b >= q_) throw std::out_of_range("crt_inverse: residue out of range");
    const std::int64_t n = size();
    return (a * e_p_ % n + b * e_q_ % n) % n;
  }

 private:
  std::int64_t p_, q_;
  std::int64_t e_p_ = 0, e_q_ = 0;
};

inline std::pair<std::int64_t, std::int64_t> crt_map(std::int64_t t, std::int64_t p, std::int64_t q) {
  return CrtCorrespondence(p, q).forward(t);
}

inline std::int64_t crt_inverse(std::pair<std::int64_t, std::int64_t> residues, std::int64_t p, std::int64_t q) {
  return CrtCorrespondence(p, q).inverse(residues.first, residues.second);
}

// Row-major p x q array view of a length-pq sequence: cell (t mod p, t mod q) <- s(t).
template <class T>
std::vector<std::vector<T>> to_array(const std::vector<T>& seq, const CrtCorrespondence& crt) {
  if (static_cast<std::int64_t>(seq.size()) != crt.size())
    throw std::invalid_argument("to_array: length must equal p*q");
  std::vector<std::vector<T>> a(static_cast<std::size_t>(crt.p()), std::vector<T>(static_cast<std::size_t>(crt.q())));
  for (std::int64_t t = 0; t < crt.size(); ++t) {
    auto [r, c] = crt.forward(t);
    a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = seq[static_cast<std::size_t>(t)];
  }
  return a;
}

template <class T>
std::vector<T> from_array(const std::vector<std::vector<T>>& a, const CrtCorrespondence& crt) {
  if (static_cast<std::int64_t>(a.size()) != crt.p())
    throw std::invalid_argument("from_array: row count must equal p");
  std::vector<T> seq(static_cast<std::size_t>(crt.size()));
  for (std::int64_t t = 0; t < crt.size(); ++t) {
    const auto& row = a[static_cast<std::size_t>(t % crt.p())];
    if (static_cast<std::int64_t>(row.size()) != crt.q())
      throw std::invalid_argument("from_array: column count must equal q");
    seq[static_cast<std::size_t>(t)] = row[static_cast<std::size_t>(t % crt.q())];
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Group division and offsets

class GroupDivision {
 public:
  GroupDivision() = default;

  // assignment[i] is the 0-based group of node i; groups 0..W-1 must all be non-empty.
  explicit GroupDivision(std::vector<int> assignment) : assignment_(std::move(assignment)) {
    if (assignment_.empty()) throw std::invalid_argument("GroupDivision: no nodes");
    const int max_group = *std::max_element(assignment_.begin(), assignment_.end());
    if (*std::min_element(assignment_.begin(), assignment_.end()) < 0)
      throw std::invalid_argument("GroupDivision: negative group index");
    groups_.assign(static_cast<std::size_t>(max_group) + 1, {});
    for (std::size_t i = 0; i < assignment_.size(); ++i)
      groups_[static_cast<std::size_t>(assignment_[i])].push_back(static_cast<int>(i));
    for (const auto& g : groups_)
      if (g.empty()) throw std::invalid_argument("GroupDivision: empty group");
  }

  // Node i goes to group i mod W; sizes differ by at most one.
  static GroupDivision even(int K, int W) {
    if (W < 1 || K < W) throw std::invalid_argument("GroupDivision::even: need 1 <= W <= K");
    std::vector<int> a(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) a[static_cast<std::size_t>(i)] = i % W;
    return GroupDivision(std::move(a));
  }

  int K() const { return static_cast<int>(assignment_.size()); }
  int W() const { return static_cast<int>(groups_.size()); }
  int group_of(int node) const { return assignment_.at(static_cast<std::size_t>(node)); }
  const std::vector<int>& members(int group) const { return groups_.at(static_cast<std::size_t>(group)); }
  const std::vector<int>& assignment() const { return assignment_; }

  // Position of the node inside its group (0-based).
  int index_in_group(int node) const {
    const auto& m = members(group_of(node));
    return static_cast<int>(std::find(m.begin(), m.end(), node) - m.begin());
  }

  int min_size() const {
    std::size_t k = groups_.front().size();
    for (const auto& g : groups_) k = std::min(k, g.size());
    return static_cast<int>(k);
  }
  int max_size() const {
    std::size_t l = 0;
    for (const auto& g : groups_) l = std::max(l, g.size());
    return static_cast<int>(l);
  }

  friend bool operator==(const GroupDivision& a, const GroupDivision& b) { return a.assignment_ == b.assignment_; }

 private:
  std::vector<int> assignment_;
  std::vector<std::vector<int>> groups_;
};

struct OffsetVector {
  std::vector<Slot> offsets;

  OffsetVector() = default;
  OffsetVector(std::vector<Slot> o, Slot L) : offsets(std::move(o)) {
    for (Slot t : offsets)
      if (t < 0 || t >= L) throw std::out_of_range("OffsetVector: offset outside Z_L");
  }
  static OffsetVector zeros(std::size_t K) {
    OffsetVector v;
    v.offsets.assign(K, 0);
    return v;
  }
  Slot operator[](std::size_t i) const { return offsets[i]; }
  std::size_t size() const { return offsets.size(); }
};

}  // namespace schedseq
