#pragma once

// Checks of the delivery guarantee (every ordered pair i -> j gets a
// collision-free slot for every offset vector), the blocking algorithm, and
// the closed-form lower bounds on the common period.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "schedseq/constructor.hpp"
#include "schedseq/detail/parallel.hpp"
#include "schedseq/seqcore.hpp"

namespace schedseq {

enum class Verdict { Proven, ProvenConservative, FailedWithWitness, Unknown };
enum class Method { Exhaustive, Conservative, Randomized };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Proven: return "Proven";
    case Verdict::ProvenConservative: return "ProvenConservative";
    case Verdict::FailedWithWitness: return "FailedWithWitness";
    case Verdict::Unknown: return "Unknown";
  }
  return "?";
}

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Exhaustive: return "exhaustive";
    case Method::Conservative: return "conservative";
    case Method::Randomized: return "randomized";
  }
  return "?";
}

// Offsets of the transmitter's group plus the receiver; other nodes are irrelevant.
struct Witness {
  int transmitter = 0;
  int receiver = 0;
  std::vector<std::pair<int, Slot>> offsets;
};

struct VerificationReport {
  Verdict verdict = Verdict::Unknown;
  Method method = Method::Exhaustive;
  std::optional<Witness> witness;
  std::uint64_t pairs_checked = 0;
  std::uint64_t combinations = 0;

  bool proven() const { return verdict == Verdict::Proven || verdict == Verdict::ProvenConservative; }
};

// True when some slot t has s_i transmitting on its channel m, s_j receiving
// on m, and no other member of G_m (j excluded) transmitting on m.
inline bool pair_succeeds(const ScheduleSequenceSet& set, int i, int j, const OffsetVector& tau) {
  if (i == j) throw std::invalid_argument("pair_succeeds: need i != j");
  const int m = set.division.group_of(i);
  const Slot L = set.L();
  const auto& si = set.sequences.at(static_cast<std::size_t>(i));
  const auto& sj = set.sequences.at(static_cast<std::size_t>(j));
  const auto& group = set.division.members(m);
  for (Slot t = 0; t < L; ++t) {
    if (!si[static_cast<std::size_t>((t + tau[static_cast<std::size_t>(i)]) % L)].is_transmit(m)) continue;
    if (!sj[static_cast<std::size_t>((t + tau[static_cast<std::size_t>(j)]) % L)].is_receive(m)) continue;
    bool clear = true;
    for (int x : group) {
      if (x == i || x == j) continue;
      if (set.sequences[static_cast<std::size_t>(x)][static_cast<std::size_t>((t + tau[static_cast<std::size_t>(x)]) % L)].is_transmit(m)) {
        clear = false;
        break;
      }
    }
    if (clear) return true;
  }
  return false;
}

// Re-evaluates a witness; true when the named pair indeed fails under it.
inline bool witness_fails(const ScheduleSequenceSet& set, const Witness& w) {
  auto tau = OffsetVector::zeros(static_cast<std::size_t>(set.K()));
  for (auto [node, off] : w.offsets) tau.offsets.at(static_cast<std::size_t>(node)) = mod(off, set.L());
  return !pair_succeeds(set, w.transmitter, w.receiver, tau);
}

namespace detail {

class SlotBits {
 public:
  SlotBits() = default;
  explicit SlotBits(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}
  void set(std::size_t t) { words_[t / 64] |= (std::uint64_t{1} << (t % 64)); }
  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }
  SlotBits and_(const SlotBits& o) const {
    SlotBits r(n_);
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] = words_[k] & o.words_[k];
    return r;
  }
  SlotBits and_not(const SlotBits& o) const {
    SlotBits r(n_);
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] = words_[k] & ~o.words_[k];
    return r;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

// Slots t at which seq(t + tau) satisfies pred, for every tau.
template <class Pred>
std::vector<SlotBits> shifted_masks(const ScheduleSequence& seq, Pred pred) {
  const auto L = seq.length();
  std::vector<SlotBits> out(L, SlotBits(L));
  std::vector<std::size_t> hits;
  for (std::size_t u = 0; u < L; ++u)
    if (pred(seq[u])) hits.push_back(u);
  for (std::size_t tau = 0; tau < L; ++tau)
    for (auto u : hits) out[tau].set((u + L - tau) % L);
  return out;
}

inline std::uint64_t saturating_pow(std::uint64_t base, std::size_t exp) {
  std::uint64_t r = 1;
  for (std::size_t k = 0; k < exp; ++k) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    r *= base;
  }
  return r;
}

inline std::vector<int> colliders_of(const ScheduleSequenceSet& set, int i, int j) {
  std::vector<int> out;
  for (int x : set.division.members(set.division.group_of(i)))
    if (x != i && x != j) out.push_back(x);
  return out;
}

}  // namespace detail

inline constexpr std::uint64_t kDefaultBudget = 1'000'000'000ULL;

// Enumerates every offset of G_m and j with tau_i fixed to 0.
inline VerificationReport check_pair_exhaustive(const ScheduleSequenceSet& set, int i, int j,
                                                std::uint64_t budget = kDefaultBudget) {
  if (i == j) throw std::invalid_argument("check_pair_exhaustive: need i != j");
  VerificationReport report;
  report.method = Method::Exhaustive;
  report.pairs_checked = 1;

  const int m = set.division.group_of(i);
  const auto L = static_cast<std::size_t>(set.L());
  const auto colliders = detail::colliders_of(set, i, j);
  const std::uint64_t total = detail::saturating_pow(L, colliders.size() + 1);
  if (total > budget) {
    report.verdict = Verdict::Unknown;
    return report;
  }

  const auto& si = set.sequences[static_cast<std::size_t>(i)];
  detail::SlotBits tx_i(L);
  for (std::size_t t = 0; t < L; ++t)
    if (si[t].is_transmit(m)) tx_i.set(t);
  const auto rx_j = detail::shifted_masks(set.sequences[static_cast<std::size_t>(j)],
                                          [m](const Symbol& s) { return s.is_receive(m); });
  std::vector<std::vector<detail::SlotBits>> blockers;
  blockers.reserve(colliders.size());
  for (int x : colliders)
    blockers.push_back(detail::shifted_masks(set.sequences[static_cast<std::size_t>(x)],
                                             [m](const Symbol& s) { return s.is_transmit(m); }));

  std::vector<Slot> chosen(colliders.size(), 0);
  std::uint64_t evaluated = 0;

  // Depth-first over collider offsets; an emptied residual is a counterexample.
  auto search = [&](auto&& self, std::size_t depth, const detail::SlotBits& residual) -> bool {
    if (!residual.any()) return false;
    if (depth == colliders.size()) {
      ++evaluated;
      return true;
    }
    for (std::size_t tau = 0; tau < L; ++tau) {
      chosen[depth] = static_cast<Slot>(tau);
      if (!self(self, depth + 1, residual.and_not(blockers[depth][tau]))) return false;
    }
    return true;
  };

  for (std::size_t tau_j = 0; tau_j < L; ++tau_j) {
    std::fill(chosen.begin(), chosen.end(), 0);
    if (!search(search, 0, tx_i.and_(rx_j[tau_j]))) {
      Witness w{i, j, {{i, 0}, {j, static_cast<Slot>(tau_j)}}};
      for (std::size_t k = 0; k < colliders.size(); ++k) w.offsets.emplace_back(colliders[k], chosen[k]);
      report.verdict = Verdict::FailedWithWitness;
      report.witness = std::move(w);
      report.combinations = evaluated + 1;
      return report;
    }
  }
  report.verdict = Verdict::Proven;
  report.combinations = evaluated;
  return report;
}

// For every tau_j: (#slots where T_m of i meets R_m of j) minus, per other
// member x of G_m, the most of those slots x can hit with one shift. A
// positive remainder for every tau_j proves the pair; otherwise Unknown.
inline VerificationReport check_pair_conservative(const ScheduleSequenceSet& set, int i, int j) {
  if (i == j) throw std::invalid_argument("check_pair_conservative: need i != j");
  VerificationReport report;
  report.method = Method::Conservative;
  report.pairs_checked = 1;

  const int m = set.division.group_of(i);
  const Slot L = set.L();
  const auto& si = set.sequences[static_cast<std::size_t>(i)];
  const auto& sj = set.sequences[static_cast<std::size_t>(j)];
  const auto colliders = detail::colliders_of(set, i, j);

  std::vector<Slot> tx_i;
  for (Slot t = 0; t < L; ++t)
    if (si[static_cast<std::size_t>(t)].is_transmit(m)) tx_i.push_back(t);
  std::vector<std::vector<Slot>> tx_x;
  for (int x : colliders) {
    auto& v = tx_x.emplace_back();
    const auto& sx = set.sequences[static_cast<std::size_t>(x)];
    for (Slot t = 0; t < L; ++t)
      if (sx[static_cast<std::size_t>(t)].is_transmit(m)) v.push_back(t);
  }

  std::vector<int> hist(static_cast<std::size_t>(L), 0);
  std::vector<Slot> touched;
  std::vector<Slot> matches;
  for (Slot tau_j = 0; tau_j < L; ++tau_j) {
    matches.clear();
    for (Slot t : tx_i)
      if (sj[static_cast<std::size_t>((t + tau_j) % L)].is_receive(m)) matches.push_back(t);
    long long remainder = static_cast<long long>(matches.size());
    for (const auto& xs : tx_x) {
      int best = 0;
      touched.clear();
      for (Slot t : matches)
        for (Slot u : xs) {
          const Slot shift = mod(u - t, L);
          auto& h = hist[static_cast<std::size_t>(shift)];
          if (h == 0) touched.push_back(shift);
          best = std::max(best, ++h);
        }
      for (Slot s : touched) hist[static_cast<std::size_t>(s)] = 0;
      remainder -= best;
    }
    ++report.combinations;
    if (remainder < 1) {
      report.verdict = Verdict::Unknown;
      return report;
    }
  }
  report.verdict = Verdict::ProvenConservative;
  return report;
}

struct VerifyOptions {
  Method method = Method::Exhaustive;
  std::uint64_t budget = kDefaultBudget;  // per pair, exhaustive only
  std::uint64_t samples = 100'000;        // randomized only
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

namespace detail {

// Full-network evaluation for one offset vector; returns the first failing
// ordered pair, if any.
inline std::optional<std::pair<int, int>> first_failing_pair(const ScheduleSequenceSet& set, const OffsetVector& tau,
                                                             std::vector<std::uint8_t>& delivered) {
  const int K = set.K();
  const int W = set.W();
  const Slot L = set.L();
  delivered.assign(static_cast<std::size_t>(K) * static_cast<std::size_t>(K), 0);
  std::vector<int> count(static_cast<std::size_t>(W));
  std::vector<int> sender(static_cast<std::size_t>(W));
  std::vector<Symbol> now(static_cast<std::size_t>(K));
  for (Slot t = 0; t < L; ++t) {
    std::fill(count.begin(), count.end(), 0);
    for (int x = 0; x < K; ++x) {
      const auto& sym = set.sequences[static_cast<std::size_t>(x)][static_cast<std::size_t>((t + tau[static_cast<std::size_t>(x)]) % L)];
      now[static_cast<std::size_t>(x)] = sym;
      if (sym.kind == Action::Transmit) {
        ++count[static_cast<std::size_t>(sym.channel)];
        sender[static_cast<std::size_t>(sym.channel)] = x;
      }
    }
    for (int y = 0; y < K; ++y) {
      const auto& sym = now[static_cast<std::size_t>(y)];
      if (sym.kind == Action::Receive && count[static_cast<std::size_t>(sym.channel)] == 1)
        delivered[static_cast<std::size_t>(sender[static_cast<std::size_t>(sym.channel)]) * static_cast<std::size_t>(K) + static_cast<std::size_t>(y)] = 1;
    }
  }
  for (int x = 0; x < K; ++x)
    for (int y = 0; y < K; ++y)
      if (x != y && !delivered[static_cast<std::size_t>(x) * static_cast<std::size_t>(K) + static_cast<std::size_t>(y)])
        return std::pair{x, y};
  return std::nullopt;
}

}  // namespace detail

// Aggregates the per-pair checks over all ordered pairs. Randomized mode
// samples offset vectors uniformly and can only refute, never prove.
inline VerificationReport verify_set(const ScheduleSequenceSet& set, const VerifyOptions& options = {}) {
  set.validate();
  VerificationReport report;
  report.method = options.method;
  const int K = set.K();

  if (options.method == Method::Randomized) {
    const Slot L = set.L();
    std::mutex mu;
    std::uint64_t first_bad = std::numeric_limits<std::uint64_t>::max();
    std::optional<Witness> witness;
    detail::parallel_for(options.samples, options.threads, [&](std::uint64_t s) {
      {
        std::lock_guard lock(mu);
        if (s > first_bad) return;
      }
      std::mt19937_64 rng(detail::stream_seed(options.seed, s));
      std::uniform_int_distribution<Slot> pick(0, L - 1);
      OffsetVector tau = OffsetVector::zeros(static_cast<std::size_t>(K));
      for (auto& o : tau.offsets) o = pick(rng);
      std::vector<std::uint8_t> delivered;
      if (auto bad = detail::first_failing_pair(set, tau, delivered)) {
        auto [i, j] = *bad;
        Witness w{i, j, {}};
        for (int x : set.division.members(set.division.group_of(i))) w.offsets.emplace_back(x, tau[static_cast<std::size_t>(x)]);
        if (set.division.group_of(j) != set.division.group_of(i)) w.offsets.emplace_back(j, tau[static_cast<std::size_t>(j)]);
        std::lock_guard lock(mu);
        if (s < first_bad) {
          first_bad = s;
          witness = std::move(w);
        }
      }
    });
    report.pairs_checked = static_cast<std::uint64_t>(K) * static_cast<std::uint64_t>(K - 1);
    report.combinations = witness ? first_bad + 1 : options.samples;
    report.verdict = witness ? Verdict::FailedWithWitness : Verdict::Unknown;
    report.witness = std::move(witness);
    return report;
  }

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j)
      if (i != j) pairs.emplace_back(i, j);

  std::vector<VerificationReport> per_pair(pairs.size());
  detail::parallel_for(pairs.size(), options.threads, [&](std::uint64_t k) {
    auto [i, j] = pairs[k];
    per_pair[k] = options.method == Method::Exhaustive ? check_pair_exhaustive(set, i, j, options.budget)
                                                       : check_pair_conservative(set, i, j);
  });

  bool unknown = false;
  for (auto& r : per_pair) {
    report.pairs_checked += 1;
    report.combinations += r.combinations;
    if (r.verdict == Verdict::FailedWithWitness && !report.witness) report.witness = r.witness;
    if (r.verdict == Verdict::Unknown) unknown = true;
  }
  if (report.witness)
    report.verdict = Verdict::FailedWithWitness;
  else if (unknown)
    report.verdict = Verdict::Unknown;
  else
    report.verdict = options.method == Method::Exhaustive ? Verdict::Proven : Verdict::ProvenConservative;
  return report;
}

// ---------------------------------------------------------------------------
// Blocking algorithm

struct BlockingTrace {
  std::vector<std::size_t> a;          // a_1..a_k
  std::vector<Slot> chosen_offsets;    // tau_2..tau_k
  std::vector<std::size_t> weights;    // w_2..w_k
  Slot L = 0;
};

// Shift each competitor to collide with as many surviving ones of e1 as
// possible (smallest maximizing shift wins ties), then erase the collided ones.
inline BlockingTrace blocking_run(const BinarySequence& e1, const std::vector<BinarySequence>& others) {
  const auto L = static_cast<Slot>(e1.length());
  for (const auto& e : others)
    if (static_cast<Slot>(e.length()) != L) throw std::invalid_argument("blocking_run: length mismatch");

  BlockingTrace trace;
  trace.L = L;
  auto residual = e1;
  trace.a.push_back(residual.weight());
  std::vector<std::size_t> hist(static_cast<std::size_t>(L));
  for (const auto& e : others) {
    std::fill(hist.begin(), hist.end(), 0);
    const auto r_ones = residual.ones();
    const auto e_ones = e.ones();
    for (Slot t : r_ones)
      for (Slot u : e_ones) ++hist[static_cast<std::size_t>(mod(u - t, L))];
    Slot best = 0;
    for (Slot tau = 1; tau < L; ++tau)
      if (hist[static_cast<std::size_t>(tau)] > hist[static_cast<std::size_t>(best)]) best = tau;
    for (Slot t : r_ones)
      if (e.bits[static_cast<std::size_t>((t + best) % L)]) residual.bits[static_cast<std::size_t>(t)] = 0;
    trace.chosen_offsets.push_back(best);
    trace.weights.push_back(e_ones.size());
    trace.a.push_back(residual.weight());
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Recursive comparison sequences

// Terms b_1..b_count of b_r = b_{r-1} - ceil(b_{r-1} * b_1 * factor / L).
// The sequence stops moving at its first non-positive term.
// Pass factor = mu for the plain recursion, or W*eps with b_1 := b_2 for the
// blocking comparison sequence.
inline std::vector<std::int64_t> b_sequence(std::int64_t b_start, double factor, std::int64_t L, std::size_t count) {
  if (L < 1) throw std::invalid_argument("b_sequence: need L >= 1");
  std::vector<std::int64_t> b;
  b.reserve(count);
  if (count == 0) return b;
  b.push_back(b_start);
  while (b.size() < count) {
    if (b.back() <= 0) {
      b.push_back(b.back());
      continue;
    }
    const long double x = static_cast<long double>(b.back()) * static_cast<long double>(b_start) * factor / static_cast<long double>(L);
    b.push_back(b.back() - static_cast<std::int64_t>(std::ceil(x)));
  }
  return b;
}

// Exact variant for a rational factor num/den.
inline std::vector<std::int64_t> b_sequence(std::int64_t b_start, std::int64_t factor_num, std::int64_t factor_den,
                                            std::int64_t L, std::size_t count) {
  if (L < 1 || factor_den < 1) throw std::invalid_argument("b_sequence: need L >= 1 and a positive denominator");
  std::vector<std::int64_t> b;
  b.reserve(count);
  if (count == 0) return b;
  b.push_back(b_start);
  while (b.size() < count)
    b.push_back(b.back() <= 0 ? b.back() : b.back() - ceil_div(b.back() * b_start * factor_num, L * factor_den));
  return b;
}

// ---------------------------------------------------------------------------
// Lower bounds

struct BoundReport {
  int W = 0, k = 0, M = 0, K = 0;
  std::int64_t bound_thm2 = 0;  // ceil(8 (k-1)^2 W eps / 9), eps = 1 - 1/k
  std::int64_t bound_thm3 = 0;  // 4W(k-1) for k >= 2, 4(W-1) for k = 1
  std::int64_t combined = 0;
  std::optional<std::int64_t> improved;  // ceil(8 (k-1)^2 W / 9) when alpha_i is a multiple of W
  std::vector<std::int64_t> b_sequence;  // b_2..b_k at L = combined, b_2 = k-1, factor W*eps
  double eps = 0.0;
};

inline BoundReport lower_bound(int W, int k, int M, int K, bool alpha_multiple_of_W = false) {
  if (W < 1 || k < 1 || M < W || K < W * k) throw std::invalid_argument("lower_bound: inconsistent parameters");
  BoundReport r;
  r.W = W;
  r.k = k;
  r.M = M;
  r.K = K;
  r.eps = 1.0 - 1.0 / k;
  const std::int64_t km1 = k - 1;
  if (k == 1) {
    r.bound_thm2 = 0;
    r.bound_thm3 = 4LL * (W - 1);
    r.combined = r.bound_thm3;
    return r;
  }
  // 8 (k-1)^2 W (1 - 1/k) / 9 = 8 W (k-1)^3 / (9k)
  r.bound_thm2 = ceil_div(8LL * W * km1 * km1 * km1, 9LL * k);
  r.bound_thm3 = 4LL * W * km1;
  r.combined = std::max(r.bound_thm2, r.bound_thm3);
  if (alpha_multiple_of_W) r.improved = ceil_div(8LL * W * km1 * km1, 9);
  r.b_sequence = b_sequence(km1, static_cast<std::int64_t>(W) * km1, k, r.combined, static_cast<std::size_t>(k - 1));
  return r;
}

// Bound for an even division of K nodes into W groups.
inline BoundReport lower_bound_even(int K, int M, int W, bool alpha_multiple_of_W = false) {
  return lower_bound(W, K / W, M, K, alpha_multiple_of_W);
}

struct RatioCell {
  int K = 0, M = 0;
  std::int64_t L = 0;
  std::int64_t bound = 0;
  double ratio = 0.0;  // rounded to 2 decimals
};

// Constructed L (W = M, even division) over the combined lower bound.
// Cells with M > M' are skipped.
inline std::vector<RatioCell> ratio_table(const std::vector<int>& Ks, const std::vector<int>& Ms) {
  std::vector<RatioCell> cells;
  for (int M : Ms)
    for (int K : Ks) {
      if (M > m_prime(K) || M > K) continue;
      const auto params = select_params(K, M, M, GroupDivision::even(K, M));
      const auto bound = lower_bound_even(K, M, M).combined;
      if (bound <= 0) continue;
      const double ratio = std::round(100.0 * static_cast<double>(params.L) / static_cast<double>(bound)) / 100.0;
      cells.push_back({K, M, params.L, bound, ratio});
    }
  return cells;
}

// F(x) = x/d + (1/x) * sum_{i=2}^{d} 1/i for x in (sqrt(d-1), sqrt(d)].
inline double appendix_F(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("appendix_F: need x > 0");
  const double x2 = x * x;
  auto d = static_cast<long long>(std::ceil(x2));
  if (d < 1) d = 1;
  while (d > 1 && static_cast<double>(d - 1) >= x2) --d;
  double h = 0.0;
  for (long long i = 2; i <= d; ++i) h += 1.0 / static_cast<double>(i);
  return x / static_cast<double>(d) + h / x;
}

}  // namespace schedseq
