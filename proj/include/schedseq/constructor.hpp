#pragma once

// CRT-UI sequences and the multi-channel schedule sequence construction
// (2W x L' arrays of CRT-UI rows folded into one sequence of length 2W*L').

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "schedseq/seqcore.hpp"

namespace schedseq {

// ---------------------------------------------------------------------------
// CRT-UI construction

struct CrtUiParams {
  int K_gen = 0;
  int w = 0;
  std::int64_t p = 0;
  std::int64_t q = 0;

  std::int64_t Lprime() const { return p * q; }

  void validate() const {
    if (K_gen < 1) throw std::invalid_argument("CrtUiParams: need at least one generator");
    if (w < K_gen) throw std::invalid_argument("CrtUiParams: need w >= K");
    if (!is_prime(p)) throw std::invalid_argument("CrtUiParams: p must be prime");
    if (p < w) throw std::invalid_argument("CrtUiParams: need p >= w");
    if (std::gcd(p, q) != 1) throw std::invalid_argument("CrtUiParams: gcd(p, q) must be 1");
    if (q < 2 * static_cast<std::int64_t>(w) - 1) throw std::invalid_argument("CrtUiParams: need q >= 2w - 1");
  }
};

// Ones at the w positions t with Phi(t) = (u*g mod p, u mod q), u in Z_w.
// g is the 1-based generator.
inline BinarySequence build_crt_ui(const CrtUiParams& params, int g) {
  params.validate();
  if (g < 1 || g > params.K_gen) throw std::invalid_argument("build_crt_ui: generator outside [K]");
  const CrtCorrespondence crt(params.p, params.q);
  std::vector<Slot> ones;
  ones.reserve(static_cast<std::size_t>(params.w));
  for (std::int64_t u = 0; u < params.w; ++u)
    ones.push_back(crt.inverse(u * g % params.p, u % params.q));
  return BinarySequence::with_ones(static_cast<std::size_t>(params.Lprime()), ones);
}

// Auto-correlation of s_g at shift tau predicted from the residues of tau:
// w - d when Phi(tau) = +-(g, 1)*d for some d in Z_w, else 0.
inline std::size_t auto_correlation_predict(const CrtUiParams& params, int g, Slot tau) {
  if (g < 1 || g > params.p - 1) throw std::invalid_argument("auto_correlation_predict: need 1 <= g <= p-1");
  const std::int64_t L = params.Lprime();
  if (tau < 0 || tau >= L) throw std::out_of_range("auto_correlation_predict: tau outside Z_L'");
  const std::int64_t a = tau % params.p;
  const std::int64_t b = tau % params.q;
  for (std::int64_t d = 0; d < params.w; ++d) {
    const std::int64_t ga = g * d % params.p;
    const std::int64_t gb = d % params.q;
    const bool plus = (a == ga && b == gb);
    const bool minus = (a == mod(-ga, params.p) && b == mod(-gb, params.q));
    if (plus || minus) return static_cast<std::size_t>(params.w - d);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Parameter selection

struct ConstructionParams {
  int K = 0;
  int M = 0;
  int W = 0;
  GroupDivision division;
  int ell = 0;
  int w = 0;
  std::int64_t p = 0;
  std::int64_t q = 0;
  std::int64_t Lprime = 0;
  std::int64_t L = 0;
  std::vector<std::int64_t> deltas;  // deltas[m] for group m (0-based)

  CrtUiParams crt_ui() const {
    // W = 1 uses K generators; W >= 2 uses ell generators per group.
    return {W == 1 ? K : ell, w, p, q};
  }
};

// Smallest n with n >= sqrt(K/2 + 9/16) + 3/4, evaluated in integers:
// (4n - 3)^2 >= 8K + 9.
inline int m_prime(int K) {
  if (K < 1) throw std::invalid_argument("m_prime: K must be positive");
  int n = 1;
  while ((4LL * n - 3) * (4LL * n - 3) < 8LL * K + 9) ++n;
  return n;
}

inline ConstructionParams select_params(int K, int M, int W, const GroupDivision& division) {
  if (K < 2) throw std::invalid_argument("select_params: need K >= 2");
  if (M < 1 || M > K) throw std::invalid_argument("select_params: need 1 <= M <= K");
  if (W < 1 || W > M) throw std::invalid_argument("select_params: need 1 <= W <= M");
  if (division.K() != K) throw std::invalid_argument("select_params: division covers a different node count");
  if (division.W() != W) throw std::invalid_argument("select_params: division must have exactly W non-empty groups");

  ConstructionParams c;
  c.K = K;
  c.M = M;
  c.W = W;
  c.division = division;
  c.ell = division.max_size();

  if (W == 1) {
    // Plain CRT-UI with w = K.
    c.w = K;
    c.p = c.w;
    while (!is_prime(c.p)) ++c.p;
    c.q = 2LL * c.w - 1;
    while (std::gcd(c.q, c.p) != 1) ++c.q;
    c.Lprime = c.p * c.q;
    c.L = c.Lprime;
    c.deltas = {0};
    return c;
  }

  const std::int64_t two_w = 2LL * W;
  c.w = c.ell + 1;
  c.p = std::max<std::int64_t>(c.w, 2LL * W - 2);
  while (!(is_prime(c.p) && std::gcd(c.p, two_w) == 1)) ++c.p;
  c.q = 2LL * c.w - 1;
  while (!(std::gcd(c.q, c.p) == 1 && std::gcd(c.q, two_w) == 1)) ++c.q;
  c.Lprime = c.p * c.q;
  c.L = two_w * c.Lprime;

  if (std::gcd(two_w, c.Lprime) != 1) throw std::logic_error("select_params: 2W and L' not coprime");
  if (c.ell > c.p - 1) throw std::logic_error("select_params: more generators than p - 1");

  const CrtCorrespondence crt(c.p, c.q);
  c.deltas.resize(static_cast<std::size_t>(W));
  for (int m = 0; m < W; ++m) c.deltas[static_cast<std::size_t>(m)] = crt.inverse(m, 0);
  return c;
}

struct WChoice {
  int W = 0;
  int Mprime = 0;
  ConstructionParams params;
};

// Evaluates every W in [1, M] under even division and keeps the shortest L
// (ties go to the smaller W).
inline WChoice choose_W(int K, int M) {
  if (M < 1 || M > K) throw std::invalid_argument("choose_W: need 1 <= M <= K");
  WChoice best;
  best.Mprime = m_prime(K);
  for (int W = 1; W <= M; ++W) {
    auto params = select_params(K, M, W, GroupDivision::even(K, W));
    if (best.W == 0 || params.L < best.params.L) {
      best.W = W;
      best.params = std::move(params);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Arrays and schedule sets

using SymbolArray = std::vector<std::vector<Symbol>>;

// Rows 2r and 2r+1 (0-based r) are u_n(T_m, R_r) and its delta_m shift, where
// u_n is the CRT-UI sequence with generator `generator` (1-based).
inline SymbolArray build_array_for(const ConstructionParams& params, int group, int generator) {
  if (params.W < 2) throw std::invalid_argument("build_array: W = 1 has no array form");
  const auto u = build_crt_ui(params.crt_ui(), generator);
  const auto u_shifted = cyclic_shift(u, params.deltas.at(static_cast<std::size_t>(group)));
  SymbolArray a;
  a.reserve(2 * static_cast<std::size_t>(params.W));
  for (int r = 0; r < params.W; ++r) {
    a.push_back(relabel(u, Symbol::transmit(group), Symbol::receive(r), group).symbols);
    a.push_back(relabel(u_shifted, Symbol::transmit(group), Symbol::receive(r), group).symbols);
  }
  return a;
}

// Array of node i as placed by the division: the n-th member of group m uses generator n.
inline SymbolArray build_array(const ConstructionParams& params, int node) {
  return build_array_for(params, params.division.group_of(node), params.division.index_in_group(node) + 1);
}

// s(t) = A(t mod 2W, t mod L')
inline ScheduleSequence fold_array(const SymbolArray& a, int owner_group, std::int64_t Lprime) {
  const auto rows = static_cast<std::int64_t>(a.size());
  const std::int64_t L = rows * Lprime;
  ScheduleSequence s;
  s.owner_group = owner_group;
  s.symbols.resize(static_cast<std::size_t>(L));
  for (std::int64_t t = 0; t < L; ++t)
    s.symbols[static_cast<std::size_t>(t)] = a[static_cast<std::size_t>(t % rows)][static_cast<std::size_t>(t % Lprime)];
  return s;
}

struct ScheduleSequenceSet {
  int M = 0;
  GroupDivision division;
  std::vector<ScheduleSequence> sequences;
  std::optional<ConstructionParams> params;
  std::vector<int> generators;  // 1-based CRT-UI generator per node, when constructed

  int K() const { return static_cast<int>(sequences.size()); }
  int W() const { return division.W(); }
  std::int64_t L() const { return sequences.empty() ? 0 : static_cast<std::int64_t>(sequences.front().length()); }

  // Common period, matching division, Assignment T and channel range.
  void validate() const {
    if (sequences.empty()) throw std::invalid_argument("ScheduleSequenceSet: empty");
    if (division.K() != K()) throw std::invalid_argument("ScheduleSequenceSet: division size mismatch");
    if (W() > M) throw std::invalid_argument("ScheduleSequenceSet: more groups than channels");
    for (int i = 0; i < K(); ++i) {
      const auto& s = sequences[static_cast<std::size_t>(i)];
      if (static_cast<std::int64_t>(s.length()) != L()) throw std::invalid_argument("ScheduleSequenceSet: unequal periods");
      if (s.owner_group != division.group_of(i)) throw std::invalid_argument("ScheduleSequenceSet: owner group mismatch");
      for (const auto& sym : s.symbols)
        if (sym.channel < 0 || sym.channel >= W()) throw std::invalid_argument("ScheduleSequenceSet: channel outside [W]");
      if (!s.satisfies_assignment()) throw std::invalid_argument("ScheduleSequenceSet: transmission outside own channel");
    }
  }
};

struct BuildOptions {
  std::optional<int> W;                       // default: choose_W
  std::optional<GroupDivision> division;      // default: even division
  std::optional<std::uint64_t> shuffle_seed;  // default: first |G_m| generators per group
};

inline ScheduleSequenceSet build_schedule_set(int K, int M, const BuildOptions& options = {}) {
  if (M < 1 || M > K) throw std::invalid_argument("build_schedule_set: need 1 <= M <= K");
  ConstructionParams params;
  if (options.division) {
    const int W = options.division->W();
    if (options.W && *options.W != W) throw std::invalid_argument("build_schedule_set: W disagrees with division");
    params = select_params(K, M, W, *options.division);
  } else if (options.W) {
    params = select_params(K, M, *options.W, GroupDivision::even(K, *options.W));
  } else {
    params = choose_W(K, M).params;
  }

  ScheduleSequenceSet set;
  set.M = M;
  set.division = params.division;
  set.sequences.reserve(static_cast<std::size_t>(K));
  set.generators.reserve(static_cast<std::size_t>(K));

  if (params.W == 1) {
    const auto ui = params.crt_ui();
    for (int g = 1; g <= K; ++g) {
      set.sequences.push_back(relabel(build_crt_ui(ui, g), Symbol::transmit(0), Symbol::receive(0), 0));
      set.generators.push_back(g);
    }
    set.params = std::move(params);
    return set;
  }

  // Generator assignment per group: the first |G_m| of 1..ell, or a seeded
  // random |G_m|-subset of them.
  std::vector<std::vector<int>> gens(static_cast<std::size_t>(params.W));
  std::mt19937_64 rng(options.shuffle_seed.value_or(0));
  for (int m = 0; m < params.W; ++m) {
    auto& g = gens[static_cast<std::size_t>(m)];
    g.resize(static_cast<std::size_t>(params.ell));
    std::iota(g.begin(), g.end(), 1);
    if (options.shuffle_seed) std::shuffle(g.begin(), g.end(), rng);
  }

  for (int i = 0; i < K; ++i) {
    const int m = params.division.group_of(i);
    const int gen = gens[static_cast<std::size_t>(m)][static_cast<std::size_t>(params.division.index_in_group(i))];
    set.sequences.push_back(fold_array(build_array_for(params, m, gen), m, params.Lprime));
    set.generators.push_back(gen);
  }
  set.params = std::move(params);
  return set;
}

// 2M(2c+2)(4c+2) with c = ceil(K/M); valid for even division with W = M <= M'.
inline std::int64_t length_upper_bound(int K, int M) {
  if (M < 1 || M > K) throw std::invalid_argument("length_upper_bound: need 1 <= M <= K");
  if (M > m_prime(K)) throw std::invalid_argument("length_upper_bound: requires M <= M'");
  const std::int64_t c = ceil_div(K, M);
  return 2LL * M * (2 * c + 2) * (4 * c + 2);
}

}  // namespace schedseq
