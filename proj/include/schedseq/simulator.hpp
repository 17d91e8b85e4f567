#pragma once

// Slot-synchronous Monte-Carlo simulation of the multi-channel collision
// channel: broadcast completion time for sequence and random schemes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "schedseq/constructor.hpp"
#include "schedseq/detail/parallel.hpp"
#include "schedseq/random_schemes.hpp"
#include "schedseq/seqcore.hpp"

namespace schedseq {

struct SequenceScheme {
  ScheduleSequenceSet set;
};

// Node in group m: T_m w.p. p_b, R_m w.p. q1, R_r w.p. q2 for each r != m.
struct AssignTRandomParams {
  int W = 1;
  int K = 0;
  double p_b = 0.0, q1 = 0.0, q2 = 0.0;
  GroupDivision division;

  static AssignTRandomParams optimal(int K, int W) {
    const auto opt = optimize_random(W, K, RandomScheme::AssignT);
    const auto probs = p_success_assignT(W, K, opt.p_star);
    return {W, K, opt.p_star, probs.q1, probs.q2, GroupDivision::even(K, W)};
  }

  void validate() const {
    if (K < 2 || W < 1 || W > K) throw std::invalid_argument("AssignTRandomParams: need 2 <= K and 1 <= W <= K");
    if (division.K() != K || division.W() != W) throw std::invalid_argument("AssignTRandomParams: division mismatch");
    if (!(p_b > 0.0 && p_b < 1.0 && q1 > 0.0 && q1 < 1.0)) throw std::invalid_argument("AssignTRandomParams: probabilities outside (0,1)");
    if (W > 1 && !(q2 > 0.0 && q2 < 1.0)) throw std::invalid_argument("AssignTRandomParams: q2 outside (0,1)");
    if (std::abs(p_b + q1 + (W - 1) * q2 - 1.0) > 1e-9) throw std::invalid_argument("AssignTRandomParams: probabilities must sum to 1");
  }
};

// Every node: T_c w.p. p_a and R_c w.p. q_a for each channel c.
struct GeneralRandomParams {
  int W = 1;
  int K = 0;
  double p_a = 0.0, q_a = 0.0;

  static GeneralRandomParams optimal(int K, int W) {
    const auto opt = optimize_random(W, K, RandomScheme::General);
    return {W, K, opt.p_star, 1.0 / W - opt.p_star};
  }

  void validate() const {
    if (K < 2 || W < 1) throw std::invalid_argument("GeneralRandomParams: need K >= 2 and W >= 1");
    if (!(p_a > 0.0 && p_a < 1.0 / W)) throw std::invalid_argument("GeneralRandomParams: need 0 < p_a < 1/W");
    if (std::abs(W * (p_a + q_a) - 1.0) > 1e-9) throw std::invalid_argument("GeneralRandomParams: need W(p_a + q_a) = 1");
  }
};

using SchemeConfig = std::variant<SequenceScheme, AssignTRandomParams, GeneralRandomParams>;

enum class OffsetMode { UniformRandom, Fixed, AllZero };

struct SimConfig {
  SchemeConfig scheme;
  std::uint64_t runs = 10'000;
  std::uint64_t seed = 0;
  std::int64_t max_slots = 0;  // 0: 20 L (sequence) or 20 frame_length (random)
  OffsetMode offset_mode = OffsetMode::UniformRandom;
  OffsetVector fixed_offsets;  // OffsetMode::Fixed only
  unsigned threads = 0;
  bool record_pairs = false;

  int K() const {
    return std::visit([](const auto& s) {
      if constexpr (std::is_same_v<std::decay_t<decltype(s)>, SequenceScheme>)
        return s.set.K();
      else
        return s.K;
    }, scheme);
  }
  int W() const {
    return std::visit([](const auto& s) {
      if constexpr (std::is_same_v<std::decay_t<decltype(s)>, SequenceScheme>)
        return s.set.W();
      else
        return s.W;
    }, scheme);
  }
};

struct Completion {
  Slot time = 0;  // slots from t = 0; equals max_slots when censored
  bool censored = false;

  friend bool operator==(const Completion&, const Completion&) = default;
};

struct SimResult {
  std::vector<Completion> completion_times;
  // Per run, row-major K x K first-success slot (-1: never, or i == j).
  std::optional<std::vector<std::vector<Slot>>> per_pair_first_success;
  std::uint64_t seed = 0;
  std::int64_t max_slots = 0;
  int K = 0;
};

struct Delivery {
  int from = 0;
  int to = 0;
  int channel = 0;
};

namespace detail {

inline std::int64_t default_max_slots(const SimConfig& config) {
  if (config.max_slots > 0) return config.max_slots;
  if (const auto* seq = std::get_if<SequenceScheme>(&config.scheme)) return 20 * seq->set.L();
  const int K = config.K();
  if (K > kMaxCouponK) throw std::invalid_argument("simulate: set max_slots explicitly for K > 40");
  return 20 * frame_length(K);
}

inline void validate(const SimConfig& config) {
  std::visit([&](const auto& s) {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, SequenceScheme>) {
      s.set.validate();
      if (config.max_slots > 0 && config.max_slots < s.set.L())
        throw std::invalid_argument("simulate: max_slots must be at least L for sequence runs");
    } else {
      s.validate();
    }
  }, config.scheme);
  if (config.offset_mode == OffsetMode::Fixed && config.fixed_offsets.size() != static_cast<std::size_t>(config.K()))
    throw std::invalid_argument("simulate: fixed offsets must list one offset per node");
}

struct RunOutcome {
  Completion completion;
  std::vector<Slot> first_success;
};

// One run. observer(t, actions, deliveries) is invoked after every slot.
template <class Observer>
RunOutcome run_once(const SimConfig& config, std::int64_t max_slots, std::uint64_t run_index, Observer&& observer) {
  const int K = config.K();
  const int W = config.W();
  std::mt19937_64 rng(stream_seed(config.seed, run_index));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto* seq = std::get_if<SequenceScheme>(&config.scheme);
  const auto* at = std::get_if<AssignTRandomParams>(&config.scheme);
  const auto* gen = std::get_if<GeneralRandomParams>(&config.scheme);

  std::vector<Slot> offsets(static_cast<std::size_t>(K), 0);
  Slot L = 0;
  if (seq) {
    L = seq->set.L();
    if (config.offset_mode == OffsetMode::UniformRandom) {
      std::uniform_int_distribution<Slot> pick(0, L - 1);
      for (auto& o : offsets) o = pick(rng);
    } else if (config.offset_mode == OffsetMode::Fixed) {
      for (int x = 0; x < K; ++x) offsets[static_cast<std::size_t>(x)] = mod(config.fixed_offsets[static_cast<std::size_t>(x)], L);
    }
  }

  RunOutcome out;
  out.first_success.assign(static_cast<std::size_t>(K) * static_cast<std::size_t>(K), -1);
  std::int64_t remaining = static_cast<std::int64_t>(K) * (K - 1);
  std::vector<Symbol> actions(static_cast<std::size_t>(K));
  std::vector<int> count(static_cast<std::size_t>(W));
  std::vector<int> sender(static_cast<std::size_t>(W));
  std::vector<Delivery> deliveries;

  for (Slot t = 0; t < max_slots; ++t) {
    for (int x = 0; x < K; ++x) {
      auto& a = actions[static_cast<std::size_t>(x)];
      if (seq) {
        a = seq->set.sequences[static_cast<std::size_t>(x)][static_cast<std::size_t>((t + offsets[static_cast<std::size_t>(x)]) % L)];
      } else if (at) {
        const int g = at->division.group_of(x);
        const double u = unit(rng);
        if (u < at->p_b) {
          a = Symbol::transmit(g);
        } else if (u < at->p_b + at->q1 || W == 1) {
          a = Symbol::receive(g);
        } else {
          int r = static_cast<int>((u - at->p_b - at->q1) / at->q2);
          r = std::clamp(r, 0, W - 2);
          a = Symbol::receive(r >= g ? r + 1 : r);
        }
      } else {
        const double u = unit(rng);
        const double tx = W * gen->p_a;
        if (u < tx)
          a = Symbol::transmit(std::clamp(static_cast<int>(u / gen->p_a), 0, W - 1));
        else
          a = Symbol::receive(std::clamp(static_cast<int>((u - tx) / gen->q_a), 0, W - 1));
      }
    }

    std::fill(count.begin(), count.end(), 0);
    for (int x = 0; x < K; ++x) {
      const auto& a = actions[static_cast<std::size_t>(x)];
      if (a.kind == Action::Transmit) {
        ++count[static_cast<std::size_t>(a.channel)];
        sender[static_cast<std::size_t>(a.channel)] = x;
      }
    }
    deliveries.clear();
    for (int y = 0; y < K; ++y) {
      const auto& a = actions[static_cast<std::size_t>(y)];
      if (a.kind != Action::Receive || count[static_cast<std::size_t>(a.channel)] != 1) continue;
      const int x = sender[static_cast<std::size_t>(a.channel)];
      deliveries.push_back({x, y, a.channel});
      auto& first = out.first_success[static_cast<std::size_t>(x) * static_cast<std::size_t>(K) + static_cast<std::size_t>(y)];
      if (first < 0) {
        first = t;
        --remaining;
      }
    }
    observer(t, actions, deliveries);
    if (remaining == 0) {
      out.completion = {t + 1, false};
      return out;
    }
  }
  out.completion = {max_slots, true};
  return out;
}

}  // namespace detail

inline SimResult simulate(const SimConfig& config) {
  detail::validate(config);
  const std::int64_t max_slots = detail::default_max_slots(config);
  SimResult result;
  result.seed = config.seed;
  result.max_slots = max_slots;
  result.K = config.K();
  result.completion_times.resize(config.runs);
  if (config.record_pairs) result.per_pair_first_success.emplace(config.runs);

  detail::parallel_for(config.runs, config.threads, [&](std::uint64_t run) {
    auto outcome = detail::run_once(config, max_slots, run, [](Slot, const auto&, const auto&) {});
    result.completion_times[run] = outcome.completion;
    if (config.record_pairs) (*result.per_pair_first_success)[run] = std::move(outcome.first_success);
  });
  return result;
}

// Replays a single run with a per-slot observer: observer(t, actions, deliveries).
template <class Observer>
Completion simulate_trace(const SimConfig& config, std::uint64_t run_index, Observer&& observer) {
  detail::validate(config);
  return detail::run_once(config, detail::default_max_slots(config), run_index, observer).completion;
}

// ---------------------------------------------------------------------------
// Summaries

struct HistogramBin {
  Slot start = 0;  // bin covers [start, start + width)
  std::uint64_t count = 0;
  double pmf = 0.0;
  double cdf = 0.0;
};

struct CompletionDistribution {
  std::vector<HistogramBin> bins;
  Slot bin_width = 1;
  std::uint64_t runs = 0;
  std::uint64_t censored = 0;
  double censored_mass = 0.0;
  double mean = 0.0;  // over completed runs

  // Smallest completion time whose empirical CDF (over all runs) reaches q;
  // nullopt when q falls inside the censored mass.
  std::optional<Slot> quantile(double q) const {
    for (const auto& b : bins)
      if (b.cdf >= q) return b.start;
    return std::nullopt;
  }
};

// Normalized PMF/CDF over completion times; censored runs are kept out of the
// bins and reported as a separate mass.
inline CompletionDistribution completion_histogram(const SimResult& result, Slot bin_width = 1) {
  if (bin_width < 1) throw std::invalid_argument("completion_histogram: bin width must be positive");
  CompletionDistribution d;
  d.bin_width = bin_width;
  d.runs = result.completion_times.size();
  std::map<Slot, std::uint64_t> counts;
  long double total = 0.0L;
  for (const auto& c : result.completion_times) {
    if (c.censored) {
      ++d.censored;
      continue;
    }
    ++counts[(c.time / bin_width) * bin_width];
    total += c.time;
  }
  if (d.runs == 0) return d;
  const auto completed = d.runs - d.censored;
  d.mean = completed ? static_cast<double>(total / completed) : 0.0;
  d.censored_mass = static_cast<double>(d.censored) / static_cast<double>(d.runs);
  std::uint64_t cumulative = 0;
  for (auto [start, n] : counts) {
    cumulative += n;
    d.bins.push_back({start, n, static_cast<double>(n) / static_cast<double>(d.runs),
                      static_cast<double>(cumulative) / static_cast<double>(d.runs)});
  }
  return d;
}

}  // namespace schedseq
