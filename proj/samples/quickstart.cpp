// Build an 18-node, 3-channel set, spot-check it, and
// compare its period with the random-access frame length.

#include <iostream>

#include "schedseq/schedseq.hpp"

int main() {
  using namespace schedseq;

  const int K = 18, M = 3;
  const auto set = build_schedule_set(K, M);
  std::cout << "K=" << K << " M=" << M << " -> W=" << set.W() << " L=" << set.L() << '\n';

  const auto bound = lower_bound_even(K, M, set.W());
  std::cout << "lower bound on L: " << bound.combined << '\n';

  VerifyOptions opts;
  opts.method = Method::Randomized;
  opts.samples = 2000;
  const auto report = verify_set(set, opts);
  std::cout << "randomized check over " << opts.samples << " offset vectors: " << to_string(report.verdict) << '\n';

  const auto model = CouponModel::optimal(K);
  std::cout << "P(all delivered within L slots, random access) = " << group_cdf(model, set.L()) << '\n';
  std::cout << "random-access frame length for 0.99999: " << frame_length(K) << '\n';

  SimConfig sim;
  sim.scheme = SequenceScheme{set};
  sim.runs = 1000;
  const auto dist = completion_histogram(simulate(sim));
  std::cout << "mean completion time over " << dist.runs << " runs: " << dist.mean << '\n';
}
