// schedseq: construct, verify, bound and simulate multichannel schedule sequences.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "schedseq/schedseq.hpp"

namespace {

using schedseq::io::json;

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitWitness = 2;
constexpr int kExitUnknown = 3;
constexpr int kExitUsage = 4;

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_generate(int K, int M, std::optional<int> W, std::optional<std::uint64_t> seed, const std::string& out) {
  schedseq::BuildOptions options;
  options.W = W;
  options.shuffle_seed = seed;
  const auto set = schedseq::build_schedule_set(K, M, options);
  schedseq::io::write_sequence_set(set, out);
  const auto bound = schedseq::lower_bound_even(K, M, set.W());
  print({{"schema", schedseq::io::kGenerateSchema},
         {"K", K},
         {"M", M},
         {"W", set.W()},
         {"L", set.L()},
         {"Mprime", schedseq::m_prime(K)},
         {"lower_bound", bound.combined},
         {"out", out}});
  return kExitOk;
}

int cmd_verify(const std::string& in, const std::string& mode, const schedseq::VerifyOptions& base) {
  schedseq::ScheduleSequenceSet set;
  try {
    set = schedseq::io::read_sequence_set(in);
  } catch (const schedseq::io::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  }
  auto options = base;
  if (mode == "exhaustive")
    options.method = schedseq::Method::Exhaustive;
  else if (mode == "conservative")
    options.method = schedseq::Method::Conservative;
  else
    options.method = schedseq::Method::Randomized;
  const auto report = schedseq::verify_set(set, options);
  print(schedseq::io::to_json(report));
  switch (report.verdict) {
    case schedseq::Verdict::Proven:
    case schedseq::Verdict::ProvenConservative:
      return kExitOk;
    case schedseq::Verdict::FailedWithWitness:
      return kExitWitness;
    case schedseq::Verdict::Unknown:
      break;
  }
  return kExitUnknown;
}

int cmd_bound(int K, int M, std::optional<int> W_opt, bool with_ratio) {
  const int W = W_opt.value_or(M);
  if (W < 1 || W > M || M > K) throw std::invalid_argument("need 1 <= W <= M <= K");
  const auto b = schedseq::lower_bound_even(K, M, W);
  json j{{"schema", schedseq::io::kBoundSchema},
         {"K", K},
         {"M", M},
         {"W", W},
         {"k", b.k},
         {"bound_thm2", b.bound_thm2},
         {"bound_thm3", b.bound_thm3},
         {"combined", b.combined},
         {"Mprime", schedseq::m_prime(K)}};
  if (with_ratio) {
    const auto params = schedseq::select_params(K, M, W, schedseq::GroupDivision::even(K, W));
    j["L"] = params.L;
    if (b.combined > 0)
      j["ratio"] = std::round(100.0 * static_cast<double>(params.L) / static_cast<double>(b.combined)) / 100.0;
    else
      j["ratio"] = nullptr;
  }
  print(j);
  return kExitOk;
}

int cmd_framelen(int K, double target, std::optional<std::int64_t> cdf_at) {
  const auto model = schedseq::CouponModel::optimal(K);
  json j{{"schema", schedseq::io::kFrameLengthSchema},
         {"K", K},
         {"target", target},
         {"L_rand", schedseq::frame_length(model, target)},
         {"p_star", 1.0 / K},
         {"P_star", model.P}};
  j["cdf_at"] = cdf_at ? json{{"ell", *cdf_at}, {"cdf", schedseq::group_cdf(model, *cdf_at)}} : json(nullptr);
  print(j);
  return kExitOk;
}

struct SimulateArgs {
  std::string in;
  bool random = false;
  int K = 0;
  int W = 1;
  std::string scheme = "assignT";
  std::uint64_t runs = 10'000;
  std::uint64_t seed = 0;
  std::int64_t max_slots = 0;
  unsigned threads = 0;
  std::string out;
  std::string summary;
};

int cmd_simulate(const SimulateArgs& a) {
  schedseq::SimConfig config;
  if (a.random) {
    if (a.scheme == "general")
      config.scheme = schedseq::GeneralRandomParams::optimal(a.K, a.W);
    else
      config.scheme = schedseq::AssignTRandomParams::optimal(a.K, a.W);
  } else {
    try {
      config.scheme = schedseq::SequenceScheme{schedseq::io::read_sequence_set(a.in)};
    } catch (const schedseq::io::ParseError& e) {
      std::cerr << "parse error: " << e.what() << '\n';
      return kExitParse;
    }
  }
  config.runs = a.runs;
  config.seed = a.seed;
  config.max_slots = a.max_slots;
  config.threads = a.threads;
  const auto result = schedseq::simulate(config);

  std::ofstream csv(a.out);
  if (!csv) throw std::runtime_error("cannot write " + a.out);
  schedseq::io::write_completion_csv(result, csv);

  const auto summary = schedseq::io::summary_json(result);
  if (!a.summary.empty()) {
    std::ofstream js(a.summary);
    if (!js) throw std::runtime_error("cannot write " + a.summary);
    js << summary.dump(2) << '\n';
  }
  json brief = summary;
  brief.erase("pmf");
  print(brief);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multichannel schedule sequences: construction, verification, bounds and simulation"};
  app.require_subcommand(1);

  int K = 0, M = 0;
  std::optional<int> W;
  std::optional<std::uint64_t> gen_seed;
  std::string out;
  auto* gen = app.add_subcommand("generate", "Build a schedule sequence set and write it as JSON");
  gen->add_option("--K", K, "number of nodes")->required()->check(CLI::PositiveNumber);
  gen->add_option("--M", M, "number of channels")->required()->check(CLI::PositiveNumber);
  gen->add_option("--W", W, "number of groups (default: shortest L)");
  gen->add_option("--seed", gen_seed, "shuffle CRT-UI generators within groups");
  gen->add_option("--out", out, "output file")->required();

  std::string in, mode = "exhaustive";
  schedseq::VerifyOptions vopts;
  auto* ver = app.add_subcommand("verify", "Check the guaranteed-delivery property of a set");
  ver->add_option("--in", in, "sequence set file")->required();
  ver->add_option("--mode", mode, "exhaustive, conservative or randomized")
      ->check(CLI::IsMember({"exhaustive", "conservative", "randomized"}));
  ver->add_option("--samples", vopts.samples, "offset vectors for randomized mode");
  ver->add_option("--budget", vopts.budget, "offset combinations per pair for exhaustive mode");
  ver->add_option("--seed", vopts.seed, "RNG seed");
  ver->add_option("--threads", vopts.threads, "worker threads (0: all cores)");

  bool ratio = false;
  auto* bnd = app.add_subcommand("bound", "Lower bound on the period for an even division");
  bnd->add_option("--K", K, "number of nodes")->required()->check(CLI::PositiveNumber);
  bnd->add_option("--M", M, "number of channels")->required()->check(CLI::PositiveNumber);
  bnd->add_option("--W", W, "number of groups (default: M)");
  bnd->add_flag("--ratio", ratio, "also report constructed L and L / bound");

  double target = 0.99999;
  std::optional<std::int64_t> cdf_at;
  auto* fl = app.add_subcommand("framelen", "Frame length of the optimal single-channel random scheme");
  fl->add_option("--K", K, "number of nodes")->required()->check(CLI::Range(2, schedseq::kMaxCouponK));
  fl->add_option("--target", target, "completion probability")->check(CLI::Range(0.0, 1.0));
  fl->add_option("--cdf-at", cdf_at, "also evaluate the completion CDF at this length");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo broadcast completion times");
  auto* sim_in = sim->add_option("--in", sa.in, "sequence set file");
  auto* sim_rand = sim->add_flag("--random", sa.random, "simulate a random-access scheme instead");
  sim_in->excludes(sim_rand);
  sim->add_option("--K", sa.K, "nodes (random schemes)");
  sim->add_option("--W", sa.W, "channels in use (random schemes)");
  sim->add_option("--scheme", sa.scheme, "assignT or general")->check(CLI::IsMember({"assignT", "general"}));
  sim->add_option("--runs", sa.runs, "number of runs");
  sim->add_option("--seed", sa.seed, "master seed");
  sim->add_option("--max-slots", sa.max_slots, "censoring horizon (0: default)");
  sim->add_option("--threads", sa.threads, "worker threads (0: all cores)");
  sim->add_option("--out", sa.out, "per-run CSV output")->required();
  sim->add_option("--summary", sa.summary, "JSON summary output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(K, M, W, gen_seed, out);
    if (*ver) return cmd_verify(in, mode, vopts);
    if (*bnd) return cmd_bound(K, M, W, ratio);
    if (*fl) return cmd_framelen(K, target, cdf_at);
    if (*sim) {
      if (!sa.random && sa.in.empty()) throw std::invalid_argument("simulate needs --in or --random");
      if (sa.random && sa.K < 2) throw std::invalid_argument("--random needs --K >= 2");
      return cmd_simulate(sa);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
