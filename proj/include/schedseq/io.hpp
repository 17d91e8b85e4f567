#pragma once

// File formats: sequence sets and verification reports as JSON, simulation
// runs as CSV plus a JSON summary. Channel numbers are 1-based on disk.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "schedseq/constructor.hpp"
#include "schedseq/simulator.hpp"
#include "schedseq/verifier.hpp"

namespace schedseq::io {

using nlohmann::json;

inline constexpr const char* kSequenceSetSchema = "schedseq.sequence_set/1";
inline constexpr const char* kReportSchema = "schedseq.verification_report/1";
inline constexpr const char* kBoundSchema = "schedseq.bound/1";
inline constexpr const char* kFrameLengthSchema = "schedseq.frame_length/1";
inline constexpr const char* kSimSummarySchema = "schedseq.sim_summary/1";
inline constexpr const char* kGenerateSchema = "schedseq.generate/1";

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string symbol_to_string(const Symbol& s) {
  return (s.kind == Action::Transmit ? "T" : "R") + std::to_string(s.channel + 1);
}

// Accepts ^[TR][0-9]+$ with a channel in [1, W].
inline Symbol symbol_from_string(const std::string& text, int W) {
  if (text.size() < 2 || (text[0] != 'T' && text[0] != 'R'))
    throw ParseError("bad symbol '" + text + "'");
  int channel = 0;
  const char* first = text.data() + 1;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, channel);
  if (ec != std::errc() || ptr != last || !std::all_of(first, last, [](char c) { return c >= '0' && c <= '9'; }))
    throw ParseError("bad symbol '" + text + "'");
  if (channel < 1 || channel > W)
    throw ParseError("symbol '" + text + "' names a channel outside [1, " + std::to_string(W) + "]");
  return {text[0] == 'T' ? Action::Transmit : Action::Receive, channel - 1};
}

inline json to_json(const ScheduleSequenceSet& set) {
  json j;
  j["schema"] = kSequenceSetSchema;
  j["K"] = set.K();
  j["M"] = set.M;
  j["W"] = set.W();
  j["L"] = set.L();
  if (set.params) {
    const auto& p = *set.params;
    j["params"] = {{"w", p.w}, {"p", p.p}, {"q", p.q}, {"Lprime", p.Lprime}, {"deltas", p.deltas}};
  } else {
    j["params"] = nullptr;
  }
  std::vector<int> division;
  for (int g : set.division.assignment()) division.push_back(g + 1);
  j["division"] = division;
  if (!set.generators.empty()) j["generators"] = set.generators;
  json seqs = json::array();
  for (const auto& s : set.sequences) {
    json row = json::array();
    for (const auto& sym : s.symbols) row.push_back(symbol_to_string(sym));
    seqs.push_back(std::move(row));
  }
  j["sequences"] = std::move(seqs);
  return j;
}

inline ScheduleSequenceSet sequence_set_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ParseError("sequence set must be a JSON object");
    const int K = j.at("K").get<int>();
    const int M = j.at("M").get<int>();
    const int W = j.at("W").get<int>();
    const auto L = j.at("L").get<std::int64_t>();
    if (K < 1 || M < 1 || W < 1 || W > M || L < 1) throw ParseError("K, M, W, L out of range");

    std::vector<int> assignment;
    for (const auto& g : j.at("division")) {
      const int group = g.get<int>();
      if (group < 1 || group > W) throw ParseError("division entry outside [1, W]");
      assignment.push_back(group - 1);
    }
    if (static_cast<int>(assignment.size()) != K) throw ParseError("division must list K groups");

    ScheduleSequenceSet set;
    set.M = M;
    try {
      set.division = GroupDivision(assignment);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what());
    }
    if (set.division.W() != W) throw ParseError("division does not use exactly W groups");

    const auto& seqs = j.at("sequences");
    if (!seqs.is_array() || static_cast<int>(seqs.size()) != K) throw ParseError("sequences must list K sequences");
    for (int i = 0; i < K; ++i) {
      ScheduleSequence s;
      s.owner_group = assignment[static_cast<std::size_t>(i)];
      for (const auto& sym : seqs[static_cast<std::size_t>(i)]) s.symbols.push_back(symbol_from_string(sym.get<std::string>(), W));
      if (static_cast<std::int64_t>(s.length()) != L) throw ParseError("sequence " + std::to_string(i + 1) + " does not have length L");
      if (!s.satisfies_assignment())
        throw ParseError("sequence " + std::to_string(i + 1) + " transmits outside its group's channel");
      set.sequences.push_back(std::move(s));
    }

    if (j.contains("generators") && j["generators"].is_array()) set.generators = j["generators"].get<std::vector<int>>();

    if (j.contains("params") && !j["params"].is_null()) {
      const auto& p = j["params"];
      ConstructionParams c;
      c.K = K;
      c.M = M;
      c.W = W;
      c.division = set.division;
      c.ell = set.division.max_size();
      c.w = p.at("w").get<int>();
      c.p = p.at("p").get<std::int64_t>();
      c.q = p.at("q").get<std::int64_t>();
      c.Lprime = p.at("Lprime").get<std::int64_t>();
      c.L = L;
      c.deltas = p.at("deltas").get<std::vector<std::int64_t>>();
      set.params = std::move(c);
    }
    return set;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed sequence set: ") + e.what());
  }
}

inline ScheduleSequenceSet read_sequence_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
  }
  return sequence_set_from_json(j);
}

inline void write_sequence_set(const ScheduleSequenceSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json(set).dump(1) << '\n';
}

inline json to_json(const VerificationReport& r) {
  json j;
  j["schema"] = kReportSchema;
  j["verdict"] = to_string(r.verdict);
  j["method"] = to_string(r.method);
  j["pairs_checked"] = r.pairs_checked;
  j["combinations"] = r.combinations;
  if (r.witness) {
    json offsets = json::object();
    for (auto [node, off] : r.witness->offsets) offsets[std::to_string(node + 1)] = off;
    j["witness"] = {{"transmitter", r.witness->transmitter + 1}, {"receiver", r.witness->receiver + 1}, {"offsets", offsets}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

// Shortest round-trip decimal form; never locale dependent.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

inline void write_completion_csv(const SimResult& result, std::ostream& out) {
  out << "run_index,completion_time,censored\n";
  for (std::size_t k = 0; k < result.completion_times.size(); ++k) {
    const auto& c = result.completion_times[k];
    out << k << ',' << c.time << ',' << (c.censored ? 1 : 0) << '\n';
  }
}

inline json summary_json(const SimResult& result) {
  const auto dist = completion_histogram(result);
  json j;
  j["schema"] = kSimSummarySchema;
  j["runs"] = dist.runs;
  j["seed"] = result.seed;
  j["max_slots"] = result.max_slots;
  j["mean"] = dist.mean;
  j["censored_mass"] = dist.censored_mass;
  json q = json::object();
  for (double level : {0.5, 0.9, 0.99, 0.999}) {
    auto v = dist.quantile(level);
    q[format_double(level)] = v ? json(*v) : json(nullptr);
  }
  j["quantiles"] = q;
  json pmf = json::array();
  for (const auto& b : dist.bins) pmf.push_back({{"t", b.start}, {"count", b.count}, {"pmf", b.pmf}, {"cdf", b.cdf}});
  j["pmf"] = pmf;
  return j;
}

}  // namespace schedseq::io
