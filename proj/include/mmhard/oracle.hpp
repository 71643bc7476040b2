#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "mmhard/instance.hpp"
#include "mmhard/rng.hpp"

namespace mmhard {

// Answer to a query past the end of a list.
inline constexpr std::uint32_t kNull = kNone;

class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted() : std::runtime_error("query budget exhausted") {}
};

class UnknownVertex : public std::out_of_range {
 public:
  explicit UnknownVertex(std::uint64_t v) : std::out_of_range("unknown vertex " + std::to_string(v)) {}
};

class TranscriptFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Keyed bijection of [0, m): 4-round Feistel network on the smallest even bit width
// covering m, with cycle-walking back into range.
class SlotPermutation {
 public:
  SlotPermutation(std::uint64_t m, std::uint64_t key) : m_(m) {
    int bits = std::max(2, static_cast<int>(std::bit_width(m > 0 ? m - 1 : 0)));
    if (bits % 2) ++bits;
    half_ = bits / 2;
    mask_ = (std::uint64_t{1} << half_) - 1;
    for (int k = 0; k < 4; ++k) round_key_[k] = derive_seed(key, static_cast<std::uint64_t>(k));
  }

  std::uint64_t operator()(std::uint64_t x) const {
    do x = encrypt(x);
    while (x >= m_);
    return x;
  }

  std::uint64_t size() const { return m_; }

 private:
  std::uint64_t encrypt(std::uint64_t x) const {
    std::uint64_t l = x >> half_, r = x & mask_;
    for (int k = 0; k < 4; ++k) {
      const std::uint64_t f = mix64(round_key_[k] ^ r) & mask_;
      const std::uint64_t nl = r;
      r = l ^ f;
      l = nl;
    }
    return (l << half_) | r;
  }

  std::uint64_t m_;
  int half_;
  std::uint64_t mask_;
  std::uint64_t round_key_[4];
};

struct QueryRecord {
  std::uint64_t step = 0;  // 1-based position in the session
  std::uint32_t u = 0;
  std::uint64_t slot = 0;  // 1-based
  std::uint32_t answer = kNull;

  bool operator==(const QueryRecord&) const = default;
};

// Edge u→v: first discovered through u's list at the given step.
struct DirectedEdge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  std::uint64_t step = 0;

  bool operator==(const DirectedEdge&) const = default;
};

// Full keeps every query. CoreOnly keeps only queries that discover a new core edge,
// for runs whose budget makes the full log too large.
enum class RecordMode : std::uint8_t { Full, CoreOnly };

struct Transcript {
  std::uint64_t n = 0;
  std::uint64_t budget = 0;
  std::uint64_t spent = 0;
  RecordMode mode = RecordMode::Full;
  std::vector<QueryRecord> queries;
  std::vector<DirectedEdge> edges;  // core edges only, in discovery order
  std::vector<DirectedEdge> dummy_edges;  // edges with a dummy endpoint (Full mode)
};

class QuerySession {
 public:
  QuerySession(const Instance& inst, std::uint64_t budget, RecordMode mode = RecordMode::Full)
      : inst_(&inst), budget_(budget), mode_(mode) {
    for (int s = 0; s < 2; ++s)
      dummies_.insert(dummies_.end(), inst.dummies_of_side[s].begin(), inst.dummies_of_side[s].end());
    std::sort(dummies_.begin(), dummies_.end());
  }

  std::uint64_t n() const { return inst_->n; }
  std::uint64_t budget() const { return budget_; }
  std::uint64_t spent() const { return spent_; }
  std::uint64_t remaining() const { return budget_ - spent_; }
  RecordMode mode() const { return mode_; }
  // The distribution is public; only the sample is hidden.
  const ParamSet& params() const { return inst_->params; }

  bool is_dummy(std::uint32_t v) const {
    check(v);
    return inst_->is_dummy(v);
  }
  const std::vector<std::uint32_t>& dummies() const { return dummies_; }

  // S-labels disclosed so far: vertex → j.
  const std::map<std::uint32_t, int>& revealed() const { return revealed_; }
  std::optional<int> s_label(std::uint32_t v) const {
    auto it = revealed_.find(v);
    if (it == revealed_.end()) return std::nullopt;
    return it->second;
  }

  // i-th neighbor of v (1-based) or kNull.
  std::uint32_t query(std::uint32_t v, std::uint64_t i) {
    check(v);
    if (spent_ >= budget_) throw BudgetExhausted();
    ++spent_;
    reveal(v);
    std::uint32_t answer = kNull;
    const std::uint64_t deg = inst_->degree(v);
    if (i >= 1 && i <= deg) {
      answer = inst_->list_entry(v, SlotPermutation(deg, inst_->perm_seeds[v])(i - 1));
      reveal(answer);
    }
    record(v, i, answer);
    return answer;
  }

  Transcript freeze() const {
    Transcript t;
    t.n = inst_->n;
    t.budget = budget_;
    t.spent = spent_;
    t.mode = mode_;
    t.queries = queries_;
    t.edges = edges_;
    t.dummy_edges = dummy_edges_;
    return t;
  }

 private:
  void check(std::uint64_t v) const {
    if (v >= inst_->n) throw UnknownVertex(v);
  }

  void reveal(std::uint32_t v) {
    const LabelEntry& e = inst_->label(inst_->L(), v);
    if (e.kind == Kind::S) revealed_.emplace(v, e.part);
  }

  void record(std::uint32_t v, std::uint64_t i, std::uint32_t answer) {
    bool fresh = false;
    const bool dummy_edge = answer != kNull && (inst_->is_dummy(v) || inst_->is_dummy(answer));
    if (answer != kNull && (mode_ == RecordMode::Full || !dummy_edge)) {
      const std::uint64_t key = v < answer ? (std::uint64_t{v} << 32 | answer) : (std::uint64_t{answer} << 32 | v);
      fresh = seen_.insert(key).second;
      if (fresh) (dummy_edge ? dummy_edges_ : edges_).push_back({v, answer, spent_});
    }
    if (mode_ == RecordMode::Full || (fresh && !dummy_edge)) queries_.push_back({spent_, v, i, answer});
  }

  const Instance* inst_;
  std::uint64_t budget_;
  std::uint64_t spent_ = 0;
  RecordMode mode_;
  std::vector<std::uint32_t> dummies_;
  std::map<std::uint32_t, int> revealed_;
  std::vector<QueryRecord> queries_;
  std::vector<DirectedEdge> edges_;
  std::vector<DirectedEdge> dummy_edges_;
  std::unordered_set<std::uint64_t> seen_;
};

inline QuerySession open_session(const Instance& inst, std::uint64_t budget,
                                 RecordMode mode = RecordMode::Full) {
  return QuerySession(inst, budget, mode);
}

inline Transcript freeze(const QuerySession& s) { return s.freeze(); }

// The oracle must not hand out ground truth beyond S-labels and the dummy set.
template <class T>
concept ExposesLabels = requires(const T& t) { t.label(1, 0u); } || requires(const T& t) { t.labels; } ||
                        requires(const T& t) { t.label_path(0u); } || requires(const T& t) { t.instance(); };
static_assert(!ExposesLabels<QuerySession>);

// CSV: step,u,slot,answer_or_NULL
inline void write_transcript_csv(std::ostream& os, const Transcript& t) {
  os << "step,u,slot,answer_or_NULL\n";
  for (const QueryRecord& q : t.queries) {
    os << q.step << ',' << q.u << ',' << q.slot << ',';
    if (q.answer == kNull) os << "NULL";
    else os << q.answer;
    os << '\n';
  }
}

inline std::string transcript_csv(const Transcript& t) {
  std::ostringstream os;
  write_transcript_csv(os, t);
  return os.str();
}

inline std::vector<QueryRecord> read_transcript_csv(std::istream& is) {
  std::vector<QueryRecord> out;
  std::string line;
  if (!std::getline(is, line) || line.rfind("step,u,slot,answer_or_NULL", 0) != 0)
    throw TranscriptFormatError("missing transcript header");
  std::uint64_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 4) throw TranscriptFormatError("line " + std::to_string(lineno) + ": expected 4 fields");
    try {
      QueryRecord q;
      q.step = std::stoull(f[0]);
      q.u = static_cast<std::uint32_t>(std::stoul(f[1]));
      q.slot = std::stoull(f[2]);
      q.answer = f[3] == "NULL" ? kNull : static_cast<std::uint32_t>(std::stoul(f[3]));
      out.push_back(q);
    } catch (const std::logic_error&) {
      throw TranscriptFormatError("line " + std::to_string(lineno) + ": bad number");
    }
  }
  return out;
}

struct ReplayResult {
  std::vector<QueryRecord> log;
  std::uint64_t mismatches = 0;
  Transcript transcript;
};

// Re-issues the recorded (u, slot) queries in order on a fresh session and compares answers.
inline ReplayResult replay(const Instance& inst, const std::vector<QueryRecord>& queries) {
  QuerySession s(inst, queries.size());
  ReplayResult res;
  for (const QueryRecord& q : queries) {
    const std::uint32_t a = s.query(q.u, q.slot);
    res.log.push_back({s.spent(), q.u, q.slot, a});
    if (a != q.answer) ++res.mismatches;
  }
  res.transcript = s.freeze();
  return res;
}

// Uniform strategy: u uniform over core vertices, slot uniform over [1, n/2]
// (no vertex has more than n/2 neighbors).
inline Transcript random_query_transcript(const Instance& inst, std::uint64_t budget, std::uint64_t seed,
                                          RecordMode mode = RecordMode::CoreOnly) {
  QuerySession s(inst, budget, mode);
  Rng rng(seed);
  std::vector<std::uint32_t> core;
  core.reserve(inst.n_core);
  for (std::uint32_t v = 0; v < inst.n; ++v)
    if (!s.is_dummy(v)) core.push_back(v);
  const std::uint64_t slots = std::max<std::uint64_t>(1, inst.n / 2);
  if (core.empty()) return s.freeze();
  for (std::uint64_t q = 0; q < budget; ++q) s.query(core[rng.below(core.size())], 1 + rng.below(slots));
  return s.freeze();
}

}  // namespace mmhard
