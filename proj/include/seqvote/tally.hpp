#pragma once

// Answer normalization and the empirical categorical distribution over
// answers: counts, top-two extraction, mode, and the distribution statistics
// (p1, p2, p1/p2, entropy) reported by the benchmark layer.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace seqvote {

// A normalized answer string. Two answers are the same category iff their
// canonical forms compare equal. Construct through normalize_answer unless
// the text is already canonical.
class AnswerKey {
 public:
  AnswerKey() = default;
  explicit AnswerKey(std::string canonical) : canonical_(std::move(canonical)) {}

  const std::string& canonical() const { return canonical_; }
  bool empty() const { return canonical_.empty(); }

  friend bool operator==(const AnswerKey&, const AnswerKey&) = default;
  friend auto operator<=>(const AnswerKey&, const AnswerKey&) = default;

 private:
  std::string canonical_;
};

// Canonical form: trim, lowercase, collapse internal whitespace runs; plain
// decimal literals are re-rendered without leading/trailing zero noise so
// "127.0", " 127", and "127" land in one category. Idempotent. The empty
// string is a valid (empty) key.
AnswerKey normalize_answer(const std::string& raw);

struct TopTwo {
  std::optional<AnswerKey> first_key;
  int n_first = 0;
  std::optional<AnswerKey> second_key;
  int n_second = 0;
};

struct DistributionStats {
  double p1 = 0.0;
  double p2 = 0.0;
  double p1_over_p2 = 0.0;  // +inf when n_second == 0
  double entropy_nats = 0.0;
};

// Multiset of answers preserving first-seen order, which is the tie-break for
// the mode and the top-two extraction. Mutation is confined to one scheduler
// turn at a time; concurrent reads are safe.
class VoteTally {
 public:
  void add(const AnswerKey& key);

  int total() const { return total_; }
  size_t distinct() const { return entries_.size(); }

  // Entries in first-seen order: (key, count).
  const std::vector<std::pair<AnswerKey, int>>& entries() const { return entries_; }

  // Highest and second-highest counts; ties broken by earliest first
  // observation. Absent keys and zero counts on an empty tally.
  TopTwo top_two() const;

  // The top-two leader, absent on an empty tally.
  std::optional<AnswerKey> mode() const;

  // Throws std::domain_error on an empty tally.
  DistributionStats distribution_stats() const;

 private:
  std::vector<std::pair<AnswerKey, int>> entries_;
  std::unordered_map<std::string, size_t> index_;
  int total_ = 0;
};

}  // namespace seqvote

template <>
struct std::hash<seqvote::AnswerKey> {
  size_t operator()(const seqvote::AnswerKey& k) const noexcept {
    return std::hash<std::string>{}(k.canonical());
  }
};
