#include "seqvote/tally.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqvote {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string trim_and_lower(const std::string& raw) {
  size_t begin = 0;
  size_t end = raw.size();
  while (begin < end && is_space(raw[begin])) ++begin;
  while (end > begin && is_space(raw[end - 1])) --end;
  std::string out;
  out.reserve(end - begin);
  for (size_t i = begin; i < end; ++i) {
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i]))));
  }
  return out;
}

std::string collapse_whitespace(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_run = false;
  for (char c : text) {
    if (is_space(c)) {
      in_run = true;
      continue;
    }
    if (in_run && !out.empty()) out.push_back(' ');
    in_run = false;
    out.push_back(c);
  }
  return out;
}

// Plain decimal literal: optional sign, digits with at most one decimal
// point, at least one digit somewhere. No exponents, no thousands
// separators; everything else is compared verbatim.
bool parse_decimal(const std::string& text, bool& negative, std::string& int_part,
                   std::string& frac_part) {
  size_t i = 0;
  negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  int_part.clear();
  frac_part.clear();
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    int_part.push_back(text[i++]);
  }
  bool has_point = false;
  if (i < text.size() && text[i] == '.') {
    has_point = true;
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      frac_part.push_back(text[i++]);
    }
  }
  (void)has_point;
  return i == text.size() && (!int_part.empty() || !frac_part.empty());
}

std::string render_decimal(bool negative, std::string int_part, std::string frac_part) {
  size_t lead = 0;
  while (lead + 1 < int_part.size() && int_part[lead] == '0') ++lead;
  int_part.erase(0, lead);
  if (int_part.empty()) int_part = "0";
  while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
  std::string out;
  bool zero = int_part == "0" && frac_part.empty();
  if (negative && !zero) out.push_back('-');
  out += int_part;
  if (!frac_part.empty()) {
    out.push_back('.');
    out += frac_part;
  }
  return out;
}

}  // namespace

AnswerKey normalize_answer(const std::string& raw) {
  std::string text = trim_and_lower(raw);
  bool negative = false;
  std::string int_part;
  std::string frac_part;
  if (parse_decimal(text, negative, int_part, frac_part)) {
    return AnswerKey(render_decimal(negative, std::move(int_part), std::move(frac_part)));
  }
  return AnswerKey(collapse_whitespace(text));
}

void VoteTally::add(const AnswerKey& key) {
  auto [it, inserted] = index_.try_emplace(key.canonical(), entries_.size());
  if (inserted) {
    entries_.emplace_back(key, 1);
  } else {
    ++entries_[it->second].second;
  }
  ++total_;
}

TopTwo VoteTally::top_two() const {
  TopTwo out;
  // entries_ is in first-seen order, so a strict ">" scan applies the
  // earliest-observation tie-break for free.
  size_t best = entries_.size();
  size_t second = entries_.size();
  for (size_t i = 0; i < entries_.size(); ++i) {
    const int count = entries_[i].second;
    if (best == entries_.size() || count > entries_[best].second) {
      second = best;
      best = i;
    } else if (second == entries_.size() || count > entries_[second].second) {
      second = i;
    }
  }
  if (best != entries_.size()) {
    out.first_key = entries_[best].first;
    out.n_first = entries_[best].second;
  }
  if (second != entries_.size()) {
    out.second_key = entries_[second].first;
    out.n_second = entries_[second].second;
  }
  return out;
}

std::optional<AnswerKey> VoteTally::mode() const { return top_two().first_key; }

DistributionStats VoteTally::distribution_stats() const {
  if (total_ == 0) {
    throw std::domain_error("distribution_stats requires a non-empty tally");
  }
  const TopTwo tt = top_two();
  DistributionStats stats;
  const double n = static_cast<double>(total_);
  stats.p1 = tt.n_first / n;
  stats.p2 = tt.n_second / n;
  stats.p1_over_p2 = tt.n_second > 0
                         ? static_cast<double>(tt.n_first) / tt.n_second
                         : std::numeric_limits<double>::infinity();
  double entropy = 0.0;
  for (const auto& [key, count] : entries_) {
    const double p = count / n;
    entropy -= p * std::log(p);
  }
  stats.entropy_nats = std::max(0.0, entropy);
  return stats;
}

}  // namespace seqvote
