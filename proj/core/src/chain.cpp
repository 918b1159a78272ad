// Copyright 2026 The memsel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "memsel/chain.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

#include "memsel/errors.hpp"

namespace memsel {

std::string_view to_string(BoundaryMode mode) {
  return mode == BoundaryMode::kPadded ? "padded" : "truncated";
}

BoundaryMode parse_boundary_mode(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "padded") return BoundaryMode::kPadded;
  if (lower == "truncated") return BoundaryMode::kTruncated;
  throw std::invalid_argument("unknown boundary mode '" + std::string(text) +
                              "' (expected padded or truncated)");
}

StateAlphabet::StateAlphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2) {
    throw std::invalid_argument("a state alphabet needs at least two states");
  }
  std::set<std::string_view> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) {
      throw std::invalid_argument("duplicate state label '" + l + "'");
    }
  }
}

StateAlphabet StateAlphabet::indexed(std::size_t m) {
  std::vector<std::string> labels;
  labels.reserve(m);
  for (std::size_t i = 0; i < m; ++i) labels.push_back(std::to_string(i));
  return StateAlphabet(std::move(labels));
}

const std::string& StateAlphabet::label(StateId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= labels_.size()) {
    throw std::out_of_range("state id " + std::to_string(id) + " outside alphabet");
  }
  return labels_[static_cast<std::size_t>(id)];
}

std::optional<StateId> StateAlphabet::find(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return static_cast<StateId>(i);
  }
  return std::nullopt;
}

Context Context::history(std::vector<StateId> tokens) {
  Context c;
  c.tokens_ = std::move(tokens);
  return c;
}

Context Context::tie_class(std::size_t class_id) {
  Context c;
  c.kind_ = Kind::kTieClass;
  c.tokens_.push_back(static_cast<StateId>(class_id));
  return c;
}

std::size_t Context::class_id() const {
  if (kind_ != Kind::kTieClass) throw std::logic_error("not a tie-class context");
  return static_cast<std::size_t>(tokens_.front());
}

std::string Context::to_string(const StateAlphabet& alphabet) const {
  if (kind_ == Kind::kTieClass) return "#" + std::to_string(tokens_.front());
  if (tokens_.empty()) return "()";
  std::string out;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i) out += ',';
    out += tokens_[i] == kStart ? std::string("^") : alphabet.label(tokens_[i]);
  }
  return out;
}

Context encode_context(std::span<const StateId> tokens, const StateAlphabet& alphabet) {
  bool seen_state = false;
  for (StateId t : tokens) {
    if (t == kStart) {
      if (seen_state) {
        throw std::invalid_argument("START token after a state token");
      }
      continue;
    }
    if (t < 0 || static_cast<std::size_t>(t) >= alphabet.size()) {
      throw std::invalid_argument("context token " + std::to_string(t) +
                                  " outside alphabet of size " +
                                  std::to_string(alphabet.size()));
    }
    seen_state = true;
  }
  return Context::history(std::vector<StateId>(tokens.begin(), tokens.end()));
}

std::vector<StateId> decode_context(const Context& context) {
  if (context.is_tie_class()) throw std::invalid_argument("tie-class context has no history");
  return {context.tokens().begin(), context.tokens().end()};
}

CountTable::CountTable(std::size_t h, std::shared_ptr<const StateAlphabet> alphabet,
                       BoundaryMode mode, CountRows rows,
                       std::optional<std::size_t> tie_classes)
    : h_(h), alphabet_(std::move(alphabet)), mode_(mode), tie_classes_(tie_classes) {
  if (!alphabet_) throw std::invalid_argument("count table needs an alphabet");
  const std::size_t m = alphabet_->size();
  for (auto it = rows.begin(); it != rows.end();) {
    const auto& ctx = it->first;
    if (ctx.is_tie_class()) {
      if (!tie_classes_ || ctx.class_id() >= *tie_classes_) {
        throw std::invalid_argument("tie-class row in a table without that class");
      }
    } else if (tie_classes_) {
      throw std::invalid_argument("history row in a tied table");
    } else if (ctx.depth() != h_) {
      throw std::invalid_argument("context depth differs from table memory h = " +
                                  std::to_string(h_));
    }
    const auto& counts = it->second;
    if (counts.size() != m) {
      throw std::invalid_argument("count row width differs from alphabet size");
    }
    std::int64_t sum = 0;
    for (auto c : counts) {
      if (c < 0) throw std::invalid_argument("negative transition count");
      sum += c;
    }
    if (sum == 0) {
      it = rows.erase(it);
    } else {
      total_ += sum;
      ++it;
    }
  }
  rows_ = std::move(rows);
}

const CountVector* CountTable::find(const Context& context) const {
  auto it = rows_.find(context);
  return it == rows_.end() ? nullptr : &it->second;
}

std::int64_t CountTable::count(const Context& context, StateId dest) const {
  const auto* row = find(context);
  return row ? row->at(static_cast<std::size_t>(dest)) : 0;
}

std::int64_t CountTable::row_total(const Context& context) const {
  const auto* row = find(context);
  if (!row) return 0;
  std::int64_t sum = 0;
  for (auto c : *row) sum += c;
  return sum;
}

TrajectoryCounts::TrajectoryCounts(std::vector<Entry> per_trajectory, CountTable total)
    : per_trajectory_(std::move(per_trajectory)), total_(std::move(total)) {}

TrajectoryCounts TrajectoryCounts::from_tables(std::vector<Entry> per_trajectory) {
  if (per_trajectory.empty()) throw EmptyInputError("no trajectories");
  const CountTable& first = per_trajectory.front().second;
  const std::size_t m = first.num_states();
  CountRows sum;
  for (const auto& [id, table] : per_trajectory) {
    if (table.h() != first.h() || table.num_states() != m ||
        table.boundary_mode() != first.boundary_mode() ||
        table.tie_classes() != first.tie_classes()) {
      throw std::invalid_argument("trajectory '" + id +
                                  "' has a table inconsistent with the others");
    }
    for (const auto& [ctx, counts] : table.rows()) {
      auto [it, inserted] = sum.try_emplace(ctx, m, 0);
      for (std::size_t k = 0; k < m; ++k) it->second[k] += counts[k];
    }
  }
  CountTable total(first.h(), first.alphabet_ptr(), first.boundary_mode(), std::move(sum),
                   first.tie_classes());
  return TrajectoryCounts(std::move(per_trajectory), std::move(total));
}

TrajectoryCounts count_transitions(std::span<const Trajectory> trajectories,
                                   std::shared_ptr<const StateAlphabet> alphabet,
                                   int h, BoundaryMode mode) {
  if (h < 0) throw std::invalid_argument("memory depth h must be non-negative");
  if (trajectories.empty()) throw EmptyInputError("no trajectories to count");
  if (!alphabet) throw std::invalid_argument("count_transitions needs an alphabet");
  const std::size_t m = alphabet->size();
  const auto depth = static_cast<std::size_t>(h);

  std::vector<TrajectoryCounts::Entry> tables;
  tables.reserve(trajectories.size());
  std::vector<StateId> window(depth);
  for (const auto& traj : trajectories) {
    CountRows rows;
    const auto& steps = traj.steps;
    for (std::size_t l = 0; l < steps.size(); ++l) {
      const StateId dest = steps[l];
      if (dest < 0 || static_cast<std::size_t>(dest) >= m) {
        throw std::invalid_argument("trajectory '" + traj.id + "' has state id " +
                                    std::to_string(dest) + " outside the alphabet");
      }
      if (mode == BoundaryMode::kTruncated && l < depth) continue;
      for (std::size_t k = 0; k < depth; ++k) {
        // Position of the k-th context token is l - depth + k.
        window[k] = (l + k < depth) ? kStart : steps[l + k - depth];
      }
      auto [it, inserted] = rows.try_emplace(Context::history(window), m, 0);
      ++it->second[static_cast<std::size_t>(dest)];
    }
    tables.emplace_back(traj.id, CountTable(depth, alphabet, mode, std::move(rows)));
  }
  return TrajectoryCounts::from_tables(std::move(tables));
}

std::vector<Trajectory> relabel(std::span<const Trajectory> trajectories,
                                std::span<const StateId> perm) {
  std::vector<Trajectory> out;
  out.reserve(trajectories.size());
  for (const auto& t : trajectories) {
    Trajectory r{t.id, {}};
    r.steps.reserve(t.steps.size());
    for (StateId s : t.steps) r.steps.push_back(perm[static_cast<std::size_t>(s)]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace memsel
