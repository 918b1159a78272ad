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

// State alphabets, trajectories, history contexts and transition counting.
//
// A model of memory depth h predicts each step from the h steps before it.
// Steps near the beginning of a trajectory have fewer than h predecessors;
// BoundaryMode selects whether those steps are modeled with contexts padded
// by the reserved START token, or dropped.

#ifndef MEMSEL_CHAIN_HPP_
#define MEMSEL_CHAIN_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace memsel {

using StateId = std::int32_t;

// Boundary token. Appears only in contexts, never as a destination.
inline constexpr StateId kStart = -1;

enum class BoundaryMode { kPadded, kTruncated };

std::string_view to_string(BoundaryMode mode);
// Accepts "padded" / "truncated" (case-insensitive).
BoundaryMode parse_boundary_mode(std::string_view text);

class StateAlphabet {
 public:
  // Throws std::invalid_argument for fewer than two labels or duplicates.
  explicit StateAlphabet(std::vector<std::string> labels);

  // Labels "0", "1", ..., "m-1".
  static StateAlphabet indexed(std::size_t m);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(StateId id) const;
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<StateId> find(std::string_view label) const;

  bool operator==(const StateAlphabet&) const = default;

 private:
  std::vector<std::string> labels_;
};

struct Trajectory {
  std::string id;
  std::vector<StateId> steps;
};

// Row label of a count table. History contexts carry an h-tuple of tokens
// (START only as a prefix); tie-class contexts stand for a parameter class
// produced by tie_counts().
class Context {
 public:
  enum class Kind : std::uint8_t { kHistory, kTieClass };

  // The empty history, the single context of an h = 0 model.
  Context() = default;

  // No validation; see encode_context() for the checked constructor.
  static Context history(std::vector<StateId> tokens);
  static Context tie_class(std::size_t class_id);

  Kind kind() const noexcept { return kind_; }
  bool is_tie_class() const noexcept { return kind_ == Kind::kTieClass; }
  std::span<const StateId> tokens() const noexcept { return tokens_; }
  std::size_t depth() const noexcept { return tokens_.size(); }
  std::size_t class_id() const;

  // "miss,hit", "^,hit" (START shown as '^'), "()" for h = 0, "#2" for a
  // tie class.
  std::string to_string(const StateAlphabet& alphabet) const;

  friend auto operator<=>(const Context&, const Context&) = default;
  friend bool operator==(const Context&, const Context&) = default;

 private:
  Kind kind_ = Kind::kHistory;
  std::vector<StateId> tokens_;
};

// Checked context construction. Throws std::invalid_argument when a token is
// neither START nor a state of the alphabet, or when START follows a state.
Context encode_context(std::span<const StateId> tokens, const StateAlphabet& alphabet);
std::vector<StateId> decode_context(const Context& context);

using CountVector = std::vector<std::int64_t>;
using CountRows = std::map<Context, CountVector>;

// Sparse transition counts N[x][m]. Rows with zero total are never stored.
// Immutable once constructed.
class CountTable {
 public:
  // Validates row widths and non-negativity; drops all-zero rows.
  // tie_classes is set for tables produced by tie_counts().
  CountTable(std::size_t h, std::shared_ptr<const StateAlphabet> alphabet,
             BoundaryMode mode, CountRows rows,
             std::optional<std::size_t> tie_classes = std::nullopt);

  std::size_t h() const noexcept { return h_; }
  const StateAlphabet& alphabet() const noexcept { return *alphabet_; }
  const std::shared_ptr<const StateAlphabet>& alphabet_ptr() const noexcept { return alphabet_; }
  std::size_t num_states() const noexcept { return alphabet_->size(); }
  BoundaryMode boundary_mode() const noexcept { return mode_; }
  std::optional<std::size_t> tie_classes() const noexcept { return tie_classes_; }

  const CountRows& rows() const noexcept { return rows_; }
  // nullptr when the context was never observed.
  const CountVector* find(const Context& context) const;
  std::int64_t count(const Context& context, StateId dest) const;
  std::int64_t row_total(const Context& context) const;
  // Sum over all rows.
  std::int64_t total() const noexcept { return total_; }
  bool empty() const noexcept { return rows_.empty(); }

 private:
  std::size_t h_;
  std::shared_ptr<const StateAlphabet> alphabet_;
  BoundaryMode mode_;
  CountRows rows_;
  std::optional<std::size_t> tie_classes_;
  std::int64_t total_ = 0;
};

// Per-trajectory tables plus their element-wise sum.
class TrajectoryCounts {
 public:
  using Entry = std::pair<std::string, CountTable>;

  // Builds the total from the per-trajectory tables. All tables must share
  // h, alphabet size, mode and tie-class count. Throws EmptyInputError when
  // the list is empty.
  static TrajectoryCounts from_tables(std::vector<Entry> per_trajectory);

  const std::vector<Entry>& per_trajectory() const noexcept { return per_trajectory_; }
  const CountTable& total() const noexcept { return total_; }
  std::size_t num_trajectories() const noexcept { return per_trajectory_.size(); }
  std::size_t h() const noexcept { return total_.h(); }

 private:
  TrajectoryCounts(std::vector<Entry> per_trajectory, CountTable total);

  std::vector<Entry> per_trajectory_;
  CountTable total_;
};

// Counts every transition of every trajectory at memory depth h.
// kPadded: each step l = 1..L contributes once, its context left-padded by
// START. kTruncated: only steps with a full h-step history contribute.
// Throws EmptyInputError for an empty list and std::invalid_argument for
// h < 0 or a step outside the alphabet.
TrajectoryCounts count_transitions(std::span<const Trajectory> trajectories,
                                   std::shared_ptr<const StateAlphabet> alphabet,
                                   int h, BoundaryMode mode);

// Applies a state relabeling (new id = perm[old id]) to a trajectory set.
std::vector<Trajectory> relabel(std::span<const Trajectory> trajectories,
                                std::span<const StateId> perm);

}  // namespace memsel

#endif  // MEMSEL_CHAIN_HPP_
