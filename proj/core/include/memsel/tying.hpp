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

// Parameter tying: contexts grouped into classes that share one transition
// distribution. Tying is a reduction of the count tables, so every criterion
// applies unchanged to the result.

#ifndef MEMSEL_TYING_HPP_
#define MEMSEL_TYING_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include "memsel/chain.hpp"

namespace memsel {

class TieMap {
 public:
  // Contexts not listed fall into default_class when one is given. Every
  // class id must be < num_classes and every class must be reachable.
  TieMap(std::size_t h, std::size_t num_classes, std::map<Context, std::size_t> assignments,
         std::optional<std::size_t> default_class = std::nullopt, std::string name = "tied");

  std::size_t h() const noexcept { return h_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  const std::string& name() const noexcept { return name_; }
  const std::map<Context, std::size_t>& assignments() const noexcept { return assignments_; }
  std::optional<std::size_t> default_class() const noexcept { return default_class_; }

  std::optional<std::size_t> find_class(const Context& context) const;
  // Throws std::out_of_range for an unlisted context without a default class.
  std::size_t class_of(const Context& context) const;

 private:
  std::size_t h_;
  std::size_t num_classes_;
  std::map<Context, std::size_t> assignments_;
  std::optional<std::size_t> default_class_;
  std::string name_;
};

// Sums rows within each class, per trajectory and in total. The resulting
// tables are keyed by Context::tie_class(c) and carry C = num_classes for the
// parameter count C (M - 1). Throws std::invalid_argument on an h mismatch.
TrajectoryCounts tie_counts(const TrajectoryCounts& tc, const TieMap& map);

// Outcomes independent except immediately after a miss. Binary alphabet
// only; the miss state is the label "miss" if present, otherwise state 0.
// Class 0 = {(miss)}, class 1 = {(hit)} plus {(START)} in padded mode.
TieMap jagged_free_throw_map(const StateAlphabet& alphabet, BoundaryMode mode);

// One class per observed context of `table`, numbered in context order.
TieMap identity_tie_map(const CountTable& table);

// Every context in a single class.
TieMap constant_tie_map(std::size_t h);

}  // namespace memsel

#endif  // MEMSEL_TYING_HPP_
