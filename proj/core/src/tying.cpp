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

#include "memsel/tying.hpp"

#include <stdexcept>
#include <vector>

namespace memsel {

TieMap::TieMap(std::size_t h, std::size_t num_classes,
               std::map<Context, std::size_t> assignments,
               std::optional<std::size_t> default_class, std::string name)
    : h_(h),
      num_classes_(num_classes),
      assignments_(std::move(assignments)),
      default_class_(default_class),
      name_(std::move(name)) {
  if (num_classes_ < 1) throw std::invalid_argument("a tie map needs at least one class");
  std::vector<bool> used(num_classes_, false);
  if (default_class_) {
    if (*default_class_ >= num_classes_) {
      throw std::invalid_argument("default tie class out of range");
    }
    used[*default_class_] = true;
  }
  for (const auto& [ctx, cls] : assignments_) {
    if (ctx.is_tie_class() || ctx.depth() != h_) {
      throw std::invalid_argument("tie map context does not have length h = " +
                                  std::to_string(h_));
    }
    if (cls >= num_classes_) throw std::invalid_argument("tie class id out of range");
    used[cls] = true;
  }
  for (std::size_t c = 0; c < num_classes_; ++c) {
    if (!used[c]) {
      throw std::invalid_argument("tie class " + std::to_string(c) + " has no contexts");
    }
  }
}

std::optional<std::size_t> TieMap::find_class(const Context& context) const {
  auto it = assignments_.find(context);
  if (it != assignments_.end()) return it->second;
  return default_class_;
}

std::size_t TieMap::class_of(const Context& context) const {
  if (auto c = find_class(context)) return *c;
  throw std::out_of_range("context is not assigned to any tie class");
}

namespace {

CountTable tie_table(const CountTable& table, const TieMap& map) {
  const std::size_t m = table.num_states();
  CountRows rows;
  for (const auto& [ctx, counts] : table.rows()) {
    const std::size_t cls = map.class_of(ctx);
    auto [it, inserted] = rows.try_emplace(Context::tie_class(cls), m, 0);
    for (std::size_t k = 0; k < m; ++k) it->second[k] += counts[k];
  }
  return CountTable(table.h(), table.alphabet_ptr(), table.boundary_mode(), std::move(rows),
                    map.num_classes());
}

}  // namespace

TrajectoryCounts tie_counts(const TrajectoryCounts& tc, const TieMap& map) {
  if (tc.h() != map.h()) {
    throw std::invalid_argument("tie map has h = " + std::to_string(map.h()) +
                                " but the counts have h = " + std::to_string(tc.h()));
  }
  if (tc.total().tie_classes()) throw std::invalid_argument("counts are already tied");
  std::vector<TrajectoryCounts::Entry> tied;
  tied.reserve(tc.num_trajectories());
  for (const auto& [id, table] : tc.per_trajectory()) {
    tied.emplace_back(id, tie_table(table, map));
  }
  return TrajectoryCounts::from_tables(std::move(tied));
}

TieMap jagged_free_throw_map(const StateAlphabet& alphabet, BoundaryMode mode) {
  if (alphabet.size() != 2) {
    throw std::invalid_argument("the jagged free-throw map needs a binary alphabet");
  }
  const StateId miss = alphabet.find("miss").value_or(0);
  const StateId hit = 1 - miss;
  std::map<Context, std::size_t> assign;
  assign.emplace(Context::history({miss}), 0);
  assign.emplace(Context::history({hit}), 1);
  if (mode == BoundaryMode::kPadded) assign.emplace(Context::history({kStart}), 1);
  return TieMap(1, 2, std::move(assign), std::nullopt, "jagged");
}

TieMap identity_tie_map(const CountTable& table) {
  std::map<Context, std::size_t> assign;
  std::size_t next = 0;
  for (const auto& [ctx, counts] : table.rows()) assign.emplace(ctx, next++);
  if (next == 0) throw std::invalid_argument("identity tie map of an empty table");
  return TieMap(table.h(), next, std::move(assign), std::nullopt, "identity");
}

TieMap constant_tie_map(std::size_t h) { return TieMap(h, 1, {}, 0, "constant"); }

}  // namespace memsel
