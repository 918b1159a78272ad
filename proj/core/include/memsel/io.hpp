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

// File formats: trajectory JSON-lines, outcome CSV import, tie-map JSON,
// criterion reports and simulation tables. FORMATS.md documents each one.

#ifndef MEMSEL_IO_HPP_
#define MEMSEL_IO_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memsel/chain.hpp"
#include "memsel/criteria.hpp"
#include "memsel/simulate.hpp"
#include "memsel/tying.hpp"

namespace memsel {

struct Dataset {
  std::shared_ptr<const StateAlphabet> alphabet;
  std::vector<Trajectory> trajectories;
};

// Reserved token for START inside tie-map files.
inline constexpr std::string_view kStartToken = "<START>";

// One JSON object per line: {"id": "...", "seq": [label, ...]}. An optional
// header line {"states": [label, ...]} declares the alphabet; `states`
// overrides it. Without either, labels are numbered in order of first
// appearance. Blank lines are skipped. Throws ParseError (with line number)
// on malformed input, UnknownLabelError for a label outside a declared
// alphabet and EmptyInputError when no trajectory is present.
Dataset read_trajectories_jsonl(std::istream& in,
                                const std::optional<std::vector<std::string>>& states = {});

// Writes the header line followed by one line per trajectory.
void write_trajectories_jsonl(std::ostream& out, const Dataset& data);

// Rows of "game_id,outcome", grouped in order into one trajectory per game.
// Outcomes are 0/1 (mapped to labels[0] / labels[1]) or the labels
// themselves. A header row is detected and skipped.
Dataset import_outcome_csv(std::istream& in,
                           const std::array<std::string, 2>& labels = {"miss", "hit"});

// {"h": 1, "classes": [{"contexts": [["miss"]]}, {"default": true}]}.
TieMap parse_tie_map(std::string_view json_text, const StateAlphabet& alphabet);

// One JSON array with an object per report.
void write_reports_json(std::ostream& out, std::span<const CriterionReport> reports);
// Header plus one row per report; column order is fixed (see FORMATS.md).
void write_reports_csv(std::ostream& out, std::span<const CriterionReport> reports);

// Long format: truth,J,criterion,h_chosen,count,frequency.
void write_selection_csv(std::ostream& out, const SelectionFrequencyTable& table);
// h_true,J,criterion,h,n,min,max,mean,below_zero,fraction_below_zero.
void write_delta_csv(std::ostream& out, const DeltaTable& table);

// Shortest round-trip decimal, "nan" / "inf" spelled out.
std::string format_number(double x);

// 64-bit FNV-1a, hex encoded. Used for manifest input digests.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace memsel

#endif  // MEMSEL_IO_HPP_
