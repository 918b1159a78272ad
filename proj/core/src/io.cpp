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

#include "memsel/io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "json.hpp"
#include "memsel/errors.hpp"

namespace memsel {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string label_text(const json& v, std::size_t line) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  throw ParseError("state labels must be strings or integers", line);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

struct RawTrajectory {
  std::string id;
  std::vector<std::string> labels;
  std::size_t line;
};

json criteria_object(const CriterionReport& r) {
  ordered_json c;
  for (Criterion k : kAllCriteria) {
    const double v = r.value(k);
    if (std::isnan(v)) {
      c[std::string(criterion_name(k))] = nullptr;
    } else {
      c[std::string(criterion_name(k))] = v;
    }
  }
  return c;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

Dataset read_trajectories_jsonl(std::istream& in,
                                const std::optional<std::vector<std::string>>& states) {
  std::optional<std::vector<std::string>> declared = states;
  std::vector<RawTrajectory> raw;
  std::string line;
  std::size_t lineno = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), lineno);
    }
    if (!obj.is_object()) throw ParseError("expected a JSON object", lineno);

    if (obj.contains("states") && !obj.contains("seq")) {
      if (seen_content) throw ParseError("states header must come first", lineno);
      seen_content = true;
      const auto& arr = obj["states"];
      if (!arr.is_array()) throw ParseError("\"states\" must be an array", lineno);
      if (!states) {
        std::vector<std::string> labels;
        for (const auto& v : arr) labels.push_back(label_text(v, lineno));
        declared = std::move(labels);
      }
      continue;
    }
    seen_content = true;
    if (!obj.contains("seq") || !obj["seq"].is_array()) {
      throw ParseError("trajectory object needs a \"seq\" array", lineno);
    }
    RawTrajectory t;
    t.line = lineno;
    if (obj.contains("id")) {
      t.id = obj["id"].is_string() ? obj["id"].get<std::string>() : obj["id"].dump();
    } else {
      t.id = "line" + std::to_string(lineno);
    }
    for (const auto& v : obj["seq"]) t.labels.push_back(label_text(v, lineno));
    if (t.labels.empty()) throw ParseError("trajectory '" + t.id + "' is empty", lineno);
    raw.push_back(std::move(t));
  }
  if (raw.empty()) throw EmptyInputError("input contains no trajectories");

  if (!declared) {
    std::vector<std::string> labels;
    std::set<std::string> seen;
    for (const auto& t : raw) {
      for (const auto& l : t.labels) {
        if (seen.insert(l).second) labels.push_back(l);
      }
    }
    if (labels.size() < 2) {
      // A constant data set still needs a two-state alphabet to be modeled.
      throw ParseError("only one distinct state label; declare the alphabet with a "
                       "states header or --states",
                       raw.front().line);
    }
    declared = std::move(labels);
  }

  Dataset data;
  try {
    data.alphabet = std::make_shared<const StateAlphabet>(*declared);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid state alphabet: ") + e.what(), 0);
  }
  for (auto& t : raw) {
    Trajectory traj{std::move(t.id), {}};
    traj.steps.reserve(t.labels.size());
    for (const auto& l : t.labels) {
      const auto id = data.alphabet->find(l);
      if (!id) throw UnknownLabelError("unknown state label '" + l + "'", t.line);
      traj.steps.push_back(*id);
    }
    data.trajectories.push_back(std::move(traj));
  }
  return data;
}

void write_trajectories_jsonl(std::ostream& out, const Dataset& data) {
  json header;
  header["states"] = data.alphabet->labels();
  out << header.dump() << '\n';
  for (const auto& t : data.trajectories) {
    ordered_json obj;
    obj["id"] = t.id;
    json seq = json::array();
    for (StateId s : t.steps) seq.push_back(data.alphabet->label(s));
    obj["seq"] = std::move(seq);
    out << obj.dump() << '\n';
  }
}

Dataset import_outcome_csv(std::istream& in, const std::array<std::string, 2>& labels) {
  Dataset data;
  data.alphabet = std::make_shared<const StateAlphabet>(std::vector<std::string>{labels[0], labels[1]});
  std::set<std::string> finished;
  std::string line;
  std::size_t lineno = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("expected game_id,outcome", lineno);
    const std::string game = trim(std::string_view(line).substr(0, comma));
    const std::string outcome = trim(std::string_view(line).substr(comma + 1));
    StateId state;
    if (outcome == "0" || outcome == labels[0]) {
      state = 0;
    } else if (outcome == "1" || outcome == labels[1]) {
      state = 1;
    } else if (first_row) {
      first_row = false;  // header
      continue;
    } else {
      throw UnknownLabelError("unknown outcome '" + outcome + "'", lineno);
    }
    first_row = false;
    if (data.trajectories.empty() || data.trajectories.back().id != game) {
      if (!data.trajectories.empty()) finished.insert(data.trajectories.back().id);
      if (finished.count(game)) {
        throw ParseError("rows for game '" + game + "' are not contiguous", lineno);
      }
      data.trajectories.push_back({game, {}});
    }
    data.trajectories.back().steps.push_back(state);
  }
  if (data.trajectories.empty()) throw EmptyInputError("CSV contains no outcome rows");
  return data;
}

TieMap parse_tie_map(std::string_view json_text, const StateAlphabet& alphabet) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed tie map: ") + e.what(), 0);
  }
  if (!doc.is_object() || !doc.contains("h") || !doc["h"].is_number_integer() ||
      doc["h"].get<long long>() < 0) {
    throw ParseError("tie map needs a non-negative integer \"h\"", 0);
  }
  if (!doc.contains("classes") || !doc["classes"].is_array() || doc["classes"].empty()) {
    throw ParseError("tie map needs a non-empty \"classes\" array", 0);
  }
  const auto h = static_cast<std::size_t>(doc["h"].get<long long>());
  std::map<Context, std::size_t> assign;
  std::optional<std::size_t> default_class;
  const auto& classes = doc["classes"];
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto& cls = classes[c];
    if (!cls.is_object()) throw ParseError("tie class must be an object", 0);
    if (cls.value("default", false)) {
      if (default_class) throw ParseError("more than one default tie class", 0);
      default_class = c;
    }
    if (!cls.contains("contexts")) continue;
    for (const auto& ctx : cls["contexts"]) {
      if (!ctx.is_array() || ctx.size() != h) {
        throw ParseError("tie-map context must be an array of length h", 0);
      }
      std::vector<StateId> tokens;
      for (const auto& tok : ctx) {
        const std::string text = label_text(tok, 0);
        if (text == kStartToken) {
          tokens.push_back(kStart);
          continue;
        }
        const auto id = alphabet.find(text);
        if (!id) throw UnknownLabelError("unknown state label '" + text + "' in tie map", 0);
        tokens.push_back(*id);
      }
      Context key;
      try {
        key = encode_context(tokens, alphabet);
      } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid tie-map context: ") + e.what(), 0);
      }
      if (!assign.emplace(std::move(key), c).second) {
        throw ParseError("context listed in more than one tie class", 0);
      }
    }
  }
  const std::string name = doc.contains("name") && doc["name"].is_string()
                               ? doc["name"].get<std::string>()
                               : std::string("tied");
  try {
    return TieMap(h, classes.size(), std::move(assign), default_class, name);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid tie map: ") + e.what(), 0);
  }
}

void write_reports_json(std::ostream& out, std::span<const CriterionReport> reports) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json o;
    o["model"] = r.model;
    o["h"] = r.h;
    o["boundary"] = std::string(to_string(r.boundary_mode));
    o["J"] = r.num_trajectories;
    o["transitions"] = r.transitions;
    o["params"] = r.num_params;
    o["criteria"] = criteria_object(r);
    ordered_json k;
    k["k_AIC"] = r.k_aic;
    k["k_DIC1"] = r.k_dic1;
    k["k_DIC2"] = r.k_dic2;
    k["k_WAIC1"] = r.k_waic1;
    k["k_WAIC2"] = r.k_waic2;
    o["complexity"] = std::move(k);
    o["dic_deviance"] = r.dic_deviance;
    arr.push_back(std::move(o));
  }
  out << arr.dump(2) << '\n';
}

void write_reports_csv(std::ostream& out, std::span<const CriterionReport> reports) {
  out << "model,h,boundary,J,transitions,params";
  for (Criterion c : kAllCriteria) out << ',' << criterion_name(c);
  out << ",k_AIC,k_DIC1,k_DIC2,k_WAIC1,k_WAIC2\n";
  for (const auto& r : reports) {
    out << r.model << ',' << r.h << ',' << to_string(r.boundary_mode) << ','
        << r.num_trajectories << ',' << r.transitions << ',' << r.num_params;
    for (Criterion c : kAllCriteria) {
      const double v = r.value(c);
      out << ',';
      if (!std::isnan(v)) out << format_number(v);
    }
    for (double k : {r.k_aic, r.k_dic1, r.k_dic2, r.k_waic1, r.k_waic2}) {
      out << ',' << format_number(k);
    }
    out << '\n';
  }
}

void write_selection_csv(std::ostream& out, const SelectionFrequencyTable& table) {
  out << "truth,J,criterion,h_chosen,count,frequency\n";
  for (const auto& r : table.rows) {
    out << r.truth << ',' << r.j << ',' << criterion_name(r.criterion) << ',' << r.h_chosen
        << ',' << r.count << ',' << format_number(r.frequency) << '\n';
  }
}

void write_delta_csv(std::ostream& out, const DeltaTable& table) {
  out << "h_true,J,criterion,h,n,min,max,mean,below_zero,fraction_below_zero\n";
  for (const auto& r : table.rows) {
    out << r.h_true << ',' << r.j << ',' << criterion_name(r.criterion) << ',' << r.h << ','
        << r.n << ',' << format_number(r.min) << ',' << format_number(r.max) << ','
        << format_number(r.mean) << ',' << r.below_zero << ','
        << format_number(r.fraction_below_zero) << '\n';
  }
}

}  // namespace memsel
