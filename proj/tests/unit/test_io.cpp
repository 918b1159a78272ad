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


#include <sstream>
#include <string>

#include "doctest.h"
#include "memsel/errors.hpp"
#include "memsel/io.hpp"
#include "memsel/tying.hpp"

using namespace memsel;

namespace {

Dataset parse(const std::string& text,
              const std::optional<std::vector<std::string>>& states = std::nullopt) {
  std::istringstream in(text);
  return read_trajectories_jsonl(in, states);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("JSONL with a states header") {
  const auto d = parse(R"({"states": ["miss", "hit"]}
{"id": "g1", "seq": ["hit", "miss", "hit"]}

{"id": "g2", "seq": ["miss"]}
)");
  CHECK(d.alphabet->labels() == std::vector<std::string>{"miss", "hit"});
  REQUIRE(d.trajectories.size() == 2);
  CHECK(d.trajectories[0].id == "g1");
  CHECK(d.trajectories[0].steps == std::vector<StateId>{1, 0, 1});
  CHECK(d.trajectories[1].steps == std::vector<StateId>{0});
}

TEST_CASE("JSONL alphabet inference and integer labels") {
  const auto d = parse("{\"seq\": [3, 1, 3]}\n{\"seq\": [2]}\n");
  CHECK(d.alphabet->labels() == std::vector<std::string>{"3", "1", "2"});
  CHECK(d.trajectories[0].steps == std::vector<StateId>{0, 1, 0});
  CHECK_FALSE(d.trajectories[1].id.empty());

  // An explicit alphabet overrides inference and order.
  const auto e = parse("{\"seq\": [\"b\", \"a\"]}\n", std::vector<std::string>{"a", "b", "c"});
  CHECK(e.alphabet->size() == 3);
  CHECK(e.trajectories[0].steps == std::vector<StateId>{1, 0});
}

TEST_CASE("JSONL errors") {
  CHECK(error_line("{\"seq\": [\"a\", \"b\"]}\n{\"seq\": [\"a\"\n") == 2);
  CHECK(error_line("{\"seq\": [\"a\", \"b\"]}\n\n[1, 2]\n") == 3);
  CHECK(error_line("{\"seq\": [\"a\", \"b\"]}\n{\"seq\": []}\n") == 2);
  CHECK(error_line("{\"seq\": [\"a\", \"b\"]}\n{\"seq\": [1.5]}\n") == 2);
  CHECK(error_line("{\"seq\": [\"a\"]}\n{\"states\": [\"a\", \"b\"]}\n") == 2);

  CHECK_THROWS_AS(parse("{\"states\": [\"a\", \"b\"]}\n{\"seq\": [\"a\", \"z\"]}\n"),
                  UnknownLabelError);
  CHECK_THROWS_AS(parse(""), EmptyInputError);
  CHECK_THROWS_AS(parse("\n\n{\"states\": [\"a\", \"b\"]}\n"), EmptyInputError);
  CHECK_THROWS_AS(parse("{\"seq\": [\"a\", \"a\"]}\n"), ParseError);
}

TEST_CASE("JSONL round trip") {
  const auto d = parse(R"({"states": ["x", "y", "z"]}
{"id": "one", "seq": ["z", "x"]}
{"id": "two", "seq": ["y"]}
)");
  std::ostringstream out;
  write_trajectories_jsonl(out, d);
  const auto again = parse(out.str());
  CHECK(*again.alphabet == *d.alphabet);
  CHECK(again.trajectories[0].steps == d.trajectories[0].steps);
  CHECK(again.trajectories[1].id == "two");
}

TEST_CASE("outcome CSV import") {
  std::istringstream in("game_id,outcome\n7,1\n7,0\n8,hit\n8,1\n9,miss\n");
  const auto d = import_outcome_csv(in);
  REQUIRE(d.trajectories.size() == 3);
  CHECK(d.trajectories[0].id == "7");
  CHECK(d.trajectories[0].steps == std::vector<StateId>{1, 0});
  CHECK(d.trajectories[1].steps == std::vector<StateId>{1, 1});
  CHECK(d.trajectories[2].steps == std::vector<StateId>{0});

  std::istringstream custom("a,L\na,W\n");
  const auto e = import_outcome_csv(custom, {"L", "W"});
  CHECK(e.alphabet->labels() == std::vector<std::string>{"L", "W"});
  CHECK(e.trajectories[0].steps == std::vector<StateId>{0, 1});

  std::istringstream split("1,1\n2,0\n1,1\n");
  CHECK_THROWS_AS(import_outcome_csv(split), ParseError);
  std::istringstream junk("1,1\n1,maybe\n");
  CHECK_THROWS_AS(import_outcome_csv(junk), UnknownLabelError);
  std::istringstream header_only("game_id,outcome\n");
  CHECK_THROWS_AS(import_outcome_csv(header_only), EmptyInputError);
}

TEST_CASE("tie map files") {
  const StateAlphabet al({"miss", "hit"});
  const auto map = parse_tie_map(R"({
    "name": "after-miss",
    "h": 1,
    "classes": [
      {"contexts": [["miss"]]},
      {"contexts": [["hit"], ["<START>"]]}
    ]})",
                                 al);
  CHECK(map.name() == "after-miss");
  CHECK(map.num_classes() == 2);
  CHECK(map.class_of(Context::history({kStart})) == 1);
  CHECK(map.class_of(Context::history({0})) == 0);

  const auto with_default = parse_tie_map(
      R"({"h": 2, "classes": [{"contexts": [["miss", "miss"]]}, {"default": true}]})", al);
  CHECK(with_default.default_class() == 1);
  CHECK(with_default.class_of(Context::history({1, 0})) == 1);

  CHECK_THROWS_AS(parse_tie_map("{", al), ParseError);
  CHECK_THROWS_AS(parse_tie_map(R"({"classes": []})", al), ParseError);
  CHECK_THROWS_AS(parse_tie_map(R"({"h": 1, "classes": [{"contexts": [["foul"]]}]})", al),
                  UnknownLabelError);
  CHECK_THROWS_AS(
      parse_tie_map(R"({"h": 1, "classes": [{"contexts": [["hit"]]}, {"contexts": [["hit"]]}]})",
                    al),
      ParseError);
  CHECK_THROWS_AS(parse_tie_map(R"({"h": 1, "classes": [{"contexts": [["hit", "hit"]]}]})", al),
                  ParseError);
}

TEST_CASE("report writers") {
  CriterionReport r;
  r.model = "h=0";
  r.num_trajectories = 1;
  r.aic = 1.5;
  std::ostringstream csv;
  write_reports_csv(csv, std::vector<CriterionReport>{r});
  const std::string text = csv.str();
  CHECK(text.rfind("model,h,boundary,J,transitions,params,AIC,DIC1,DIC2,LPD,LPPD,WAIC1,WAIC2,"
                   "LOO,LPPD_CV2,k_AIC,k_DIC1,k_DIC2,k_WAIC1,k_WAIC2\n",
                   0) == 0);
  CHECK(text.find(",1.5,") != std::string::npos);
  CHECK(text.find(",,") != std::string::npos);  // missing CV2

  std::ostringstream json;
  write_reports_json(json, std::vector<CriterionReport>{r});
  CHECK(json.str().find("\"LPPD_CV2\": null") != std::string::npos);
}

TEST_CASE("number formatting and digests") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(871.2025) == "871.2025");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
