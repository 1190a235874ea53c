// Copyright 2026 The evflex Authors
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

#include "evflex/scenario_io.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include "json.hpp"

#include "evflex/errors.h"

namespace evflex {
namespace {

using Json = nlohmann::ordered_json;

const Json& Field(const Json& object, const char* key,
                  const std::string& context) {
  if (!object.is_object()) {
    throw IoError(fmt::format("{}: expected an object", context));
  }
  const auto it = object.find(key);
  if (it == object.end()) {
    throw IoError(fmt::format("{}: missing field \"{}\"", context, key));
  }
  return *it;
}

double Number(const Json& object, const char* key, const std::string& context) {
  const Json& value = Field(object, key, context);
  if (!value.is_number()) {
    throw IoError(fmt::format("{}: \"{}\" must be a number", context, key));
  }
  return value.get<double>();
}

std::size_t Count(const Json& object, const char* key,
                  const std::string& context) {
  const Json& value = Field(object, key, context);
  if (!value.is_number_unsigned()) {
    throw IoError(fmt::format("{}: \"{}\" must be a non-negative integer",
                              context, key));
  }
  return value.get<std::size_t>();
}

std::string Text(const Json& object, const char* key,
                 const std::string& context) {
  const Json& value = Field(object, key, context);
  if (!value.is_string()) {
    throw IoError(fmt::format("{}: \"{}\" must be a string", context, key));
  }
  return value.get<std::string>();
}

std::vector<double> Numbers(const Json& object, const char* key,
                            const std::string& context) {
  const Json& value = Field(object, key, context);
  if (!value.is_array()) {
    throw IoError(fmt::format("{}: \"{}\" must be an array", context, key));
  }
  std::vector<double> out;
  out.reserve(value.size());
  for (const Json& x : value) {
    if (!x.is_number()) {
      throw IoError(fmt::format("{}: \"{}\" must hold numbers", context, key));
    }
    out.push_back(x.get<double>());
  }
  return out;
}

const Json& Array(const Json& object, const char* key) {
  const Json& value = Field(object, key, "scenario");
  if (!value.is_array()) {
    throw IoError(fmt::format("scenario: \"{}\" must be an array", key));
  }
  return value;
}

}  // namespace

Scenario ParseScenario(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw IoError(fmt::format("malformed JSON: {}", e.what()));
  }

  Scenario s;
  const Json& horizon = Field(doc, "horizon", "scenario");
  s.horizon.periods = Count(horizon, "T", "horizon");
  s.horizon.delta = Number(horizon, "delta", "horizon");
  s.prices = Numbers(doc, "prices", "scenario");

  for (const Json& item : Array(doc, "feeders")) {
    FeederSpec f;
    f.id = Text(item, "id", "feeder");
    const std::string context = "feeder " + f.id;
    f.flow_min = Number(item, "flow_min", context);
    f.flow_max = Number(item, "flow_max", context);
    f.nominal_load = Numbers(item, "nominal_load", context);
    if (const auto it = item.find("parent"); it != item.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw IoError(context + ": \"parent\" must be a string or null");
      }
      f.parent = it->get<std::string>();
    }
    if (!s.feeders.emplace(f.id, f).second) {
      throw IoError("duplicate feeder id " + f.id);
    }
  }

  for (const Json& item : Array(doc, "evs")) {
    EvSpec ev;
    ev.id = Text(item, "id", "ev");
    const std::string context = "ev " + ev.id;
    ev.feeder_id = Text(item, "feeder_id", context);
    ev.arrival = Count(item, "arrival", context);
    ev.departure = Count(item, "departure", context);
    ev.max_rate = Number(item, "max_rate", context);
    ev.energy_min = Number(item, "energy_min", context);
    ev.energy_max = Number(item, "energy_max", context);
    if (!s.evs.emplace(ev.id, ev).second) {
      throw IoError("duplicate ev id " + ev.id);
    }
  }
  return s;
}

Scenario LoadScenario(const std::filesystem::path& path) {
  return ParseScenario(ReadTextFile(path));
}

std::string SerializeScenario(const Scenario& scenario) {
  Json doc;
  doc["horizon"] = {{"T", scenario.horizon.periods},
                    {"delta", scenario.horizon.delta}};
  doc["prices"] = scenario.prices;
  doc["feeders"] = Json::array();
  for (const auto& [id, f] : scenario.feeders) {
    Json item;
    item["id"] = f.id;
    item["flow_min"] = f.flow_min;
    item["flow_max"] = f.flow_max;
    item["nominal_load"] = f.nominal_load;
    item["parent"] = f.parent ? Json(*f.parent) : Json(nullptr);
    doc["feeders"].push_back(std::move(item));
  }
  doc["evs"] = Json::array();
  for (const auto& [id, ev] : scenario.evs) {
    doc["evs"].push_back({{"id", ev.id},
                          {"feeder_id", ev.feeder_id},
                          {"arrival", ev.arrival},
                          {"departure", ev.departure},
                          {"max_rate", ev.max_rate},
                          {"energy_min", ev.energy_min},
                          {"energy_max", ev.energy_max}});
  }
  return doc.dump(2) + "\n";
}

void SaveScenario(const Scenario& scenario, const std::filesystem::path& path) {
  WriteTextFile(path, SerializeScenario(scenario));
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return buffer.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

std::string FormatNumber(double value) {
  if (value == 0.0) return "0";
  return fmt::format("{:.9g}", value);
}

std::string FormatLongCsv(const std::vector<LabeledProfile>& series) {
  std::string out = "entity_id,period,kw\n";
  for (const auto& [entity, profile] : series) {
    for (std::size_t t = 0; t < profile.size(); ++t) {
      out += fmt::format("{},{},{}\n", entity, t + 1, FormatNumber(profile[t]));
    }
  }
  return out;
}

}  // namespace evflex
