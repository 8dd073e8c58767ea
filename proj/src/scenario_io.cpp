// Copyright 2026 The occrisk Authors
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

#include "occrisk/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "occrisk/errors.hpp"

namespace occrisk
{

using nlohmann::json;

namespace
{

json point_list(const std::vector<Vec2> & pts)
{
  json arr = json::array();
  for (const auto & p : pts) {
    arr.push_back({p.x, p.y});
  }
  return arr;
}

std::vector<Vec2> parse_points(const json & arr, std::string_view context)
{
  if (!arr.is_array()) {
    throw FormatError(std::string(context) + ": expected an array of points");
  }
  std::vector<Vec2> out;
  out.reserve(arr.size());
  for (const auto & p : arr) {
    if (!p.is_array() || p.size() < 2) {
      throw FormatError(std::string(context) + ": point must be [x, y]");
    }
    out.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  }
  return out;
}

json states_to_json(const std::vector<AgentState> & states)
{
  json arr = json::array();
  for (const auto & s : states) {
    arr.push_back({s.t, s.x, s.y, s.heading, s.speed});
  }
  return arr;
}

std::vector<AgentState> parse_states(const json & arr, std::string_view context)
{
  if (!arr.is_array()) {
    throw FormatError(std::string(context) + ": states must be an array");
  }
  std::vector<AgentState> out;
  out.reserve(arr.size());
  for (const auto & s : arr) {
    if (!s.is_array() || s.size() != 5) {
      throw FormatError(std::string(context) + ": state must be [t, x, y, heading, speed]");
    }
    out.push_back(
      {s[0].get<double>(), s[1].get<double>(), s[2].get<double>(), s[3].get<double>(),
       s[4].get<double>()});
  }
  return out;
}

json footprint_to_json(const Footprint & f)
{
  return {{"half_length", f.half_length}, {"half_width", f.half_width}};
}

Footprint parse_footprint(const json & j, std::string_view context)
{
  require_known_keys(j, {"half_length", "half_width"}, context);
  return {j.at("half_length").get<double>(), j.at("half_width").get<double>()};
}

LaneKind parse_lane_kind(const std::string & s)
{
  if (s == "drive") return LaneKind::drive;
  if (s == "turn") return LaneKind::turn;
  if (s == "merge") return LaneKind::merge;
  throw FormatError("unknown lane kind '" + s + "'");
}

AgentKind parse_agent_kind(const std::string & s)
{
  if (s == "vehicle") return AgentKind::vehicle;
  if (s == "phantom") return AgentKind::phantom;
  throw FormatError("unknown agent kind '" + s + "'");
}

}  // namespace

void require_known_keys(
  const json & obj, std::initializer_list<std::string_view> allowed, std::string_view context)
{
  if (!obj.is_object()) {
    throw FormatError(std::string(context) + ": expected an object");
  }
  for (const auto & item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw FormatError(std::string(context) + ": unknown key '" + item.key() + "'");
    }
  }
}

json scenario_to_json(const Scenario & scenario)
{
  json doc;
  doc["schema"] = kScenarioSchemaVersion;
  doc["dt"] = scenario.dt;
  doc["horizon"] = scenario.horizon;
  doc["metadata"] = json::object();
  for (const auto & [k, v] : scenario.metadata) {
    doc["metadata"][k] = v;
  }

  json lanes = json::array();
  for (const auto & lane : scenario.lanes) {
    lanes.push_back(
      {{"id", lane.id},
       {"kind", to_string(lane.kind)},
       {"width", lane.width},
       {"centerline", point_list(lane.centerline.points())},
       {"successors", lane.successors},
       {"predecessors", lane.predecessors}});
  }
  doc["lanes"] = std::move(lanes);

  json agents = json::array();
  for (const auto & agent : scenario.agents) {
    agents.push_back(
      {{"id", agent.id},
       {"kind", to_string(agent.kind)},
       {"footprint", footprint_to_json(agent.footprint)},
       {"states", states_to_json(agent.states)}});
  }
  doc["agents"] = std::move(agents);

  const auto & ego = scenario.ego;
  json path = json::array();
  const auto & pts = ego.reference_path.points();
  const auto & s = ego.reference_path.arc_lengths();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    path.push_back({pts[i].x, pts[i].y, s[i]});
  }
  doc["ego"] = {
    {"initial", {ego.initial.x, ego.initial.y, ego.initial.heading, ego.initial.speed}},
    {"reference_path", std::move(path)},
    {"d_desired", ego.d_desired},
    {"footprint", footprint_to_json(ego.footprint)},
    {"log", states_to_json(ego.log)}};

  json occluders = json::array();
  for (const auto & poly : scenario.occluders) {
    occluders.push_back(point_list(poly));
  }
  doc["occluders"] = std::move(occluders);

  json phantoms = json::array();
  for (const auto & p : scenario.phantoms) {
    phantoms.push_back(
      {{"agent", p.agent}, {"segment_lane", p.segment_lane}, {"s", p.s}, {"seed", p.seed}});
  }
  doc["phantoms"] = std::move(phantoms);
  return doc;
}

Scenario scenario_from_json(const json & doc)
{
  try {
    require_known_keys(
      doc,
      {"schema", "dt", "horizon", "metadata", "lanes", "agents", "ego", "occluders",
       "phantoms"},
      "scenario");
    if (doc.at("schema").get<int>() != kScenarioSchemaVersion) {
      throw FormatError("unsupported scenario schema version");
    }
    Scenario sc;
    sc.dt = doc.at("dt").get<double>();
    sc.horizon = doc.at("horizon").get<double>();
    for (const auto & item : doc.at("metadata").items()) {
      sc.metadata[item.key()] = item.value().get<std::string>();
    }
    for (const auto & l : doc.at("lanes")) {
      require_known_keys(
        l, {"id", "kind", "width", "centerline", "successors", "predecessors"}, "lane");
      LaneSegment lane;
      lane.id = l.at("id").get<std::string>();
      lane.kind = parse_lane_kind(l.at("kind").get<std::string>());
      lane.width = l.at("width").get<double>();
      lane.centerline = Polyline(parse_points(l.at("centerline"), "lane " + lane.id));
      lane.successors = l.at("successors").get<std::vector<std::string>>();
      lane.predecessors = l.at("predecessors").get<std::vector<std::string>>();
      sc.lanes.push_back(std::move(lane));
    }
    for (const auto & a : doc.at("agents")) {
      require_known_keys(a, {"id", "kind", "footprint", "states"}, "agent");
      AgentLog agent;
      agent.id = a.at("id").get<std::string>();
      agent.kind = parse_agent_kind(a.at("kind").get<std::string>());
      agent.footprint = parse_footprint(a.at("footprint"), "agent " + agent.id);
      agent.states = parse_states(a.at("states"), "agent " + agent.id);
      sc.agents.push_back(std::move(agent));
    }
    const auto & e = doc.at("ego");
    require_known_keys(e, {"initial", "reference_path", "d_desired", "footprint", "log"}, "ego");
    const auto & init = e.at("initial");
    if (!init.is_array() || init.size() != 4) {
      throw FormatError("ego.initial must be [x, y, heading, speed]");
    }
    sc.ego.initial = {
      init[0].get<double>(), init[1].get<double>(), init[2].get<double>(), init[3].get<double>()};
    std::vector<Vec2> path_pts;
    std::vector<double> path_s;
    for (const auto & p : e.at("reference_path")) {
      if (!p.is_array() || p.size() != 3) {
        throw FormatError("ego.reference_path entries must be [x, y, s]");
      }
      path_pts.push_back({p[0].get<double>(), p[1].get<double>()});
      path_s.push_back(p[2].get<double>());
    }
    sc.ego.reference_path = Polyline(std::move(path_pts));
    const auto & s = sc.ego.reference_path.arc_lengths();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (std::abs(s[i] - path_s[i]) > 1e-6) {
        throw FormatError("ego.reference_path arc length does not match its points");
      }
    }
    sc.ego.d_desired = e.at("d_desired").get<double>();
    sc.ego.footprint = parse_footprint(e.at("footprint"), "ego");
    sc.ego.log = parse_states(e.at("log"), "ego log");
    for (const auto & poly : doc.at("occluders")) {
      sc.occluders.push_back(parse_points(poly, "occluder"));
    }
    for (const auto & p : doc.at("phantoms")) {
      require_known_keys(p, {"agent", "segment_lane", "s", "seed"}, "phantom provenance");
      sc.phantoms.push_back(
        {p.at("agent").get<std::string>(), p.at("segment_lane").get<std::string>(),
         p.at("s").get<double>(), p.at("seed").get<std::uint64_t>()});
    }
    return sc;
  } catch (const json::exception & ex) {
    throw FormatError(std::string("scenario: ") + ex.what());
  }
}

std::string serialize_scenario(const Scenario & scenario)
{
  return scenario_to_json(scenario).dump(1) + "\n";
}

Scenario parse_scenario(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::exception & ex) {
    throw FormatError(std::string("scenario: ") + ex.what());
  }
  return scenario_from_json(doc);
}

std::string read_text_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path & path, std::string_view text)
{
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

Scenario read_scenario(const std::filesystem::path & path)
{
  return parse_scenario(read_text_file(path));
}

void write_scenario(const std::filesystem::path & path, const Scenario & scenario)
{
  write_text_file(path, serialize_scenario(scenario));
}

}  // namespace occrisk
