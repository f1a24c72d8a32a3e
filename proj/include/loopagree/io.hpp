#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "loopagree/complex.hpp"
#include "loopagree/errors.hpp"
#include "loopagree/loops.hpp"
#include "loopagree/task.hpp"

namespace loopagree::io {

using ojson = nlohmann::ordered_json;

inline std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::parse_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::parse_error, "cannot write " + path);
  out << content;
  if (!out) throw Error(Errc::parse_error, "write failed for " + path);
}

inline ojson parse_text(const std::string& text, const std::string& origin) {
  try {
    return ojson::parse(text);
  } catch (const std::exception& e) {
    throw Error(Errc::parse_error, origin + ": " + e.what());
  }
}

inline const ojson& require(const ojson& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key))
    throw Error(Errc::parse_error, what + ": missing key \"" + key + "\"");
  return j.at(key);
}

inline std::vector<std::string> string_array(const ojson& j, const std::string& what) {
  if (!j.is_array()) throw Error(Errc::parse_error, what + ": expected an array");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_string()) throw Error(Errc::parse_error, what + ": expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

// Complexes serialize as their maximal simplexes; closure is restored on load.
inline ojson complex_to_json(const Complex& c) {
  ojson arr = ojson::array();
  for (const Simplex& s : maximal_simplexes(c)) arr.push_back(s);
  ojson out = ojson::object();
  out["simplexes"] = std::move(arr);
  return out;
}

inline Complex complex_from_json(const ojson& j) {
  const ojson& arr = require(j, "simplexes", "complex");
  if (!arr.is_array()) throw Error(Errc::parse_error, "complex: \"simplexes\" must be an array");
  std::vector<Simplex> simplexes;
  simplexes.reserve(arr.size());
  for (const auto& e : arr) simplexes.push_back(string_array(e, "complex: simplex"));
  return build(simplexes);
}

inline ojson loop_to_json(const TriangleLoop& l) {
  ojson out = ojson::object();
  out["v"] = ojson::array({l.v0, l.v1, l.v2});
  out["p01"] = l.p01;
  out["p12"] = l.p12;
  out["p20"] = l.p20;
  return out;
}

inline TriangleLoop loop_from_json(const Complex& c, const ojson& j) {
  std::vector<std::string> v = string_array(require(j, "v", "loop"), "loop: \"v\"");
  if (v.size() != 3)
    throw Error(Errc::parse_error, "loop: \"v\" must list exactly three vertices");
  EdgePath p01 = string_array(require(j, "p01", "loop"), "loop: \"p01\"");
  EdgePath p12 = string_array(require(j, "p12", "loop"), "loop: \"p12\"");
  EdgePath p20 = string_array(require(j, "p20", "loop"), "loop: \"p20\"");
  return make_triangle_loop(c, v[0], v[1], v[2], p01, p12, p20);
}

inline ojson task_to_json(const LoopTask& t) {
  ojson out = ojson::object();
  if (t.name) out["name"] = *t.name;
  out["complex"] = complex_to_json(t.output);
  out["loop"] = loop_to_json(t.loop);
  if (t.abelian_certified) out["abelian_certified"] = true;
  return out;
}

inline LoopTask task_from_json(const ojson& j) {
  if (!j.is_object()) throw Error(Errc::parse_error, "task: expected an object");
  std::optional<std::string> name;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw Error(Errc::parse_error, "task: \"name\" must be a string");
    name = j.at("name").get<std::string>();
  }
  Complex c = complex_from_json(require(j, "complex", "task"));
  TriangleLoop l = loop_from_json(c, require(j, "loop", "task"));
  bool certified = false;
  if (j.contains("abelian_certified")) {
    if (!j.at("abelian_certified").is_boolean())
      throw Error(Errc::parse_error, "task: \"abelian_certified\" must be a boolean");
    certified = j.at("abelian_certified").get<bool>();
  }
  return make_loop_task(std::move(name), std::move(c), std::move(l), certified);
}

// A decision map file carries only N and the vertex assignment; the source
// and target complexes come from the tasks it is checked against.
struct ParsedDecisionMap {
  std::size_t N = 0;
  std::map<VertexId, VertexId> assignment;
};

inline ParsedDecisionMap decision_map_from_json(const ojson& j) {
  const ojson& n = require(j, "N", "decision map");
  if (!n.is_number_unsigned())
    throw Error(Errc::parse_error, "decision map: \"N\" must be a nonnegative integer");
  const ojson& a = require(j, "assignment", "decision map");
  if (!a.is_object()) throw Error(Errc::parse_error, "decision map: \"assignment\" must be an object");
  ParsedDecisionMap out;
  out.N = n.get<std::size_t>();
  for (auto it = a.begin(); it != a.end(); ++it) {
    if (!it.value().is_string())
      throw Error(Errc::parse_error, "decision map: image of \"" + it.key() + "\" must be a string");
    out.assignment[it.key()] = it.value().get<std::string>();
  }
  return out;
}

inline ojson decision_map_to_json(const DecisionMap& d) {
  ojson a = ojson::object();
  for (const auto& [k, v] : d.map.assignment) a[k] = v;
  ojson out = ojson::object();
  out["N"] = d.N;
  out["assignment"] = std::move(a);
  return out;
}

inline DecisionMap realize_decision_map(const ParsedDecisionMap& p, const Complex& source_output,
                                        const Complex& target) {
  Complex src = iterated_barycentric(source_output, p.N);
  for (const auto& [k, v] : p.assignment)
    if (!src.contains({k}))
      throw Error(Errc::source_mismatch, "assignment mentions vertex " + k + " outside Bary^" +
                                             std::to_string(p.N) + " of the source output");
  SimplicialMap m;
  m.source = std::move(src);
  m.target = target;
  m.assignment = p.assignment;
  return make_decision_map(p.N, std::move(m));
}

inline Complex load_complex(const std::string& path) {
  return complex_from_json(parse_text(read_file(path), path));
}
inline void save_complex(const std::string& path, const Complex& c) {
  write_file(path, dump(complex_to_json(c)));
}
inline LoopTask load_task(const std::string& path) {
  return task_from_json(parse_text(read_file(path), path));
}
inline void save_task(const std::string& path, const LoopTask& t) {
  write_file(path, dump(task_to_json(t)));
}
inline ParsedDecisionMap load_decision_map(const std::string& path) {
  return decision_map_from_json(parse_text(read_file(path), path));
}

}  // namespace loopagree::io
