#pragma once

#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "loopagree/category.hpp"
#include "loopagree/complex.hpp"
#include "loopagree/errors.hpp"
#include "loopagree/group.hpp"
#include "loopagree/io.hpp"
#include "loopagree/loops.hpp"
#include "loopagree/task.hpp"

namespace loopagree::cli {

// Exit codes: 0 success/IMPLEMENTS/PASS, 1 NOT_IMPLEMENTS/FAIL, 2 UNKNOWN,
// 3 usage or input error.

inline LoopTask resolve_task(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return catalog(arg.substr(1));
  return io::load_task(arg);
}

inline Complex resolve_complex(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return catalog(arg.substr(1)).output;
  return io::load_complex(arg);
}

inline io::ojson int_to_json(const Int& v) {
  if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
    return io::ojson(static_cast<long long>(v));
  return io::ojson(v.str());
}

inline io::ojson int_list_json(const std::vector<Int>& xs) {
  io::ojson arr = io::ojson::array();
  for (const Int& x : xs) arr.push_back(int_to_json(x));
  return arr;
}

inline io::ojson matrix_json(const IntMatrix& m) {
  io::ojson rows = io::ojson::array();
  for (std::size_t i = 0; i < m.rows; ++i) {
    io::ojson row = io::ojson::array();
    for (std::size_t j = 0; j < m.cols; ++j) row.push_back(int_to_json(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string int_list_text(const std::vector<Int>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += xs[i].str();
  }
  return out + "]";
}

inline std::string matrix_text(const IntMatrix& m) {
  std::string out = "[";
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (i) out += ",";
    out += "[";
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (j) out += ",";
      out += m.at(i, j).str();
    }
    out += "]";
  }
  return out + "]";
}

namespace detail {

inline int cmd_signature(const std::string& task_arg, const std::string& format,
                         std::ostream& out) {
  LoopTask t = resolve_task(task_arg);
  PointedAbelianSignature s = task_signature(t);
  std::vector<Int> finite = finite_factors(s);
  std::vector<Int> reversed = reversed_element(s);
  if (format == "json") {
    io::ojson j = io::ojson::object();
    j["command"] = "signature";
    if (t.name) j["name"] = *t.name;
    j["factors"] = int_list_json(finite);
    j["free_rank"] = free_rank(s);
    j["element"] = int_list_json(s.element);
    j["element_reversed"] = int_list_json(reversed);
    out << io::dump(j);
  } else {
    out << "factors: " << int_list_text(finite) << " free_rank: " << free_rank(s)
        << " element: " << int_list_text(s.element) << "\n"
        << "element-reversed: " << int_list_text(reversed) << "\n";
  }
  return 0;
}

inline int cmd_compose(const std::string& a1, const std::string& a2, const std::string& out_path,
                       const std::string& format, std::ostream& out) {
  LoopTask t1 = resolve_task(a1);
  LoopTask t2 = resolve_task(a2);
  LoopTask c = compose(t1, t2);
  io::save_task(out_path, c);
  std::size_t loop_length = loop_subcomplex(c.loop).size();
  if (format == "json") {
    io::ojson j = io::ojson::object();
    j["command"] = "compose";
    if (c.name) j["name"] = *c.name;
    j["vertices"] = c.output.vertex_count();
    j["simplexes"] = c.output.size();
    j["loop_length"] = loop_length;
    j["out"] = out_path;
    out << io::dump(j);
  } else {
    out << "vertices: " << c.output.vertex_count() << " simplexes: " << c.output.size()
        << " loop-length: " << loop_length << "\n"
        << "wrote: " << out_path << "\n";
  }
  return 0;
}

inline int cmd_check(const std::vector<std::string>& source_args, const std::string& target_arg,
                     const std::string& format, std::ostream& out) {
  std::vector<LoopTask> sources;
  sources.reserve(source_args.size());
  for (const std::string& a : source_args) sources.push_back(resolve_task(a));
  LoopTask tgt = resolve_task(target_arg);
  Verdict v = decide_implements(sources, tgt);
  const char* kind = v.kind == VerdictKind::implements       ? "IMPLEMENTS"
                     : v.kind == VerdictKind::not_implements ? "NOT_IMPLEMENTS"
                                                             : "UNKNOWN";
  if (format == "json") {
    io::ojson j = io::ojson::object();
    j["command"] = "check";
    j["verdict"] = kind;
    j["detail"] = v.detail;
    j["witness"] = v.witness ? matrix_json(*v.witness) : io::ojson(nullptr);
    out << io::dump(j);
  } else {
    out << kind << "\n";
    if (v.witness)
      out << "witness: " << matrix_text(*v.witness) << "\n";
    else if (v.kind == VerdictKind::not_implements)
      out << "obstruction: " << v.detail << "\n";
    else
      out << "detail: " << v.detail << "\n";
  }
  switch (v.kind) {
    case VerdictKind::implements: return 0;
    case VerdictKind::not_implements: return 1;
    case VerdictKind::unknown: return 2;
  }
  return 3;
}

inline int cmd_verify(const std::string& src_arg, const std::string& tgt_arg,
                      const std::string& map_arg, const std::vector<std::string>& joint_args,
                      const std::string& format, std::ostream& out) {
  LoopTask src = resolve_task(src_arg);
  LoopTask tgt = resolve_task(tgt_arg);
  io::ParsedDecisionMap pm = io::load_decision_map(map_arg);
  std::optional<VerifyViolation> violation;
  if (!joint_args.empty()) {
    LoopTask t1 = resolve_task(joint_args[0]);
    LoopTask t2 = resolve_task(joint_args[1]);
    Complex prod = product_skel2(t1.output, t2.output);
    if (src.output != prod)
      throw Error(Errc::source_mismatch,
                  "source task output does not match skel2 of the joint factors' product");
    DecisionMap d = io::realize_decision_map(pm, prod, tgt.output);
    violation = verify_joint_violation(t1, t2, tgt, d);
  } else {
    DecisionMap d = io::realize_decision_map(pm, src.output, tgt.output);
    violation = verify_violation(src, tgt, d);
  }
  if (format == "json") {
    io::ojson j = io::ojson::object();
    j["command"] = "verify";
    j["result"] = violation ? "FAIL" : "PASS";
    if (violation) {
      j["sigma"] = violation->sigma.to_string();
      j["simplex"] = violation->simplex;
    }
    out << io::dump(j);
  } else {
    if (!violation) {
      out << "PASS\n";
    } else {
      out << "FAIL\n"
          << "violation: sigma=" << violation->sigma.to_string()
          << " simplex=" << io::ojson(violation->simplex).dump() << "\n";
    }
  }
  return violation ? 1 : 0;
}

inline int cmd_catalog(const std::string& name, const std::string& format, std::ostream& out) {
  if (name.empty()) {
    if (format == "json") {
      io::ojson j = io::ojson::object();
      j["command"] = "catalog";
      j["names"] = catalog_names();
      out << io::dump(j);
    } else {
      for (const std::string& n : catalog_names()) out << n << "\n";
    }
    return 0;
  }
  out << io::dump(io::task_to_json(catalog(name)));
  return 0;
}

inline int cmd_bary(const std::string& complex_arg, std::size_t n, const std::string& out_path,
                    const std::string& format, std::ostream& out, std::ostream& err) {
  Complex c = resolve_complex(complex_arg);
  Complex b = iterated_barycentric(c, n);
  if (!out_path.empty()) io::save_complex(out_path, b);
  if (format == "json") {
    io::ojson j = io::ojson::object();
    j["command"] = "bary";
    j["n"] = n;
    j["vertices"] = b.vertex_count();
    j["simplexes"] = b.size();
    if (!out_path.empty())
      j["out"] = out_path;
    else
      j["complex"] = io::complex_to_json(b);
    out << io::dump(j);
  } else if (!out_path.empty()) {
    out << "vertices: " << b.vertex_count() << " simplexes: " << b.size() << "\n"
        << "wrote: " << out_path << "\n";
  } else {
    // Document on stdout so it can be piped; stats on stderr.
    out << io::dump(io::complex_to_json(b));
    err << "vertices: " << b.vertex_count() << " simplexes: " << b.size() << "\n";
  }
  return 0;
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"composite loop agreement tasks: signatures, composition, verdicts"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  std::string sig_task;
  CLI::App* sig = app.add_subcommand("signature", "print the algebraic signature of a task");
  sig->add_option("task", sig_task, "task file or @name")->required();
  sig->fallthrough();

  std::string comp_a, comp_b, comp_out;
  CLI::App* comp = app.add_subcommand("compose", "compose two tasks and write the result");
  comp->add_option("task1", comp_a, "first task file or @name")->required();
  comp->add_option("task2", comp_b, "second task file or @name")->required();
  comp->add_option("out", comp_out, "output task file")->required();
  comp->fallthrough();

  std::vector<std::string> check_sources;
  std::string check_target;
  CLI::App* chk = app.add_subcommand("check", "decide whether sources jointly implement a target");
  chk->add_option("sources", check_sources, "source task files or @names")->required();
  chk->add_option("-t,--target", check_target, "target task file or @name")->required();
  chk->fallthrough();

  std::string ver_src, ver_tgt, ver_map;
  std::vector<std::string> ver_joint;
  CLI::App* ver = app.add_subcommand("verify", "operationally verify a decision map");
  ver->add_option("source", ver_src, "source task file or @name")->required();
  ver->add_option("target", ver_tgt, "target task file or @name")->required();
  ver->add_option("map", ver_map, "decision map file")->required();
  ver->add_option("--joint", ver_joint, "treat the source as the product of these two tasks")
      ->expected(2);
  ver->fallthrough();

  std::string cat_name;
  CLI::App* cat = app.add_subcommand("catalog", "list built-in tasks or emit one as JSON");
  cat->add_option("name", cat_name, "built-in task name");
  cat->fallthrough();

  std::string bary_complex, bary_out;
  std::size_t bary_n = 1;
  CLI::App* bar = app.add_subcommand("bary", "barycentrically subdivide a complex");
  bar->add_option("complex", bary_complex, "complex file or @name (uses the task's output)")
      ->required();
  bar->add_option("-n,--subdivisions", bary_n, "number of subdivisions (>= 1)")
      ->required()
      ->check(CLI::PositiveNumber);
  bar->add_option("-o,--out", bary_out, "write the subdivided complex here");
  bar->fallthrough();

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("loopagree");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  argv.reserve(storage.size());
  for (std::string& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (app.got_subcommand(sig)) return detail::cmd_signature(sig_task, format, out);
    if (app.got_subcommand(comp))
      return detail::cmd_compose(comp_a, comp_b, comp_out, format, out);
    if (app.got_subcommand(chk)) return detail::cmd_check(check_sources, check_target, format, out);
    if (app.got_subcommand(ver))
      return detail::cmd_verify(ver_src, ver_tgt, ver_map, ver_joint, format, out);
    if (app.got_subcommand(cat)) return detail::cmd_catalog(cat_name, format, out);
    if (app.got_subcommand(bar))
      return detail::cmd_bary(bary_complex, bary_n, bary_out, format, out, err);
    err << "error: no command selected\n";
    return 3;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace loopagree::cli
