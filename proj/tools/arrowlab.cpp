// Command-line front end: load definition files, check laws, derive
// constructions, run the suite and evaluate lambda terms.
//
//   arrowlab [--seed N] [--format text|structured] [--caps key=value ...]
//            [load <files>] [check <subject> [--laws ids]] ...
//            [derive <construction> <args> --as <name>] ...
//            [suite] [lambda eval <algebra> "<term>" [--env x=a ...]]
//
// Exit codes: 0 all laws pass, 1 some law fails, 2 input error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "arrowlab/workspace.hpp"

namespace {

using namespace arrowlab;

const std::set<std::string> keywords = {"load", "check", "derive", "suite", "lambda"};

struct Segment {
  std::string command;
  std::vector<std::string> args;
};

std::vector<Segment> segment(const std::vector<std::string>& tokens) {
  std::vector<Segment> out;
  for (const auto& t : tokens) {
    if (keywords.count(t))
      out.push_back({t, {}});
    else if (out.empty())
      throw InputError("expected a command (load, check, derive, suite, lambda), got '" + t + "'");
    else
      out.back().args.push_back(t);
  }
  if (out.empty()) throw InputError("no command given; see --help");
  return out;
}

// Values of a flag that takes a list: "--flag a b", "--flag=a,b" or repeated.
std::vector<std::string> take_list(std::vector<std::string>& args, const std::string& flag) {
  std::vector<std::string> values, rest;
  bool seen = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a == flag) {
      seen = true;
      while (i + 1 < args.size() && args[i + 1].rfind("--", 0) != 0) values.push_back(args[++i]);
    } else if (a.rfind(flag + "=", 0) == 0) {
      seen = true;
      std::string v = a.substr(flag.size() + 1);
      std::size_t start = 0;
      while (start <= v.size()) {
        auto comma = v.find(',', start);
        if (comma == std::string::npos) comma = v.size();
        if (comma > start) values.push_back(v.substr(start, comma - start));
        start = comma + 1;
      }
    } else {
      rest.push_back(a);
    }
  }
  if (seen && values.empty()) throw InputError(flag + " needs at least one value");
  args = std::move(rest);
  return values;
}

void no_flags(const Segment& s, const std::vector<std::string>& args) {
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) throw InputError("unknown option '" + a + "' for " + s.command);
}

struct Output {
  std::vector<ReportLine> lines;
  std::vector<nlohmann::ordered_json> derived, values;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite arrow algebras: load, check, derive and verify"};
  std::uint64_t seed = 0;
  std::string format = "text";
  std::vector<std::string> caps_kv;
  app.add_option("--seed", seed, "Seed for every randomized generator");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "structured"}));
  app.add_option("--caps", caps_kv, "Enumeration bounds as key=value")->expected(1, -1);
  app.allow_extras();
  app.prefix_command(false);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    Caps caps;
    for (const auto& kv : caps_kv) caps.set(kv);
    auto segments = segment(app.remaining());

    Workspace ws;
    Output out;
    bool loaded = false;
    for (auto& s : segments) {
      auto args = s.args;
      if (s.command == "load") {
        no_flags(s, args);
        if (args.empty()) throw InputError("load needs at least one file");
        std::vector<std::filesystem::path> paths(args.begin(), args.end());
        ws.load_files(paths);
        loaded = true;
      } else if (s.command == "check") {
        auto laws = take_list(args, "--laws");
        no_flags(s, args);
        if (args.size() != 1) throw InputError("check expects exactly one subject");
        Checker checker(ws, seed, caps);
        for (auto& l : checker.check(args[0], LawFilter(laws))) out.lines.push_back(std::move(l));
      } else if (s.command == "derive") {
        auto as = take_list(args, "--as");
        no_flags(s, args);
        if (as.size() != 1) throw InputError("derive needs --as <name>");
        if (args.empty()) throw InputError("derive needs a construction");
        std::vector<std::string> rest(args.begin() + 1, args.end());
        for (auto& l : run_derive(ws, args[0], rest, as[0], caps)) out.lines.push_back(std::move(l));
        nlohmann::ordered_json d;
        d["name"] = as[0];
        d["construction"] = args[0];
        d["kind"] = ws.kind_of(as[0]);
        if (ws.algebras.count(as[0])) d["size"] = ws.algebra(as[0]).size();
        out.derived.push_back(std::move(d));
      } else if (s.command == "suite") {
        no_flags(s, args);
        if (!args.empty()) throw InputError("suite takes no arguments");
        if (!loaded && ws.load_order.empty()) load_directory(ws, fixture_dir());
        for (auto& l : run_suite(ws, seed, caps)) out.lines.push_back(std::move(l));
      } else {
        auto env_kv = take_list(args, "--env");
        no_flags(s, args);
        if (args.size() != 3 || args[0] != "eval") throw InputError("usage: lambda eval <algebra> \"<term>\"");
        const auto& A = ws.algebra(args[1]);
        LambdaTerm t = parse_lambda(args[2]);
        Environment env;
        for (const auto& kv : env_kv) {
          auto eq = kv.find('=');
          if (eq == std::string::npos) throw InputError("--env binding '" + kv + "' is not x=a");
          env[kv.substr(0, eq)] = A.at(kv.substr(eq + 1));
        }
        nlohmann::ordered_json v;
        v["algebra"] = args[1];
        v["term"] = t.to_string();
        v["value"] = A.name(interpret(A, t, env));
        out.values.push_back(std::move(v));
      }
    }

    canonical_order(out.lines);
    if (format == "structured") {
      auto doc = render_structured(out.lines, seed);
      if (!out.derived.empty()) doc["derived"] = out.derived;
      if (!out.values.empty()) doc["values"] = out.values;
      std::cout << doc.dump(2) << "\n";
    } else {
      for (const auto& d : out.derived) {
        std::cout << "derived " << d["name"].get<std::string>() << " (" << d["kind"].get<std::string>();
        if (d.contains("size")) std::cout << ", " << d["size"].get<std::size_t>() << " elements";
        std::cout << ")\n";
      }
      for (const auto& v : out.values)
        std::cout << v["term"].get<std::string>() << " = " << v["value"].get<std::string>() << "\n";
      if (!out.lines.empty() || (out.derived.empty() && out.values.empty())) std::cout << render_text(out.lines);
    }
    return exit_code(out.lines);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what();
    if (auto* se = dynamic_cast<const StructureError*>(&e); se && !se->witness().empty()) {
      std::cerr << " (witness:";
      for (const auto& w : se->witness()) std::cerr << " " << w;
      std::cerr << ")";
    }
    std::cerr << "\n";
    return 2;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << " (raise it with --caps)\n";
    return 2;
  } catch (const LawViolation& e) {
    std::cerr << "law violation: " << e.what() << "\n";
    return 1;
  }
}
