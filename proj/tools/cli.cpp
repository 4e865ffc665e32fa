#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "popproto/composer.hpp"
#include "popproto/formats.hpp"
#include "popproto/verifier.hpp"

namespace popproto::cli {

namespace {

std::vector<std::string> expand_builtins(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--builtin" && i + 1 < args.size()) {
      out.push_back("builtin:" + args[++i]);
    } else if (args[i].starts_with("--builtin=")) {
      out.push_back("builtin:" + args[i].substr(10));
    } else {
      out.push_back(args[i]);
    }
  }
  return out;
}

std::string output_counts(const Protocol& p, const AgentConfiguration& c) {
  std::map<std::string, std::uint32_t> counts;
  for (const auto& [agent, q] : c) ++counts[p.output(q)];
  std::string s = "{";
  for (const auto& [o, k] : counts) s += (s.size() > 1 ? ", " : "") + o + ":" + std::to_string(k);
  return s + "}";
}

StateIdx start_state(const Protocol& p, const std::string& name) {
  if (!name.empty()) {
    auto q = p.state(name);
    if (!p.is_input(q)) throw Error(ErrorCode::UnknownState, name + " is not an input state");
    return q;
  }
  for (auto q : p.inputs())
    if (!p.has_shutdown() || q != p.bot()) return q;
  throw Error(ErrorCode::EmptyInputs, "no usable input state");
}

void print_report(const VerificationReport& report, std::ostream& out) {
  out << "verify " << report.protocol << " against " << report.spec << " (" << to_string(report.kind) << ")\n";
  for (const auto& note : report.notes) out << "note: " << note << "\n";
  out << std::setw(4) << "n" << std::setw(4) << "R" << std::setw(9) << "verdict" << std::setw(10) << "nodes"
      << std::setw(7) << "bsccs" << std::setw(11) << "ms" << "\n";
  for (const auto& c : report.cases) {
    out << std::setw(4) << c.population << std::setw(4) << c.requests << std::setw(9) << to_string(c.verdict)
        << std::setw(10) << c.nodes << std::setw(7) << c.bsccs << std::setw(11) << std::fixed << std::setprecision(1)
        << c.elapsed_ms << "\n";
    if (c.verdict == Verdict::Fail) out << "  reason: " << c.reason << "\n";
  }
  for (const auto& c : report.cases)
    out << "RESULT n=" << c.population << " R=" << c.requests << " verdict=" << to_string(c.verdict)
        << " nodes=" << c.nodes << " bsccs=" << c.bsccs << "\n";
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Population protocols with shutdown requests: simulate, verify, compose."};
  app.name("popproto");
  app.require_subcommand(1);

  std::string file, file2, spec_ref, spec_ref2, out_path, dot_path, trace_path, script, input_state, mode, cex_path;
  std::uint32_t n = 0, max_n = 0, min_n = 1, max_requests = 0, removal_delay = 1;
  std::uint64_t seed = 0, max_steps = 10000;
  std::size_t node_cap = 5'000'000;
  unsigned threads = 0;
  bool strict = false, no_relabel = false;

  auto* validate = app.add_subcommand("validate", "Check a protocol file");
  validate->add_option("file", file, "protocol file or builtin:<key>")->required();

  auto* simulate = app.add_subcommand("simulate", "Run one random execution");
  simulate->add_option("file", file)->required();
  simulate->add_option("--n", n, "population size")->required();
  simulate->add_option("--seed", seed);
  simulate->add_option("--max-steps", max_steps);
  simulate->add_option("--requests", script, "<step>:<agent|any>[,...]");
  simulate->add_option("--trace", trace_path, "write the trace here");
  simulate->add_option("--input", input_state, "input state of every agent (default: first input)");
  simulate->add_option("--removal-delay", removal_delay);

  auto* verify = app.add_subcommand("verify", "Exhaustive bounded verification");
  verify->add_option("file", file)->required();
  verify->add_option("--spec", spec_ref, "spec file or builtin:<key>")->required();
  verify->add_option("--max-n", max_n)->required();
  verify->add_option("--min-n", min_n);
  verify->add_option("--max-requests", max_requests);
  verify->add_option("--mode", mode, "predicate|spec|shutdown")->check(CLI::IsMember({"predicate", "spec", "shutdown"}));
  verify->add_option("--dot", dot_path, "DOT graph of the largest case");
  verify->add_option("--counterexample", cex_path, "trace of the first failing case");
  verify->add_option("--node-cap", node_cap);
  verify->add_option("--threads", threads);

  auto* compose_cmd = app.add_subcommand("compose", "Direct composition of two shutdown protocols");
  compose_cmd->add_option("first", file)->required();
  compose_cmd->add_option("second", file2)->required();
  compose_cmd->add_option("-o", out_path)->required();
  compose_cmd->add_flag("--strict-paper-rule2", strict, "inner request acts on the partner's second component");
  compose_cmd->add_flag("--no-relabel", no_relabel);

  auto* spec_compose = app.add_subcommand("spec-compose", "Relational composition of two specs");
  spec_compose->add_option("first", spec_ref)->required();
  spec_compose->add_option("second", spec_ref2)->required();
  spec_compose->add_option("-o", out_path)->required();

  auto* graph = app.add_subcommand("graph", "Export the reachability graph");
  graph->add_option("file", file)->required();
  graph->add_option("--n", n)->required();
  graph->add_option("--max-requests", max_requests);
  graph->add_option("--dot", dot_path)->required();

  args = expand_builtins(args);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kPass : kUsage;
  }

  try {
    if (validate->parsed()) {
      try {
        auto p = load_protocol(file);
        out << "OK " << p.name() << ": " << p.num_states() << " states, " << p.transitions().size()
            << " transitions, mode=" << to_string(p.mode()) << "\n";
        return kPass;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Io) throw;
        err << "invalid: " << e.what() << "\n";
        return kFail;
      }
    }

    if (simulate->parsed()) {
      auto p = load_protocol(file);
      RunOptions opts;
      opts.max_steps = max_steps;
      opts.seed = seed;
      opts.removal_delay = removal_delay;
      auto trace = run(p, uniform_configuration(start_state(p, input_state), n),
                       script.empty() ? RequestScript{} : parse_request_script(script), opts);
      const auto& final = trace.final_configuration();
      out << "steps " << trace.length() << "\n";
      out << "final " << format_configuration(p, project(final, p.num_states())) << "\n";
      out << "outputs " << output_counts(p, final) << "\n";
      out << "stabilization "
          << (trace.stabilization_index ? std::to_string(*trace.stabilization_index) : std::string("none")) << "\n";
      out << "deadlocked " << (trace.deadlocked ? "yes" : "no") << "\n";
      if (!trace_path.empty()) write_file(trace_path, emit_trace(p, trace));
      return kPass;
    }

    if (verify->parsed()) {
      auto p = load_protocol(file);
      auto spec = load_spec(spec_ref);
      if (mode.empty()) {
        const auto* s = std::get_if<Spec>(&spec);
        auto outs = s ? std::set<std::string>(s->outputs.begin(), s->outputs.end()) : std::set<std::string>{};
        if (p.has_shutdown() && max_requests > 0) mode = "shutdown";
        else if (!p.has_shutdown() && outs == std::set<std::string>{"true", "false"}) mode = "predicate";
        else mode = "spec";
      }
      VerifyOptions opts{max_n, min_n, max_requests, node_cap, threads};
      VerificationReport report;
      if (mode == "predicate") {
        const auto* s = std::get_if<Spec>(&spec);
        if (!s) throw Error(ErrorCode::SyntaxError, "predicate mode needs a plain predicate spec");
        report = check_computes_predicate(p, *s, opts);
      } else if (mode == "spec") {
        report = check_implements_spec(p, spec, opts);
      } else {
        report = check_implements_spec_with_shutdown(p, spec, opts);
      }
      print_report(report, out);
      if (const auto* failure = report.first_failure(); failure && failure->counterexample) {
        auto text = emit_trace(p, *failure->counterexample);
        if (!cex_path.empty()) write_file(cex_path, text);
        out << "counterexample (n=" << failure->population << " R=" << failure->requests << "):\n" << text;
      }
      if (!dot_path.empty()) {
        auto r = mode == "shutdown" ? max_requests : 0;
        write_file(dot_path, to_dot(build_graph(p, {max_n, r, true, node_cap})));
      }
      return report.passed() ? kPass : kFail;
    }

    if (compose_cmd->parsed()) {
      PipelineOptions opts;
      opts.compose.strict_paper_rule2 = strict;
      opts.relabel = !no_relabel;
      auto composed = compose_protocols(load_protocol(file), load_protocol(file2), opts);
      write_file(out_path, emit_protocol(composed));
      out << "composed " << composed.name() << ": " << composed.num_states() << " states, "
          << composed.transitions().size() << " transitions -> " << out_path << "\n";
      return kPass;
    }

    if (spec_compose->parsed()) {
      auto a = load_spec(spec_ref);
      auto b = load_spec(spec_ref2);
      if (!std::holds_alternative<Spec>(a) || !std::holds_alternative<Spec>(b))
        throw Error(ErrorCode::SyntaxError, "spec-compose takes two plain specs");
      AnySpec cs = make_composed(std::get<Spec>(a), std::get<Spec>(b));
      write_file(out_path, emit_spec(cs));
      out << "composed spec " << spec_name(cs) << " -> " << out_path << "\n";
      return kPass;
    }

    if (graph->parsed()) {
      auto p = load_protocol(file);
      auto g = build_graph(p, {n, p.has_shutdown() ? max_requests : 0, true, node_cap});
      write_file(dot_path, to_dot(g));
      out << "graph: " << g.size() << " nodes, " << g.edge_count() << " edges, " << g.bottom_sccs().size()
          << " bottom SCCs -> " << dot_path << "\n";
      return kPass;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Explosion ? kExplosion : kUsage;
  }
  return kUsage;
}

}  // namespace popproto::cli
