#include "popproto/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace popproto {

std::string_view to_string(EdgeKind kind) noexcept {
  switch (kind) {
    case EdgeKind::Protocol: return "PROTOCOL";
    case EdgeKind::Request: return "REQUEST";
    case EdgeKind::Remove: return "REMOVE";
  }
  return "?";
}

std::string_view to_string(CheckKind kind) noexcept {
  switch (kind) {
    case CheckKind::Predicate: return "predicate";
    case CheckKind::Spec: return "spec";
    case CheckKind::Shutdown: return "shutdown";
  }
  return "?";
}

std::string_view to_string(Verdict verdict) noexcept { return verdict == Verdict::Pass ? "PASS" : "FAIL"; }

std::uint32_t NodeKey::size() const noexcept {
  std::uint32_t n = 0;
  for (const auto& [c, k] : classes) n += k;
  return n;
}

std::size_t NodeKeyHash::operator()(const NodeKey& k) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ k.requests_used;
  for (const auto& [c, n] : k.classes) {
    h = (h ^ c) * 0x100000001b3ULL;
    h = (h ^ n) * 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h ^ (h >> 29));
}

namespace {

void add_class(NodeKey& key, AugCode c) {
  auto it = std::lower_bound(key.classes.begin(), key.classes.end(), c,
                             [](const auto& entry, AugCode v) { return entry.first < v; });
  if (it != key.classes.end() && it->first == c) ++it->second;
  else key.classes.insert(it, {c, 1});
}

void remove_class(NodeKey& key, AugCode c) {
  auto it = std::lower_bound(key.classes.begin(), key.classes.end(), c,
                             [](const auto& entry, AugCode v) { return entry.first < v; });
  if (--it->second == 0) key.classes.erase(it);
}

bool next_composition(std::vector<std::uint32_t>& parts) {
  auto n = parts.size();
  if (n <= 1) return false;
  std::size_t i = n - 1;
  while (i > 0 && parts[i - 1] == 0) --i;
  if (i == 0) return false;
  --i;
  std::uint32_t tail = parts[n - 1];
  parts[n - 1] = 0;
  parts[i] -= 1;
  parts[i + 1] += 1 + tail;
  return true;
}

}  // namespace

ReachGraph::ReachGraph(const Protocol& p, const GraphOptions& options) : aug_(p), options_(options) {
  if (!p.has_shutdown()) options_.max_requests = 0;
}

std::optional<std::uint32_t> ReachGraph::find(const NodeKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ReachGraph::edge_count() const noexcept {
  std::size_t n = 0;
  for (const auto& e : edges_) n += e.size();
  return n;
}

std::uint32_t ReachGraph::intern(NodeKey&& key, std::uint32_t parent) {
  auto [it, inserted] = index_.try_emplace(std::move(key), static_cast<std::uint32_t>(keys_.size()));
  if (inserted) {
    if (keys_.size() >= options_.node_cap)
      throw Error(ErrorCode::Explosion, "state space exceeds " + std::to_string(options_.node_cap) + " nodes (reached " +
                                            std::to_string(keys_.size()) + ")");
    keys_.push_back(&it->first);
    edges_.emplace_back();
    parent_.push_back(parent);
  }
  return it->second;
}

void ReachGraph::expand(const NodeKey& key, const std::function<void(const Move&, NodeKey&&)>& visit) const {
  const auto& base = aug_.base();
  const auto& classes = key.classes;

  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = 0; j < classes.size(); ++j) {
      if (i == j && classes[i].second < 2) continue;
      AugCode c1 = classes[i].first, c2 = classes[j].first;
      StateIdx q1 = aug_.current(c1), q2 = aug_.current(c2);
      for (const auto& [n1, n2] : base.successors(q1, q2)) {
        Transition t{q1, q2, n1, n2};
        if (t.is_silent()) continue;
        NodeKey next = key;
        remove_class(next, c1);
        remove_class(next, c2);
        add_class(next, aug_.with_current(c1, n1));
        add_class(next, aug_.with_current(c2, n2));
        visit(Move{EdgeKind::Protocol, c1, c2, t}, std::move(next));
      }
    }
  }

  if (!base.has_shutdown()) return;

  if (key.requests_used < options_.max_requests) {
    for (const auto& [c, k] : classes) {
      AugCode requested = options_.track_inputs ? aug_.request(c) : aug_.with_current(c, base.shutdown(aug_.current(c)));
      NodeKey next = key;
      remove_class(next, c);
      add_class(next, requested);
      ++next.requests_used;
      visit(Move{EdgeKind::Request, c, 0, {}}, std::move(next));
    }
  }

  for (const auto& [c, k] : classes) {
    if (aug_.current(c) != base.bot()) continue;
    NodeKey next = key;
    remove_class(next, c);
    visit(Move{EdgeKind::Remove, c, 0, {}}, std::move(next));
  }
}

ReachGraph build_graph(const Protocol& p, const GraphOptions& options) {
  if (options.population < 1) throw Error(ErrorCode::DomainMismatch, "population size must be at least 1");
  ReachGraph g(p, options);
  const auto& aug = g.aug_;

  std::vector<StateIdx> inputs;
  for (auto q : p.inputs())
    if (!p.has_shutdown() || q != p.bot()) inputs.push_back(q);

  if (!inputs.empty()) {
    std::vector<std::uint32_t> parts(inputs.size(), 0);
    parts[0] = options.population;
    do {
      NodeKey root;
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (parts[i] == 0) continue;
        AugCode c = options.track_inputs ? aug.initial(inputs[i])
                                         : aug.encode({aug.marker_slot(), inputs[i], false});
        root.classes.emplace_back(c, parts[i]);
      }
      std::sort(root.classes.begin(), root.classes.end());
      auto id = g.intern(std::move(root), std::numeric_limits<std::uint32_t>::max());
      if (g.roots_.empty() || g.roots_.back() < id) g.roots_.push_back(id);
    } while (next_composition(parts));
  }

  for (std::uint32_t v = 0; v < g.keys_.size(); ++v) {
    std::vector<Edge> out;
    g.expand(*g.keys_[v], [&](const Move& m, NodeKey&& next) {
      Edge e;
      e.kind = m.kind;
      if (m.kind == EdgeKind::Protocol) {
        const auto& t = m.transition;
        e.output_changing = p.output(t.first) != p.output(t.first_next) || p.output(t.second) != p.output(t.second_next);
      } else if (m.kind == EdgeKind::Remove) {
        e.unrequested_removal = options.track_inputs && !aug.requested(m.first);
      }
      e.target = g.intern(std::move(next), v);
      out.push_back(e);
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    g.edges_[v] = std::move(out);
  }
  return g;
}

Digraph ReachGraph::adjacency() const {
  Digraph adj(size());
  for (std::uint32_t v = 0; v < size(); ++v) {
    for (const auto& e : edges_[v])
      if (adj[v].empty() || adj[v].back() != e.target) adj[v].push_back(e.target);
  }
  return adj;
}

std::vector<std::vector<std::uint32_t>> ReachGraph::bottom_sccs() const { return popproto::bottom_sccs(adjacency()); }

std::vector<std::uint32_t> ReachGraph::path_to(std::uint32_t id) const {
  std::vector<std::uint32_t> path;
  for (auto v = id; v != std::numeric_limits<std::uint32_t>::max(); v = parent_.at(v)) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

Trace ReachGraph::trace_to(std::uint32_t id, const std::optional<Move>& last) const {
  auto path = path_to(id);
  Trace trace;
  std::map<AgentId, AugCode> agent_class;
  AgentId next_agent = 1;
  for (const auto& [c, k] : node(path.front()).classes) {
    for (std::uint32_t i = 0; i < k; ++i) {
      agent_class[next_agent] = c;
      trace.initial[next_agent] = aug_.current(c);
      ++next_agent;
    }
  }

  auto agent_in = [&](AugCode c, std::optional<AgentId> exclude) {
    for (const auto& [a, cls] : agent_class)
      if (cls == c && a != exclude) return a;
    throw Error(ErrorCode::StateMismatch, "no agent in class " + aug_.state_name(c));
  };

  AgentConfiguration current = trace.initial;
  const auto& base = aug_.base();
  auto apply = [&](const Move& m) {
    Step step;
    switch (m.kind) {
      case EdgeKind::Protocol: {
        auto a1 = agent_in(m.first, std::nullopt);
        auto a2 = agent_in(m.second, a1);
        current = apply_protocol_step(current, a1, a2, m.transition);
        agent_class[a1] = aug_.with_current(m.first, m.transition.first_next);
        agent_class[a2] = aug_.with_current(m.second, m.transition.second_next);
        step = {StepKind::Protocol, a1, a2, m.transition};
        break;
      }
      case EdgeKind::Request: {
        auto a = agent_in(m.first, std::nullopt);
        current = apply_request(current, a, base);
        agent_class[a] =
            options_.track_inputs ? aug_.request(m.first) : aug_.with_current(m.first, base.shutdown(aug_.current(m.first)));
        step = {StepKind::Request, a, 0, {}};
        break;
      }
      case EdgeKind::Remove: {
        auto a = agent_in(m.first, std::nullopt);
        current = apply_removal(current, a, base);
        agent_class.erase(a);
        step = {StepKind::Remove, a, 0, {}};
        break;
      }
    }
    trace.steps.push_back({step, current});
  };

  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto& target = node(path[i]);
    std::optional<Move> chosen;
    expand(node(path[i - 1]), [&](const Move& m, NodeKey&& next) {
      if (!chosen && next == target) chosen = m;
    });
    if (!chosen) throw Error(ErrorCode::StateMismatch, "graph path has no matching move");
    apply(*chosen);
  }
  if (last) apply(*last);
  return trace;
}

Configuration ReachGraph::project(std::uint32_t id) const {
  Configuration c(aug_.base().num_states());
  for (const auto& [cls, k] : node(id).classes) c.add(aug_.current(cls), k);
  return c;
}

std::string ReachGraph::label(std::uint32_t id) const {
  std::ostringstream os;
  const auto& key = node(id);
  os << '{';
  bool first = true;
  for (const auto& [c, k] : key.classes) {
    if (!first) os << ", ";
    first = false;
    if (options_.track_inputs) os << aug_.state_name(c);
    else os << aug_.base().state_name(aug_.current(c));
    os << ':' << k;
  }
  os << '}';
  if (options_.max_requests > 0) os << " r=" << key.requests_used;
  return os.str();
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const ReachGraph& g) {
  std::vector<bool> in_bottom(g.size(), false);
  for (const auto& b : g.bottom_sccs())
    for (auto v : b) in_bottom[v] = true;
  std::vector<bool> is_root(g.size(), false);
  for (auto r : g.roots()) is_root[r] = true;

  std::ostringstream os;
  os << "digraph \"" << dot_escape(g.protocol().base().name()) << "\" {\n";
  os << "  rankdir=LR;\n";
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    os << "  n" << v << " [label=\"" << dot_escape(g.label(v)) << "\", shape="
       << (in_bottom[v] ? "doublecircle" : "circle");
    if (is_root[v]) os << ", style=bold";
    os << "];\n";
  }
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    EdgeKind last_kind{};
    std::uint32_t last_target = std::numeric_limits<std::uint32_t>::max();
    for (const auto& e : g.edges(v)) {
      if (e.target == last_target && e.kind == last_kind) continue;
      last_target = e.target;
      last_kind = e.kind;
      os << "  n" << v << " -> n" << e.target << " [label=\"" << to_string(e.kind) << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

bool VerificationReport::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.verdict == Verdict::Pass; });
}

const CaseResult* VerificationReport::first_failure() const {
  for (const auto& c : cases)
    if (c.verdict == Verdict::Fail) return &c;
  return nullptr;
}

namespace {

struct Failure {
  std::string reason;
  std::uint32_t node;
  std::optional<Move> last;
};

// Survivor pairs (initial input, output) of a node.
PairMultiset node_pairs(const ReachGraph& g, std::uint32_t v) {
  PairMultiset m;
  const auto& aug = g.protocol();
  for (const auto& [c, k] : g.node(v).classes) m.add(aug.initial_name(c), aug.output(c), k);
  return m;
}

bool within_alphabets(const PairMultiset& m, const AnySpec& spec, std::string& why) {
  const auto& ins = spec_inputs(spec);
  const auto& outs = spec_outputs(spec);
  for (const auto& [key, k] : m.counts()) {
    if (std::find(ins.begin(), ins.end(), key.first) == ins.end()) {
      why = "initial state " + key.first + " is not an input of the specification";
      return false;
    }
    if (std::find(outs.begin(), outs.end(), key.second) == outs.end()) {
      why = "output " + key.second + " is not in the specification's output alphabet";
      return false;
    }
  }
  return true;
}

std::optional<Move> find_move(const ReachGraph& g, std::uint32_t from, std::uint32_t to, EdgeKind kind,
                              bool want_output_change) {
  std::optional<Move> found;
  const auto& base = g.protocol().base();
  const auto& target = g.node(to);
  g.expand(g.node(from), [&](const Move& m, NodeKey&& next) {
    if (found || m.kind != kind || !(next == target)) return;
    if (want_output_change) {
      const auto& t = m.transition;
      if (base.output(t.first) == base.output(t.first_next) && base.output(t.second) == base.output(t.second_next)) return;
    }
    found = m;
  });
  return found;
}

std::optional<Failure> frozen_violation(const ReachGraph& g, const std::vector<std::uint32_t>& component,
                                        const std::vector<std::int64_t>& component_of, std::int64_t id) {
  for (auto v : component) {
    for (const auto& e : g.edges(v)) {
      if (e.kind == EdgeKind::Protocol && e.output_changing && component_of[e.target] == id) {
        return Failure{"an agent's output keeps changing inside bottom SCC " + g.label(v), v,
                       find_move(g, v, e.target, EdgeKind::Protocol, true)};
      }
    }
  }
  return std::nullopt;
}

std::optional<Failure> check_predicate_bscc(const ReachGraph& g, const std::vector<std::uint32_t>& b, const Spec& pred) {
  const auto& aug = g.protocol();
  std::map<std::string, std::uint32_t> inputs;
  for (const auto& [c, k] : g.node(b.front()).classes) inputs[aug.initial_name(c)] += k;
  const std::string expected = eval_predicate(pred, inputs) ? "true" : "false";
  for (auto v : b) {
    for (const auto& [c, k] : g.node(v).classes) {
      if (aug.output(c) != expected)
        return Failure{"bottom SCC contains " + g.label(v) + ", which is not a stable " + expected + "-consensus", v,
                       std::nullopt};
    }
  }
  return std::nullopt;
}

std::optional<Failure> check_spec_bscc(const ReachGraph& g, const std::vector<std::uint32_t>& b, const AnySpec& spec,
                                       const std::vector<std::int64_t>& component_of, std::int64_t id) {
  if (auto f = frozen_violation(g, b, component_of, id)) return f;
  auto pairs = node_pairs(g, b.front());
  std::string why;
  if (!within_alphabets(pairs, spec, why)) return Failure{why + " in " + g.label(b.front()), b.front(), std::nullopt};
  if (!evaluate(spec, pairs))
    return Failure{"final pairs " + format_pairs(pairs) + " violate " + spec_name(spec), b.front(), std::nullopt};
  return std::nullopt;
}

std::optional<Failure> check_shutdown_bscc(const ReachGraph& g, const std::vector<std::uint32_t>& b,
                                           const AnySpec& spec, const std::vector<std::int64_t>& component_of,
                                           std::int64_t id) {
  const auto& aug = g.protocol();
  const auto& classes = g.node(b.front()).classes;
  bool extinction = std::all_of(classes.begin(), classes.end(), [&](const auto& e) { return aug.requested(e.first); });
  if (extinction) return std::nullopt;

  auto bot = aug.base().bot();
  for (auto v : b) {
    for (const auto& [c, k] : g.node(v).classes) {
      if (aug.current(c) == bot)
        return Failure{"an agent stays in the shutdown state in bottom SCC " + g.label(v), v, std::nullopt};
    }
  }
  for (auto v : b) {
    for (const auto& [c, k] : g.node(v).classes) {
      if (aug.requested(c))
        return Failure{"a requested agent never shuts down in bottom SCC " + g.label(v), v, std::nullopt};
    }
  }
  return check_spec_bscc(g, b, spec, component_of, id);
}

}  // namespace

CaseResult check_graph(CheckKind kind, const ReachGraph& g, const AnySpec& spec) {
  CaseResult result;
  result.population = g.options().population;
  result.requests = g.options().max_requests;
  result.nodes = g.size();

  auto bottoms = g.bottom_sccs();
  result.bsccs = bottoms.size();
  std::vector<std::int64_t> component_of(g.size(), -1);
  for (std::size_t i = 0; i < bottoms.size(); ++i)
    for (auto v : bottoms[i]) component_of[v] = static_cast<std::int64_t>(i);

  std::optional<Failure> failure;

  if (kind == CheckKind::Shutdown) {
    for (std::uint32_t v = 0; v < g.size() && !failure; ++v) {
      for (const auto& e : g.edges(v)) {
        if (!e.unrequested_removal) continue;
        failure = Failure{"an agent that never received a shutdown request is removed from " + g.label(v), v,
                          find_move(g, v, e.target, EdgeKind::Remove, false)};
        break;
      }
    }
  }

  for (std::size_t i = 0; i < bottoms.size() && !failure; ++i) {
    auto id = static_cast<std::int64_t>(i);
    switch (kind) {
      case CheckKind::Predicate: failure = check_predicate_bscc(g, bottoms[i], std::get<Spec>(spec)); break;
      case CheckKind::Spec: failure = check_spec_bscc(g, bottoms[i], spec, component_of, id); break;
      case CheckKind::Shutdown: failure = check_shutdown_bscc(g, bottoms[i], spec, component_of, id); break;
    }
  }

  if (failure) {
    result.verdict = Verdict::Fail;
    result.reason = failure->reason;
    result.counterexample = g.trace_to(failure->node, failure->last);
  }
  return result;
}

namespace {

VerificationReport run_cases(CheckKind kind, const Protocol& p, const AnySpec& spec, const VerifyOptions& options,
                             std::uint32_t max_requests) {
  VerificationReport report;
  report.protocol = p.name();
  report.spec = spec_name(spec);
  report.kind = kind;

  struct Job {
    std::uint32_t n, r;
  };
  std::vector<Job> jobs;
  for (auto n = std::max<std::uint32_t>(options.min_population, 1); n <= options.max_population; ++n)
    for (std::uint32_t r = 0; r <= max_requests; ++r) jobs.push_back({n, r});

  report.cases.resize(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        auto start = std::chrono::steady_clock::now();
        auto g = build_graph(p, {jobs[i].n, jobs[i].r, true, options.node_cap});
        auto result = check_graph(kind, g, spec);
        result.elapsed_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        report.cases[i] = std::move(result);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return report;
}

}  // namespace

VerificationReport check_computes_predicate(const Protocol& p, const Spec& predicate, const VerifyOptions& options) {
  if (predicate.formula.uses_pair_atoms())
    throw Error(ErrorCode::UnknownPairAtom, "predicate " + predicate.name + " may only use n(input) and N atoms");
  for (auto q : p.inputs()) {
    if (p.has_shutdown() && q == p.bot()) continue;
    const auto& in = predicate.inputs;
    if (std::find(in.begin(), in.end(), p.state_name(q)) == in.end())
      throw Error(ErrorCode::AlphabetMismatch, "input state " + p.state_name(q) + " not declared by " + predicate.name);
  }
  return run_cases(CheckKind::Predicate, p, predicate, options, 0);
}

VerificationReport check_implements_spec(const Protocol& p, const AnySpec& spec, const VerifyOptions& options) {
  auto report = run_cases(CheckKind::Spec, p, spec, options, 0);
  if (p.has_shutdown()) report.notes.push_back("shutdown protocol checked without requests");
  return report;
}

VerificationReport check_implements_spec_with_shutdown(const Protocol& p, const AnySpec& spec,
                                                       const VerifyOptions& options) {
  if (!p.has_shutdown()) throw Error(ErrorCode::PlainModeNoRequests, "protocol " + p.name() + " has no shutdown requests");
  auto report = run_cases(CheckKind::Shutdown, p, spec, options, options.max_requests);
  report.notes.push_back("bounded check: holds for schedules with at most " + std::to_string(options.max_requests) +
                         " shutdown request(s)");
  return report;
}

}  // namespace popproto
