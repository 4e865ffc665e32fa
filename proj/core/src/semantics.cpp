#include "popproto/semantics.hpp"

#include <algorithm>
#include <charconv>
#include <random>
#include <string>

namespace popproto {

std::string_view to_string(StepKind kind) noexcept {
  switch (kind) {
    case StepKind::Protocol: return "PROTOCOL";
    case StepKind::Request: return "REQUEST";
    case StepKind::Remove: return "REMOVE";
  }
  return "?";
}

namespace {

std::uint64_t parse_uint(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorCode::BadScript, "bad " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

StateIdx state_of(const AgentConfiguration& c, AgentId a) {
  auto it = c.find(a);
  if (it == c.end()) throw Error(ErrorCode::UnknownAgent, "agent " + std::to_string(a) + " not in configuration");
  return it->second;
}

}  // namespace

RequestScript parse_request_script(std::string_view text) {
  RequestScript script;
  while (!text.empty()) {
    auto comma = text.find(',');
    auto item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view() : text.substr(comma + 1);
    auto colon = item.find(':');
    if (colon == std::string_view::npos)
      throw Error(ErrorCode::BadScript, "expected <step>:<agent|any>, got '" + std::string(item) + "'");
    ScriptedRequest r;
    r.after_step = parse_uint(item.substr(0, colon), "step");
    auto target = item.substr(colon + 1);
    if (target != "any") r.target = static_cast<AgentId>(parse_uint(target, "agent"));
    if (!script.empty() && script.back().after_step > r.after_step)
      throw Error(ErrorCode::BadScript, "request steps must be non-decreasing");
    script.push_back(r);
  }
  return script;
}

AgentConfiguration apply_protocol_step(const AgentConfiguration& c, AgentId a1, AgentId a2, const Transition& t) {
  if (a1 == a2) throw Error(ErrorCode::SameAgent, "agent " + std::to_string(a1) + " cannot interact with itself");
  if (state_of(c, a1) != t.first || state_of(c, a2) != t.second)
    throw Error(ErrorCode::StateMismatch,
                "agents " + std::to_string(a1) + "," + std::to_string(a2) + " do not match the transition's left pair");
  auto next = c;
  next[a1] = t.first_next;
  next[a2] = t.second_next;
  return next;
}

AgentConfiguration apply_request(const AgentConfiguration& c, AgentId a, const Protocol& p) {
  if (!p.has_shutdown()) throw Error(ErrorCode::PlainModeNoRequests, "protocol " + p.name() + " is plain");
  auto next = c;
  next[a] = p.shutdown(state_of(c, a));
  return next;
}

AgentConfiguration apply_removal(const AgentConfiguration& c, AgentId a, const Protocol& p) {
  if (!p.has_shutdown()) throw Error(ErrorCode::PlainModeNoRemoval, "protocol " + p.name() + " is plain");
  if (state_of(c, a) != p.bot())
    throw Error(ErrorCode::NotInBot, "agent " + std::to_string(a) + " is not in the shutdown state");
  auto next = c;
  next.erase(a);
  return next;
}

std::vector<Transition> enabled_protocol_steps(const Configuration& c, const Protocol& p) {
  std::vector<Transition> out;
  auto support = c.support();
  for (auto a : support) {
    for (auto b : support) {
      if (a == b && c.count(a) < 2) continue;
      for (const auto& [a2, b2] : p.successors(a, b)) out.push_back({a, b, a2, b2});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

AgentConfiguration uniform_configuration(StateIdx q, std::uint32_t n) {
  AgentConfiguration c;
  for (AgentId a = 1; a <= n; ++a) c[a] = q;
  return c;
}

namespace {

class Simulator {
 public:
  Simulator(const Protocol& p, const AgentConfiguration& init, const RequestScript& script, const RunOptions& opt)
      : p_(p), script_(script), opt_(opt), rng_(opt.seed) {
    trace_.initial = init;
    current_ = init;
    for (const auto& [a, q] : init) {
      if (!opt.allow_non_input_start && !p.is_input(q))
        throw Error(ErrorCode::StateMismatch, "agent " + std::to_string(a) + " starts in non-input state " + p.state_name(q));
    }
    for (const auto& r : script) {
      if (r.target && !init.contains(*r.target))
        throw Error(ErrorCode::BadScript, "request targets unknown agent " + std::to_string(*r.target));
    }
    if (!script.empty() && !p.has_shutdown())
      throw Error(ErrorCode::PlainModeNoRequests, "request script given for plain protocol " + p.name());
    if (p.has_shutdown())
      for (const auto& [a, q] : init)
        if (q == p.bot()) bot_since_[a] = 0;
  }

  Trace run() {
    while (step_count() < opt_.max_steps) {
      if (next_request_ < script_.size() && script_[next_request_].after_step <= step_count()) {
        request(script_[next_request_++]);
        continue;
      }
      if (auto a = due_removal(false)) {
        remove(*a);
        continue;
      }
      if (protocol_step()) continue;
      if (auto a = due_removal(true)) {
        remove(*a);
        continue;
      }
      if (next_request_ < script_.size()) {
        // Nothing else can happen before the scheduled time: fast-forward.
        request(script_[next_request_++]);
        continue;
      }
      trace_.deadlocked = true;
      break;
    }
    trace_.stabilization_index = detect_stabilization(trace_, p_, opt_.stabilization_window);
    return std::move(trace_);
  }

 private:
  std::uint64_t step_count() const { return trace_.steps.size(); }

  void record(const Step& step) {
    trace_.steps.push_back({step, current_});
  }

  void request(const ScriptedRequest& r) {
    AgentId target;
    if (r.target) {
      if (!current_.contains(*r.target))
        throw Error(ErrorCode::BadScript, "request targets agent " + std::to_string(*r.target) + " after its removal");
      target = *r.target;
    } else {
      if (current_.empty()) return;
      std::uniform_int_distribution<std::size_t> pick(0, current_.size() - 1);
      target = std::next(current_.begin(), static_cast<std::ptrdiff_t>(pick(rng_)))->first;
    }
    current_ = apply_request(current_, target, p_);
    track_bot(target);
    record({StepKind::Request, target, 0, {}});
  }

  void remove(AgentId a) {
    current_ = apply_removal(current_, a, p_);
    bot_since_.erase(a);
    record({StepKind::Remove, a, 0, {}});
  }

  void track_bot(AgentId a) {
    if (!p_.has_shutdown()) return;
    if (current_.at(a) == p_.bot()) {
      bot_since_.try_emplace(a, step_count() + 1);
    } else {
      bot_since_.erase(a);
    }
  }

  std::optional<AgentId> due_removal(bool force) const {
    for (const auto& [a, since] : bot_since_) {
      if (force || step_count() + 1 >= since + std::max<std::uint32_t>(opt_.removal_delay, 1)) return a;
    }
    return std::nullopt;
  }

  bool protocol_step() {
    // Weight each (left pair, right pair) by the number of ordered agent pairs
    // that realize it; this is uniform over agent-level steps.
    Configuration c = project(current_, p_.num_states());
    auto support = c.support();
    struct Candidate {
      Transition t;
      std::uint64_t weight;
    };
    std::vector<Candidate> candidates;
    std::uint64_t total = 0;
    for (auto a : support) {
      for (auto b : support) {
        std::uint64_t w = std::uint64_t(c.count(a)) * (c.count(b) - (a == b ? 1 : 0));
        if (w == 0) continue;
        for (const auto& [a2, b2] : p_.successors(a, b)) {
          Transition t{a, b, a2, b2};
          if (t.is_silent()) continue;
          candidates.push_back({t, w});
          total += w;
        }
      }
    }
    if (total == 0) return false;
    std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
    auto r = pick(rng_);
    std::size_t i = 0;
    while (r >= candidates[i].weight) r -= candidates[i++].weight;
    const auto& t = candidates[i].t;

    auto a1 = random_agent_in(t.first, std::nullopt);
    auto a2 = random_agent_in(t.second, a1);
    current_ = apply_protocol_step(current_, a1, a2, t);
    track_bot(a1);
    track_bot(a2);
    record({StepKind::Protocol, a1, a2, t});
    return true;
  }

  AgentId random_agent_in(StateIdx q, std::optional<AgentId> exclude) {
    std::vector<AgentId> agents;
    for (const auto& [a, s] : current_)
      if (s == q && a != exclude) agents.push_back(a);
    std::uniform_int_distribution<std::size_t> pick(0, agents.size() - 1);
    return agents[pick(rng_)];
  }

  const Protocol& p_;
  const RequestScript& script_;
  const RunOptions& opt_;
  std::mt19937_64 rng_;
  Trace trace_;
  AgentConfiguration current_;
  std::size_t next_request_ = 0;
  // Step number (1-based, 0 = initial) at which each agent entered the shutdown state.
  std::map<AgentId, std::uint64_t> bot_since_;
};

}  // namespace

Trace run(const Protocol& p, const AgentConfiguration& init, const RequestScript& script, const RunOptions& options) {
  return Simulator(p, init, script, options).run();
}

std::optional<std::size_t> detect_stabilization(const Trace& trace, const Protocol& p, std::size_t window) {
  const auto& last = trace.final_configuration();
  std::size_t n0 = trace.length();
  while (n0 > 0) {
    const auto& prev = trace.configuration(n0 - 1);
    bool same = std::all_of(last.begin(), last.end(), [&](const auto& entry) {
      auto it = prev.find(entry.first);
      return it != prev.end() && p.output(it->second) == p.output(entry.second);
    });
    if (!same) break;
    --n0;
  }
  if (trace.deadlocked || trace.length() - n0 >= window) return n0;
  return std::nullopt;
}

void replay(const Protocol& p, const Trace& trace) {
  AgentConfiguration c = trace.initial;
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const auto& [step, after] = trace.steps[k];
    try {
      switch (step.kind) {
        case StepKind::Protocol: {
          auto succ = p.successors(step.transition.first, step.transition.second);
          auto rhs = std::make_pair(step.transition.first_next, step.transition.second_next);
          if (std::find(succ.begin(), succ.end(), rhs) == succ.end())
            throw Error(ErrorCode::StateMismatch, "transition is not in the protocol");
          c = apply_protocol_step(c, step.agent1, step.agent2, step.transition);
          break;
        }
        case StepKind::Request: c = apply_request(c, step.agent1, p); break;
        case StepKind::Remove: c = apply_removal(c, step.agent1, p); break;
      }
    } catch (const Error& e) {
      throw Error(ErrorCode::StateMismatch, "trace step " + std::to_string(k + 1) + ": " + e.what());
    }
    if (c != after)
      throw Error(ErrorCode::StateMismatch,
                  "trace step " + std::to_string(k + 1) + ": recorded configuration does not follow from the step");
  }
}

}  // namespace popproto
