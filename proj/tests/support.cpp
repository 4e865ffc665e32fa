#include "support.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace popproto::oracle {

std::vector<std::vector<std::uint32_t>> naive_bottom_sccs(const Digraph& g) {
  const auto n = g.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(s)};
    reach[s][s] = true;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (auto w : g[v])
        if (!reach[s][w]) {
          reach[s][w] = true;
          stack.push_back(w);
        }
    }
  }
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<bool> placed(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    if (placed[v]) continue;
    bool bottom = true;
    for (std::size_t w = 0; w < n && bottom; ++w)
      if (reach[v][w] && !reach[w][v]) bottom = false;
    if (!bottom) continue;
    std::vector<std::uint32_t> comp;
    for (std::size_t w = 0; w < n; ++w)
      if (reach[v][w]) {
        comp.push_back(static_cast<std::uint32_t>(w));
        placed[w] = true;
      }
    out.push_back(comp);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Digraph random_digraph(std::mt19937& rng, std::uint32_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double p = unit(rng) * std::min(1.0, 4.0 / std::max<std::uint32_t>(n, 1));
  Digraph g(n);
  for (std::uint32_t v = 0; v < n; ++v)
    for (std::uint32_t w = 0; w < n; ++w)
      if (unit(rng) < p) g[v].push_back(w);
  return g;
}

bool brute_force_composed(const ComposedSpec& cs, const PairMultiset& m) {
  std::vector<std::pair<std::string, std::string>> agents;
  for (const auto& [key, k] : m.counts())
    for (std::uint32_t i = 0; i < k; ++i) agents.push_back(key);
  const auto& middle = cs.first.outputs;
  std::vector<std::string> chosen(agents.size());
  std::function<bool(std::size_t)> go = [&](std::size_t i) {
    if (i == agents.size()) {
      PairMultiset left, right;
      for (std::size_t j = 0; j < agents.size(); ++j) {
        left.add(agents[j].first, chosen[j]);
        right.add(chosen[j], agents[j].second);
      }
      return eval_spec(cs.first, left) && eval_spec(cs.second, right);
    }
    for (const auto& b : middle) {
      chosen[i] = b;
      if (go(i + 1)) return true;
    }
    return false;
  };
  return go(0);
}

std::vector<PairMultiset> all_pair_multisets(const std::vector<std::string>& inputs,
                                             const std::vector<std::string>& outputs, std::uint32_t max_total) {
  std::vector<std::pair<std::string, std::string>> kinds;
  for (const auto& a : inputs)
    for (const auto& c : outputs) kinds.emplace_back(a, c);
  std::vector<PairMultiset> out;
  PairMultiset cur;
  std::function<void(std::size_t, std::uint32_t)> go = [&](std::size_t i, std::uint32_t left) {
    if (i == kinds.size()) {
      out.push_back(cur);
      return;
    }
    PairMultiset saved = cur;
    for (std::uint32_t k = 0; k <= left; ++k) {
      go(i + 1, left - k);
      cur.add(kinds[i].first, kinds[i].second);
    }
    cur = saved;
  };
  go(0, max_total);
  return out;
}

std::vector<std::vector<std::uint32_t>> multisets_over(const std::vector<StateIdx>& states, std::size_t num_states,
                                                       std::uint32_t n) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> counts(num_states, 0);
  std::function<void(std::size_t, std::uint32_t)> go = [&](std::size_t i, std::uint32_t left) {
    if (i + 1 == states.size()) {
      counts[states[i]] = left;
      out.push_back(counts);
      counts[states[i]] = 0;
      return;
    }
    for (std::uint32_t k = 0; k <= left; ++k) {
      counts[states[i]] = k;
      go(i + 1, left - k);
    }
    counts[states[i]] = 0;
  };
  if (!states.empty()) go(0, n);
  return out;
}

std::set<std::vector<std::uint32_t>> reachable_base(const Protocol& p, std::uint32_t n) {
  std::vector<StateIdx> starts;
  for (auto q : p.inputs())
    if (!p.has_shutdown() || q != p.bot()) starts.push_back(q);
  std::set<std::vector<std::uint32_t>> seen;
  std::deque<std::vector<std::uint32_t>> queue;
  for (auto& c : multisets_over(starts, p.num_states(), n))
    if (seen.insert(c).second) queue.push_back(c);
  while (!queue.empty()) {
    auto c = queue.front();
    queue.pop_front();
    for (const auto& t : p.transitions()) {
      auto need_a = 1u + (t.first == t.second ? 1u : 0u);
      if (c[t.first] < need_a || c[t.second] < 1) continue;
      auto next = c;
      --next[t.first];
      --next[t.second];
      ++next[t.first_next];
      ++next[t.second_next];
      if (seen.insert(next).second) queue.push_back(next);
    }
    if (p.has_shutdown() && c[p.bot()] > 0) {
      auto next = c;
      --next[p.bot()];
      if (seen.insert(next).second) queue.push_back(next);
    }
  }
  return seen;
}

NodeKey node_key_of(const AugmentedProtocol& aug, const Trace& trace) {
  const auto& p = aug.base();
  std::set<AgentId> requested;
  std::uint32_t requests = 0;
  for (const auto& entry : trace.steps)
    if (entry.step.kind == StepKind::Request) {
      requested.insert(entry.step.agent1);
      ++requests;
    }
  std::map<AugCode, std::uint32_t> counts;
  for (const auto& [agent, q] : trace.final_configuration()) {
    auto init = trace.initial.at(agent);
    auto slot = static_cast<std::uint32_t>(std::find(p.inputs().begin(), p.inputs().end(), init) - p.inputs().begin());
    ++counts[aug.encode({slot, q, requested.contains(agent)})];
  }
  NodeKey key;
  key.classes.assign(counts.begin(), counts.end());
  key.requests_used = requests;
  return key;
}

Protocol random_protocol(std::mt19937& rng, bool shutdown, std::uint32_t max_states) {
  std::uniform_int_distribution<std::uint32_t> size(1, max_states);
  const auto n = size(rng);
  RawProtocol raw;
  raw.name = "random";
  raw.mode = shutdown ? Mode::Shutdown : Mode::Plain;
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<std::uint32_t> any(0, n - 1);
  const std::vector<std::string> outs{"a", "b", "c"};
  std::uniform_int_distribution<std::size_t> out_pick(0, outs.size() - 1);
  for (std::uint32_t i = 0; i < n; ++i) {
    RawState s{"s" + std::to_string(i), outs[out_pick(rng)], std::nullopt, i == 0 || coin(rng), 0};
    if (shutdown) s.shutdown = i == 0 ? "bot" : "s" + std::to_string(any(rng));
    raw.states.push_back(s);
  }
  if (shutdown) {
    raw.states.push_back({"bot", std::string(kBotOutput), "bot", true, 0});
    raw.bot = "bot";
  }
  // Targets may include the shutdown state; sources never do.
  const std::uint32_t targets = shutdown ? n + 1 : n;
  std::uniform_int_distribution<std::uint32_t> tgt(0, targets - 1);
  auto name = [&](std::uint32_t i) { return i == n ? std::string("bot") : "s" + std::to_string(i); };
  std::uniform_int_distribution<std::uint32_t> count(0, n * n);
  for (std::uint32_t k = count(rng); k > 0; --k)
    raw.transitions.push_back({name(any(rng)), name(any(rng)), name(tgt(rng)), name(tgt(rng)), 0});
  return validate_protocol(raw);
}

namespace {

Protocol edit_transition(const Protocol& p, const std::string& a, const std::string& b, const std::string& a_next,
                         const std::string& b_next, const std::optional<std::pair<std::string, std::string>>& rhs) {
  auto raw = p.to_raw();
  auto it = std::find_if(raw.transitions.begin(), raw.transitions.end(), [&](const RawTransition& t) {
    return t.first == a && t.second == b && t.first_next == a_next && t.second_next == b_next;
  });
  if (it == raw.transitions.end()) throw Error(ErrorCode::UnknownState, "transition not found");
  if (rhs) {
    it->first_next = rhs->first;
    it->second_next = rhs->second;
  } else {
    raw.transitions.erase(it);
  }
  return validate_protocol(raw);
}

}  // namespace

Protocol with_transition_replaced(const Protocol& p, const std::string& a, const std::string& b,
                                  const std::string& a_next, const std::string& b_next) {
  // Right-hand side replaced; the left pair identifies the unique transition.
  auto raw = p.to_raw();
  std::size_t hits = 0;
  for (auto& t : raw.transitions)
    if (t.first == a && t.second == b) {
      t.first_next = a_next;
      t.second_next = b_next;
      ++hits;
    }
  if (hits != 1) throw Error(ErrorCode::UnknownState, "expected exactly one transition from (" + a + ", " + b + ")");
  return validate_protocol(raw);
}

Protocol without_transition(const Protocol& p, const std::string& a, const std::string& b, const std::string& a_next,
                            const std::string& b_next) {
  return edit_transition(p, a, b, a_next, b_next, std::nullopt);
}

}  // namespace popproto::oracle
