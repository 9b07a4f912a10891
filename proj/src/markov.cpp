#include "mg/markov.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <stack>
#include <stdexcept>

#include "mg/levels.hpp"

#include "json.hpp"

namespace mg {

namespace {

// Utility levels of a state with per-level +1 action counts on the
// state's current history.
std::vector<ActionLevel> state_levels(const ChainState& s, int memory) {
  const int P = 1 << memory;
  std::map<std::int64_t, ActionLevel, std::greater<>> by_value;
  for (std::size_t id = 0; id < s.utilities.size(); ++id) {
    auto& lv = by_value[s.utilities[id]];
    ++lv.count;
    lv.plus_count += strategy_action_bit(id, P, s.history);
  }
  std::vector<ActionLevel> out;
  out.reserve(by_value.size());
  for (auto& [value, lv] : by_value) out.push_back(lv);
  return out;
}

ChainState step_state(const ChainState& s, int memory, int demand_sign) {
  // Step payoff: R = -a * sgn(A); history gains the minority action.
  const int P = 1 << memory;
  ChainState next;
  next.utilities.resize(s.utilities.size());
  for (std::size_t id = 0; id < s.utilities.size(); ++id) {
    const unsigned bit = strategy_action_bit(id, P, s.history);
    next.utilities[id] = s.utilities[id] + (bit ? -demand_sign : demand_sign);
  }
  const unsigned minority_bit = demand_sign > 0 ? 0u : 1u;
  next.history = shift_history(s.history, memory, minority_bit);
  return next;
}

}  // namespace

Rat state_prob_plus(const ChainState& s, int memory, int S) {
  return prob_action_plus(state_levels(s, memory), S);
}

Rat expected_demand(const ChainState& s, int memory, std::int64_t agents, int S) {
  const Rat coeff = 2 * state_prob_plus(s, memory, S) - 1;
  return coeff * Rat(static_cast<long>(agents));
}

TransitionMatrix enumerate_chain(int m, int S, int max_exact_m,
                                 std::int64_t max_states) {
  if (m < 1) throw std::invalid_argument("memory must be >= 1");
  if (m > max_exact_m)
    throw std::invalid_argument(
        "exact chain enumeration guarded to m <= " + std::to_string(max_exact_m) +
        "; use extract_state_graph on a trace for larger memories");
  if (S < 2) throw std::invalid_argument("S must be >= 2");

  const std::uint64_t space = strategy_space_size(m);
  TransitionMatrix chain;
  chain.memory = m;
  chain.strategies_per_agent = S;

  std::map<ChainState, int> index;

  const auto intern = [&](ChainState&& st) {
    auto [it, fresh] = index.try_emplace(std::move(st), chain.size());
    if (fresh) {
      chain.states.push_back(it->first);
      chain.out.emplace_back();
      chain.demand_coeff.emplace_back();
      if (chain.size() > max_states)
        throw std::runtime_error("chain enumeration exceeded the state guard");
    }
    return it->second;
  };

  for (std::uint32_t h = 0; h < (1u << m); ++h) {
    ChainState init;
    init.history = h;
    init.utilities.assign(space, 0);
    intern(std::move(init));
  }

  for (std::size_t head = 0; head < chain.states.size(); ++head) {
    // states vector grows during the loop; index by position
    const ChainState state = chain.states[head];
    const Rat p_plus = state_prob_plus(state, m, S);
    chain.demand_coeff[head] = 2 * p_plus - 1;
    const Rat half(1, 2);
    const int cmp = p_plus > half ? 1 : (p_plus < half ? -1 : 0);
    if (cmp == 0) {
      const int up = intern(step_state(state, m, +1));
      chain.out[head].emplace_back(up, half);
      const int down = intern(step_state(state, m, -1));
      chain.out[head].emplace_back(down, half);
    } else {
      const int sign = cmp > 0 ? +1 : -1;
      const int nxt = intern(step_state(state, m, sign));
      chain.out[head].emplace_back(nxt, Rat(1));
    }
  }
  return chain;
}

std::vector<std::vector<int>> recurrent_classes(const TransitionMatrix& chain) {
  // Iterative Tarjan SCC.
  const int n = chain.size();
  std::vector<int> idx(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::stack<int> st;
  std::vector<std::vector<int>> sccs;
  int counter = 0;

  struct Frame {
    int v;
    std::size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (idx[root] != -1) continue;
    std::stack<Frame> call;
    call.push({root, 0});
    while (!call.empty()) {
      auto& [v, child] = call.top();
      if (child == 0) {
        idx[v] = low[v] = counter++;
        st.push(v);
        on_stack[v] = 1;
      }
      if (child < chain.out[v].size()) {
        const int w = chain.out[v][child].first;
        ++child;
        if (idx[w] == -1) {
          call.push({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
      } else {
        if (low[v] == idx[v]) {
          sccs.emplace_back();
          int w;
          do {
            w = st.top();
            st.pop();
            on_stack[w] = 0;
            comp[w] = static_cast<int>(sccs.size()) - 1;
            sccs.back().push_back(w);
          } while (w != v);
        }
        const int done = v;
        call.pop();
        if (!call.empty()) {
          const int parent = call.top().v;
          low[parent] = std::min(low[parent], low[done]);
        }
      }
    }
  }

  std::vector<char> leaks(sccs.size(), 0);
  for (int v = 0; v < n; ++v)
    for (const auto& [w, p] : chain.out[v])
      if (comp[w] != comp[v]) leaks[comp[v]] = 1;

  std::vector<std::vector<int>> recurrent;
  for (std::size_t c = 0; c < sccs.size(); ++c)
    if (!leaks[c]) {
      std::sort(sccs[c].begin(), sccs[c].end());
      recurrent.push_back(std::move(sccs[c]));
    }
  return recurrent;
}

namespace {

// rho (Q - I) = 0 with sum rho = 1, dense exact elimination.
std::vector<Rat> solve_stationary_dense(const std::vector<std::vector<Rat>>& Q) {
  const int n = static_cast<int>(Q.size());
  // Unknowns rho_j: equations sum_i rho_i Q[i][j] = rho_j for j < n-1,
  // plus the normalisation row.
  std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n + 1, Rat(0)));
  for (int j = 0; j < n - 1; ++j) {
    for (int i = 0; i < n; ++i) a[j][i] = Q[i][j];
    a[j][j] -= 1;
  }
  for (int i = 0; i < n; ++i) a[n - 1][i] = 1;
  a[n - 1][n] = 1;

  for (int col = 0, row = 0; col < n && row < n; ++col) {
    int pivot = -1;
    for (int r = row; r < n; ++r)
      if (a[r][col] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(a[row], a[pivot]);
    const Rat inv = a[row][col];
    for (int c = col; c <= n; ++c) a[row][c] /= inv;
    for (int r = 0; r < n; ++r) {
      if (r == row || a[r][col] == 0) continue;
      const Rat f = a[r][col];
      for (int c = col; c <= n; ++c) a[r][c] -= f * a[row][c];
    }
    ++row;
  }
  std::vector<Rat> rho(n, Rat(0));
  for (int r = 0; r < n; ++r) {
    int lead = -1;
    for (int c = 0; c < n; ++c)
      if (a[r][c] != 0) {
        lead = c;
        break;
      }
    if (lead >= 0) rho[lead] = a[r][n];
  }
  return rho;
}

}  // namespace

StationaryDistribution stationary(const TransitionMatrix& chain) {
  const auto classes = recurrent_classes(chain);
  if (classes.empty())
    throw std::runtime_error("no recurrent class found");
  if (classes.size() > 1) {
    std::ostringstream os;
    os << "chain is reducible with " << classes.size()
       << " recurrent classes (sizes";
    for (const auto& c : classes) os << " " << c.size();
    os << "); no unique stationary distribution";
    throw std::runtime_error(os.str());
  }

  const auto& rec = classes.front();
  std::vector<char> in_rec(chain.size(), 0);
  for (int v : rec) in_rec[v] = 1;

  StationaryDistribution dist;
  dist.recurrent = rec;
  dist.pi.assign(chain.size(), Rat(0));

  // Branch states (out-degree >= 2) anchor the reduction; the states
  // between them sit on deterministic corridors.
  std::vector<int> branchers;
  for (int v : rec)
    if (chain.out[v].size() >= 2) branchers.push_back(v);

  if (branchers.empty()) {
    // single deterministic cycle
    const Rat share(1, static_cast<long>(rec.size()));
    for (int v : rec) dist.pi[v] = share;
    return dist;
  }

  std::vector<int> brancher_index(chain.size(), -1);
  for (std::size_t i = 0; i < branchers.size(); ++i)
    brancher_index[branchers[i]] = static_cast<int>(i);

  const int B = static_cast<int>(branchers.size());
  std::vector<std::vector<Rat>> Q(B, std::vector<Rat>(B, Rat(0)));
  // corridor[b][e]: states strictly between brancher b (edge e) and
  // the next brancher.
  std::vector<std::vector<std::vector<int>>> corridor(B);

  for (int bi = 0; bi < B; ++bi) {
    const int b = branchers[bi];
    corridor[bi].resize(chain.out[b].size());
    for (std::size_t e = 0; e < chain.out[b].size(); ++e) {
      int cur = chain.out[b][e].first;
      auto& path = corridor[bi][e];
      while (brancher_index[cur] < 0) {
        path.push_back(cur);
        if (chain.out[cur].size() != 1)
          throw std::runtime_error("corridor state without unique successor");
        cur = chain.out[cur][0].first;
      }
      Q[bi][brancher_index[cur]] += chain.out[b][e].second;
    }
  }

  const std::vector<Rat> rho = solve_stationary_dense(Q);

  // Expand branch rates into per-state visit rates and normalise.
  Rat total(0);
  for (int bi = 0; bi < B; ++bi) {
    dist.pi[branchers[bi]] = rho[bi];
    total += rho[bi];
    for (std::size_t e = 0; e < corridor[bi].size(); ++e) {
      const Rat flow = rho[bi] * chain.out[branchers[bi]][e].second;
      for (int v : corridor[bi][e]) {
        dist.pi[v] += flow;
        total += flow;
      }
    }
  }
  for (int v : rec) dist.pi[v] /= total;
  return dist;
}

Rat period_match_probability(const TransitionMatrix& chain,
                             const StationaryDistribution& dist, int tau) {
  if (tau < 0) throw std::invalid_argument("tau must be >= 0");
  const int n = chain.size();

  // class id per state from the exact demand coefficient
  std::map<Rat, int> class_of_value;
  std::vector<int> cls(n, -1);
  for (int v = 0; v < n; ++v) {
    auto [it, fresh] = class_of_value.try_emplace(chain.demand_coeff[v],
                                                  static_cast<int>(class_of_value.size()));
    cls[v] = it->second;
  }

  Rat result(0);
  for (const auto& [value, c] : class_of_value) {
    std::vector<Rat> v(n, Rat(0));
    for (int i = 0; i < n; ++i)
      if (cls[i] == c) v[i] = 1;
    for (int step = 0; step < tau; ++step) {
      std::vector<Rat> next(n, Rat(0));
      for (int i = 0; i < n; ++i) {
        if (chain.out[i].empty()) continue;
        Rat acc(0);
        for (const auto& [j, p] : chain.out[i]) acc += p * v[j];
        next[i] = acc;
      }
      v.swap(next);
    }
    for (int i : dist.recurrent)
      if (cls[i] == c) result += dist.pi[i] * v[i];
  }
  return result;
}

namespace {

std::vector<std::int64_t> initial_scaled_utilities(const Trace& trace) {
  std::vector<std::int64_t> u(trace.tracked_ids.size(), 0);
  if (trace.config.initial_utilities == InitialUtilities::kPerturbed) {
    for (std::size_t j = 0; j < trace.tracked_ids.size(); ++j)
      u[j] = static_cast<std::int64_t>(trace.tracked_ids[j]);
  } else if (trace.config.initial_utilities == InitialUtilities::kExplicit) {
    for (std::size_t j = 0; j < trace.tracked_ids.size(); ++j) {
      const auto& [num, den] = trace.config.explicit_utilities[trace.tracked_ids[j]];
      u[j] = num * (trace.utility_scale / den);
    }
  }
  return u;
}

}  // namespace

TransitionMatrix extract_state_graph(const Trace& trace) {
  if (!trace.has_utilities)
    throw std::invalid_argument("state extraction needs recorded utilities");
  if (!trace.full_space)
    throw std::invalid_argument("state extraction needs full-space tracking");
  if (trace.steps() < 2) throw std::invalid_argument("trace too short");

  TransitionMatrix chain;
  chain.memory = trace.config.memory;
  chain.strategies_per_agent = trace.config.strategies_per_agent;
  chain.empirical = true;

  std::map<ChainState, int> index;
  const auto intern = [&](ChainState&& st) {
    auto [it, fresh] = index.try_emplace(std::move(st), chain.size());
    if (fresh) {
      chain.states.push_back(it->first);
      chain.out.emplace_back();
      chain.demand_coeff.emplace_back();
      chain.visits.push_back(0);
    }
    return it->second;
  };

  const std::size_t cols = trace.columns();
  std::map<std::pair<int, int>, std::int64_t> edge_count;

  ChainState cur;
  cur.history = trace.history[0];
  cur.utilities = initial_scaled_utilities(trace);
  int cur_idx = intern(std::move(cur));
  ++chain.visits[cur_idx];

  for (std::int64_t t = 0; t + 1 < trace.steps(); ++t) {
    ChainState next;
    next.history = trace.history[t + 1];
    next.utilities.assign(trace.utility_row(t), trace.utility_row(t) + cols);
    const int next_idx = intern(std::move(next));
    ++chain.visits[next_idx];
    ++edge_count[{cur_idx, next_idx}];
    cur_idx = next_idx;
  }

  std::vector<std::int64_t> out_total(chain.size(), 0);
  for (const auto& [edge, count] : edge_count) out_total[edge.first] += count;
  for (const auto& [edge, count] : edge_count)
    chain.out[edge.first].emplace_back(
        edge.second,
        Rat(static_cast<long>(count), static_cast<long>(out_total[edge.first])));
  for (auto& row : chain.out)
    for (auto& [j, p] : row) p.canonicalize();

  for (int v = 0; v < chain.size(); ++v) {
    chain.demand_coeff[v] =
        2 * state_prob_plus(chain.states[v], chain.memory,
                            chain.strategies_per_agent) -
        1;
    if (chain.visits[v] < 10) chain.low_confidence = true;
  }
  return chain;
}

std::vector<int> out_degrees(const TransitionMatrix& chain) {
  std::vector<int> d(chain.size());
  for (int v = 0; v < chain.size(); ++v)
    d[v] = static_cast<int>(chain.out[v].size());
  return d;
}

std::string chain_to_json(const TransitionMatrix& chain,
                          const StationaryDistribution* dist) {
  nlohmann::json j;
  j["memory"] = chain.memory;
  j["strategies_per_agent"] = chain.strategies_per_agent;
  j["empirical"] = chain.empirical;
  if (chain.empirical) j["low_confidence"] = chain.low_confidence;
  j["recurrent_classes"] = recurrent_classes(chain);
  j["states"] = nlohmann::json::array();
  for (int v = 0; v < chain.size(); ++v) {
    nlohmann::json s;
    s["id"] = v;
    s["history"] = chain.states[v].history;
    s["utilities"] = chain.states[v].utilities;
    s["demand_coeff"] = rat_str(chain.demand_coeff[v]);
    if (!chain.visits.empty()) s["visits"] = chain.visits[v];
    if (dist) s["pi"] = rat_str(dist->pi[v]);
    j["states"].push_back(std::move(s));
  }
  j["edges"] = nlohmann::json::array();
  for (int v = 0; v < chain.size(); ++v)
    for (const auto& [w, p] : chain.out[v]) {
      nlohmann::json e;
      e["from"] = v;
      e["to"] = w;
      e["num"] = p.get_num().get_str();
      e["den"] = p.get_den().get_str();
      j["edges"].push_back(std::move(e));
    }
  return j.dump(2);
}

std::string chain_to_dot(const TransitionMatrix& chain) {
  std::ostringstream os;
  os << "digraph chain {\n";
  for (int v = 0; v < chain.size(); ++v)
    os << "  s" << v << " [label=\"s" << v << "\\nh=" << chain.states[v].history
       << "\\nEA=" << rat_str(chain.demand_coeff[v]) << "N\"];\n";
  for (int v = 0; v < chain.size(); ++v)
    for (const auto& [w, p] : chain.out[v])
      os << "  s" << v << " -> s" << w << " [label=\"" << rat_str(p) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace mg
