#include "racf/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace racf {

MaxFlowGraph::MaxFlowGraph(int nodes, int expected_edges) {
  if (nodes < 0) throw std::invalid_argument("MaxFlowGraph: negative node count");
  nodes_.resize(static_cast<std::size_t>(nodes));
  arcs_.reserve(2 * static_cast<std::size_t>(std::max(expected_edges, 0)));
}

int MaxFlowGraph::add_node() {
  nodes_.emplace_back();
  return node_count() - 1;
}

void MaxFlowGraph::add_tweights(int node, double cap_source, double cap_sink) {
  if (node < 0 || node >= node_count()) throw std::out_of_range("add_tweights: bad node");
  if (!(cap_source >= 0) || !(cap_sink >= 0)) throw std::invalid_argument("add_tweights: capacities must be >= 0");
  double& t = nodes_[node].tr_cap;
  double s = cap_source, k = cap_sink;
  if (t > 0) s += t;
  else k -= t;
  // Both infinite: the node is tied to both terminals and the cut is infinite.
  if (std::isinf(s) && std::isinf(k)) {
    flow_ = kInfinity;
    t = 0.0;
    return;
  }
  flow_ += std::min(s, k);
  t = s - k;
}

void MaxFlowGraph::add_edge(int a, int b, double cap, double rev_cap) {
  if (a < 0 || b < 0 || a >= node_count() || b >= node_count() || a == b) throw std::out_of_range("add_edge: bad nodes");
  if (!(cap >= 0) || !(rev_cap >= 0)) throw std::invalid_argument("add_edge: capacities must be >= 0");
  const int ab = static_cast<int>(arcs_.size());
  arcs_.push_back({b, nodes_[a].first, cap});
  arcs_.push_back({a, nodes_[b].first, rev_cap});
  nodes_[a].first = ab;
  nodes_[b].first = ab + 1;
}

void MaxFlowGraph::activate(int i) {
  if (nodes_[i].active) return;
  nodes_[i].active = true;
  active_.push_back(i);
}

int MaxFlowGraph::next_active() {
  while (active_head_ < active_.size()) {
    const int i = active_[active_head_++];
    nodes_[i].active = false;
    if (nodes_[i].parent != kNone) return i;
  }
  active_.clear();
  active_head_ = 0;
  return -1;
}

void MaxFlowGraph::set_orphan(int i) {
  nodes_[i].parent = kOrphan;
  orphans_.push_back(i);
}

// Grows the tree of node i by one layer; returns an arc from the source tree
// into the sink tree, or -1.
int MaxFlowGraph::grow(int i) {
  Node& n = nodes_[i];
  if (n.tree == kSource) {
    for (int a = n.first; a >= 0; a = arcs_[a].next) {
      if (arcs_[a].r_cap <= 0) continue;
      const int j = arcs_[a].head;
      Node& m = nodes_[j];
      if (m.tree == kFree) {
        m.tree = kSource;
        m.parent = sister(a);
        m.ts = n.ts;
        m.dist = n.dist + 1;
        activate(j);
      } else if (m.tree == kSink) {
        return a;
      } else if (m.ts <= n.ts && m.dist > n.dist) {
        m.parent = sister(a);
        m.ts = n.ts;
        m.dist = n.dist + 1;
      }
    }
  } else {
    for (int a = n.first; a >= 0; a = arcs_[a].next) {
      if (arcs_[sister(a)].r_cap <= 0) continue;
      const int j = arcs_[a].head;
      Node& m = nodes_[j];
      if (m.tree == kFree) {
        m.tree = kSink;
        m.parent = sister(a);
        m.ts = n.ts;
        m.dist = n.dist + 1;
        activate(j);
      } else if (m.tree == kSource) {
        return sister(a);
      } else if (m.ts <= n.ts && m.dist > n.dist) {
        m.parent = sister(a);
        m.ts = n.ts;
        m.dist = n.dist + 1;
      }
    }
  }
  return -1;
}

void MaxFlowGraph::augment(int middle) {
  double bottleneck = arcs_[middle].r_cap;
  const int tail = arcs_[sister(middle)].head;
  const int head = arcs_[middle].head;
  for (int i = tail;;) {
    const int pa = nodes_[i].parent;
    if (pa == kTerminal) {
      bottleneck = std::min(bottleneck, nodes_[i].tr_cap);
      break;
    }
    bottleneck = std::min(bottleneck, arcs_[sister(pa)].r_cap);
    i = arcs_[pa].head;
  }
  for (int i = head;;) {
    const int pa = nodes_[i].parent;
    if (pa == kTerminal) {
      bottleneck = std::min(bottleneck, -nodes_[i].tr_cap);
      break;
    }
    bottleneck = std::min(bottleneck, arcs_[pa].r_cap);
    i = arcs_[pa].head;
  }

  arcs_[sister(middle)].r_cap += bottleneck;
  arcs_[middle].r_cap -= bottleneck;
  for (int i = tail;;) {
    const int pa = nodes_[i].parent;
    if (pa == kTerminal) {
      nodes_[i].tr_cap -= bottleneck;
      if (nodes_[i].tr_cap <= 0) set_orphan(i);
      break;
    }
    arcs_[pa].r_cap += bottleneck;
    arcs_[sister(pa)].r_cap -= bottleneck;
    const int next = arcs_[pa].head;
    if (arcs_[sister(pa)].r_cap <= 0) set_orphan(i);
    i = next;
  }
  for (int i = head;;) {
    const int pa = nodes_[i].parent;
    if (pa == kTerminal) {
      nodes_[i].tr_cap += bottleneck;
      if (nodes_[i].tr_cap >= 0) set_orphan(i);
      break;
    }
    arcs_[sister(pa)].r_cap += bottleneck;
    arcs_[pa].r_cap -= bottleneck;
    const int next = arcs_[pa].head;
    if (arcs_[pa].r_cap <= 0) set_orphan(i);
    i = next;
  }
  flow_ += bottleneck;
}

void MaxFlowGraph::adopt(int i) {
  Node& n = nodes_[i];
  const bool src = n.tree == kSource;
  constexpr int kInfDist = std::numeric_limits<int>::max();
  int best_arc = -1, best_dist = kInfDist;
  for (int a = n.first; a >= 0; a = arcs_[a].next) {
    const double cap = src ? arcs_[sister(a)].r_cap : arcs_[a].r_cap;
    if (cap <= 0) continue;
    const int j = arcs_[a].head;
    if (nodes_[j].tree != n.tree || nodes_[j].parent == kNone) continue;
    // Walk to the root to check the origin is a terminal.
    int d = 0;
    int k = j;
    for (;;) {
      if (nodes_[k].ts == time_) {
        d += nodes_[k].dist;
        break;
      }
      const int pk = nodes_[k].parent;
      ++d;
      if (pk == kTerminal) {
        nodes_[k].ts = time_;
        nodes_[k].dist = 1;
        break;
      }
      if (pk == kOrphan) {
        d = kInfDist;
        break;
      }
      k = arcs_[pk].head;
    }
    if (d == kInfDist) continue;
    if (d < best_dist) {
      best_arc = a;
      best_dist = d;
    }
    for (k = j; nodes_[k].ts != time_; k = arcs_[nodes_[k].parent].head) {
      nodes_[k].ts = time_;
      nodes_[k].dist = d--;
    }
  }

  if (best_arc >= 0) {
    n.parent = best_arc;
    n.ts = time_;
    n.dist = best_dist + 1;
    return;
  }
  for (int a = n.first; a >= 0; a = arcs_[a].next) {
    const int j = arcs_[a].head;
    Node& m = nodes_[j];
    if (m.tree != n.tree || m.parent == kNone) continue;
    const double cap = src ? arcs_[sister(a)].r_cap : arcs_[a].r_cap;
    if (cap > 0) activate(j);
    if (m.parent >= 0 && arcs_[m.parent].head == i) set_orphan(j);
  }
  n.tree = kFree;
  n.parent = kNone;
}

double MaxFlowGraph::max_flow() {
  if (solved_) return flow_;
  solved_ = true;
  for (int i = 0; i < node_count(); ++i) {
    Node& n = nodes_[i];
    if (n.tr_cap > 0) {
      n.tree = kSource;
    } else if (n.tr_cap < 0) {
      n.tree = kSink;
    } else {
      continue;
    }
    n.parent = kTerminal;
    n.ts = 0;
    n.dist = 1;
    activate(i);
  }
  if (std::isinf(flow_)) return flow_;

  int current = -1;
  for (;;) {
    int i = -1;
    if (current >= 0 && nodes_[current].parent != kNone) i = current;
    else i = next_active();
    current = -1;
    if (i < 0) break;
    const int middle = grow(i);
    if (middle < 0) continue;
    current = i;
    ++time_;
    augment(middle);
    if (std::isinf(flow_)) break;
    while (!orphans_.empty()) {
      const int o = orphans_.back();
      orphans_.pop_back();
      adopt(o);
    }
  }
  return flow_;
}

bool MaxFlowGraph::in_source_segment(int node) const {
  if (node < 0 || node >= node_count()) throw std::out_of_range("in_source_segment: bad node");
  return nodes_[node].tree != kSink;
}

}  // namespace racf
