#pragma once

// Boykov-Kolmogorov augmenting-path max-flow with search trees grown from
// both terminals and reused across augmentations.

#include <limits>
#include <vector>

namespace racf {

class MaxFlowGraph {
 public:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  explicit MaxFlowGraph(int nodes = 0, int expected_edges = 0);

  int add_node();
  int node_count() const { return static_cast<int>(nodes_.size()); }

  /// Adds source -> node and node -> sink capacities (accumulating).
  void add_tweights(int node, double cap_source, double cap_sink);
  /// Directed pair a -> b with `cap`, b -> a with `rev_cap`.
  void add_edge(int a, int b, double cap, double rev_cap);

  double max_flow();
  /// After max_flow: true when the node stays connected to the source side.
  bool in_source_segment(int node) const;

 private:
  static constexpr int kNone = -3;
  static constexpr int kOrphan = -2;
  static constexpr int kTerminal = -1;
  enum Tree : unsigned char { kFree = 0, kSource = 1, kSink = 2 };

  struct Node {
    int first = -1;
    int parent = kNone;
    double tr_cap = 0.0;  ///< >0: residual from source, <0: residual to sink
    Tree tree = kFree;
    bool active = false;
    long ts = 0;
    int dist = 0;
  };
  struct Arc {
    int head;
    int next;
    double r_cap;
  };

  static int sister(int a) { return a ^ 1; }
  void activate(int i);
  int next_active();
  int grow(int i);
  void augment(int middle);
  void adopt(int i);
  void set_orphan(int i);

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::vector<int> active_;
  std::size_t active_head_ = 0;
  std::vector<int> orphans_;
  double flow_ = 0.0;
  long time_ = 0;
  bool solved_ = false;
};

}  // namespace racf
