#include "graphssl/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include "graphssl/error.hpp"

namespace graphssl {

namespace {

// Primal network simplex on the complete bipartite graph sources -> sinks, all arcs
// uncapacitated. A root node joined to every node by an artificial arc gives the initial
// strongly feasible tree; block-search pricing picks entering arcs. The tree is kept as
// parent pointers plus intrusive child lists, and the subtree that moves in a pivot is
// re-rooted and walked to refresh potentials and depths.
template <typename Flow>
class NetworkSimplex {
 public:
  NetworkSimplex(const std::vector<Flow>& supply, const std::vector<Flow>& demand, const Matrix& cost)
      : m_(static_cast<int>(supply.size())), n_(static_cast<int>(demand.size())) {
    nodes_ = m_ + n_ + 1;
    root_ = m_ + n_;
    real_arcs_ = static_cast<long long>(m_) * n_;
    cost_.resize(static_cast<std::size_t>(real_arcs_));
    double max_cost = 0.0;
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) {
        const double c = cost(i, j);
        cost_[static_cast<std::size_t>(i) * n_ + j] = c;
        max_cost = std::max(max_cost, std::abs(c));
      }
    }
    artificial_cost_ = (max_cost + 1.0) * nodes_;
    epsilon_ = 1e-12 * (max_cost + 1.0);

    const long long arcs = real_arcs_ + nodes_ - 1;
    flow_.assign(static_cast<std::size_t>(arcs), Flow{0});
    in_tree_.assign(static_cast<std::size_t>(arcs), 0);
    parent_.assign(nodes_, -1);
    pred_.assign(nodes_, -1);
    dir_.assign(nodes_, 0);
    depth_.assign(nodes_, 0);
    pi_.assign(nodes_, 0.0);
    first_child_.assign(nodes_, -1);
    next_sibling_.assign(nodes_, -1);
    prev_sibling_.assign(nodes_, -1);
    artificial_up_.assign(nodes_, 0);

    for (int v = 0; v < root_; ++v) {
      const Flow s = v < m_ ? supply[v] : -demand[v - m_];
      const long long a = real_arcs_ + v;
      parent_[v] = root_;
      pred_[v] = a;
      depth_[v] = 1;
      in_tree_[a] = 1;
      if (s >= Flow{0}) {
        dir_[v] = kUp;  // v -> root
        artificial_up_[v] = 1;
        flow_[a] = s;
        pi_[v] = -artificial_cost_;
      } else {
        dir_[v] = kDown;  // root -> v
        flow_[a] = -s;
        pi_[v] = artificial_cost_;
      }
      attach(v, root_);
    }
    block_ = std::max<long long>(10, static_cast<long long>(std::sqrt(static_cast<double>(arcs))));
  }

  void run() {
    while (true) {
      const long long entering = find_entering();
      if (entering < 0) break;
      pivot(entering);
    }
    for (int v = 0; v < root_; ++v) {
      if (std::abs(static_cast<double>(flow_[real_arcs_ + v])) > 1e-9 * total_scale()) {
        throw NumericalError("transport problem is infeasible (flow left on an artificial arc)");
      }
    }
  }

  double total_cost() const {
    double total = 0.0;
    for (long long a = 0; a < real_arcs_; ++a) {
      if (flow_[a] != Flow{0}) total += static_cast<double>(flow_[a]) * cost_[a];
    }
    return total;
  }

  void plan(Matrix& out) const {
    out = Matrix::Zero(m_, n_);
    for (long long a = 0; a < real_arcs_; ++a) {
      if (flow_[a] != Flow{0}) out(a / n_, a % n_) = static_cast<double>(flow_[a]);
    }
  }

  void set_total_scale(double s) { total_scale_ = s; }

 private:
  static constexpr int kUp = 1;
  static constexpr int kDown = -1;

  double total_scale() const { return total_scale_; }

  // Artificial arcs keep the orientation chosen at construction.
  int source(long long a) const {
    if (a < real_arcs_) return static_cast<int>(a / n_);
    const int v = static_cast<int>(a - real_arcs_);
    return artificial_up_[v] ? v : root_;
  }
  int target(long long a) const {
    if (a < real_arcs_) return m_ + static_cast<int>(a % n_);
    const int v = static_cast<int>(a - real_arcs_);
    return artificial_up_[v] ? root_ : v;
  }
  double arc_cost(long long a) const { return a < real_arcs_ ? cost_[a] : artificial_cost_; }
  double reduced_cost(long long a) const { return arc_cost(a) + pi_[source(a)] - pi_[target(a)]; }

  void attach(int child, int parent) {
    prev_sibling_[child] = -1;
    next_sibling_[child] = first_child_[parent];
    if (first_child_[parent] >= 0) prev_sibling_[first_child_[parent]] = child;
    first_child_[parent] = child;
  }
  void detach(int child, int parent) {
    if (prev_sibling_[child] >= 0) {
      next_sibling_[prev_sibling_[child]] = next_sibling_[child];
    } else {
      first_child_[parent] = next_sibling_[child];
    }
    if (next_sibling_[child] >= 0) prev_sibling_[next_sibling_[child]] = prev_sibling_[child];
    prev_sibling_[child] = next_sibling_[child] = -1;
  }

  long long find_entering() {
    const long long arcs = static_cast<long long>(flow_.size());
    long long best = -1;
    double best_rc = -epsilon_;
    long long seen = 0;
    long long a = next_arc_;
    while (seen < arcs) {
      const long long stop = std::min(arcs, seen + block_);
      for (; seen < stop; ++seen) {
        if (!in_tree_[a]) {
          const double rc = reduced_cost(a);
          if (rc < best_rc) {
            best_rc = rc;
            best = a;
          }
        }
        if (++a == arcs) a = 0;
      }
      if (best >= 0) {
        next_arc_ = a;
        return best;
      }
    }
    return -1;
  }

  void pivot(long long in_arc) {
    const int first = source(in_arc);
    const int second = target(in_arc);
    int u = first, v = second;
    while (u != v) {
      if (depth_[u] >= depth_[v]) {
        u = parent_[u];
      } else {
        v = parent_[v];
      }
    }
    const int join = u;

    // Leaving arc: smallest flow on an arc the circulation decreases; "<" on the first
    // side and "<=" on the second keeps the tree strongly feasible.
    bool found = false;
    Flow delta{};
    int u_out = -1;
    int side = 0;
    for (int w = first; w != join; w = parent_[w]) {
      if (dir_[w] == kUp) {
        const Flow d = std::max(flow_[pred_[w]], Flow{0});
        if (!found || d < delta) {
          delta = d;
          u_out = w;
          side = 1;
          found = true;
        }
      }
    }
    for (int w = second; w != join; w = parent_[w]) {
      if (dir_[w] == kDown) {
        const Flow d = std::max(flow_[pred_[w]], Flow{0});
        if (!found || d <= delta) {
          delta = d;
          u_out = w;
          side = 2;
          found = true;
        }
      }
    }
    if (!found) throw NumericalError("network simplex found an unbounded cycle");

    if (delta != Flow{0}) {
      flow_[in_arc] += delta;
      for (int w = first; w != join; w = parent_[w]) flow_[pred_[w]] -= dir_[w] * delta;
      for (int w = second; w != join; w = parent_[w]) flow_[pred_[w]] += dir_[w] * delta;
    }

    const long long out_arc = pred_[u_out];
    const int u_in = side == 1 ? first : second;
    const int v_in = side == 1 ? second : first;
    in_tree_[out_arc] = 0;
    in_tree_[in_arc] = 1;

    // Re-root the detached subtree at u_in, reversing the path u_in -> u_out.
    detach(u_out, parent_[u_out]);
    int w = u_in;
    int new_parent = v_in;
    long long new_pred = in_arc;
    int new_dir = source(in_arc) == u_in ? kUp : kDown;
    while (true) {
      const int old_parent = parent_[w];
      const long long old_pred = pred_[w];
      const int old_dir = dir_[w];
      if (w != u_out) detach(w, old_parent);
      parent_[w] = new_parent;
      pred_[w] = new_pred;
      dir_[w] = new_dir;
      attach(w, new_parent);
      if (w == u_out) break;
      new_parent = w;
      new_pred = old_pred;
      new_dir = -old_dir;
      w = old_parent;
    }

    const double sigma = pi_[v_in] - pi_[u_in] - dir_[u_in] * arc_cost(in_arc);
    refresh_subtree(u_in, sigma);
  }

  void refresh_subtree(int top, double sigma) {
    stack_.clear();
    stack_.push_back(top);
    while (!stack_.empty()) {
      const int x = stack_.back();
      stack_.pop_back();
      pi_[x] += sigma;
      depth_[x] = depth_[parent_[x]] + 1;
      for (int c = first_child_[x]; c >= 0; c = next_sibling_[c]) stack_.push_back(c);
    }
  }

 private:
  int m_, n_, nodes_ = 0, root_ = 0;
  long long real_arcs_ = 0;
  std::vector<double> cost_;
  double artificial_cost_ = 0.0;
  double epsilon_ = 0.0;
  double total_scale_ = 1.0;
  std::vector<Flow> flow_;
  std::vector<char> in_tree_;
  std::vector<int> parent_;
  std::vector<long long> pred_;
  std::vector<int> dir_;
  std::vector<int> depth_;
  std::vector<double> pi_;
  std::vector<int> first_child_, next_sibling_, prev_sibling_;
  std::vector<char> artificial_up_;
  std::vector<int> stack_;
  long long block_ = 10;
  long long next_arc_ = 0;
};

template <typename Flow>
double run_simplex(const std::vector<Flow>& a, const std::vector<Flow>& b, const Matrix& cost, Matrix* plan,
                   double total) {
  NetworkSimplex<Flow> solver(a, b, cost);
  solver.set_total_scale(total);
  solver.run();
  if (plan) solver.plan(*plan);
  return solver.total_cost();
}

void check_shapes(std::size_t rows, std::size_t cols, const Matrix& cost) {
  if (rows == 0 || cols == 0) throw InvalidArgument("transport marginals must be non-empty");
  if (static_cast<Index>(rows) != cost.rows() || static_cast<Index>(cols) != cost.cols()) {
    throw InvalidArgument("cost matrix shape does not match the marginals");
  }
  if (!cost.allFinite()) throw InvalidArgument("cost matrix has non-finite entries");
}

}  // namespace

double solve_assignment(const Matrix& cost, std::vector<Index>* assignment) {
  const Index n = cost.rows();
  if (n == 0 || cost.cols() != n) throw InvalidArgument("assignment needs a non-empty square cost matrix");
  if (!cost.allFinite()) throw InvalidArgument("cost matrix has non-finite entries");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is the virtual start of each augmenting path.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<Index> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const Index i0 = p[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> match(n);
  for (Index j = 1; j <= n; ++j) match[p[j] - 1] = j - 1;
  double total = 0.0;
  for (Index i = 0; i < n; ++i) total += cost(i, match[i]);
  if (assignment) *assignment = std::move(match);
  return total;
}

double solve_transport(const Vector& a, const Vector& b, const Matrix& cost, Matrix* plan) {
  check_shapes(static_cast<std::size_t>(a.size()), static_cast<std::size_t>(b.size()), cost);
  if ((a.array() < 0.0).any() || (b.array() < 0.0).any() || !a.allFinite() || !b.allFinite()) {
    throw InvalidArgument("transport marginals must be finite and nonnegative");
  }
  const double sa = a.sum();
  const double sb = b.sum();
  if (!(sa > 0.0) || std::abs(sa - sb) > 1e-12 * std::max(sa, sb)) {
    throw InvalidArgument("transport marginals must have equal positive totals");
  }
  // Balance the last sink exactly so rounding cannot leave flow on the artificial arcs.
  std::vector<double> supply(a.data(), a.data() + a.size());
  std::vector<double> demand(b.data(), b.data() + b.size());
  demand.back() += sa - sb;
  demand.back() = std::max(demand.back(), 0.0);
  return run_simplex(supply, demand, cost, plan, sa);
}

double solve_transport(const std::vector<long long>& a, const std::vector<long long>& b, const Matrix& cost,
                       Matrix* plan) {
  check_shapes(a.size(), b.size(), cost);
  long long sa = 0, sb = 0;
  for (long long x : a) {
    if (x < 0) throw InvalidArgument("transport marginals must be nonnegative");
    sa += x;
  }
  for (long long x : b) {
    if (x < 0) throw InvalidArgument("transport marginals must be nonnegative");
    sb += x;
  }
  if (sa <= 0 || sa != sb) throw InvalidArgument("transport marginals must have equal positive totals");
  return run_simplex(a, b, cost, plan, static_cast<double>(sa));
}

}  // namespace graphssl
