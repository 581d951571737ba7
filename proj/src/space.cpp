#include "genlab/space.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>
#include <unordered_set>

#include "genlab/word.hpp"

namespace genlab {

Geodesic::Geodesic(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("geodesic needs at least one point");
}

Geodesic Geodesic::sub(std::size_t i, std::size_t j) const {
  if (i > j || j >= points_.size()) throw std::out_of_range("bad subsegment bounds");
  return Geodesic(std::vector<Point>(points_.begin() + static_cast<std::ptrdiff_t>(i),
                                     points_.begin() + static_cast<std::ptrdiff_t>(j) + 1));
}

Geodesic Geodesic::reversed() const { return Geodesic(std::vector<Point>(points_.rbegin(), points_.rend())); }

std::vector<Geodesic> MetricSpace::all_geodesics(const Point& p, const Point& q, std::size_t) const {
  return {geodesic(p, q)};
}

std::string MetricSpace::format(const Point& p) const {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < p.size(); ++i) out << (i ? "," : "") << p[i];
  out << "]";
  return out.str();
}

std::vector<Point> MetricSpace::ball(const Point& center, std::int64_t radius) const {
  std::vector<Point> out{center};
  std::unordered_set<Point, PointHash> seen{center};
  std::size_t lo = 0;
  for (std::int64_t r = 0; r < radius; ++r) {
    const std::size_t hi = out.size();
    for (std::size_t i = lo; i < hi; ++i)
      for (auto& nb : neighbors(out[i]))
        if (seen.insert(nb).second) out.push_back(std::move(nb));
    lo = hi;
  }
  return out;
}

// ---- Cayley tree

CayleyTree::CayleyTree(std::size_t rank) : rank_(rank) {
  if (rank < 2) throw std::invalid_argument("Cayley tree needs rank >= 2");
}

namespace {
std::size_t common_prefix(const Point& p, const Point& q) {
  std::size_t c = 0;
  while (c < p.size() && c < q.size() && p[c] == q[c]) ++c;
  return c;
}
}  // namespace

std::int64_t CayleyTree::distance(const Point& p, const Point& q) const {
  const std::size_t c = common_prefix(p, q);
  return static_cast<std::int64_t>(p.size() + q.size() - 2 * c);
}

Geodesic CayleyTree::geodesic(const Point& p, const Point& q) const {
  const std::size_t c = common_prefix(p, q);
  std::vector<Point> pts;
  for (std::size_t len = p.size(); len > c; --len) pts.emplace_back(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(len));
  for (std::size_t len = c; len <= q.size(); ++len) pts.emplace_back(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(len));
  return Geodesic(std::move(pts));
}

std::vector<Point> CayleyTree::neighbors(const Point& p) const {
  std::vector<Point> out;
  for (int rank = 0; rank < 2 * static_cast<int>(rank_); ++rank) {
    const Letter l = letter_from_rank(rank);
    Point v = p;
    if (!v.empty() && v.back() == -l)
      v.pop_back();
    else
      v.push_back(l);
    out.push_back(std::move(v));
  }
  return out;
}

std::string CayleyTree::format(const Point& p) const { return GeneratorAlphabet::standard(rank_).format(p); }

Point CayleyTreeAction::act(const NormalForm& g, const Point& x) const {
  Point out = g;
  for (auto l : x) {
    if (!out.empty() && out.back() == -l)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

// ---- Bass-Serre tree

namespace {
int syllable_type(std::int32_t s) { return s == FreeProductZ2Z3::kX ? 0 : 1; }

void push_syllable(NormalForm& syl, std::int32_t s) {
  if (s == FreeProductZ2Z3::kX)
    FreeProductZ2Z3::push_x(syl);
  else
    FreeProductZ2Z3::push_y(syl, s == FreeProductZ2Z3::kY ? 1 : 2);
}
}  // namespace

Point BassSerreTree::vertex(int type, NormalForm syllables) {
  if (!syllables.empty() && syllable_type(syllables.back()) == type) syllables.pop_back();
  Point p{type};
  p.insert(p.end(), syllables.begin(), syllables.end());
  return p;
}

std::vector<Point> BassSerreTree::root_path(const Point& p) {
  std::vector<Point> path{Point{0}};
  Point prefix_label;  // syllables s_1..s_{j-1}
  for (std::size_t j = 1; j < p.size(); ++j) {
    Point v{syllable_type(p[j])};
    v.insert(v.end(), prefix_label.begin(), prefix_label.end());
    if (v != path.back()) path.push_back(std::move(v));
    prefix_label.push_back(p[j]);
  }
  if (p != path.back()) path.push_back(p);
  return path;
}

namespace {

// Root-path vertex as (type, number of leading syllables of the endpoint's label).
using RootStep = std::pair<int, std::size_t>;

std::vector<RootStep> root_steps(const Point& p) {
  std::vector<RootStep> steps{{0, 0}};
  for (std::size_t j = 1; j < p.size(); ++j)
    if (RootStep v{syllable_type(p[j]), j - 1}; v != steps.back()) steps.push_back(v);
  if (RootStep v{p[0], p.size() - 1}; v != steps.back()) steps.push_back(v);
  return steps;
}

Point materialize(const Point& p, const RootStep& step) {
  Point v{step.first};
  v.insert(v.end(), p.begin() + 1, p.begin() + 1 + static_cast<std::ptrdiff_t>(step.second));
  return v;
}

// Length of the common prefix of the root paths of p and q.
std::size_t shared_root_steps(const Point& p, const std::vector<RootStep>& a, const Point& q,
                              const std::vector<RootStep>& b) {
  std::size_t lcp = 0;
  while (lcp + 1 < p.size() && lcp + 1 < q.size() && p[lcp + 1] == q[lcp + 1]) ++lcp;
  std::size_t c = 0;
  while (c < a.size() && c < b.size() && a[c] == b[c] && a[c].second <= lcp) ++c;
  return c;
}

}  // namespace

std::int64_t BassSerreTree::distance(const Point& p, const Point& q) const {
  const auto a = root_steps(p), b = root_steps(q);
  const std::size_t c = shared_root_steps(p, a, q, b);
  return static_cast<std::int64_t>(a.size() + b.size() - 2 * c);
}

Geodesic BassSerreTree::geodesic(const Point& p, const Point& q) const {
  const auto a = root_steps(p), b = root_steps(q);
  const std::size_t c = shared_root_steps(p, a, q, b);
  std::vector<Point> pts;
  for (std::size_t i = a.size(); i > c; --i) pts.push_back(materialize(p, a[i - 1]));
  for (std::size_t i = c - 1; i < b.size(); ++i) pts.push_back(materialize(q, b[i]));
  return Geodesic(std::move(pts));
}

std::vector<Point> BassSerreTree::neighbors(const Point& p) const {
  NormalForm w(p.begin() + 1, p.end());
  std::vector<Point> out;
  if (p[0] == 0) {
    out.push_back(vertex(1, w));
    NormalForm wx = w;
    FreeProductZ2Z3::push_x(wx);
    out.push_back(vertex(1, wx));
  } else {
    out.push_back(vertex(0, w));
    for (int power : {1, 2}) {
      NormalForm wy = w;
      FreeProductZ2Z3::push_y(wy, power);
      out.push_back(vertex(0, wy));
    }
  }
  return out;
}

std::string BassSerreTree::format(const Point& p) const {
  std::string out;
  for (std::size_t i = 1; i < p.size(); ++i)
    out += p[i] == FreeProductZ2Z3::kX ? "x" : (p[i] == FreeProductZ2Z3::kY ? "y" : "Y");
  return (out.empty() ? "1" : out) + (p[0] == 0 ? "<x>" : "<y>");
}

Point BassSerreAction::act(const NormalForm& g, const Point& x) const {
  NormalForm syl = group().central_quotient(g);
  for (std::size_t i = 1; i < x.size(); ++i) push_syllable(syl, x[i]);
  return BassSerreTree::vertex(x[0], std::move(syl));
}

// ---- finite graphs

FiniteGraph::FiniteGraph(int vertex_count, const std::vector<std::pair<int, int>>& edges, std::string name,
                         std::optional<Rational> declared_delta)
    : name_(std::move(name)), n_(vertex_count), adjacency_(static_cast<std::size_t>(vertex_count)),
      declared_delta_(std::move(declared_delta)) {
  if (n_ < 1) throw std::invalid_argument("graph needs at least one vertex");
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n_ || v >= n_) throw std::invalid_argument("edge endpoint out of range");
    if (u == v) continue;
    adjacency_[static_cast<std::size_t>(u)].push_back(v);
    adjacency_[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  dist_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), -1);
  std::vector<int> component(static_cast<std::size_t>(n_), -1);
  for (int s = 0; s < n_; ++s) {
    std::int32_t* row = &dist_[static_cast<std::size_t>(s) * static_cast<std::size_t>(n_)];
    row[s] = 0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adjacency_[static_cast<std::size_t>(u)])
        if (row[v] < 0) {
          row[v] = row[u] + 1;
          queue.push_back(v);
        }
    }
    if (component[static_cast<std::size_t>(s)] < 0) {
      components_.emplace_back();
      for (int v = 0; v < n_; ++v)
        if (row[v] >= 0) {
          component[static_cast<std::size_t>(v)] = static_cast<int>(components_.size()) - 1;
          components_.back().push_back(v);
        }
    }
  }
}

FiniteGraph FiniteGraph::cycle(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return FiniteGraph(n, edges, "cycle:" + std::to_string(n));
}

FiniteGraph FiniteGraph::path(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return FiniteGraph(n, edges, "path:" + std::to_string(n), Rational(0));
}

FiniteGraph FiniteGraph::grid(int width, int height) {
  std::vector<std::pair<int, int>> edges;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const int v = y * width + x;
      if (x + 1 < width) edges.emplace_back(v, v + 1);
      if (y + 1 < height) edges.emplace_back(v, v + width);
    }
  return FiniteGraph(width * height, edges, "grid:" + std::to_string(width) + "x" + std::to_string(height));
}

FiniteGraph FiniteGraph::parse_edge_list(std::istream& in, std::string name) {
  std::vector<std::pair<int, int>> edges;
  int max_vertex = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    int u, v;
    if (!(fields >> u)) continue;
    std::string extra;
    if (!(fields >> v) || (fields >> extra) || u < 0 || v < 0)
      throw std::invalid_argument("edge list line " + std::to_string(line_no) + ": expected 'u v'");
    edges.emplace_back(u, v);
    max_vertex = std::max({max_vertex, u, v});
  }
  if (max_vertex < 0) throw std::invalid_argument("edge list is empty");
  return FiniteGraph(max_vertex + 1, edges, std::move(name));
}

int FiniteGraph::index(const Point& p) const {
  if (p.size() != 1 || p[0] < 0 || p[0] >= n_) throw std::invalid_argument("not a vertex of " + name_);
  return p[0];
}

void FiniteGraph::require_connected() const {
  if (connected()) return;
  std::ostringstream msg;
  msg << "graph " << name_ << " is disconnected; components:";
  for (const auto& comp : components_) {
    msg << " {";
    for (std::size_t i = 0; i < comp.size(); ++i) msg << (i ? "," : "") << comp[i];
    msg << "}";
  }
  throw DisconnectedGraph(msg.str(), components_);
}

std::int64_t FiniteGraph::distance(const Point& p, const Point& q) const {
  const auto d = dist_[static_cast<std::size_t>(index(p)) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(index(q))];
  if (d < 0) require_connected();
  return d;
}

Geodesic FiniteGraph::geodesic(const Point& p, const Point& q) const {
  std::int64_t remaining = distance(p, q);
  std::vector<Point> pts{p};
  int cur = index(p);
  while (remaining > 0) {
    for (int v : adjacency_[static_cast<std::size_t>(cur)])
      if (distance({v}, q) == remaining - 1) {
        cur = v;
        break;
      }
    pts.push_back({cur});
    --remaining;
  }
  return Geodesic(std::move(pts));
}

std::vector<Geodesic> FiniteGraph::all_geodesics(const Point& p, const Point& q, std::size_t cap) const {
  std::vector<Geodesic> out;
  std::vector<Point> stack{p};
  std::function<void(int, std::int64_t)> dfs = [&](int cur, std::int64_t remaining) {
    if (out.size() >= cap) return;
    if (remaining == 0) {
      out.emplace_back(stack);
      return;
    }
    for (int v : adjacency_[static_cast<std::size_t>(cur)])
      if (distance({v}, q) == remaining - 1) {
        stack.push_back({v});
        dfs(v, remaining - 1);
        stack.pop_back();
      }
  };
  dfs(index(p), distance(p, q));
  return out;
}

std::vector<Point> FiniteGraph::neighbors(const Point& p) const {
  std::vector<Point> out;
  for (int v : adjacency_[static_cast<std::size_t>(index(p))]) out.push_back({v});
  return out;
}

Rational FiniteGraph::delta() const {
  if (declared_delta_) return *declared_delta_;
  std::call_once(delta_once_, [this] { measured_delta_ = measure_delta(*this); });
  return measured_delta_;
}

Rational measure_delta(const FiniteGraph& graph) {
  if (!graph.connected()) graph.distance({0}, {graph.components().back().front()});  // throws with components
  const int n = graph.vertex_count();
  const std::size_t cap = n <= 64 ? 64 : 1;
  std::int64_t worst = 0;
  std::vector<std::vector<std::vector<Geodesic>>> geo(static_cast<std::size_t>(n));
  auto sides = [&](int b, int a) -> const std::vector<Geodesic>& {
    auto& row = geo[static_cast<std::size_t>(b)];
    if (row.empty()) row.resize(static_cast<std::size_t>(n));
    auto& cell = row[static_cast<std::size_t>(a)];
    if (cell.empty()) cell = graph.all_geodesics({b}, {a}, cap);
    return cell;
  };
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      for (int c = a; c < n; ++c) {
        const std::int64_t dba = graph.distance({b}, {a}), dbc = graph.distance({b}, {c}), dac = graph.distance({a}, {c});
        const std::int64_t reach = (dba + dbc - dac) / 2;  // floor of the Gromov product (a,c)_b
        if (reach <= 0) continue;
        for (const auto& g1 : sides(b, a))
          for (const auto& g2 : sides(b, c))
            for (std::int64_t t = 1; t <= reach; ++t)
              worst = std::max(worst, graph.distance(g1[static_cast<std::size_t>(t)], g2[static_cast<std::size_t>(t)]));
      }
  return Rational(worst, 4);
}

// ---- actions

Rational GroupAction::tree_translation_length(const NormalForm& g) const {
  const Point x = space().basepoint();
  const Point gx = act(g, x);
  const Point ggx = act(g, gx);
  const std::int64_t t = space().distance(x, ggx) - space().distance(x, gx);
  return Rational(t > 0 ? t : 0);
}

ActionModel build_cayley_tree(std::size_t rank) {
  ActionModel m;
  m.group = std::make_unique<FreeGroup>(rank);
  m.space = std::make_unique<CayleyTree>(rank);
  m.action = std::make_unique<CayleyTreeAction>(*m.group, *m.space);
  return m;
}

ActionModel build_bass_serre_tree(const std::string& group) {
  ActionModel m;
  if (group == "z2z3")
    m.group = std::make_unique<FreeProductZ2Z3>();
  else if (group == "braid3")
    m.group = std::make_unique<Braid3>();
  else
    throw std::invalid_argument("Bass-Serre tree supports z2z3 and braid3, not '" + group + "'");
  m.space = std::make_unique<BassSerreTree>();
  m.action = std::make_unique<BassSerreAction>(*m.group, *m.space);
  return m;
}

ActionModel build_action_model(const std::string& group_id) {
  if (group_id.rfind("free:", 0) == 0) {
    auto probe = make_model(group_id);
    return build_cayley_tree(probe->alphabet().rank());
  }
  if (group_id == "z2z3" || group_id == "braid3") return build_bass_serre_tree(group_id);
  throw UnsupportedModel("no action model for '" + group_id + "'");
}

// ---- orbit segments

OrbitSegment OrbitSegment::make(const GroupAction& action, const NormalForm& base, const NormalForm& phi,
                                std::int64_t n) {
  if (n < 0) throw std::invalid_argument("orbit segment length must be nonnegative");
  OrbitSegment seg;
  seg.base = base;
  seg.element = phi;
  seg.length = n;
  seg.points.push_back(base);
  for (std::int64_t i = 0; i < n; ++i) seg.points.push_back(action.group().multiply(seg.points.back(), phi));
  const auto& space = action.space();
  seg.projected = space.geodesic(action.orbit(seg.points.front()), action.orbit(seg.points.back()));
  for (const auto& p : seg.points) {
    const Point x = action.orbit(p);
    std::int64_t best = 0;
    if (space.is_tree()) {
      // Median of x and the endpoints; distances are exact on a tree.
      const std::int64_t len = seg.projected.length();
      best = (space.distance(seg.projected.start(), x) + len - space.distance(seg.projected.end(), x)) / 2;
    } else {
      std::int64_t best_d = -1;
      for (std::size_t j = 0; j < seg.projected.size(); ++j) {
        const std::int64_t d = space.distance(x, seg.projected[j]);
        if (best_d < 0 || d < best_d) {
          best_d = d;
          best = static_cast<std::int64_t>(j);
        }
      }
    }
    seg.orbit_positions.push_back(best);
  }
  return seg;
}

std::size_t OrbitSegment::snap(std::int64_t position) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < orbit_positions.size(); ++i)
    if (std::abs(orbit_positions[i] - position) < std::abs(orbit_positions[best] - position)) best = i;
  return best;
}

}  // namespace genlab
