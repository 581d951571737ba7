#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "genlab/group.hpp"
#include "genlab/rational.hpp"

namespace genlab {

// Vertex label; meaning depends on the space.
using Point = std::vector<std::int32_t>;
using PointHash = NormalFormHash;

class Geodesic {
 public:
  Geodesic() = default;
  explicit Geodesic(std::vector<Point> points);
  static Geodesic degenerate(Point p) { return Geodesic(std::vector<Point>{std::move(p)}); }

  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  const Point& start() const { return points_.front(); }
  const Point& end() const { return points_.back(); }
  std::int64_t length() const { return static_cast<std::int64_t>(points_.size()) - 1; }
  bool is_point() const { return points_.size() == 1; }
  Geodesic sub(std::size_t i, std::size_t j) const;  // points i..j inclusive
  Geodesic reversed() const;
  bool operator==(const Geodesic&) const = default;

 private:
  std::vector<Point> points_;
};

class MetricSpace {
 public:
  virtual ~MetricSpace() = default;
  virtual std::string name() const = 0;
  virtual std::int64_t distance(const Point& p, const Point& q) const = 0;
  virtual Geodesic geodesic(const Point& p, const Point& q) const = 0;
  virtual std::vector<Point> neighbors(const Point& p) const = 0;
  virtual Rational delta() const = 0;
  virtual Point basepoint() const = 0;
  virtual bool is_tree() const { return false; }
  // Every geodesic from p to q (up to cap); trees have exactly one.
  virtual std::vector<Geodesic> all_geodesics(const Point& p, const Point& q, std::size_t cap) const;
  virtual std::string format(const Point& p) const;

  // Closed ball, in breadth-first order with neighbors in their listed order.
  std::vector<Point> ball(const Point& center, std::int64_t radius) const;
};

// Cayley tree of F_k; points are freely reduced words.
class CayleyTree final : public MetricSpace {
 public:
  explicit CayleyTree(std::size_t rank);
  std::string name() const override { return "cayley-tree:" + std::to_string(rank_); }
  std::int64_t distance(const Point& p, const Point& q) const override;
  Geodesic geodesic(const Point& p, const Point& q) const override;
  std::vector<Point> neighbors(const Point& p) const override;
  Rational delta() const override { return 0; }
  Point basepoint() const override { return {}; }
  bool is_tree() const override { return true; }
  std::vector<Geodesic> all_geodesics(const Point& p, const Point& q, std::size_t) const override {
    return {geodesic(p, q)};
  }
  std::string format(const Point& p) const override;

 private:
  std::size_t rank_;
};

// Bass-Serre tree of Z/2 * Z/3. A vertex g<x> is {0, syllables of g without a trailing x}; g<y> is
// {1, syllables of g without a trailing y-syllable}. The basepoint is <x>.
class BassSerreTree final : public MetricSpace {
 public:
  std::string name() const override { return "bass-serre-tree"; }
  std::int64_t distance(const Point& p, const Point& q) const override;
  Geodesic geodesic(const Point& p, const Point& q) const override;
  std::vector<Point> neighbors(const Point& p) const override;
  Rational delta() const override { return 0; }
  Point basepoint() const override { return {0}; }
  bool is_tree() const override { return true; }
  std::vector<Geodesic> all_geodesics(const Point& p, const Point& q, std::size_t) const override {
    return {geodesic(p, q)};
  }
  std::string format(const Point& p) const override;

  static Point vertex(int type, NormalForm syllables);  // canonicalises
  static std::vector<Point> root_path(const Point& p);
};

class DisconnectedGraph : public std::runtime_error {
 public:
  DisconnectedGraph(const std::string& what, std::vector<std::vector<int>> components)
      : std::runtime_error(what), components_(std::move(components)) {}
  const std::vector<std::vector<int>>& components() const { return components_; }

 private:
  std::vector<std::vector<int>> components_;
};

// Finite simple graph on vertices 0..n-1; points are {i}.
class FiniteGraph final : public MetricSpace {
 public:
  FiniteGraph(int vertex_count, const std::vector<std::pair<int, int>>& edges, std::string name = "graph",
              std::optional<Rational> declared_delta = std::nullopt);
  static FiniteGraph cycle(int n);
  static FiniteGraph path(int n);
  static FiniteGraph grid(int width, int height);
  // One "u v" pair per line, 0-indexed; '#' starts a comment.
  static FiniteGraph parse_edge_list(std::istream& in, std::string name = "edge-list");

  std::string name() const override { return name_; }
  int vertex_count() const { return n_; }
  bool connected() const { return components_.size() <= 1; }
  const std::vector<std::vector<int>>& components() const { return components_; }
  std::int64_t distance(const Point& p, const Point& q) const override;
  // Lexicographically least shortest path.
  Geodesic geodesic(const Point& p, const Point& q) const override;
  std::vector<Geodesic> all_geodesics(const Point& p, const Point& q, std::size_t cap) const override;
  std::vector<Point> neighbors(const Point& p) const override;
  Rational delta() const override;  // declared, else measured on first use
  Point basepoint() const override { return {0}; }
  std::string format(const Point& p) const override { return std::to_string(p.at(0)); }
  const std::vector<int>& adjacent(int v) const { return adjacency_[static_cast<std::size_t>(v)]; }

 private:
  int index(const Point& p) const;
  void require_connected() const;
  std::string name_;
  int n_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<std::int32_t> dist_;
  std::vector<std::vector<int>> components_;
  std::optional<Rational> declared_delta_;
  mutable std::once_flag delta_once_;
  mutable Rational measured_delta_;
};

// Least delta such that every geodesic triangle is 4*delta-thin, scanning integer times along each corner's two
// sides. All geodesics are used when the graph has at most 64 vertices, canonical ones otherwise.
Rational measure_delta(const FiniteGraph& graph);

class GroupAction {
 public:
  GroupAction(const GroupModel& group, const MetricSpace& space) : group_(&group), space_(&space) {}
  virtual ~GroupAction() = default;
  const GroupModel& group() const { return *group_; }
  const MetricSpace& space() const { return *space_; }
  virtual Point act(const NormalForm& g, const Point& x) const = 0;
  Point orbit(const NormalForm& g) const { return act(g, space_->basepoint()); }
  // Translation length on a tree: max(0, d(x, g^2 x) - d(x, g x)).
  Rational tree_translation_length(const NormalForm& g) const;

 private:
  const GroupModel* group_;
  const MetricSpace* space_;
};

class CayleyTreeAction final : public GroupAction {
 public:
  using GroupAction::GroupAction;
  Point act(const NormalForm& g, const Point& x) const override;
};

// Z/2 * Z/3 acting by left multiplication on cosets; B_3 acts through its central quotient.
class BassSerreAction final : public GroupAction {
 public:
  using GroupAction::GroupAction;
  Point act(const NormalForm& g, const Point& x) const override;
};

struct ActionModel {
  std::unique_ptr<GroupModel> group;
  std::unique_ptr<MetricSpace> space;
  std::unique_ptr<GroupAction> action;
};

ActionModel build_cayley_tree(std::size_t rank);
// group "z2z3" or "braid3"
ActionModel build_bass_serre_tree(const std::string& group = "z2z3");
ActionModel build_action_model(const std::string& group_id);

// A phi-orbit sequence base*(id, phi, ..., phi^n) with Proj = [base x0, base phi^n x0].
struct OrbitSegment {
  NormalForm base;
  NormalForm element;
  std::int64_t length = 0;
  std::vector<NormalForm> points;
  Geodesic projected;
  std::vector<std::int64_t> orbit_positions;  // index on projected nearest to points[i] x0

  static OrbitSegment make(const GroupAction& action, const NormalForm& base, const NormalForm& phi, std::int64_t n);
  const NormalForm& midpoint() const { return points[static_cast<std::size_t>(length / 2)]; }
  // Orbit point nearest to a position on projected; ties go to the earlier point.
  std::size_t snap(std::int64_t position) const;
};

}  // namespace genlab
