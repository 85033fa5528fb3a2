#include "dstbam/ctdst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dstbam/errors.hpp"

namespace dstbam {

namespace {

double level_scale(unsigned b, int depth) {
  double s = 1.0;
  for (int d = 0; d < depth; ++d) s *= b;
  return s;
}

}  // namespace

EdgeWeightField::EdgeWeightField(unsigned branching, int depth_cap, Storage storage, RandomStream rng)
    : branching_(branching), depth_cap_(depth_cap), storage_(storage), rng_(std::move(rng)) {
  if (depth_cap < 0) throw ConfigError("depth cap must be non-negative");
  if (depth_cap > NodePath::max_depth(branching)) throw CapacityError("depth cap exceeds 64-bit node addressing");
  node_count_ = NodePath::count_up_to(branching, depth_cap);
}

EdgeWeightField EdgeWeightField::sample(int depth_cap, unsigned b, const RandomStream& rng) {
  if (depth_cap >= 0 && depth_cap <= NodePath::max_depth(b) && NodePath::count_up_to(b, depth_cap) <= kEagerLimit) {
    return sample(depth_cap, b, rng, Storage::eager);
  }
  return sample(depth_cap, b, rng, Storage::lazy);
}

EdgeWeightField EdgeWeightField::sample(int depth_cap, unsigned b, const RandomStream& rng, Storage storage) {
  EdgeWeightField field(b, depth_cap, Storage::lazy, rng);
  if (storage == Storage::eager) {
    if (field.node_count_ > kEagerLimit) {
      throw CapacityError("eager weight field of " + std::to_string(field.node_count_) + " nodes exceeds budget");
    }
    field.values_.resize(field.node_count_);
    std::uint64_t index = 1;
    for (int d = 0; d <= depth_cap; ++d) {
      const std::uint64_t end = NodePath::count_up_to(b, d);
      for (; index <= end; ++index) field.values_[index - 1] = field.lazy_weight(index, d);
    }
    field.storage_ = Storage::eager;
  }
  return field;
}

EdgeWeightField EdgeWeightField::from_values(unsigned b, int depth_cap, std::vector<double> values) {
  EdgeWeightField field(b, depth_cap, Storage::eager, RandomStream(0, 0));
  if (values.size() != field.node_count_) throw ConfigError("weight count does not match the depth cap");
  for (double x : values) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("weights must be finite and non-negative");
  }
  field.values_ = std::move(values);
  return field;
}

double EdgeWeightField::lazy_weight(std::uint64_t heap_index, int depth) const {
  return -std::log(rng_.uniform_at(heap_index)) * level_scale(branching_, depth);
}

void EdgeWeightField::throw_cap(int depth) const {
  throw DepthCapExceeded("weight requested at depth " + std::to_string(depth) + " beyond cap " +
                         std::to_string(depth_cap_));
}

EdgeWeightField sample_weights(int depth_cap, unsigned b, const RandomStream& rng) {
  return EdgeWeightField::sample(depth_cap, b, rng);
}

int PassageTimes::height_at(double t) const {
  if (min_by_depth.empty() || t >= min_by_depth.back()) {
    throw DepthCapExceeded("threshold reaches the depth cap of the weight field");
  }
  int h = 0;
  while (min_by_depth[static_cast<std::size_t>(h)] <= t) ++h;
  return h;
}

namespace {

void min_path_dfs(const EdgeWeightField& field, std::uint64_t index, int depth, double above,
                  std::vector<double>& best) {
  const double y = above + field.weight(index, depth);
  auto& slot = best[static_cast<std::size_t>(depth)];
  slot = std::min(slot, y);
  if (depth == field.depth_cap()) return;
  const unsigned b = field.branching();
  for (unsigned j = 0; j < b; ++j) min_path_dfs(field, heap::child(index, b, j), depth + 1, y, best);
}

double bottom_up(const EdgeWeightField& field, std::uint64_t index, int depth, int target) {
  double below = 0.0;
  if (depth < target) {
    below = std::numeric_limits<double>::infinity();
    const unsigned b = field.branching();
    for (unsigned j = 0; j < b; ++j) below = std::min(below, bottom_up(field, heap::child(index, b, j), depth + 1, target));
  }
  return below + field.weight(index, depth);
}

void fpp_dfs(const EdgeWeightField& field, const NodePath& v, double above, double t, ShapeTree& tree) {
  const double y = above + field.weight(v);
  if (y > t) return;
  if (v.depth() == field.depth_cap()) {
    throw DepthCapExceeded("internal node at the depth cap; sample a deeper field");
  }
  tree.expand(v);
  for (unsigned j = 0; j < field.branching(); ++j) fpp_dfs(field, v.child(j), y, t, tree);
}

}  // namespace

PassageTimes min_path_times(const EdgeWeightField& field) {
  PassageTimes out;
  out.min_by_depth.assign(static_cast<std::size_t>(field.depth_cap()) + 1, std::numeric_limits<double>::infinity());
  min_path_dfs(field, 1, 0, 0.0, out.min_by_depth);
  return out;
}

PassageTimes min_path_times_until(const EdgeWeightField& field, double horizon) {
  struct Entry {
    double y;
    std::uint64_t index;
    int depth;
  };
  auto later = [](const Entry& a, const Entry& b) { return a.y > b.y || (a.y == b.y && a.index > b.index); };
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> frontier(later);
  const unsigned b = field.branching();
  frontier.push(Entry{field.weight(1, 0), 1, 0});
  PassageTimes out;
  while (true) {
    const Entry e = frontier.top();
    frontier.pop();
    // Y grows along root paths, so depths are first reached in order.
    if (e.depth == static_cast<int>(out.min_by_depth.size())) {
      out.min_by_depth.push_back(e.y);
      if (e.y > horizon || e.depth == field.depth_cap()) return out;
    }
    if (e.depth == field.depth_cap()) continue;
    for (unsigned j = 0; j < b; ++j) {
      const std::uint64_t c = heap::child(e.index, b, j);
      frontier.push(Entry{e.y + field.weight(c, e.depth + 1), c, e.depth + 1});
    }
  }
}

double deepest_passage_time(const EdgeWeightField& field, int depth) {
  if (depth < 0 || depth > field.depth_cap()) throw CapacityError("weight field too shallow for the requested depth");
  return bottom_up(field, 1, 0, depth);
}

ShapeTree fpp_tree_at(double t, const EdgeWeightField& field) {
  ShapeTree tree(field.branching());
  fpp_dfs(field, NodePath::root(field.branching()), 0.0, t, tree);
  return tree;
}

ClockProcess::ClockProcess(unsigned branching, RandomStream rng) : tree_(branching), rng_(std::move(rng)) {
  schedule(NodePath::root(branching));
}

void ClockProcess::schedule(const NodePath& v) {
  const double rate = std::pow(static_cast<double>(tree_.branching()), -v.depth());
  pending_.push(Ring{time_ + rng_.next_exponential(rate), v.index(), v.depth()});
}

NodePath ClockProcess::ring() {
  const Ring r = pending_.top();
  pending_.pop();
  time_ = r.time;
  const NodePath v = NodePath::from_index(tree_.branching(), r.index);
  tree_.expand(v);
  for (unsigned j = 0; j < tree_.branching(); ++j) schedule(v.child(j));
  return v;
}

ClockRun clock_run_until_height(int height, unsigned b, RandomStream& rng) {
  if (height < 1) throw ConfigError("target height must be at least 1");
  ClockProcess proc(b, rng.derive(rng.next_u64()));
  while (proc.tree().external_height() < height) proc.ring();
  return {proc.tree(), proc.time()};
}

ShapeTree clock_tree_at(double t, unsigned b, RandomStream& rng) {
  if (!(t >= 0.0)) throw ConfigError("time must be non-negative");
  ClockProcess proc(b, rng.derive(rng.next_u64()));
  while (proc.next_ring_time() <= t) proc.ring();
  return proc.tree();
}

double recursion_sample(int depth, unsigned b, RandomStream& rng) {
  if (depth < 0) throw ConfigError("depth must be non-negative");
  if (depth == 0) return rng.next_exponential(1.0);
  double m = std::numeric_limits<double>::infinity();
  for (unsigned j = 0; j < b; ++j) m = std::min(m, recursion_sample(depth - 1, b, rng));
  return b * m + rng.next_exponential(1.0);
}

}  // namespace dstbam
