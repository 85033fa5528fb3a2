#include "dstbam/bam.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <string>

#include "dstbam/errors.hpp"

namespace dstbam {

namespace {

/// Internal nodes of T_K kept as a byte array.
constexpr std::uint64_t kNodeBudget = std::uint64_t{1} << 27;

}  // namespace

BorderAggregation::BorderAggregation(int height, unsigned branching) : height_(height), branching_(branching) {
  if (height < 1) throw ConfigError("tree height must be at least 1");
  if (branching < 2) throw ConfigError("branching factor must be at least 2");
  if (height - 1 > NodePath::max_depth(branching) ||
      NodePath::count_up_to(branching, height - 1) > kNodeBudget) {
    throw CapacityError("T_" + std::to_string(height) + " exceeds the aggregation node budget");
  }
  state_.resize(NodePath::count_up_to(branching, height - 1) + 1);
  reset();
}

void BorderAggregation::reset() {
  std::fill(state_.begin(), state_.end(), std::uint8_t{0});
  const std::uint64_t first = NodePath::level_begin(branching_, height_ - 1);
  std::fill(state_.begin() + static_cast<std::ptrdiff_t>(first), state_.end(), kStickyChild);
  particles_ = 0;
}

NodePath BorderAggregation::release(RandomStream& rng) {
  if (root_sticky()) throw ConfigError("aggregation already finished");
  std::uint64_t v = 1;
  if (branching_ == 2) {
    while (!(state_[v] & kStickyChild)) v = 2 * v + rng.next_bit();
  } else {
    while (!(state_[v] & kStickyChild)) v = heap::child(v, branching_, rng.next_below(branching_));
  }
  state_[v] |= kSticky;
  if (v != 1) state_[heap::parent(v, branching_)] |= kStickyChild;
  ++particles_;
  return NodePath::from_index(branching_, v);
}

bool BorderAggregation::is_sticky(const NodePath& v) const {
  if (v.depth() >= height_) return true;
  return (state_[v.index()] & kSticky) != 0;
}

std::vector<NodePath> BorderAggregation::absorption_set() const {
  std::vector<NodePath> out;
  if (root_sticky()) return out;
  // Depth-first from the root; stop descending at the first flagged node.
  std::vector<std::uint64_t> stack{1};
  while (!stack.empty()) {
    const std::uint64_t v = stack.back();
    stack.pop_back();
    if (state_[v] & kStickyChild) {
      out.push_back(NodePath::from_index(branching_, v));
      continue;
    }
    for (unsigned j = 0; j < branching_; ++j) stack.push_back(heap::child(v, branching_, j));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::int64_t run_discrete(BorderAggregation& scratch, RandomStream& rng) {
  scratch.reset();
  while (!scratch.root_sticky()) scratch.release(rng);
  return scratch.particles();
}

AggregationOutcome run_discrete(int height, unsigned b, RandomStream& rng, bool record_trajectory) {
  BorderAggregation bam(height, b);
  AggregationOutcome out;
  while (!bam.root_sticky()) {
    const NodePath v = bam.release(rng);
    if (record_trajectory) out.trajectory.push_back(v);
  }
  out.particles = bam.particles();
  return out;
}

AggregationOutcome run_continuous(int height, unsigned b, RandomStream& rng) {
  RandomStream arrivals = rng.derive(rng.next_u64());
  AggregationOutcome out = run_discrete(height, b, rng);
  double t = 0.0;
  for (std::int64_t i = 0; i < out.particles; ++i) t += arrivals.next_exponential(1.0);
  out.time = t;
  return out;
}

CoupledOutcome run_coupled(int depth, const EdgeWeightField& field) {
  if (depth < 0) throw ConfigError("depth must be non-negative");
  if (depth > field.depth_cap()) throw CapacityError("weight field does not cover the coupling depth");
  const unsigned b = field.branching();

  struct Ring {
    double time;
    std::uint64_t index;
    int depth;
  };
  auto later = [](const Ring& x, const Ring& y) {
    return x.time > y.time || (x.time == y.time && x.index > y.index);
  };
  std::priority_queue<Ring, std::vector<Ring>, decltype(later)> queue(later);
  std::vector<std::uint8_t> entered(NodePath::count_up_to(b, depth) + 1, 0);

  const std::uint64_t first = NodePath::level_begin(b, depth);
  const std::uint64_t last = NodePath::count_up_to(b, depth);
  for (std::uint64_t v = first; v <= last; ++v) {
    entered[v] = 1;
    queue.push(Ring{0.0 + field.weight(v, depth), v, depth});
  }

  CoupledOutcome out;
  while (!queue.empty()) {
    const Ring r = queue.top();
    queue.pop();
    // Stale unless no strict ancestor has joined A since r was scheduled.
    bool stale = false;
    for (std::uint64_t u = r.index; u != 1;) {
      u = heap::parent(u, b);
      if (entered[u]) {
        stale = true;
        break;
      }
    }
    if (stale) continue;
    ++out.events;
    if (r.index == 1) {
      out.aggregation_time = r.time;
      out.passage_time = deepest_passage_time(field, depth);
      return out;
    }
    const std::uint64_t parent = heap::parent(r.index, b);
    entered[parent] = 1;
    queue.push(Ring{r.time + field.weight(parent, r.depth - 1), parent, r.depth - 1});
  }
  throw Error("absorption run ended without the root ringing");
}

double recursion_sample_xi(int height, unsigned b, RandomStream& rng) {
  if (height < 1) throw ConfigError("tree height must be at least 1");
  if (height == 1) return rng.next_exponential(1.0);
  double m = std::numeric_limits<double>::infinity();
  for (unsigned j = 0; j < b; ++j) m = std::min(m, recursion_sample_xi(height - 1, b, rng));
  return b * m + rng.next_exponential(1.0);
}

}  // namespace dstbam
