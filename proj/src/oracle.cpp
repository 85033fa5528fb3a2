#include "dstbam/oracle.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "dstbam/errors.hpp"
#include "dstbam/node_path.hpp"

namespace dstbam {

namespace {

constexpr std::size_t kStateBudget = 500000;

}  // namespace

std::vector<Rational> exact_height_cdf(int height, int n_max, unsigned b) {
  if (height < 0 || n_max < 0) throw ConfigError("height and n_max must be non-negative");
  if (b < 2) throw ConfigError("branching factor must be at least 2");
  if (height > 6 || n_max > 64) throw CapacityError("exact height oracle budget is K <= 6, n_max <= 64");

  std::vector<Rational> out;
  out.reserve(static_cast<std::size_t>(n_max) + 1);
  if (height == 0) {
    out.assign(static_cast<std::size_t>(n_max) + 1, Rational(1));
    return out;
  }

  std::vector<Rational> depth_mass;
  for (int d = 0; d < height; ++d) depth_mass.push_back(inverse_power(b, d));

  std::map<DepthProfile, Rational> live;
  DepthProfile empty;
  empty.counts.assign(static_cast<std::size_t>(height), 0);
  empty.counts[0] = 1;
  live.emplace(empty, Rational(1));
  Rational absorbed = 0;
  out.push_back(absorbed);  // D_0 has height 0 < K

  for (int n = 1; n <= n_max; ++n) {
    std::map<DepthProfile, Rational> next;
    for (const auto& [profile, p] : live) {
      for (int d = 0; d < height; ++d) {
        const auto c = profile.counts[static_cast<std::size_t>(d)];
        if (c == 0) continue;
        const Rational step = p * depth_mass[static_cast<std::size_t>(d)] * c;
        if (d == height - 1) {
          absorbed += step;
          continue;
        }
        DepthProfile child = profile;
        child.counts[static_cast<std::size_t>(d)] -= 1;
        child.counts[static_cast<std::size_t>(d) + 1] += b;
        next[child] += step;
      }
    }
    if (next.size() > kStateBudget) throw CapacityError("depth-profile state budget exceeded");
    live = std::move(next);
    out.push_back(absorbed);
  }
  return out;
}

namespace {

// Unordered shape of the region above the absorption set. A leaf "a" is a
// node of A; an inner node lists its b child shapes in sorted order.
struct Shape {
  bool absorbing = false;
  std::vector<Shape> kids;
};

std::string encode(const Shape& s) {
  if (s.absorbing) return "a";
  std::vector<std::string> parts;
  parts.reserve(s.kids.size());
  for (const auto& k : s.kids) parts.push_back(encode(k));
  std::sort(parts.begin(), parts.end());
  std::string out = "(";
  for (const auto& p : parts) out += p;
  out += ")";
  return out;
}

Shape decode(const std::string& text, std::size_t& pos) {
  Shape s;
  if (text[pos] == 'a') {
    ++pos;
    s.absorbing = true;
    return s;
  }
  ++pos;  // '('
  while (text[pos] != ')') s.kids.push_back(decode(text, pos));
  ++pos;
  return s;
}

Shape full_shape(int levels, unsigned b) {
  Shape s;
  if (levels == 0) {
    s.absorbing = true;
    return s;
  }
  s.kids.assign(b, full_shape(levels - 1, b));
  return s;
}

struct Move {
  std::string next;  // empty: the root itself stuck
  Rational mass;
};

// Every way the next particle can freeze, below a node at `depth`.
void moves(const Shape& s, int depth, unsigned b, std::vector<std::pair<Shape, Rational>>& out) {
  for (std::size_t i = 0; i < s.kids.size(); ++i) {
    if (s.kids[i].absorbing) {
      Shape collapsed;
      collapsed.absorbing = true;
      out.emplace_back(std::move(collapsed), inverse_power(b, depth + 1));
      continue;
    }
    std::vector<std::pair<Shape, Rational>> sub;
    moves(s.kids[i], depth + 1, b, sub);
    for (auto& [kid, mass] : sub) {
      Shape copy = s;
      copy.kids[i] = std::move(kid);
      out.emplace_back(std::move(copy), std::move(mass));
    }
  }
}

std::vector<Move> transitions(const std::string& key, unsigned b) {
  std::size_t pos = 0;
  const Shape s = decode(key, pos);
  if (s.absorbing) return {Move{"", Rational(1)}};
  std::vector<std::pair<Shape, Rational>> raw;
  moves(s, 0, b, raw);
  std::map<std::string, Rational> merged;
  for (auto& [shape, mass] : raw) merged[encode(shape)] += mass;
  std::vector<Move> out;
  for (auto& [k, m] : merged) out.push_back(Move{k, m});
  return out;
}

}  // namespace

Pmf exact_xi_pmf(int height, unsigned b) {
  if (height < 1) throw ConfigError("tree height must be at least 1");
  if (b < 2) throw ConfigError("branching factor must be at least 2");
  if (height - 1 > NodePath::max_depth(b) || NodePath::count_up_to(b, height - 1) > 15) {
    throw CapacityError("exact aggregation oracle budget is at most 15 internal nodes");
  }

  std::map<std::string, std::vector<Move>> memo;
  std::map<std::string, Rational> live;
  live.emplace(encode(full_shape(height - 1, b)), Rational(1));
  Pmf pmf;
  for (std::int64_t n = 1; !live.empty(); ++n) {
    std::map<std::string, Rational> next;
    for (const auto& [key, p] : live) {
      auto it = memo.find(key);
      if (it == memo.end()) it = memo.emplace(key, transitions(key, b)).first;
      for (const auto& move : it->second) {
        if (move.next.empty()) {
          pmf[n] += p * move.mass;
        } else {
          next[move.next] += p * move.mass;
        }
      }
    }
    if (memo.size() > kStateBudget) throw CapacityError("absorption-set state budget exceeded");
    live = std::move(next);
  }
  return pmf;
}

TcCheck check_tc_exact(int height, unsigned b) {
  const Pmf xi = exact_xi_pmf(height, b);
  const auto n_max = static_cast<int>(xi.rbegin()->first);
  const auto tail = exact_height_cdf(height, n_max, b);
  TcCheck check;
  check.height = height;
  check.branching = b;
  check.equal = true;
  for (int n = 0; n <= n_max; ++n) {
    TcCheckRow row{n, cdf_at(xi, n), tail[static_cast<std::size_t>(n)]};
    if (row.xi_cdf != row.height_tail) check.equal = false;
    check.rows.push_back(std::move(row));
  }
  return check;
}

std::string TcCheck::report() const {
  std::ostringstream os;
  os << "K=" << height << " b=" << branching << "\n";
  os << "n\tP(xi_K<=n)\tP(h_e(D_n)>=K)\n";
  for (const auto& r : rows) os << r.n << '\t' << to_string(r.xi_cdf) << '\t' << to_string(r.height_tail) << '\n';
  os << (equal ? "EQUAL" : "DIFFER") << '\n';
  return os.str();
}

}  // namespace dstbam
