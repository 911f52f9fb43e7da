#include "mmnn/ann_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmnn/error.hpp"

namespace mmnn {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr int kMaxLevels = 2100;  // below 2^-1074 every distinct double pair separates

// Neighbor lists keep centers within this many radii; 4 is the smallest
// factor for which the lists of level l+1 can be derived from those of level l.
constexpr double kNeighborFactor = 4.0;

// Relative slack on pruning so that rounding in the triangle inequality never
// discards the true nearest neighbor.
constexpr double kPruneSlack = 1.0 + 8.0 * std::numeric_limits<double>::epsilon();

bool better(double d, std::uint32_t id, double best, std::uint32_t best_id) {
  return d < best || (d == best && id < best_id);
}

}  // namespace

NetHierarchy::NetHierarchy(std::span<const Point> points, std::vector<std::uint32_t> ids,
                           const MetricOracle& oracle)
    : point_count_(ids.size()) {
  if (ids.empty()) throw ValidationError("cannot build a net hierarchy over no points");

  const std::uint32_t root = ids.front();
  // Per point (indexed like ids): assigned center position at the current
  // level and the distance to it.
  std::vector<std::uint32_t> assigned(ids.size(), 0);
  std::vector<double> assigned_dist(ids.size(), 0.0);
  std::vector<bool> is_center(ids.size(), false);
  is_center[0] = true;
  double far = 0.0;
  for (std::size_t i = 1; i < ids.size(); ++i) {
    assigned_dist[i] = oracle(points[root], points[ids[i]]);
    far = std::max(far, assigned_dist[i]);
  }
  if (far > 0.0) {
    int e = 0;
    const double m = std::frexp(far, &e);  // far = m * 2^e, m in [0.5, 1)
    top_exponent_ = (m == 0.5) ? e - 1 : e;
  }

  Level top;
  top.centers = {root};
  levels_.push_back(std::move(top));
  std::vector<std::vector<std::uint32_t>> neighbors{{0}};

  for (int level = 0;; ++level) {
    std::vector<std::uint32_t> live;
    for (std::uint32_t i = 0; i < ids.size(); ++i)
      if (!is_center[i] && assigned_dist[i] > 0.0) live.push_back(i);
    if (live.empty() || level + 1 >= kMaxLevels) break;

    const double r_next = radius(static_cast<std::size_t>(level) + 1);
    Level& cur = levels_.back();
    const std::size_t ncur = cur.centers.size();

    std::vector<std::vector<std::uint32_t>> kids(ncur);
    std::vector<std::uint32_t> next_centers = cur.centers;
    std::vector<std::uint32_t> parent(ncur);
    for (std::uint32_t c = 0; c < ncur; ++c) {
      kids[c].push_back(c);
      parent[c] = c;
    }

    for (std::uint32_t i : live) {
      const std::uint32_t a = assigned[i];
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t best_pos = kNone;
      for (std::uint32_t nb : neighbors[a]) {
        for (std::uint32_t ch : kids[nb]) {
          const double d = oracle(points[ids[i]], points[next_centers[ch]]);
          if (better(d, ch, best, best_pos)) {
            best = d;
            best_pos = ch;
          }
        }
      }
      if (best <= r_next) {
        assigned[i] = best_pos;
        assigned_dist[i] = best;
      } else {
        const auto pos = static_cast<std::uint32_t>(next_centers.size());
        next_centers.push_back(ids[i]);
        kids[a].push_back(pos);
        parent.push_back(a);
        is_center[i] = true;
        assigned[i] = pos;
        assigned_dist[i] = 0.0;
      }
    }

    // Children in CSR form for the current level.
    cur.child_offsets.assign(ncur + 1, 0);
    for (std::size_t c = 0; c < ncur; ++c)
      cur.child_offsets[c + 1] = cur.child_offsets[c] + static_cast<std::uint32_t>(kids[c].size());
    cur.children.reserve(cur.child_offsets.back());
    for (const auto& k : kids) cur.children.insert(cur.children.end(), k.begin(), k.end());

    // Neighbor lists for the new level, derived from the parents' lists.
    std::vector<std::vector<std::uint32_t>> next_neighbors(next_centers.size());
    const double reach = kNeighborFactor * r_next;
    for (std::uint32_t q = 0; q < next_centers.size(); ++q) {
      for (std::uint32_t nb : neighbors[parent[q]]) {
        for (std::uint32_t ch : kids[nb]) {
          if (ch == q || oracle(points[next_centers[q]], points[next_centers[ch]]) <= reach)
            next_neighbors[q].push_back(ch);
        }
      }
      std::sort(next_neighbors[q].begin(), next_neighbors[q].end());
    }

    Level next;
    next.centers = std::move(next_centers);
    levels_.push_back(std::move(next));
    neighbors = std::move(next_neighbors);
  }

  // Bottom level: leaf children lists are empty; points still unassigned to
  // themselves coincide with their center and become duplicates.
  Level& bottom = levels_.back();
  const std::size_t nb = bottom.centers.size();
  bottom.child_offsets.assign(nb + 1, 0);
  std::vector<std::vector<std::uint32_t>> dups(nb);
  for (std::uint32_t i = 0; i < ids.size(); ++i)
    if (!is_center[i]) dups[assigned[i]].push_back(ids[i]);
  dup_offsets_.assign(nb + 1, 0);
  for (std::size_t c = 0; c < nb; ++c)
    dup_offsets_[c + 1] = dup_offsets_[c] + static_cast<std::uint32_t>(dups[c].size());
  for (const auto& d : dups) dups_.insert(dups_.end(), d.begin(), d.end());
}

double NetHierarchy::radius(std::size_t level) const {
  return std::ldexp(1.0, top_exponent_ - static_cast<int>(level));
}

std::span<const std::uint32_t> NetHierarchy::children(std::size_t level, std::size_t pos) const {
  const Level& l = levels_[level];
  if (l.child_offsets.empty()) return {};
  return std::span<const std::uint32_t>(l.children).subspan(
      l.child_offsets[pos], l.child_offsets[pos + 1] - l.child_offsets[pos]);
}

std::span<const std::uint32_t> NetHierarchy::duplicates(std::size_t pos) const {
  return std::span<const std::uint32_t>(dups_).subspan(dup_offsets_[pos],
                                                       dup_offsets_[pos + 1] - dup_offsets_[pos]);
}

NetHierarchy::Hit NetHierarchy::search(const Point& x, std::span<const Point> points,
                                       const MetricOracle& oracle, double eta) const {
  struct Node {
    std::uint32_t pos;
    double dist;
  };
  const std::uint32_t root = levels_[0].centers[0];
  Hit best{root, oracle(x, points[root])};
  std::vector<Node> frontier{{0, best.dist}};
  std::vector<Node> next;

  for (std::size_t level = 0; level + 1 < levels_.size(); ++level) {
    const auto& child_centers = levels_[level + 1].centers;
    next.clear();
    for (const Node& node : frontier) {
      const auto kids = children(level, node.pos);
      for (std::size_t c = 0; c < kids.size(); ++c) {
        const std::uint32_t pos = kids[c];
        const std::uint32_t id = child_centers[pos];
        // The first child is the parent itself.
        const double d = (c == 0) ? node.dist : oracle(x, points[id]);
        if (better(d, id, best.dist, best.id)) best = {id, d};
        next.push_back({pos, d});
      }
    }
    const double reach = 2.0 * radius(level + 1);
    const double bound = (best.dist / (1.0 + eta) + reach) * kPruneSlack;
    frontier.clear();
    for (const Node& node : next)
      if (node.dist <= bound) frontier.push_back(node);
  }
  for (const Node& node : frontier) {
    for (std::uint32_t id : duplicates(node.pos)) {
      const double d = oracle(x, points[id]);
      if (better(d, id, best.dist, best.id)) best = {id, d};
    }
  }
  return best;
}

NnIndex::NnIndex(std::vector<Point> points, std::vector<Label> labels, MetricOracle oracle,
                 NnMode mode, double eta)
    : points_(std::move(points)),
      labels_(std::move(labels)),
      oracle_(oracle),
      mode_(mode),
      eta_(mode == NnMode::Exact ? 0.0 : eta) {
  if (points_.empty()) throw ValidationError("nearest-neighbor index needs at least one point");
  if (points_.size() != labels_.size())
    throw ValidationError("index points and labels differ in length");
  if (points_.size() >= kNone) throw ValidationError("index too large");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ValidationError("eta must be >= 0 and finite");
  for (const auto& p : points_) oracle_.check_payload(p);

  present_ = labels_;
  std::sort(present_.begin(), present_.end());
  present_.erase(std::unique(present_.begin(), present_.end()), present_.end());

  if (mode_ == NnMode::Approximate) {
    std::vector<std::uint32_t> all(points_.size());
    for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    all_ = NetHierarchy(points_, std::move(all), oracle_);
    for (Label y : present_) {
      std::vector<std::uint32_t> ids;
      for (std::uint32_t i = 0; i < points_.size(); ++i)
        if (labels_[i] == y) ids.push_back(i);
      per_label_.emplace_back(points_, std::move(ids), oracle_);
    }
  }
}

const NetHierarchy& NnIndex::label_hierarchy(Label y) const {
  auto it = std::lower_bound(present_.begin(), present_.end(), y);
  if (it == present_.end() || *it != y || per_label_.empty())
    throw ValidationError("no hierarchy for label " + std::to_string(y));
  return per_label_[static_cast<std::size_t>(it - present_.begin())];
}

NnAnswer NnIndex::query(const Point& x) const {
  oracle_.check_payload(x);
  if (mode_ == NnMode::Approximate) {
    const auto hit = all_.search(x, points_, oracle_, eta_);
    return {hit.id, labels_[hit.id], hit.dist};
  }
  NnAnswer best{0, labels_[0], oracle_(x, points_[0])};
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double d = oracle_(x, points_[i]);
    if (d < best.dist) best = {i, labels_[i], d};
  }
  return best;
}

std::vector<LabelNeighbor> NnIndex::query_per_label(const Point& x) const {
  oracle_.check_payload(x);
  std::vector<LabelNeighbor> out;
  out.reserve(present_.size());
  if (mode_ == NnMode::Approximate) {
    for (std::size_t j = 0; j < present_.size(); ++j) {
      const auto hit = per_label_[j].search(x, points_, oracle_, eta_);
      out.push_back({present_[j], hit.dist, hit.id});
    }
    return out;
  }
  for (Label y : present_)
    out.push_back({y, std::numeric_limits<double>::infinity(), points_.size()});
  for (std::size_t i = 0; i < points_.size(); ++i) {
    auto it = std::lower_bound(present_.begin(), present_.end(), labels_[i]);
    auto& slot = out[static_cast<std::size_t>(it - present_.begin())];
    const double d = oracle_(x, points_[i]);
    if (d < slot.dist) {
      slot.dist = d;
      slot.index = i;
    }
  }
  return out;
}

}  // namespace mmnn
