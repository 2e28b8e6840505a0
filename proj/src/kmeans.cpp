#include <algorithm>
#include <limits>
#include <numeric>

#include "kpa/error.hpp"
#include "kpa/partition.hpp"
#include "kpa/random.hpp"

namespace kpa {

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double x = a[t] - b[t];
    d += x * x;
  }
  return d;
}

std::size_t nearest(const std::vector<double>& p, const std::vector<std::vector<double>>& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

double inertia(std::span<const std::vector<double>> points, const std::vector<std::size_t>& assignment,
               std::size_t k) {
  const std::size_t dim = points[0].size();
  std::vector<std::vector<double>> means(k, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    ++sizes[assignment[i]];
    for (std::size_t t = 0; t < dim; ++t) means[assignment[i]][t] += points[i][t];
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (double& x : means[c]) x /= static_cast<double>(sizes[c]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) total += squared_distance(points[i], means[assignment[i]]);
  return total;
}

/// Uniform draw in [0, 1) from the top 53 bits.
double unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// k distinct point indices, uniformly without replacement.
std::vector<std::size_t> uniform_seeds(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t c = 0; c < k; ++c) std::swap(order[c], order[c + uniform_index(rng, n - c)]);
  order.resize(k);
  return order;
}

/// k-means++ seeding: each further seed is drawn with probability
/// proportional to its squared distance to the nearest chosen seed. When every
/// unchosen point coincides with a seed, the draw falls back to uniform over
/// unchosen points, so seeds are always distinct vertices.
std::vector<std::size_t> plus_plus_seeds(std::span<const std::vector<double>> points, std::size_t k,
                                         Rng& rng) {
  const std::size_t n = points.size();
  std::vector<std::size_t> seeds{uniform_index(rng, n)};
  std::vector<char> chosen(n, 0);
  chosen[seeds[0]] = 1;
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], points[seeds[0]]);
  while (seeds.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += chosen[i] ? 0.0 : d2[i];
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i] || d2[i] == 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > target) break;
      }
    } else {
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) rest.push_back(i);
      }
      pick = rest[uniform_index(rng, rest.size())];
    }
    chosen[pick] = 1;
    seeds.push_back(pick);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points[i], points[pick]));
  }
  return seeds;
}

/// One Lloyd run from k distinct seed points drawn from `rng`.
KMeansResult lloyd(std::span<const std::vector<double>> points, std::size_t k, Rng& rng,
                   const KMeansOptions& opt) {
  const std::size_t n = points.size();
  const std::size_t dim = points[0].size();

  const auto seeds = opt.init == KMeansInit::PlusPlus ? plus_plus_seeds(points, k, rng) : uniform_seeds(n, k, rng);
  std::vector<std::vector<double>> centroids(k);
  for (std::size_t c = 0; c < k; ++c) centroids[c] = points[seeds[c]];

  KMeansResult r;
  std::vector<std::size_t> assignment(n);
  std::vector<std::size_t> previous;
  const std::size_t limit = std::max<std::size_t>(opt.max_iters, 1);
  while (true) {
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      assignment[i] = nearest(points[i], centroids);
      ++sizes[assignment[i]];
    }
    // Empty clusters take the point farthest from its centroid.
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[assignment[i]] < 2) continue;
        const double d = squared_distance(points[i], centroids[assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      --sizes[assignment[far]];
      assignment[far] = c;
      sizes[c] = 1;
      centroids[c] = points[far];
    }
    ++r.iterations;
    if (assignment == previous || r.iterations >= limit) break;
    previous = assignment;

    for (auto& c : centroids) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& c = centroids[assignment[i]];
      for (std::size_t t = 0; t < dim; ++t) c[t] += points[i][t];
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (double& x : centroids[c]) x /= static_cast<double>(sizes[c]);
    }
  }
  r.inertia = inertia(points, assignment, k);
  r.assignment = std::move(assignment);
  return r;
}

}  // namespace

KMeansResult kmeans(std::span<const std::vector<double>> points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& opt) {
  const std::size_t n = points.size();
  if (k < 1 || k > n) {
    throw Error(ErrorKind::Precondition, "k-means needs 1 <= k <= " + std::to_string(n) +
                                             ", got " + std::to_string(k));
  }
  const std::size_t dim = points[0].size();
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(ErrorKind::Precondition, "k-means: dimension mismatch");
  }
  Rng rng(splitmix64(seed));
  KMeansResult best = lloyd(points, k, rng, opt);
  for (std::size_t run = 1; run < opt.restarts; ++run) {
    KMeansResult r = lloyd(points, k, rng, opt);
    if (r.inertia < best.inertia) best = std::move(r);
  }
  return best;
}

Partition kmeans_init(const EmbeddingTable& emb, const std::vector<std::string>& vertices,
                      std::size_t s, std::uint64_t seed, const KMeansOptions& opt) {
  if (s < 1 || s > vertices.size()) {
    throw Error(ErrorKind::Precondition, "number of subgraphs " + std::to_string(s) +
                                             " must be in [1, " + std::to_string(vertices.size()) + "]");
  }
  emb.check_covers(vertices);
  std::vector<std::vector<double>> points;
  points.reserve(vertices.size());
  for (const auto& v : vertices) points.push_back(emb.vectors.at(v));
  const auto r = kmeans(points, s, seed, opt);
  Partition p;
  p.subgraphs.resize(s);
  for (std::size_t i = 0; i < vertices.size(); ++i) p.subgraphs[r.assignment[i]].insert(vertices[i]);
  return p;
}

}  // namespace kpa
