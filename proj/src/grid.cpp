#include "nsmooth/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsmooth/errors.hpp"

namespace nsmooth {

namespace {

std::size_t total_cells(const std::vector<std::size_t>& cells) {
  std::size_t n = 1;
  for (auto c : cells) n *= c;
  return n;
}

// Inverse CDF of a piecewise-uniform 1-d density at t in [0, 1].
struct QuantileFunction {
  const GridDensity& g;
  std::vector<double> cumulative;  // cumulative[i] = mass of cells < i

  explicit QuantileFunction(const GridDensity& grid) : g(grid), cumulative(grid.mass.size() + 1, 0.0) {
    for (std::size_t i = 0; i < grid.mass.size(); ++i) cumulative[i + 1] = cumulative[i] + grid.mass[i];
  }

  double operator()(double t) const {
    const double total = cumulative.back();
    t = std::clamp(t * total, 0.0, total);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), t);
    std::size_t cell = it == cumulative.begin() ? 0 : static_cast<std::size_t>(it - cumulative.begin()) - 1;
    cell = std::min(cell, g.mass.size() - 1);
    // skip empty cells to the left of t
    while (cell > 0 && g.mass[cell] == 0.0 && cumulative[cell] >= t) --cell;
    const double inside = g.mass[cell] > 0.0 ? (t - cumulative[cell]) / g.mass[cell] : 0.0;
    return g.lower[0] + g.width(0) * (static_cast<double>(cell) + std::clamp(inside, 0.0, 1.0));
  }
};

}  // namespace

bool GridDensity::same_grid(const GridDensity& other) const {
  return cells == other.cells && lower == other.lower && upper == other.upper;
}

GridDensity discretize(const std::function<double(ConstVecRef)>& potential, std::vector<double> lower,
                       std::vector<double> upper, std::vector<std::size_t> cells) {
  const std::size_t d = cells.size();
  if (d == 0 || d > 2) throw InvalidInput("grid densities support one or two dimensions");
  if (lower.size() != d || upper.size() != d) throw InvalidInput("grid box does not match the dimension");
  for (std::size_t a = 0; a < d; ++a)
    if (!(upper[a] > lower[a]) || cells[a] == 0) throw InvalidInput("grid box must be non-degenerate");

  GridDensity g{std::move(lower), std::move(upper), std::move(cells), {}};
  const std::size_t n = total_cells(g.cells);
  std::vector<double> log_density(n);
  Vec x(static_cast<Eigen::Index>(d));
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rem = idx;
    for (std::size_t a = d; a-- > 0;) {
      const std::size_t i = rem % g.cells[a];
      rem /= g.cells[a];
      x[static_cast<Eigen::Index>(a)] = g.lower[a] + g.width(a) * (static_cast<double>(i) + 0.5);
    }
    log_density[idx] = -potential(x);
  }
  const double top = *std::max_element(log_density.begin(), log_density.end());
  g.mass.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += (g.mass[i] = std::exp(log_density[i] - top));
  for (double& m : g.mass) m /= total;
  return g;
}

GridOracle make_grid_oracle(const SmoothedPotential& potential, std::size_t cells_per_axis) {
  const std::size_t d = potential.dim();
  if (d > 2) throw InvalidInput("grid oracle supports d <= 2");
  const auto alpha = potential.base().constants().strong_convexity;
  if (!alpha || !(*alpha > 0.0)) throw InvalidInput("grid oracle needs a strongly convex smooth part");

  // Mode of s_beta by gradient descent at step 1 / L.
  Vec mode = Vec::Zero(static_cast<Eigen::Index>(d));
  Vec grad(static_cast<Eigen::Index>(d));
  const double step = 1.0 / potential.smoothness_constant();
  for (int it = 0; it < 20000; ++it) {
    potential.gradient(mode, grad);
    mode -= step * grad;
    if (grad.norm() < 1e-12) break;
  }

  constexpr double kTail = 1e-6;
  const double spread = 1.0 / std::sqrt(*alpha);
  const double radius =
      std::max(6.0 * spread, spread + std::sqrt(2.0 * std::log(2.0 * static_cast<double>(d) / kTail) / *alpha));
  std::vector<double> lo(d), hi(d);
  for (std::size_t a = 0; a < d; ++a) {
    lo[a] = mode[static_cast<Eigen::Index>(a)] - radius;
    hi[a] = mode[static_cast<Eigen::Index>(a)] + radius;
  }
  const std::vector<std::size_t> cells(d, cells_per_axis);

  GridOracle oracle;
  const auto& base = potential.base();
  oracle.target = discretize([&](ConstVecRef x) { return base.value(x); }, lo, hi, cells);
  oracle.smoothed = discretize([&](ConstVecRef x) { return potential.value(x); }, lo, hi, cells);
  // Gaussian concentration of an alpha-strongly log-concave law, per axis,
  // after allowing one spread for the mode-to-mean offset.
  const double t = radius - spread;
  oracle.truncated_mass = static_cast<double>(d) * 2.0 * std::exp(-0.5 * *alpha * t * t);
  return oracle;
}

double grid_tv(const GridDensity& p, const GridDensity& q) {
  if (!p.same_grid(q)) throw InvalidInput("TV needs densities on the same grid");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.mass.size(); ++i) acc += std::abs(p.mass[i] - q.mass[i]);
  return 0.5 * acc;
}

GridDensity histogram(const GridDensity& like, std::span<const Vec> samples) {
  if (samples.empty()) throw InvalidInput("histogram of an empty sample set");
  GridDensity h{like.lower, like.upper, like.cells, std::vector<double>(like.mass.size(), 0.0)};
  const double weight = 1.0 / static_cast<double>(samples.size());
  for (const Vec& s : samples) {
    std::size_t idx = 0;
    bool inside = true;
    for (std::size_t a = 0; a < like.dim() && inside; ++a) {
      const double pos = (s[static_cast<Eigen::Index>(a)] - like.lower[a]) / like.width(a);
      if (!(pos >= 0.0 && pos < static_cast<double>(like.cells[a]))) inside = false;
      else idx = idx * like.cells[a] + static_cast<std::size_t>(pos);
    }
    if (inside) h.mass[idx] += weight;
  }
  return h;
}

double grid_tv(const GridDensity& p, std::span<const Vec> samples) {
  const GridDensity h = histogram(p, samples);
  double acc = 0.0, inside = 0.0;
  for (std::size_t i = 0; i < p.mass.size(); ++i) {
    acc += std::abs(p.mass[i] - h.mass[i]);
    inside += h.mass[i];
  }
  // mass of the samples outside the box has no counterpart in p
  return 0.5 * (acc + std::max(0.0, 1.0 - inside));
}

double grid_w2_1d(const GridDensity& p, const GridDensity& q) {
  if (p.dim() != 1 || q.dim() != 1) throw InvalidInput("grid_w2_1d needs one-dimensional densities");
  if (p.mass.empty() || q.mass.empty()) throw InvalidInput("grid_w2_1d needs non-empty densities");
  const QuantileFunction fp(p), fq(q);
  std::vector<double> knots;
  knots.reserve(p.mass.size() + q.mass.size() + 2);
  for (double c : fp.cumulative) knots.push_back(c / fp.cumulative.back());
  for (double c : fq.cumulative) knots.push_back(c / fq.cumulative.back());
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  // Both quantile functions are linear between knots; Simpson is exact there.
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double t0 = knots[i], t1 = knots[i + 1];
    if (!(t1 > t0)) continue;
    const double tm = 0.5 * (t0 + t1);
    const double d0 = fp(t0) - fq(t0);
    const double dm = fp(tm) - fq(tm);
    const double d1 = fp(t1) - fq(t1);
    acc += (t1 - t0) * (d0 * d0 + 4.0 * dm * dm + d1 * d1) / 6.0;
  }
  return std::sqrt(std::max(acc, 0.0));
}

double empirical_w2_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("W2 of an empty sample set");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  // Quantile functions are step functions with jumps at i/n and j/m.
  const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double t = 0.0, acc = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double next = std::min((static_cast<double>(i) + 1.0) / na, (static_cast<double>(j) + 1.0) / nb);
    const double diff = sa[i] - sb[j];
    acc += (next - t) * diff * diff;
    t = next;
    if ((static_cast<double>(i) + 1.0) / na <= t) ++i;
    if ((static_cast<double>(j) + 1.0) / nb <= t) ++j;
  }
  return std::sqrt(acc);
}

}  // namespace nsmooth
