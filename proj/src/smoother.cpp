#include "resdens/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "resdens/error.hpp"
#include "resdens/summation.hpp"

namespace resdens {

void check_bandwidth(double b, const char* name) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw InvalidBandwidth(std::string(name) + " must be a positive finite number");
  }
}

// ---------------------------------------------------------------- NeighborGrid

NeighborGrid::NeighborGrid(const Dataset& data, double b)
    : dim_(data.dim()), width_(0.5 * b * (1.0 + 1e-9)) {
  check_bandwidth(b, "bandwidth");
  const std::size_t n = data.size();
  std::vector<std::int64_t> cells(n * dim_);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = cell_of(data.x(i));
    std::copy(c.begin(), c.end(), cells.begin() + i * dim_);
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  auto key_less = [&](std::uint32_t a, std::uint32_t b2) {
    return std::lexicographical_compare(
        cells.begin() + a * dim_, cells.begin() + (a + 1) * dim_,
        cells.begin() + b2 * dim_, cells.begin() + (b2 + 1) * dim_);
  };
  std::stable_sort(order_.begin(), order_.end(), key_less);
  for (std::size_t k = 0; k < n; ++k) {
    const auto* key = cells.data() + order_[k] * dim_;
    const bool fresh =
        k == 0 || !std::equal(key, key + dim_, cells.data() + order_[k - 1] * dim_);
    if (fresh) {
      keys_.insert(keys_.end(), key, key + dim_);
      start_.push_back(k);
    }
  }
  start_.push_back(n);
}

std::vector<std::int64_t> NeighborGrid::cell_of(std::span<const double> x) const {
  std::vector<std::int64_t> c(dim_);
  for (std::size_t a = 0; a < dim_; ++a) {
    c[a] = static_cast<std::int64_t>(std::floor(x[a] / width_));
  }
  return c;
}

std::size_t NeighborGrid::find_cell(std::span<const std::int64_t> key) const {
  std::size_t lo = 0;
  std::size_t hi = start_.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const auto* k = keys_.data() + mid * dim_;
    if (std::lexicographical_compare(k, k + dim_, key.begin(), key.end())) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < start_.size() - 1 &&
      std::equal(key.begin(), key.end(), keys_.data() + lo * dim_)) {
    return lo;
  }
  return static_cast<std::size_t>(-1);
}

// --------------------------------------------------------------- NeighborTable

NeighborTable build_neighbor_table(const Dataset& data, const ProductKernel& k0,
                                   double b0) {
  check_bandwidth(b0, "b0");
  if (static_cast<std::size_t>(k0.dim()) != data.dim()) {
    throw DimensionError("kernel and data dimensions differ");
  }
  const std::size_t n = data.size();
  const NeighborGrid grid(data, b0);
  NeighborTable table;
  table.offsets.assign(n + 1, 0);

  // Pass 1 counts the nonzero weights per row so pass 2 can write straight
  // into the final arrays.
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto xi = data.x(i);
    std::size_t count = 0;
    grid.for_each_candidate(xi, [&](std::uint32_t j) {
      if (j != i && k0.eval_scaled_difference(data.x(j), xi, b0) != 0.0) ++count;
    });
    table.offsets[i + 1] = count;
  }
  for (std::size_t i = 0; i < n; ++i) table.offsets[i + 1] += table.offsets[i];
  table.index.resize(table.offsets[n]);
  table.weight.resize(table.offsets[n]);

#pragma omp parallel
  {
    using Hit = std::pair<std::uint32_t, double>;
    std::vector<Hit> hits, merged;
    std::vector<std::size_t> runs, next;
    auto by_index = [](const Hit& a, const Hit& b) { return a.first < b.first; };
#pragma omp for schedule(dynamic, 64)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      const auto xi = data.x(i);
      hits.clear();
      grid.for_each_candidate(xi, [&](std::uint32_t j) {
        if (j == i) return;
        const double w = k0.eval_scaled_difference(data.x(j), xi, b0);
        if (w != 0.0) hits.emplace_back(j, w);
      });
      // Each cell contributes an ascending run; merge runs pairwise until
      // one remains, which restores index order without a full sort.
      runs.assign(1, 0);
      for (std::size_t k = 1; k < hits.size(); ++k) {
        if (hits[k].first < hits[k - 1].first) runs.push_back(k);
      }
      runs.push_back(hits.size());
      while (runs.size() > 2) {
        merged.resize(hits.size());
        next.assign(1, 0);
        std::size_t r = 0;
        for (; r + 2 < runs.size(); r += 2) {
          std::merge(hits.begin() + runs[r], hits.begin() + runs[r + 1],
                     hits.begin() + runs[r + 1], hits.begin() + runs[r + 2],
                     merged.begin() + runs[r], by_index);
          next.push_back(runs[r + 2]);
        }
        if (r + 2 == runs.size()) {  // odd run out
          std::copy(hits.begin() + runs[r], hits.end(), merged.begin() + runs[r]);
          next.push_back(hits.size());
        }
        hits.swap(merged);
        runs.swap(next);
      }
      std::size_t k = table.offsets[i];
      for (const auto& [j, w] : hits) {
        table.index[k] = j;
        table.weight[k] = w;
        ++k;
      }
    }
  }
  return table;
}

// ------------------------------------------------------- LeaveOneOutSmoother

LeaveOneOutSmoother::LeaveOneOutSmoother(const Dataset& data, ProductKernel k0,
                                         double b0)
    : data_(data),
      k0_(std::move(k0)),
      b0_(b0),
      scale_(static_cast<double>(data.size()) *
             std::pow(b0, static_cast<double>(data.dim()))),
      table_(build_neighbor_table(data, k0_, b0)) {}

double LeaveOneOutSmoother::weight_sum(std::size_t i) const {
  NeumaierSum den;
  for (double w : table_.weights(i)) den += w;
  return den.value();
}

std::optional<double> LeaveOneOutSmoother::smooth(std::size_t i,
                                                  std::span<const double> values) const {
  const auto idx = table_.neighbors(i);
  const auto w = table_.weights(i);
  NeumaierSum num;
  NeumaierSum den;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    num += values[idx[k]] * w[k];
    den += w[k];
  }
  const double d = den.value();
  if (!(d > 0.0)) return std::nullopt;
  return num.value() / d;
}

void LeaveOneOutSmoother::smooth_all(std::span<const double> values,
                                     std::span<double> out,
                                     std::span<std::uint8_t> defined) const {
  const std::size_t n = data_.size();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto v = smooth(i, values);
    out[i] = v.value_or(0.0);
    defined[i] = v.has_value() ? 1 : 0;
  }
}

// ----------------------------------------------------------------- ResidualFit

std::size_t ResidualFit::n_kept() const {
  return static_cast<std::size_t>(std::count(kept.begin(), kept.end(), 1));
}

std::size_t ResidualFit::n_undefined() const {
  return static_cast<std::size_t>(std::count(defined.begin(), defined.end(), 0));
}

std::vector<double> ResidualFit::kept_residuals() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < residual.size(); ++i) {
    if (kept[i]) out.push_back(residual[i]);
  }
  return out;
}

// ------------------------------------------------------------------ free ops

double g_hat_n(const Dataset& data, const ProductKernel& k0, double b0,
               std::span<const double> x) {
  check_bandwidth(b0, "b0");
  if (x.size() != data.dim()) throw DimensionError("query point has wrong dimension");
  NeumaierSum acc;
  for (std::size_t i = 0; i < data.size(); ++i) {
    acc += k0.eval_scaled_difference(data.x(i), x, b0);
  }
  return acc.value() /
         (static_cast<double>(data.size()) * std::pow(b0, static_cast<double>(data.dim())));
}

double g_hat_n(const Dataset& data, const NeighborGrid& grid, const ProductKernel& k0,
               double b0, std::span<const double> x) {
  check_bandwidth(b0, "b0");
  if (x.size() != data.dim()) throw DimensionError("query point has wrong dimension");
  std::vector<std::uint32_t> hits;
  grid.for_each_candidate(x, [&](std::uint32_t j) { hits.push_back(j); });
  std::sort(hits.begin(), hits.end());
  NeumaierSum acc;
  for (auto j : hits) acc += k0.eval_scaled_difference(data.x(j), x, b0);
  return acc.value() /
         (static_cast<double>(data.size()) * std::pow(b0, static_cast<double>(data.dim())));
}

double g_bar_n(const DensityFnD& g, const ProductKernel& k0, double b0,
               std::span<const double> x, const QuadratureSpec& quad) {
  check_bandwidth(b0, "b0");
  const auto d = static_cast<std::size_t>(k0.dim());
  if (x.size() != d) throw DimensionError("query point has wrong dimension");
  const std::vector<double> lo(d, -0.5), hi(d, 0.5);
  std::vector<double> shifted(d);
  return integrate_box(
      [&](std::span<const double> z) {
        const double k = k0.eval(z);
        if (k == 0.0) return 0.0;
        for (std::size_t a = 0; a < d; ++a) shifted[a] = x[a] + b0 * z[a];
        return k * g(shifted);
      },
      lo, hi, quad);
}

double leave_one_out_g(const Dataset& data, const ProductKernel& k0, double b0,
                       std::size_t i) {
  check_bandwidth(b0, "b0");
  if (i >= data.size()) throw DataError("observation index out of range");
  const auto xi = data.x(i);
  NeumaierSum acc;
  for (std::size_t j = 0; j < data.size(); ++j) {
    if (j != i) acc += k0.eval_scaled_difference(data.x(j), xi, b0);
  }
  return acc.value() /
         (static_cast<double>(data.size()) * std::pow(b0, static_cast<double>(data.dim())));
}

std::optional<double> nw_leave_one_out(const Dataset& data, const ProductKernel& k0,
                                       double b0, std::size_t i) {
  check_bandwidth(b0, "b0");
  if (i >= data.size()) throw DataError("observation index out of range");
  const auto xi = data.x(i);
  NeumaierSum num;
  NeumaierSum den;
  for (std::size_t j = 0; j < data.size(); ++j) {
    if (j == i) continue;
    const double w = k0.eval_scaled_difference(data.x(j), xi, b0);
    if (w == 0.0) continue;
    num += data.y(j) * w;
    den += w;
  }
  const double d = den.value();
  if (!(d > 0.0)) return std::nullopt;
  return num.value() / d;
}

ResidualFit fit_residuals(const LeaveOneOutSmoother& smoother, const TrimRegion& trim) {
  const Dataset& data = smoother.data();
  if (trim.dim() != data.dim()) throw DimensionError("trim box has wrong dimension");
  const std::size_t n = data.size();
  ResidualFit fit;
  fit.b0 = smoother.b0();
  fit.m_hat.assign(n, 0.0);
  fit.g_hat.assign(n, 0.0);
  fit.residual.assign(n, 0.0);
  fit.defined.assign(n, 0);
  fit.kept.assign(n, 0);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    fit.g_hat[i] = smoother.g_hat(i);
    if (const auto m = smoother.m_hat(i)) {
      fit.m_hat[i] = *m;
      fit.residual[i] = data.y(i) - *m;
      fit.defined[i] = 1;
      fit.kept[i] = trim.contains(data.x(i)) ? 1 : 0;
    }
  }
  if (fit.n_kept() == 0) throw AllTrimmed();
  return fit;
}

ResidualFit fit_residuals(const Dataset& data, const ProductKernel& k0, double b0,
                          const TrimRegion& trim) {
  const LeaveOneOutSmoother smoother(data, k0, b0);
  return fit_residuals(smoother, trim);
}

std::vector<std::size_t> dependency_set(const Dataset& data, const ProductKernel& k0,
                                        double b0, std::size_t i) {
  check_bandwidth(b0, "b0");
  if (i >= data.size()) throw DataError("observation index out of range");
  std::vector<std::size_t> out;
  const auto xi = data.x(i);
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (k != i && k0.eval_scaled_difference(data.x(k), xi, b0) != 0.0) out.push_back(k);
  }
  return out;
}

}  // namespace resdens
