#include "ips/local_function.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace ips {

LocalFunction::LocalFunction(int dim, std::vector<Point> sites, std::vector<double> values)
    : dim_(dim), sites_(std::move(sites)) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("LocalFunction: bad dimension");
  if (static_cast<int>(sites_.size()) > kMaxArity)
    throw std::invalid_argument("LocalFunction: dependence set larger than 20 sites");
  for (std::size_t a = 0; a < sites_.size(); ++a)
    for (std::size_t b = a + 1; b < sites_.size(); ++b)
      if (sites_[a] == sites_[b])
        throw std::invalid_argument("LocalFunction: duplicate dependence site");
  const std::size_t want = std::size_t{1} << sites_.size();
  if (values.size() != want)
    throw std::invalid_argument("LocalFunction: value table must have 2^|D_f| entries");
  table_ = Eigen::Map<const Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

LocalFunction LocalFunction::constant(int dim, double value) {
  return LocalFunction(dim, {}, {value});
}

LocalFunction LocalFunction::occupancy(int dim, const Point& x) {
  return LocalFunction(dim, {x}, {0.0, 1.0});
}

double LocalFunction::eval(const Configuration& sigma) const {
  const Lattice& lat = sigma.lattice();
  std::uint32_t bits = 0;
  for (int j = 0; j < arity(); ++j) {
    if (sigma.at(lat.site_of(sites_[static_cast<std::size_t>(j)]))) bits |= bit_of(j);
  }
  return eval_bits(bits);
}

double LocalFunction::eval_chain(std::span<const std::uint8_t> chain) const {
  std::uint32_t bits = 0;
  for (int j = 0; j < arity(); ++j) {
    const int x = sites_[static_cast<std::size_t>(j)][0];
    if (x < 0 || static_cast<std::size_t>(x) >= chain.size())
      throw std::invalid_argument("eval_chain: dependence site outside chain");
    if (chain[static_cast<std::size_t>(x)]) bits |= bit_of(j);
  }
  return eval_bits(bits);
}

DeltaVector delta_vector(const LocalFunction& f) {
  const int m = f.arity();
  DeltaVector dv;
  dv.sites = f.sites();
  dv.values = Eigen::ArrayXd::Zero(m);
  const std::uint32_t n = 1u << m;
  for (int j = 0; j < m; ++j) {
    const std::uint32_t bj = f.bit_of(j);
    double best = 0.0;
    for (std::uint32_t eta = 0; eta < n; ++eta) {
      if (eta & bj) continue;  // visit each flip pair once
      const double d = std::fabs(f.eval_bits(eta | bj) - f.eval_bits(eta));
      best = std::max(best, d);
    }
    dv.values[j] = best;
  }
  return dv;
}

double lp_norm(std::span<const double> values, double p) {
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  double s = 0.0;
  for (double v : values) s += std::pow(std::fabs(v), p);
  return std::pow(s, 1.0 / p);
}

double lp_norm(const DeltaVector& dv, double p) {
  return lp_norm(std::span<const double>(dv.values.data(), static_cast<std::size_t>(dv.values.size())), p);
}

LocalFunction shift(const LocalFunction& f, const Point& dx) {
  std::vector<Point> sites = f.sites();
  for (Point& s : sites)
    for (int a = 0; a < kMaxDim; ++a) s[static_cast<std::size_t>(a)] += dx[static_cast<std::size_t>(a)];
  std::vector<double> values(f.table().data(), f.table().data() + f.table().size());
  return LocalFunction(f.dim(), std::move(sites), std::move(values));
}

LocalFunction spatial_average(const LocalFunction& f, const SpatialAverageSpec& spec,
                              const Lattice& lat) {
  if (spec.window.empty()) throw std::invalid_argument("spatial_average: empty window");

  // Union of shifted dependence sets, in deterministic (lex) order.
  std::map<Point, int> index_of;
  for (const Point& x : spec.window) {
    for (const Point& s : f.sites()) {
      Point t = s;
      for (int a = 0; a < kMaxDim; ++a) t[static_cast<std::size_t>(a)] += x[static_cast<std::size_t>(a)];
      index_of.emplace(t, 0);
    }
  }
  if (static_cast<int>(index_of.size()) > kMaxArity)
    throw std::invalid_argument("spatial_average: union dependence set exceeds 20 sites");

  std::vector<Point> union_sites;
  union_sites.reserve(index_of.size());
  for (auto& [pt, idx] : index_of) {
    idx = static_cast<int>(union_sites.size());
    union_sites.push_back(pt);
  }

  // Wrap-overlap: distinct union points must stay distinct on the torus.
  for (std::size_t a = 0; a < union_sites.size(); ++a)
    for (std::size_t b = a + 1; b < union_sites.size(); ++b)
      if (lat.site_of(union_sites[a]) == lat.site_of(union_sites[b]))
        throw std::invalid_argument("spatial_average: shifted copies wrap onto each other");

  const int m = static_cast<int>(union_sites.size());
  const int mf = f.arity();
  // Per window shift, map f's dependence site j -> union bit position.
  std::vector<std::vector<int>> positions(spec.window.size(), std::vector<int>(static_cast<std::size_t>(mf)));
  for (std::size_t w = 0; w < spec.window.size(); ++w) {
    for (int j = 0; j < mf; ++j) {
      Point t = f.sites()[static_cast<std::size_t>(j)];
      for (int a = 0; a < kMaxDim; ++a)
        t[static_cast<std::size_t>(a)] += spec.window[w][static_cast<std::size_t>(a)];
      positions[w][static_cast<std::size_t>(j)] = index_of.at(t);
    }
  }

  const double scale = std::pow(static_cast<double>(spec.window.size()), -spec.alpha);
  const std::uint32_t n = 1u << m;
  std::vector<double> values(n, 0.0);
  for (std::uint32_t eta = 0; eta < n; ++eta) {
    double acc = 0.0;
    for (std::size_t w = 0; w < spec.window.size(); ++w) {
      std::uint32_t bits = 0;
      for (int j = 0; j < mf; ++j) {
        const int pos = positions[w][static_cast<std::size_t>(j)];
        if (eta & (1u << (m - 1 - pos))) bits |= 1u << (mf - 1 - j);
      }
      acc += f.eval_bits(bits);
    }
    values[eta] = scale * acc;
  }
  return LocalFunction(f.dim(), std::move(union_sites), std::move(values));
}

}  // namespace ips
