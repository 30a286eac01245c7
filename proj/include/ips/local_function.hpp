#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "ips/configuration.hpp"
#include "ips/lattice.hpp"

namespace ips {

inline constexpr int kMaxArity = 20;

// Real-valued function of finitely many occupation variables, stored as a
// dense value table over the 2^|D_f| restrictions to its dependence set.
//
// Restriction encoding: with dependence sites (s_0,...,s_{m-1}) as listed,
// the restriction (eta(s_0),...,eta(s_{m-1})) has table index
// sum_j eta(s_j) * 2^(m-1-j), so increasing index = lexicographic order of
// the restriction tuple with s_0 most significant.
class LocalFunction {
 public:
  LocalFunction(int dim, std::vector<Point> sites, std::vector<double> values);

  static LocalFunction constant(int dim, double value);
  static LocalFunction occupancy(int dim, const Point& x);  // eta(x)

  int dim() const { return dim_; }
  int arity() const { return static_cast<int>(sites_.size()); }
  const std::vector<Point>& sites() const { return sites_; }
  const Eigen::ArrayXd& table() const { return table_; }

  double eval_bits(std::uint32_t bits) const { return table_[static_cast<Eigen::Index>(bits)]; }
  double eval(const Configuration& sigma) const;
  // d=1 evaluation against a plain chain; site coordinate indexes the span.
  double eval_chain(std::span<const std::uint8_t> chain) const;

  // Table index bit position of dependence site j.
  std::uint32_t bit_of(int j) const { return 1u << (arity() - 1 - j); }

 private:
  int dim_;
  std::vector<Point> sites_;
  Eigen::ArrayXd table_;
};

// Variation vector: support sites with the values delta_i f.
struct DeltaVector {
  std::vector<Point> sites;
  Eigen::ArrayXd values;
};

// delta_i f = max over restrictions of f(eta^i) - f(eta); zero off D_f
// (off-support sites are simply not listed).
DeltaVector delta_vector(const LocalFunction& f);

double lp_norm(const DeltaVector& dv, double p);
double lp_norm(std::span<const double> values, double p);

// Function translated by dx: dependence set D_f + dx, same table.
LocalFunction shift(const LocalFunction& f, const Point& dx);

struct SpatialAverageSpec {
  std::vector<Point> window;  // Lambda
  double alpha = 1.0;
};

// |Lambda|^-alpha * sum_{x in Lambda} shift(f, x) as an explicit local
// function on the union of shifted dependence sets. Throws if shifted
// copies collide modulo the torus (wrap overlap) or the union exceeds
// kMaxArity.
LocalFunction spatial_average(const LocalFunction& f, const SpatialAverageSpec& spec,
                              const Lattice& lat);

}  // namespace ips
