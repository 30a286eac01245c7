#pragma once

#include <Eigen/Core>
#include <stdexcept>

#include "ips/lattice.hpp"

namespace ips {

// psi_t profile: per-site probability that a single initial discrepancy at
// the origin produces a discrepancy at that site at time t. Entries indexed
// by linear site; offsets are read through the lattice.
struct CouplingKernel {
  enum class Provenance { ExactDuality, MonteCarlo };

  double t = 0.0;
  Lattice lat{1, 1};
  Eigen::ArrayXd psi;  // size lat.size()
  Eigen::ArrayXd se;   // zero for exact kernels
  Provenance provenance = Provenance::ExactDuality;

  double at_offset(const Point& k) const { return psi[lat.site_of(k)]; }
  double se_at_offset(const Point& k) const { return se[lat.site_of(k)]; }

  double l1() const { return psi.sum(); }
  double l2_squared() const { return (psi * psi).sum(); }
  double lp_norm(double p) const;
  double max_entry() const { return psi.size() ? psi.maxCoeff() : 0.0; }

  void validate() const {
    if (psi.size() != lat.size() || se.size() != lat.size())
      throw std::invalid_argument("CouplingKernel: size mismatch");
    for (Eigen::Index i = 0; i < psi.size(); ++i)
      if (psi[i] < -1e-12 || psi[i] > 1.0 + 1e-12)
        throw std::invalid_argument("CouplingKernel: entry outside [0,1]");
  }
};

}  // namespace ips
