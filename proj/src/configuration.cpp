#include "ips/configuration.hpp"

#include <stdexcept>

namespace ips {

Configuration Configuration::bernoulli(const Lattice& lat, double rho, Rng& rng) {
  if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("bernoulli: rho outside [0,1]");
  Configuration sigma(lat);
  for (int i = 0; i < lat.size(); ++i) sigma.set(i, rng.bernoulli(rho) ? 1 : 0);
  return sigma;
}

int Configuration::occupied_count() const {
  int n = 0;
  for (std::uint8_t v : occ_) n += v;
  return n;
}

bool Configuration::dominated_by(const Configuration& other) const {
  if (!(lat_ == other.lat_)) throw std::invalid_argument("dominated_by: lattice mismatch");
  for (std::size_t i = 0; i < occ_.size(); ++i)
    if (occ_[i] > other.occ_[i]) return false;
  return true;
}

Configuration flip(const Configuration& sigma, int site) {
  Configuration out = sigma;
  out.flip_inplace(site);
  return out;
}

Configuration swap_sites(const Configuration& sigma, int i, int j) {
  Configuration out = sigma;
  out.swap_inplace(i, j);
  return out;
}

Configuration shift(const Configuration& sigma, const Point& dx) {
  const Lattice& lat = sigma.lattice();
  Configuration out(lat);
  Point neg{};
  for (int a = 0; a < kMaxDim; ++a) neg[static_cast<std::size_t>(a)] = -dx[static_cast<std::size_t>(a)];
  for (int y = 0; y < lat.size(); ++y) out.set(y, sigma.at(lat.translate(y, neg)));
  return out;
}

std::vector<int> discrepancy_profile(const Configuration& a, const Configuration& b) {
  if (!(a.lattice() == b.lattice()))
    throw std::invalid_argument("discrepancy_profile: lattice mismatch");
  std::vector<int> out;
  for (int i = 0; i < a.size(); ++i)
    if (a.at(i) != b.at(i)) out.push_back(i);
  return out;
}

}  // namespace ips
