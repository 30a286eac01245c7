#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ips/lattice.hpp"
#include "ips/rng.hpp"

namespace ips {

// Bit-valued occupation field on a lattice.
class Configuration {
 public:
  explicit Configuration(Lattice lat, std::uint8_t fill = 0)
      : lat_(std::move(lat)), occ_(static_cast<std::size_t>(lat_.size()), fill) {}

  static Configuration bernoulli(const Lattice& lat, double rho, Rng& rng);

  const Lattice& lattice() const { return lat_; }
  int size() const { return lat_.size(); }

  std::uint8_t at(int site) const { return occ_[static_cast<std::size_t>(site)]; }
  void set(int site, std::uint8_t v) { occ_[static_cast<std::size_t>(site)] = v; }
  void flip_inplace(int site) { occ_[static_cast<std::size_t>(site)] ^= 1; }
  void swap_inplace(int i, int j) {
    std::swap(occ_[static_cast<std::size_t>(i)], occ_[static_cast<std::size_t>(j)]);
  }

  int occupied_count() const;
  std::span<const std::uint8_t> raw() const { return occ_; }

  bool operator==(const Configuration& other) const {
    return lat_ == other.lat_ && occ_ == other.occ_;
  }

  // Coordinatewise order sigma <= other.
  bool dominated_by(const Configuration& other) const;

 private:
  Lattice lat_;
  std::vector<std::uint8_t> occ_;
};

Configuration flip(const Configuration& sigma, int site);
Configuration swap_sites(const Configuration& sigma, int i, int j);

// Configuration translated by dx: result(y) = sigma(y - dx).
Configuration shift(const Configuration& sigma, const Point& dx);

// Exact symmetric-difference support, as site indices in increasing order.
std::vector<int> discrepancy_profile(const Configuration& a, const Configuration& b);

}  // namespace ips
