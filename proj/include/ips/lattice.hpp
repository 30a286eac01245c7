#pragma once

#include <array>
#include <initializer_list>
#include <memory>
#include <vector>

namespace ips {

inline constexpr int kMaxDim = 4;

// Lattice point / displacement. Coordinates beyond the lattice dimension
// must be zero.
using Point = std::array<int, kMaxDim>;

Point make_point(std::initializer_list<int> coords);

// Finite d-dimensional torus of side L with N = L^d sites. Sites carry a
// linear storage index in [0,N) (row-major over coordinates in [0,L)) and a
// spiral rank: sites ordered by increasing sup-norm shell around the origin,
// lexicographically by centered coordinates within a shell, origin first.
class Lattice {
 public:
  Lattice(int dim, int side);

  int dim() const { return dim_; }
  int side() const { return side_; }
  int size() const { return size_; }

  int site_of(const Point& p) const;  // wraps coordinates into [0,L)
  Point coords_of(int site) const;    // coordinates in [0,L)
  Point centered_of(int site) const;  // centered representative

  int translate(int site, const Point& dx) const;
  int neighbor(int site, int axis, int step) const;

  int linf_radius(int site) const;  // sup-norm of the centered representative

  // Spiral enumeration. spiral_index_of_point validates that the point lies
  // in the centered representative box and throws std::invalid_argument
  // otherwise.
  int spiral_index(int site) const { return (*rank_of_site_)[static_cast<std::size_t>(site)]; }
  int spiral_index_of_point(const Point& p) const;
  int site_at_spiral(int rank) const { return (*site_of_rank_)[static_cast<std::size_t>(rank)]; }

  int centered_min() const;  // smallest valid centered coordinate
  int centered_max() const;  // largest valid centered coordinate

  bool operator==(const Lattice& other) const {
    return dim_ == other.dim_ && side_ == other.side_;
  }

 private:
  int dim_;
  int side_;
  int size_;
  std::array<int, kMaxDim> stride_{};
  std::shared_ptr<const std::vector<int>> rank_of_site_;
  std::shared_ptr<const std::vector<int>> site_of_rank_;
};

}  // namespace ips
