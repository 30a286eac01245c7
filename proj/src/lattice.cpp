#include "ips/lattice.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ips {

Point make_point(std::initializer_list<int> coords) {
  if (coords.size() > static_cast<std::size_t>(kMaxDim))
    throw std::invalid_argument("make_point: too many coordinates");
  Point p{};
  std::size_t i = 0;
  for (int c : coords) p[i++] = c;
  return p;
}

namespace {

int checked_pow(int base, int exp) {
  long long v = 1;
  for (int i = 0; i < exp; ++i) {
    v *= base;
    if (v > (1LL << 30)) throw std::invalid_argument("Lattice: too many sites");
  }
  return static_cast<int>(v);
}

}  // namespace

Lattice::Lattice(int dim, int side) : dim_(dim), side_(side) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Lattice: dim out of range");
  if (side < 1) throw std::invalid_argument("Lattice: side must be positive");
  size_ = checked_pow(side, dim);
  int s = 1;
  for (int a = dim_ - 1; a >= 0; --a) {
    stride_[static_cast<std::size_t>(a)] = s;
    s *= side_;
  }

  // Spiral order: sort sites by (shell radius, centered coordinates lex).
  auto order = std::make_shared<std::vector<int>>(static_cast<std::size_t>(size_));
  std::iota(order->begin(), order->end(), 0);
  std::sort(order->begin(), order->end(), [this](int a, int b) {
    const Point ca = centered_of(a), cb = centered_of(b);
    int ra = 0, rb = 0;
    for (int k = 0; k < dim_; ++k) {
      ra = std::max(ra, std::abs(ca[static_cast<std::size_t>(k)]));
      rb = std::max(rb, std::abs(cb[static_cast<std::size_t>(k)]));
    }
    if (ra != rb) return ra < rb;
    for (int k = 0; k < dim_; ++k) {
      if (ca[static_cast<std::size_t>(k)] != cb[static_cast<std::size_t>(k)])
        return ca[static_cast<std::size_t>(k)] < cb[static_cast<std::size_t>(k)];
    }
    return false;
  });
  auto ranks = std::make_shared<std::vector<int>>(static_cast<std::size_t>(size_));
  for (int r = 0; r < size_; ++r) (*ranks)[static_cast<std::size_t>((*order)[static_cast<std::size_t>(r)])] = r;
  site_of_rank_ = order;
  rank_of_site_ = ranks;
}

int Lattice::site_of(const Point& p) const {
  int site = 0;
  for (int a = 0; a < dim_; ++a) {
    int c = p[static_cast<std::size_t>(a)] % side_;
    if (c < 0) c += side_;
    site += c * stride_[static_cast<std::size_t>(a)];
  }
  return site;
}

Point Lattice::coords_of(int site) const {
  Point p{};
  for (int a = 0; a < dim_; ++a) {
    p[static_cast<std::size_t>(a)] = (site / stride_[static_cast<std::size_t>(a)]) % side_;
  }
  return p;
}

int Lattice::centered_min() const { return -(side_ - 1) / 2; }
int Lattice::centered_max() const { return side_ / 2; }

Point Lattice::centered_of(int site) const {
  Point p = coords_of(site);
  for (int a = 0; a < dim_; ++a) {
    int& c = p[static_cast<std::size_t>(a)];
    if (c > side_ / 2) c -= side_;
  }
  return p;
}

int Lattice::translate(int site, const Point& dx) const {
  Point p = coords_of(site);
  for (int a = 0; a < dim_; ++a) p[static_cast<std::size_t>(a)] += dx[static_cast<std::size_t>(a)];
  return site_of(p);
}

int Lattice::neighbor(int site, int axis, int step) const {
  const int st = stride_[static_cast<std::size_t>(axis)];
  const int c = (site / st) % side_;
  int nc = (c + step) % side_;
  if (nc < 0) nc += side_;
  return site + (nc - c) * st;
}

int Lattice::linf_radius(int site) const {
  const Point c = centered_of(site);
  int r = 0;
  for (int a = 0; a < dim_; ++a) r = std::max(r, std::abs(c[static_cast<std::size_t>(a)]));
  return r;
}

int Lattice::spiral_index_of_point(const Point& p) const {
  for (int a = 0; a < dim_; ++a) {
    const int c = p[static_cast<std::size_t>(a)];
    if (c < centered_min() || c > centered_max())
      throw std::invalid_argument("spiral_index: coordinate " + std::to_string(c) +
                                  " outside centered box [" + std::to_string(centered_min()) +
                                  "," + std::to_string(centered_max()) + "]");
  }
  for (int a = dim_; a < kMaxDim; ++a) {
    if (p[static_cast<std::size_t>(a)] != 0)
      throw std::invalid_argument("spiral_index: nonzero coordinate beyond lattice dimension");
  }
  return spiral_index(site_of(p));
}

}  // namespace ips
