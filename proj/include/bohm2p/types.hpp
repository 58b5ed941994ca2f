#pragma once

#include <array>
#include <cassert>
#include <complex>
#include <cstddef>
#include <initializer_list>

namespace bohm2p {

using Complex = std::complex<double>;

/// Fixed-capacity vector holding one particle's coordinates (or a per-particle
/// gradient). Models are 1D or 2D per particle, so the capacity is two.
template <class T>
class SmallVec {
 public:
  static constexpr std::size_t kCapacity = 2;

  constexpr SmallVec() = default;
  constexpr SmallVec(std::initializer_list<T> values) {
    assert(values.size() <= kCapacity);
    for (const T& v : values) data_[size_++] = v;
  }

  static constexpr SmallVec zeros(std::size_t dim) {
    SmallVec out;
    out.size_ = dim;
    return out;
  }

  constexpr std::size_t size() const { return size_; }
  constexpr T& operator[](std::size_t i) { return data_[i]; }
  constexpr const T& operator[](std::size_t i) const { return data_[i]; }

  constexpr const T* begin() const { return data_.data(); }
  constexpr const T* end() const { return data_.data() + size_; }

  constexpr bool operator==(const SmallVec& other) const {
    if (size_ != other.size_) return false;
    for (std::size_t i = 0; i < size_; ++i) {
      if (data_[i] != other.data_[i]) return false;
    }
    return true;
  }

 private:
  std::array<T, kCapacity> data_{};
  std::size_t size_ = 0;
};

using Coords = SmallVec<double>;
using ComplexVector = SmallVec<Complex>;

/// A point (r1, r2) in two-particle configuration space at time t.
struct ConfigPoint {
  Coords r1;
  Coords r2;
  double t = 0.0;

  std::size_t dimension() const { return r1.size(); }
};

/// Mirror image through the x = 0 plane: x -> -x, other components unchanged.
inline Coords reflect(Coords r) {
  r[0] = -r[0];
  return r;
}

inline ConfigPoint reflect(const ConfigPoint& p) {
  return {reflect(p.r1), reflect(p.r2), p.t};
}

inline ConfigPoint exchange(const ConfigPoint& p) { return {p.r2, p.r1, p.t}; }

}  // namespace bohm2p
