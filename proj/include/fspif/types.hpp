#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fspif {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm2(const Vec2& a) { return dot(a, a); }
inline double norm(const Vec2& a) { return std::sqrt(norm2(a)); }

// Bad argument or configuration supplied by the caller.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A particle left the unit box where the free-space solve is valid.
class EscapedParticle : public std::runtime_error {
 public:
  EscapedParticle(std::size_t index, Vec2 position)
      : std::runtime_error("particle " + std::to_string(index) +
                           " outside the unit box at (" +
                           std::to_string(position.x) + ", " +
                           std::to_string(position.y) + ")"),
        index_(index),
        position_(position) {}

  std::size_t index() const { return index_; }
  Vec2 position() const { return position_; }

 private:
  std::size_t index_;
  Vec2 position_;
};

// Boundary-integral target too close to the boundary for the trapezoidal rule.
class NearBoundaryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical self-check failed (e.g. large imaginary residue in a real field).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fspif
