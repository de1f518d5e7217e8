#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace rnm {

using complexd = std::complex<double>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
};

// momentum cutoff: radius of the open ball B_lambda, or infinite (no cutoff).
// lambda = 0 means the empty ball (coupling switched off entirely).
class Cutoff {
 public:
  static Cutoff finite(double radius) {
    if (!(radius >= 0.0) || !std::isfinite(radius))
      throw std::invalid_argument("Cutoff: radius must be finite and >= 0");
    return Cutoff(radius, true);
  }
  static Cutoff infinite() { return Cutoff(0.0, false); }

  bool is_finite() const { return finite_; }
  double radius() const {
    if (!finite_) throw std::logic_error("Cutoff: radius() on infinite cutoff");
    return radius_;
  }
  // true if |k| lies inside the ball (open ball: strict inequality)
  bool contains(double k_norm) const { return !finite_ || k_norm < radius_; }

  std::string str() const {
    if (!finite_) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", radius_);
    return buf;
  }
  bool operator==(const Cutoff& o) const {
    return finite_ == o.finite_ && (!finite_ || radius_ == o.radius_);
  }

 private:
  Cutoff(double r, bool f) : radius_(r), finite_(f) {}
  double radius_;
  bool finite_;
};

// particle mass m_p >= 0, boson mass m_b > 0, coupling g >= 0
struct ModelParams {
  double m_p = 1.0;
  double m_b = 1.0;
  double g = 1.0;

  void validate() const {
    if (!(m_p >= 0.0) || !std::isfinite(m_p))
      throw std::invalid_argument("ModelParams: m_p must be >= 0");
    if (!(m_b > 0.0) || !std::isfinite(m_b))
      throw std::invalid_argument("ModelParams: m_b must be > 0");
    if (!(g >= 0.0) || !std::isfinite(g))
      throw std::invalid_argument("ModelParams: g must be >= 0");
  }
};

// thrown when a numerical budget cannot be met (quadrature non-convergence,
// solver failure); CLI maps this to a distinct exit code
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rnm
