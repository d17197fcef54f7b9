#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "laughlin/errors.hpp"
#include "laughlin/geometry.hpp"

namespace laughlin {

struct QuasiHole {
  Vec2 location;     // physical coordinates
  int multiplicity;  // >= 1
};

// Analytic symmetric multiplier F applied on top of the correlated state.
// Three variants cover the perturbations of interest:
//   Identity               F = 1
//   QuasiHoleProduct       F(Z) = prod_j prod_k (z_j - a_k)^{m_k}
//   QuadraticExponential   F(Z) = exp(c sum_j z_j^2), |c| <= 0.4
// All three factor over particles, which the samplers exploit for O(1)
// incremental updates. Since F is analytic, -log|F| is superharmonic in each
// variable; that is the one structural property downstream code relies on.
class Prefactor {
 public:
  enum class Kind { Identity, QuasiHoleProduct, QuadraticExponential };

  static constexpr double kMaxQuadCoefficient = 0.4;  // integrability needs |c| < 1/2

  Prefactor() : kind_(Kind::Identity) {}

  static Prefactor identity() { return Prefactor(); }

  static Prefactor quasi_holes(std::vector<QuasiHole> holes) {
    for (const auto& h : holes) {
      if (h.multiplicity < 1) throw std::invalid_argument("hole multiplicity must be >= 1");
      if (!is_finite(h.location)) throw std::invalid_argument("hole location must be finite");
    }
    Prefactor p;
    p.kind_ = Kind::QuasiHoleProduct;
    p.holes_ = std::move(holes);
    return p;
  }

  static Prefactor quadratic(Complex c) {
    if (std::abs(c) > kMaxQuadCoefficient)
      throw std::invalid_argument("quadratic coefficient must satisfy |c| <= 0.4");
    Prefactor p;
    p.kind_ = Kind::QuadraticExponential;
    p.coeff_ = c;
    return p;
  }

  Kind kind() const { return kind_; }
  const std::vector<QuasiHole>& holes() const { return holes_; }
  Complex coefficient() const { return coeff_; }
  bool is_identity() const { return kind_ == Kind::Identity; }

  // Contribution of a single particle at physical position w to log|F|.
  // log|F| = sum over particles of this term for every variant.
  double log_modulus_single(Vec2 w) const {
    switch (kind_) {
      case Kind::Identity:
        return 0.0;
      case Kind::QuasiHoleProduct: {
        double s = 0.0;
        for (const auto& h : holes_) {
          const double d2 = dist2(w, h.location);
          if (d2 == 0.0) throw SingularConfiguration("particle exactly at a quasi-hole");
          s += 0.5 * h.multiplicity * std::log(d2);
        }
        return s;
      }
      case Kind::QuadraticExponential: {
        const Complex w2 = to_complex(w) * to_complex(w);
        return (coeff_ * w2).real();
      }
    }
    return 0.0;
  }

  // Gradient of the single-particle term with respect to the physical point.
  Vec2 log_modulus_gradient(Vec2 w) const {
    switch (kind_) {
      case Kind::Identity:
        return {0.0, 0.0};
      case Kind::QuasiHoleProduct: {
        Vec2 g{0.0, 0.0};
        for (const auto& h : holes_) {
          const Vec2 d = w - h.location;
          const double d2 = norm2(d);
          if (d2 == 0.0) throw SingularConfiguration("particle exactly at a quasi-hole");
          g += d * (h.multiplicity / d2);
        }
        return g;
      }
      case Kind::QuadraticExponential: {
        // d/dw Re(c w^2) at w = u + iv
        const double cr = coeff_.real(), ci = coeff_.imag();
        return {2.0 * (cr * w.x - ci * w.y), -2.0 * (cr * w.y + ci * w.x)};
      }
    }
    return {0.0, 0.0};
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::Identity:
        return "identity";
      case Kind::QuasiHoleProduct: {
        std::string s = "holes";
        for (const auto& h : holes_)
          s += ":(" + std::to_string(h.location.x) + "," + std::to_string(h.location.y) + ")m" +
               std::to_string(h.multiplicity);
        return s;
      }
      case Kind::QuadraticExponential:
        return "quad:c=(" + std::to_string(coeff_.real()) + "," + std::to_string(coeff_.imag()) + ")";
    }
    return "?";
  }

 private:
  Kind kind_;
  std::vector<QuasiHole> holes_;
  Complex coeff_{0.0, 0.0};
};

// log|F| evaluated at physical (unscaled) points.
inline double prefactor_log_modulus(const Prefactor& pf, std::span<const Vec2> physical_points) {
  double s = 0.0;
  for (const Vec2& w : physical_points) s += pf.log_modulus_single(w);
  return s;
}

}  // namespace laughlin
