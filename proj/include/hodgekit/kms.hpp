#pragma once

#include <array>
#include <complex>
#include <vector>

#include "hodgekit/scalars.hpp"

namespace hk {

/// A parabolic weight together with a residue: (a, alpha) in R x C.
struct WeightResidue {
  double weight = 0;
  std::complex<double> residue{};
};

struct GaussianRational {
  Rational re;
  Rational im;
  friend bool operator==(const GaussianRational&, const GaussianRational&) = default;
};

struct ExactWeightResidue {
  Rational weight;
  GaussianRational residue;
  friend bool operator==(const ExactWeightResidue&, const ExactWeightResidue&) = default;
};

/// (a, alpha) -> (a + 2 Re(lambda conj(alpha)), alpha - a lambda - conj(alpha) lambda^2).
WeightResidue kms_rescale(const WeightResidue& x, std::complex<double> lambda);
ExactWeightResidue kms_rescale(const ExactWeightResidue& x, const GaussianRational& lambda);

/// Inverse map, by solving the 3x3 real linear system in (a, Re alpha, Im alpha).
WeightResidue kms_unrescale(const WeightResidue& y, std::complex<double> lambda);
ExactWeightResidue kms_unrescale(const ExactWeightResidue& y, const GaussianRational& lambda);

/// The real-linear map on (a, Re alpha, Im alpha); its determinant is (1 + |lambda|^2)^2.
std::array<std::array<double, 3>, 3> kms_matrix(std::complex<double> lambda);

/// Sign s in the eigenvalue exp(s 2 pi i a) attached to a residue a.
inline constexpr int kResidueExponentSign = -1;

/// The root of unity exp(-2 pi i a), encoded as the reduced fraction k/m
/// in [0, 1) with eigenvalue exp(2 pi i k/m). Integers map to 0 (the root 1).
Rational residue_exponential(const Rational& a);
std::vector<Rational> residue_exponential(const std::vector<Rational>& residues);

}  // namespace hk
