#pragma once

#include <cstddef>
#include <vector>

#include "hodgekit/group.hpp"
#include "hodgekit/matrix.hpp"

namespace hk {

/// One term sign * prefix of the free derivative of a word with respect to
/// a generator.
struct FoxTerm {
  Word prefix;
  int sign = 1;
};

/// Free derivative d(word)/d(g_generator), generator 0-based. A letter g at
/// position k contributes +prefix_k, a letter g^-1 contributes -prefix_{k+1}.
std::vector<FoxTerm> fox_derivative(const Word& word, std::size_t generator);

/// Deformations are written rho_t(g_i) = (1 + t c_i + t^2 c_i2 + ...) rho(g_i),
/// so a first-order deformation is a tuple of r x r matrices, one per generator.
using Cochain = std::vector<KMatrix>;

/// Matrix of X -> M X M^-1 on row-major flattened r x r matrices.
KMatrix adjoint_action(const KMatrix& m);

/// Linearized relator equations: a (relators * r^2) x (generators * r^2)
/// matrix J with J vec(c) = 0 iff c is a cocycle.
KMatrix fox_matrix(const GroupRep& rep);

std::vector<NFElem> flatten(const Cochain& c);
Cochain unflatten(const std::vector<NFElem>& v, std::size_t generators, std::size_t rank);

struct TangentSpace {
  std::vector<Cochain> z1_basis;
  std::size_t dim_z1 = 0;
  std::size_t dim_b1 = 0;
  std::size_t dim_h1() const { return dim_z1 - dim_b1; }
};

/// Z^1 as the kernel of fox_matrix, B^1 as the image of
/// f -> (rho(g_i) f rho(g_i)^-1 - f)_i.
TangentSpace tangent_space(const GroupRep& rep);

/// The coboundary of f: c_i = f - rho(g_i) f rho(g_i)^-1, i.e. the first-order
/// term of conjugating by 1 + t f.
Cochain coboundary(const GroupRep& rep, const KMatrix& f);

bool is_cocycle(const GroupRep& rep, const Cochain& c);

struct LiftResult {
  bool success = false;
  /// Highest order through which the relators hold.
  std::size_t order_reached = 1;
  /// coefficients[j - 1] is the order-j correction c_j (j = 1 is the input).
  std::vector<Cochain> coefficients;
  /// On failure at order order_reached + 1: the t^(order) coefficient of
  /// every relator after choosing all lower orders, which no order-j
  /// correction can cancel.
  std::vector<KMatrix> residuals;
};

/// Extends a cocycle order by order up to t^order. Each order solves
/// J vec(c_j) = -vec(residual) with free variables set to zero.
LiftResult lift_order(const GroupRep& rep, const Cochain& c, std::size_t order);

}  // namespace hk
