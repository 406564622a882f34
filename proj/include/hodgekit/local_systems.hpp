#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hodgekit/group.hpp"
#include "hodgekit/matrix.hpp"
#include "hodgekit/scalars.hpp"

namespace hk {

/// Smallest m with T^m unipotent, if every eigenvalue of T is a root of
/// unity. Decided by factoring the characteristic polynomial of T, viewed
/// as a Q-linear map, into cyclotomic polynomials.
std::optional<unsigned long> quasiunipotent_order(const KMatrix& t);
std::optional<unsigned long> quasiunipotent_order(const QMatrix& t);

/// lcm of the quasiunipotent orders of rho(loop); 1 for no loops.
/// Throws ValidationError naming the first loop that is not quasiunipotent.
unsigned long unipotent_reduction_exponent(const GroupRep& rep, const std::vector<Word>& loops);

/// Basis (as columns) of a lattice over Z_(p) stable under every matrix
/// and its inverse. The dim x dim matrices must commute pairwise and be
/// unipotent.
QMatrix flat_lattice(const std::vector<QMatrix>& matrices, std::size_t dim, const PrimePlace& place);

/// g L = L for every g: all coordinates of g^(+-1) applied to the basis have
/// nonnegative valuation.
bool lattice_is_stable(const QMatrix& lattice, const std::vector<QMatrix>& matrices, const PrimePlace& place);

/// Increasing filtration W_k of the ambient space attached to a nilpotent
/// endomorphism, stored through a basis adapted to it.
struct WeightFiltration {
  std::size_t dim = 0;
  int lowest = 0;   // W_{lowest-1} = 0
  int highest = 0;  // W_highest = V
  /// Columns sorted by nondecreasing weight; W_k is spanned by the columns
  /// of weight <= k.
  KMatrix basis;
  std::vector<int> weights;

  KMatrix piece(int k) const;
  std::size_t piece_dim(int k) const;
  std::size_t graded_dim(int k) const { return piece_dim(k) - piece_dim(k - 1); }
};

/// Jordan chains h, N h, ..., N^(s-1) h of a nilpotent matrix; together
/// they form a basis.
std::vector<std::vector<std::vector<NFElem>>> jordan_chains(const KMatrix& n);

/// The filtration with N W_k in W_{k-2} and N^k : gr_k -> gr_{-k} bijective.
/// Built from Jordan chains, then re-verified. Throws on non-nilpotent N.
WeightFiltration weight_filtration(const KMatrix& n);
WeightFiltration weight_filtration(const QMatrix& n);

/// Checks nestedness, exhaustiveness and both defining properties exactly.
/// `pieces[i]` spans W_{lowest+i}; W below lowest is 0 and the last piece
/// must be the whole space.
bool satisfies_weight_axioms(const KMatrix& n, int lowest, const std::vector<KMatrix>& pieces);
bool satisfies_weight_axioms(const KMatrix& n, const WeightFiltration& w);

struct GradedNearbyCycles {
  GroupRep rep;                     // generators acting on the sum of the gr_k
  WeightFiltration filtration;      // of N = rho(gamma) - I
  std::vector<std::size_t> blocks;  // dimensions of the nonzero gr_k, lowest weight first
};

/// Passes to gr of the weight filtration of rho(gamma) - I. gamma must map
/// to a unipotent matrix commuting with every generator image.
GradedNearbyCycles graded_nearby_cycles(const GroupRep& rep, const Word& gamma);

struct Semisimplification {
  GroupRep rep;
  std::vector<std::size_t> blocks;
};

/// Direct sum of the composition factors, from the radical series of the
/// generated matrix algebra (radical = kernel of the trace form). Layers
/// are further split along rational eigenvalues of central elements.
Semisimplification semisimplify(const GroupRep& rep);

/// Coefficients (low -> high, monic) of the characteristic polynomial of rho(w).
std::vector<NFElem> char_b(const GroupRep& rep, const Word& w);

/// Basis of the unital algebra generated by the matrices.
std::vector<KMatrix> algebra_basis(const std::vector<KMatrix>& generators, std::size_t dim);

/// dim {X : a X = X b}.
std::size_t intertwiner_dim(const KMatrix& a, const KMatrix& b);

/// Similarity over the coefficient field, for arbitrary (not only
/// semisimple) matrices: a ~ b iff the intertwiner spaces C(a,a), C(a,b),
/// C(b,b) have equal dimension.
bool are_conjugate(const KMatrix& a, const KMatrix& b);

}  // namespace hk
