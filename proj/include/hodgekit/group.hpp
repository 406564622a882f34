#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hodgekit/matrix.hpp"

namespace hk {

/// Word in the generators g_1..g_s: entry i > 0 is g_i, i < 0 is g_|i|^-1.
using Word = std::vector<int>;

/// Free reduction (cancels adjacent x x^-1).
Word reduce_word(const Word& w);
Word inverse_word(const Word& w);
Word concat(const Word& a, const Word& b);
/// a b a^-1 b^-1, reduced.
Word commutator(const Word& a, const Word& b);
std::string word_to_string(const Word& w);

class GroupPresentation {
 public:
  GroupPresentation(std::size_t generators, std::vector<Word> relators);

  /// Free group of the given rank.
  static GroupPresentation free(std::size_t generators);
  /// <a_1, b_1, ..., a_g, b_g | [a_1,b_1]...[a_g,b_g]>.
  static GroupPresentation surface(std::size_t genus);
  /// <a, b | a b a^-1 b^-1>.
  static GroupPresentation free_abelian_rank2();

  std::size_t generators() const { return generators_; }
  const std::vector<Word>& relators() const { return relators_; }

  /// Throws if some letter is out of range.
  void check_word(const Word& w) const;

 private:
  std::size_t generators_;
  std::vector<Word> relators_;
};

/// A representation of a finitely presented group by invertible matrices
/// over Q or a number field. Every relator is verified to map to the
/// identity at construction.
class GroupRep {
 public:
  GroupRep(GroupPresentation presentation, std::vector<KMatrix> matrices);
  static GroupRep from_rational(GroupPresentation presentation, const std::vector<QMatrix>& matrices);

  const GroupPresentation& presentation() const { return presentation_; }
  const std::vector<KMatrix>& matrices() const { return matrices_; }
  const KMatrix& matrix(std::size_t i) const { return matrices_[i]; }
  const KMatrix& inverse_matrix(std::size_t i) const { return inverses_[i]; }
  std::size_t rank() const { return rank_; }
  /// Null for Q.
  const FieldPtr& field() const { return field_; }
  bool is_rational() const;

  KMatrix evaluate(const Word& w) const;
  /// Requires all entries of the image to be rational.
  QMatrix evaluate_rational(const Word& w) const;

 private:
  GroupPresentation presentation_;
  std::vector<KMatrix> matrices_;
  std::vector<KMatrix> inverses_;
  std::size_t rank_ = 0;
  FieldPtr field_;
};

/// Block-diagonal direct sum of two representations of the same presentation.
GroupRep direct_sum(const GroupRep& a, const GroupRep& b);

}  // namespace hk
