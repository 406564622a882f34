#include "hodgekit/group.hpp"

#include <cstdlib>

namespace hk {

Word reduce_word(const Word& w) {
  Word out;
  for (int x : w) {
    if (x == 0) throw ValidationError("word letter 0 is not a generator");
    if (!out.empty() && out.back() == -x) {
      out.pop_back();
    } else {
      out.push_back(x);
    }
  }
  return out;
}

Word inverse_word(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (auto& x : out) x = -x;
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return reduce_word(out);
}

Word commutator(const Word& a, const Word& b) {
  return concat(concat(a, b), concat(inverse_word(a), inverse_word(b)));
}

std::string word_to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (int x : w) {
    if (!s.empty()) s += " ";
    s += "g" + std::to_string(std::abs(x));
    if (x < 0) s += "^-1";
  }
  return s;
}

GroupPresentation::GroupPresentation(std::size_t generators, std::vector<Word> relators)
    : generators_(generators), relators_(std::move(relators)) {
  for (const auto& r : relators_) {
    check_word(r);
    if (reduce_word(r) != r) throw ValidationError("relator " + word_to_string(r) + " is not reduced");
  }
}

GroupPresentation GroupPresentation::free(std::size_t generators) { return GroupPresentation(generators, {}); }

GroupPresentation GroupPresentation::surface(std::size_t genus) {
  Word rel;
  for (std::size_t i = 0; i < genus; ++i) {
    const int a = static_cast<int>(2 * i + 1), b = a + 1;
    rel.insert(rel.end(), {a, b, -a, -b});
  }
  return GroupPresentation(2 * genus, genus ? std::vector<Word>{rel} : std::vector<Word>{});
}

GroupPresentation GroupPresentation::free_abelian_rank2() { return GroupPresentation(2, {{1, 2, -1, -2}}); }

void GroupPresentation::check_word(const Word& w) const {
  for (int x : w)
    if (x == 0 || static_cast<std::size_t>(std::abs(x)) > generators_)
      throw ValidationError("letter " + std::to_string(x) + " out of range for " + std::to_string(generators_) +
                            " generators");
}

GroupRep::GroupRep(GroupPresentation presentation, std::vector<KMatrix> matrices)
    : presentation_(std::move(presentation)), matrices_(std::move(matrices)) {
  if (matrices_.size() != presentation_.generators())
    throw ValidationError("expected one matrix per generator");
  rank_ = matrices_.empty() ? 0 : matrices_.front().rows();
  for (std::size_t i = 0; i < matrices_.size(); ++i) {
    const auto& m = matrices_[i];
    if (!m.square() || m.rows() != rank_) throw ValidationError("generator matrices must be square of equal size");
    for (const auto& x : m.data())
      if (x.field()) {
        if (field_ && !(*field_ == *x.field())) throw ValidationError("matrices mix number fields");
        field_ = x.field();
      }
    inverses_.push_back(inverse(m, "matrix of generator " + std::to_string(i + 1) + " is singular"));
  }
  const KMatrix id = KMatrix::identity(rank_);
  for (const auto& r : presentation_.relators())
    if (!(evaluate(r) == id)) throw ValidationError("relator " + word_to_string(r) + " does not map to the identity");
}

GroupRep GroupRep::from_rational(GroupPresentation presentation, const std::vector<QMatrix>& matrices) {
  std::vector<KMatrix> k;
  for (const auto& m : matrices) k.push_back(to_field(m));
  return GroupRep(std::move(presentation), std::move(k));
}

bool GroupRep::is_rational() const { return !field_; }

KMatrix GroupRep::evaluate(const Word& w) const {
  presentation_.check_word(w);
  KMatrix out = KMatrix::identity(rank_);
  for (int x : w) {
    const std::size_t i = static_cast<std::size_t>(std::abs(x)) - 1;
    out = out * (x > 0 ? matrices_[i] : inverses_[i]);
  }
  return out;
}

QMatrix GroupRep::evaluate_rational(const Word& w) const { return to_rational(evaluate(w)); }

GroupRep direct_sum(const GroupRep& a, const GroupRep& b) {
  if (a.presentation().generators() != b.presentation().generators())
    throw ValidationError("direct sum of representations of different groups");
  const std::size_t n = a.rank(), m = b.rank();
  std::vector<KMatrix> mats;
  for (std::size_t g = 0; g < a.matrices().size(); ++g) {
    KMatrix s(n + m, n + m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s(i, j) = a.matrix(g)(i, j);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) s(n + i, n + j) = b.matrix(g)(i, j);
    mats.push_back(std::move(s));
  }
  return GroupRep(a.presentation(), std::move(mats));
}

}  // namespace hk
