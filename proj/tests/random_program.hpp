#pragma once

#include <random>
#include <string>
#include <vector>

#include "crasp/program.hpp"
#include "crasp/token.hpp"

namespace testing {

// Random well-typed programs for property tests.
class RandomProgram {
 public:
  RandomProgram(std::uint64_t seed, crasp::Dialect d) : rng_(seed), dialect_(d) {}

  crasp::Program make(std::size_t n_defs, std::size_t n_symbols) {
    std::vector<std::string> names;
    for (std::size_t s = 0; s < n_symbols; ++s) names.push_back("s" + std::to_string(s));
    crasp::SymbolTable alphabet(names);
    crasp::ProgramBuilder b(dialect_, alphabet);
    n_symbols_ = n_symbols;
    refs_.clear();
    for (std::size_t k = 0; k < n_defs; ++k) {
      bool want_bool = pick(2) == 0;
      auto e = want_bool ? boolean(3, false) : count(3);
      auto r = b.define("D" + std::to_string(k), e);
      refs_.push_back(r);
    }
    return b.build();
  }

  crasp::TokenSeq tokens(std::size_t n, std::size_t n_symbols, std::uint64_t max_sig) {
    crasp::TokenSeq w;
    for (std::size_t k = 0; k < n; ++k) {
      if (dialect_ == crasp::Dialect::CStarRasp && pick(2) == 0)
        w.push_back(crasp::Token::signpost(1 + pick(max_sig)));
      else
        w.push_back(crasp::Token::finite(static_cast<crasp::SymbolId>(pick(n_symbols))));
    }
    return w;
  }

  std::uint64_t pick(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng_); }

 private:
  std::mt19937_64 rng_;
  crasp::Dialect dialect_;
  std::size_t n_symbols_ = 1;
  std::vector<crasp::ExprPtr> refs_;

  crasp::ExprPtr ref_of(crasp::ValueType t) {
    std::vector<crasp::ExprPtr> c;
    for (auto& r : refs_)
      if (r->type == t) c.push_back(r);
    if (c.empty()) return nullptr;
    return c[pick(c.size())];
  }

  crasp::ExprPtr boolean(int depth, bool pointwise) {
    using namespace crasp;
    int choice = static_cast<int>(pick(depth <= 0 ? 3 : 8));
    switch (choice) {
      case 0: return ex::q(static_cast<SymbolId>(pick(n_symbols_)));
      case 1: {
        if (auto r = ref_of(ValueType::Bool)) return r;
        return ex::truth(pick(2));
      }
      case 2:
        if (dialect_ == Dialect::CraspPos) {
          auto m = static_cast<std::uint32_t>(1 + pick(3));
          return ex::periodic(m, static_cast<std::uint32_t>(pick(m)));
        }
        return ex::truth(pick(2));
      case 3: return ex::not_(boolean(depth - 1, pointwise));
      case 4: return ex::and_(boolean(depth - 1, pointwise), boolean(depth - 1, pointwise));
      case 5: return ex::or_(boolean(depth - 1, pointwise), boolean(depth - 1, pointwise));
      default: {
        static const CompareOp ops[] = {CompareOp::Le, CompareOp::Lt, CompareOp::Ge, CompareOp::Gt,
                                        CompareOp::Eq};
        return ex::cmp(ops[pick(5)], count_or_leaf(depth - 1, pointwise),
                       count_or_leaf(depth - 1, pointwise));
      }
    }
  }

  crasp::ExprPtr count_or_leaf(int depth, bool pointwise) {
    using namespace crasp;
    if (pointwise || depth <= 0) {
      if (pick(2) == 0)
        if (auto r = ref_of(ValueType::Count)) return r;
      return ex::lit(static_cast<std::int64_t>(pick(4)));
    }
    return count(depth);
  }

  crasp::ExprPtr count(int depth) {
    using namespace crasp;
    int choice = static_cast<int>(pick(depth <= 0 ? 2 : 7));
    switch (choice) {
      case 0: return ex::lit(static_cast<std::int64_t>(pick(4)));
      case 1: {
        if (auto r = ref_of(ValueType::Count)) return r;
        return ex::lit(1);
      }
      case 2:
      case 3: {
        LocalRelation rel;
        if (dialect_ != Dialect::Crasp && pick(2)) rel.offset = static_cast<std::uint32_t>(pick(3));
        return ex::count(rel, boolean(2, true));
      }
      case 4: {
        if (dialect_ != Dialect::CStarRasp) return ex::count({}, boolean(2, true));
        std::vector<MatchConjunct> cs;
        auto k = 1 + pick(2);
        for (std::uint64_t c = 0; c < k; ++c)
          cs.push_back({static_cast<std::uint32_t>(pick(3)), static_cast<std::uint32_t>(pick(3)),
                        static_cast<std::int32_t>(pick(3)) - 1});
        return ex::match(cs, pick(3) ? boolean(2, true) : nullptr);
      }
      case 5: return ex::cond(boolean(depth - 1, false), count(depth - 1), count(depth - 1));
      default:
        return ex::arith(pick(2) ? ArithOp::Add : ArithOp::Sub, count(depth - 1), count(depth - 1));
    }
  }
};

}  // namespace testing
