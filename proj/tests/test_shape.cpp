#include <gtest/gtest.h>

#include "pqd/shape.hpp"
#include "support.hpp"

using namespace pqd;

TEST(ShapeType, Examples) {
  EXPECT_TRUE(alpha_eq(shape_type(ty::qubit()), ty::unit()));
  EXPECT_TRUE(alpha_eq(shape_type(ty::bit()), ty::unit()));
  EXPECT_TRUE(alpha_eq(shape_type(ty::list(ty::qubit())), ty::list(ty::unit())));
  auto b = ty::bang(ty::arrow(ty::qubit(), ty::qubit()));
  EXPECT_TRUE(alpha_eq(shape_type(b), b));
  auto len = tm::app(tm::cnst("toNat"), tm::var("x"));
  auto conv = ty::lin_pi("x", ty::list(ty::qubit()), ty::vec(ty::qubit(), len));
  auto expect = ty::int_pi("x", ty::list(ty::unit()), ty::vec(ty::unit(), len));
  EXPECT_TRUE(alpha_eq(shape_type(conv), expect));
  auto c = ty::circ(ty::qubit(), ty::pair(ty::qubit(), ty::bit()));
  EXPECT_TRUE(alpha_eq(shape_type(c), c));
  EXPECT_TRUE(alpha_eq(shape_type(ty::pair(ty::qubit(), ty::nat())),
                       ty::pair(ty::unit(), ty::nat())));
}

TEST(ShapeTerm, Examples) {
  auto l7 = tm::label(LabelId{7}, Sort::Qubit);
  EXPECT_TRUE(alpha_eq(shape_term(l7), tm::unit()));
  auto lifted = tm::lift(tm::apply(tm::cnst("H"), tm::label(LabelId{0}, Sort::Qubit)));
  EXPECT_TRUE(alpha_eq(shape_term(lifted), lifted));
  EXPECT_TRUE(alpha_eq(shape_term(tm::force(tm::var("x"))), tm::force_p(tm::var("x"))));
  EXPECT_TRUE(alpha_eq(shape_term(tm::apply(tm::var("c"), l7)),
                       tm::apply_p(tm::var("c"), tm::unit())));
  EXPECT_TRUE(alpha_eq(shape_term(tm::app(tm::var("f"), l7)),
                       tm::app_p(tm::var("f"), tm::unit())));
  auto lam = tm::lam("x", ty::qubit(), tm::var("x"));
  auto sh = shape_term(lam);
  ASSERT_EQ(sh->kind, TermKind::LamP);
  EXPECT_TRUE(alpha_eq(sh->type, ty::unit()));
  auto pair = tm::pair(l7, tm::numeral(1));
  EXPECT_TRUE(alpha_eq(shape_term(pair), tm::pair(tm::unit(), tm::numeral(1))));
  // An annotation at a linear type is shaped even around a variable.
  auto ann = tm::ann(tm::var("q"), ty::qubit());
  EXPECT_FALSE(is_parameter_term(ann));
  EXPECT_TRUE(alpha_eq(shape_term(ann), tm::ann(tm::var("q"), ty::unit())));
}

TEST(ShapeCtx, Examples) {
  Context g{Binding{std::string("x"), Index::One, ty::qubit()}};
  auto s = shape_ctx(g);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].index, Index::One);
  EXPECT_TRUE(alpha_eq(s[0].type, ty::unit()));
  Context p{Binding{std::string("x"), Index::Omega, ty::bang(ty::nat())}};
  auto sp = shape_ctx(p);
  EXPECT_EQ(sp[0].index, Index::Omega);
  EXPECT_TRUE(alpha_eq(sp[0].type, p[0].type));
  EXPECT_TRUE(shape_ctx({}).empty());
}

TEST(ShapeProperty, TypeLaws) {
  std::mt19937 rng(tsupport::kSeed);
  for (int i = 0; i < 1000; ++i) {
    auto a = tsupport::random_type(rng);
    auto s = shape_type(a);
    EXPECT_TRUE(is_parameter_type(s));
    EXPECT_TRUE(alpha_eq(shape_type(s), s));
    if (is_parameter_type(a)) EXPECT_TRUE(alpha_eq(s, a));
  }
}

TEST(ShapeProperty, TermLaws) {
  std::mt19937 rng(tsupport::kSeed + 1);
  for (int i = 0; i < 1000; ++i) {
    auto m = tsupport::random_term(rng);
    auto s = shape_term(m);
    EXPECT_TRUE(is_parameter_term(s));
    EXPECT_TRUE(alpha_eq(shape_term(s), s));
    if (is_parameter_term(m)) EXPECT_TRUE(alpha_eq(s, m));
  }
}

TEST(ShapeProperty, CommutesWithParameterSubstitution) {
  std::mt19937 rng(tsupport::kSeed + 2);
  for (int i = 0; i < 1000; ++i) {
    auto m = tsupport::random_term(rng);
    auto r = tsupport::random_param_value(rng);
    EXPECT_TRUE(alpha_eq(shape_term(subst(m, "x", r)), subst(shape_term(m), "x", r)));
    auto a = tsupport::random_type(rng);
    EXPECT_TRUE(alpha_eq(shape_type(subst(a, "x", r)), subst(shape_type(a), "x", r)));
  }
}
