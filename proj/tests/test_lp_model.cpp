#include <gtest/gtest.h>

#include <string>

#include "rgtl/lp_model.hpp"

using namespace rgtl;

TEST(LinearModel, BinaryBoundsAreClamped) {
  LinearModel m;
  const auto b = m.add_variable("b", -3, 7, VarKind::binary);
  EXPECT_EQ(m.variable(b).lower, 0.0);
  EXPECT_EQ(m.variable(b).upper, 1.0);
  EXPECT_TRUE(m.has_integers());
}

TEST(LinearModel, CheckFindsDanglingIndexAndNonFiniteData) {
  LinearModel m;
  m.add_variable("x", 0, 1);
  m.add_constraint("bad", {{3, 1.0}}, RowSense::less_equal, 1.0);
  EXPECT_FALSE(m.check().empty());
  EXPECT_THROW(m.require_valid(), ModelError);

  LinearModel n;
  n.add_variable("x", 0, 1);
  n.add_constraint("nan", {{0, std::nan("")}}, RowSense::less_equal, 1.0);
  EXPECT_FALSE(n.check().empty());
}

TEST(LinearModel, ObjectiveAndViolation) {
  LinearModel m;
  const auto x = m.add_variable("x", 0, 10);
  const auto y = m.add_variable("y", 0, kInf);
  m.set_objective_coef(x, 2);
  m.set_objective_coef(y, 3);
  m.set_constant(1.5);
  m.add_constraint("r", {{x, 1}, {y, 1}}, RowSense::greater_equal, 4);
  EXPECT_DOUBLE_EQ(m.objective_value({1, 2}), 2 + 6 + 1.5);
  EXPECT_DOUBLE_EQ(m.max_scaled_violation({1, 2}), 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(m.max_scaled_violation({2, 2}), 0.0);
  EXPECT_DOUBLE_EQ(m.max_scaled_violation({12, 0}), 2.0 / 11.0);
}

TEST(LinearModel, RemoveRowsAndColumnsRemaps) {
  LinearModel m;
  for (int k = 0; k < 4; ++k) m.add_variable("v" + std::to_string(k), 0, 1);
  m.set_objective_coef(3, 5.0);
  m.add_constraint("a", {{0, 1}, {1, 1}}, RowSense::less_equal, 1);
  m.add_constraint("b", {{3, 1}}, RowSense::less_equal, 1);
  m.add_constraint("c", {{2, 1}, {3, 2}}, RowSense::less_equal, 1);
  m.remove_constraints({0});
  ASSERT_EQ(m.num_constraints(), 2u);
  EXPECT_EQ(m.constraint(0).name, "b");
  EXPECT_THROW(m.remove_variables({3}), ModelError);
  const auto remap = m.remove_variables({0, 1});
  EXPECT_FALSE(remap[0].has_value());
  EXPECT_EQ(*remap[3], 1u);
  EXPECT_EQ(m.num_variables(), 2u);
  EXPECT_EQ(m.objective()[1], 5.0);
  EXPECT_EQ(m.constraint(1).terms[1].var, 1u);
}

TEST(LpFormat, SectionsAndBounds) {
  LinearModel m;
  const auto x = m.add_variable("x[0,1]", 0, 4);
  const auto f = m.add_variable("free", -kInf, kInf);
  const auto b = m.add_variable("b", 0, 1, VarKind::binary);
  const auto off = m.add_variable("off", 0, 0, VarKind::binary);
  const auto g = m.add_variable("g", 0, 9, VarKind::integer);
  m.set_objective_sense(ObjSense::maximize);
  m.set_objective_coef(x, 1);
  m.set_objective_coef(b, -2.5);
  m.add_constraint("r", {{x, 1}, {f, -1}, {g, 1}, {off, 1}}, RowSense::greater_equal, 2);
  m.add_constraint("e", {{b, 1}}, RowSense::equal, 1);
  const std::string text = to_lp_format(m);
  EXPECT_EQ(text.rfind("Maximize\n", 0), 0u) << text;
  EXPECT_NE(text.find(" obj: + 1 x_0_1_ - 2.5 b"), std::string::npos) << text;
  EXPECT_NE(text.find("Subject To\n c0: + 1 x_0_1_ - 1 free + 1 g + 1 off >= 2\n c1: + 1 b = 1\n"),
            std::string::npos) << text;
  EXPECT_NE(text.find(" free free\n"), std::string::npos) << text;
  EXPECT_NE(text.find(" 0 <= off <= 0\n"), std::string::npos) << text;
  EXPECT_EQ(text.find(" 0 <= b <= 1\n"), std::string::npos) << text;
  EXPECT_NE(text.find("General\n g\n"), std::string::npos) << text;
  EXPECT_NE(text.find("Binary\n b\n off\n"), std::string::npos) << text;
  EXPECT_EQ(text.substr(text.size() - 4), "End\n");
}
