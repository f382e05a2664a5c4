#include <gtest/gtest.h>

#include "interpreter.hpp"

using acc2dc::testing::Array;
using acc2dc::testing::Interpreter;
using acc2dc::testing::InterpreterError;

namespace {

Interpreter<std::int64_t> with_data(std::int64_t n1, std::int64_t n2) {
  Interpreter<std::int64_t> it;
  it.scalars["n1"] = n1;
  it.scalars["n2"] = n2;
  Array<std::int64_t> a({n1, n2});
  for (std::size_t k = 0; k < a.data.size(); ++k)
    a.data[k] = static_cast<std::int64_t>(k * 7 % 11) - 3;
  it.arrays["a"] = a;
  it.arrays["r"] = Array<std::int64_t>({n1});
  return it;
}

const char *kAtomicRowSum = R"(
do j=1,n2
  do i=1,n1
!$acc atomic update
    r(i) = r(i) + a(i,j)
  enddo
enddo
)";

const char *kInterchanged = R"(
do concurrent (i=1:n1)
  tmp=0.
  do concurrent (j=1:n2) reduce(+:tmp)
    tmp = tmp + a(i,j)
  enddo
  r(i) = r(i) + tmp
enddo
)";

std::vector<std::int64_t> run(const std::string &src) {
  auto it = with_data(4, 5);
  it.run(src);
  return it.arrays.at("r").data;
}

} // namespace

TEST(Interpreter, ColumnMajorLayout) {
  Array<int> a({2, 3});
  std::int64_t s[] = {2, 1};
  EXPECT_EQ(a.offset(s), 1u);
  std::int64_t t[] = {1, 3};
  EXPECT_EQ(a.offset(t), 4u);
  std::int64_t bad[] = {3, 1};
  EXPECT_THROW(a.offset(bad), InterpreterError);
}

TEST(Interpreter, ExpressionsAndIntrinsics) {
  Interpreter<double> it;
  it.arrays["v"] = Array<double>({3});
  it.arrays["v"].data = {4, -2, 9};
  it.run("x = 2**3 - 1\ny = -x / 2.0\nz = sum(v) + minval(v)*maxval(v)\nw = max(abs(y), 1.0)\n");
  EXPECT_DOUBLE_EQ(it.scalars["x"], 7);
  EXPECT_DOUBLE_EQ(it.scalars["y"], -3.5);
  EXPECT_DOUBLE_EQ(it.scalars["z"], 11 - 18);
  EXPECT_DOUBLE_EQ(it.scalars["w"], 3.5);
  EXPECT_THROW(it.run("q = undefined_name + 1\n"), InterpreterError);
}

TEST(Interpreter, WholeArrayAssignment) {
  Interpreter<double> it;
  it.arrays["a"] = Array<double>({2, 2});
  it.arrays["b"] = Array<double>({2, 2}, 3.0);
  it.run("a = b*2.0 + 1.0\nb(:,:) = 0.0\n");
  for (double v : it.arrays["a"].data)
    EXPECT_DOUBLE_EQ(v, 7.0);
  for (double v : it.arrays["b"].data)
    EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(Interpreter, ConcurrentLoopsAndReductions) {
  auto it = with_data(3, 4);
  it.scalars["s"] = 100;
  it.run("do concurrent (j=1:n2,i=1:n1) reduce(+:s)\n  s = s + a(i,j)\nenddo\n");
  std::int64_t expected = 100;
  for (auto v : it.arrays["a"].data)
    expected += v;
  EXPECT_EQ(it.scalars["s"], expected);
  EXPECT_EQ(it.scalars.count("i"), 0u);
}

TEST(Interpreter, InterchangedFormMatchesAtomicLoop) {
  EXPECT_EQ(run(kAtomicRowSum), run(kInterchanged));
}

// Broken rewrites that the semantic checks must be able to tell apart.
TEST(Interpreter, DetectsMissingTemporaryReset) {
  std::string src = kInterchanged;
  src.erase(src.find("  tmp=0.\n"), 9);
  EXPECT_THROW(run(src), InterpreterError); // tmp is undefined on first use
  auto it = with_data(4, 5);
  it.scalars["tmp"] = 0;
  it.run(src);
  EXPECT_NE(it.arrays.at("r").data, run(kAtomicRowSum));
}

TEST(Interpreter, DetectsWrongOperator) {
  std::string src = kInterchanged;
  src.replace(src.find("reduce(+:tmp)"), 13, "reduce(max:tmp)");
  EXPECT_NE(run(src), run(kAtomicRowSum));
}

TEST(Interpreter, DetectsSwappedSubscripts) {
  auto it = with_data(4, 4);
  auto reference = it;
  reference.run(kAtomicRowSum);
  std::string src = kInterchanged;
  src.replace(src.find("a(i,j)"), 6, "a(j,i)");
  it.run(src);
  EXPECT_NE(it.arrays.at("r").data, reference.arrays.at("r").data);
}

TEST(Interpreter, DetectsDroppedLoop) {
  EXPECT_NE(run("do i=1,n1\n  r(i) = r(i) + a(i,1)\nenddo\n"), run(kAtomicRowSum));
}

TEST(Interpreter, DetectsOrderDependentBody) {
  // A loop-carried dependence gives a different answer when the concurrent
  // iterations run in another order.
  Interpreter<std::int64_t> seq, dc;
  for (auto *it : {&seq, &dc}) {
    it->scalars["n"] = 5;
    it->arrays["x"] = Array<std::int64_t>({6}, 1);
  }
  seq.run("do i=2,n\n  x(i) = x(i-1) + i\nenddo\n");
  dc.run("do concurrent (i=2:n)\n  x(i) = x(i-1) + i\nenddo\n");
  EXPECT_NE(seq.arrays.at("x").data, dc.arrays.at("x").data);
}

TEST(Interpreter, UserFunctions) {
  Interpreter<double> it;
  it.functions["f"] = [](std::span<const double> args) { return 2 * args[0] + 1; };
  it.run("y = f(3.0)\n");
  EXPECT_DOUBLE_EQ(it.scalars["y"], 7.0);
}
