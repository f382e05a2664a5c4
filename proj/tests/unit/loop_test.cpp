#include <gtest/gtest.h>

#include "acc2dc/errors.hpp"
#include "acc2dc/loop.hpp"

using namespace acc2dc;

namespace {

LoopNest nest_of(const std::string &text, std::size_t at = 0) {
  return parse_loop_nest(load_source(text), at);
}

} // namespace

TEST(DoForms, Classification) {
  EXPECT_EQ(classify_do("do i=1,n"), DoForm::Counted);
  EXPECT_EQ(classify_do("DO I = 1, N, 2"), DoForm::Counted);
  EXPECT_EQ(classify_do("outer: do k=1,n3"), DoForm::Counted);
  EXPECT_EQ(classify_do("do concurrent (i=1:n)"), DoForm::Concurrent);
  EXPECT_EQ(classify_do("do while (x < 1)"), DoForm::While);
  EXPECT_EQ(classify_do("do"), DoForm::Infinite);
  EXPECT_EQ(classify_do("do 10 i=1,n"), DoForm::Labeled);
  EXPECT_EQ(classify_do("done = 1"), DoForm::NotDo);
  EXPECT_EQ(classify_do("x = 1"), DoForm::NotDo);
  EXPECT_TRUE(is_end_do("enddo"));
  EXPECT_TRUE(is_end_do("END DO"));
  EXPECT_TRUE(is_end_do("end do outer"));
  EXPECT_FALSE(is_end_do("end if"));
}

TEST(DoForms, HeaderBounds) {
  auto b = parse_do_header("do i=1,n1,2");
  ASSERT_TRUE(b);
  EXPECT_EQ(b->index_var, "i");
  EXPECT_EQ(b->lower, "1");
  EXPECT_EQ(b->upper, "n1");
  EXPECT_EQ(b->stride, "2");
  auto c = parse_do_header("do j = max(1,lo), min(n,hi)");
  ASSERT_TRUE(c);
  EXPECT_EQ(c->lower, "max(1,lo)");
  EXPECT_EQ(c->upper, "min(n,hi)");
  EXPECT_FALSE(c->stride);
  EXPECT_FALSE(parse_do_header("do while (x)"));
}

TEST(LoopNest, PerfectTripleNest) {
  auto n = nest_of("do k=1,n3\n  do j=1,n2\n    do i=1,n1\n      a(i,j,k)=0\n    enddo\n  enddo\nenddo\n");
  ASSERT_EQ(n.loops.size(), 3u);
  EXPECT_EQ(n.perfectly_nested_depth, 3u);
  EXPECT_EQ(n.loops[0].bounds.index_var, "k");
  EXPECT_EQ(n.loops[2].bounds.index_var, "i");
  EXPECT_EQ(n.body_begin, 3u);
  EXPECT_EQ(n.body_end, 4u);
  EXPECT_EQ(n.loops[0].end_index, 6u);
}

TEST(LoopNest, StatementBetweenLoopsLimitsDepth) {
  // Hand-labelled: the assignment between the k and j headers breaks perfect nesting.
  auto n = nest_of("do k=1,n3\n  s(k) = 0\n  do j=1,n2\n    s(k) = s(k) + a(j,k)\n  enddo\nenddo\n");
  EXPECT_EQ(n.perfectly_nested_depth, 1u);
}

TEST(LoopNest, CommentsAndBlanksDoNotBreakNesting) {
  auto n = nest_of("do j=1,n2\n  ! inner\n\n  do i=1,n1\n    a(i,j)=0\n  enddo\nenddo\n");
  EXPECT_EQ(n.perfectly_nested_depth, 2u);
}

TEST(LoopNest, ConcurrentPayload) {
  auto n = nest_of("do concurrent (j=1:n2, i=1:n1)\n  a(i,j)=0\nenddo\n");
  EXPECT_TRUE(n.concurrent);
  EXPECT_EQ(n.loops.size(), 1u);
}

TEST(LoopNest, Errors) {
  EXPECT_THROW(nest_of("do while (x < 1)\n  x = x + 1\nenddo\n"), ParseError);
  EXPECT_THROW(nest_of("do i=1,n\n  a(i)=0\n"), ParseError);
  auto lines = assemble_logical_lines(load_source("do i=1,n\n  do j=1,n\n  enddo\nenddo\n"));
  EXPECT_EQ(find_end_do(lines, 0), 3u);
  EXPECT_EQ(find_end_do(lines, 1), 2u);
}

TEST(LoopNest, UppercaseAndConstructName) {
  auto n = nest_of("outer: DO k=1,n\n  a(k)=0\nENDDO outer\n");
  EXPECT_TRUE(n.loops[0].upper_case);
  EXPECT_EQ(n.loops[0].construct_name, "outer");
}
