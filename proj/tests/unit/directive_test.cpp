#include <gtest/gtest.h>

#include "acc2dc/directive.hpp"
#include "acc2dc/errors.hpp"
#include "acc2dc/loop.hpp"

using namespace acc2dc;

TEST(Directive, KindsFromText) {
  struct Case {
    const char *text;
    DirectiveKind kind;
  } cases[] = {
      {"parallel default(present)", DirectiveKind::Parallel},
      {"end parallel", DirectiveKind::EndParallel},
      {"endparallel", DirectiveKind::EndParallel},
      {"loop collapse(3)", DirectiveKind::Loop},
      {"parallel loop", DirectiveKind::ParallelLoop},
      {"kernels", DirectiveKind::Kernels},
      {"end kernels", DirectiveKind::EndKernels},
      {"enter data copyin(a)", DirectiveKind::EnterData},
      {"exit data delete(a)", DirectiveKind::ExitData},
      {"update self(a)", DirectiveKind::Update},
      {"host_data use_device(a)", DirectiveKind::HostData},
      {"end host_data", DirectiveKind::EndHostData},
      {"declare create(t)", DirectiveKind::Declare},
      {"atomic update", DirectiveKind::Atomic},
      {"routine seq", DirectiveKind::Routine},
      {"wait", DirectiveKind::Wait},
      {"set device_num(0)", DirectiveKind::SetDeviceNum},
      {"PARALLEL LOOP COLLAPSE(2)", DirectiveKind::ParallelLoop},
  };
  for (const auto &c : cases)
    EXPECT_EQ(parse_directive_text(c.text).kind, c.kind) << c.text;
}

TEST(Directive, Clauses) {
  auto d = parse_directive_text("parallel loop collapse(3) reduction(+:s, t) private(x) async(1)");
  ASSERT_EQ(d.clauses.size(), 4u);
  const auto *r = d.find_clause("reduction");
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->reduction_op, ReductionOp::Add);
  EXPECT_EQ(r->args, (std::vector<std::string>{"s", "t"}));
  EXPECT_TRUE(d.has_clause("async"));
  EXPECT_EQ(collapse_count(d), 3u);
  EXPECT_FALSE(collapse_count(parse_directive_text("loop")).has_value());
  EXPECT_EQ(collapse_count(parse_directive_text("loop collapse(n)")), 0u);
  EXPECT_EQ(collapse_count(parse_directive_text("loop collapse(force:2)")), 2u);
}

TEST(Directive, ReductionOperators) {
  EXPECT_EQ(parse_reduction_op("max"), ReductionOp::Max);
  EXPECT_EQ(parse_reduction_op("*"), ReductionOp::Multiply);
  EXPECT_EQ(parse_reduction_op(".and."), ReductionOp::And);
  EXPECT_FALSE(parse_reduction_op("avg").has_value());
  EXPECT_THROW(parse_directive_text("loop reduction(avg:s)", 4), ParseError);
}

TEST(Directive, AtomicKinds) {
  EXPECT_EQ(parse_directive_text("atomic").atomic_kind, AtomicKind::Update);
  EXPECT_EQ(parse_directive_text("atomic write").atomic_kind, AtomicKind::Write);
  EXPECT_EQ(parse_directive_text("atomic capture").atomic_kind, AtomicKind::Capture);
}

TEST(Directive, ArgumentsOnDirectiveWord) {
  auto w = parse_directive_text("wait(1,2)");
  EXPECT_EQ(w.args, (std::vector<std::string>{"1", "2"}));
  auto s = parse_directive_text("set device_num(mod(r,4))");
  EXPECT_EQ(s.args, (std::vector<std::string>{"mod(r,4)"}));
}

TEST(Directive, UnknownDirectiveCarriesLine) {
  try {
    parse_directive_text("frobnicate", 12);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::UnknownDirective);
    EXPECT_EQ(e.line(), 12u);
  }
  EXPECT_THROW(parse_directive_text("loop collapse(2", 3), ParseError);
}

TEST(Directive, UnknownClausesAreKept) {
  auto d = parse_directive_text("parallel loop gang vector_length(128) shiny(3)");
  EXPECT_EQ(d.unknown_clauses, (std::vector<std::string>{"shiny"}));
}

TEST(Directive, RenderRoundTrip) {
  for (const char *text : {"parallel loop collapse(2) reduction(max:m) default(present)",
                           "enter data copyin(a,b) async(2)", "atomic update", "wait(1)",
                           "set device_num(0)", "routine(f) seq", "end parallel"}) {
    auto d = parse_directive_text(text);
    auto rendered = render_directive(d);
    ASSERT_EQ(rendered.rfind("!$acc ", 0), 0u) << rendered;
    auto again = parse_directive_text(rendered.substr(6));
    EXPECT_TRUE(d.same_content(again)) << text << " -> " << rendered;
  }
}

TEST(Directive, ParseFromLogicalLine) {
  auto src = load_source("x = 1\n!$acc parallel loop &\n!$acc& collapse(2)\n");
  auto lines = assemble_logical_lines(src);
  auto d = parse_directive(lines[1], 1);
  EXPECT_EQ(d.kind, DirectiveKind::ParallelLoop);
  EXPECT_EQ(d.line, 2u);
  EXPECT_EQ(d.logical_index, 1u);
  EXPECT_EQ(collapse_count(d), 2u);
}
