#include <gtest/gtest.h>

#include "fuzz.hpp"
#include "netquery/corpus.hpp"
#include "netquery/pipeline.hpp"
#include "oracles.hpp"

using namespace netquery;

namespace {

const Engine& ordered_path() {
  static auto e = load_engine(oracle::corpus_dir() / "ordered-path" / "input");
  return *e;
}

const Engine& flipped() {
  static auto e = load_engine(oracle::corpus_dir() / "ordered-path-flipped" / "input");
  return *e;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Usage;
}

std::string outcome(const ql::Program& p, const Network& net) {
  try {
    auto a = ql::interpret(p, net, {2000, std::chrono::milliseconds(5000)});
    std::string out = a.value.repr();
    for (const auto& t : a.trace) out += "|" + t.call + t.args.dump() + t.result.dump();
    return out;
  } catch (const Error& e) {
    return std::string("error ") + std::string(to_string(e.code()));
  }
}

std::string fig4_source() { return read_file(oracle::corpus_dir() / "ordered-path" / "input" / "program.nq"); }

}  // namespace

// worked example: the ordered-path program answers True with three predicate calls
TEST(OrderedPathExample, AnswersTrueWithThreeCalls) {
  auto r = run_program(ordered_path(), fig4_source());
  EXPECT_EQ(r.answer.value, ql::Value::of(true));
  ASSERT_EQ(r.answer.trace.size(), 3u);
  EXPECT_EQ(r.answer.trace[0].call, "ExistPath");
  EXPECT_EQ(r.answer.trace[1].call, "ExistPath");
  EXPECT_EQ(r.answer.trace[2].call, "TraceRoute");
  EXPECT_EQ(r.answer.trace[2].result, nlohmann::json({"R1", "R2", "R3"}));
}

// [DERIVED] lowering the preference below the default flips the verdict
TEST(OrderedPathExample, FlippedPreferenceAnswersFalse) {
  auto r = run_program(flipped(), fig4_source());
  EXPECT_EQ(r.answer.value, ql::Value::of(false));
  auto want = oracle::corpus_networks().at("ordered-path-flipped").trace("R1", "R3");
  EXPECT_EQ(r.answer.trace.back().result, nlohmann::json(*want));
}

// [DERIVED] AST -> text -> AST is the identity, and printing is a fixed point
TEST(RoundTrip, FuzzedProgramsSurvivePrintAndParse) {
  fuzz::ProgramFuzzer gen(20240611);
  for (int i = 0; i < 1000; ++i) {
    auto p = gen.program();
    std::string text = ql::print_program(p);
    ql::Program back;
    ASSERT_NO_THROW(back = ql::parse_program(text)) << text;
    ASSERT_EQ(back, p) << text;
    ASSERT_EQ(ql::print_program(back), text);
  }
}

TEST(RoundTrip, SourceFormattingIsNormalized) {
  auto a = ql::parse_program("x = [ 'R1' ,'R2', ]\nif x:   # note\n  return   not  x\n");
  auto b = ql::parse_program(ql::print_program(a));
  EXPECT_EQ(a, b);
  EXPECT_EQ(ql::print_program(a), "x = ['R1', 'R2']\nif x:\n    return not x\n");
}

TEST(Determinism, SameProgramSameOutcome) {
  fuzz::ProgramFuzzer gen(7);
  const Network& net = *ordered_path().network;
  for (int i = 0; i < 200; ++i) {
    auto p = gen.program();
    EXPECT_EQ(outcome(p, net), outcome(p, net)) << ql::print_program(p);
  }
}

TEST(Determinism, TraceIsStableAcrossEngines) {
  auto other = load_engine(oracle::corpus_dir() / "ordered-path" / "input");
  EXPECT_EQ(outcome(ql::parse_program(fig4_source()), *other->network),
            outcome(ql::parse_program(fig4_source()), *ordered_path().network));
}

TEST(Errors, SyntaxErrorsCarryPosition) {
  try {
    ql::parse_program("x = 1\ny = [2 3]\n");
    FAIL();
  } catch (const ql::ParseError& e) {
    EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
    EXPECT_EQ(e.line(), 2);
    EXPECT_FALSE(e.expected().empty());
  }
}

TEST(Errors, UnsupportedConstructsAreSyntaxErrors) {
  for (const char* src : {"def f():\n    return 1\n", "x = 1 + 2\n", "x = [a for a in y]\n", "x = y.hops\n",
                          "while True:\n    x = 1\n", "x = y[1:2]\n", "x = (1, 2)\n", "x = 1 < 2 < 3\n",
                          "import os\n"}) {
    EXPECT_EQ(code_of([&] { ql::parse_program(src); }), ErrorCode::SyntaxError) << src;
  }
}

TEST(Errors, UnknownPredicateAndArity) {
  EXPECT_EQ(code_of([] { ql::parse_program("x = Teleport('R1', 'R2')\n"); }), ErrorCode::UnknownPredicate);
  EXPECT_EQ(code_of([] { ql::parse_program("x = foo(1)\n"); }), ErrorCode::UnknownPredicate);
  EXPECT_EQ(code_of([] { ql::parse_program("x = Reach('R1')\n"); }), ErrorCode::ArityMismatch);
  EXPECT_EQ(code_of([] { ql::parse_program("x = ExistPath(['R1'], ['R2'])\n"); }), ErrorCode::ArityMismatch);
  EXPECT_EQ(code_of([] { ql::parse_program("x = len(1, 2)\n"); }), ErrorCode::ArityMismatch);
}

TEST(Errors, RuntimeErrorCodes) {
  const Network& net = *ordered_path().network;
  auto run = [&](const char* src, ql::Budget b = {}) { ql::interpret(ql::parse_program(src), net, b); };
  EXPECT_EQ(code_of([&] { run("return y\n"); }), ErrorCode::NameError);
  EXPECT_EQ(code_of([&] { run("return 1 == 'a'\n"); }), ErrorCode::TypeError);
  EXPECT_EQ(code_of([&] { run("return [1][3]\n"); }), ErrorCode::IndexError);
  EXPECT_EQ(code_of([&] { run("x = 1\n"); }), ErrorCode::NoResult);
  EXPECT_EQ(code_of([&] { run("return ExistPath('R1')\n"); }), ErrorCode::TypeError);
  EXPECT_EQ(code_of([&] { run("for i in [1, 2, 3, 4]:\n    x = i\nreturn x\n", {3, std::chrono::seconds(5)}); }),
            ErrorCode::BudgetExceeded);
}

// [TRIVIAL]
TEST(Semantics, LiteralsAndOperators) {
  const Network& net = *ordered_path().network;
  auto val = [&](const char* src) { return ql::interpret(ql::parse_program(src), net).value; };
  EXPECT_EQ(val("return 1 == 1\n"), ql::Value::of(true));
  EXPECT_EQ(val("return [1, 2][-1]\n"), ql::Value::of(2LL));
  EXPECT_EQ(val("return 'R2' in ['R1', 'R2']\n"), ql::Value::of(true));
  EXPECT_EQ(val("return len('abc')\n"), ql::Value::of(3LL));
  EXPECT_EQ(val("return None is None and not 0\n"), ql::Value::of(true));
  EXPECT_EQ(val("answer = False\n"), ql::Value::of(false));
  EXPECT_EQ(val("return 0 or 'x'\n"), ql::Value::of(std::string("x")));
}

TEST(Semantics, PredicateFailuresBecomeNone) {
  const Network& net = *ordered_path().network;
  auto a = ql::interpret(ql::parse_program("return [ExistPath(['R1', 'R3']), TraceRoute('R1', 'R9')]\n"), net);
  EXPECT_EQ(a.value.repr(), "[None, None]");
  EXPECT_EQ(a.trace.size(), 2u);
}

// [DERIVED] predicate results agree with the link-table oracle
TEST(Semantics, PredicatesMatchOracle) {
  const Network& net = *ordered_path().network;
  auto o = oracle::corpus_networks().at("ordered-path");
  auto val = [&](const std::string& src) { return ql::interpret(ql::parse_program(src), net).value.to_json(); };
  EXPECT_EQ(val("return OSPFWeight(['R1', 'R4', 'R5', 'R3'])\n"), *o.weight({"R1", "R4", "R5", "R3"}));
  EXPECT_EQ(val("return ShortestOSPFPath(R1, R3)\n"), nlohmann::json(*o.shortest("R1", "R3")));
  EXPECT_EQ(val("return len(AllPath('R1', 'R3'))\n"), o.all_paths("R1", "R3").size());
  EXPECT_EQ(val("return query { Reach('R4', 'R2') }\n"), o.adjacent("R4", "R2"));
  EXPECT_EQ(val("return Reach('R4', 'R5')\n"), o.adjacent("R4", "R5"));
}

TEST(Lint, FlagsUnreachableCode) {
  auto p = ql::parse_program("return 1\nx = 2\n");
  EXPECT_FALSE(ql::lint(p).empty());
}

// [DERIVED] every template renders to text that parses back to the same requirement
TEST(Templates, RenderThenMatchIsIdentity) {
  std::vector<Requirement> samples = {
      {RequirementKind::ExistPath, {{"R1", "R2", "R3"}}, true},
      {RequirementKind::OrderedPath, {{"R1", "R2", "R3"}, {"R1", "R4", "R5", "R3"}}, true},
      {RequirementKind::LoadBalance, {{"R1", "R2", "R4"}, {"R1", "R3", "R4"}}, true},
      {RequirementKind::KConnected, {{"R1", "R2", "R3"}, {"R1", "R5", "R4", "R3"}}, true},
  };
  ASSERT_FALSE(question_templates().empty());
  for (const auto& t : question_templates()) {
    for (const auto& r : samples) {
      if (r.kind != t.kind) continue;
      auto q = render_question(t, r);
      auto m = match_question(q);
      ASSERT_TRUE(m.has_value()) << q;
      EXPECT_EQ(m->kind, r.kind) << q;
      EXPECT_EQ(m->paths, r.paths) << q;
    }
  }
  for (auto k : all_kinds()) EXPECT_FALSE(templates_for(k).empty()) << to_string(k);
}

TEST(Templates, NumberedBundlesAndMisses) {
  auto t = templates_for(RequirementKind::ExistPath).front();
  Requirement a{RequirementKind::ExistPath, {{"R1", "R2"}}, true};
  Requirement b{RequirementKind::ExistPath, {{"R2", "R3"}}, true};
  auto m = match_questions("(1) " + render_question(t, a) + "\n(2) " + render_question(t, b) + "\n");
  ASSERT_TRUE(m.has_value());
  ASSERT_EQ(m->size(), 2u);
  EXPECT_EQ((*m)[1].paths[0], (Hops{"R2", "R3"}));
  EXPECT_FALSE(match_question("What is the weather like?").has_value());
}

TEST(Compiler, ProgramsParseAndUseExpectedPredicates) {
  Requirement op{RequirementKind::OrderedPath, {{"R1", "R2", "R3"}, {"R1", "R4", "R5", "R3"}}, true};
  auto p = compile_question("", RequirementKind::OrderedPath, op);
  std::vector<std::string> calls;
  for (const auto* c : ql::predicate_calls(p)) calls.push_back(c->text);
  EXPECT_EQ(calls, (std::vector<std::string>{"ExistPath", "ExistPath", "TraceRoute"}));
  EXPECT_EQ(ql::interpret(p, *ordered_path().network).value, ql::Value::of(true));
  EXPECT_EQ(ql::interpret(p, *flipped().network).value, ql::Value::of(false));
}

TEST(Compiler, RejectsBadRequirements) {
  Requirement bad{RequirementKind::LoadBalance, {{"R1", "R2"}, {"R3", "R2"}}, true};
  EXPECT_EQ(code_of([&] { compile_source(bad); }), ErrorCode::Usage);
  EXPECT_EQ(code_of([] { compile_question("q", "Teleport"); }), ErrorCode::UnknownKind);
  EXPECT_EQ(code_of([] { compile_question("What is the weather like?", RequirementKind::ExistPath); }),
            ErrorCode::Usage);
}

TEST(Compiler, BundleIsConjunction) {
  Requirement yes{RequirementKind::ExistPath, {{"R1", "R2", "R3"}}, true};
  Requirement no{RequirementKind::ExistPath, {{"R1", "R3"}}, false};
  const Network& net = *ordered_path().network;
  auto verdict = [&](std::vector<Requirement> rs) {
    return ql::interpret(ql::parse_program(compile_bundle_source(rs)), net).value.truthy();
  };
  EXPECT_TRUE(verdict({yes}));
  EXPECT_FALSE(verdict({no}));
  EXPECT_FALSE(verdict({yes, no}));
  EXPECT_TRUE(verdict({yes, yes}));
}

TEST(Question, TemplatedQuestionUsesCompiler) {
  auto r = answer_question(ordered_path(), read_file(oracle::corpus_dir() / "ordered-path-question" / "input" / "question.txt"));
  EXPECT_EQ(r.origin, "template");
  EXPECT_EQ(r.answer.value, ql::Value::of(true));
}

TEST(Question, FreeTextWithoutEndpointIsUsageError) {
  try {
    answer_question(ordered_path(), "Which path is nicest?");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Usage);
    EXPECT_EQ(e.stage(), "compile");
  }
}
