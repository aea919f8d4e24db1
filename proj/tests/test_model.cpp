#include <gtest/gtest.h>

#include "support.hpp"

using namespace ltioco;
using ltioco::testing::fixture_names;
using ltioco::testing::load_fixture;

namespace {

Errc parse_error(const std::string& text) {
  try {
    parse_model(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << text;
  return Errc::InvalidModel;
}

}  // namespace

TEST(Model, CoffeeMachineShape) {
  Tioa m = load_fixture("machine.ta");
  EXPECT_EQ(m.locations.size(), 5u);
  EXPECT_EQ(m.clocks.size(), 2u);
  EXPECT_EQ(max_constant(m), 20);
  ValidationReport r = validate(m);
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.diagonal_free);
  EXPECT_TRUE(r.tau_cycle_free);
  EXPECT_TRUE(r.invariants_downward_closed);
  EXPECT_EQ(r.max_constant, 20);
}

TEST(Model, MinimalFile) {
  Tioa a = parse_model("automaton A\nlocation l0 initial");
  EXPECT_EQ(a.name, "A");
  ASSERT_EQ(a.locations.size(), 1u);
  EXPECT_EQ(a.initial, "l0");
  EXPECT_TRUE(validate(a).ok());
}

TEST(Model, DefaultsForOmittedClauses) {
  Tioa a = parse_model("automaton A\nclocks x\nlocation l0 initial\nswitch l0 -> l0");
  ASSERT_EQ(a.switches.size(), 1u);
  EXPECT_TRUE(a.switches[0].action.is_tau());
  EXPECT_TRUE(a.switches[0].guard.conjuncts.empty());
  EXPECT_TRUE(a.switches[0].resets.empty());
}

TEST(Model, DiagonalAtomIsSemanticError) {
  EXPECT_EQ(parse_error("automaton A\nclocks x y\nlocation l0 initial invariant x - y <= 3"), Errc::SemanticError);
}

TEST(Model, DiagonalRejectedByValidation) {
  Tioa a = parse_model("automaton A\nclocks x y\nlocation l0 initial");
  a.locations[0].invariant.conjuncts.push_back({"x", "y", Relation::LessEq, 3});
  ValidationReport r = validate(a);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.diagonal_free);
  try {
    require_valid(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DiagonalConstraint);
  }
}

TEST(Model, SemanticErrors) {
  EXPECT_EQ(parse_error("automaton A\nlocation l0 initial invariant z <= 1"), Errc::SemanticError);
  EXPECT_EQ(parse_error("automaton A\nlocation l0 initial\nswitch l0 -> l0 via ?a"), Errc::SemanticError);
  EXPECT_EQ(parse_error("automaton A\nclocks x\nlocation l0 initial invariant x <= 2.5"), Errc::SemanticError);
}

TEST(Model, SyntaxErrorCarriesPosition) {
  try {
    parse_model("automaton A\nclocks x\nlocation l0 initial invariant x <=");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SyntaxError);
    std::string msg = e.what();
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column"), std::string::npos) << msg;
  }
  EXPECT_EQ(parse_error("automaton A\nlocation l0 initial\nswitch l0 => l0"), Errc::SyntaxError);
}

TEST(Model, InvariantMustBeDownwardClosed) {
  Tioa a = parse_model("automaton A\nclocks x\nlocation l0 initial invariant x >= 2");
  ValidationReport r = validate(a);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.invariants_downward_closed);
}

TEST(Model, TauCycleIsWarning) {
  Tioa a = parse_model("automaton A\nlocation l0 initial\nlocation l1\nswitch l0 -> l1\nswitch l1 -> l0");
  ValidationReport r = validate(a);
  EXPECT_TRUE(r.ok());
  EXPECT_FALSE(r.tau_cycle_free);
  EXPECT_FALSE(r.problems.empty());
}

TEST(Model, RoundTripAllFixtures) {
  for (const auto& f : fixture_names()) {
    Tioa a = load_fixture(f);
    EXPECT_TRUE(validate(a).ok()) << f;
    EXPECT_EQ(parse_model(render_model(a)), a) << f;
  }
}

TEST(Model, ComposeMachineAndCustomer) {
  Tioa m = load_fixture("machine.ta"), c = load_fixture("customer.ta");
  ASSERT_TRUE(composable(m, c));
  Tioa p = compose(m, c);
  EXPECT_TRUE(validate(p).ok());
  EXPECT_EQ(p.clocks.size(), 3u);
  // press, sugar and coffee are internal; proceed stays an output.
  EXPECT_TRUE(p.inputs.empty());
  EXPECT_EQ(p.outputs, std::vector<std::string>{"proceed"});
  EXPECT_EQ(p.initial, "idle.c_idle");
  EXPECT_EQ(parse_model(render_model(p)), p);
}

TEST(Model, ComposeRenamesClashingClocks) {
  Tioa a = load_fixture("sender_spec.ta");
  Tioa b = parse_model("automaton B\nclocks x\ninputs req\noutputs ack\nlocation b0 initial invariant x <= 2\n"
                       "switch b0 -> b0 via ?req reset x\nswitch b0 -> b0 when x >= 1 via !ack");
  Tioa p = compose(a, b);
  EXPECT_EQ(p.clocks.size(), 2u);
  EXPECT_NE(p.clocks[0], p.clocks[1]);
}

TEST(Model, NotComposable) {
  Tioa m = load_fixture("machine.ta");
  try {
    compose(m, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotComposable);
  }
}
