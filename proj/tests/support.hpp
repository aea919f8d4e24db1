#pragma once

#include <random>
#include <string>
#include <vector>

#include "ltioco/ltioco.hpp"

namespace ltioco::testing {

inline std::string fixture(const std::string& name) { return std::string(LTIOCO_MODELS_DIR) + "/" + name; }

inline Tioa load_fixture(const std::string& name) { return load_model(fixture(name)); }

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {
      "machine.ta",     "a1_impl.ta",     "a1prime_spec.ta", "customer.ta",      "delay_a0.ta",
      "delay_a1.ta",    "delay_a2.ta",    "delay_a3.ta",     "quiet_a1.ta",      "quiet_a2.ta",
      "quiet_a3.ta",    "quiet_a4.ta",    "quiet_a5.ta",     "sender_spec.ta",   "sender_impl.ta",
      "receiver_spec.ta", "receiver_impl.ta", "zeno_tau.ta"};
  return names;
}

struct RandomModelOptions {
  int max_locations = 3;
  int max_clocks = 2;
  int max_constant = 4;
  int max_switches = 6;
  std::vector<std::string> inputs = {"a"};
  std::vector<std::string> outputs = {"o"};
};

// Closed-constraint models without tau cycles.
class ModelGenerator {
 public:
  explicit ModelGenerator(unsigned seed, RandomModelOptions opts = {}) : rng_(seed), opts_(std::move(opts)) {}

  Tioa next(const std::string& name) {
    while (true) {
      Tioa a = draw(name);
      if (validate(a).ok() && !detail::has_tau_cycle(a)) return a;
    }
  }

  // Same skeleton with one guard, invariant or target perturbed.
  Tioa mutate(const Tioa& base, const std::string& name) {
    while (true) {
      Tioa a = base;
      a.name = name;
      int what = uniform(0, 3);
      if (what == 0 && !a.switches.empty()) {
        a.switches[pick(a.switches.size())].guard = random_guard(a);
      } else if (what == 1) {
        a.locations[pick(a.locations.size())].invariant = random_invariant(a);
      } else if (what == 2 && !a.switches.empty()) {
        a.switches[pick(a.switches.size())].target = a.locations[pick(a.locations.size())].name;
      } else {
        a.switches.push_back(random_switch(a));
      }
      if (validate(a).ok() && !detail::has_tau_cycle(a)) return a;
    }
  }

  std::mt19937& rng() { return rng_; }

 private:
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(uniform(0, static_cast<int>(n) - 1)); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  ClockConstraint random_guard(const Tioa& a) {
    ClockConstraint c;
    if (a.clocks.empty()) return c;
    int atoms = uniform(0, 2);
    static const Relation rels[] = {Relation::LessEq, Relation::GreaterEq, Relation::Equal};
    for (int i = 0; i < atoms; ++i) {
      c.conjuncts.push_back({a.clocks[pick(a.clocks.size())], "", rels[uniform(0, 2)], uniform(0, opts_.max_constant)});
    }
    return c;
  }

  ClockConstraint random_invariant(const Tioa& a) {
    ClockConstraint c;
    if (a.clocks.empty() || coin(0.5)) return c;
    c.conjuncts.push_back({a.clocks[pick(a.clocks.size())], "", Relation::LessEq, uniform(0, opts_.max_constant)});
    return c;
  }

  Switch random_switch(const Tioa& a) {
    Switch s;
    s.source = a.locations[pick(a.locations.size())].name;
    s.target = a.locations[pick(a.locations.size())].name;
    s.guard = random_guard(a);
    int kind = uniform(0, 9);
    if (kind < 4) {
      s.action = ActionLabel::input(opts_.inputs[pick(opts_.inputs.size())]);
    } else if (kind < 9) {
      s.action = ActionLabel::output(opts_.outputs[pick(opts_.outputs.size())]);
    } else {
      s.action = ActionLabel::tau();
    }
    for (const auto& x : a.clocks)
      if (coin(0.4)) s.resets.push_back(x);
    return s;
  }

  Tioa draw(const std::string& name) {
    Tioa a;
    a.name = name;
    a.inputs = opts_.inputs;
    a.outputs = opts_.outputs;
    int nclocks = uniform(1, opts_.max_clocks);
    for (int i = 0; i < nclocks; ++i) a.clocks.push_back(std::string(1, static_cast<char>('x' + i)));
    int nloc = uniform(1, opts_.max_locations);
    for (int i = 0; i < nloc; ++i) {
      Location l;
      l.name = "l" + std::to_string(i);
      a.locations.push_back(l);
    }
    for (auto& l : a.locations) l.invariant = random_invariant(a);
    a.initial = "l0";
    int nsw = uniform(1, opts_.max_switches);
    for (int i = 0; i < nsw; ++i) a.switches.push_back(random_switch(a));
    return a;
  }

  std::mt19937 rng_;
  RandomModelOptions opts_;
};

}  // namespace ltioco::testing
