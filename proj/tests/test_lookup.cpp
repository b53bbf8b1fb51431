#include "support/worlds.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <thread>

using namespace semx;
using namespace semx::testing;

namespace {

// Three frames with distinct imports: script S imports a, method M1 imports
// b, method M2 imports c then a.
struct StackWorld {
  World world;
  CallStack stack;
};

StackWorld stack_world() {
  WorldBuilder b;
  for (auto e : {"a", "b", "c"}) b.add_extension(ext("X", e));
  b.add_class(class_def("Object", "P", std::nullopt));
  MethodId m1 = b.add_method(method_def("Object", sig("m1"), global(), "P", {ext("X", "b")}));
  MethodId m2 =
      b.add_method(method_def("Object", sig("m2"), global(), "P", {ext("X", "c"), ext("X", "a")}));
  ScriptDef s;
  s.name = "S";
  s.package = "P";
  s.imports = {ext("X", "a")};
  b.add_script(s);
  World w = std::move(b).build();
  return {std::move(w), CallStack{ScriptId{"P", "S"}, m1, m2}};
}

std::vector<ExtensionRef> refs(const ActiveExtensions& a) { return {a.begin(), a.end()}; }

}  // namespace

TEST(StrategyNames, RoundTrip) {
  for (auto a : kAllActivations) EXPECT_EQ(parse_activation(to_string(a)), a);
  for (auto s : kAllSelections) EXPECT_EQ(parse_selection(to_string(s)), s);
  EXPECT_FALSE(parse_activation("dynamic").has_value());
  EXPECT_FALSE(parse_selection("").has_value());
}

TEST(ActiveExtensions, DefaultIsGlobalOnly) {
  ActiveExtensions a;
  ASSERT_EQ(a.size(), 1u);
  EXPECT_TRUE(a[0].is_global());
  EXPECT_EQ(a.str(), "<global>");
}

TEST(ActiveExtensions, DedupKeepsFirstAndGlobalLast) {
  std::vector<ExtensionRef> in{ext("X", "b"), global(), ext("X", "a"), ext("X", "b")};
  ActiveExtensions a(in);
  EXPECT_EQ(refs(a), (std::vector<ExtensionRef>{ext("X", "b"), ext("X", "a"), global()}));
  EXPECT_EQ(a.position(ext("X", "a")), 2u);
  EXPECT_EQ(a.position(global()), 3u);
  EXPECT_FALSE(a.position(ext("X", "z")).has_value());
  EXPECT_EQ(a.str(), "<X.b, X.a, global>");
}

TEST(Activation, BottomUpGivesCallersPriority) {
  auto [w, stack] = stack_world();
  EXPECT_EQ(refs(active_exts_bottom_up(w, stack, {})),
            (std::vector<ExtensionRef>{ext("X", "a"), ext("X", "b"), ext("X", "c"), global()}));
}

TEST(Activation, TopDownGivesCalleesPriority) {
  auto [w, stack] = stack_world();
  EXPECT_EQ(refs(active_exts_top_down(w, stack, {})),
            (std::vector<ExtensionRef>{ext("X", "c"), ext("X", "a"), ext("X", "b"), global()}));
}

TEST(Activation, LexicalUsesOnlyTheSender) {
  auto [w, stack] = stack_world();
  EXPECT_EQ(refs(active_exts_lexical(w, stack, {})),
            (std::vector<ExtensionRef>{ext("X", "c"), ext("X", "a"), global()}));
}

TEST(Activation, EmptyStackGivesGlobalOnly) {
  auto [w, stack] = stack_world();
  for (auto a : kAllActivations)
    EXPECT_EQ(active_extensions(w, {}, a, {}).str(), "<global>") << to_string(a);
}

TEST(Activation, Fig6CaseCUnderEachStrategy) {
  World w = fixture_world("fig6");
  CallStack stack{script_named(w, "caseC"), find_method(w, "C3", sig("sendRedefinedToVia", 2)),
                  find_method(w, "C2", sig("sendRedefinedTo", 1))};
  EXPECT_EQ(active_exts_bottom_up(w, stack, {}).str(), "<P3.E3, P2.E2, global>");
  EXPECT_EQ(active_exts_top_down(w, stack, {}).str(), "<P2.E2, P3.E3, global>");
  EXPECT_EQ(active_exts_lexical(w, stack, {}).str(), "<P2.E2, global>");
}

TEST(LookupInClass, FirstDefiningExtension) {
  World w = fixture_world("fig6");
  std::vector<ExtensionRef> exts{ext("P3", "E3"), ext("P2", "E2"), global()};
  auto r = lookup_in_class(w, "C1", sig("redefined"), exts);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->ext, ext("P3", "E3"));
  EXPECT_FALSE(lookup_in_class(w, "C2", sig("redefined"), exts));
  EXPECT_FALSE(lookup_in_class(w, "C1", sig("redefined"), {}));
}

TEST(LookupInExtension, WalksSuperclasses) {
  World w = fixture_world("selection_example");
  auto r = lookup_in_extension(w, "B", sig("foo"), ext("Ext1", "e1"));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->cls, "A");
  EXPECT_FALSE(lookup_in_extension(w, "Object", sig("foo"), ext("Ext1", "e1")));
  EXPECT_FALSE(lookup_in_extension(w, "B", sig("foo"), global()));
}

TEST(Selection, DivergenceOnSelectionExample) {
  World w = fixture_world("selection_example");
  std::vector<ExtensionRef> exts{ext("Ext1", "e1"), ext("Ext2", "e2"), global()};
  auto e = select_extensions_first(w, "B", sig("foo"), exts);
  auto h = select_hierarchy_first(w, "B", sig("foo"), exts);
  ASSERT_TRUE(e && h);
  EXPECT_EQ(e->cls, "B");
  EXPECT_EQ(e->ext, exts[1]);
  EXPECT_EQ(h->cls, "A");
  EXPECT_EQ(h->ext, exts[0]);
}

TEST(Selection, NotUnderstoodIsEmpty) {
  World w = fixture_world("selection_example");
  for (auto s : kAllSelections) {
    EXPECT_FALSE(select(w, "B", sig("bar"), std::vector{global()}, s));
    EXPECT_FALSE(select(w, "Nope", sig("foo"), std::vector{global()}, s));
  }
}

TEST(Lookup, ComposesActivationAndSelection) {
  World w = fixture_world("selection_example");
  CallStack stack{script_named(w, "main")};
  for (auto a : kAllActivations) {
    StrategyConfig cfg;
    cfg.activation = a;
    cfg.selection = SelectionStrategy::ExtensionsFirst;
    EXPECT_EQ(lookup(w, "B", sig("foo"), stack, cfg)->cls, "B");
    cfg.selection = SelectionStrategy::HierarchyFirst;
    EXPECT_EQ(lookup(w, "B", sig("foo"), stack, cfg)->cls, "A");
  }
}

TEST(MethodLookup, CacheHitsOnRepeat) {
  World w = fixture_world("fig6");
  MethodLookup ml(w, StrategyConfig{});
  ActiveExtensions exts(std::vector<ExtensionRef>{ext("P2", "E2")});
  auto first = ml.resolve("C1", sig("redefined"), exts);
  auto second = ml.resolve("C1", sig("redefined"), exts);
  EXPECT_EQ(first, second);
  EXPECT_EQ(ml.cache_hits(), 1u);
  EXPECT_EQ(ml.cache_size(), 1u);
}

TEST(MethodLookup, NoCacheWhenDisabled) {
  World w = fixture_world("fig6");
  StrategyConfig cfg;
  cfg.cache_enabled = false;
  MethodLookup ml(w, cfg);
  ActiveExtensions exts;
  ml.resolve("C1", sig("redefined"), exts);
  ml.resolve("C1", sig("redefined"), exts);
  EXPECT_EQ(ml.cache_hits(), 0u);
  EXPECT_EQ(ml.cache_size(), 0u);
}

TEST(MethodLookup, ConcurrentCallersAgree) {
  World w = fixture_world("fig6");
  MethodLookup ml(w, StrategyConfig{});
  ActiveExtensions exts(std::vector<ExtensionRef>{ext("P3", "E3"), ext("P2", "E2")});
  auto expected = select(w, "C1", sig("redefined"), exts.refs(), SelectionStrategy::HierarchyFirst);
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&] {
      for (int i = 0; i < 200; ++i)
        if (ml.resolve("C1", sig("redefined"), exts) != expected) ++mismatches;
    });
  for (auto& th : threads) th.join();
  EXPECT_EQ(mismatches.load(), 0);
  EXPECT_EQ(ml.cache_size(), 1u);
  EXPECT_EQ(ml.cache_hits(), 8u * 200u - 1u);
}

// ---------------------------------------------------------------------------
// Properties

TEST(LookupProperties, SelectionMatchesGridOracle) {
  std::mt19937 rng(101);
  for (int round = 0; round < 300; ++round) {
    World w = random_world(rng);
    std::vector<ExtensionRef> all;
    for (const auto& [ref, e] : w.extensions()) all.push_back(ref);
    for (int trial = 0; trial < 5; ++trial) {
      std::shuffle(all.begin(), all.end(), rng);
      ActiveExtensions exts(all);
      for (const auto& [cls, c] : w.classes())
        for (const auto& s : {sig("m"), sig("n"), sig("k", 1)})
          for (auto strategy : kAllSelections) {
            std::vector<ExtensionRef> seq(exts.begin(), exts.end());
            EXPECT_EQ(select(w, cls, s, exts.refs(), strategy),
                      oracle_select(w, cls, s, seq, strategy))
                << cls << " " << s.str() << " " << exts.str();
          }
    }
  }
}

TEST(LookupProperties, TopDownIsBottomUpOfReversedStack) {
  std::mt19937 rng(102);
  for (int round = 0; round < 300; ++round) {
    World w = random_world(rng);
    CallStack stack = random_stack(rng, w);
    CallStack reversed(stack.rbegin(), stack.rend());
    for (bool inherit : {false, true}) {
      ImportConfig cfg{inherit};
      EXPECT_EQ(active_exts_top_down(w, stack, cfg), active_exts_bottom_up(w, reversed, cfg));
    }
  }
}

TEST(LookupProperties, LexicalDependsOnlyOnNewestFrame) {
  std::mt19937 rng(103);
  for (int round = 0; round < 300; ++round) {
    World w = random_world(rng);
    CallStack a = random_stack(rng, w);
    CallStack b = random_stack(rng, w);
    if (a.empty() || b.empty()) continue;
    b.back() = a.back();
    EXPECT_EQ(active_exts_lexical(w, a, {}), active_exts_lexical(w, b, {}));
    EXPECT_EQ(active_exts_lexical(w, a, {}),
              active_exts_lexical(w, CallStack{a.back()}, {}));
  }
}

TEST(LookupProperties, EveryActivationEndsWithOneGlobal) {
  std::mt19937 rng(104);
  for (int round = 0; round < 300; ++round) {
    World w = random_world(rng);
    CallStack stack = random_stack(rng, w);
    for (auto a : kAllActivations) {
      auto exts = active_extensions(w, stack, a, {});
      ASSERT_GE(exts.size(), 1u);
      EXPECT_TRUE(exts[exts.size() - 1].is_global());
      EXPECT_EQ(std::count(exts.begin(), exts.end(), global()), 1);
      std::set<ExtensionRef> unique(exts.begin(), exts.end());
      EXPECT_EQ(unique.size(), exts.size());
    }
  }
}

TEST(LookupProperties, SingleExtensionMakesSelectionsAgree) {
  std::mt19937 rng(105);
  for (int round = 0; round < 300; ++round) {
    World w = random_world(rng);
    for (const auto& [ref, e] : w.extensions()) {
      std::vector<ExtensionRef> one{ref};
      for (const auto& [cls, c] : w.classes())
        for (const auto& s : {sig("m"), sig("n"), sig("k", 1)})
          EXPECT_EQ(select_extensions_first(w, cls, s, one),
                    select_hierarchy_first(w, cls, s, one));
    }
  }
}

TEST(LookupProperties, CachedEqualsUncached) {
  std::mt19937 rng(106);
  for (int round = 0; round < 200; ++round) {
    World w = random_world(rng);
    for (auto a : kAllActivations)
      for (auto s : kAllSelections) {
        StrategyConfig cached{a, s, {}, true, 1024};
        StrategyConfig plain{a, s, {}, false, 1024};
        MethodLookup ml(w, cached);
        for (int trial = 0; trial < 10; ++trial) {
          CallStack stack = random_stack(rng, w);
          for (const auto& [cls, c] : w.classes())
            for (const auto& sg : {sig("m"), sig("k", 1)})
              EXPECT_EQ(ml.lookup(cls, sg, stack), lookup(w, cls, sg, stack, plain));
        }
      }
  }
}

TEST(LookupProperties, ResolvedMethodMatchesItsCell) {
  std::mt19937 rng(107);
  for (int round = 0; round < 200; ++round) {
    World w = random_world(rng);
    CallStack stack = random_stack(rng, w);
    for (auto s : kAllSelections) {
      StrategyConfig cfg;
      cfg.selection = s;
      for (const auto& [cls, c] : w.classes()) {
        auto r = lookup(w, cls, sig("m"), stack, cfg);
        if (!r) continue;
        const MethodDef& m = w.method(r->method);
        EXPECT_EQ(m.cls, r->cls);
        EXPECT_EQ(m.ext, r->ext);
        EXPECT_EQ(m.sig, sig("m"));
      }
    }
  }
}
