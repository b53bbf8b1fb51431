#include "support/worlds.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace semx;
using namespace semx::testing;

namespace {

bool has_kind(const ValidationReport& r, DiagnosticKind k) {
  return std::any_of(r.diagnostics.begin(), r.diagnostics.end(),
                     [&](const Diagnostic& d) { return d.kind == k; });
}

World chain_world() {
  // Object <- A <- B, and A <- C
  WorldBuilder b;
  b.add_package("P");
  b.add_class(class_def("Object", "P", std::nullopt));
  b.add_class(class_def("A", "P", "Object"));
  b.add_class(class_def("B", "P", "A"));
  b.add_class(class_def("C", "P", "A"));
  return std::move(b).build();
}

}  // namespace

TEST(Signature, RendersNameSlashArity) {
  EXPECT_EQ(sig("sendRedefinedTo", 1).str(), "sendRedefinedTo/1");
  EXPECT_EQ(ExtensionRef::global().str(), "global");
  EXPECT_EQ(ext("P2", "E2").str(), "P2.E2");
}

TEST(ValidateWorld, Fig6FixtureIsWellFormed) {
  World w = fixture_world("fig6");
  EXPECT_TRUE(validate_world(w).ok());
}

TEST(ValidateWorld, CyclicHierarchy) {
  WorldBuilder b;
  b.add_class(class_def("A", "P", "B"));
  b.add_class(class_def("B", "P", "A"));
  auto report = validate_world(std::move(b).build());
  ASSERT_FALSE(report.ok());
  EXPECT_TRUE(has_kind(report, DiagnosticKind::CyclicHierarchy));
}

TEST(ValidateWorld, SelfSuperclassIsCyclic) {
  WorldBuilder b;
  b.add_class(class_def("A", "P", "A"));
  EXPECT_TRUE(has_kind(validate_world(std::move(b).build()), DiagnosticKind::CyclicHierarchy));
}

TEST(ValidateWorld, UnknownImportedExtension) {
  WorldBuilder b;
  b.add_class(class_def("Object", "P", std::nullopt));
  b.add_method(method_def("Object", sig("m"), global(), "P", {ext("P9", "E9")}));
  auto report = validate_world(std::move(b).build());
  ASSERT_EQ(report.diagnostics.size(), 1u);
  EXPECT_EQ(report.diagnostics[0].kind, DiagnosticKind::UnknownExtension);
  EXPECT_NE(report.diagnostics[0].message.find("P9.E9"), std::string::npos);
}

TEST(ValidateWorld, UnknownSuperclassAndTarget) {
  WorldBuilder b;
  b.add_class(class_def("A", "P", "Missing"));
  b.add_extension(ext("P", "E"));
  b.add_method(method_def("Ghost", sig("m"), ext("P", "E"), "P"));
  auto report = validate_world(std::move(b).build());
  EXPECT_EQ(std::count_if(report.diagnostics.begin(), report.diagnostics.end(),
                          [](const Diagnostic& d) { return d.kind == DiagnosticKind::UnknownClass; }),
            2);
}

TEST(ValidateWorld, DuplicateMethodInOneExtension) {
  WorldBuilder b;
  b.add_class(class_def("Object", "P", std::nullopt));
  b.add_extension(ext("P", "E"));
  b.add_method(method_def("Object", sig("m"), ext("P", "E"), "P"));
  b.add_method(method_def("Object", sig("m"), ext("P", "E"), "P"));
  // Same cell in a different extension is fine.
  b.add_method(method_def("Object", sig("m"), global(), "P"));
  auto report = validate_world(std::move(b).build());
  ASSERT_EQ(report.diagnostics.size(), 1u);
  EXPECT_EQ(report.diagnostics[0].kind, DiagnosticKind::DuplicateMethod);
}

TEST(ValidateWorld, GlobalIsReserved) {
  WorldBuilder b;
  b.add_class(class_def("Object", "P", std::nullopt));
  b.add_extension(ext("P", "global"));
  auto r1 = validate_world(b.build());
  EXPECT_TRUE(has_kind(r1, DiagnosticKind::ReservedName));

  WorldBuilder b2;
  b2.add_package("P", {ext("Q", "global")});
  EXPECT_TRUE(has_kind(validate_world(std::move(b2).build()), DiagnosticKind::ReservedName));
}

TEST(ValidateWorld, BodyNamesMustResolve) {
  World w = [] {
    WorldBuilder b;
    ClassDef obj = class_def("Object", "P", std::nullopt);
    obj.fields = {"x"};
    b.add_class(obj);
    MethodDef m = method_def("Object", sig("m", 1), global(), "P");
    m.body.push_back(Stmt{ExprStmt{make_expr(ParamRef{"nope"})}});
    m.body.push_back(Stmt{ExprStmt{make_expr(FieldRef{"y"})}});
    m.body.push_back(Stmt{ExprStmt{make_expr(New{"Object", {}})}});  // needs 1 field arg
    b.add_method(m);
    ScriptDef s;
    s.name = "main";
    s.package = "P";
    s.body.push_back(Stmt{ExprStmt{make_expr(SelfRef{})}});
    b.add_script(s);
    return std::move(b).build();
  }();
  auto report = validate_world(w);
  EXPECT_EQ(std::count_if(report.diagnostics.begin(), report.diagnostics.end(),
                          [](const Diagnostic& d) { return d.kind == DiagnosticKind::UnknownName; }),
            3);
  EXPECT_TRUE(has_kind(report, DiagnosticKind::ArityMismatch));
}

TEST(Ancestors, RootHasNone) {
  World w = chain_world();
  EXPECT_TRUE(ancestors(w, "Object").empty());
}

TEST(Ancestors, NearestFirst) {
  World w = chain_world();
  EXPECT_EQ(ancestors(w, "B"), (std::vector<std::string>{"A", "Object"}));
}

TEST(Ancestors, Fig6C1) {
  EXPECT_EQ(ancestors(fixture_world("fig6"), "C1"), (std::vector<std::string>{"Object"}));
}

TEST(Ancestors, UnknownClassThrows) {
  EXPECT_THROW(ancestors(chain_world(), "Nope"), std::invalid_argument);
  EXPECT_THROW(descendants(chain_world(), "Nope"), std::invalid_argument);
}

TEST(Descendants, Examples) {
  World w = chain_world();
  EXPECT_TRUE(descendants(w, "B").empty());
  EXPECT_EQ(descendants(w, "A"), (std::set<std::string>{"B", "C"}));
  EXPECT_EQ(descendants(w, "Object"), (std::set<std::string>{"A", "B", "C"}));
}

TEST(EffectiveImports, MethodThenClassThenPackage) {
  WorldBuilder b;
  for (auto e : {"e1", "e2", "e3"}) b.add_extension(ext("X", e));
  b.add_package("P", {ext("X", "e3")});
  b.add_class(class_def("Object", "P", std::nullopt, {ext("X", "e2")}));
  MethodId id = b.add_method(method_def("Object", sig("m"), global(), "P", {ext("X", "e1")}));
  World w = std::move(b).build();
  EXPECT_EQ(effective_imports(w, id, {}),
            (std::vector<ExtensionRef>{ext("X", "e1"), ext("X", "e2"), ext("X", "e3")}));
}

TEST(EffectiveImports, FirstOccurrenceWins) {
  WorldBuilder b;
  for (auto e : {"e1", "e2"}) b.add_extension(ext("X", e));
  b.add_package("P", {ext("X", "e1"), ext("X", "e2")});
  b.add_class(class_def("Object", "P", std::nullopt));
  MethodId id = b.add_method(method_def("Object", sig("m"), global(), "P", {ext("X", "e1")}));
  World w = std::move(b).build();
  EXPECT_EQ(effective_imports(w, id, {}),
            (std::vector<ExtensionRef>{ext("X", "e1"), ext("X", "e2")}));
}

TEST(EffectiveImports, RefinementInheritanceAppendsAncestorClassImports) {
  WorldBuilder b;
  b.add_extension(ext("X", "eA"));
  b.add_extension(ext("X", "eB"));
  b.add_extension(ext("X", "eO"));
  b.add_class(class_def("Object", "P", std::nullopt, {ext("X", "eO")}));
  b.add_class(class_def("A", "P", "Object", {ext("X", "eA")}));
  b.add_class(class_def("B", "P", "A", {ext("X", "eB")}));
  MethodId id = b.add_method(method_def("B", sig("m"), global(), "P"));
  World w = std::move(b).build();

  EXPECT_EQ(effective_imports(w, id, {}), (std::vector<ExtensionRef>{ext("X", "eB")}));
  EXPECT_EQ(effective_imports(w, id, ImportConfig{true}),
            (std::vector<ExtensionRef>{ext("X", "eB"), ext("X", "eA"), ext("X", "eO")}));
}

TEST(EffectiveImports, ScriptAndPackage) {
  World w = fixture_world("selection_example");
  EXPECT_EQ(effective_imports(w, script_named(w, "main"), {}),
            (std::vector<ExtensionRef>{ext("Ext1", "e1"), ext("Ext2", "e2")}));
}

TEST(EffectiveImports, ExtensionMethodSkipsClassImports) {
  WorldBuilder b;
  b.add_extension(ext("X", "own"));
  b.add_extension(ext("Y", "pkg"));
  b.add_extension(ext("Y", "cls"));
  b.add_package("Y", {ext("Y", "pkg")});
  b.add_class(class_def("Object", "P", std::nullopt, {ext("Y", "cls")}));
  MethodId id = b.add_method(method_def("Object", sig("m"), ext("X", "own"), "Y"));
  World w = std::move(b).build();
  EXPECT_EQ(effective_imports(w, id, ImportConfig{true}),
            (std::vector<ExtensionRef>{ext("Y", "pkg")}));
}

// Properties over random worlds.

TEST(ModelProperties, AncestorsAndDescendantsAgree) {
  std::mt19937 rng(7);
  for (int round = 0; round < 200; ++round) {
    World w = random_world(rng);
    ASSERT_TRUE(validate_world(w).ok());
    for (const auto& [a, ca] : w.classes()) {
      auto down = descendants(w, a);
      for (const auto& [b, cb] : w.classes()) {
        auto up = ancestors(w, b);
        bool a_above_b = std::find(up.begin(), up.end(), a) != up.end();
        EXPECT_EQ(a_above_b, down.contains(b)) << a << " vs " << b;
      }
      // Terminates and never lists the class itself.
      auto chain = ancestors(w, a);
      EXPECT_EQ(std::find(chain.begin(), chain.end(), a), chain.end());
    }
  }
}

TEST(ModelProperties, EffectiveImportsHaveNoDuplicatesOrGlobal) {
  std::mt19937 rng(11);
  for (int round = 0; round < 200; ++round) {
    World w = random_world(rng);
    for (const auto& frame : all_frames(w)) {
      for (bool inherit : {false, true}) {
        auto imports = effective_imports(w, frame, ImportConfig{inherit});
        std::set<ExtensionRef> unique(imports.begin(), imports.end());
        EXPECT_EQ(unique.size(), imports.size());
        EXPECT_FALSE(unique.contains(ExtensionRef::global()));
      }
    }
  }
}

TEST(ModelProperties, WithoutInheritanceOnlyOwnDeclarationsMatter) {
  // Changing another class's imports never changes a method's imports.
  std::mt19937 rng(13);
  for (int round = 0; round < 100; ++round) {
    World w = random_world(rng);
    if (w.extensions().size() < 2) continue;
    ExtensionRef extra = std::prev(w.extensions().end())->first;
    for (std::size_t i = 0; i < w.methods().size(); ++i) {
      const MethodDef& m = w.method(MethodId{i});
      World before = w;
      // Rebuild with every unrelated class importing `extra`.
      WorldBuilder nb;
      for (const auto& [name, pkg] : w.packages()) nb.add_package(name, pkg.imports);
      for (const auto& [ref, e] : w.extensions())
        if (!ref.is_global()) nb.add_extension(ref);
      for (auto [name, c] : w.classes()) {
        if (name != m.cls) c.imports.push_back(extra);
        nb.add_class(std::move(c));
      }
      for (const auto& mm : w.methods()) nb.add_method(mm);
      World after = std::move(nb).build();
      EXPECT_EQ(effective_imports(before, MethodId{i}, {}),
                effective_imports(after, MethodId{i}, {}));
    }
  }
}
