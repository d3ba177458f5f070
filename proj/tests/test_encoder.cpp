#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "dnsvec/bench.hpp"
#include "dnsvec/encoder.hpp"
#include "dnsvec/parser.hpp"
#include "support.hpp"

using namespace dnsvec;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

Situation s1() { return {"s1", {{"e1", {"Circle"}}, {"e2", {"Red"}}}, {}}; }

// Role vectors straight from the definition: walk the parent lists.
Vector role_vector_oracle(const Ontology& o, ElementId r) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(o.dim()));
  std::vector<ElementId> stack{r};
  while (!stack.empty()) {
    auto x = stack.back();
    stack.pop_back();
    if (v(static_cast<Eigen::Index>(x.index)) == 1.0) continue;
    v(static_cast<Eigen::Index>(x.index)) = 1.0;
    for (auto p : o.parents(x)) stack.push_back(p);
  }
  return v;
}

Vector encode_oracle(const Ontology& o, const Situation& s) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(o.dim()));
  for (const auto& e : s.entities) {
    for (const auto& r : e.roles) v += role_vector_oracle(o, o.id(r));
  }
  for (const auto& nested : s.situations) v += encode_oracle(o, nested);
  return v;
}

// Roles reached by fully expanding an element's components, with
// multiplicity.
std::map<ElementId, int> role_signature(const Ontology& o, ElementId x) {
  if (o.is_role(x)) return {{x, 1}};
  std::map<ElementId, int> out;
  for (auto c : o.components(x)) {
    for (auto [r, n] : role_signature(o, c)) out[r] += n;
  }
  return out;
}

Situation shuffled(Situation s, std::mt19937_64& rng) {
  std::shuffle(s.entities.begin(), s.entities.end(), rng);
  for (auto& e : s.entities) std::shuffle(e.roles.begin(), e.roles.end(), rng);
  for (auto& nested : s.situations) nested = shuffled(std::move(nested), rng);
  std::shuffle(s.situations.begin(), s.situations.end(), rng);
  return s;
}

std::vector<std::string> role_names(const Ontology& o) {
  std::vector<std::string> out;
  for (auto r : o.roles()) out.push_back(o.name(r));
  return out;
}

}  // namespace

TEST(Encoder, RoleVectors) {
  const auto o = load_ontology(test::fixture("fig.sandra"));
  const Encoder enc(o);
  EXPECT_EQ(enc.role_vector(o.id("Shape")), vec({0, 0, 0, 0, 1}));
  EXPECT_EQ(enc.role_vector(o.id("Circle")), vec({1, 0, 0, 0, 1}));
  EXPECT_EQ(enc.role_vector(o.id("Red")), vec({0, 1, 0, 1, 0}));

  const auto single = Ontology::build(std::vector{test::role_decl("R")});
  EXPECT_EQ(Encoder(single).role_vector(ElementId{0}), vec({1}));
}

TEST(Encoder, RoleVectorsMatchDefinitionOnFixtures) {
  for (const auto& name : test::fixture_ontologies()) {
    SCOPED_TRACE(name);
    const auto o = load_ontology(test::fixture(name));
    const Encoder enc(o);
    for (auto r : o.roles()) {
      EXPECT_EQ(enc.role_vector(r), role_vector_oracle(o, r)) << o.name(r);
      EXPECT_EQ(enc.role_vector(r)(static_cast<Eigen::Index>(r.index)), 1.0);
    }
  }
}

TEST(Encoder, Describe) {
  const auto fig = load_ontology(test::fixture("fig.sandra"));
  const Encoder fe(fig);
  EXPECT_EQ(fe.describe(fig.id("Fig")), vec({0, 1, 0, 0, 1}));

  const auto panel = load_ontology(test::fixture("panel.sandra"));
  const Encoder pe(panel);
  EXPECT_EQ(pe.describe(panel.id("Panel")), pe.describe(panel.id("Fig")) + pe.role_vector(panel.id("Number")));
}

TEST(Encoder, KindMismatch) {
  const auto o = load_ontology(test::fixture("fig.sandra"));
  const Encoder enc(o);
  EXPECT_THROW(enc.describe(o.id("Shape")), Error);
  EXPECT_THROW(enc.role_vector(o.id("Fig")), Error);
  EXPECT_THROW(enc.build_basis(o.id("Shape")), Error);
}

TEST(Encoder, Homogeneity) {
  for (const auto& name : test::fixture_ontologies()) {
    const auto o = load_ontology(test::fixture(name));
    const Encoder enc(o);
    for (auto d : o.descriptions()) {
      for (double alpha : {-2.0, 0.5, 3.0}) {
        Vector sum = Vector::Zero(static_cast<Eigen::Index>(o.dim()));
        for (auto c : o.components(d)) sum += alpha * enc.vector_of(c);
        EXPECT_EQ(alpha * enc.describe(d), sum) << name << " " << o.name(d) << " alpha " << alpha;
      }
    }
  }
}

// Two elements share a vector exactly when they expand to the same multiset
// of roles. Where every element has its own signature this is plain
// injectivity.
TEST(Encoder, InjectiveUpToRoleSignature) {
  for (const auto& name : test::fixture_ontologies()) {
    SCOPED_TRACE(name);
    const auto o = load_ontology(test::fixture(name));
    const Encoder enc(o);
    std::vector<std::map<ElementId, int>> sig;
    for (auto x : o.elements()) sig.push_back(role_signature(o, x));
    for (auto x : o.elements()) {
      for (auto y : o.elements()) {
        if (x >= y) continue;
        const bool same_vector = enc.vector_of(x) == enc.vector_of(y);
        const bool same_signature = sig[x.index] == sig[y.index];
        EXPECT_EQ(same_vector, same_signature) << o.name(x) << " vs " << o.name(y);
      }
    }
  }
}

TEST(Encoder, FigAndPanelAreFullyInjective) {
  for (const char* name : {"fig.sandra", "panel.sandra", "three_part.sandra"}) {
    const auto o = load_ontology(test::fixture(name));
    const Encoder enc(o);
    for (auto x : o.elements()) {
      for (auto y : o.elements()) {
        if (x != y) {
          EXPECT_NE(enc.vector_of(x), enc.vector_of(y)) << name;
        }
      }
    }
  }
}

TEST(Encoder, SingleComponentDescriptionsCollideWithTheirComponent) {
  const auto o = load_ontology(test::fixture("mini_iraven.sandra"));
  const Encoder enc(o);
  EXPECT_EQ(enc.describe(o.id("FT5")), enc.role_vector(o.id("T5")));
  EXPECT_EQ(enc.describe(o.id("PanelSet")), enc.describe(o.id("Panel")));
}

TEST(Encoder, RoleVectorsAreUnitriangularInTopologicalOrder) {
  for (const auto& name : test::fixture_ontologies()) {
    SCOPED_TRACE(name);
    const auto o = load_ontology(test::fixture(name));
    const Encoder enc(o);
    std::vector<ElementId> order;
    for (auto x : o.topological_order()) {
      if (o.is_role(x)) order.push_back(x);
    }
    const auto n = static_cast<Eigen::Index>(order.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        m(i, j) = enc.role_vector(order[i])(static_cast<Eigen::Index>(order[j].index));
      }
    }
    // Children come before their parents, so each row only reaches to the
    // right of the diagonal.
    for (Eigen::Index i = 0; i < n; ++i) {
      EXPECT_EQ(m(i, i), 1.0);
      for (Eigen::Index j = 0; j < i; ++j) EXPECT_EQ(m(i, j), 0.0);
    }
    // Back-substitution style elimination never meets a zero pivot.
    Eigen::MatrixXd e = m;
    for (Eigen::Index k = n - 1; k >= 0; --k) {
      ASSERT_EQ(e(k, k), 1.0);
      for (Eigen::Index i = 0; i < k; ++i) e.row(i) -= e(i, k) * e.row(k);
    }
    EXPECT_TRUE(e.isIdentity(0.0));
  }
}

TEST(Encoder, EncodeSituation) {
  const auto fig = load_ontology(test::fixture("fig.sandra"));
  const Encoder enc(fig);
  EXPECT_EQ(enc.encode_situation(s1()), vec({1, 1, 0, 1, 1}));
  EXPECT_EQ(enc.encode_situation(Situation{"s0", {}, {}}), Vector::Zero(5));

  const auto panel = load_ontology(test::fixture("panel.sandra"));
  const Encoder pe(panel);
  const auto s2 = load_situation(test::fixture("situations/s2.json"));
  EXPECT_EQ(pe.encode_situation(s2), pe.encode_situation(s1()) + pe.role_vector(panel.id("Number1")));
}

TEST(Encoder, MultiRoleEntitiesContributeEachRole) {
  const auto fig = load_ontology(test::fixture("fig.sandra"));
  const Encoder enc(fig);
  const Situation merged{"s", {{"e", {"Circle", "Red"}}}, {}};
  EXPECT_EQ(enc.encode_situation(merged), enc.encode_situation(s1()));
}

TEST(Encoder, UnknownRole) {
  const auto fig = load_ontology(test::fixture("fig.sandra"));
  const Encoder enc(fig);
  for (const Situation& s : {Situation{"s", {{"e", {"Hexagon"}}}, {}}, Situation{"s", {{"e", {"Fig"}}}, {}},
                             Situation{"s", {}, {Situation{"t", {{"e", {"Hexagon"}}}, {}}}}}) {
    try {
      enc.encode_situation(s);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::UnknownRole);
    }
  }
}

TEST(Encoder, RandomSituationsAgainstOracleAndInvariants) {
  std::mt19937_64 rng(1234);
  const std::vector<std::string> fixtures{"fig.sandra", "panel.sandra", "mini_iraven.sandra", "mini_fmnist.sandra",
                                          "iraven.sandra"};
  for (const auto& name : fixtures) {
    const auto o = load_ontology(test::fixture(name));
    const Encoder enc(o);
    const auto roles = role_names(o);
    for (int trial = 0; trial < 500; ++trial) {
      const auto a = test::random_situation(rng, roles);
      auto b = test::random_situation(rng, roles);
      const Vector va = enc.encode_situation(a);
      const Vector vb = enc.encode_situation(b);

      ASSERT_EQ(va, encode_oracle(o, a));
      ASSERT_TRUE((va.array() >= 0.0).all());
      ASSERT_EQ(enc.encode_situation(shuffled(a, rng)), va);
      ASSERT_EQ(enc.encode_situation(a), va);  // repeatable

      // Union of two entity-disjoint situations.
      Situation u = a;
      for (auto e : b.entities) {
        e.id = "b_" + e.id;
        u.entities.push_back(std::move(e));
      }
      for (auto& nested : b.situations) u.situations.push_back(nested);
      ASSERT_EQ(enc.encode_situation(u), va + vb);
    }
  }
}

TEST(Basis, Fig) {
  const auto o = load_ontology(test::fixture("fig.sandra"));
  const Encoder enc(o);
  const Basis b = enc.build_basis(o.id("Fig"));
  EXPECT_EQ(b.rank, 2);
  ASSERT_EQ(b.a.rows(), 5);
  ASSERT_EQ(b.a.cols(), 2);
  EXPECT_EQ(Vector(b.a.col(0)), enc.role_vector(o.id("Shape")));
  EXPECT_EQ(Vector(b.a.col(1)), enc.role_vector(o.id("Color")));
  EXPECT_LE((b.a_pinv - b.a.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Basis, SingleComponent) {
  const auto o = load_ontology(test::fixture("mini_iraven.sandra"));
  const Encoder enc(o);
  const Basis b = enc.build_basis(o.id("PanelSet"));
  ASSERT_EQ(b.a.cols(), 1);
  const Matrix expected = b.a.transpose() / b.a.col(0).squaredNorm();
  EXPECT_LE((b.a_pinv - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Basis, PanelColumnsAreIndependent) {
  const auto o = load_ontology(test::fixture("panel.sandra"));
  const Encoder enc(o);
  const Basis b = enc.build_basis(o.id("Panel"));
  EXPECT_EQ(Vector(b.a.col(0)), enc.describe(o.id("Fig")));
  EXPECT_EQ(Vector(b.a.col(1)), enc.role_vector(o.id("Number")));
  EXPECT_EQ(b.rank, 2);
  // Brute force: no small integer combination other than zero vanishes.
  for (int p = -3; p <= 3; ++p) {
    for (int q = -3; q <= 3; ++q) {
      if (p == 0 && q == 0) continue;
      EXPECT_FALSE((p * b.a.col(0) + q * b.a.col(1)).isZero(0.0));
    }
  }
}

TEST(Basis, SoundOnEveryFixture) {
  for (const auto& name : test::fixture_ontologies()) {
    SCOPED_TRACE(name);
    const auto o = load_ontology(test::fixture(name));
    const Encoder enc(o);
    const BasisMap bases = enc.build_all_bases();
    ASSERT_EQ(bases.size(), o.description_count());
    for (const auto& [d, b] : bases) {
      const auto k = static_cast<Eigen::Index>(o.components(d).size());
      EXPECT_EQ(b.rank, k);
      EXPECT_LE((b.a_pinv * b.a - Matrix::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-10) << o.name(d);
      for (Eigen::Index i = 0; i < k; ++i) {
        EXPECT_EQ(Vector(b.a.col(i)), enc.vector_of(o.components(d)[static_cast<std::size_t>(i)]));
      }
    }
  }
}

TEST(Basis, RankDeficient) {
  const auto o = Ontology::build(parse_ontology_text("role A role B description E { A, B } description D { A, E, B }"));
  const Encoder enc(o);
  EXPECT_NO_THROW(enc.build_basis(o.id("E")));
  try {
    enc.build_basis(o.id("D"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RankDeficient);
    EXPECT_NE(std::string(e.what()).find("rank 2 < 3"), std::string::npos);
  }
  EXPECT_THROW(enc.build_all_bases(), Error);
}

TEST(Basis, SyntheticShapesHaveFullRank) {
  for (auto shape : {SyntheticShape::Chain, SyntheticShape::Tree, SyntheticShape::Dense}) {
    for (std::size_t n : {1u, 2u, 7u, 40u}) {
      const auto o = Ontology::build(synthetic_ontology(shape, n, 42));
      EXPECT_EQ(o.description_count(), n);
      EXPECT_NO_THROW(Encoder(o).build_all_bases()) << to_string(shape) << " " << n;
    }
  }
}

TEST(Basis, IravenScale) {
  const auto o = load_ontology(test::fixture("iraven.sandra"));
  EXPECT_EQ(o.dim(), 144u);
  EXPECT_NO_THROW(Encoder(o).build_all_bases());
}
