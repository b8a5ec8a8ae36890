#include <doctest.h>

#include <cmath>

#include "cxlab/capacity.hpp"
#include "cxlab/random.hpp"

using namespace cxlab;

namespace {

constexpr double kTol = 1e-12;
constexpr std::size_t kIters = 1000000;

double qp_cap(const std::vector<BiNode>& family) {
  const auto eq = capacity_qp(family, std::nullopt, kTol, kIters);
  REQUIRE(eq.converged);
  return eq.cap;
}

std::vector<BiNode> random_family(Rng& rng, std::size_t size, std::size_t max_depth) {
  std::vector<BiNode> out;
  for (std::size_t i = 0; i < size; ++i) {
    const TreeDomain d{max_depth + 1};
    out.push_back(BiNode{random_node(d, rng), random_node(d, rng)});
  }
  return out;
}

}  // namespace

TEST_CASE("single rectangles") {
  for (unsigned a = 0; a <= 3; ++a) {
    for (unsigned b = 0; b <= 3; ++b) {
      const std::vector<BiNode> family{BiNode{NodeAddress::repeat(true, a), NodeAddress::repeat(false, b)}};
      const Rational exact(1, (a + 1) * (b + 1));
      CHECK(capacity_bruteforce(family) == exact);
      CHECK(qp_cap(family) == doctest::Approx(to_double(exact)).epsilon(1e-9));
    }
  }
  CHECK(capacity_bruteforce({BiNode{}}) == 1);
}

TEST_CASE("two rectangles sharing only the root") {
  const std::vector<BiNode> family{BiNode::parse("x=0/y=0"), BiNode::parse("x=1/y=1")};
  CHECK(capacity_bruteforce(family) == Rational(2, 5));
  const auto eq = capacity_qp(family, std::nullopt, kTol, kIters);
  CHECK(eq.cap == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(eq.rho[0] == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(eq.energy == doctest::Approx(eq.cap).epsilon(1e-9));
}

TEST_CASE("a rectangle inside another adds nothing") {
  const std::vector<BiNode> family{BiNode::parse("x=0/y="), BiNode::parse("x=01/y=1")};
  CHECK(capacity_bruteforce(family) == Rational(1, 2));
}

TEST_CASE("duplicates do not change capacity") {
  const std::vector<BiNode> one{BiNode::parse("x=01/y=1")};
  const std::vector<BiNode> twice{BiNode::parse("x=01/y=1"), BiNode::parse("x=01/y=1")};
  CHECK(qp_cap(twice) == doctest::Approx(qp_cap(one)).epsilon(1e-9));
  CHECK(capacity_bruteforce(twice) == capacity_bruteforce(one));
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(capacity_qp({}, std::nullopt, kTol, kIters), ArgumentError);
  CHECK_THROWS_AS(capacity_bruteforce({}), ArgumentError);
  Rng rng(1);
  CHECK_THROWS_AS(capacity_bruteforce(random_family(rng, 13, 2)), ArgumentError);
}

TEST_CASE("projected gradient matches the exact active-set capacity") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const auto family = random_family(rng, static_cast<std::size_t>(rng.between(1, 7)), 3);
    const auto eq = capacity_qp(family, std::nullopt, kTol, kIters);
    REQUIRE(eq.converged);
    CHECK(eq.cap == doctest::Approx(to_double(capacity_bruteforce(family))).epsilon(1e-8));
    CHECK(eq.kkt_max_violation <= kTol);
  }
}

TEST_CASE("energy by rectangle enumeration equals the kernel form") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto family = random_family(rng, 5, 3);
    std::vector<Rational> rho;
    for (std::size_t i = 0; i < family.size(); ++i) rho.push_back(from_ratio<Rational>(rng.between(0, 6), 5));
    CHECK(primal_energy(family, rho) == bitree_energy(family, rho));
  }
}

TEST_CASE("capacity is monotone in the family") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto family = random_family(rng, 8, 3);
    Rational previous(0);
    for (std::size_t m = 1; m <= family.size(); ++m) {
      const std::vector<BiNode> head(family.begin(), family.begin() + static_cast<long>(m));
      const Rational c = capacity_bruteforce(head);
      CHECK(c >= previous);
      previous = c;
    }
  }
}

TEST_CASE("instance geometry") {
  CHECK_THROWS_AS(build_instance(5), ArgumentError);
  CHECK_THROWS_AS(build_instance(8), ArgumentError);
  for (unsigned n : {4u, 16u, 256u}) {
    const auto inst = build_instance(n);
    CHECK(inst.n == n);
    CHECK((1u << inst.s) == n);
    CHECK(inst.groups == n / inst.s);
    CHECK(inst.delta == Rational(1, n * inst.s));
    CHECK(inst.nu.total() == inst.delta);
    CHECK(inst.lambda == lambda_constant() / n);
    REQUIRE(inst.is_explicit());
    CHECK(inst.family.size() == inst.family_size());
    for (std::size_t j = 1; j <= inst.groups; ++j) {
      for (std::size_t k = 0; k <= inst.s; ++k) {
        const auto q = inst.member(j, k);
        CHECK(contained_in(inst.omega(j), q));
        CHECK(q.x.depth() == inst.M + inst.x_extra[k]);
        CHECK(q.y.depth() == inst.M + inst.y_extra[k]);
      }
    }
  }
  const auto big = build_instance(65536);
  CHECK_FALSE(big.is_explicit());
  CHECK(big.delta == Rational(1, 65536u * 16u));
}

TEST_CASE("structured potential and kernel match the explicit instance") {
  for (unsigned n : {4u, 16u, 256u}) {
    const auto inst = build_instance(n);
    for (std::size_t j = 1; j <= inst.groups; ++j) {
      for (std::size_t k = 0; k <= inst.s; ++k) {
        CHECK(structured_potential(inst, j, k) == potential(inst.nu, inst.member(j, k)));
      }
    }
    const auto explicit_kc = reduced_kernel(inst.family, inst.symmetry_classes());
    const auto structured_kc = structured_reduced_kernel(inst);
    REQUIRE(explicit_kc.size() == structured_kc.size());
    for (std::size_t a = 0; a < explicit_kc.size(); ++a) {
      for (std::size_t b = 0; b < explicit_kc.size(); ++b) CHECK(explicit_kc[a][b] == structured_kc[a][b]);
    }
  }
}

TEST_CASE("lemma g values") {
  const auto r16 = check_lemma_g(build_instance(16));
  CHECK(r16.n_min == Rational(55, 16));
  CHECK(r16.n_max == Rational(41, 8));
  CHECK(r16.symmetric);
  const auto r256 = check_lemma_g(build_instance(256));
  CHECK(r256.n_min == Rational(625, 256));
  CHECK(r256.n_max == Rational(1975, 256));
}

TEST_CASE("the unreduced equilibrium is symmetric across j") {
  const auto inst = build_instance(16);
  const auto full = instance_capacity(inst, false, 1e-10, 200000);
  const auto reduced = instance_capacity(inst, true, 1e-10, 200000);
  REQUIRE(full.converged);
  REQUIRE(reduced.converged);
  CHECK(full.cap == doctest::Approx(reduced.cap).epsilon(1e-8));
  for (std::size_t j = 1; j <= inst.groups; ++j) {
    for (std::size_t k = 0; k <= inst.s; ++k) {
      CHECK(full.rho[(j - 1) * (inst.s + 1) + k] == doctest::Approx(reduced.rho[k]).epsilon(1e-6).scale(1e-3));
    }
  }
  CHECK_THROWS_AS(instance_capacity(build_instance(65536), false, 1e-10, 10), ResourceError);
}

TEST_CASE("d2 row refuses an unconverged solve") {
  const auto inst = build_instance(16);
  const auto eq = instance_capacity(inst, true, 1e-14, 3);
  CHECK_FALSE(eq.converged);
  CHECK_THROWS_AS(report_d2(inst, eq), PreconditionError);
}
