#include <doctest.h>

#include "lamiq/symmetry.hpp"

using namespace lamiq;

TEST_SUITE("symmetry") {
  TEST_CASE("isometry algebra") {
    const Isometry g = Isometry::from_word({-2, 3, 1});
    const QVector x{1, 2, 3};
    CHECK(g.apply(x) == QVector{-2, 3, 1});
    CHECK(g.inverse().apply(g.apply(x)) == x);
    CHECK(g.compose(g.inverse()).is_identity());
    CHECK(g.word() == std::vector<int>{-2, 3, 1});
    CHECK(g.matrix() * x == g.apply(x));
    const QMatrix t = QMatrix::from_rows({{1, 2, 0}, {2, 5, 1}, {0, 1, 7}});
    CHECK(g.conjugate(t) == g.matrix() * t * g.matrix().transpose());
    CHECK_THROWS_AS(Isometry::from_word({1, 1}), InvalidInput);
  }

  TEST_CASE("group orders") {
    CHECK(group_order(sign_group(3)) == 8);
    CHECK(group_order(hyperoctahedral_group(3)) == 48);
    CHECK(group_order(central_group(5)) == 2);
    CHECK_THROWS_AS(group_order(ae9_group(), 1000), ResourceError);
  }

  TEST_CASE("ae9 group order" * doctest::timeout(600)) {
    const GroupSpec g = ae9_group();
    CHECK(group_order(g, 20'000'000) == g.claimed_order);
    CHECK(g.claimed_order == 10'321'920);
  }

  TEST_CASE("lattice preservation") {
    CHECK_NOTHROW(validate_group(ae9_group(), ae9(Rational(4, 7))));
    CHECK_NOTHROW(validate_group(hyperoctahedral_group(3), cubic_generator(3)));
    const GeneratorMatrix skew(QMatrix::from_rows({{1, 0}, {Rational(1, 3), 1}}));
    CHECK_THROWS_AS(validate_group(sign_group(2), skew), InvalidInput);
    CHECK_NOTHROW(validate_group(central_group(2), skew));
    CHECK_THROWS_AS(validate_group(sign_group(3), skew), InvalidInput);
  }

  TEST_CASE("orbits of points and index sets") {
    const GroupSpec g = ae9_group();
    const Rational a(4, 7);
    const std::vector<QVector> samples = {
        {0, 0, 0, 0, 0, 0, 0, 1, a},
        {Rational(1, 2), Rational(1, 2), Rational(1, 2), Rational(1, 2), Rational(1, 2), Rational(1, 2),
         Rational(1, 2), Rational(1, 2), a},
        {1, 1, 0, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, Rational(1, 3), Rational(1, 2), Rational(1, 2), Rational(1, 2), a}};
    for (const QVector& v : samples) {
      const auto o = orbit(v, g);
      CHECK(Integer(o.size()) == orbit_size_formula(v));
      CHECK(canonical_form(o.back(), g) == canonical_form(v, g));
    }
    CHECK(orbit(samples[1], g).size() == 256);
    CHECK(orbit(samples[2], g).size() == 112);

    const std::vector<QVector> square = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const IndexAction act = induced_action(hyperoctahedral_group(2), square);
    CHECK(point_orbits(act).size() == 1);
    CHECK(orbit(std::vector<std::uint32_t>{0, 1}, act).size() == 4);
    CHECK(canonical_form(std::vector<std::uint32_t>{2, 3}, act) == std::vector<std::uint32_t>{0, 1});
    CHECK_THROWS_AS(induced_action(hyperoctahedral_group(2), {{1, 0}, {-1, 0}}), ConsistencyError);
  }
}
