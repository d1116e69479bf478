#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "conclab/diffops.hpp"
#include "conclab/hoeffding.hpp"
#include "conclab/testing.hpp"
#include "conclab/walsh.hpp"

#include <cmath>
#include <map>

using namespace conclab;

namespace {

// Independent oracle: h_S via the raw operator product
// (prod_{j not in S} E_j) (prod_{l in S} (Id - E_l)) f, one subset at a time.
// Exponential in n, used only on small spaces.
GridFunction oracle_term(const GridFunction& f, std::uint64_t mask) {
    GridFunction g = f;
    for (int j = 0; j < f.space().dimension(); ++j) {
        if (mask & (std::uint64_t{1} << j))
            g = mean_diff(g, j);
        else
            g = partial_expectation(g, j);
    }
    return g;
}

std::map<std::uint64_t, GridFunction> oracle_decomposition(const GridFunction& f) {
    std::map<std::uint64_t, GridFunction> out;
    const std::uint64_t all = (std::uint64_t{1} << f.space().dimension()) - 1;
    for (std::uint64_t mask = 0; mask <= all; ++mask) out.emplace(mask, oracle_term(f, mask));
    return out;
}

double sup_diff(const GridFunction& a, const GridFunction& b) {
    return (a.values() - b.values()).abs().maxCoeff();
}

GridFunction densified(const ProductSpace&, const GridFunction& g) {
    return g.is_walsh() ? from_walsh(g) : g;
}

}  // namespace

TEST_CASE("constant function decomposes into a single empty-set term") {
    SpacePtr cube = ProductSpace::uniform_cube(3);
    HoeffdingDecomposition dec = decompose(GridFunction::constant(cube, 4.5));
    REQUIRE(dec.terms().size() == 1);
    CHECK(dec.terms()[0].mask == 0);
    CHECK(expectation(dec.term_function(0)) == doctest::Approx(4.5));
    CHECK(dec.max_degree() == 0);
}

TEST_CASE("square of a sum on the cube") {
    SpacePtr cube = ProductSpace::uniform_cube(2);
    GridFunction x1 = GridFunction::coordinate(cube, 0);
    GridFunction x2 = GridFunction::coordinate(cube, 1);
    GridFunction f = GridFunction::dense(cube, (x1.values() + x2.values()).square());
    HoeffdingDecomposition dec = decompose(f);
    CHECK(sup_diff(densified(*cube, dec.degree_part(0)), GridFunction::constant(cube, 2.0)) <= 1e-12);
    CHECK(densified(*cube, dec.degree_part(1)).values().abs().maxCoeff() <= 1e-12);
    GridFunction expected2 = GridFunction::dense(cube, 2.0 * x1.values() * x2.values());
    CHECK(sup_diff(densified(*cube, dec.degree_part(2)), expected2) <= 1e-12);
}

TEST_CASE("biased product: terms computed by hand") {
    // Both factors put mass 3/4 on +1, so E x_i = 1/2 and
    // x1 x2 = 1/4 + (x1 - 1/2)/2 + (x2 - 1/2)/2 + (x1 - 1/2)(x2 - 1/2).
    std::vector<Factor> fs{Factor::two_point(0.75), Factor::two_point(0.75)};
    SpacePtr sp = ProductSpace::make(std::move(fs));
    GridFunction x1 = GridFunction::coordinate(sp, 0);
    GridFunction x2 = GridFunction::coordinate(sp, 1);
    GridFunction f = GridFunction::dense(sp, x1.values() * x2.values());
    HoeffdingDecomposition dec = decompose(f);

    CHECK(sup_diff(dec.degree_part(0), GridFunction::constant(sp, 0.25)) <= 1e-12);
    GridFunction f1_expected =
        GridFunction::dense(sp, 0.5 * (x1.values() - 0.5) + 0.5 * (x2.values() - 0.5));
    CHECK(sup_diff(dec.degree_part(1), f1_expected) <= 1e-12);
    GridFunction f2_expected =
        GridFunction::dense(sp, (x1.values() - 0.5) * (x2.values() - 0.5));
    CHECK(sup_diff(dec.degree_part(2), f2_expected) <= 1e-12);
}

TEST_CASE("generic decomposition matches the per-subset operator oracle") {
    testing::InputRng rng(201);
    for (int rep = 0; rep < 12; ++rep) {
        SpacePtr sp = testing::random_space(rng, 4, 3);
        GridFunction f = testing::random_dense(rng, sp, 2.0);
        HoeffdingDecomposition dec = decompose(f, DecomposeMethod::Generic);
        auto oracle = oracle_decomposition(f);
        const double scale = std::max(1.0, f.values().abs().maxCoeff());
        for (const auto& [mask, h] : oracle)
            CHECK(sup_diff(dec.term_function(mask), h) <= 1e-10 * scale);
    }
}

TEST_CASE("decomposition invariants on random inputs") {
    testing::InputRng rng(202);
    for (int rep = 0; rep < 10; ++rep) {
        SpacePtr sp = testing::random_space(rng, 4, 3);
        GridFunction f = testing::random_dense(rng, sp, 2.0);
        HoeffdingDecomposition dec = decompose(f);
        const double scale = std::max(1.0, f.values().abs().maxCoeff());

        // sum of terms reproduces f
        CHECK(sup_diff(dec.reconstruct(), f) <= 1e-9 * scale);

        for (const auto& term : dec.terms()) {
            GridFunction h = dec.term_function(term.mask);
            for (int j = 0; j < sp->dimension(); ++j) {
                if (term.mask & (std::uint64_t{1} << j)) {
                    // integrates to zero against its own coordinates
                    CHECK(partial_expectation(h, j).values().abs().maxCoeff() <= 1e-9 * scale);
                } else {
                    // constant along the others
                    CHECK(sup_diff(partial_expectation(h, j), h) <= 1e-12 * scale);
                }
            }
        }

        // distinct terms are orthogonal
        for (std::size_t a = 0; a < dec.terms().size(); ++a)
            for (std::size_t b = a + 1; b < dec.terms().size(); ++b) {
                GridFunction ha = dec.term_function(dec.terms()[a].mask);
                GridFunction hb = dec.term_function(dec.terms()[b].mask);
                const double ip = weighted_mean(*sp, Eigen::ArrayXd(ha.values() * hb.values()));
                CHECK(std::abs(ip) <= 1e-9 * scale * scale);
            }
    }
}

TEST_CASE("uniqueness: decomposing a reconstruction returns the same terms") {
    testing::InputRng rng(203);
    for (int rep = 0; rep < 8; ++rep) {
        SpacePtr sp = testing::random_space(rng, 4, 3);
        GridFunction f = testing::random_dense(rng, sp);
        HoeffdingDecomposition dec = decompose(f);
        HoeffdingDecomposition again = decompose(dec.reconstruct());
        const double scale = std::max(1.0, f.values().abs().maxCoeff());
        REQUIRE(dec.terms().size() == again.terms().size());
        for (std::size_t k = 0; k < dec.terms().size(); ++k) {
            CHECK(dec.terms()[k].mask == again.terms()[k].mask);
            CHECK(sup_diff(dec.term_function(dec.terms()[k].mask),
                           again.term_function(again.terms()[k].mask)) <= 1e-9 * scale);
        }
    }
}

TEST_CASE("degree parts are orthogonal and complete") {
    testing::InputRng rng(204);
    for (int rep = 0; rep < 8; ++rep) {
        SpacePtr sp = testing::random_space(rng, 4, 3);
        GridFunction f = testing::random_dense(rng, sp, 2.0);
        HoeffdingDecomposition dec = decompose(f);
        const double norm2 = weighted_mean(*sp, f.values().square());
        Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(sp->total_states());
        for (int d = 0; d <= sp->dimension(); ++d) {
            GridFunction fd = dec.degree_part(d);
            acc += fd.values();
            for (int e = d + 1; e <= sp->dimension(); ++e) {
                GridFunction fe = dec.degree_part(e);
                const double ip = weighted_mean(*sp, Eigen::ArrayXd(fd.values() * fe.values()));
                CHECK(std::abs(ip) <= 1e-9 * std::max(1.0, norm2));
            }
        }
        CHECK((acc - f.values()).abs().maxCoeff() <=
              1e-9 * std::max(1.0, f.values().abs().maxCoeff()));
    }
}

TEST_CASE("parseval on the cube") {
    testing::InputRng rng(205);
    for (int rep = 0; rep < 8; ++rep) {
        SpacePtr cube = ProductSpace::uniform_cube(rng.integer(1, 8));
        GridFunction f = testing::random_dense(rng, cube, 2.0);
        double coef_mass = 0.0;
        GridFunction w = to_walsh(f, 0.0);
        for (const WalshTerm& t : w.walsh_terms()) coef_mass += t.coef * t.coef;
        const double norm2 = weighted_mean(*cube, f.values().square());
        CHECK(coef_mass == doctest::Approx(norm2).epsilon(1e-9));
    }
}

TEST_CASE("cube fast path equals the generic path term by term") {
    testing::InputRng rng(206);
    for (int rep = 0; rep < 6; ++rep) {
        SpacePtr cube = ProductSpace::uniform_cube(rng.integer(2, 10));
        GridFunction f = testing::random_dense(rng, cube);
        HoeffdingDecomposition fast = decompose(f, DecomposeMethod::WalshFastPath);
        HoeffdingDecomposition generic = decompose(f, DecomposeMethod::Generic);
        const double scale = std::max(1.0, f.values().abs().maxCoeff());
        REQUIRE(fast.coefficient_form());
        for (const auto& term : fast.terms())
            CHECK(sup_diff(fast.term_function(term.mask), generic.term_function(term.mask)) <=
                  1e-10 * scale);
    }
}

TEST_CASE("project_degree") {
    SpacePtr cube = ProductSpace::uniform_cube(2);
    GridFunction x1 = GridFunction::coordinate(cube, 0);
    GridFunction x2 = GridFunction::coordinate(cube, 1);
    GridFunction f = GridFunction::dense(cube, x1.values() + x1.values() * x2.values());

    GridFunction d0 = densified(*cube, project_degree(f, 0));
    CHECK(d0.values().abs().maxCoeff() <= 1e-12);
    GridFunction d2 = densified(*cube, project_degree(f, 2));
    CHECK(sup_diff(d2, GridFunction::dense(cube, x1.values() * x2.values())) <= 1e-12);
    CHECK_THROWS_AS(project_degree(f, 3), std::invalid_argument);
    CHECK_THROWS_AS(project_degree(f, -1), std::invalid_argument);
}

TEST_CASE("remainder projects onto degrees two and higher") {
    SpacePtr cube = ProductSpace::uniform_cube(3);
    GridFunction x1 = GridFunction::coordinate(cube, 0);
    GridFunction x2 = GridFunction::coordinate(cube, 1);
    GridFunction x3 = GridFunction::coordinate(cube, 2);

    CHECK(remainder(x1).values().abs().maxCoeff() <= 1e-12);
    GridFunction pair = GridFunction::dense(cube, x1.values() * x2.values());
    CHECK(sup_diff(remainder(pair), pair) <= 1e-12);

    GridFunction f = GridFunction::dense(
        cube, 1.0 + x1.values() + x1.values() * x2.values() +
                  x1.values() * x2.values() * x3.values());
    GridFunction expected = GridFunction::dense(
        cube, x1.values() * x2.values() + x1.values() * x2.values() * x3.values());
    CHECK(sup_diff(remainder(f), expected) <= 1e-12);
}

TEST_CASE("remainder of random functions has no low-degree mass") {
    testing::InputRng rng(207);
    for (int rep = 0; rep < 10; ++rep) {
        SpacePtr sp = testing::random_space(rng, 5, 3);
        GridFunction f = testing::random_dense(rng, sp, 2.0);
        GridFunction rf = remainder(f);
        const double scale = std::max(1.0, f.values().abs().maxCoeff());
        CHECK(std::abs(expectation(rf)) <= 1e-9 * scale);
        CHECK(first_order_part(rf).values().abs().maxCoeff() <= 1e-9 * scale);
    }
}

TEST_CASE("sparse walsh input decomposes directly") {
    SpacePtr cube = ProductSpace::uniform_cube(20);  // beyond casual dense use
    GridFunction f = GridFunction::walsh(
        cube, {WalshTerm{0b11, 0.5}, WalshTerm{0b111, -0.25}, WalshTerm{0b11000, 1.0}});
    HoeffdingDecomposition dec = decompose(f);
    REQUIRE(dec.coefficient_form());
    CHECK(dec.terms().size() == 3);
    CHECK(dec.max_degree() == 3);
    CHECK(dec.degree_norm2(2) == doctest::Approx(0.25 + 1.0));
    CHECK(dec.degree_norm2(3) == doctest::Approx(0.0625));
    CHECK(dec.lowest_degree() == 2);
}
