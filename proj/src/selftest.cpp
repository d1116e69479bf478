#include "conclab/selftest.hpp"

#include "conclab/certify.hpp"
#include "conclab/diffops.hpp"
#include "conclab/hoeffding.hpp"
#include "conclab/laplacian.hpp"
#include "conclab/sampler.hpp"
#include "conclab/testing.hpp"
#include "conclab/walsh.hpp"

#include <cmath>
#include <ostream>

namespace conclab {

namespace {

struct Runner {
    std::ostream& out;
    int failures = 0;

    void check(const char* name, bool ok) {
        out << (ok ? "ok   " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    }
};

}  // namespace

int run_selftest(std::ostream& out) {
    using testing::InputRng;
    Runner r{out};

    {
        InputRng rng(11);
        bool ok = true;
        for (int rep = 0; rep < 20; ++rep) {
            SpacePtr sp = testing::random_space(rng, 5, 4);
            ok = ok && std::abs(expectation(GridFunction::constant(sp, 1.0)) - 1.0) <= 1e-12;
            GridFunction f = testing::random_dense(rng, sp);
            const int i = rng.integer(0, sp->dimension() - 1);
            ok = ok && std::abs(expectation(partial_expectation(f, i)) - expectation(f)) <=
                           1e-12 * std::max(1.0, std::abs(expectation(f)));
        }
        r.check("normalization and tower property", ok);
    }
    {
        InputRng rng(12);
        bool ok = true;
        for (int rep = 0; rep < 10; ++rep) {
            SpacePtr cube = ProductSpace::uniform_cube(rng.integer(1, 8));
            GridFunction f = testing::random_dense(rng, cube);
            GridFunction back = from_walsh(to_walsh(f, 0.0));
            ok = ok && (back.values() - f.values()).abs().maxCoeff() <=
                           1e-12 * std::max(1.0, f.values().abs().maxCoeff());
        }
        r.check("walsh round trip", ok);
    }
    {
        SpacePtr cube = ProductSpace::uniform_cube(6);
        std::vector<Index> a = sample_states(cube, 42, 2000);
        std::vector<Index> b = sample_states(cube, 42, 2000);
        r.check("sampler determinism", a == b);
    }
    {
        InputRng rng(13);
        bool ok = true;
        for (int rep = 0; rep < 10; ++rep) {
            SpacePtr sp = testing::random_space(rng, 4, 3);
            GridFunction f = testing::random_dense(rng, sp);
            HoeffdingDecomposition dec = decompose(f);
            GridFunction back = dec.reconstruct();
            if (back.is_walsh()) back = from_walsh(back);
            ok = ok && (back.values() - f.values()).abs().maxCoeff() <=
                           1e-9 * std::max(1.0, f.values().abs().maxCoeff());
        }
        r.check("hoeffding reconstruction", ok);
    }
    {
        InputRng rng(14);
        bool ok = true;
        for (int rep = 0; rep < 10; ++rep) {
            SpacePtr sp = testing::random_space(rng, 4, 3);
            GridFunction f = testing::random_dense(rng, sp);
            GridFunction lhs = falling_degree_op(f, 2);
            GridFunction rhs = laplace(f);
            const double scale = std::max(1.0, f.values().abs().maxCoeff());
            ok = ok && (lhs.values() - rhs.values()).abs().maxCoeff() <= 1e-10 * scale;
            ok = ok && spectral_report(f).max_relative_residual <= 1e-9;
        }
        r.check("laplacian identities and spectrum", ok);
    }
    {
        InputRng rng(15);
        bool ok = true;
        for (int rep = 0; rep < 50; ++rep) {
            SpacePtr sp = testing::random_space(rng, 4, 3);
            GridFunction f = testing::random_dense(rng, sp, 1.5);
            Certificate cert = mlsi_check(f, GradientKind::L2, 2.0);
            ok = ok && cert.verdict == Verdict::Pass;
            Certificate cert_pos = mlsi_check(f, GradientKind::L2Pos, 4.0);
            ok = ok && cert_pos.verdict == Verdict::Pass;
        }
        r.check("modified log-sobolev batch", ok);
    }
    {
        InputRng rng(16);
        bool ok = true;
        for (int rep = 0; rep < 20; ++rep) {
            SpacePtr cube = ProductSpace::uniform_cube(rng.integer(2, 6));
            GridFunction f = testing::random_chaos(rng, cube, {2, 3});
            ok = ok && bernoulli2_key_inequality(f).pass;
            ok = ok && einfachere_intermediate(f).pass;
        }
        r.check("proof-step inequalities", ok);
    }
    {
        SpacePtr cube2 = ProductSpace::uniform_cube(2);
        GridFunction f = GridFunction::dense(
            cube2, GridFunction::coordinate(cube2, 0).values() *
                       GridFunction::coordinate(cube2, 1).values());
        Certificate cert = certify(TheoremId::CorBernoulli, f);
        const bool ok = cert.verdict == Verdict::Pass &&
                        std::abs(cert.constant - 1.0 / 7.0) <= 1e-15 &&
                        std::abs(cert.measured.value - std::exp(1.0 / 7.0)) <= 1e-12;
        r.check("worked example", ok);
    }
    {
        SpacePtr cube = ProductSpace::uniform_cube(10);
        GridFunction f = GridFunction::walsh(
            cube, {WalshTerm{0b11, 0.4}, WalshTerm{0b10100, -0.3}, WalshTerm{0b1000000011, 0.2}});
        const double exact = exp_moment_exact(f, 0.5, true);
        ExpMoment a = exp_moment_mc(f, 0.5, 50'000, 7, true);
        ExpMoment b = exp_moment_mc(f, 0.5, 50'000, 7, true);
        const bool ok = a.value == b.value && std::abs(a.value - exact) <= 3.0 * a.ci99_halfwidth;
        r.check("monte carlo determinism and calibration", ok);
    }
    return r.failures;
}

}  // namespace conclab
