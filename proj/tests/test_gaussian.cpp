#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "conclab/gaussian.hpp"

#include <cmath>
#include <numbers>

using namespace conclab;

namespace {

Eigen::MatrixXd diag2(double a, double b) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

// Quadrature oracle for one-dimensional quadratics: E exp(t (lam x^2 - lam))
// by Simpson's rule over [-12, 12] against the normal density.
double quadrature_exp_moment_1d(double lam, double t) {
    const int steps = 200'000;
    const double lo = -12.0, hi = 12.0;
    const double h = (hi - lo) / steps;
    auto integrand = [&](double x) {
        const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        return std::exp(t * (lam * x * x - lam)) * phi;
    };
    double acc = integrand(lo) + integrand(hi);
    for (int k = 1; k < steps; ++k) acc += integrand(lo + k * h) * (k % 2 == 0 ? 2.0 : 4.0);
    return acc * h / 3.0;
}

// Same for E exp(c |lam x^2 - lam + m x|).
double quadrature_abs_moment_1d(double lam, double m, double c) {
    const int steps = 200'000;
    const double lo = -12.0, hi = 12.0;
    const double h = (hi - lo) / steps;
    auto integrand = [&](double x) {
        const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        return std::exp(c * std::abs(lam * x * x - lam + m * x)) * phi;
    };
    double acc = integrand(lo) + integrand(hi);
    for (int k = 1; k < steps; ++k) acc += integrand(lo + k * h) * (k % 2 == 0 ? 2.0 : 4.0);
    return acc * h / 3.0;
}

Eigen::MatrixXd random_rotation2(double angle) {
    Eigen::MatrixXd q(2, 2);
    q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return q;
}

}  // namespace

TEST_CASE("quadratic form validation and spectral data") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 0.5, 0.2, 1.0;
    CHECK_THROWS_AS(QuadraticForm::pure(bad), std::invalid_argument);

    QuadraticForm q = QuadraticForm::pure(diag2(0.5, -0.5));
    CHECK(q.hessian_op_norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q.hessian_hs_norm_sq() == doctest::Approx(2.0).epsilon(1e-14));
    Eigen::VectorXd x(2);
    x << 1.0, 2.0;
    // x^T A x - tr A = 0.5 - 2.0 - 0 = -1.5
    CHECK(q(x) == doctest::Approx(-1.5).epsilon(1e-14));
}

TEST_CASE("closed-form moment of a quadratic, against quadrature") {
    QuadraticForm zero = QuadraticForm::pure(Eigen::MatrixXd::Zero(3, 3));
    CHECK(quad_exp_moment(zero, 0.7) == doctest::Approx(1.0).epsilon(1e-14));

    Eigen::MatrixXd a1(1, 1);
    a1 << 0.5;
    QuadraticForm q1 = QuadraticForm::pure(a1);
    const double closed = quad_exp_moment(q1, 1.0 / 6.0);
    CHECK(closed == doctest::Approx(std::exp(-1.0 / 12.0) / std::sqrt(5.0 / 6.0)).epsilon(1e-14));
    CHECK(closed == doctest::Approx(quadrature_exp_moment_1d(0.5, 1.0 / 6.0)).epsilon(1e-9));
    CHECK(closed == doctest::Approx(1.0078582).epsilon(1e-7));

    QuadraticForm q2 = QuadraticForm::pure(diag2(0.5, -0.5));
    CHECK(quad_exp_moment(q2, 1.0 / 6.0) ==
          doctest::Approx(std::sqrt(36.0 / 35.0)).epsilon(1e-13));
    CHECK(quad_exp_moment(q2, 1.0 / 6.0) == doctest::Approx(1.014185).epsilon(1e-6));

    CHECK_THROWS_AS(quad_exp_moment(q1, 1.0), std::invalid_argument);  // 2 t lambda = 1
    QuadraticForm with_linear(diag2(0.5, -0.5), Eigen::Vector2d(1.0, 0.0));
    CHECK_THROWS_AS(quad_exp_moment(with_linear, 0.1), std::invalid_argument);
}

TEST_CASE("sampler against the closed-form oracle across an (A, t) grid") {
    int within = 0, total = 0;
    std::uint64_t seed = 1000;
    for (double lam : {0.2, 0.4, -0.3}) {
        for (double t : {0.1, 0.25, 0.5}) {
            QuadraticForm q = QuadraticForm::pure(diag2(lam, -0.5 * lam));
            const double oracle = quad_exp_moment(q, t);
            ExpMoment mc = gaussian_exp_moment_mc(q, t, false, {150'000, seed++});
            ++total;
            if (std::abs(mc.value - oracle) <= mc.ci99_halfwidth) ++within;
        }
    }
    CHECK(within >= total - 1);  // 99% CIs, at most one miss tolerated here
}

TEST_CASE("second-order certificate: zero matrix and the half-spectrum example") {
    Certificate trivial = certify_gaussian_second_order(
        QuadraticForm::pure(Eigen::MatrixXd::Zero(2, 2)), 1.0, {10'000, 5});
    CHECK(trivial.verdict == Verdict::Pass);
    CHECK(trivial.measured.value == doctest::Approx(1.0).epsilon(1e-12));

    QuadraticForm q = QuadraticForm::pure(diag2(0.5, -0.5));
    Certificate cert = certify_gaussian_second_order(q, 1.0, {1'000'000, 42});
    CHECK(cert.constant == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(cert.verdict == Verdict::Pass);
    CHECK(cert.measured.value + cert.measured.ci99_halfwidth <= 2.0);
    // the signed analytic bound is recorded and sits just above 2
    double analytic = 0.0;
    for (const auto& [name, value] : cert.hypothesis_values)
        if (name == "analytic_signed_bound") analytic = value;
    CHECK(analytic == doctest::Approx(2.0 * std::sqrt(36.0 / 35.0)).epsilon(1e-12));

    Eigen::MatrixXd four = Eigen::MatrixXd::Zero(4, 4);
    four.diagonal() << 0.5, -0.5, 0.5, -0.5;
    Certificate cert4 =
        certify_gaussian_second_order(QuadraticForm::pure(four), 1.0, {400'000, 7});
    CHECK(cert4.constant == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(cert4.verdict == Verdict::Pass);
}

TEST_CASE("operator norm gating reports the admissible rescale") {
    QuadraticForm q = QuadraticForm::pure(diag2(1.5, -0.25));
    Certificate cert = certify_gaussian_second_order(q, 1.0, {10'000, 3});
    CHECK(cert.verdict == Verdict::NotApplicable);
    CHECK(cert.rescale_lambda == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("first-order variant certificates") {
    // l = 0 reduces to a weaker-constant second-order certificate
    QuadraticForm q = QuadraticForm::pure(diag2(0.5, -0.5));
    Certificate base = certify_gaussian_with_linear(q, 1.0, {200'000, 11});
    CHECK(base.constant == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
    CHECK(base.verdict == Verdict::Pass);

    QuadraticForm with_l(diag2(0.5, -0.5), Eigen::Vector2d(0.3, 0.0));
    Certificate cert = certify_gaussian_with_linear(with_l, 1.0, {400'000, 12});
    CHECK(cert.constant == doctest::Approx(1.0 / 13.5).epsilon(1e-13));
    CHECK(cert.verdict == Verdict::Pass);

    // pure linear: f = x1, c = 1/9; folded-moment quadrature oracle
    QuadraticForm linear_only(Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d(1.0, 0.0));
    Certificate lin = certify_gaussian_with_linear(linear_only, 1.0, {400'000, 13});
    CHECK(lin.constant == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
    CHECK(lin.verdict == Verdict::Pass);
    const double oracle = quadrature_abs_moment_1d(0.0, 1.0, 1.0 / 9.0);
    CHECK(std::abs(lin.measured.value - oracle) <= lin.measured.ci99_halfwidth);
}

TEST_CASE("gradient mass equals Hessian mass for pure quadratics") {
    PoincareReport zero = poincare_hessian_check(QuadraticForm::pure(Eigen::MatrixXd::Zero(2, 2)));
    CHECK(zero.pass);
    CHECK(zero.gradient_mass == doctest::Approx(0.0));

    PoincareReport half = poincare_hessian_check(QuadraticForm::pure(diag2(0.5, -0.5)));
    CHECK(half.pass);
    CHECK(half.gradient_mass == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(half.hessian_mass == doctest::Approx(2.0).epsilon(1e-14));

    GaussianSampler entries(55);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 2 + rep % 5;
        Eigen::MatrixXd m(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m(r, c) = entries.next();
        Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
        PoincareReport rep_out = poincare_hessian_check(QuadraticForm::pure(sym));
        CHECK(rep_out.pass);
        CHECK(std::abs(rep_out.gap) <= 1e-12 * std::max(1.0, rep_out.hessian_mass));
    }
}

TEST_CASE("finite differences of the gradient norm respect the operator bound") {
    QuadraticForm radial = QuadraticForm::pure(0.5 * Eigen::MatrixXd::Identity(3, 3));
    FiniteDiffReport rep = itgrad_hess_check(radial, 500, 1e-4, 21);
    CHECK(rep.pass);
    CHECK(rep.op_norm == doctest::Approx(1.0));
    CHECK(rep.max_estimate == doctest::Approx(1.0).epsilon(1e-6));

    FiniteDiffReport zero = itgrad_hess_check(QuadraticForm::pure(Eigen::MatrixXd::Zero(2, 2)),
                                              100, 1e-4, 22);
    CHECK(zero.pass);
    CHECK(zero.checked == 0);  // gradient vanishes identically, all skipped

    // caller-supplied points, including one inside the exclusion radius
    std::vector<Eigen::VectorXd> pts{Eigen::Vector3d(1.0, 0.5, -0.25),
                                     Eigen::Vector3d(1e-6, 0.0, 0.0),
                                     Eigen::Vector3d(-2.0, 1.0, 0.5)};
    FiniteDiffReport supplied = itgrad_hess_check(radial, pts, 1e-4);
    CHECK(supplied.pass);
    CHECK(supplied.checked == 2);
    CHECK(supplied.skipped == 1);

    GaussianSampler entries(56);
    for (int rep_k = 0; rep_k < 5; ++rep_k) {
        const int n = 2 + rep_k;
        Eigen::MatrixXd m(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m(r, c) = 0.4 * entries.next();
        QuadraticForm q(0.5 * (m + m.transpose()), Eigen::VectorXd::Zero(n));
        FiniteDiffReport out = itgrad_hess_check(q, 1000, 1e-4, 100 + rep_k);
        CHECK(out.pass);
        CHECK(out.violations == 0);
    }
}

TEST_CASE("rotation invariance: the spectrum determines the certificate") {
    Eigen::MatrixXd a = diag2(0.5, -0.5);
    Eigen::MatrixXd qrot = random_rotation2(0.83);
    Eigen::MatrixXd rotated = qrot.transpose() * a * qrot;
    Certificate c1 = certify_gaussian_second_order(QuadraticForm::pure(a), 1.0, {200'000, 31});
    Certificate c2 =
        certify_gaussian_second_order(QuadraticForm::pure(rotated), 1.0, {200'000, 32});
    CHECK(c1.constant == doctest::Approx(c2.constant).epsilon(1e-12));
    CHECK(std::abs(c1.measured.value - c2.measured.value) <=
          c1.measured.ci99_halfwidth + c2.measured.ci99_halfwidth);
    CHECK(c1.verdict == Verdict::Pass);
    CHECK(c2.verdict == Verdict::Pass);
}

TEST_CASE("gaussian sampler moments and determinism") {
    GaussianSampler a(77), b(77);
    for (int k = 0; k < 100; ++k) CHECK(a.next() == b.next());

    GaussianSampler s(123);
    const int n = 400'000;
    long double sum = 0.0L, sumsq = 0.0L;
    for (int k = 0; k < n; ++k) {
        const double z = s.next();
        sum += z;
        sumsq += z * z;
    }
    CHECK(std::abs(static_cast<double>(sum) / n) <= 5e-3);
    CHECK(static_cast<double>(sumsq) / n == doctest::Approx(1.0).epsilon(0.01));
}
