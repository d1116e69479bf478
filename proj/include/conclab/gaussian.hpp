#pragma once

#include "conclab/certify.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace conclab {

/// f(x) = x^T A x - tr(A) + l^T x under the standard Gaussian measure:
/// mean zero by construction, Hessian constant 2A, E[grad f] = l.
class QuadraticForm {
public:
    QuadraticForm(Eigen::MatrixXd a, Eigen::VectorXd linear);
    static QuadraticForm pure(Eigen::MatrixXd a);  // l = 0

    int dimension() const { return static_cast<int>(a_.rows()); }
    const Eigen::MatrixXd& matrix() const { return a_; }
    const Eigen::VectorXd& linear() const { return linear_; }
    bool has_linear() const { return linear_.size() > 0 && linear_.norm() > 0.0; }

    /// Eigenvalues of A, ascending.
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    double hessian_op_norm() const;      // ||2A||_Op
    double hessian_hs_norm_sq() const;   // ||2A||_HS^2 = 4 sum lambda_i^2

    double operator()(const Eigen::VectorXd& x) const;

private:
    Eigen::MatrixXd a_;
    Eigen::VectorXd linear_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXd eigenvectors_;

    friend struct GaussianSampler;
};

/// Closed-form E exp(t (x^T A x - tr A)) = prod_i e^{-t l_i} / sqrt(1 - 2 t l_i).
/// Requires l = 0 and 2 t l_i < 1 for every eigenvalue.
double quad_exp_moment(const QuadraticForm& q, double t);

struct GaussianMcOptions {
    Index samples = 1'000'000;
    std::uint64_t seed = 1;
};

/// Second-order certificate for a pure quadratic (vanishing derivative
/// means): c = 1/(2 sigma^2 (1 + b^2)) with b^2 = ||2A||_HS^2; the moment of
/// exp(c|f|) is estimated by seeded Monte Carlo and cross-bounded by the
/// signed closed forms.
Certificate certify_gaussian_second_order(const QuadraticForm& q, double sigma2 = 1.0,
                                          const GaussianMcOptions& opts = {});

/// Variant admitting a linear part with |l| <= sigma b0:
/// c = 1/(sigma^2 (4 + 4 b^2 + 5 b0)).
Certificate certify_gaussian_with_linear(const QuadraticForm& q, double sigma2 = 1.0,
                                         const GaussianMcOptions& opts = {});

struct PoincareReport {
    double gradient_mass = 0.0;  // E |grad f|^2, via tr(A^T A)
    double hessian_mass = 0.0;   // sigma^2 E ||f''||_HS^2, via eigenvalues
    double gap = 0.0;
    bool pass = false;
};

/// E |grad f|^2 = sigma^2 E ||f''||_HS^2 holds with equality for pure
/// Gaussian quadratics (sigma^2 = 1); both sides in closed form.
PoincareReport poincare_hessian_check(const QuadraticForm& q);

struct FiniteDiffReport {
    Index checked = 0;
    Index skipped = 0;  // too close to the critical set of |grad f|
    Index violations = 0;
    double max_estimate = 0.0;
    double op_norm = 0.0;
    double step = 0.0;
    bool pass = false;
};

/// Central finite differences of |grad f| at sampled Gaussian points against
/// the operator-norm bound; points with |grad f| <= 10h are skipped.
FiniteDiffReport itgrad_hess_check(const QuadraticForm& q, Index points, double step,
                                   std::uint64_t seed);

/// Same check at caller-supplied points.
FiniteDiffReport itgrad_hess_check(const QuadraticForm& q,
                                   const std::vector<Eigen::VectorXd>& points, double step);

/// Deterministic standard normal draws (Box-Muller over a seeded 53-bit
/// uniform); used by the Monte Carlo paths and exposed for tests.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed);
    double next();
    Eigen::VectorXd next_vector(int n);

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
};

/// Monte Carlo estimate of E exp(t f) (or E exp(t |f|)) with a 99% CI.
ExpMoment gaussian_exp_moment_mc(const QuadraticForm& q, double t, bool absolute,
                                 const GaussianMcOptions& opts);

}  // namespace conclab
