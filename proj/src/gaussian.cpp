#include "conclab/gaussian.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace conclab {

namespace {

constexpr double kZ99 = 2.575829303548901;

void add_measure(Certificate& cert, const ExpMoment& m, Index samples, std::uint64_t seed) {
    cert.measured.value = m.value;
    cert.measured.method = "monte_carlo";
    cert.measured.samples = samples;
    cert.measured.seed = seed;
    cert.measured.ci99_halfwidth = m.ci99_halfwidth;
    if (m.value + m.ci99_halfwidth <= cert.bound)
        cert.verdict = Verdict::Pass;
    else if (m.value - m.ci99_halfwidth > cert.bound)
        cert.verdict = Verdict::Fail;
    else
        cert.verdict = Verdict::Inconclusive;
    cert.slack = cert.bound - cert.measured.value;
}

}  // namespace

QuadraticForm::QuadraticForm(Eigen::MatrixXd a, Eigen::VectorXd linear)
    : a_(std::move(a)), linear_(std::move(linear)) {
    if (a_.rows() < 1 || a_.rows() != a_.cols())
        throw std::invalid_argument("QuadraticForm: matrix must be square and nonempty");
    if (linear_.size() == 0) linear_ = Eigen::VectorXd::Zero(a_.rows());
    if (linear_.size() != a_.rows())
        throw std::invalid_argument("QuadraticForm: linear term dimension mismatch");
    const double scale = std::max(1.0, a_.cwiseAbs().maxCoeff());
    if ((a_ - a_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("QuadraticForm: matrix must be symmetric within 1e-12");
    a_ = 0.5 * (a_ + a_.transpose().eval());  // kill the asymmetric rounding residue
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a_);
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
}

QuadraticForm QuadraticForm::pure(Eigen::MatrixXd a) {
    return QuadraticForm(std::move(a), Eigen::VectorXd());
}

double QuadraticForm::hessian_op_norm() const {
    return 2.0 * eigenvalues_.cwiseAbs().maxCoeff();
}

double QuadraticForm::hessian_hs_norm_sq() const {
    return 4.0 * eigenvalues_.squaredNorm();
}

double QuadraticForm::operator()(const Eigen::VectorXd& x) const {
    if (x.size() != a_.rows()) throw std::invalid_argument("QuadraticForm: point dimension mismatch");
    return x.dot(a_ * x) - a_.trace() + linear_.dot(x);
}

double quad_exp_moment(const QuadraticForm& q, double t) {
    if (q.has_linear())
        throw std::invalid_argument("quad_exp_moment: requires a vanishing linear term");
    double acc = 1.0;
    for (int i = 0; i < q.dimension(); ++i) {
        const double lam = q.eigenvalues()[i];
        const double arg = 1.0 - 2.0 * t * lam;
        if (arg <= 0.0)
            throw std::invalid_argument("quad_exp_moment: divergent moment (2 t lambda >= 1)");
        acc *= std::exp(-t * lam) / std::sqrt(arg);
    }
    return acc;
}

GaussianSampler::GaussianSampler(std::uint64_t seed) : rng_(seed) {}

double GaussianSampler::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // in (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
}

Eigen::VectorXd GaussianSampler::next_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = next();
    return v;
}

ExpMoment gaussian_exp_moment_mc(const QuadraticForm& q, double t, bool absolute,
                                 const GaussianMcOptions& opts) {
    if (opts.samples < 2) throw std::invalid_argument("gaussian_exp_moment_mc: needs samples >= 2");
    // Work in the eigenbasis: f = sum_i lambda_i (y_i^2 - 1) + m . y with
    // y standard normal and m the rotated linear term.
    const Eigen::VectorXd& lam = q.eigenvalues();
    Eigen::VectorXd rotated = Eigen::VectorXd::Zero(q.dimension());
    if (q.has_linear()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q.matrix());
        rotated = solver.eigenvectors().transpose() * q.linear();
    }
    GaussianSampler sampler(opts.seed);
    const int n = q.dimension();
    double sum = 0.0;
    double sumsq = 0.0;
    for (Index k = 0; k < opts.samples; ++k) {
        double f = 0.0;
        for (int i = 0; i < n; ++i) {
            const double y = sampler.next();
            f += lam[i] * (y * y - 1.0) + rotated[i] * y;
        }
        const double x = std::exp(t * (absolute ? std::abs(f) : f));
        sum += x;
        sumsq += x * x;
    }
    const double count = static_cast<double>(opts.samples);
    const double mean = sum / count;
    const double var = std::max(0.0, (sumsq - count * mean * mean) / (count - 1.0));
    return {mean, kZ99 * std::sqrt(var / count)};
}

Certificate certify_gaussian_second_order(const QuadraticForm& q, double sigma2,
                                          const GaussianMcOptions& opts) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("certify: sigma2 must be > 0");
    Certificate cert;
    cert.theorem = TheoremId::ThmZentral;
    cert.note = "gaussian";
    const double op = q.hessian_op_norm();
    const double linear_norm = q.linear().norm();
    cert.hypothesis_values = {{"hessian_op_norm", op}, {"linear_norm", linear_norm}};
    cert.hypothesis_ok = {{"hessian_op_le_1", op <= 1.0 + 1e-12},
                          {"derivative_means_zero", linear_norm <= 1e-12}};
    const double b2 = q.hessian_hs_norm_sq();
    cert.hypothesis_values.push_back({"b_squared", b2});
    const double c = 1.0 / (2.0 * sigma2 * (1.0 + b2));
    cert.constant = c;
    cert.bound = 2.0;
    if (!cert.all_hypotheses_ok()) {
        cert.verdict = Verdict::NotApplicable;
        if (op > 1.0) {
            cert.rescale_lambda = 1.0 / op;
            cert.note = "gaussian; admissible rescale 1/op_norm reported";
        }
        return cert;
    }
    // Analytic upper bound from the signed closed forms, when they converge.
    double analytic = std::numeric_limits<double>::quiet_NaN();
    if (2.0 * c * q.eigenvalues().cwiseAbs().maxCoeff() < 1.0)
        analytic = quad_exp_moment(q, c) + quad_exp_moment(q, -c);
    cert.hypothesis_values.push_back({"analytic_signed_bound", analytic});
    add_measure(cert, gaussian_exp_moment_mc(q, c, true, opts), opts.samples, opts.seed);
    return cert;
}

Certificate certify_gaussian_with_linear(const QuadraticForm& q, double sigma2,
                                         const GaussianMcOptions& opts) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("certify: sigma2 must be > 0");
    Certificate cert;
    cert.theorem = TheoremId::ThmHoeffding1;
    cert.note = "gaussian";
    const double op = q.hessian_op_norm();
    cert.hypothesis_values = {{"hessian_op_norm", op}};
    cert.hypothesis_ok = {{"hessian_op_le_1", op <= 1.0 + 1e-12}};
    const double b2 = q.hessian_hs_norm_sq();
    const double b0 = q.linear().norm() / std::sqrt(sigma2);
    cert.hypothesis_values.push_back({"b_squared", b2});
    cert.hypothesis_values.push_back({"b0", b0});
    const double c = 1.0 / (sigma2 * (4.0 + 4.0 * b2 + 5.0 * b0));
    cert.constant = c;
    cert.bound = 2.0;
    if (!cert.all_hypotheses_ok()) {
        cert.verdict = Verdict::NotApplicable;
        if (op > 1.0) {
            cert.rescale_lambda = 1.0 / op;
            cert.note = "gaussian; admissible rescale 1/op_norm reported";
        }
        return cert;
    }
    add_measure(cert, gaussian_exp_moment_mc(q, c, true, opts), opts.samples, opts.seed);
    return cert;
}

PoincareReport poincare_hessian_check(const QuadraticForm& q) {
    if (q.has_linear())
        throw std::invalid_argument("poincare_hessian_check: requires a vanishing linear term");
    PoincareReport report;
    // Two algebraic routes to the same number: entry sums vs the spectrum.
    report.gradient_mass = 4.0 * q.matrix().squaredNorm();
    report.hessian_mass = 4.0 * q.eigenvalues().squaredNorm();
    report.gap = report.hessian_mass - report.gradient_mass;
    report.pass = std::abs(report.gap) <= 1e-12 * std::max(1.0, report.hessian_mass);
    return report;
}

FiniteDiffReport itgrad_hess_check(const QuadraticForm& q,
                                   const std::vector<Eigen::VectorXd>& points, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("itgrad_hess_check: step must be > 0");
    FiniteDiffReport report;
    report.op_norm = q.hessian_op_norm();
    report.step = step;
    const int n = q.dimension();
    const double slack = 10.0 * step * report.op_norm;
    auto grad_norm = [&](const Eigen::VectorXd& x) {
        return (2.0 * (q.matrix() * x) + q.linear()).norm();
    };
    for (const Eigen::VectorXd& x : points) {
        if (x.size() != n) throw std::invalid_argument("itgrad_hess_check: point dimension mismatch");
        if (grad_norm(x) <= 10.0 * step) {  // too close to the non-smooth locus
            ++report.skipped;
            continue;
        }
        Eigen::VectorXd fd(n);
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp[i] += step;
            xm[i] -= step;
            fd[i] = (grad_norm(xp) - grad_norm(xm)) / (2.0 * step);
        }
        const double estimate = fd.norm();
        report.max_estimate = std::max(report.max_estimate, estimate);
        ++report.checked;
        if (estimate > report.op_norm + slack) ++report.violations;
    }
    report.pass = report.violations == 0;
    return report;
}

FiniteDiffReport itgrad_hess_check(const QuadraticForm& q, Index points, double step,
                                   std::uint64_t seed) {
    if (points < 0) throw std::invalid_argument("itgrad_hess_check: points must be >= 0");
    GaussianSampler sampler(seed);
    std::vector<Eigen::VectorXd> sampled;
    sampled.reserve(static_cast<std::size_t>(points));
    for (Index k = 0; k < points; ++k) sampled.push_back(sampler.next_vector(q.dimension()));
    return itgrad_hess_check(q, sampled, step);
}

}  // namespace conclab
