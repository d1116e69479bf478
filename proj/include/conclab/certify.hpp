#pragma once

#include "conclab/diffops.hpp"
#include "conclab/grid_function.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace conclab {

/// Identifiers for every certified statement. The spelling is part of the
/// CLI contract.
enum class TheoremId {
    Prop11,          // first-order tail bound
    ThmZentral,      // second-order exponential moment, general factors
    CorBernoulli,    // sharpened constant for two-point factors
    CorPlus,         // positive-part variant
    ThmHoeffding1,   // non-vanishing first order term of bounded size
    ThmEinfachere,   // reformulated second-order conditions (B1, B2)
    PropBernoulli2,  // uniform cube, single Hessian sup condition
    IneqA,           // exp moment vs exp of squared gradient norm
    LemmaB,          // exp of t f^2 under an iterated-modulus condition
    Prop42,          // combined exponential inequality
    Mlsi,            // modified log-Sobolev inequality itself
    GradientHesse,   // gradient mass vs Hessian mass per lowest degree
};

std::string to_string(TheoremId id);
TheoremId theorem_from_string(const std::string& name);

enum class Verdict { Pass, Fail, NotApplicable, Inconclusive };
std::string to_string(Verdict v);

struct Measured {
    double value = std::numeric_limits<double>::quiet_NaN();
    std::string method = "exact";  // "exact" or "monte_carlo"
    Index samples = 0;
    std::uint64_t seed = 0;
    double ci99_halfwidth = 0.0;
};

struct Certificate {
    TheoremId theorem = TheoremId::ThmZentral;
    std::vector<std::pair<std::string, double>> hypothesis_values;
    std::vector<std::pair<std::string, bool>> hypothesis_ok;
    double constant = 0.0;  // the rate c (or sigma^2 for the mLSI)
    double bound = 2.0;     // claimed upper bound for the measured quantity
    Measured measured;
    Verdict verdict = Verdict::NotApplicable;
    double slack = std::numeric_limits<double>::quiet_NaN();  // bound - measured
    double rescale_lambda = 1.0;
    /// (t, tail, bound) rows for tail-type certificates.
    std::vector<std::array<double, 3>> tail_grid;
    std::string note;

    bool all_hypotheses_ok() const;
};

struct CertifyOptions {
    bool monte_carlo = false;
    Index samples = 1'000'000;
    std::uint64_t seed = 1;
    /// Rescale f to the largest multiple satisfying the theorem's
    /// normalization hypothesis before certifying; the factor is reported.
    bool rescale = false;
    /// Scale-aware slack accepted when checking hypotheses.
    double hypothesis_tol = 1e-9;
    /// Parameters for the inequality checks that need them. NaN means
    /// "use the known admissible constant for this space".
    double sigma2 = std::numeric_limits<double>::quiet_NaN();
    double sigma2_tilde = std::numeric_limits<double>::quiet_NaN();
    double t = std::numeric_limits<double>::quiet_NaN();
    GradientKind gamma = GradientKind::L2;
};

/// E ||Hess f||_HS^2 with the mean-difference Hessian (the b^2 hypothesis).
double b_squared(const GridFunction& f);

/// (B1, B2): the sup over states of the L2-pair Hessian HS norm, and the
/// largest per-coordinate sup of the L2 gradient component.
std::pair<double, double> b1_b2(const GridFunction& f);

double sup_abs(const GridFunction& f);

/// mu(|f - E f| >= t), exact.
double tail_probability(const GridFunction& f, double t);

/// Exact integral of exp(c f) (or exp(c |f|)). Rejects when c sup|f| > 700.
double exp_moment_exact(const GridFunction& f, double c, bool absolute = true);

struct ExpMoment {
    double value = 0.0;
    double ci99_halfwidth = 0.0;
};

/// Seeded Monte Carlo integral of exp(c f) (or exp(c |f|)) on a uniform
/// cube; dense inputs are converted to Walsh form first.
ExpMoment exp_moment_mc(const GridFunction& f, double c, Index samples, std::uint64_t seed,
                        bool absolute = true);

/// Certify one statement on (space, f). Hypothesis violations yield
/// verdict not_applicable, never a silent pass.
Certificate certify(TheoremId id, const GridFunction& f, const CertifyOptions& opts = {});

/// Ent(e^f) <= (sigma^2/2) E[|Gamma f|^2 e^f] for Gamma in {L2, L2Pos}.
Certificate mlsi_check(const GridFunction& f, GradientKind gamma, double sigma2);

Certificate ineq_A_check(const GridFunction& f, double sigma2);
Certificate lemma_B_check(const GridFunction& f, double t, double sigma2_tilde);
Certificate prop_4_2_check(const GridFunction& f, double sigma2, double sigma2_tilde);
Certificate gradient_hesse_check(const GridFunction& f);

struct PointwiseReport {
    double max_violation = 0.0;  // max over states of lhs - rhs
    double scale = 1.0;
    bool pass = false;
};

/// Pointwise |d|d f|| <= ||Hess_L2 f||_HS on a uniform cube.
PointwiseReport bernoulli2_key_inequality(const GridFunction& f);

struct IntermediateReport {
    double sup_iterated = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double iterated_bound = 0.0;  // sqrt(2) B1 + B2
    double hessian_mass = 0.0;    // E ||Hess f||_HS^2
    double hessian_bound = 0.0;   // 4 B1^2
    bool sup_ok = false;
    bool mass_ok = false;
    bool pass = false;
};

/// The two inner estimates behind the reformulated second-order theorem.
IntermediateReport einfachere_intermediate(const GridFunction& f);

}  // namespace conclab
