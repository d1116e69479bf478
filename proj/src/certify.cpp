#include "conclab/certify.hpp"

#include "conclab/hoeffding.hpp"
#include "conclab/reduction.hpp"
#include "conclab/sampler.hpp"
#include "conclab/walsh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace conclab {

namespace {

constexpr double kZ99 = 2.575829303548901;  // two-sided 99% normal quantile
constexpr double kExpArgCap = 700.0;
constexpr double kCheckTol = 1e-10;  // comparison slack for exact inequality checks


void guard_exp_arg(double arg, const char* what) {
    if (std::abs(arg) > kExpArgCap)
        throw std::invalid_argument(std::string(what) + ": exponent exceeds the overflow guard");
}

GridFunction densify(const GridFunction& f, const char* what) {
    if (f.is_dense()) return f;
    if (!f.space().dense_enumerable())
        throw std::invalid_argument(std::string(what) +
                                    ": space exceeds the dense cap, hypotheses not computable");
    return from_walsh(f);
}

Eigen::ArrayXd gradient_sq_values(const GridFunction& f, GradientKind kind) {
    const int n = f.space().dimension();
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(f.space().total_states());
    for (int i = 0; i < n; ++i) {
        switch (kind) {
            case GradientKind::MeanDiff: acc += mean_diff(f, i).values().square(); break;
            case GradientKind::L2: acc += l2_diff(f, i).values().square(); break;
            case GradientKind::L2Pos: acc += l2_diff_pos(f, i).values().square(); break;
        }
    }
    return acc;
}

bool sigma2_admissible_l2(const ProductSpace& sp, double sigma2) {
    const double tol = 1e-12;
    return sigma2 >= 2.0 - tol || (sp.all_two_point() && sigma2 >= 1.0 - tol);
}

bool sigma2_admissible_l2pos(const ProductSpace& sp, double sigma2) {
    const double tol = 1e-12;
    return sigma2 >= 4.0 - tol || (sp.all_two_point() && sigma2 >= 2.0 - tol);
}

double default_sigma2(const ProductSpace& sp, GradientKind gamma) {
    if (gamma == GradientKind::L2Pos) return sp.all_two_point() ? 2.0 : 4.0;
    return sp.all_two_point() ? 1.0 : 2.0;
}

struct HypothesisSet {
    Certificate* cert;
    double tol;

    void value(const std::string& name, double v) { cert->hypothesis_values.push_back({name, v}); }
    void check(const std::string& name, bool ok) { cert->hypothesis_ok.push_back({name, ok}); }
    /// Record `name = v` and check v <= limit with scale-aware slack.
    void bounded(const std::string& name, double v, double limit) {
        value(name, v);
        check(name + "_ok", v <= limit + tol * std::max(1.0, std::abs(limit)));
    }
    /// Record a quantity that must vanish relative to `scale`.
    void vanishes(const std::string& name, double v, double scale) {
        value(name, v);
        check(name + "_zero", v <= tol * std::max(1.0, scale));
    }
};

// Evaluation of a Walsh expansion by bit tricks, for the Monte Carlo path.
struct WalshEvaluator {
    std::vector<std::uint64_t> masks;
    std::vector<double> coefs;
    std::uint64_t flip = 0;  // bit i set when digit 0 of factor i is the -1 atom

    explicit WalshEvaluator(const GridFunction& f) {
        const ProductSpace& sp = f.space();
        for (int i = 0; i < sp.dimension(); ++i)
            if (sp.factor(i).atom(0) < 0.0) flip |= std::uint64_t{1} << i;
        for (const WalshTerm& t : f.walsh_terms()) {
            masks.push_back(t.mask);
            coefs.push_back(t.coef);
        }
    }

    double operator()(Index state) const {
        const std::uint64_t bits = static_cast<std::uint64_t>(state) ^ flip;
        double acc = 0.0;
        for (std::size_t k = 0; k < masks.size(); ++k) {
            const int negatives = std::popcount(bits & masks[k]);
            acc += (negatives & 1) ? -coefs[k] : coefs[k];
        }
        return acc;
    }
};

void finish_exp_moment_certificate(Certificate& cert, const GridFunction& f, double c,
                                   const CertifyOptions& opts) {
    cert.constant = c;
    cert.bound = 2.0;
    if (!cert.all_hypotheses_ok()) {
        cert.verdict = Verdict::NotApplicable;
        return;
    }
    if (opts.monte_carlo) {
        if (opts.samples < 2) throw std::invalid_argument("certify: Monte Carlo needs samples >= 2");
        ExpMoment m = exp_moment_mc(f, c, opts.samples, opts.seed, true);
        cert.measured.value = m.value;
        cert.measured.method = "monte_carlo";
        cert.measured.samples = opts.samples;
        cert.measured.seed = opts.seed;
        cert.measured.ci99_halfwidth = m.ci99_halfwidth;
        if (m.value + m.ci99_halfwidth <= cert.bound)
            cert.verdict = Verdict::Pass;
        else if (m.value - m.ci99_halfwidth > cert.bound)
            cert.verdict = Verdict::Fail;
        else
            cert.verdict = Verdict::Inconclusive;
    } else {
        cert.measured.value = exp_moment_exact(f, c, true);
        cert.measured.method = "exact";
        cert.verdict = cert.measured.value <= cert.bound ? Verdict::Pass : Verdict::Fail;
    }
    cert.slack = cert.bound - cert.measured.value;
}

Certificate certify_first_order_tail(const GridFunction& fin, const CertifyOptions& opts) {
    Certificate cert;
    cert.theorem = TheoremId::Prop11;
    GridFunction f = densify(fin, "certify");
    double lambda = 1.0;
    const double raw_sup = gradient_norm(f, GradientKind::L2).values().maxCoeff();
    if (opts.rescale && raw_sup > 0.0) lambda = 1.0 / raw_sup;
    cert.rescale_lambda = lambda;
    if (lambda != 1.0) f = lambda * f;

    HypothesisSet hyp{&cert, opts.hypothesis_tol};
    hyp.bounded("sup_l2_gradient", gradient_norm(f, GradientKind::L2).values().maxCoeff(), 1.0);
    cert.constant = 0.25;  // exponent rate in 2 exp(-t^2/4)
    cert.bound = 1.0;      // max over the grid of tail / bound
    if (!cert.all_hypotheses_ok()) {
        cert.verdict = Verdict::NotApplicable;
        return cert;
    }
    const double sd = std::sqrt(variance(f));
    double worst_ratio = 0.0;
    for (int k = 0; k <= 16; ++k) {
        const double t = 0.25 * k * sd;
        const double tail = tail_probability(f, t);
        const double bound = 2.0 * std::exp(-t * t / 4.0);
        cert.tail_grid.push_back({t, tail, bound});
        worst_ratio = std::max(worst_ratio, tail / bound);
    }
    cert.measured.value = worst_ratio;
    cert.measured.method = "exact";
    cert.verdict = worst_ratio <= 1.0 ? Verdict::Pass : Verdict::Fail;
    cert.slack = 1.0 - worst_ratio;
    return cert;
}

Certificate certify_exp_family(TheoremId id, const GridFunction& fin, const CertifyOptions& opts) {
    Certificate cert;
    cert.theorem = id;
    GridFunction f = densify(fin, "certify");
    const ProductSpace& sp = f.space();

    // Normalization functional whose sup the rescale option pins to 1.
    auto normalization = [&](const GridFunction& g) -> double {
        switch (id) {
            case TheoremId::ThmZentral:
            case TheoremId::CorBernoulli: return iterated_l2(g).values().maxCoeff();
            case TheoremId::CorPlus: return iterated_l2_pos(g).values().maxCoeff();
            case TheoremId::ThmHoeffding1: return iterated_l2(remainder(g)).values().maxCoeff();
            default: return 0.0;  // no normalization hypothesis
        }
    };
    double lambda = 1.0;
    if (opts.rescale) {
        const double raw = normalization(f);
        if (raw > 0.0) lambda = 1.0 / raw;
    }
    cert.rescale_lambda = lambda;
    if (lambda != 1.0) f = lambda * f;

    HypothesisSet hyp{&cert, opts.hypothesis_tol};
    const double scale_f = std::max(1.0, sup_abs(f));
    double c = 0.0;

    switch (id) {
        case TheoremId::ThmZentral:
        case TheoremId::CorBernoulli: {
            if (id == TheoremId::CorBernoulli)
                hyp.check("two_point_factors", sp.all_two_point());
            hyp.vanishes("sup_degree0", std::abs(expectation(f)), scale_f);
            hyp.vanishes("sup_degree1", sup_abs(first_order_part(f)), scale_f);
            hyp.bounded("sup_iterated_l2", iterated_l2(f).values().maxCoeff(), 1.0);
            const double b2 = b_squared(f);
            hyp.value("b_squared", b2);
            c = id == TheoremId::CorBernoulli ? 1.0 / (3.0 + 2.0 * b2) : 1.0 / (2.0 * (3.0 + b2));
            break;
        }
        case TheoremId::CorPlus: {
            hyp.vanishes("sup_degree0", std::abs(expectation(f)), scale_f);
            hyp.vanishes("sup_degree1", sup_abs(first_order_part(f)), scale_f);
            hyp.bounded("sup_iterated_l2_pos", iterated_l2_pos(f).values().maxCoeff(), 1.0);
            const double b2 = b_squared(f);
            hyp.value("b_squared", b2);
            c = 1.0 / (2.0 * (4.0 + b2));
            break;
        }
        case TheoremId::ThmHoeffding1: {
            hyp.vanishes("sup_degree0", std::abs(expectation(f)), scale_f);
            GridFunction f1 = first_order_part(f);
            GridFunction rf = remainder(f);
            const double b0 = gradient_norm(f1, GradientKind::L2).values().maxCoeff();
            hyp.value("b0", b0);
            hyp.bounded("sup_iterated_l2_remainder", iterated_l2(rf).values().maxCoeff(), 1.0);
            const double b2 = b_squared(f);
            hyp.value("b_squared", b2);
            c = 1.0 / (12.0 + 4.0 * b2 + 7.0 * b0);
            break;
        }
        case TheoremId::ThmEinfachere: {
            hyp.vanishes("sup_degree0", std::abs(expectation(f)), scale_f);
            hyp.vanishes("sup_degree1", sup_abs(first_order_part(f)), scale_f);
            auto [B1, B2] = b1_b2(f);
            hyp.value("B1", B1);
            hyp.value("B2", B2);
            const double numer = sp.all_two_point() ? 1.0 / 7.0 : 1.0 / 11.0;
            c = B1 + B2 > 0.0 ? numer / (B1 + B2) : 0.0;
            if (B1 + B2 == 0.0) cert.note = "degenerate: B1 + B2 = 0, f vanishes";
            break;
        }
        case TheoremId::PropBernoulli2: {
            hyp.check("uniform_cube", sp.is_uniform_cube());
            hyp.vanishes("sup_degree0", std::abs(expectation(f)), scale_f);
            hyp.vanishes("sup_degree1", sup_abs(first_order_part(f)), scale_f);
            const double B = hessian_hs_norm(f, HessianKind::MeanDiff2).values().maxCoeff();
            hyp.value("sup_hessian_hs", B);
            c = B > 0.0 ? 1.0 / (5.0 * B) : 0.0;
            if (B == 0.0) cert.note = "degenerate: sup Hessian vanishes, f vanishes";
            break;
        }
        default: throw std::logic_error("certify_exp_family: unexpected theorem");
    }

    finish_exp_moment_certificate(cert, f, c, opts);
    return cert;
}

}  // namespace

std::string to_string(TheoremId id) {
    switch (id) {
        case TheoremId::Prop11: return "prop_1_1";
        case TheoremId::ThmZentral: return "thm_zentral";
        case TheoremId::CorBernoulli: return "cor_bernoulli";
        case TheoremId::CorPlus: return "cor_plus";
        case TheoremId::ThmHoeffding1: return "thm_hoeffding1";
        case TheoremId::ThmEinfachere: return "thm_einfachere";
        case TheoremId::PropBernoulli2: return "prop_bernoulli2";
        case TheoremId::IneqA: return "ineq_A";
        case TheoremId::LemmaB: return "lemma_B";
        case TheoremId::Prop42: return "prop_4_2";
        case TheoremId::Mlsi: return "mlsi";
        case TheoremId::GradientHesse: return "gradient_hesse";
    }
    throw std::logic_error("to_string: unknown theorem id");
}

TheoremId theorem_from_string(const std::string& name) {
    for (TheoremId id : {TheoremId::Prop11, TheoremId::ThmZentral, TheoremId::CorBernoulli,
                         TheoremId::CorPlus, TheoremId::ThmHoeffding1, TheoremId::ThmEinfachere,
                         TheoremId::PropBernoulli2, TheoremId::IneqA, TheoremId::LemmaB,
                         TheoremId::Prop42, TheoremId::Mlsi, TheoremId::GradientHesse})
        if (to_string(id) == name) return id;
    throw std::invalid_argument("unknown theorem id: " + name);
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::NotApplicable: return "not_applicable";
        case Verdict::Inconclusive: return "inconclusive";
    }
    throw std::logic_error("to_string: unknown verdict");
}

bool Certificate::all_hypotheses_ok() const {
    for (const auto& [name, ok] : hypothesis_ok)
        if (!ok) return false;
    return true;
}

double b_squared(const GridFunction& f) {
    require_dense(f, "b_squared");
    const int n = f.space().dimension();
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            acc += 2.0 * weighted_mean(f.space(), mean_diff_pair(f, i, j).values().square());
    return acc;
}

std::pair<double, double> b1_b2(const GridFunction& f) {
    require_dense(f, "b1_b2");
    const double b1 = hessian_hs_norm(f, HessianKind::L2Pair).values().maxCoeff();
    double b2 = 0.0;
    for (int i = 0; i < f.space().dimension(); ++i)
        b2 = std::max(b2, l2_diff(f, i).values().maxCoeff());
    return {b1, b2};
}

double sup_abs(const GridFunction& f) {
    require_dense(f, "sup_abs");
    return f.values().abs().maxCoeff();
}

double tail_probability(const GridFunction& f, double t) {
    require_dense(f, "tail_probability");
    const double mean = expectation(f);
    Eigen::ArrayXd indicator =
        ((f.values() - mean).abs() >= t).cast<double>();
    return weighted_mean(f.space(), indicator);
}

double exp_moment_exact(const GridFunction& f, double c, bool absolute) {
    if (c < 0.0) throw std::invalid_argument("exp_moment_exact: rate must be >= 0");
    GridFunction g = densify(f, "exp_moment_exact");
    guard_exp_arg(c * sup_abs(g), "exp_moment_exact");
    Eigen::ArrayXd integrand = absolute ? Eigen::ArrayXd((c * g.values().abs()).exp())
                                        : Eigen::ArrayXd((c * g.values()).exp());
    return weighted_mean(g.space(), integrand);
}

ExpMoment exp_moment_mc(const GridFunction& f, double c, Index samples, std::uint64_t seed,
                        bool absolute) {
    if (c < 0.0) throw std::invalid_argument("exp_moment_mc: rate must be >= 0");
    if (samples < 2) throw std::invalid_argument("exp_moment_mc: needs at least 2 samples");
    if (!f.space().is_uniform_cube())
        throw std::invalid_argument("exp_moment_mc: requires a uniform cube");
    GridFunction w = f.is_walsh() ? f : to_walsh(f);
    guard_exp_arg(c * w.sup_norm_bound(), "exp_moment_mc");
    WalshEvaluator eval(w);
    SampleStream stream(w.space_ptr(), seed);
    double sum = 0.0;
    double sumsq = 0.0;
    for (Index k = 0; k < samples; ++k) {
        const double v = eval(stream.next());
        const double x = std::exp(c * (absolute ? std::abs(v) : v));
        sum += x;
        sumsq += x * x;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
    return {mean, kZ99 * std::sqrt(var / n)};
}

Certificate certify(TheoremId id, const GridFunction& f, const CertifyOptions& opts) {
    switch (id) {
        case TheoremId::Prop11: return certify_first_order_tail(f, opts);
        case TheoremId::ThmZentral:
        case TheoremId::CorBernoulli:
        case TheoremId::CorPlus:
        case TheoremId::ThmHoeffding1:
        case TheoremId::ThmEinfachere:
        case TheoremId::PropBernoulli2: return certify_exp_family(id, f, opts);
        case TheoremId::Mlsi: {
            GridFunction g = densify(f, "certify");
            const double s2 = std::isnan(opts.sigma2) ? default_sigma2(g.space(), opts.gamma)
                                                      : opts.sigma2;
            return mlsi_check(g, opts.gamma, s2);
        }
        case TheoremId::IneqA: {
            GridFunction g = densify(f, "certify");
            const double s2 = std::isnan(opts.sigma2)
                                  ? default_sigma2(g.space(), GradientKind::L2)
                                  : opts.sigma2;
            return ineq_A_check(g, s2);
        }
        case TheoremId::LemmaB: {
            GridFunction g = densify(f, "certify");
            const double s2t = std::isnan(opts.sigma2_tilde)
                                   ? default_sigma2(g.space(), GradientKind::L2Pos)
                                   : opts.sigma2_tilde;
            const double t = std::isnan(opts.t) ? 0.5 / (2.0 * s2t) : opts.t;
            return lemma_B_check(g, t, s2t);
        }
        case TheoremId::Prop42: {
            GridFunction g = densify(f, "certify");
            const double s2 = std::isnan(opts.sigma2)
                                  ? default_sigma2(g.space(), GradientKind::L2)
                                  : opts.sigma2;
            const double s2t = std::isnan(opts.sigma2_tilde)
                                   ? default_sigma2(g.space(), GradientKind::L2Pos)
                                   : opts.sigma2_tilde;
            return prop_4_2_check(g, s2, s2t);
        }
        case TheoremId::GradientHesse: return gradient_hesse_check(densify(f, "certify"));
    }
    throw std::invalid_argument("certify: unknown theorem id");
}

Certificate mlsi_check(const GridFunction& f, GradientKind gamma, double sigma2) {
    require_dense(f, "mlsi_check");
    if (gamma == GradientKind::MeanDiff)
        throw std::invalid_argument("mlsi_check: gamma must be the L2 or positive-part operator");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("mlsi_check: sigma2 must be > 0");
    guard_exp_arg(sup_abs(f), "mlsi_check");

    Certificate cert;
    cert.theorem = TheoremId::Mlsi;
    cert.note = gamma == GradientKind::L2 ? "gamma=l2" : "gamma=l2pos";
    Eigen::ArrayXd ef = f.values().exp();
    const double lhs = entropy(GridFunction::dense(f.space_ptr(), ef));
    const double rhs =
        0.5 * sigma2 * weighted_mean(f.space(), Eigen::ArrayXd(gradient_sq_values(f, gamma) * ef));
    cert.hypothesis_values = {{"sigma2", sigma2}, {"entropy", lhs}, {"energy", rhs / (0.5 * sigma2)}};
    cert.constant = sigma2;
    cert.bound = rhs;
    cert.measured.value = lhs;
    cert.measured.method = "exact";
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    cert.verdict = lhs <= rhs + kCheckTol * scale ? Verdict::Pass : Verdict::Fail;
    cert.slack = rhs - lhs;
    return cert;
}

Certificate ineq_A_check(const GridFunction& f, double sigma2) {
    require_dense(f, "ineq_A_check");
    Certificate cert;
    cert.theorem = TheoremId::IneqA;
    HypothesisSet hyp{&cert, 1e-9};
    hyp.vanishes("mean", std::abs(expectation(f)), sup_abs(f));
    hyp.check("sigma2_admissible", sigma2_admissible_l2(f.space(), sigma2));
    hyp.value("sigma2", sigma2);
    cert.constant = sigma2;
    if (!cert.all_hypotheses_ok()) {
        cert.verdict = Verdict::NotApplicable;
        return cert;
    }
    guard_exp_arg(sup_abs(f), "ineq_A_check");
    Eigen::ArrayXd grad_sq = gradient_sq_values(f, GradientKind::L2);
    guard_exp_arg(sigma2 * grad_sq.maxCoeff(), "ineq_A_check");
    const double lhs = weighted_mean(f.space(), f.values().exp());
    const double rhs = weighted_mean(f.space(), Eigen::ArrayXd((sigma2 * grad_sq).exp()));
    cert.bound = rhs;
    cert.measured.value = lhs;
    cert.measured.method = "exact";
    cert.verdict = lhs <= rhs + kCheckTol * std::max(1.0, rhs) ? Verdict::Pass : Verdict::Fail;
    cert.slack = rhs - lhs;
    return cert;
}

Certificate lemma_B_check(const GridFunction& f, double t, double sigma2_tilde) {
    require_dense(f, "lemma_B_check");
    Certificate cert;
    cert.theorem = TheoremId::LemmaB;
    HypothesisSet hyp{&cert, 1e-9};
    GridFunction abs_f = GridFunction::dense(f.space_ptr(), f.values().abs());
    hyp.bounded("sup_l2_gradient_of_abs", gradient_norm(abs_f, GradientKind::L2).values().maxCoeff(),
                1.0);
    hyp.value("t", t);
    hyp.value("sigma2_tilde", sigma2_tilde);
    hyp.check("t_in_range", t >= 0.0 && 2.0 * sigma2_tilde * t < 1.0);
    hyp.check("sigma2_tilde_admissible", sigma2_admissible_l2pos(f.space(), sigma2_tilde));
    cert.constant = t;
    if (!cert.all_hypotheses_ok()) {
        cert.verdict = Verdict::NotApplicable;
        return cert;
    }
    const double sup_f = sup_abs(f);
    guard_exp_arg(t * sup_f * sup_f, "lemma_B_check");
    const double lhs = weighted_mean(f.space(), Eigen::ArrayXd((t * f.values().square()).exp()));
    const double mean_sq = weighted_mean(f.space(), f.values().square());
    const double rhs = std::exp(t / (1.0 - 2.0 * sigma2_tilde * t) * mean_sq);
    cert.bound = rhs;
    cert.measured.value = lhs;
    cert.measured.method = "exact";
    cert.verdict = lhs <= rhs + kCheckTol * std::max(1.0, rhs) ? Verdict::Pass : Verdict::Fail;
    cert.slack = rhs - lhs;
    return cert;
}

Certificate prop_4_2_check(const GridFunction& f, double sigma2, double sigma2_tilde) {
    require_dense(f, "prop_4_2_check");
    Certificate cert;
    cert.theorem = TheoremId::Prop42;
    HypothesisSet hyp{&cert, 1e-9};
    hyp.vanishes("mean", std::abs(expectation(f)), sup_abs(f));
    hyp.bounded("sup_iterated_l2", iterated_l2(f).values().maxCoeff(), 1.0);
    hyp.value("sigma2", sigma2);
    hyp.value("sigma2_tilde", sigma2_tilde);
    hyp.check("sigma2_admissible", sigma2_admissible_l2(f.space(), sigma2));
    hyp.check("sigma2_tilde_admissible", sigma2_admissible_l2pos(f.space(), sigma2_tilde));
    const double c = 1.0 / (2.0 * std::sqrt(sigma2) * std::sqrt(sigma2_tilde));
    cert.constant = c;
    if (!cert.all_hypotheses_ok()) {
        cert.verdict = Verdict::NotApplicable;
        return cert;
    }
    guard_exp_arg(c * sup_abs(f), "prop_4_2_check");
    const double lhs = exp_moment_exact(f, c, false);
    const double grad_mass = weighted_mean(f.space(), gradient_sq_values(f, GradientKind::L2));
    const double rhs = std::exp(grad_mass / (2.0 * sigma2_tilde));
    cert.bound = rhs;
    cert.measured.value = lhs;
    cert.measured.method = "exact";
    cert.verdict = lhs <= rhs + kCheckTol * std::max(1.0, rhs) ? Verdict::Pass : Verdict::Fail;
    cert.slack = rhs - lhs;
    return cert;
}

Certificate gradient_hesse_check(const GridFunction& f) {
    require_dense(f, "gradient_hesse_check");
    Certificate cert;
    cert.theorem = TheoremId::GradientHesse;
    HypothesisSet hyp{&cert, 1e-9};
    const double scale_f = sup_abs(f);
    hyp.vanishes("sup_degree0", std::abs(expectation(f)), scale_f);
    hyp.vanishes("sup_degree1", sup_abs(first_order_part(f)), scale_f);
    if (!cert.all_hypotheses_ok()) {
        cert.verdict = Verdict::NotApplicable;
        return cert;
    }
    HoeffdingDecomposition dec = decompose(f);
    const int lowest = dec.lowest_degree(1e-9);
    if (lowest < 0) {
        // f vanishes: both sides are zero.
        cert.constant = 1.0;
        cert.bound = 1.0;
        cert.measured.value = 0.0;
        cert.measured.method = "exact";
        cert.verdict = Verdict::Pass;
        cert.slack = 1.0;
        cert.note = "degenerate: f vanishes";
        return cert;
    }
    hyp.value("lowest_degree", lowest);
    int present = 0;
    for (int d = 0; d <= f.space().dimension(); ++d)
        if (dec.degree_norm2(d) > 1e-18 * std::max(1.0, scale_f * scale_f)) ++present;
    const double grad_mass = weighted_mean(f.space(), gradient_sq_values(f, GradientKind::L2));
    const double hess_mass = b_squared(f);
    hyp.value("gradient_mass", grad_mass);
    hyp.value("hessian_mass", hess_mass);
    const double limit = 1.0 / (lowest - 1);
    const double ratio = hess_mass > 0.0 ? grad_mass / hess_mass : 0.0;
    cert.constant = limit;
    cert.bound = limit;
    cert.measured.value = ratio;
    cert.measured.method = "exact";
    cert.slack = limit - ratio;
    const double tol = 1e-9 * std::max(1.0, limit);
    bool ok = ratio <= limit + tol;
    if (present == 1) ok = ok && std::abs(ratio - limit) <= tol;  // equality for pure degree
    cert.verdict = ok ? Verdict::Pass : Verdict::Fail;
    if (present == 1) cert.note = "single degree present: equality asserted";
    return cert;
}

PointwiseReport bernoulli2_key_inequality(const GridFunction& f) {
    GridFunction g = densify(f, "bernoulli2_key_inequality");
    if (!g.space().is_uniform_cube())
        throw std::invalid_argument("bernoulli2_key_inequality: requires a uniform cube");
    Eigen::ArrayXd lhs = iterated_l2(g).values();
    Eigen::ArrayXd rhs = hessian_hs_norm(g, HessianKind::L2Pair).values();
    PointwiseReport report;
    report.max_violation = (lhs - rhs).maxCoeff();
    report.scale = std::max(1.0, rhs.maxCoeff());
    report.pass = report.max_violation <= kCheckTol * report.scale;
    return report;
}

IntermediateReport einfachere_intermediate(const GridFunction& fin) {
    GridFunction f = densify(fin, "einfachere_intermediate");
    const double scale_f = std::max(1.0, sup_abs(f));
    if (std::abs(expectation(f)) > 1e-9 * scale_f ||
        sup_abs(first_order_part(f)) > 1e-9 * scale_f)
        throw std::invalid_argument(
            "einfachere_intermediate: degree-0/1 parts must vanish");
    IntermediateReport report;
    auto [b1, b2] = b1_b2(f);
    report.b1 = b1;
    report.b2 = b2;
    report.sup_iterated = iterated_l2(f).values().maxCoeff();
    report.iterated_bound = std::sqrt(2.0) * b1 + b2;
    report.hessian_mass = b_squared(f);
    report.hessian_bound = 4.0 * b1 * b1;
    report.sup_ok =
        report.sup_iterated <= report.iterated_bound + kCheckTol * std::max(1.0, report.iterated_bound);
    report.mass_ok =
        report.hessian_mass <= report.hessian_bound + kCheckTol * std::max(1.0, report.hessian_bound);
    report.pass = report.sup_ok && report.mass_ok;
    return report;
}

}  // namespace conclab
