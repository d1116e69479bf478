// Command-line front end: decomposition, difference operators, spectra and
// concentration certificates over JSON space/function descriptions.

#include "conclab/diffops.hpp"
#include "conclab/gaussian.hpp"
#include "conclab/io.hpp"
#include "conclab/selftest.hpp"
#include "conclab/walsh.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace conclab;
using conclab::io::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitNotApplicable = 2;
constexpr int kExitInputError = 3;

int verdict_exit(Verdict v) {
    switch (v) {
        case Verdict::Pass: return kExitPass;
        case Verdict::Fail: return kExitFail;
        // No verdict was reached; both map to the "hypotheses not met" code.
        case Verdict::NotApplicable:
        case Verdict::Inconclusive: return kExitNotApplicable;
    }
    return kExitInputError;
}

struct CommonInputs {
    std::string space_path;
    std::string function_path;

    GridFunction load() const {
        SpacePtr space = io::space_from_json(io::parse_file(space_path));
        return io::function_from_json(io::parse_file(function_path), space);
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--space", space_path, "space JSON file")->required();
        cmd->add_option("--function", function_path, "function JSON file")->required();
    }
};

void emit(const json& j) { io::dump(j, std::cout); std::cout << "\n"; }

int run(int argc, char** argv) {
    CLI::App app{"concentration certificates on finite product spaces"};
    app.require_subcommand(1);

    // Accepted for compatibility with scripted runs; all kernels are
    // sequential with a fixed reduction order, so any cap is satisfied.
    if (const char* threads = std::getenv("CONC_LAB_THREADS")) (void)threads;

    // decompose
    CommonInputs dec_in;
    auto* cmd_dec = app.add_subcommand("decompose", "Hoeffding decomposition as JSON");
    dec_in.attach(cmd_dec);
    std::string dec_method = "auto";
    cmd_dec->add_option("--method", dec_method, "auto|generic|walsh")
        ->check(CLI::IsMember({"auto", "generic", "walsh"}));

    // diffops
    CommonInputs diff_in;
    auto* cmd_diff = app.add_subcommand("diffops", "dump a difference-operator field");
    diff_in.attach(cmd_diff);
    std::string op;
    int opt_i = 0, opt_j = 0;
    cmd_diff->add_option("--op", op, "field to dump")
        ->required()
        ->check(CLI::IsMember({"mean-diff", "l2", "l2-pos", "pair-mean", "pair-l2", "hess-mean",
                               "hess-l2", "hess-mean-norm", "hess-l2-norm", "grad-l2-norm",
                               "grad-l2-pos-norm", "iter-l2", "iter-l2-pos", "laplace"}));
    cmd_diff->add_option("--i", opt_i, "first coordinate (1-based)");
    cmd_diff->add_option("--j", opt_j, "second coordinate (1-based)");

    // spectrum
    CommonInputs spec_in;
    auto* cmd_spec = app.add_subcommand("spectrum", "per-degree eigenvalue report");
    spec_in.attach(cmd_spec);

    // certify
    CommonInputs cert_in;
    auto* cmd_cert = app.add_subcommand("certify", "certify one statement");
    std::string theorem;
    cmd_cert->add_option("theorem", theorem, "statement identifier")->required();
    cert_in.attach(cmd_cert);
    std::string method = "exact";
    cmd_cert->add_option("--method", method, "exact|mc")->check(CLI::IsMember({"exact", "mc"}));
    Index samples = 1'000'000;
    cmd_cert->add_option("--samples", samples, "Monte Carlo sample count (>= 1000)");
    std::uint64_t seed = 1;
    cmd_cert->add_option("--seed", seed, "Monte Carlo seed");
    bool rescale = false;
    cmd_cert->add_flag("--rescale", rescale, "normalize f to the hypothesis boundary");
    bool csv = false;
    cmd_cert->add_flag("--csv", csv, "one-line CSV instead of JSON");
    double tol = 1e-9;
    cmd_cert->add_option("--tol", tol, "hypothesis tolerance override");
    double sigma2 = std::numeric_limits<double>::quiet_NaN();
    cmd_cert->add_option("--sigma2", sigma2, "Sobolev constant");
    double sigma2_tilde = std::numeric_limits<double>::quiet_NaN();
    cmd_cert->add_option("--sigma2-tilde", sigma2_tilde, "Sobolev constant (positive-part)");
    double t_param = std::numeric_limits<double>::quiet_NaN();
    cmd_cert->add_option("--t", t_param, "exponent parameter where applicable");
    std::string gamma = "d";
    cmd_cert->add_option("--gamma", gamma, "gradient for mlsi: d|dplus")
        ->check(CLI::IsMember({"d", "dplus"}));

    // mlsi
    CommonInputs mlsi_in;
    auto* cmd_mlsi = app.add_subcommand("mlsi", "modified log-Sobolev check");
    mlsi_in.attach(cmd_mlsi);
    std::string mlsi_gamma = "d";
    cmd_mlsi->add_option("--gamma", mlsi_gamma, "d|dplus")->check(CLI::IsMember({"d", "dplus"}));
    double mlsi_sigma2 = std::numeric_limits<double>::quiet_NaN();
    cmd_mlsi->add_option("--sigma2", mlsi_sigma2, "Sobolev constant (default: known admissible)");
    bool mlsi_csv = false;
    cmd_mlsi->add_flag("--csv", mlsi_csv, "one-line CSV instead of JSON");

    // gaussian
    auto* cmd_gauss = app.add_subcommand("gaussian", "Gaussian quadratic-form checks");
    cmd_gauss->require_subcommand(1);
    std::string a_path, l_path;
    Index g_samples = 1'000'000;
    std::uint64_t g_seed = 1;
    double g_sigma2 = 1.0;
    bool g_csv = false;
    auto* cmd_gc = cmd_gauss->add_subcommand("certify", "second-order Gaussian certificate");
    cmd_gc->add_option("--A", a_path, "symmetric matrix JSON")->required();
    cmd_gc->add_option("--l", l_path, "linear term JSON (enables the first-order variant)");
    cmd_gc->add_option("--samples", g_samples, "Monte Carlo sample count (>= 1000)");
    cmd_gc->add_option("--seed", g_seed, "Monte Carlo seed");
    cmd_gc->add_option("--sigma2", g_sigma2, "log-Sobolev constant of the measure");
    cmd_gc->add_flag("--csv", g_csv, "one-line CSV instead of JSON");
    std::string p_a_path;
    auto* cmd_gp = cmd_gauss->add_subcommand("poincare", "gradient vs Hessian mass identity");
    cmd_gp->add_option("--A", p_a_path, "symmetric matrix JSON")->required();
    std::string i_a_path, i_l_path;
    Index i_points = 1000;
    double i_step = 1e-4;
    std::uint64_t i_seed = 1;
    auto* cmd_gi = cmd_gauss->add_subcommand("itgrad", "finite-difference iterated-modulus check");
    cmd_gi->add_option("--A", i_a_path, "symmetric matrix JSON")->required();
    cmd_gi->add_option("--l", i_l_path, "linear term JSON");
    cmd_gi->add_option("--points", i_points, "number of sampled points");
    cmd_gi->add_option("--step", i_step, "finite-difference step");
    cmd_gi->add_option("--seed", i_seed, "point sampling seed");

    // selftest
    auto* cmd_self = app.add_subcommand("selftest", "run the built-in invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitInputError;
    }

    if (*cmd_dec) {
        GridFunction f = dec_in.load();
        DecomposeMethod m = DecomposeMethod::Auto;
        if (dec_method == "generic") m = DecomposeMethod::Generic;
        if (dec_method == "walsh") m = DecomposeMethod::WalshFastPath;
        emit(io::decomposition_to_json(decompose(f, m)));
        return kExitPass;
    }

    if (*cmd_diff) {
        GridFunction f = diff_in.load();
        if (f.is_walsh()) f = from_walsh(f);
        const int i = opt_i - 1, j = opt_j - 1;
        json out{{"op", op}};
        auto table = [](const GridFunction& g) { return io::function_to_json(g)["table"]; };
        auto hessian_json = [&](const HessianField& h) {
            json entries = json::array();
            for (int a = 0; a < h.dimension(); ++a)
                for (int b = a + 1; b < h.dimension(); ++b)
                    entries.push_back({{"i", a + 1}, {"j", b + 1}, {"table", table(h.entry(a, b))}});
            return entries;
        };
        if (op == "mean-diff") out["table"] = table(mean_diff(f, i));
        else if (op == "l2") out["table"] = table(l2_diff(f, i));
        else if (op == "l2-pos") out["table"] = table(l2_diff_pos(f, i));
        else if (op == "pair-mean") out["table"] = table(mean_diff_pair(f, i, j));
        else if (op == "pair-l2") out["table"] = table(l2_diff_pair(f, i, j));
        else if (op == "hess-mean") out["entries"] = hessian_json(hessian_mean_diff(f));
        else if (op == "hess-l2") out["entries"] = hessian_json(hessian_l2(f));
        else if (op == "hess-mean-norm") out["table"] = table(hessian_hs_norm(f, HessianKind::MeanDiff2));
        else if (op == "hess-l2-norm") out["table"] = table(hessian_hs_norm(f, HessianKind::L2Pair));
        else if (op == "grad-l2-norm") out["table"] = table(gradient_norm(f, GradientKind::L2));
        else if (op == "grad-l2-pos-norm") out["table"] = table(gradient_norm(f, GradientKind::L2Pos));
        else if (op == "iter-l2") out["table"] = table(iterated_l2(f));
        else if (op == "iter-l2-pos") out["table"] = table(iterated_l2_pos(f));
        else if (op == "laplace") out["table"] = table(laplace(f));
        emit(out);
        return kExitPass;
    }

    if (*cmd_spec) {
        GridFunction f = spec_in.load();
        emit(io::spectral_report_to_json(spectral_report(f)));
        return kExitPass;
    }

    if (*cmd_cert) {
        if (tol < std::numeric_limits<double>::epsilon())
            throw std::invalid_argument("certify: --tol must be at least machine epsilon");
        CertifyOptions opts;
        opts.monte_carlo = method == "mc";
        if (opts.monte_carlo && samples < 1000)
            throw std::invalid_argument("certify: Monte Carlo needs --samples >= 1000");
        opts.samples = samples;
        opts.seed = seed;
        opts.rescale = rescale;
        opts.hypothesis_tol = tol;
        opts.sigma2 = sigma2;
        opts.sigma2_tilde = sigma2_tilde;
        opts.t = t_param;
        opts.gamma = gamma == "dplus" ? GradientKind::L2Pos : GradientKind::L2;
        Certificate cert = certify(theorem_from_string(theorem), cert_in.load(), opts);
        if (csv)
            std::cout << io::certificate_to_csv(cert) << "\n";
        else
            emit(io::certificate_to_json(cert));
        return verdict_exit(cert.verdict);
    }

    if (*cmd_mlsi) {
        GridFunction f = mlsi_in.load();
        if (f.is_walsh()) f = from_walsh(f);
        const GradientKind g = mlsi_gamma == "dplus" ? GradientKind::L2Pos : GradientKind::L2;
        double s2 = mlsi_sigma2;
        if (std::isnan(s2)) {
            const bool two_point = f.space().all_two_point();
            s2 = g == GradientKind::L2Pos ? (two_point ? 2.0 : 4.0) : (two_point ? 1.0 : 2.0);
        }
        Certificate cert = mlsi_check(f, g, s2);
        if (mlsi_csv)
            std::cout << io::certificate_to_csv(cert) << "\n";
        else
            emit(io::certificate_to_json(cert));
        return verdict_exit(cert.verdict);
    }

    if (*cmd_gc) {
        if (g_samples < 1000)
            throw std::invalid_argument("gaussian certify: needs --samples >= 1000");
        Eigen::MatrixXd a = io::matrix_from_json(io::parse_file(a_path));
        GaussianMcOptions opts{g_samples, g_seed};
        Certificate cert;
        if (!l_path.empty()) {
            Eigen::VectorXd l = io::vector_from_json(io::parse_file(l_path));
            cert = certify_gaussian_with_linear(QuadraticForm(std::move(a), std::move(l)), g_sigma2,
                                                opts);
        } else {
            cert = certify_gaussian_second_order(QuadraticForm::pure(std::move(a)), g_sigma2, opts);
        }
        if (g_csv)
            std::cout << io::certificate_to_csv(cert) << "\n";
        else
            emit(io::certificate_to_json(cert));
        return verdict_exit(cert.verdict);
    }

    if (*cmd_gp) {
        PoincareReport rep = poincare_hessian_check(
            QuadraticForm::pure(io::matrix_from_json(io::parse_file(p_a_path))));
        emit(json{{"gradient_mass", rep.gradient_mass},
                  {"hessian_mass", rep.hessian_mass},
                  {"gap", rep.gap},
                  {"pass", rep.pass}});
        return rep.pass ? kExitPass : kExitFail;
    }

    if (*cmd_gi) {
        Eigen::MatrixXd a = io::matrix_from_json(io::parse_file(i_a_path));
        Eigen::VectorXd l;
        if (!i_l_path.empty()) l = io::vector_from_json(io::parse_file(i_l_path));
        FiniteDiffReport rep =
            itgrad_hess_check(QuadraticForm(std::move(a), std::move(l)), i_points, i_step, i_seed);
        emit(json{{"checked", rep.checked},
                  {"skipped", rep.skipped},
                  {"violations", rep.violations},
                  {"max_estimate", rep.max_estimate},
                  {"op_norm", rep.op_norm},
                  {"step", rep.step},
                  {"pass", rep.pass}});
        return rep.pass ? kExitPass : kExitFail;
    }

    if (*cmd_self) {
        const int failures = run_selftest(std::cout);
        return failures == 0 ? kExitPass : kExitFail;
    }

    return kExitInputError;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}
