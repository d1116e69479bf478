#include "conclab/io.hpp"

#include "conclab/walsh.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace conclab::io {

namespace {

Eigen::ArrayXd array_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": expected an array");
    Eigen::ArrayXd out(j.size());
    Eigen::Index k = 0;
    for (const json& v : j) {
        if (!v.is_number()) throw std::invalid_argument(std::string(what) + ": expected numbers");
        out[k++] = v.get<double>();
    }
    return out;
}

json array_to_json(const Eigen::ArrayXd& a) {
    json out = json::array();
    for (Eigen::Index k = 0; k < a.size(); ++k) out.push_back(a[k]);
    return out;
}

std::uint64_t mask_from_subset(const json& subset, int dimension) {
    if (!subset.is_array()) throw std::invalid_argument("subset: expected an array");
    std::uint64_t mask = 0;
    for (const json& v : subset) {
        if (!v.is_number_integer()) throw std::invalid_argument("subset: expected integers");
        const long long i = v.get<long long>();
        if (i < 1 || i > dimension)
            throw std::invalid_argument("subset: coordinate out of range (1-based)");
        mask |= std::uint64_t{1} << (i - 1);
    }
    return mask;
}

json subset_to_json(std::uint64_t mask) {
    json out = json::array();
    for (int i = 0; i < 64; ++i)
        if (mask & (std::uint64_t{1} << i)) out.push_back(i + 1);
    return out;
}

GridFunction builtin_function(const json& j, SpacePtr space) {
    const std::string name = j.at("name").get<std::string>();
    const json params = j.value("params", json::object());
    const int n = space->dimension();
    if (name == "constant") {
        return GridFunction::constant(space, params.at("value").get<double>());
    }
    if (name == "coordinate") {
        const int i = params.at("i").get<int>();
        if (i < 1 || i > n) throw std::invalid_argument("builtin coordinate: index out of range");
        return GridFunction::coordinate(space, i - 1);
    }
    if (name == "polynomial" || name == "centered_polynomial") {
        const bool centered = name[0] == 'c';
        const json& terms = params.at("terms");
        if (!terms.is_array()) throw std::invalid_argument("builtin polynomial: terms must be an array");
        if (!centered && space->is_uniform_cube()) {
            std::vector<WalshTerm> wt;
            for (const json& t : terms)
                wt.push_back({mask_from_subset(t.at("subset"), n), t.at("coef").get<double>()});
            return GridFunction::walsh(space, std::move(wt));
        }
        if (!space->dense_enumerable())
            throw std::invalid_argument("builtin polynomial: space exceeds the dense cap");
        Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(space->total_states());
        for (const json& t : terms) {
            const std::uint64_t mask = mask_from_subset(t.at("subset"), n);
            Eigen::ArrayXd prod =
                Eigen::ArrayXd::Constant(space->total_states(), t.at("coef").get<double>());
            for (int i = 0; i < n; ++i) {
                if (!(mask & (std::uint64_t{1} << i))) continue;
                const double shift = centered ? space->factor(i).mean() : 0.0;
                for (Index s = 0; s < space->total_states(); ++s)
                    prod[s] *= space->factor(i).atom(space->digit(s, i)) - shift;
            }
            acc += prod;
        }
        return GridFunction::dense(space, std::move(acc));
    }
    throw std::invalid_argument("unknown builtin function: " + name);
}

void dump_impl(const json& j, std::string& out, int indent, int depth) {
    const auto pad = [&](int d) {
        if (indent > 0) {
            out.push_back('\n');
            out.append(static_cast<std::size_t>(indent * d), ' ');
        }
    };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out.push_back('{');
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out.push_back(',');
                first = false;
                pad(depth + 1);
                out += json(it.key()).dump();
                out += indent > 0 ? ": " : ":";
                dump_impl(it.value(), out, indent, depth + 1);
            }
            pad(depth);
            out.push_back('}');
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out.push_back('[');
            bool first = true;
            for (const json& v : j) {
                if (!first) out.push_back(',');
                first = false;
                pad(depth + 1);
                dump_impl(v, out, indent, depth + 1);
            }
            pad(depth);
            out.push_back(']');
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
                return;
            }
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out += buf;
            return;
        }
        default: out += j.dump(); return;
    }
}

}  // namespace

SpacePtr space_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("space: expected an object");
    if (j.contains("cube")) {
        if (!j.at("cube").is_number_integer())
            throw std::invalid_argument("space: cube must be an integer dimension");
        return ProductSpace::uniform_cube(j.at("cube").get<int>());
    }
    if (!j.contains("factors")) throw std::invalid_argument("space: missing factors");
    std::vector<Factor> factors;
    for (const json& fj : j.at("factors"))
        factors.emplace_back(array_from_json(fj.at("atoms"), "atoms"),
                             array_from_json(fj.at("probs"), "probs"));
    return ProductSpace::make(std::move(factors));
}

json space_to_json(const ProductSpace& space) {
    // The shorthand fixes the digit order (+1 first); only use it when the
    // space matches exactly, so dense tables survive a round trip.
    bool canonical_cube = space.is_uniform_cube();
    for (const Factor& f : space.factors())
        canonical_cube = canonical_cube && f.atom(0) == 1.0;
    if (canonical_cube) return json{{"cube", space.dimension()}};
    json factors = json::array();
    for (const Factor& f : space.factors())
        factors.push_back({{"atoms", array_to_json(f.atoms())}, {"probs", array_to_json(f.probs())}});
    return json{{"factors", factors}};
}

GridFunction function_from_json(const json& j, SpacePtr space) {
    if (!j.is_object()) throw std::invalid_argument("function: expected an object");
    if (j.contains("table")) {
        return GridFunction::dense(std::move(space), array_from_json(j.at("table"), "table"));
    }
    if (j.contains("walsh")) {
        std::vector<WalshTerm> terms;
        for (const json& t : j.at("walsh"))
            terms.push_back(
                {mask_from_subset(t.at("subset"), space->dimension()), t.at("coef").get<double>()});
        return GridFunction::walsh(std::move(space), std::move(terms));
    }
    if (j.contains("builtin")) return builtin_function(j.at("builtin"), std::move(space));
    throw std::invalid_argument("function: expected table, walsh, or builtin");
}

json function_to_json(const GridFunction& f) {
    if (f.is_dense()) return json{{"table", array_to_json(f.values())}};
    json terms = json::array();
    for (const WalshTerm& t : f.walsh_terms())
        terms.push_back({{"subset", subset_to_json(t.mask)}, {"coef", t.coef}});
    return json{{"walsh", terms}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("data"))
        throw std::invalid_argument("matrix: expected {\"dim\": n, \"data\": [...]} row-major");
    const int n = j.at("dim").get<int>();
    if (n < 1) throw std::invalid_argument("matrix: dim must be >= 1");
    Eigen::ArrayXd data = array_from_json(j.at("data"), "matrix data");
    if (data.size() != static_cast<Eigen::Index>(n) * n)
        throw std::invalid_argument("matrix: data length must be dim^2");
    Eigen::MatrixXd m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = data[r * n + c];
    return m;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::ArrayXd data = j.is_array() ? array_from_json(j, "vector")
                                       : array_from_json(j.at("data"), "vector data");
    return data.matrix();
}

json certificate_to_json(const Certificate& cert) {
    json hyp = json::object();
    for (const auto& [name, value] : cert.hypothesis_values) hyp[name] = value;
    json ok = json::object();
    for (const auto& [name, value] : cert.hypothesis_ok) ok[name] = value;
    json measured{{"value", cert.measured.value}, {"method", cert.measured.method}};
    if (cert.measured.method == "monte_carlo") {
        measured["samples"] = cert.measured.samples;
        measured["seed"] = cert.measured.seed;
        measured["ci99_halfwidth"] = cert.measured.ci99_halfwidth;
    }
    json out{{"theorem", to_string(cert.theorem)},
             {"hypotheses", hyp},
             {"hypothesis_ok", ok},
             {"constant", cert.constant},
             {"bound", cert.bound},
             {"measured", measured},
             {"verdict", to_string(cert.verdict)},
             {"slack", cert.slack},
             {"rescale_lambda", cert.rescale_lambda}};
    if (!cert.tail_grid.empty()) {
        json grid = json::array();
        for (const auto& row : cert.tail_grid)
            grid.push_back({{"t", row[0]}, {"tail", row[1]}, {"bound", row[2]}});
        out["tail_grid"] = grid;
    }
    if (!cert.note.empty()) out["note"] = cert.note;
    return out;
}

std::string certificate_to_csv(const Certificate& cert) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%s,%.17g",
                  to_string(cert.theorem).c_str(), cert.constant, cert.bound, cert.measured.value,
                  cert.measured.ci99_halfwidth, to_string(cert.verdict).c_str(), cert.slack);
    return buf;
}

json decomposition_to_json(const HoeffdingDecomposition& dec) {
    json terms = json::array();
    for (const HoeffdingDecomposition::Term& t : dec.terms()) {
        json entry{{"subset", subset_to_json(t.mask)}, {"norm2", t.norm2}};
        if (dec.coefficient_form())
            entry["coef"] = t.coef;
        else
            entry["values"] = array_to_json(t.values);
        terms.push_back(std::move(entry));
    }
    return terms;
}

json spectral_report_to_json(const SpectralReport& report) {
    json entries = json::array();
    for (const SpectralReport::Entry& e : report.entries)
        entries.push_back({{"degree", e.degree},
                           {"eigenvalue", e.eigenvalue},
                           {"rayleigh", e.rayleigh},
                           {"residual_sup", e.residual_sup},
                           {"norm2", e.norm2}});
    return json{{"entries", entries}, {"max_relative_residual", report.max_relative_residual}};
}

void dump(const json& j, std::ostream& os, int indent) {
    os << dump_string(j, indent);
}

std::string dump_string(const json& j, int indent) {
    std::string out;
    dump_impl(j, out, indent, 0);
    return out;
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& err) {
        // Translate the byte offset into line:column for the diagnostic.
        std::size_t line = 1, column = 1;
        for (std::size_t k = 0; k + 1 < err.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw std::invalid_argument(path + ":" + std::to_string(line) + ":" +
                                    std::to_string(column) + ": " + err.what());
    }
}

}  // namespace conclab::io
