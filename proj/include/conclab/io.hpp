#pragma once

#include "conclab/certify.hpp"
#include "conclab/hoeffding.hpp"
#include "conclab/laplacian.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <iosfwd>
#include <string>

namespace conclab::io {

using nlohmann::json;

/// Space description: {"factors":[{"atoms":[...],"probs":[...]}, ...]}
/// or the shorthand {"cube": n}.
SpacePtr space_from_json(const json& j);
json space_to_json(const ProductSpace& space);

/// Function description: {"table":[...]} (dense, mixed-radix order),
/// {"walsh":[{"subset":[i,...],"coef":r}, ...]} (1-based coordinates), or
/// {"builtin":{"name":...,"params":{...}}} with builtins
/// constant / coordinate / polynomial / centered_polynomial.
GridFunction function_from_json(const json& j, SpacePtr space);
json function_to_json(const GridFunction& f);

/// Matrix: {"dim": n, "data": [... row-major ...]}. Vectors are plain
/// arrays (or the same {"dim","data"} shape).
Eigen::MatrixXd matrix_from_json(const json& j);
Eigen::VectorXd vector_from_json(const json& j);

json certificate_to_json(const Certificate& cert);
/// One CSV line, columns theorem,c,bound,measured,ci,verdict,slack.
std::string certificate_to_csv(const Certificate& cert);

json decomposition_to_json(const HoeffdingDecomposition& dec);
json spectral_report_to_json(const SpectralReport& report);

/// Serialize with every floating value printed to 17 significant digits
/// (lossless round trip); non-finite values become null.
void dump(const json& j, std::ostream& os, int indent = 2);
std::string dump_string(const json& j, int indent = 2);

/// Parse a JSON file; parse errors are rethrown with a line:column prefix.
json parse_file(const std::string& path);

}  // namespace conclab::io
