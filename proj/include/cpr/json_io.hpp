#pragma once

// JSON encodings of the toolkit's data. Complex numbers are [re, im] (plain
// numbers are accepted on input); matrices are lists of rows. Every parser
// throws SchemaError with the offending path on malformed input.

#include <string>
#include <vector>

#include <json.hpp>

#include "cpr/covers.hpp"
#include "cpr/cpmap.hpp"
#include "cpr/cprlab.hpp"
#include "cpr/orderzero.hpp"
#include "cpr/projkit.hpp"

namespace cpr {

using Json = nlohmann::json;

Json to_json(Complex z);
Complex complex_from_json(const Json& j, const std::string& path = "$");

Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& path = "$");

Json to_json(const Algebra& a);
Algebra algebra_from_json(const Json& j, int max_block = kDefaultMaxBlock, const std::string& path = "$");

/// {"blocks": [matrix, ...]}; block sizes come from the matrices.
Json to_json(const Element& e);
Element element_from_json(const Json& j, int max_block = kDefaultMaxBlock, const std::string& path = "$");

/// {"domain": {"block_sizes"}, "codomain": {"matrix": N} | {"space": P} |
/// {"space": P, "matrix": N} | {"block_sizes"}, "unit_images": [{"block",
/// "row", "col", "value"}]}. Units without an entry map to zero; only
/// nonzero images are written.
Json to_json(const CPMap& phi);
CPMap cpmap_from_json(const Json& j, int max_block = kDefaultMaxBlock, const std::string& path = "$");

/// {"metric": [[...]], "coords": [[...]]?}; input may instead give
/// {"coords": [[...]], "metric": "euclidean"}, {"interval": n}, {"circle": n}
/// or {"torus": m}.
Json to_json(const FiniteMetricSpace& space);
FiniteMetricSpace space_from_json(const Json& j, const std::string& path = "$");

/// {"members": [[...]], "labels": [...]?}.
Json to_json(const Cover& c);
Cover cover_from_json(const Json& j, const std::string& path = "$");

/// {"vertex_count", "faces" (maximal), "labels"?, "dimension", "f_vector"}.
Json to_json(const SimplicialComplex& k);
SimplicialComplex simplicial_from_json(const Json& j, const std::string& path = "$");

/// A list whose entries are value arrays (one per point), {"coordinate": k}
/// for a coordinate column of the space, or {"bump": {"center": x,
/// "radius": r}} for max(0, 1 - d(x, .) / r).
std::vector<Function> functions_from_json(const Json& j, const FiniteMetricSpace& space,
                                          const std::string& path = "$");

/// {"space", "matrix_size", "F", "psi", "phi", "points"}.
Json to_json(const CPApproximation& a);
CPApproximation approximation_from_json(const Json& j, int max_block = kDefaultMaxBlock,
                                        const std::string& path = "$");

/// {"blocks": [{"support", "h", "support_projection", "sigma"}],
/// "reconstruction_error", "multiplicativity_defect"}; sigma is a list of
/// {"row", "col", "value"}.
Json to_json(const OrderZeroDecomposition& d);
OrderZeroDecomposition decomposition_from_json(const Json& j, int max_block = kDefaultMaxBlock,
                                               const std::string& path = "$");

Json to_json(const OrderBounds& b);
Json to_json(const OrderZeroCertificate& c);
Json to_json(const ChoiReport& r);
Json to_json(const StinespringDilation& s);
Json to_json(const RepairResult& r);
Json to_json(const PerturbResult& r);
Json to_json(const ExtractionConstants& c);
Json to_json(const ExtractionReport& r);
Json to_json(const ApproxVerification& v);
Json to_json(const BuildInfo& b);
Json to_json(const CprEstimate& e);

}  // namespace cpr
