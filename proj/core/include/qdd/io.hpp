#pragma once

#include "qdd/decompose.hpp"
#include "qdd/distribution.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qdd {

/// Raised by every parser in this header. path locates the offending
/// element: JSON-pointer style for structured text ("$.components[1]"),
/// "line 17" for sample files, or a file path for batch inputs.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, const std::string& reason);
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Wire name of a divergence kind: "avm", "wd", or "cd".
const char* divergence_kind_name(DivergenceKind k);

/// Parses a JSON distribution spec. Accepted type tags and fields:
///   {"type":"normal","mu":m,"sigma":s}
///   {"type":"uniform","a":a,"b":b}
///   {"type":"mixture","components":[[w1,spec1],[w2,spec2],...]}
///   {"type":"piecewise_quantile","levels":[...],"values":[...],
///    "mode":"linear"|"step"}                      (mode defaults to linear)
///   {"type":"empirical","samples":[...]}
///   {"type":"histogram","edges":[...],"probs":[...]}  (finite edges only;
///    open-ended tail bins exist only in histogram pair files)
/// Numbers are read as 64-bit floats. Malformed input raises ParseError.
Distribution parse_distribution(const std::string& text);

/// Canonical JSON for a distribution, inverse of parse_distribution up to
/// equality: piecewise forms serialize as piecewise_quantile, mixtures that
/// keep their component structure serialize as mixture.
std::string serialize_distribution(const Distribution& d);

/// Newline-separated sample values (blank lines and #-comments skipped)
/// mapped to the empirical distribution of the values.
Distribution parse_samples_csv(const std::string& text);

/// One histogram of a survey pair. edges has one more entry than probs; a
/// disengaged first or last edge (JSON null) marks an open tail bin whose
/// finite side is the adjacent edge.
struct HistogramSpec {
    std::vector<std::optional<double>> edges;
    std::vector<double> probs;
};

/// A pair of histograms plus the tail truncation policy. With no explicit
/// bounds the conservative pairwise rule applies; explicit bounds override
/// it per side.
struct HistogramPairSpec {
    HistogramSpec f;
    HistogramSpec g;
    std::optional<double> lower_bound;
    std::optional<double> upper_bound;
};

/// Parses {"f":{"edges":...,"probs":...},"g":{...},"truncation":...} where
/// truncation is the string "conservative" (default; the alias
/// "paper_conservative" is accepted) or an object with optional "lower"
/// and "upper" numbers.
HistogramPairSpec parse_histogram_pair(const std::string& text);

/// Converts the pair to distributions under the truncation rule:
///   - mass inside closed bins is uniform (piecewise-linear quantile
///     through the known CDF points);
///   - when both histograms have an open upper bin, both tails are capped
///     at the larger of the two finite lower bounds; the histogram whose
///     bound equals the cap contributes its open mass as an atom there,
///     the other spreads it uniformly up to the cap;
///   - a single open upper bin is capped at its own bound, i.e. collapses
///     to an atom (a zero-width bin by design);
///   - open lower bins mirror this with the smaller of the two finite
///     upper bounds;
///   - explicit bounds replace the derived cap; a bound that would invert
///     a bin is an error.
/// Each histogram needs at least one closed bin. Probabilities must be
/// nonnegative and sum to 1 within 1e-9. Violations raise
/// std::invalid_argument.
std::pair<Distribution, Distribution> histogram_pair_to_distributions(
    const HistogramPairSpec& spec);

/// One output cell of a batch run.
struct BatchRow {
    std::string id;
    DivergenceKind kind = DivergenceKind::avm;
    int p = 1;
    bool ok = false;
    std::string error;
    Decomposition result;
};

/// Runs a JSON manifest: either a top-level array of rows or an object
/// with a "rows" array. Each row is
///   {"id": "...", "f": "f.json", "g": "g.json",
///    "divergences": ["avm","wd","cd"], "p": [2]}
/// or {"id": "...", "pair": "histogram_pair.json", ...}. Paths resolve
/// against base_dir unless absolute. divergences defaults to all three,
/// p (used by "wd" only) defaults to [2]. Output order is manifest order,
/// expanding each row by divergence and then by p. Row-level failures are
/// captured in the error field of an ok=false row; they never abort the
/// batch. A malformed manifest itself raises ParseError.
std::vector<BatchRow> run_batch(const std::string& manifest_text,
                                const std::string& base_dir,
                                const QuadratureConfig& cfg = {});

} // namespace qdd
