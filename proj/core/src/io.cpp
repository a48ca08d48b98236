#include "qdd/io.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <variant>

namespace qdd {

using nlohmann::json;

ParseError::ParseError(const std::string& path, const std::string& reason)
    : std::runtime_error(path + ": " + reason), path_(path) {}

const char* divergence_kind_name(DivergenceKind k) {
    switch (k) {
        case DivergenceKind::avm: return "avm";
        case DivergenceKind::wdp: return "wd";
        case DivergenceKind::cd: return "cd";
    }
    return "unknown";
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
    throw ParseError(path, reason);
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail("$", e.what());
    }
}

const json& member(const json& j, const char* key, const std::string& path) {
    const auto it = j.find(key);
    if (it == j.end()) {
        fail(path, std::string("missing field \"") + key + "\"");
    }
    return *it;
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "number must be finite");
    return v;
}

std::vector<double> number_array(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

// Runs a constructor and turns its std::invalid_argument into a ParseError
// carrying the JSON path of the element being built.
template <typename Fn>
auto rewrap(const std::string& path, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

Distribution parse_spec(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const json& jt = member(j, "type", path);
    if (!jt.is_string()) fail(path + ".type", "expected a string");
    const std::string type = jt.get<std::string>();

    if (type == "normal") {
        const double mu = number_at(member(j, "mu", path), path + ".mu");
        const double sigma = number_at(member(j, "sigma", path), path + ".sigma");
        return rewrap(path, [&] { return Distribution(Normal{mu, sigma}); });
    }
    if (type == "uniform") {
        const double a = number_at(member(j, "a", path), path + ".a");
        const double b = number_at(member(j, "b", path), path + ".b");
        return rewrap(path, [&] { return Distribution(Uniform{a, b}); });
    }
    if (type == "mixture") {
        const json& jc = member(j, "components", path);
        const std::string cpath = path + ".components";
        if (!jc.is_array() || jc.empty()) fail(cpath, "expected a nonempty array");
        Mixture m;
        m.components.reserve(jc.size());
        for (std::size_t i = 0; i < jc.size(); ++i) {
            const std::string ipath = cpath + "[" + std::to_string(i) + "]";
            const json& entry = jc[i];
            if (!entry.is_array() || entry.size() != 2) {
                fail(ipath, "expected a [weight, spec] pair");
            }
            const double w = number_at(entry[0], ipath + "[0]");
            m.components.emplace_back(w, parse_spec(entry[1], ipath + "[1]"));
        }
        return rewrap(path, [&] { return Distribution(std::move(m)); });
    }
    if (type == "piecewise_quantile") {
        const auto levels =
            number_array(member(j, "levels", path), path + ".levels");
        const auto values =
            number_array(member(j, "values", path), path + ".values");
        auto mode = Distribution::Interp::linear;
        if (const auto it = j.find("mode"); it != j.end()) {
            if (!it->is_string()) fail(path + ".mode", "expected a string");
            const std::string s = it->get<std::string>();
            if (s == "step") {
                mode = Distribution::Interp::step;
            } else if (s != "linear") {
                fail(path + ".mode",
                     "unknown mode \"" + s + "\" (use \"linear\" or \"step\")");
            }
        }
        return rewrap(path, [&] {
            return Distribution::piecewise_quantile(levels, values, mode);
        });
    }
    if (type == "empirical") {
        const auto samples =
            number_array(member(j, "samples", path), path + ".samples");
        return rewrap(path, [&] { return Distribution::empirical(samples); });
    }
    if (type == "histogram") {
        const auto edges = number_array(member(j, "edges", path), path + ".edges");
        const auto probs = number_array(member(j, "probs", path), path + ".probs");
        return rewrap(path, [&] { return Distribution::histogram(edges, probs); });
    }
    fail(path + ".type", "unknown type \"" + type + "\"");
}

json spec_json(const Distribution& d) {
    const auto& v = d.value();
    if (const auto* n = std::get_if<Normal>(&v)) {
        return json{{"type", "normal"}, {"mu", n->mu}, {"sigma", n->sigma}};
    }
    if (const auto* u = std::get_if<Uniform>(&v)) {
        return json{{"type", "uniform"}, {"a", u->a}, {"b", u->b}};
    }
    if (const auto* p = std::get_if<Polyline>(&v)) {
        return json{{"type", "piecewise_quantile"},
                    {"levels", p->levels()},
                    {"values", p->values()},
                    {"mode", "linear"}};
    }
    const auto& m = std::get<Mixture>(v);
    json comps = json::array();
    for (const auto& [w, c] : m.components) {
        comps.push_back(json::array({w, spec_json(c)}));
    }
    return json{{"type", "mixture"}, {"components", std::move(comps)}};
}

} // namespace

Distribution parse_distribution(const std::string& text) {
    return parse_spec(parse_json(text), "$");
}

std::string serialize_distribution(const Distribution& d) {
    return spec_json(d).dump();
}

Distribution parse_samples_csv(const std::string& text) {
    std::vector<double> samples;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        const std::string tok = line.substr(b, e - b + 1);
        if (tok[0] == '#') continue;
        const std::string where = "line " + std::to_string(line_no);
        double v = 0.0;
        const char* last = tok.data() + tok.size();
        const auto [ptr, ec] = std::from_chars(tok.data(), last, v);
        if (ec != std::errc{} || ptr != last) {
            fail(where, "not a number: \"" + tok + "\"");
        }
        if (!std::isfinite(v)) fail(where, "sample must be finite");
        samples.push_back(v);
    }
    if (samples.empty()) fail("input", "no sample values found");
    return rewrap("input", [&] { return Distribution::empirical(samples); });
}

// ---------------------------------------------------------------------------
// Histogram pairs
// ---------------------------------------------------------------------------

namespace {

HistogramSpec parse_hist_side(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const json& je = member(j, "edges", path);
    if (!je.is_array() || je.size() < 2) {
        fail(path + ".edges", "expected an array of at least 2 edges");
    }
    HistogramSpec h;
    h.edges.reserve(je.size());
    for (std::size_t i = 0; i < je.size(); ++i) {
        const std::string epath = path + ".edges[" + std::to_string(i) + "]";
        const json& cell = je[i];
        if (cell.is_null()) {
            if (i != 0 && i + 1 != je.size()) {
                fail(epath, "only the first or last edge may be open (null)");
            }
            h.edges.push_back(std::nullopt);
        } else {
            h.edges.push_back(number_at(cell, epath));
        }
    }
    h.probs = number_array(member(j, "probs", path), path + ".probs");
    if (h.probs.size() + 1 != h.edges.size()) {
        fail(path + ".probs", "expected exactly edges - 1 probabilities");
    }
    return h;
}

void require_arg(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

struct HistShape {
    bool open_lo = false;
    bool open_hi = false;
    double lo_bound = 0.0; // finite edge adjacent to an open lower bin
    double hi_bound = 0.0; // finite edge adjacent to an open upper bin
};

HistShape validate_histogram(const HistogramSpec& h) {
    require_arg(h.edges.size() >= 2, "histogram: needs at least one bin");
    require_arg(h.probs.size() + 1 == h.edges.size(),
                "histogram: edges must number one more than probs");
    for (std::size_t i = 1; i + 1 < h.edges.size(); ++i) {
        require_arg(h.edges[i].has_value(),
                    "histogram: only tail edges may be open");
    }
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& e : h.edges) {
        if (!e) continue;
        require_arg(std::isfinite(*e), "histogram: edges must be finite");
        require_arg(*e >= prev, "histogram: edges must be nondecreasing");
        prev = *e;
    }
    double sum = 0.0;
    for (const double p : h.probs) {
        require_arg(std::isfinite(p) && p >= 0.0,
                    "histogram: probabilities must be nonnegative");
        sum += p;
    }
    require_arg(std::fabs(sum - 1.0) <= 1e-9,
                "histogram: probabilities must sum to 1");
    bool any_closed = false;
    for (std::size_t i = 0; i + 1 < h.edges.size(); ++i) {
        if (h.edges[i] && h.edges[i + 1]) any_closed = true;
    }
    require_arg(any_closed, "histogram: needs at least one closed bin");
    HistShape s;
    s.open_lo = !h.edges.front().has_value();
    s.open_hi = !h.edges.back().has_value();
    if (s.open_lo) s.lo_bound = *h.edges[1];
    if (s.open_hi) s.hi_bound = *h.edges[h.edges.size() - 2];
    return s;
}

Distribution build_side(const HistogramSpec& h, const HistShape& s,
                        std::optional<double> lo_cap,
                        std::optional<double> hi_cap) {
    struct Bin {
        double lo, hi, mass;
    };
    std::vector<Bin> bins;
    bins.reserve(h.probs.size());
    for (std::size_t i = 0; i < h.probs.size(); ++i) {
        if (i == 0 && s.open_lo) {
            bins.push_back({*lo_cap, s.lo_bound, h.probs[i]});
        } else if (i + 1 == h.probs.size() && s.open_hi) {
            bins.push_back({s.hi_bound, *hi_cap, h.probs[i]});
        } else {
            bins.push_back({*h.edges[i], *h.edges[i + 1], h.probs[i]});
        }
    }
    std::vector<double> levels, values;
    levels.reserve(2 * bins.size());
    values.reserve(2 * bins.size());
    double cum = 0.0;
    for (const Bin& b : bins) {
        levels.push_back(std::min(cum, 1.0));
        values.push_back(b.lo);
        cum += b.mass;
        levels.push_back(std::min(cum, 1.0));
        values.push_back(b.hi);
    }
    levels.back() = 1.0; // absorb the 1e-9 slack in the probability sum
    return Distribution(Polyline(std::move(levels), std::move(values)));
}

} // namespace

HistogramPairSpec parse_histogram_pair(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object()) fail("$", "expected an object");
    HistogramPairSpec out;
    out.f = parse_hist_side(member(j, "f", "$"), "$.f");
    out.g = parse_hist_side(member(j, "g", "$"), "$.g");
    if (const auto it = j.find("truncation"); it != j.end()) {
        if (it->is_string()) {
            const std::string s = it->get<std::string>();
            if (s != "conservative" && s != "paper_conservative") {
                fail("$.truncation", "unknown truncation mode \"" + s + "\"");
            }
        } else if (it->is_object()) {
            if (const auto lo = it->find("lower");
                lo != it->end() && !lo->is_null()) {
                out.lower_bound = number_at(*lo, "$.truncation.lower");
            }
            if (const auto hi = it->find("upper");
                hi != it->end() && !hi->is_null()) {
                out.upper_bound = number_at(*hi, "$.truncation.upper");
            }
        } else {
            fail("$.truncation", "expected a mode string or a bounds object");
        }
    }
    return out;
}

std::pair<Distribution, Distribution> histogram_pair_to_distributions(
    const HistogramPairSpec& spec) {
    const HistShape sf = validate_histogram(spec.f);
    const HistShape sg = validate_histogram(spec.g);

    std::optional<double> f_hi, g_hi, f_lo, g_lo;

    if (spec.upper_bound) {
        const double T = *spec.upper_bound;
        require_arg(std::isfinite(T), "truncation: upper bound must be finite");
        if (sf.open_hi) {
            require_arg(sf.hi_bound <= T,
                        "truncation: upper bound below f's open-bin edge");
            f_hi = T;
        }
        if (sg.open_hi) {
            require_arg(sg.hi_bound <= T,
                        "truncation: upper bound below g's open-bin edge");
            g_hi = T;
        }
    } else if (sf.open_hi && sg.open_hi) {
        // Conservative cap: the larger finite bound. The histogram sitting
        // exactly at the cap contributes an atom there, the other spreads
        // its open mass up to the cap.
        const double T = std::max(sf.hi_bound, sg.hi_bound);
        f_hi = T;
        g_hi = T;
    } else if (sf.open_hi) {
        f_hi = sf.hi_bound; // lone open bin: zero-width atom at its own edge
    } else if (sg.open_hi) {
        g_hi = sg.hi_bound;
    }

    if (spec.lower_bound) {
        const double T = *spec.lower_bound;
        require_arg(std::isfinite(T), "truncation: lower bound must be finite");
        if (sf.open_lo) {
            require_arg(T <= sf.lo_bound,
                        "truncation: lower bound above f's open-bin edge");
            f_lo = T;
        }
        if (sg.open_lo) {
            require_arg(T <= sg.lo_bound,
                        "truncation: lower bound above g's open-bin edge");
            g_lo = T;
        }
    } else if (sf.open_lo && sg.open_lo) {
        const double T = std::min(sf.lo_bound, sg.lo_bound);
        f_lo = T;
        g_lo = T;
    } else if (sf.open_lo) {
        f_lo = sf.lo_bound;
    } else if (sg.open_lo) {
        g_lo = sg.lo_bound;
    }

    return {build_side(spec.f, sf, f_lo, f_hi),
            build_side(spec.g, sg, g_lo, g_hi)};
}

// ---------------------------------------------------------------------------
// Batch runs
// ---------------------------------------------------------------------------

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(p.string(), "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

DivergenceKind divergence_from_token(const std::string& s,
                                     const std::string& path) {
    if (s == "avm") return DivergenceKind::avm;
    if (s == "wd") return DivergenceKind::wdp;
    if (s == "cd") return DivergenceKind::cd;
    fail(path, "unknown divergence \"" + s + "\" (use avm, wd, or cd)");
}

void emit_cell(std::vector<BatchRow>& out, const std::string& id,
               DivergenceKind k, int p, const Distribution& F,
               const Distribution& G, const QuadratureConfig& cfg) {
    BatchRow r;
    r.id = id;
    r.kind = k;
    r.p = (k == DivergenceKind::wdp) ? p : 1;
    try {
        switch (k) {
            case DivergenceKind::avm: r.result = avm_decompose(F, G, cfg); break;
            case DivergenceKind::wdp: r.result = wd_decompose(F, G, p, cfg); break;
            case DivergenceKind::cd: r.result = cd_decompose(F, G, cfg); break;
        }
        r.ok = true;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
    }
    out.push_back(std::move(r));
}

} // namespace

std::vector<BatchRow> run_batch(const std::string& manifest_text,
                                const std::string& base_dir,
                                const QuadratureConfig& cfg) {
    const json m = parse_json(manifest_text);
    const json* rows = nullptr;
    std::string rows_path = "$";
    if (m.is_array()) {
        rows = &m;
    } else if (m.is_object() && m.contains("rows") && m["rows"].is_array()) {
        rows = &m.at("rows");
        rows_path = "$.rows";
    } else {
        fail("$", "manifest must be an array of rows or an object with a "
                  "\"rows\" array");
    }

    const std::filesystem::path base(base_dir);
    std::vector<BatchRow> out;

    for (std::size_t idx = 0; idx < rows->size(); ++idx) {
        const std::string rpath = rows_path + "[" + std::to_string(idx) + "]";
        const json& row = (*rows)[idx];
        std::string id = "row" + std::to_string(idx);
        try {
            if (!row.is_object()) fail(rpath, "expected an object");
            if (const auto it = row.find("id"); it != row.end()) {
                if (!it->is_string()) fail(rpath + ".id", "expected a string");
                id = it->get<std::string>();
            }

            auto resolve = [&base](const json& cell, const std::string& cpath) {
                if (!cell.is_string()) fail(cpath, "expected a file path string");
                std::filesystem::path p(cell.get<std::string>());
                if (p.is_relative()) p = base / p;
                return p;
            };
            auto load_pair = [&]() -> std::pair<Distribution, Distribution> {
                if (const auto it = row.find("pair"); it != row.end()) {
                    const auto p = resolve(*it, rpath + ".pair");
                    try {
                        return histogram_pair_to_distributions(
                            parse_histogram_pair(read_file(p)));
                    } catch (const std::invalid_argument& e) {
                        fail(p.string(), e.what());
                    } catch (const ParseError& e) {
                        if (e.path() == p.string()) throw;
                        fail(p.string(), e.what());
                    }
                }
                auto load_one = [&](const char* key) {
                    const auto p =
                        resolve(member(row, key, rpath), rpath + "." + key);
                    try {
                        return parse_distribution(read_file(p));
                    } catch (const ParseError& e) {
                        if (e.path() == p.string()) throw;
                        fail(p.string(), e.what());
                    }
                };
                return {load_one("f"), load_one("g")};
            };
            const auto [F, G] = load_pair();

            std::vector<DivergenceKind> divs = {
                DivergenceKind::avm, DivergenceKind::wdp, DivergenceKind::cd};
            if (const auto it = row.find("divergences"); it != row.end()) {
                const std::string dpath = rpath + ".divergences";
                if (!it->is_array() || it->empty()) {
                    fail(dpath, "expected a nonempty array");
                }
                divs.clear();
                for (std::size_t i = 0; i < it->size(); ++i) {
                    const json& cell = (*it)[i];
                    const std::string cpath =
                        dpath + "[" + std::to_string(i) + "]";
                    if (!cell.is_string()) fail(cpath, "expected a string");
                    divs.push_back(
                        divergence_from_token(cell.get<std::string>(), cpath));
                }
            }

            std::vector<int> ps = {2};
            if (const auto it = row.find("p"); it != row.end()) {
                const std::string ppath = rpath + ".p";
                if (!it->is_array() || it->empty()) {
                    fail(ppath, "expected a nonempty array of integers >= 1");
                }
                ps.clear();
                for (std::size_t i = 0; i < it->size(); ++i) {
                    const json& cell = (*it)[i];
                    const std::string cpath =
                        ppath + "[" + std::to_string(i) + "]";
                    if (!cell.is_number_integer() || cell.get<int>() < 1) {
                        fail(cpath, "expected an integer >= 1");
                    }
                    ps.push_back(cell.get<int>());
                }
            }

            for (const DivergenceKind k : divs) {
                if (k == DivergenceKind::wdp) {
                    for (const int p : ps) emit_cell(out, id, k, p, F, G, cfg);
                } else {
                    emit_cell(out, id, k, 1, F, G, cfg);
                }
            }
        } catch (const std::exception& e) {
            BatchRow r;
            r.id = id;
            r.ok = false;
            r.error = e.what();
            out.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace qdd
