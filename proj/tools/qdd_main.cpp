// Command-line front end. Subcommands:
//   compute    decompose one divergence between two distribution files
//   orders     run all six order checkers plus the component bridge
//   spreadplot export per-level central intervals and component attribution
//   batch      run a JSON manifest of pairs
//   selftest   run the built-in validation batteries
//
// Exit codes: 0 success, 1 self-test failure, 2 parse/usage error,
// 3 numeric error. Data goes to stdout (or --out), diagnostics to stderr.

#include "qdd/closed_forms.hpp"
#include "qdd/decompose.hpp"
#include "qdd/io.hpp"
#include "qdd/orders.hpp"
#include "qdd/validation.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using nlohmann::ordered_json;

struct CliConfig {
    std::string divergence = "avm";
    int p = 2;
    std::string f_path;
    std::string g_path;
    std::string manifest_path;
    int grid = 0;  // 0 keeps the method default
    int grid2 = 0;
    std::string output;    // empty picks the subcommand default
    std::string out_path;  // empty writes to stdout
};

std::string output_format(const CliConfig& c, const char* def) {
    return c.output.empty() ? def : c.output;
}

qdd::QuadratureConfig make_quadrature(const CliConfig& c) {
    qdd::QuadratureConfig q;
    if (c.grid > 0) q.n_single = c.grid;
    if (c.grid2 > 0) q.n_double = c.grid2;
    return q;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qdd::ParseError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

bool has_extension(const std::string& path, const char* ext) {
    return std::filesystem::path(path).extension() == ext;
}

qdd::Distribution load_distribution(const std::string& path) {
    const std::string text = read_file(path);
    try {
        if (has_extension(path, ".csv")) return qdd::parse_samples_csv(text);
        return qdd::parse_distribution(text);
    } catch (const qdd::ParseError& e) {
        throw qdd::ParseError(path, e.what());
    }
}

void write_output(const CliConfig& c, const std::string& text) {
    if (c.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(c.out_path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error(c.out_path + ": cannot write output");
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// --------------------------------------------------------------------------
// compute
// --------------------------------------------------------------------------

int cmd_compute(const CliConfig& c) {
    const qdd::Distribution f = load_distribution(c.f_path);
    const qdd::Distribution g = load_distribution(c.g_path);
    const qdd::QuadratureConfig q = make_quadrature(c);

    qdd::Decomposition d;
    if (c.divergence == "avm")
        d = qdd::avm_decompose(f, g, q);
    else if (c.divergence == "wd")
        d = qdd::wd_decompose(f, g, c.p, q);
    else
        d = qdd::cd_decompose(f, g, q);
    const int grid_used =
        d.kind == qdd::DivergenceKind::cd ? q.n_double : q.n_single;

    std::string text;
    if (output_format(c, "json") == "json") {
        ordered_json j;
        j["kind"] = qdd::divergence_kind_name(d.kind);
        if (d.kind == qdd::DivergenceKind::wdp) j["p"] = d.p;
        j["total"] = d.total;
        j["shift_plus"] = d.shift_plus;
        j["shift_minus"] = d.shift_minus;
        j["disp_plus"] = d.disp_plus;
        j["disp_minus"] = d.disp_minus;
        j["grid"] = grid_used;
        j["exact_path"] = d.exact_path;
        text = j.dump(2) + "\n";
    } else {
        std::ostringstream ss;
        ss << "kind\tp\ttotal\tshift_plus\tshift_minus\tdisp_plus\t"
              "disp_minus\tgrid\texact_path\n";
        ss << qdd::divergence_kind_name(d.kind) << '\t';
        if (d.kind == qdd::DivergenceKind::wdp) ss << d.p;
        ss << '\t' << fmt(d.total) << '\t' << fmt(d.shift_plus) << '\t'
           << fmt(d.shift_minus) << '\t' << fmt(d.disp_plus) << '\t'
           << fmt(d.disp_minus) << '\t' << grid_used << '\t'
           << (d.exact_path ? 1 : 0) << '\n';
        text = std::move(ss).str();
    }
    write_output(c, text);
    return 0;
}

// --------------------------------------------------------------------------
// orders
// --------------------------------------------------------------------------

ordered_json verdict_json(const qdd::OrderVerdict& v) {
    ordered_json j;
    j["holds"] = v.holds;
    j["strict_holds"] = v.strict_holds;
    j["assumption_violated"] = v.assumption_violated;
    j["witness"] = v.witness ? ordered_json(*v.witness) : ordered_json();
    j["witness2"] = v.witness2 ? ordered_json(*v.witness2) : ordered_json();
    return j;
}

int cmd_orders(const CliConfig& c) {
    const qdd::Distribution f = load_distribution(c.f_path);
    const qdd::Distribution g = load_distribution(c.g_path);
    const qdd::QuadratureConfig q = make_quadrature(c);

    auto check = [&](auto&& fn, int default_n) {
        return c.grid > 0 ? fn(f, g, c.grid, std::nullopt)
                          : fn(f, g, default_n, std::nullopt);
    };
    const qdd::OrderVerdict verdicts[] = {
        check([](auto&... a) { return qdd::check_stochastic(a...); }, 1024),
        check([](auto&... a) { return qdd::check_weak_stochastic(a...); },
              256),
        check([](auto&... a) { return qdd::check_relaxed_stochastic(a...); },
              1024),
        check([](auto&... a) { return qdd::check_strong_stochastic(a...); },
              1024),
        check([](auto&... a) { return qdd::check_dispersive(a...); }, 1024),
        check([](auto&... a) { return qdd::check_weak_dispersive(a...); },
              1024),
    };
    const qdd::BridgeReport bridge = qdd::order_component_bridge(f, g, q);

    std::string text;
    if (output_format(c, "json") == "json") {
        ordered_json j;
        ordered_json& orders = j["orders"];
        for (const qdd::OrderVerdict& v : verdicts)
            orders[qdd::order_relation_name(v.relation)] = verdict_json(v);
        ordered_json& b = j["bridge"];
        b["all_consistent"] = bridge.all_consistent;
        b["assumption_violated"] = bridge.assumption_violated;
        b["entries"] = ordered_json::array();
        for (const qdd::BridgeEntry& e : bridge.entries) {
            ordered_json ej;
            ej["relation"] = qdd::order_relation_name(e.relation);
            ej["divergence"] = qdd::divergence_kind_name(e.divergence);
            ej["component_value"] = e.component_value;
            ej["component_tol"] = e.component_tol;
            ej["component_zero"] = e.component_zero;
            ej["order_holds"] = e.order_holds;
            ej["consistent"] = e.consistent;
            b["entries"].push_back(std::move(ej));
        }
        text = j.dump(2) + "\n";
    } else {
        std::ostringstream ss;
        ss << "record\tname\tholds\tstrict_holds\tassumption_violated\t"
              "witness\twitness2\tdivergence\tcomponent_value\t"
              "component_zero\tconsistent\n";
        for (const qdd::OrderVerdict& v : verdicts) {
            ss << "order\t" << qdd::order_relation_name(v.relation) << '\t'
               << v.holds << '\t' << v.strict_holds << '\t'
               << v.assumption_violated << '\t'
               << (v.witness ? fmt(*v.witness) : "") << '\t'
               << (v.witness2 ? fmt(*v.witness2) : "") << "\t\t\t\t\n";
        }
        for (const qdd::BridgeEntry& e : bridge.entries) {
            ss << "bridge\t" << qdd::order_relation_name(e.relation) << '\t'
               << e.order_holds << "\t\t\t\t\t"
               << qdd::divergence_kind_name(e.divergence) << '\t'
               << fmt(e.component_value) << '\t' << e.component_zero << '\t'
               << e.consistent << '\n';
        }
        text = std::move(ss).str();
    }
    write_output(c, text);
    return 0;
}

// --------------------------------------------------------------------------
// spreadplot
// --------------------------------------------------------------------------

int cmd_spreadplot(const CliConfig& c) {
    const qdd::Distribution f = load_distribution(c.f_path);
    const qdd::Distribution g = load_distribution(c.g_path);
    const int levels = c.grid > 0 ? c.grid : 512;
    const qdd::SpreadPlotData data = qdd::spread_plot_data(f, g, levels);

    std::string text;
    if (output_format(c, "tsv") == "json") {
        ordered_json rows = ordered_json::array();
        for (const qdd::SpreadPlotRow& r : data.rows) {
            ordered_json j;
            j["alpha"] = r.alpha;
            j["f_lo"] = r.f_lo;
            j["f_hi"] = r.f_hi;
            j["g_lo"] = r.g_lo;
            j["g_hi"] = r.g_hi;
            j["shift_plus"] = r.shift_plus;
            j["shift_minus"] = r.shift_minus;
            j["disp_plus"] = r.disp_plus;
            j["disp_minus"] = r.disp_minus;
            rows.push_back(std::move(j));
        }
        text = ordered_json{{"rows", std::move(rows)}}.dump(2) + "\n";
    } else {
        std::ostringstream ss;
        ss << "alpha\tf_lo\tf_hi\tg_lo\tg_hi\tshift_plus\tshift_minus\t"
              "disp_plus\tdisp_minus\n";
        for (const qdd::SpreadPlotRow& r : data.rows) {
            ss << fmt(r.alpha) << '\t' << fmt(r.f_lo) << '\t' << fmt(r.f_hi)
               << '\t' << fmt(r.g_lo) << '\t' << fmt(r.g_hi) << '\t'
               << fmt(r.shift_plus) << '\t' << fmt(r.shift_minus) << '\t'
               << fmt(r.disp_plus) << '\t' << fmt(r.disp_minus) << '\n';
        }
        text = std::move(ss).str();
    }
    write_output(c, text);
    return 0;
}

// --------------------------------------------------------------------------
// batch
// --------------------------------------------------------------------------

int cmd_batch(const CliConfig& c) {
    const std::string manifest = read_file(c.manifest_path);
    const std::string base_dir =
        std::filesystem::path(c.manifest_path).parent_path().string();
    const std::vector<qdd::BatchRow> rows =
        qdd::run_batch(manifest, base_dir, make_quadrature(c));

    std::string text;
    if (output_format(c, "json") == "json") {
        ordered_json arr = ordered_json::array();
        for (const qdd::BatchRow& r : rows) {
            ordered_json j;
            j["id"] = r.id;
            j["kind"] = qdd::divergence_kind_name(r.kind);
            if (r.kind == qdd::DivergenceKind::wdp) j["p"] = r.p;
            j["ok"] = r.ok;
            if (r.ok) {
                j["total"] = r.result.total;
                j["shift_plus"] = r.result.shift_plus;
                j["shift_minus"] = r.result.shift_minus;
                j["disp_plus"] = r.result.disp_plus;
                j["disp_minus"] = r.result.disp_minus;
                j["exact_path"] = r.result.exact_path;
            } else {
                j["error"] = r.error;
            }
            arr.push_back(std::move(j));
        }
        text = arr.dump(2) + "\n";
    } else {
        std::ostringstream ss;
        ss << "id\tkind\tp\tok\ttotal\tshift_plus\tshift_minus\tdisp_plus\t"
              "disp_minus\texact_path\terror\n";
        for (const qdd::BatchRow& r : rows) {
            ss << r.id << '\t' << qdd::divergence_kind_name(r.kind) << '\t';
            if (r.kind == qdd::DivergenceKind::wdp) ss << r.p;
            ss << '\t' << r.ok << '\t';
            if (r.ok) {
                ss << fmt(r.result.total) << '\t' << fmt(r.result.shift_plus)
                   << '\t' << fmt(r.result.shift_minus) << '\t'
                   << fmt(r.result.disp_plus) << '\t'
                   << fmt(r.result.disp_minus) << '\t'
                   << (r.result.exact_path ? 1 : 0) << '\t';
            } else {
                ss << "\t\t\t\t\t\t";
            }
            std::string err = r.error;
            for (char& ch : err)
                if (ch == '\t' || ch == '\n') ch = ' ';
            ss << err << '\n';
        }
        text = std::move(ss).str();
    }
    write_output(c, text);
    return 0;
}

// --------------------------------------------------------------------------
// selftest
// --------------------------------------------------------------------------

int cmd_selftest(const CliConfig& c) {
    const std::vector<qdd::CheckResult> checks =
        qdd::validation::run_selftest(make_quadrature(c));
    int failed = 0;
    std::ostringstream ss;
    for (const qdd::CheckResult& r : checks) {
        ss << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail
           << '\n';
        if (!r.pass) ++failed;
    }
    ss << checks.size() << " checks, " << failed << " failed\n";
    write_output(c, std::move(ss).str());
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"decomposed divergences between one-dimensional "
                 "distributions"};
    app.require_subcommand(1);
    CliConfig c;

    auto add_pair_options = [&c](CLI::App* cmd) {
        cmd->add_option("-f,--f", c.f_path, "distribution file for F "
                                            "(JSON spec, or .csv samples)")
            ->required();
        cmd->add_option("-g,--g", c.g_path, "distribution file for G")
            ->required();
    };
    auto add_grid_options = [&c](CLI::App* cmd) {
        cmd->add_option("--grid", c.grid,
                        "single-integral grid size override");
        cmd->add_option("--grid2", c.grid2,
                        "double-integral grid size override");
    };
    auto add_output_options = [&c](CLI::App* cmd, const char* def) {
        cmd->add_option("--output", c.output,
                        std::string("output format (default ") + def + ")")
            ->check(CLI::IsMember({"json", "tsv"}));
        cmd->add_option("--out", c.out_path,
                        "write output to a file instead of stdout");
    };

    CLI::App* compute = app.add_subcommand(
        "compute", "decompose one divergence between two distributions");
    compute
        ->add_option("-d,--divergence", c.divergence,
                     "divergence to compute")
        ->check(CLI::IsMember({"avm", "wd", "cd"}))
        ->default_val("avm");
    compute->add_option("-p,--p", c.p, "power for wd (ignored otherwise)")
        ->check(CLI::PositiveNumber);
    add_pair_options(compute);
    add_grid_options(compute);
    add_output_options(compute, "json");

    CLI::App* orders = app.add_subcommand(
        "orders", "check all six order relations plus the component bridge");
    add_pair_options(orders);
    orders->add_option("--grid", c.grid, "checker grid size override");
    orders->add_option("--grid2", c.grid2,
                       "double-integral grid size override");
    add_output_options(orders, "json");

    CLI::App* spreadplot = app.add_subcommand(
        "spreadplot",
        "export central intervals and component attribution per level");
    add_pair_options(spreadplot);
    spreadplot->add_option("--grid", c.grid,
                           "number of coverage levels (default 512)");
    add_output_options(spreadplot, "tsv");

    CLI::App* batch =
        app.add_subcommand("batch", "run a JSON manifest of pairs");
    batch->add_option("-m,--manifest", c.manifest_path, "manifest file")
        ->required();
    add_grid_options(batch);
    add_output_options(batch, "json");

    CLI::App* selftest = app.add_subcommand(
        "selftest", "run the built-in validation batteries");
    add_grid_options(selftest);
    selftest->add_option("--out", c.out_path,
                         "write the report to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*compute) return cmd_compute(c);
        if (*orders) return cmd_orders(c);
        if (*spreadplot) return cmd_spreadplot(c);
        if (*batch) return cmd_batch(c);
        return cmd_selftest(c);
    } catch (const qdd::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::overflow_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
