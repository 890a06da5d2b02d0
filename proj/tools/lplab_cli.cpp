// lplab command line: kernel, norm, verify, sweep, subordinate, report.
//
//   lplab kernel --family gw --t 1 --dim 1 --N 4096 --L 40
//   lplab verify young --seed 7
//   lplab sweep smoothing --family gen-gw --m 2 --u 1 --t 2^-6..2^0
//
// Flags override values from --config. The report goes to <out>.json and is
// echoed on stdout; errors are printed as a JSON object on stdout.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "lplab/cli.hpp"

namespace {

using nlohmann::json;

struct Flags {
    std::string config;
    int dim = 1;
    std::size_t N = 0;
    double L = 0;
    std::uint64_t seed = 0;
    std::string out, format, field_format;
    std::string family, source, t, bernstein, field;
    double m = 0, alpha = 0, u = 0, band_limit = 0;
    std::size_t count = 0, index = 0, nodes = 0;
    std::string A = "B", s, p, q, p1, q1, p2, q2, cs, cu;
    std::vector<std::string> families, inputs;
    bool no_refine = false;
    std::string positional;
    std::multimap<std::string, CLI::Option*> opts;
};

void add_common(CLI::App* app, Flags& f) {
    f.opts.emplace("config", app->add_option("--config", f.config, "JSON run config"));
    f.opts.emplace("dim", app->add_option("--dim", f.dim, "grid dimension (1-3)"));
    f.opts.emplace("N", app->add_option("--N", f.N, "samples per axis (power of two >= 64)"));
    f.opts.emplace("L", app->add_option("--L", f.L, "box half width"));
    f.opts.emplace("seed", app->add_option("--seed", f.seed, "corpus seed"));
    f.opts.emplace("out", app->add_option("--out", f.out, "output path prefix"));
    f.opts.emplace("format", app->add_option("--format", f.format, "report format: json or csv"));
    f.opts.emplace("field_format", app->add_option("--field-format", f.field_format, "field format: binary or csv"));
}

void add_semigroup(CLI::App* app, Flags& f) {
    f.opts.emplace("family", app->add_option("--family", f.family, "gw, gen-gw, cauchy, stable, gamma"));
    f.opts.emplace("m", app->add_option("--m", f.m, "order of the generalized Gauss-Weierstrass semigroup"));
    f.opts.emplace("alpha", app->add_option("--alpha", f.alpha, "stable index"));
    f.opts.emplace("t", app->add_option("--t", f.t, "times: list, or range 2^a..2^b[/k]"));
    f.opts.emplace("u", app->add_option("--u", f.u, "smoothness gain"));
}

void add_space(CLI::App* app, Flags& f) {
    f.opts.emplace("A", app->add_option("--A", f.A, "scale B or F"));
    f.opts.emplace("s", app->add_option("--s", f.s, "smoothness"));
    f.opts.emplace("p", app->add_option("--p", f.p, "integrability (number or inf)"));
    f.opts.emplace("q", app->add_option("--q", f.q, "summability (number or inf)"));
}

void add_corpus(CLI::App* app, Flags& f) {
    f.opts.emplace("count", app->add_option("--count", f.count, "corpus size"));
    f.opts.emplace("families", app->add_option("--families", f.families, "corpus families"));
    f.opts.emplace("band_limit", app->add_option("--band-limit", f.band_limit, "corpus band limit"));
    f.opts.emplace("index", app->add_option("--corpus-index", f.index, "corpus member used as input field"));
}

bool given(const Flags& f, const std::string& key) {
    const auto [lo, hi] = f.opts.equal_range(key);
    for (auto it = lo; it != hi; ++it)
        if (it->second->count() > 0) return true;
    return false;
}

json exponent(const std::string& s) { return s == "inf" ? json("inf") : json(std::stod(s)); }

json build_config(const std::string& command, const Flags& f) {
    json c = json::object();
    if (!f.config.empty()) {
        std::ifstream in(f.config);
        if (!in) throw lplab::ValidationError("cannot read config " + f.config);
        try {
            c = json::parse(in);
        } catch (const json::exception& e) {
            throw lplab::ValidationError(std::string("config is not valid JSON: ") + e.what());
        }
    }
    c["command"] = command;
    if (!f.positional.empty()) c["subcommand"] = f.positional;
    if (given(f, "dim")) c["grid"]["dim"] = f.dim;
    if (given(f, "N")) c["grid"]["N"] = f.N;
    if (given(f, "L")) c["grid"]["L"] = f.L;
    if (given(f, "seed")) c["seed"] = f.seed;
    if (given(f, "out")) c["output"]["path"] = f.out;
    if (given(f, "format")) c["output"]["format"] = f.format;
    if (given(f, "field_format")) c["output"]["field_format"] = f.field_format;
    if (given(f, "family")) c["semigroup"]["family"] = f.family;
    if (given(f, "m")) c["semigroup"]["m"] = f.m;
    if (given(f, "alpha")) c["semigroup"]["alpha"] = f.alpha;
    if (given(f, "source")) c["semigroup"]["source"] = f.source;
    if (given(f, "t")) c["t"] = f.t;
    if (given(f, "u")) c["u"] = f.u;
    if (given(f, "count")) c["corpus"]["count"] = f.count;
    if (given(f, "families")) c["corpus"]["families"] = f.families;
    if (given(f, "band_limit")) c["corpus"]["band_limit"] = f.band_limit;
    if (given(f, "index")) c["corpus"]["index"] = f.index;
    if (given(f, "field")) c["field"] = f.field;
    if (given(f, "bernstein")) c["subordinator"]["bernstein"] = f.bernstein;
    if (given(f, "nodes")) c["subordinator"]["nodes"] = f.nodes;
    if (given(f, "inputs")) c["inputs"] = f.inputs;
    if (given(f, "no_refine")) c["refine"] = false;
    const std::string space_key = command == "verify" ? "case" : "space";
    if (given(f, "A")) c[space_key]["A"] = f.A;
    if (given(f, "s")) c[space_key]["s"] = std::stod(f.s);
    if (given(f, "p")) c[space_key]["p"] = exponent(f.p);
    if (given(f, "q")) c[space_key]["q"] = exponent(f.q);
    if (command == "verify") {
        if (given(f, "cu")) c["case"]["u"] = std::stod(f.cu);
        if (given(f, "p1")) c["case"]["p1"] = exponent(f.p1);
        if (given(f, "q1")) c["case"]["q1"] = exponent(f.q1);
        if (given(f, "p2")) c["case"]["p2"] = exponent(f.p2);
        if (given(f, "q2")) c["case"]["q2"] = exponent(f.q2);
    }
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lplab: Littlewood-Paley norms, semigroup kernels and convolution inequality checks"};
    app.require_subcommand(1);
    Flags f;

    auto* kernel = app.add_subcommand("kernel", "sample a semigroup kernel and report its diagnostics");
    add_common(kernel, f);
    add_semigroup(kernel, f);
    f.opts.emplace("source", kernel->add_option("--source", f.source, "spectral or closed"));

    auto* norm = app.add_subcommand("norm", "Besov / Triebel-Lizorkin norm of a field");
    add_common(norm, f);
    add_space(norm, f);
    add_corpus(norm, f);
    f.opts.emplace("field", norm->add_option("--field", f.field, "field file (with .json sidecar)"));

    auto* verify = app.add_subcommand("verify", "check a convolution inequality on a seeded corpus");
    add_common(verify, f);
    add_corpus(verify, f);
    add_space(verify, f);
    verify->add_option("case", f.positional, "young, conv1, conv3 or conv_eq23")->required();
    f.opts.emplace("cu", verify->add_option("--u", f.cu, "smoothness of g"));
    f.opts.emplace("p1", verify->add_option("--p1", f.p1));
    f.opts.emplace("q1", verify->add_option("--q1", f.q1));
    f.opts.emplace("p2", verify->add_option("--p2", f.p2));
    f.opts.emplace("q2", verify->add_option("--q2", f.q2));
    f.opts.emplace("no_refine", verify->add_flag("--no-refine", f.no_refine, "skip the N-doubling run"));

    auto* sweep = app.add_subcommand("sweep", "smoothing-rate or kernel-bound sweep over t");
    add_common(sweep, f);
    add_semigroup(sweep, f);
    add_space(sweep, f);
    add_corpus(sweep, f);
    sweep->add_option("curve", f.positional, "smoothing or semi11")->required();

    auto* sub = app.add_subcommand("subordinate", "subordinate kernel for g(lambda) = sqrt(lambda)");
    add_common(sub, f);
    add_semigroup(sub, f);
    f.opts.emplace("bernstein", sub->add_option("--g", f.bernstein, "Bernstein function (sqrt)"));
    f.opts.emplace("nodes", sub->add_option("--nodes", f.nodes, "quadrature nodes"));

    auto* report = app.add_subcommand("report", "aggregate earlier run reports");
    add_common(report, f);
    f.opts.emplace("inputs", report->add_option("inputs", f.inputs, "report files or directories")->required());

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : lplab::cli::exit_validation;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    json out;
    int code = 0;
    try {
        code = lplab::cli::run(build_config(command, f), out);
    } catch (const lplab::ValidationError& e) {
        out = lplab::cli::error_object("validation", e.what(), lplab::cli::exit_validation);
        code = lplab::cli::exit_validation;
    } catch (const std::invalid_argument& e) {
        out = lplab::cli::error_object("validation", e.what(), lplab::cli::exit_validation);
        code = lplab::cli::exit_validation;
    }
    std::cout << out.dump(2) << '\n';
    return code;
}
