#pragma once

// Config-driven entry point behind the lplab command line. A RunConfig is
// plain JSON; run() validates it, computes, and only then writes artifacts
// (each atomically) next to output.path:
//
//   <path>.json          report with embedded manifest
//   <path>_curve.csv     sweep curves          <path>_ratios.csv   per-pair ratios
//   <path>_field.{bin,csv} + sidecar           sampled kernels
//
// Exit codes: 0 pass, 2 validation error, 3 under-resolution, 4 verdict fail,
// 5 numerical self-check failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <fftw3.h>
#include <json.hpp>

#include "field_io.hpp"
#include "subordination.hpp"
#include "verifier.hpp"

namespace lplab::cli {

using nlohmann::json;

inline constexpr const char* version = "1.0.0";

enum ExitCode : int { exit_pass = 0, exit_validation = 2, exit_under_resolved = 3, exit_verdict_fail = 4,
                      exit_numerical = 5 };

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Exponent from JSON: a number or "inf".
inline double read_exponent(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "infinity") return inf;
        try {
            return std::stod(s);
        } catch (...) {
            throw ValidationError("bad exponent '" + s + "'");
        }
    }
    if (!j.is_number()) throw ValidationError("exponent must be a number or \"inf\"");
    return j.get<double>();
}

/// Parses "0.1,0.5,1", "2^-6..2^0" (unit steps in the exponent) or
/// "2^-6..2^0/4" (four points per octave). Tokens may be numbers or 2^x.
inline std::vector<double> parse_times(const std::string& text) {
    auto power_token = [](const std::string& tok) -> double {
        static const std::regex pow2(R"(^\s*2\^(-?[0-9.]+)\s*$)");
        std::smatch m;
        if (std::regex_match(tok, m, pow2)) return std::exp2(std::stod(m[1]));
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (tok.find_first_not_of(" \t", used) != std::string::npos) throw ValidationError("");
            return v;
        } catch (...) {
            throw ValidationError("bad time token '" + tok + "'");
        }
    };
    static const std::regex range(R"(^\s*2\^(-?[0-9.]+)\s*\.\.\s*2\^(-?[0-9.]+)\s*(?:/\s*([0-9]+))?\s*$)");
    std::smatch m;
    std::vector<double> out;
    if (std::regex_match(text, m, range)) {
        const double a = std::stod(m[1]), b = std::stod(m[2]);
        const int per = m[3].matched ? std::stoi(m[3]) : 1;
        if (per < 1 || b < a) throw ValidationError("bad time range '" + text + "'");
        const auto steps = static_cast<int>(std::lround((b - a) * per));
        for (int i = 0; i <= steps; ++i) out.push_back(std::exp2(a + static_cast<double>(i) / per));
    } else {
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(power_token(tok));
    }
    if (out.empty()) throw ValidationError("empty time list");
    for (double t : out)
        if (!(t > 0.0)) throw ValidationError("times must be positive");
    return out;
}

struct RunConfig {
    std::string command = "kernel";
    std::string subcommand;  // case name for verify, curve name for sweep
    int dim = 1;
    std::size_t N = 4096;
    double L = 40.0;
    std::uint64_t seed = 7;
    // space parameters (norm, sweep base)
    SpaceParams space{Scale::B, 0.0, 1.0, inf};
    // semigroup
    std::string family = "gw";
    double m = 1.0;
    double alpha = 1.0;
    std::string source = "spectral";
    std::vector<double> ts{1.0};
    double u = 1.0;
    // corpus
    std::size_t count = 50;
    std::vector<CorpusFamily> families = all_corpus_families();
    double band_limit = 16.0;
    std::size_t corpus_index = 0;
    std::string field_path;
    // verify
    InequalityCase inequality;
    bool refine = true;
    // subordinate
    std::string bernstein = "sqrt";
    std::size_t nodes = 4096;
    // report
    std::vector<std::string> inputs;
    // output
    std::string output_path = "lplab_out";
    std::string format = "json";       // report format: json, or csv (adds a flat key,value table)
    std::string field_format = "binary";
};

inline json space_to_json(const SpaceParams& sp) { return to_json(sp); }

inline SpaceParams space_from_json(const json& j, SpaceParams sp) {
    if (j.contains("A")) {
        const auto a = j.at("A").get<std::string>();
        if (a != "B" && a != "F") throw ValidationError("space scale A must be B or F");
        sp.scale = a == "B" ? Scale::B : Scale::F;
    }
    if (j.contains("s")) sp.s = j.at("s").get<double>();
    if (j.contains("p")) sp.p = read_exponent(j.at("p"));
    if (j.contains("q")) sp.q = read_exponent(j.at("q"));
    sp.validate();
    return sp;
}

inline json to_json(const RunConfig& c) {
    json families = json::array();
    for (auto f : c.families) families.push_back(to_string(f));
    json j = {{"command", c.command},
              {"subcommand", c.subcommand},
              {"grid", {{"dim", c.dim}, {"N", c.N}, {"L", c.L}}},
              {"seed", c.seed},
              {"space", space_to_json(c.space)},
              {"semigroup", {{"family", c.family}, {"m", c.m}, {"alpha", c.alpha}, {"source", c.source}}},
              {"t", c.ts},
              {"u", c.u},
              {"corpus", {{"count", c.count}, {"families", families}, {"band_limit", c.band_limit},
                          {"index", c.corpus_index}}},
              {"field", c.field_path},
              {"case", lplab::to_json(c.inequality)},
              {"refine", c.refine},
              {"subordinator", {{"bernstein", c.bernstein}, {"nodes", c.nodes}}},
              {"inputs", c.inputs},
              {"output", {{"path", c.output_path}, {"format", c.format}, {"field_format", c.field_format}}}};
    return j;
}

inline InequalityCase case_from_json(const json& j, const std::string& name) {
    InequalityCase c;
    c.kind = case_kind_by_name(j.value("case", name.empty() ? std::string("young") : name));
    if (!name.empty() && name != to_string(c.kind)) c.kind = case_kind_by_name(name);
    const auto a = j.value("A", std::string("B"));
    if (a != "B" && a != "F") throw ValidationError("case scale A must be B or F");
    c.scale = a == "B" ? Scale::B : Scale::F;
    c.s = j.value("s", 0.0);
    c.u = j.value("u", 0.0);
    c.p = j.contains("p") ? read_exponent(j.at("p")) : 1.0;
    c.q = j.contains("q") ? read_exponent(j.at("q")) : 1.0;
    c.p1 = j.contains("p1") ? read_exponent(j.at("p1")) : 1.0;
    c.q1 = j.contains("q1") ? read_exponent(j.at("q1")) : c.q;
    c.p2 = j.contains("p2") ? read_exponent(j.at("p2")) : 1.0;
    c.q2 = j.contains("q2") ? read_exponent(j.at("q2")) : 1.0;
    if (c.kind == CaseKind::conv_eq23) {
        c.p1 = c.p;
        c.q1 = c.q;
        c.p2 = 1.0;
        c.q2 = inf;
    }
    return c;
}

/// Fills defaults per case kind: claimed constants and tolerances.
inline void apply_case_defaults(InequalityCase& c, int dim) {
    switch (c.kind) {
    case CaseKind::young:
        c.constant_claim = 1.0;
        c.tolerance = 1e-12;
        break;
    case CaseKind::conv1:
        c.constant_claim = conv1_constant(c.p1, dim);
        c.tolerance = c.scale == Scale::B ? 1e-6 : 1e-4;
        break;
    case CaseKind::conv3:
    case CaseKind::conv_eq23:
        c.constant_claim.reset();
        break;
    }
}

inline RunConfig config_from_json(const json& j) {
    RunConfig c;
    try {
        c.command = j.value("command", c.command);
        c.subcommand = j.value("subcommand", c.subcommand);
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            c.dim = g.value("dim", c.dim);
            c.N = g.value("N", c.N);
            c.L = g.value("L", c.L);
        }
        c.seed = j.value("seed", c.seed);
        if (j.contains("space")) c.space = space_from_json(j.at("space"), c.space);
        if (j.contains("semigroup")) {
            const auto& s = j.at("semigroup");
            c.family = s.value("family", c.family);
            c.m = s.value("m", c.m);
            c.alpha = s.value("alpha", c.alpha);
            c.source = s.value("source", c.source);
        }
        if (j.contains("t")) {
            const auto& t = j.at("t");
            if (t.is_string()) c.ts = parse_times(t.get<std::string>());
            else if (t.is_number()) c.ts = {t.get<double>()};
            else c.ts = t.get<std::vector<double>>();
        }
        c.u = j.value("u", c.u);
        if (j.contains("corpus")) {
            const auto& k = j.at("corpus");
            c.count = k.value("count", c.count);
            c.band_limit = k.value("band_limit", c.band_limit);
            c.corpus_index = k.value("index", c.corpus_index);
            if (k.contains("families")) {
                c.families.clear();
                for (const auto& f : k.at("families")) c.families.push_back(corpus_family_by_name(f.get<std::string>()));
            }
        }
        c.field_path = j.value("field", c.field_path);
        c.inequality = case_from_json(j.value("case", json::object()), c.command == "verify" ? c.subcommand : "");
        c.refine = j.value("refine", c.refine);
        if (j.contains("subordinator")) {
            const auto& s = j.at("subordinator");
            c.bernstein = s.value("bernstein", c.bernstein);
            c.nodes = s.value("nodes", c.nodes);
        }
        c.inputs = j.value("inputs", c.inputs);
        if (j.contains("output")) {
            const auto& o = j.at("output");
            c.output_path = o.value("path", c.output_path);
            c.format = o.value("format", c.format);
            c.field_format = o.value("field_format", c.field_format);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed config: ") + e.what());
    }
    apply_case_defaults(c.inequality, c.dim);
    return c;
}

inline SemigroupSpec semigroup_from_config(const RunConfig& c) {
    if (c.family == "gw") return gauss_weierstrass();
    if (c.family == "gen-gw") return generalized_gw(c.m);
    if (c.family == "cauchy") return cauchy_poisson();
    if (c.family == "stable") return stable(c.alpha);
    if (c.family == "gamma") return gamma_semigroup();
    throw ValidationError("unknown semigroup family '" + c.family + "' (gw, gen-gw, cauchy, stable, gamma)");
}

inline void validate_config(const RunConfig& c) {
    static const std::vector<std::string> commands{"kernel", "norm", "verify", "sweep", "subordinate", "report"};
    if (std::find(commands.begin(), commands.end(), c.command) == commands.end())
        throw ValidationError("unknown command '" + c.command + "'");
    if (c.format != "json" && c.format != "csv") throw ValidationError("output format must be json or csv");
    if (c.field_format != "binary" && c.field_format != "csv")
        throw ValidationError("field format must be binary or csv");
    if (c.command == "report") return;
    const Grid grid(c.dim, c.N, c.L);
    if (c.command == "verify") validate_case(c.inequality);
    if (c.command == "kernel" || c.command == "sweep") {
        const auto spec = semigroup_from_config(c);
        if (c.source == "spectral" || c.command == "sweep") {
            const double t_min = *std::min_element(c.ts.begin(), c.ts.end());
            const double needed = min_resolvable_time(spec, grid);
            if (t_min < needed) {
                std::ostringstream os;
                os << "kernel under-resolved at this t: smallest t = " << t_min << " needs t >= " << needed << " on "
                   << grid.describe();
                throw UnderResolvedError(os.str());
            }
        } else if (c.source != "closed") {
            throw ValidationError("kernel source must be spectral or closed");
        }
    }
    if (c.command == "sweep" && c.subcommand != "smoothing" && c.subcommand != "semi11")
        throw ValidationError("sweep curve must be smoothing or semi11");
    if (c.command == "subordinate" && c.bernstein != "sqrt")
        throw ValidationError("only the sqrt Bernstein function has a built-in subordinator density");
}

/// Tolerances in force, embedded in every report.
inline json tolerances() {
    return {{"under_resolution", under_resolution_threshold},
            {"laplace", laplace_tolerance},
            {"mass", mass_tolerance},
            {"moment_tail", moment_tail_tolerance},
            {"degenerate_rhs", degenerate_rhs},
            {"young", 1e-12},
            {"conv1_B", 1e-6},
            {"conv1_F", 1e-4},
            {"refinement_stability", 0.05}};
}

inline json manifest(const RunConfig& c) {
    const json cfg = to_json(c);
    return {{"config", cfg},
            {"config_hash", hex64(fnv1a(cfg.dump()))},
            {"versions", {{"lplab", std::string(version)}, {"fftw", std::string(fftw_version)}}},
            {"tolerances", tolerances()}};
}

/// Files produced by one run; written only after all computation succeeded.
struct Artifacts {
    std::vector<std::pair<std::string, std::string>> texts;
    std::vector<std::pair<std::string, SampledField>> fields;
    io::FieldFormat field_format = io::FieldFormat::binary;

    void commit() const {
        for (const auto& [path, body] : texts) {
            const auto parent = std::filesystem::path(path).parent_path();
            if (!parent.empty()) std::filesystem::create_directories(parent);
            io::write_text_atomically(path, body);
        }
        for (const auto& [path, field] : fields) {
            const auto parent = std::filesystem::path(path).parent_path();
            if (!parent.empty()) std::filesystem::create_directories(parent);
            io::write_field(field, path, field_format);
        }
    }
};

namespace detail {

inline std::string csv_number(double v) { return io::format_double(v); }

inline std::string field_path(const RunConfig& c) {
    return c.output_path + (c.field_format == "binary" ? "_field.bin" : "_field.csv");
}

inline void flatten(const json& j, const std::string& prefix, std::ostringstream& os) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", os);
    } else {
        os << prefix << ',' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
    }
}

inline SampledField corpus_field(const RunConfig& c, const Grid& grid) {
    CorpusSpec spec{c.seed, c.corpus_index + 1, c.families, c.band_limit};
    return generate_corpus(spec, grid).back();
}

inline int run_kernel(const RunConfig& c, json& report, Artifacts& out) {
    const Grid grid(c.dim, c.N, c.L);
    const auto spec = semigroup_from_config(c);
    json rows = json::array();
    for (std::size_t i = 0; i < c.ts.size(); ++i) {
        const double t = c.ts[i];
        const SampledField p = c.source == "closed" ? closed_form_kernel(spec, t, grid) : spectral_kernel(spec, t, grid);
        rows.push_back(lplab::to_json(diagnose_kernel(p, t)));
        if (i == 0) out.fields.emplace_back(field_path(c), p);
    }
    report["semigroup"] = {{"family", c.family}, {"symbol", spec.symbol_name}, {"markovian", spec.markovian}};
    report["diagnostics"] = c.ts.size() == 1 ? rows[0] : rows;
    return exit_pass;
}

inline int run_norm(const RunConfig& c, json& report, Artifacts& out) {
    SampledField f = c.field_path.empty() ? corpus_field(c, Grid(c.dim, c.N, c.L)) : io::read_field(c.field_path);
    if (f.domain() == Domain::frequency) f = inverse_transform(f);
    const auto res = build_resolution(f.grid());
    const NormResult r = space_norm(f, res, c.space);
    report["norm"] = lplab::to_json(r);
    report["lp_norm"] = lp_norm(f, c.space.p);
    std::ostringstream csv;
    csv << "k,block_term\n";
    for (std::size_t k = 0; k < r.block_terms.size(); ++k) csv << k << ',' << csv_number(r.block_terms[k]) << '\n';
    out.texts.emplace_back(c.output_path + "_blocks.csv", csv.str());
    return exit_pass;
}

inline int run_verify(const RunConfig& c, json& report, Artifacts& out) {
    const Grid grid(c.dim, c.N, c.L);
    const CorpusSpec cf{c.seed, c.count, c.families, c.band_limit};
    const CorpusSpec cg{c.seed + 1, c.count, c.families, c.band_limit};
    const bool needs_refine = !c.inequality.constant_claim.has_value();
    const VerificationReport rep =
        needs_refine && c.refine
            ? check_inequality_refined(c.inequality, cf, cg, grid)
            : check_inequality(c.inequality, generate_corpus(cf, grid), generate_corpus(cg, grid), build_resolution(grid));
    report["report"] = lplab::to_json(rep);
    std::ostringstream csv;
    csv << "pair,ratio\n";
    for (std::size_t i = 0; i < rep.ratios.size(); ++i) csv << i << ',' << csv_number(rep.ratios[i]) << '\n';
    out.texts.emplace_back(c.output_path + "_ratios.csv", csv.str());
    return rep.verdict == Verdict::pass ? exit_pass : exit_verdict_fail;
}

inline int run_sweep(const RunConfig& c, json& report, Artifacts& out) {
    const Grid grid(c.dim, c.N, c.L);
    const KernelFamily fam(semigroup_from_config(c), grid);
    const auto res = build_resolution(grid);
    std::ostringstream csv;
    if (c.subcommand == "semi11") {
        const Semi11Report rep = theorem_semi11_bound_check(fam, c.u, c.ts, res);
        csv << "t,lhs,rhs,ratio,window_monotone\n";
        for (const auto& r : rep.rows)
            csv << csv_number(r.t) << ',' << csv_number(r.lhs) << ',' << csv_number(r.rhs) << ','
                << csv_number(r.ratio) << ',' << (r.window_monotone ? 1 : 0) << '\n';
        report["empirical_C"] = rep.empirical_C;
        if (c.ts.size() >= 4) {
            report["lhs_fit"] = lplab::to_json(rep.lhs_fit);
            report["rhs_fit"] = lplab::to_json(rep.rhs_fit);
        }
        report["verdict"] = to_string(rep.verdict);
    } else {
        const SampledField f = corpus_field(c, grid);
        const SmoothingSweep sw = smoothing_sweep(fam, f, c.space, c.u, c.ts, res);
        std::vector<double> grads(c.ts.size());
        for (std::size_t i = 0; i < c.ts.size(); ++i) grads[i] = gradient_l1(*fam.kernel(c.ts[i]));
        csv << "t,norm,kernel_norm,contraction_bound,gradient_l1\n";
        for (std::size_t i = 0; i < sw.ts.size(); ++i)
            csv << csv_number(sw.ts[i]) << ',' << csv_number(sw.curve[i]) << ',' << csv_number(sw.kernel_curve[i])
                << ',' << csv_number(sw.bound_curve[i]) << ',' << csv_number(grads[i]) << '\n';
        report["fit"] = lplab::to_json(sw.kernel_fit);
        report["curve_fit"] = lplab::to_json(sw.fit);
        report["gradient_fit"] = lplab::to_json(fit_power_law(sw.ts, grads));
        report["base_norm"] = sw.base_norm;
    }
    out.texts.emplace_back(c.output_path + "_curve.csv", csv.str());
    return exit_pass;
}

inline int run_subordinate(const RunConfig& c, json& report, Artifacts& out) {
    const Grid grid(c.dim, c.N, c.L);
    const double t = c.ts.front();
    const SubordinatorDensity d = stable_half_density(t, default_nodes(t, c.nodes));
    const SampledField p = subordinate_kernel(d, grid);
    json residuals = json::array();
    for (const auto& [l, r] : d.laplace_residuals) residuals.push_back({{"lambda", l}, {"residual", r}});
    const MomentResult k = subordinator_moment(d, c.u);
    report["t"] = t;
    report["u"] = c.u;
    report["mass"] = integrate(p);
    report["density_mass"] = d.mass;
    report["K_t"] = k.value;
    report["K_t_tail_ratio"] = k.tail_ratio;
    report["laplace_check_residuals"] = residuals;
    out.fields.emplace_back(field_path(c), p);
    return exit_pass;
}

inline int run_report(const RunConfig& c, json& report, Artifacts&) {
    json entries = json::array();
    bool all_pass = true;
    std::vector<std::string> files;
    for (const auto& in : c.inputs) {
        if (std::filesystem::is_directory(in)) {
            for (const auto& e : std::filesystem::directory_iterator(in))
                if (e.path().extension() == ".json" && e.path().string().find("_field.") == std::string::npos)
                    files.push_back(e.path().string());
        } else {
            files.push_back(in);
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::ifstream is(path);
        if (!is) throw ValidationError("cannot read report " + path);
        json r;
        try {
            r = json::parse(is);
        } catch (const json::exception&) {
            continue;  // not a report
        }
        if (!r.contains("manifest")) continue;
        const int code = r.value("exit_code", 0);
        all_pass = all_pass && code == 0;
        entries.push_back({{"file", std::filesystem::path(path).filename().string()},
                           {"command", r["manifest"]["config"].value("command", "")},
                           {"config_hash", r["manifest"].value("config_hash", "")},
                           {"exit_code", code}});
    }
    report["runs"] = entries;
    report["all_pass"] = all_pass;
    return all_pass ? exit_pass : exit_verdict_fail;
}

} // namespace detail

inline json error_object(const std::string& kind, const std::string& message, int code) {
    return {{"error", {{"type", kind}, {"message", message}, {"exit_code", code}}}};
}

/// Validates, computes, writes artifacts. Returns the exit code; the report
/// (or error object) is also returned through `report`.
inline int run(const RunConfig& c, json& report) {
    try {
        validate_config(c);
        report = json::object();
        report["manifest"] = manifest(c);
        Artifacts out;
        out.field_format = c.field_format == "binary" ? io::FieldFormat::binary : io::FieldFormat::csv;
        int code = exit_pass;
        if (c.command == "kernel") code = detail::run_kernel(c, report, out);
        else if (c.command == "norm") code = detail::run_norm(c, report, out);
        else if (c.command == "verify") code = detail::run_verify(c, report, out);
        else if (c.command == "sweep") code = detail::run_sweep(c, report, out);
        else if (c.command == "subordinate") code = detail::run_subordinate(c, report, out);
        else code = detail::run_report(c, report, out);
        report["exit_code"] = code;
        out.texts.emplace_back(c.output_path + ".json", report.dump(2) + "\n");
        if (c.format == "csv") {
            std::ostringstream flat;
            flat << "key,value\n";
            detail::flatten(report, "", flat);
            out.texts.emplace_back(c.output_path + ".csv", flat.str());
        }
        out.commit();
        return code;
    } catch (const ValidationError& e) {
        report = error_object("validation", e.what(), exit_validation);
        return exit_validation;
    } catch (const UnderResolvedError& e) {
        report = error_object("under_resolved", e.what(), exit_under_resolved);
        return exit_under_resolved;
    } catch (const NumericalError& e) {
        report = error_object("numerical", e.what(), exit_numerical);
        return exit_numerical;
    } catch (const std::filesystem::filesystem_error& e) {
        report = error_object("validation", e.what(), exit_validation);
        return exit_validation;
    }
}

inline int run(const json& config, json& report) {
    try {
        return run(config_from_json(config), report);
    } catch (const ValidationError& e) {
        report = error_object("validation", e.what(), exit_validation);
        return exit_validation;
    }
}

} // namespace lplab::cli
