#pragma once

// Command-line driver. Every analysis in the library is surfaced as a
// deterministic CSV table: '#'-prefixed metadata lines (version, conventions,
// the full resolved parameter set), one header row naming every column, then
// data rows. Identical invocations produce byte-identical files; output goes
// to stdout or, with -o, is written atomically (temp file + rename).
//
// Exit codes: 0 success, 2 argument/config errors, 3 numerical failure
// (e.g. no threshold crossing in the scan range).

#include <cvqc/cluster.hpp>
#include <cvqc/gates.hpp>
#include <cvqc/gkp.hpp>
#include <cvqc/mc.hpp>
#include <cvqc/repetition.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace cvqc::cli {

inline constexpr const char* version_string = "1.0.0";

// ---------------------------------------------------------------------------
// Formatting and CSV assembly
// ---------------------------------------------------------------------------

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class CsvWriter {
  public:
    void comment(const std::string& text) { buf_ += "# " + text + "\n"; }

    void header(std::initializer_list<std::string> cols) { line(cols); }
    void row(std::initializer_list<std::string> cells) { line(cells); }

    const std::string& text() const { return buf_; }

    // Write the table to `path`; empty or "-" means stdout. File output is
    // staged in a sibling temp file and renamed into place so a reader never
    // sees a half-written table.
    void write(const std::string& path) const {
        if (path.empty() || path == "-") {
            std::cout << buf_;
            return;
        }
        const std::string tmp = path + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw std::invalid_argument("cannot open output file: " + tmp);
            out << buf_;
            if (!out) throw std::invalid_argument("write failed: " + tmp);
        }
        if (std::rename(tmp.c_str(), path.c_str()) != 0) {
            std::remove(tmp.c_str());
            throw std::invalid_argument("cannot rename into place: " + path);
        }
    }

  private:
    void line(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const auto& c : cells) {
            if (!first) buf_ += ',';
            buf_ += c;
            first = false;
        }
        buf_ += '\n';
    }

    std::string buf_;
};

// ---------------------------------------------------------------------------
// Value parsing
// ---------------------------------------------------------------------------

inline double parse_double(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(what + ": expected a number, got '" + text + "'");
    }
    if (used != text.size())
        throw std::invalid_argument(what + ": trailing characters in '" + text + "'");
    return v;
}

// "a:b:c" (start:stop:step), "a:b" (step 0.1), or a single value "a".
struct DbRange {
    double start = 2.0;
    double stop = 20.0;
    double step = 0.1;

    std::vector<double> values() const {
        const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) out.push_back(start + step * i);
        return out;
    }
};

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

inline DbRange parse_range(const std::string& text) {
    const auto parts = split(text, ':');
    DbRange r;
    if (parts.size() == 1) {
        r.start = r.stop = parse_double(parts[0], "range");
        r.step = 1.0;
        return r;
    }
    if (parts.size() > 3) throw std::invalid_argument("range: expected start:stop[:step]");
    r.start = parse_double(parts[0], "range start");
    r.stop = parse_double(parts[1], "range stop");
    r.step = parts.size() == 3 ? parse_double(parts[2], "range step") : 0.1;
    if (!(r.step > 0.0)) throw std::invalid_argument("range: step must be > 0");
    if (r.stop < r.start) throw std::invalid_argument("range: stop must be >= start");
    return r;
}

inline std::pair<double, double> parse_scan(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw std::invalid_argument("scan: expected lo:hi");
    const double lo = parse_double(parts[0], "scan lo");
    const double hi = parse_double(parts[1], "scan hi");
    if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("scan: need 0 < lo < hi");
    return {lo, hi};
}

inline std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& part : split(text, ',')) {
        const double v = parse_double(part, "n");
        const int n = static_cast<int>(v);
        if (v != n || n < 1 || n % 2 == 0)
            throw std::invalid_argument("n: entries must be odd positive integers, got '" +
                                        part + "'");
        out.push_back(n);
    }
    return out;
}

inline NoiseModel parse_model(const std::string& text) {
    if (text == "gate-noise") return NoiseModel::gate_noise;
    if (text == "resource-only") return NoiseModel::resource_only;
    throw std::invalid_argument("model: expected gate-noise or resource-only");
}

inline SpikeConvention resolve_convention(const std::string& text, NoiseModel model) {
    if (text == "default") return default_convention(model);
    if (text == "half-shot") return SpikeConvention::half_shot;
    if (text == "full-shot") return SpikeConvention::full_shot;
    throw std::invalid_argument("convention: expected half-shot, full-shot or default");
}

inline McMode parse_mc_mode(const std::string& text) {
    if (text == "joint-physical" || text == "joint") return McMode::joint_physical;
    if (text == "independent-marginals" || text == "independent")
        return McMode::independent_marginals;
    throw std::invalid_argument("mode: expected joint-physical or independent-marginals");
}

inline std::string to_string(McMode m) {
    return m == McMode::joint_physical ? "joint-physical" : "independent-marginals";
}

// Aspect ratio override: "auto" selects the per-point optimum (length-1 codes
// stay square); a positive number pins R everywhere.
inline double parse_aspect(const std::string& text) {
    if (text == "auto") return 0.0;
    const double v = parse_double(text, "aspect-ratio");
    if (!(v > 0.0)) throw std::invalid_argument("aspect-ratio: must be > 0 or 'auto'");
    return v;
}

// ---------------------------------------------------------------------------
// Config files: plain `key = value` lines, '#' comments. Keys mirror the long
// option names of the subcommand; command-line flags override file values.
// ---------------------------------------------------------------------------

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<ConfigEntry> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::vector<ConfigEntry> entries;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: parse error at line " +
                                        std::to_string(lineno) + ": expected key = value");
        ConfigEntry e;
        e.key = trim(body.substr(0, eq));
        e.value = trim(body.substr(eq + 1));
        e.line = lineno;
        if (e.key.empty())
            throw std::invalid_argument("config: parse error at line " +
                                        std::to_string(lineno) + ": empty key");
        entries.push_back(std::move(e));
    }
    return entries;
}

// Parse `args` against `app`, honoring an optional `--config FILE`. File
// entries are validated against the app's long options and injected ahead of
// the explicit flags; every option uses take-last semantics, so explicit
// flags win. Records which file keys were overridden.
struct ParseContext {
    std::string config_path;
    std::vector<std::string> overridden;
};

inline ParseContext parse_with_config(CLI::App& app, const std::vector<std::string>& args) {
    ParseContext ctx;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& t = args[i];
        if (t == "--config") {
            if (i + 1 >= args.size())
                throw std::invalid_argument("--config requires a file path");
            ctx.config_path = args[++i];
        } else if (t.rfind("--config=", 0) == 0) {
            ctx.config_path = t.substr(9);
        } else {
            rest.push_back(t);
        }
    }

    std::vector<std::string> tokens;
    if (!ctx.config_path.empty()) {
        for (const auto& e : load_config(ctx.config_path)) {
            const std::string flag = "--" + e.key;
            if (app.get_option_no_throw(flag) == nullptr)
                throw std::invalid_argument("config: unknown key '" + e.key + "' at line " +
                                            std::to_string(e.line));
            tokens.push_back(flag + "=" + e.value);
            for (const auto& t : rest) {
                if (t == flag || t.rfind(flag + "=", 0) == 0) {
                    ctx.overridden.push_back(e.key);
                    break;
                }
            }
        }
    }
    tokens.insert(tokens.end(), rest.begin(), rest.end());

    std::vector<const char*> cargv;
    cargv.push_back("cvqc");
    for (const auto& t : tokens) cargv.push_back(t.c_str());
    app.parse(static_cast<int>(cargv.size()), cargv.data());
    return ctx;
}

// ---------------------------------------------------------------------------
// Shared emission helpers
// ---------------------------------------------------------------------------

inline void emit_metadata(CsvWriter& w, const std::string& command,
                          const std::vector<std::pair<std::string, std::string>>& params,
                          const ParseContext& ctx) {
    w.comment(std::string("cvqc version ") + version_string);
    w.comment("convention: vacuum variance = 1/2 (hbar = 1)");
    w.comment("command: " + command);
    std::string line = "parameters:";
    for (const auto& [k, v] : params) line += " " + k + "=" + v;
    w.comment(line);
    if (!ctx.config_path.empty()) w.comment("config-file: " + ctx.config_path);
    if (!ctx.overridden.empty()) {
        line = "config-overridden-by-flags:";
        for (const auto& k : ctx.overridden) line += " " + k;
        w.comment(line);
    }
}

struct SweepPoint {
    double aspect_ratio = 1.0;
    double px = 0.0;
    double pz = 0.0;
    double pe = 0.0;
    bool saturated = false;
};

// One operating point of the biased grid-code repetition pipeline. An
// override of 0 means "auto": optimize the aspect ratio for n > 1, keep the
// square code for n = 1.
inline SweepPoint evaluate_point(NoiseModel model, SpikeConvention conv, double db, int n,
                                 double aspect_override) {
    const auto sig = quadrature_sigmas(model, db, conv);
    SweepPoint out;
    if (aspect_override > 0.0) {
        out.aspect_ratio = aspect_override;
    } else if (n > 1) {
        const auto opt = optimize_aspect(n, sig);
        out.aspect_ratio = opt.aspect_ratio;
        out.saturated = opt.saturated;
    }
    out.px = gkp_odd_mass(sig.sigma_x, std::sqrt(pi / out.aspect_ratio));
    out.pz = gkp_odd_mass(sig.sigma_p, std::sqrt(pi * out.aspect_ratio));
    out.pe = logical_error_from_flip_probs(n, out.px, out.pz);
    return out;
}

struct Series {
    NoiseModel model;
    SpikeConvention convention;
    int n;
};

inline const char* long_columns =
    "squeezing_db,n,aspect_ratio,model,convention,p_x,p_z,pe,saturated";

inline void emit_long_rows(CsvWriter& w, const std::vector<double>& dbs,
                           const std::vector<Series>& series, double aspect_override) {
    w.header({"squeezing_db", "n", "aspect_ratio", "model", "convention", "p_x", "p_z", "pe",
              "saturated"});
    for (double db : dbs) {
        for (const auto& s : series) {
            const auto pt = evaluate_point(s.model, s.convention, db, s.n, aspect_override);
            w.row({fmt(db), std::to_string(s.n), fmt(pt.aspect_ratio), to_string(s.model),
                   to_string(s.convention), fmt(pt.px), fmt(pt.pz), fmt(pt.pe),
                   pt.saturated ? "1" : "0"});
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

namespace detail {

struct CommonOpts {
    std::string output;
    std::string config_dummy;  // registered so --config shows in help
};

inline void add_common(CLI::App& app, CommonOpts& c) {
    app.add_option("-o,--output", c.output, "output file (default: stdout)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--config", c.config_dummy,
                   "config file with `key = value` lines; flags override it")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

template <typename Body>
int run_subcommand(CLI::App& app, const std::vector<std::string>& args, Body&& body) {
    try {
        ParseContext ctx = parse_with_config(app, args);
        return body(ctx);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "cvqc: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace detail

inline int cmd_fig3(const std::vector<std::string>& args) {
    CLI::App app{
        "Inseparability sweep: quoted nullifier variances of the generated lattice "
        "against the certification bound, per squeezing level.\n"
        "CSV columns: squeezing_db, quoted_var_x, quoted_var_p, threshold, margin, pass, "
        "worst_bipartition_margin",
        "cvqc fig3"};
    detail::CommonOpts common;
    std::string range_str = "2:20:0.1";
    int delay_n = 10, k_bins = 24;
    bool wrap = false;
    app.add_option("--squeezing-db", range_str, "squeezing grid, dB (start:stop[:step])")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--delay-n", delay_n, "long-delay length in bins (lattice height)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--k-bins", k_bins, "number of emitted time bins")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_flag("--wrap", wrap, "periodic boundary (delays wrap modulo k-bins)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    detail::add_common(app, common);

    return detail::run_subcommand(app, args, [&](const ParseContext& ctx) {
        const DbRange range = parse_range(range_str);
        const int bin = delay_n + 1;  // first bin where the full check is in range
        CsvWriter w;
        emit_metadata(w, "fig3",
                      {{"squeezing-db", range_str},
                       {"delay-n", std::to_string(delay_n)},
                       {"k-bins", std::to_string(k_bins)},
                       {"wrap", wrap ? "1" : "0"},
                       {"anchor-bin", std::to_string(bin)}},
                      ctx);
        w.comment("min-inseparability-db: " +
                  fmt(min_inseparability_squeezing(delay_n, k_bins, wrap)));
        w.header({"squeezing_db", "quoted_var_x", "quoted_var_p", "threshold", "margin",
                  "pass", "worst_bipartition_margin"});
        for (double db : range.values()) {
            ClusterLattice lattice({delay_n, k_bins, db, wrap});
            const auto res = lattice.vlf_check(bin);
            const double margin =
                res.threshold - std::max(res.quoted_var_x, res.quoted_var_p);
            w.row({fmt(db), fmt(res.quoted_var_x), fmt(res.quoted_var_p),
                   fmt(res.threshold), fmt(margin), res.pass ? "1" : "0",
                   fmt(res.worst_margin)});
        }
        w.write(common.output);
        return 0;
    });
}

inline int cmd_fig5c(const std::vector<std::string>& args) {
    CLI::App app{
        "Squeezing budget: lattice nullifier quality and post-gate residuals versus the "
        "resource squeezing.\n"
        "CSV columns: resource_db, cluster_db, residual_x_db, residual_p_db",
        "cvqc fig5c"};
    detail::CommonOpts common;
    std::string range_str = "2:20:0.1";
    app.add_option("--squeezing-db", range_str, "resource squeezing grid, dB")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    detail::add_common(app, common);

    return detail::run_subcommand(app, args, [&](const ParseContext& ctx) {
        const DbRange range = parse_range(range_str);
        CsvWriter w;
        emit_metadata(w, "fig5c", {{"squeezing-db", range_str}}, ctx);
        w.header({"resource_db", "cluster_db", "residual_x_db", "residual_p_db"});
        for (double db : range.values()) {
            const auto b = noise_budget(db);
            w.row({fmt(b.resource_db), fmt(b.cluster_db), fmt(b.residual_x_db),
                   fmt(b.residual_p_db)});
        }
        w.write(common.output);
        return 0;
    });
}

inline int cmd_fig6c(const std::vector<std::string>& args) {
    CLI::App app{
        "Single grid-code qubit: error probabilities after one round of quadrature "
        "correction, square code (aspect ratio 1) by default.\n"
        "CSV columns: squeezing_db, aspect_ratio, p_success, p_err, p_x, p_z, p_y",
        "cvqc fig6c"};
    detail::CommonOpts common;
    std::string range_str = "2:20:0.1";
    std::string model_str = "gate-noise";
    std::string conv_str = "default";
    double aspect = 1.0;
    app.add_option("--squeezing-db", range_str, "squeezing grid, dB")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--model", model_str, "noise model")
        ->check(CLI::IsMember({"gate-noise", "resource-only"}))
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--convention", conv_str, "spike normalization (default: per model)")
        ->check(CLI::IsMember({"half-shot", "full-shot", "default"}))
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--aspect-ratio", aspect, "grid-code bias R")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    detail::add_common(app, common);

    return detail::run_subcommand(app, args, [&](const ParseContext& ctx) {
        const DbRange range = parse_range(range_str);
        const NoiseModel model = parse_model(model_str);
        const SpikeConvention conv = resolve_convention(conv_str, model);
        if (!(aspect > 0.0)) throw std::invalid_argument("aspect-ratio: must be > 0");
        CsvWriter w;
        emit_metadata(w, "fig6c",
                      {{"squeezing-db", range_str},
                       {"model", to_string(model)},
                       {"convention", to_string(conv)},
                       {"aspect-ratio", fmt(aspect)}},
                      ctx);
        w.header({"squeezing_db", "aspect_ratio", "p_success", "p_err", "p_x", "p_z",
                  "p_y"});
        for (double db : range.values()) {
            const auto sig = quadrature_sigmas(model, db, conv);
            const auto out = gkp_error_probs(aspect, sig.sigma_x, sig.sigma_p);
            w.row({fmt(db), fmt(aspect), fmt(out.success), fmt(1.0 - out.success),
                   fmt(out.px), fmt(out.pz), fmt(out.py)});
        }
        w.write(common.output);
        return 0;
    });
}

// Shared body of the repetition-code sweeps (fig7a/fig7b/sweep).
inline int repetition_sweep(const std::vector<std::string>& args, const std::string& name,
                            const std::string& fixed_model, const std::string& default_n) {
    const bool model_selectable = fixed_model.empty();
    CLI::App app{
        name + ": logical error of the biased grid-code repetition pipeline, aspect "
        "ratio optimized per point unless pinned.\nCSV columns: " + long_columns,
        "cvqc " + name};
    detail::CommonOpts common;
    std::string range_str = "2:20:0.1";
    std::string model_str = model_selectable ? "gate-noise" : fixed_model;
    std::string conv_str = "default";
    std::string n_str = default_n;
    std::string aspect_str = "auto";
    app.add_option("--squeezing-db", range_str, "squeezing grid, dB")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    if (model_selectable) {
        app.add_option("--model", model_str, "noise model")
            ->check(CLI::IsMember({"gate-noise", "resource-only"}))
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
    app.add_option("--convention", conv_str, "spike normalization (default: per model)")
        ->check(CLI::IsMember({"half-shot", "full-shot", "default"}))
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--n", n_str, "comma-separated odd repetition lengths")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--aspect-ratio", aspect_str, "grid-code bias R, or 'auto'")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    detail::add_common(app, common);

    return detail::run_subcommand(app, args, [&](const ParseContext& ctx) {
        const DbRange range = parse_range(range_str);
        const NoiseModel model = parse_model(model_str);
        const SpikeConvention conv = resolve_convention(conv_str, model);
        const double aspect = parse_aspect(aspect_str);
        std::vector<Series> series;
        for (int n : parse_n_list(n_str)) series.push_back({model, conv, n});

        CsvWriter w;
        emit_metadata(w, name,
                      {{"squeezing-db", range_str},
                       {"model", to_string(model)},
                       {"convention", to_string(conv)},
                       {"n", n_str},
                       {"aspect-ratio", aspect_str}},
                      ctx);
        try {
            w.comment("threshold-db: " + fmt(threshold_db(model, conv)));
        } catch (const std::runtime_error&) {
            w.comment("threshold-db: not-found");
        }
        emit_long_rows(w, range.values(), series, aspect);
        w.write(common.output);
        return 0;
    });
}

inline int cmd_fig7a(const std::vector<std::string>& args) {
    return repetition_sweep(args, "fig7a", "gate-noise", "1,3,5,11,101");
}

inline int cmd_fig7b(const std::vector<std::string>& args) {
    return repetition_sweep(args, "fig7b", "resource-only", "1,3,5,11,101");
}

inline int cmd_sweep(const std::vector<std::string>& args) {
    return repetition_sweep(args, "sweep", "", "1,3,101");
}

inline int cmd_fig7c(const std::vector<std::string>& args) {
    CLI::App app{
        "Length-101 repetition code under both noise models, with the square "
        "single-qubit pipeline as baseline (n = 1).\nCSV columns: " +
            std::string(long_columns),
        "cvqc fig7c"};
    detail::CommonOpts common;
    std::string range_str = "2:20:0.1";
    std::string n_str = "101";
    app.add_option("--squeezing-db", range_str, "squeezing grid, dB")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--n", n_str, "repetition length for the encoded series")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    detail::add_common(app, common);

    return detail::run_subcommand(app, args, [&](const ParseContext& ctx) {
        const DbRange range = parse_range(range_str);
        const auto n_list = parse_n_list(n_str);
        if (n_list.size() != 1)
            throw std::invalid_argument("fig7c: --n takes a single length");
        const int n = n_list[0];
        std::vector<Series> series = {
            {NoiseModel::gate_noise, default_convention(NoiseModel::gate_noise), 1},
            {NoiseModel::gate_noise, default_convention(NoiseModel::gate_noise), n},
            {NoiseModel::resource_only, default_convention(NoiseModel::resource_only), n},
        };
        CsvWriter w;
        emit_metadata(w, "fig7c",
                      {{"squeezing-db", range_str}, {"n", n_str}}, ctx);
        emit_long_rows(w, range.values(), series, 0.0);
        w.write(common.output);
        return 0;
    });
}

inline int cmd_threshold(const std::vector<std::string>& args) {
    CLI::App app{
        "Break-even squeezing: the dB level above which the optimized length-n code "
        "beats the bare square qubit.\n"
        "CSV columns: model, convention, n, scan_lo_db, scan_hi_db, threshold_db, status",
        "cvqc threshold"};
    detail::CommonOpts common;
    std::string model_str = "gate-noise";
    std::string conv_str = "default";
    std::string scan_str = "2:25";
    int n = 101;
    bool sensitivity = false;
    app.add_option("--model", model_str, "noise model")
        ->check(CLI::IsMember({"gate-noise", "resource-only"}))
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--convention", conv_str, "spike normalization (default: per model)")
        ->check(CLI::IsMember({"half-shot", "full-shot", "default"}))
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--scan", scan_str, "search window, dB (lo:hi)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--n", n, "repetition length")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_flag("--sensitivity", sensitivity,
                 "tabulate all model x convention combinations")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    detail::add_common(app, common);

    return detail::run_subcommand(app, args, [&](const ParseContext& ctx) {
        const auto [lo, hi] = parse_scan(scan_str);
        CsvWriter w;
        emit_metadata(w, "threshold",
                      {{"model", model_str},
                       {"convention", conv_str},
                       {"scan", scan_str},
                       {"n", std::to_string(n)},
                       {"sensitivity", sensitivity ? "1" : "0"}},
                      ctx);
        w.header({"model", "convention", "n", "scan_lo_db", "scan_hi_db", "threshold_db",
                  "status"});
        if (sensitivity) {
            int found = 0;
            for (NoiseModel m : {NoiseModel::gate_noise, NoiseModel::resource_only}) {
                for (SpikeConvention c :
                     {SpikeConvention::half_shot, SpikeConvention::full_shot}) {
                    std::string value = "nan", status = "no-crossing-in-range";
                    try {
                        value = fmt(threshold_db(m, c, n, lo, hi));
                        status = "ok";
                        ++found;
                    } catch (const std::runtime_error&) {
                    }
                    w.row({to_string(m), to_string(c), std::to_string(n), fmt(lo), fmt(hi),
                           value, status});
                }
            }
            if (found == 0)
                throw std::runtime_error("threshold: no crossing for any convention in " +
                                         scan_str + " dB");
            w.write(common.output);
            return 0;
        }
        const NoiseModel model = parse_model(model_str);
        const SpikeConvention conv = resolve_convention(conv_str, model);
        const double value = threshold_db(model, conv, n, lo, hi);  // throws -> exit 3
        w.row({to_string(model), to_string(conv), std::to_string(n), fmt(lo), fmt(hi),
               fmt(value), "ok"});
        w.write(common.output);
        return 0;
    });
}

inline int cmd_vlf(const std::vector<std::string>& args) {
    CLI::App app{
        "Inseparability certificate of the generated lattice at one squeezing level: "
        "quoted nullifier variances against the bound, plus the bipartition sweep of "
        "the six-mode certification unit.\n"
        "CSV columns: squeezing_db, quoted_var_x, quoted_var_p, threshold, margin, pass, "
        "worst_bipartition_margin, certified_bipartitions; with --bipartitions instead: "
        "mask, lhs, rhs, margin, certified",
        "cvqc vlf"};
    detail::CommonOpts common;
    double squeezing_db = 10.0;
    int delay_n = 10, k_bins = 24, bin = -1;
    bool wrap = false, bipartitions = false;
    app.add_option("--squeezing-db", squeezing_db, "squeezing level, dB")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--delay-n", delay_n, "long-delay length in bins")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--k-bins", k_bins, "number of emitted time bins")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--bin", bin, "anchor time bin (default: delay-n + 1)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_flag("--wrap", wrap, "periodic boundary")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_flag("--bipartitions", bipartitions, "emit one row per bipartition")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    detail::add_common(app, common);

    return detail::run_subcommand(app, args, [&](const ParseContext& ctx) {
        const int anchor = bin >= 0 ? bin : delay_n + 1;
        ClusterLattice lattice({delay_n, k_bins, squeezing_db, wrap});
        const auto res = lattice.vlf_check(anchor);
        const double margin = res.threshold - std::max(res.quoted_var_x, res.quoted_var_p);
        int certified = 0;
        for (const auto& b : res.bipartitions) certified += b.margin > 0.0 ? 1 : 0;

        CsvWriter w;
        emit_metadata(w, "vlf",
                      {{"squeezing-db", fmt(squeezing_db)},
                       {"delay-n", std::to_string(delay_n)},
                       {"k-bins", std::to_string(k_bins)},
                       {"bin", std::to_string(anchor)},
                       {"wrap", wrap ? "1" : "0"}},
                      ctx);
        if (bipartitions) {
            w.comment("quoted-var-x: " + fmt(res.quoted_var_x));
            w.comment("quoted-var-p: " + fmt(res.quoted_var_p));
            w.comment("threshold: " + fmt(res.threshold));
            w.comment(std::string("pass: ") + (res.pass ? "1" : "0"));
            w.header({"mask", "lhs", "rhs", "margin", "certified"});
            for (const auto& b : res.bipartitions)
                w.row({std::to_string(b.mask), fmt(b.lhs), fmt(b.rhs), fmt(b.margin),
                       b.margin > 0.0 ? "1" : "0"});
        } else {
            w.header({"squeezing_db", "quoted_var_x", "quoted_var_p", "threshold",
                      "margin", "pass", "worst_bipartition_margin",
                      "certified_bipartitions"});
            w.row({fmt(squeezing_db), fmt(res.quoted_var_x), fmt(res.quoted_var_p),
                   fmt(res.threshold), fmt(margin), res.pass ? "1" : "0",
                   fmt(res.worst_margin), std::to_string(certified)});
        }
        w.write(common.output);
        return 0;
    });
}

inline int cmd_mc(const std::vector<std::string>& args) {
    CLI::App app{
        "Monte Carlo validation of the closed-form error pipeline at one operating "
        "point; fully deterministic for a fixed seed.\n"
        "CSV columns: n, aspect_ratio, squeezing_db, model, convention, mode, trials, "
        "seed, failures, failure_rate, std_error, analytic_pe",
        "cvqc mc"};
    detail::CommonOpts common;
    int n = 1;
    double aspect = 1.0, squeezing_db = 10.0;
    std::uint64_t trials = 100000, seed = 1;
    std::string mode_str = "joint-physical";
    std::string model_str = "gate-noise";
    std::string conv_str = "default";
    app.add_option("--n", n, "repetition length (odd)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--aspect-ratio", aspect, "grid-code bias R")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--squeezing-db", squeezing_db, "squeezing level, dB")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--trials", trials, "number of trials")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--seed", seed, "master seed")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--mode", mode_str, "sampling discipline")
        ->check(CLI::IsMember(
            {"joint-physical", "joint", "independent-marginals", "independent"}))
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--model", model_str, "noise model")
        ->check(CLI::IsMember({"gate-noise", "resource-only"}))
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.add_option("--convention", conv_str, "spike normalization (default: per model)")
        ->check(CLI::IsMember({"half-shot", "full-shot", "default"}))
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    detail::add_common(app, common);

    return detail::run_subcommand(app, args, [&](const ParseContext& ctx) {
        const NoiseModel model = parse_model(model_str);
        const SpikeConvention conv = resolve_convention(conv_str, model);
        const McMode mode = parse_mc_mode(mode_str);
        const auto sig = quadrature_sigmas(model, squeezing_db, conv);

        McConfig cfg;
        cfg.n = n;
        cfg.aspect_ratio = aspect;
        cfg.sigma_x = sig.sigma_x;
        cfg.sigma_p = sig.sigma_p;
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.mode = mode;
        const auto res = run_mc(cfg);

        CsvWriter w;
        emit_metadata(w, "mc",
                      {{"n", std::to_string(n)},
                       {"aspect-ratio", fmt(aspect)},
                       {"squeezing-db", fmt(squeezing_db)},
                       {"model", to_string(model)},
                       {"convention", to_string(conv)},
                       {"mode", to_string(mode)},
                       {"trials", std::to_string(trials)},
                       {"seed", std::to_string(seed)}},
                      ctx);
        w.header({"n", "aspect_ratio", "squeezing_db", "model", "convention", "mode",
                  "trials", "seed", "failures", "failure_rate", "std_error",
                  "analytic_pe"});
        w.row({std::to_string(n), fmt(aspect), fmt(squeezing_db), to_string(model),
               to_string(conv), to_string(mode), std::to_string(trials),
               std::to_string(seed), std::to_string(res.failures), fmt(res.failure_rate),
               fmt(res.std_error), fmt(res.analytic_pe)});
        w.write(common.output);
        return 0;
    });
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline const char* top_help =
    "cvqc - continuous-variable cluster-state and grid-code analysis toolkit\n"
    "\n"
    "usage: cvqc <subcommand> [options]\n"
    "\n"
    "subcommands:\n"
    "  fig3       inseparability sweep: nullifier variances vs squeezing\n"
    "  fig5c      squeezing budget: lattice quality and post-gate residuals\n"
    "  fig6c      single grid-code qubit error probabilities vs squeezing\n"
    "  fig7a      repetition-code logical error vs squeezing, gate-noise model\n"
    "  fig7b      repetition-code logical error vs squeezing, resource-only model\n"
    "  fig7c      length-101 code under both models with the single-qubit baseline\n"
    "  threshold  break-even squeezing where the encoded qubit beats the bare one\n"
    "  vlf        inseparability certificate at one squeezing level\n"
    "  mc         Monte Carlo validation of the closed-form pipeline\n"
    "  sweep      custom grid: model x code lengths x squeezing range\n"
    "\n"
    "Output is CSV: '#'-prefixed metadata lines, a header row, then data rows.\n"
    "Common options: -o/--output FILE (default stdout); --config FILE reads\n"
    "`key = value` lines ('#' comments), command-line flags override the file.\n"
    "Exit codes: 0 success, 2 argument error, 3 numerical failure.\n"
    "Run `cvqc <subcommand> --help` for options and the CSV column list.\n";

inline int dispatch(const std::vector<std::string>& args) {
    if (args.empty()) {
        std::cerr << top_help;
        return 2;
    }
    const std::string& sub = args[0];
    if (sub == "--help" || sub == "-h" || sub == "help") {
        std::cout << top_help;
        return 0;
    }
    if (sub == "--version") {
        std::cout << version_string << '\n';
        return 0;
    }
    const std::vector<std::string> rest(args.begin() + 1, args.end());
    if (sub == "fig3") return cmd_fig3(rest);
    if (sub == "fig5c") return cmd_fig5c(rest);
    if (sub == "fig6c") return cmd_fig6c(rest);
    if (sub == "fig7a") return cmd_fig7a(rest);
    if (sub == "fig7b") return cmd_fig7b(rest);
    if (sub == "fig7c") return cmd_fig7c(rest);
    if (sub == "threshold") return cmd_threshold(rest);
    if (sub == "vlf") return cmd_vlf(rest);
    if (sub == "mc") return cmd_mc(rest);
    if (sub == "sweep") return cmd_sweep(rest);
    std::cerr << "cvqc: unknown subcommand '" << sub << "'\n\n" << top_help;
    return 2;
}

inline int run(const std::vector<std::string>& args) {
    try {
        return dispatch(args);
    } catch (const std::invalid_argument& e) {
        std::cerr << "cvqc: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "cvqc: " << e.what() << '\n';
        return 3;
    }
}

inline int run(int argc, const char* const* argv) {
    return run(std::vector<std::string>(argv + 1, argv + argc));
}

}  // namespace cvqc::cli
