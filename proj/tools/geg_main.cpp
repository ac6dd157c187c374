// Command-line front end: run, sweep-table, analyze, basin, verify, erm.
// Every command writes a manifest.json echoing its resolved configuration;
// re-running with `--config manifest.json` regenerates identical outputs.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "geg/analysis.hpp"
#include "geg/basins.hpp"
#include "geg/dynamics.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace geg;

namespace {

// Config files are flat key=value text or a flat JSON object (a
// manifest). They expand to --key=value tokens injected ahead of the
// explicit flags; every option takes its last occurrence, so the command
// line overrides the file.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file " + path);
    std::string content((std::istreambuf_iterator<char>(f)),
                        std::istreambuf_iterator<char>());
    std::vector<std::string> out;
    auto add = [&out](const std::string& k, const std::string& v) {
        if (k == "command" || k == "out" || k == "config" || k.empty()) return;
        out.push_back("--" + k + "=" + v);
    };
    const size_t first = content.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && content[first] == '{') {
        const auto j = nlohmann::json::parse(content);
        for (const auto& [k, v] : j.items())
            add(k, v.is_string() ? v.get<std::string>() : v.dump());
    } else {
        std::istringstream ss(content);
        std::string line;
        while (std::getline(ss, line)) {
            const size_t b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos || line[b] == '#') continue;
            const size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config line is not key=value: " + line);
            auto trim = [](std::string s) {
                const size_t x = s.find_first_not_of(" \t\r");
                if (x == std::string::npos) return std::string();
                const size_t y = s.find_last_not_of(" \t\r");
                return s.substr(x, y - x + 1);
            };
            add(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    return out;
}

// argv rewritten as {prog, subcommand, <config tokens>, <explicit args>}.
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            config_path = args[i].substr(9);
    }
    if (config_path.empty() || args.empty()) return args;
    const std::vector<std::string> extra = config_tokens(config_path);
    std::vector<std::string> out;
    out.push_back(args.front()); // subcommand name
    out.insert(out.end(), extra.begin(), extra.end());
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

void take_last_everywhere(CLI::App& app) {
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        for (CLI::Option* opt : sub->get_options())
            opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

std::string fmt(double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Vec parse_point(const std::string& s) {
    Vec out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str()) throw std::invalid_argument("bad number in point: " + tok);
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty point");
    return out;
}

void write_text(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
    f << content;
}

void write_json(const fs::path& p, const ordered_json& j) {
    write_text(p, j.dump(2) + "\n");
}

ordered_json location_json(const Vec& z) {
    ordered_json a = ordered_json::array();
    for (double v : z) a.push_back(v);
    return a;
}

ordered_json spectrum_json(const Spectrum& s) {
    ordered_json evs = ordered_json::array();
    for (const auto& ev : s.eigenvalues) evs.push_back({ev.real(), ev.imag()});
    return ordered_json{{"eigenvalues", evs}, {"spectral_radius", s.spectral_radius},
                        {"method", s.method}};
}

// Options shared by the iteration-driven commands.
struct CommonOpts {
    std::string problem = "bilinear_xy";
    std::string variant = "geg";
    double eta = 0.9, tau = 1.0, gamma = 0.1;
    double h1x = 0, h1y = 0, h2x = 0, h2y = 0;
    long max_iters = 1000000;
    double tol_grad = 1e-8;
    double blowup_radius = 1e8;
    uint64_t seed = 0;
    std::string out = "out";
    std::string simd = "auto";
    int threads = 0;
    CLI::Option* h_opts[4] = {nullptr, nullptr, nullptr, nullptr};
    CLI::Option* tau_opt = nullptr;
    CLI::Option* gamma_opt = nullptr;

    void add_problem(CLI::App* cmd) {
        cmd->add_option("--problem", problem,
                        "builtin problem: bilinear_xy, multi_critical, quadratic_counterexample")
            ->capture_default_str();
    }

    void add_steps(CLI::App* cmd, double deta, double dtau, double dgamma) {
        eta = deta;
        tau = dtau;
        gamma = dgamma;
        cmd->add_option("--variant", variant, "geg, eg, tau-eg, eg-plus or gda")
            ->capture_default_str();
        cmd->add_option("--eta", eta, "extrapolation step eta = h1y")->capture_default_str();
        tau_opt = cmd->add_option("--tau", tau, "timescale ratio tau = h1y/h1x")
                      ->capture_default_str();
        gamma_opt = cmd->add_option("--gamma", gamma,
                                    "update/extrapolation ratio gamma = h2x/h1x (gda ignores it)")
                        ->capture_default_str();
        h_opts[0] = cmd->add_option("--h1x", h1x, "raw step h1x (overrides eta/tau/gamma)");
        h_opts[1] = cmd->add_option("--h1y", h1y, "raw step h1y");
        h_opts[2] = cmd->add_option("--h2x", h2x, "raw step h2x");
        h_opts[3] = cmd->add_option("--h2y", h2y, "raw step h2y");
    }

    void add_budget(CLI::App* cmd, long dmax, double dtol) {
        max_iters = dmax;
        tol_grad = dtol;
        cmd->add_option("--max-iters", max_iters, "iteration cap")->capture_default_str();
        cmd->add_option("--tol-grad", tol_grad, "gradient-norm convergence tolerance")
            ->capture_default_str();
        cmd->add_option("--blowup-radius", blowup_radius, "divergence radius")
            ->capture_default_str();
    }

    std::string config_file;

    void add_misc(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "random seed")->capture_default_str();
        cmd->add_option("--out", out, "output directory")->capture_default_str();
        cmd->add_option("--simd", simd, "kernel backend: auto, scalar, avx2")
            ->capture_default_str();
        cmd->add_option("--threads", threads, "worker threads (0 = hardware)")
            ->capture_default_str();
        cmd->add_option("--config", config_file,
                        "flat key=value file or a manifest.json; explicit flags override");
    }

    void apply_simd() const {
        if (simd == "auto")
            kernels::set_simd_mode(kernels::SimdMode::Auto);
        else if (simd == "scalar")
            kernels::set_simd_mode(kernels::SimdMode::Scalar);
        else if (simd == "avx2")
            kernels::set_simd_mode(kernels::SimdMode::Avx2);
        else
            throw std::invalid_argument("unknown --simd mode '" + simd + "'");
    }

    bool raw_steps_given() const {
        for (const auto* o : h_opts)
            if (o && o->count() > 0) return true;
        return false;
    }

    GegConfig make_config() const {
        const Variant v = variant_from_string(variant);
        if (raw_steps_given()) {
            for (const auto* o : h_opts)
                if (!o || o->count() == 0)
                    throw std::invalid_argument(
                        "raw steps require all four of --h1x --h1y --h2x --h2y");
            return GegConfig::from_steps(h1x, h1y, h2x, h2y, v);
        }
        const double g = v == Variant::Gda ? 1.0 : gamma;
        return GegConfig::from_rates(eta, tau, v == Variant::TauEg ? 1.0 : g, v);
    }

    IterationBudget budget(long stride = 0, bool store = false) const {
        IterationBudget b;
        b.max_iters = max_iters;
        b.tol_grad = tol_grad;
        b.blowup_radius = blowup_radius;
        b.record_stride = stride;
        b.store_iterates = store;
        return b;
    }

    void manifest_common(ordered_json& j, const GegConfig& cfg) const {
        j["problem"] = problem;
        j["variant"] = to_string(cfg.variant());
        j["eta"] = cfg.eta();
        j["tau"] = cfg.tau();
        j["gamma"] = cfg.gamma();
        j["h1x"] = cfg.h1x();
        j["h1y"] = cfg.h1y();
        j["h2x"] = cfg.h2x();
        j["h2y"] = cfg.h2y();
        j["max-iters"] = max_iters;
        j["tol-grad"] = tol_grad;
        j["blowup-radius"] = blowup_radius;
        j["seed"] = seed;
        j["simd"] = kernels::active_backend();
        j["threads"] = threads;
    }
};

fs::path prepare_out(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

const char* yes_no(bool b) { return b ? "YES" : "NO"; }

// ---------------------------------------------------------------- run ----

int cmd_run(const CommonOpts& opts, const std::string& z0_str, long record_stride,
            bool store_points) {
    opts.apply_simd();
    const MinMaxProblem problem = builtin(opts.problem);
    const GegConfig cfg = opts.make_config();
    Vec z0 = parse_point(z0_str);
    if (static_cast<int>(z0.size()) != problem.dim())
        throw std::invalid_argument("--z0 needs " + std::to_string(problem.dim()) +
                                    " components for " + opts.problem);
    long stride = record_stride;
    if (stride <= 0) stride = std::max<long>(1, opts.max_iters / 10000);

    OperatorBundle bundle(problem, cfg);
    const Trace tr = iterate(bundle, z0, opts.budget(stride, store_points));

    const fs::path dir = prepare_out(opts.out);
    std::ostringstream csv;
    write_trace_csv(csv, tr);
    write_text(dir / "trace.csv", csv.str());

    ordered_json summary{{"verdict", to_string(tr.verdict)},
                         {"iterations", tr.iterations},
                         {"final_point", location_json(tr.final_point)},
                         {"final_grad_norm", tr.grad_norms.back()}};
    write_json(dir / "summary.json", summary);

    ordered_json man{{"command", "run"}};
    opts.manifest_common(man, cfg);
    man["z0"] = z0_str;
    man["record-stride"] = stride;
    man["store-points"] = store_points;
    write_json(dir / "manifest.json", man);

    std::cout << "verdict=" << to_string(tr.verdict) << " iterations=" << tr.iterations
              << " final_grad_norm=" << fmt(tr.grad_norms.back()) << "\n";
    return 0;
}

// ---------------------------------------------------------- sweep-table ----

struct TableRow {
    double eta, tau, gamma;
};

std::vector<TableRow> default_rows() {
    return {{0.9, 2, 0.25}, {0.9, 0.5, 0.25}, {0.5, 0.1, 0.1}, {0.9, 2, 1.2},
            {0.9, 0.01, 0.1}, {0.9, 0.01, 0.01}, {0.5, 2, 2}, {0.5, 200, 2}};
}

std::vector<TableRow> parse_rows(const std::string& s) {
    if (s.empty()) return default_rows();
    std::vector<TableRow> rows;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
        const Vec v = parse_point(tok);
        if (v.size() != 3)
            throw std::invalid_argument("each sweep row needs eta,tau,gamma; got: " + tok);
        rows.push_back({v[0], v[1], v[2]});
    }
    return rows;
}

struct TableVerdict {
    bool spectral;
    bool sim;
};

TableVerdict table_cell(const MinMaxProblem& problem, const GegConfig& cfg) {
    OperatorBundle bundle(problem, cfg);
    const Vec origin(problem.dim(), 0.0);
    const Spectrum sp = eigenvalues(bundle.jacobian(origin));
    const StabilityClass st = classify(sp);

    IterationBudget b;
    b.max_iters = 10000;
    b.tol_grad = 1e-300;
    b.blowup_radius = 1e8;
    const Trace tr = iterate(bundle, Vec(problem.dim(), 1.0), b);
    const bool sim = tr.grad_norms.back() <= 0.05 * tr.grad_norms.front();
    return {st.kind == Stability::AsymptoticallyStable, sim};
}

int cmd_sweep_table(const CommonOpts& opts, const std::string& rows_str) {
    opts.apply_simd();
    const MinMaxProblem problem = builtin(opts.problem);
    if (!problem.quadratic)
        throw std::invalid_argument(
            "sweep-table requires a quadratic problem (constant Jacobian); use `geg run` "
            "for general objectives");
    const auto rows = parse_rows(rows_str);

    std::ostringstream csv;
    csv << "eta,tau,gamma,tau_eg,eg_plus,geg,tau_eg_sim,eg_plus_sim,geg_sim,agree\n";
    bool all_agree = true;
    for (const auto& r : rows) {
        const TableVerdict te =
            table_cell(problem, GegConfig::from_rates(r.eta, r.tau, 1.0, Variant::TauEg));
        const TableVerdict ep =
            table_cell(problem, GegConfig::from_rates(r.eta, 1.0, r.gamma, Variant::EgPlus));
        const TableVerdict gg =
            table_cell(problem, GegConfig::from_rates(r.eta, r.tau, r.gamma, Variant::Geg));
        const bool agree =
            te.spectral == te.sim && ep.spectral == ep.sim && gg.spectral == gg.sim;
        all_agree = all_agree && agree;
        csv << fmt(r.eta) << "," << fmt(r.tau) << "," << fmt(r.gamma) << ","
            << yes_no(te.spectral) << "," << yes_no(ep.spectral) << "," << yes_no(gg.spectral)
            << "," << yes_no(te.sim) << "," << yes_no(ep.sim) << "," << yes_no(gg.sim) << ","
            << yes_no(agree) << "\n";
    }
    const fs::path dir = prepare_out(opts.out);
    write_text(dir / "table.csv", csv.str());

    ordered_json man{{"command", "sweep-table"}};
    man["problem"] = opts.problem;
    man["rows"] = rows_str;
    man["simd"] = kernels::active_backend();
    write_json(dir / "manifest.json", man);

    std::cout << csv.str();
    std::cout << (all_agree ? "spectral and simulation verdicts agree on every cell\n"
                            : "WARNING: spectral/simulation disagreement\n");
    return 0;
}

// -------------------------------------------------------------- analyze ----

ordered_json report_json(const EquilibriumReport& rep) {
    return ordered_json{
        {"location", location_json(rep.location)},
        {"residual", rep.residual},
        {"jacobian_spectrum", spectrum_json(rep.j_spectrum)},
        {"lambda_h_spectrum", spectrum_json(rep.lh_spectrum)},
        {"stability", to_string(rep.stability.kind)},
        {"stability_margin", rep.stability.margin},
        {"saddle", to_string(rep.saddle.kind)},
        {"saddle_sampling_checked", rep.saddle.sampling_checked},
        {"saddle_sampling_confirmed", rep.saddle.sampling_confirmed},
        {"hessian_invertible", rep.hessian_invertible},
        {"hessian_condition", rep.hessian_condition}};
}

int cmd_analyze(const CommonOpts& opts, const std::string& box_str, int starts) {
    opts.apply_simd();
    const MinMaxProblem problem = builtin(opts.problem);
    const GegConfig cfg = opts.make_config();
    const Vec b = parse_point(box_str);
    if (static_cast<int>(b.size()) != 2 * problem.dim())
        throw std::invalid_argument("--box needs lo,hi per coordinate (" +
                                    std::to_string(2 * problem.dim()) + " numbers)");
    Box box;
    for (int i = 0; i < problem.dim(); ++i) {
        box.lo.push_back(b[2 * i]);
        box.hi.push_back(b[2 * i + 1]);
    }

    const auto points = find_critical_points(problem, box, starts, opts.seed);
    const double lips =
        problem.lipschitz_hint ? *problem.lipschitz_hint : sampled_lipschitz(problem, box);
    const ParamCertificate cert =
        certify_params(cfg.eta(), cfg.tau(), cfg.gamma(), cfg.eta() * lips, lips);

    std::ostringstream csv;
    for (int i = 0; i < problem.dim(); ++i) csv << "z" << i << ",";
    csv << "geg_stable,saddle\n";
    ordered_json reports = ordered_json::array();
    for (const auto& pt : points) {
        const EquilibriumReport rep = report(problem, cfg, pt, 1e-5);
        ordered_json rj = report_json(rep);
        rj["eigenvalue_map_mismatch"] = eigenvalue_map_mismatch(problem, cfg, pt);
        reports.push_back(std::move(rj));
        for (double v : pt) csv << fmt(v) << ",";
        csv << yes_no(rep.stability.kind == Stability::AsymptoticallyStable) << ","
            << yes_no(rep.saddle.kind != SaddleKind::NotSaddle) << "\n";
    }

    const fs::path dir = prepare_out(opts.out);
    write_text(dir / "table.csv", csv.str());
    ordered_json out{{"problem", opts.problem},
                     {"critical_points", static_cast<int>(points.size())},
                     {"lipschitz", lips},
                     {"certificate",
                      ordered_json{{"eta", cert.eta},
                                   {"tau", cert.tau},
                                   {"gamma", cert.gamma},
                                   {"c", cert.c},
                                   {"p1_member", cert.p1_member},
                                   {"p2_member", cert.p2_member},
                                   {"diffeo_ok", cert.diffeo_ok},
                                   {"real_spectrum_ok", cert.real_spectrum_ok},
                                   {"general_ok", cert.general_ok}}},
                     {"reports", reports}};
    write_json(dir / "reports.json", out);

    ordered_json man{{"command", "analyze"}};
    opts.manifest_common(man, cfg);
    man["box"] = box_str;
    man["starts"] = starts;
    write_json(dir / "manifest.json", man);

    std::cout << "found " << points.size() << " critical points\n" << csv.str();
    return 0;
}

// ---------------------------------------------------------------- basin ----

int cmd_basin(const CommonOpts& opts, const std::string& box_str,
              const std::string& res_str) {
    opts.apply_simd();
    const MinMaxProblem problem = builtin(opts.problem);
    const GegConfig cfg = opts.make_config();
    const Vec b = parse_point(box_str);
    if (b.size() != 4)
        throw std::invalid_argument("--box needs x0,x1,y0,y1 for a 2-D sweep");
    int nx = 0, ny = 0;
    if (sscanf(res_str.c_str(), "%dx%d", &nx, &ny) != 2)
        throw std::invalid_argument("--resolution must look like 200x100");

    const BasinGrid grid = sweep(problem, cfg, {b[0], b[1], b[2], b[3]}, nx, ny,
                                 opts.budget(), opts.threads);

    std::vector<EquilibriumReport> reports;
    for (const auto& eq : grid.equilibria) reports.push_back(report(problem, cfg, eq, 1e-5));
    const double mass = unstable_mass(grid, reports);

    const fs::path dir = prepare_out(opts.out);
    std::ostringstream csv;
    write_basin_csv(csv, grid);
    write_text(dir / "grid.csv", csv.str());

    std::vector<long> counts(grid.equilibria.size(), 0);
    long diverged = 0, maxiters = 0, cycles = 0;
    for (int label : grid.labels) {
        if (label >= 0)
            ++counts[label];
        else if (label == kLabelDiverged)
            ++diverged;
        else if (label == kLabelMaxIters)
            ++maxiters;
        else
            ++cycles;
    }
    ordered_json legend = ordered_json::array();
    for (size_t e = 0; e < grid.equilibria.size(); ++e)
        legend.push_back(ordered_json{{"label", e},
                                      {"location", location_json(grid.equilibria[e])},
                                      {"stability", to_string(reports[e].stability.kind)},
                                      {"spectral_radius", reports[e].j_spectrum.spectral_radius},
                                      {"cells", counts[e]}});
    ordered_json summary{{"legend", legend},
                         {"diverged_cells", diverged},
                         {"max_iters_cells", maxiters},
                         {"cycle_cells", cycles},
                         {"unstable_mass", mass}};
    write_json(dir / "summary.json", summary);

    ordered_json man{{"command", "basin"}};
    opts.manifest_common(man, cfg);
    man["box"] = box_str;
    man["resolution"] = res_str;
    write_json(dir / "manifest.json", man);

    std::cout << "equilibria: " << grid.equilibria.size() << ", diverged " << diverged
              << ", max-iters " << maxiters << ", cycles " << cycles
              << ", unstable_mass " << fmt(mass) << "\n";
    for (size_t e = 0; e < grid.equilibria.size(); ++e)
        std::cout << "  label " << e << " at (" << fmt(grid.equilibria[e][0]) << ", "
                  << fmt(grid.equilibria[e][1]) << "): " << counts[e] << " cells, "
                  << to_string(reports[e].stability.kind) << "\n";
    return 0;
}

// --------------------------------------------------------------- verify ----

int cmd_verify(const std::string& out, int density, double gamma, int seeds) {
    struct Check {
        std::string name;
        double value;
        bool pass;
    };
    std::vector<Check> checks;

    const AppendixRegionResult ar = verify_appendix_regions(density, gamma);
    checks.push_back({"appendix_max_modulus<=1+1e-9", ar.max_modulus, ar.max_modulus <= 1.0 + 1e-9});
    checks.push_back({"appendix_min_ratio>1", ar.min_ratio, ar.min_ratio > 1.0});

    const double max_re = saddle_spectrum_suite(seeds);
    checks.push_back({"saddle_spectra_max_re<=1e-8", max_re, max_re <= 1e-8});

    // eigenvalue map across the builtins at their critical points, with the
    // configurations each example uses
    double worst3 = 0.0;
    {
        const MinMaxProblem p = builtin("bilinear_xy");
        worst3 = std::max(worst3, eigenvalue_map_mismatch(p, GegConfig::from_rates(0.9, 1.0, 0.1),
                                               Vec{0.0, 0.0}));
    }
    {
        const MinMaxProblem p = builtin("quadratic_counterexample");
        worst3 = std::max(worst3, eigenvalue_map_mismatch(p, GegConfig::from_rates(0.7, 1.0, 0.2),
                                               Vec{0.0, 0.0}));
    }
    {
        const MinMaxProblem p = builtin("multi_critical");
        const GegConfig cfg = GegConfig::from_rates(1e-6, 1.0, 0.5);
        const auto pts =
            find_critical_points(p, Box{{-10.0, -10.0}, {45.0, 10.0}}, 600, 7);
        for (const auto& pt : pts) worst3 = std::max(worst3, eigenvalue_map_mismatch(p, cfg, pt));
    }
    checks.push_back({"eigenvalue_map_max_mismatch<=1e-8", worst3, worst3 <= 1e-8});

    bool all = true;
    ordered_json jc = ordered_json::array();
    for (const auto& c : checks) {
        all = all && c.pass;
        jc.push_back(ordered_json{{"check", c.name}, {"value", c.value}, {"pass", c.pass}});
        std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.name << "  value=" << fmt(c.value)
                  << "\n";
    }
    const fs::path dir = prepare_out(out);
    write_json(dir / "verify.json", ordered_json{{"checks", jc}, {"all_pass", all}});
    ordered_json man{{"command", "verify"},
                     {"density", density},
                     {"gamma", gamma},
                     {"seeds", seeds}};
    write_json(dir / "manifest.json", man);
    return all ? 0 : 2;
}

// ------------------------------------------------------------------ erm ----

int cmd_erm(const CommonOpts& opts, const std::string& csv_path,
            const std::vector<std::string>& synthetic, const std::string& label_col,
            int hidden_width, double alpha, int folds) {
    opts.apply_simd();
    ErmInstance inst;
    if (!csv_path.empty()) {
        std::ifstream f(csv_path);
        if (!f) throw std::runtime_error("cannot open CSV file " + csv_path);
        inst = load_erm(f, label_col, hidden_width, alpha, opts.seed);
    } else if (!synthetic.empty()) {
        int rows = 200, feats = 10;
        uint64_t bseed = opts.seed;
        for (const auto& kv : synthetic) {
            const size_t eq = kv.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--synthetic expects key=value entries, got " + kv);
            const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
            if (k == "rows")
                rows = std::stoi(v);
            else if (k == "features")
                feats = std::stoi(v);
            else if (k == "seed")
                bseed = std::stoull(v);
            else
                throw std::invalid_argument("--synthetic key must be rows, features or seed");
        }
        std::vector<Vec> x;
        std::vector<int> y;
        synthetic_blobs(rows, feats, bseed, x, y);
        inst = make_erm(std::move(x), std::move(y), hidden_width, alpha, opts.seed);
    } else {
        throw std::invalid_argument("erm needs --csv FILE or --synthetic rows=R features=V");
    }

    const GegConfig cfg = opts.make_config();
    const auto traces = run_erm(inst, cfg, opts.budget(1), folds);

    const fs::path dir = prepare_out(opts.out);
    ordered_json folds_json = ordered_json::array();
    for (size_t k = 0; k < traces.size(); ++k) {
        std::ostringstream csv;
        write_trace_csv(csv, traces[k]);
        write_text(dir / ("fold" + std::to_string(k) + ".csv"), csv.str());
        const auto& gn = traces[k].grad_norms;
        const size_t tail = std::min<size_t>(100, gn.size());
        double tmean = 0.0;
        for (size_t i = gn.size() - tail; i < gn.size(); ++i) tmean += gn[i];
        tmean /= static_cast<double>(tail);
        folds_json.push_back(ordered_json{{"fold", k},
                                          {"verdict", to_string(traces[k].verdict)},
                                          {"iterations", traces[k].iterations},
                                          {"initial_grad_norm", gn.front()},
                                          {"final_grad_norm", gn.back()},
                                          {"trailing100_mean_grad_norm", tmean}});
        std::cout << "fold " << k << ": " << to_string(traces[k].verdict) << " initial="
                  << fmt(gn.front()) << " trailing100=" << fmt(tmean) << "\n";
    }
    write_json(dir / "summary.json",
               ordered_json{{"train_rows", inst.train_rows()},
                            {"theta_count", inst.theta_count()},
                            {"folds", folds_json}});

    ordered_json man{{"command", "erm"}};
    opts.manifest_common(man, cfg);
    man["csv"] = csv_path;
    ordered_json syn = ordered_json::array();
    for (const auto& s : synthetic) syn.push_back(s);
    man["synthetic"] = syn;
    man["label"] = label_col;
    man["hidden-width"] = hidden_width;
    man["alpha"] = alpha;
    man["folds"] = folds;
    write_json(dir / "manifest.json", man);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalised extra-gradient dynamics: runs, spectra, stability tables, "
                 "basins of attraction and robust-ERM training"};
    app.require_subcommand(1);
    int rc = 0;

    // run
    auto run_opts = std::make_shared<CommonOpts>();
    auto z0_str = std::make_shared<std::string>("1,1");
    auto record_stride = std::make_shared<long>(0);
    auto store_points = std::make_shared<bool>(false);
    {
        CLI::App* c = app.add_subcommand("run", "iterate the map from an initial point");
        run_opts->add_problem(c);
        run_opts->add_steps(c, 0.9, 1.0, 0.1);
        run_opts->add_budget(c, 1000000, 1e-8);
        c->add_option("--z0", *z0_str, "initial point, comma separated")->capture_default_str();
        c->add_option("--record-stride", *record_stride,
                      "trace recording stride (0 = auto)")->capture_default_str();
        c->add_flag("--store-points", *store_points, "store iterates in the trace CSV");
        run_opts->add_misc(c);
        c->callback([=, &rc]() { rc = cmd_run(*run_opts, *z0_str, *record_stride,
                                              *store_points); });
    }

    // sweep-table
    auto table_opts = std::make_shared<CommonOpts>();
    auto rows_str = std::make_shared<std::string>("");
    {
        CLI::App* c = app.add_subcommand(
            "sweep-table", "spectral + simulated convergence verdicts per (eta,tau,gamma) row");
        table_opts->add_problem(c);
        c->add_option("--rows", *rows_str,
                      "semicolon-separated eta,tau,gamma rows (default: bundled benchmark rows)");
        table_opts->add_misc(c);
        c->callback([=, &rc]() { rc = cmd_sweep_table(*table_opts, *rows_str); });
    }

    // analyze
    auto an_opts = std::make_shared<CommonOpts>();
    auto an_box = std::make_shared<std::string>("-10,45,-10,10");
    auto an_starts = std::make_shared<int>(2000);
    {
        CLI::App* c = app.add_subcommand(
            "analyze", "find critical points and report stability/saddle verdicts");
        an_opts->add_problem(c);
        an_opts->add_steps(c, 1e-6, 1.0, 0.5);
        c->add_option("--box", *an_box, "search box lo,hi per coordinate")
            ->capture_default_str();
        c->add_option("--starts", *an_starts, "multistart count")->capture_default_str();
        an_opts->add_misc(c);
        c->callback([=, &rc]() { rc = cmd_analyze(*an_opts, *an_box, *an_starts); });
    }

    // basin
    auto ba_opts = std::make_shared<CommonOpts>();
    auto ba_box = std::make_shared<std::string>("-5,3,-2,2");
    auto ba_res = std::make_shared<std::string>("200x100");
    {
        CLI::App* c = app.add_subcommand(
            "basin", "label a grid of initial conditions by limit equilibrium");
        ba_opts->add_problem(c);
        ba_opts->add_steps(c, 1e-4, 1.0, 0.5);
        ba_opts->add_budget(c, 1000000, 1e-8);
        c->add_option("--box", *ba_box, "sweep box x0,x1,y0,y1")->capture_default_str();
        c->add_option("--resolution", *ba_res, "grid resolution NXxNY")->capture_default_str();
        ba_opts->add_misc(c);
        c->callback([=, &rc]() { rc = cmd_basin(*ba_opts, *ba_box, *ba_res); });
    }

    // verify
    auto ve_out = std::make_shared<std::string>("out");
    auto ve_density = std::make_shared<int>(2000);
    auto ve_gamma = std::make_shared<double>(1.0);
    auto ve_seeds = std::make_shared<int>(200);
    {
        CLI::App* c = app.add_subcommand(
            "verify", "numeric verification of the step-size region and spectra properties");
        c->add_option("--density", *ve_density, "grid density per axis")->capture_default_str();
        c->add_option("--gamma", *ve_gamma, "gamma probe in (0,1]")->capture_default_str();
        c->add_option("--seeds", *ve_seeds, "random quadratic sample count")
            ->capture_default_str();
        c->add_option("--out", *ve_out, "output directory")->capture_default_str();
        auto ve_cfg = std::make_shared<std::string>();
        c->add_option("--config", *ve_cfg,
                      "flat key=value file or a manifest.json; explicit flags override");
        c->callback([=, &rc]() { rc = cmd_verify(*ve_out, *ve_density, *ve_gamma, *ve_seeds); });
    }

    // erm
    auto erm_opts = std::make_shared<CommonOpts>();
    auto erm_csv = std::make_shared<std::string>("");
    auto erm_syn = std::make_shared<std::vector<std::string>>();
    auto erm_label = std::make_shared<std::string>("label");
    auto erm_hidden = std::make_shared<int>(50);
    auto erm_alpha = std::make_shared<double>(1.0);
    auto erm_folds = std::make_shared<int>(5);
    {
        CLI::App* c = app.add_subcommand(
            "erm", "train the robust classification objective, one trace per fold");
        c->add_option("--csv", *erm_csv, "CSV dataset with a binary label column");
        c->add_option("--synthetic", *erm_syn,
                      "generate data: rows=R features=V [seed=S]")
            ->expected(0, 3);
        c->add_option("--label", *erm_label, "label column name")->capture_default_str();
        c->add_option("--hidden-width", *erm_hidden, "hidden layer width")
            ->capture_default_str();
        c->add_option("--alpha", *erm_alpha, "weight regularization strength")
            ->capture_default_str();
        c->add_option("--folds", *erm_folds, "cross-validation folds")->capture_default_str();
        erm_opts->add_steps(c, 0.01, 2.0, 0.8);
        erm_opts->add_budget(c, 3000, 1e-10);
        erm_opts->add_misc(c);
        c->callback([=, &rc]() {
            rc = cmd_erm(*erm_opts, *erm_csv, *erm_syn, *erm_label, *erm_hidden, *erm_alpha,
                         *erm_folds);
        });
    }

    take_last_everywhere(app);

    try {
        std::vector<std::string> args = expand_config_args(argc, argv);
        std::reverse(args.begin(), args.end()); // CLI11 consumes back to front
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
