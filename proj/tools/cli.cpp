#include "cli.hpp"

#include "modkam/diophantine.hpp"
#include "modkam/error.hpp"
#include "modkam/jackson.hpp"
#include "modkam/json_io.hpp"
#include "modkam/kam.hpp"
#include "modkam/modulus.hpp"
#include "modkam/parallel.hpp"
#include "modkam/regularity.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace modkam::cli {

namespace {

namespace fs = std::filesystem;

struct Outcome {
    int code = 0;
    json data;
    std::string csv;       // used with --format csv
    std::string summary;   // one line for stdout
};

std::string csv_rows(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
        os << '\n';
    }
    return os.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> numbers_or(const json& in, const std::string& key, std::vector<double> fallback) {
    return in.contains(key) ? get_numbers(in, key, "input") : fallback;
}

// ---------------------------------------------------------------- subcommands

Outcome cmd_modcheck(const json& in) {
    ModulusSpec m = modulus_from_json(in.value("modulus", json()), "input.modulus");
    const double a = get_number(in, "a", "input", 0.5);
    std::vector<double> tail = numbers_or(in, "x_grid", default_tail_grid(m));
    std::vector<double> semi = numbers_or(in, "semi_grid", default_semi_grid());
    const int res = get_int(in, "r_resolution", "input", 64);
    Outcome o;
    PropertyReport ss = semi_separability(m, semi, res);
    PropertyReport wh = weak_homogeneity(m, a, tail);
    PropertyReport cv = convexity_check(m, tail);
    o.data["modulus"] = m;
    o.data["semi_separability"] = ss;
    o.data["weak_homogeneity"] = wh;
    o.data["weak_homogeneity"]["a"] = a;
    o.data["weak_homogeneity"]["limsup"] = wh.limit_estimate;
    o.data["convexity"] = cv;
    std::vector<std::vector<double>> rows;
    for (const auto& w : ss.witness) rows.push_back({0, w.x, w.value});
    for (const auto& w : wh.witness) rows.push_back({1, w.x, w.value});
    for (const auto& w : cv.witness) rows.push_back({2, w.x, w.value});
    o.csv = csv_rows({"property", "x", "value"}, rows);
    std::ostringstream s;
    s << "modcheck: semi_separable=" << (ss.verdict ? "true" : "false")
      << " weak_homogeneous=" << (wh.verdict ? "true" : "false") << " limsup=" << format_double(wh.limit_estimate)
      << " convex=" << (cv.verdict ? "true" : "false");
    if (in.contains("compare_to")) {
        ModulusSpec m2 = modulus_from_json(in["compare_to"], "input.compare_to");
        Ordering ord = compare(m, m2, tail);
        o.data["comparison"] = to_string(ord);
        s << " comparison=" << to_string(ord);
    }
    o.summary = s.str();
    return o;
}

Outcome cmd_dini(const json& in) {
    ModulusSpec m = modulus_from_json(in.value("modulus", json()), "input.modulus");
    Outcome o;
    IntegralVerdict v;
    if (in.value("classical", false)) {
        v = classical_dini(m);
        o.data["integral"] = "classical";
    } else {
        const int k = get_int(in, "k", "input");
        const double tau = get_number(in, "tau", "input");
        v = dini_integral(m, k, tau);
        o.data["k"] = k;
        o.data["tau"] = tau;
    }
    o.data["modulus"] = m;
    json vj = v;
    o.data.update(vj);
    std::vector<std::vector<double>> rows;
    for (const auto& t : v.truncation_trace) rows.push_back({t.upper, t.log_partial});
    o.csv = csv_rows({"ln_inv_a", "ln_partial"}, rows);
    o.code = v.converges ? 0 : 1;
    o.summary = std::string("dini: ") + (v.converges ? "converges value=" + format_double(v.value) : "diverges");
    return o;
}

PhiFunction phi_from_input(const json& in) {
    ModulusSpec m = modulus_from_json(in.value("modulus", json()), "input.modulus");
    if (in.contains("power_shift")) {
        PhiFunction p;
        p.base_modulus = m;
        p.power_shift = get_number(in, "power_shift", "input");
        return p;
    }
    const int i = get_int(in, "i", "input");
    if (i != 1 && i != 2) throw ArgumentError("input.i: must be 1 or 2");
    return phi_from_modulus(m, get_int(in, "k", "input"), get_number(in, "tau", "input"), i);
}

Outcome cmd_kstar(const json& in) {
    PhiFunction phi = phi_from_input(in);
    const int ks = critical_exponent(phi);
    Outcome o;
    o.data["phi"] = {{"modulus", phi.base_modulus}, {"power_shift", phi.power_shift}, {"label", phi.label}};
    o.data["k_star"] = ks;
    o.csv = csv_rows({"power_shift", "k_star"}, {{phi.power_shift, static_cast<double>(ks)}});
    o.summary = "kstar: k_star=" + std::to_string(ks);
    return o;
}

Outcome cmd_remaining(const json& in) {
    PhiFunction phi = phi_from_input(in);
    const double eps = get_number(in, "epsilon", "input", 0.5);
    if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("input.epsilon: must lie in (0, 1)");
    const int ks = in.contains("k_star") ? get_int(in, "k_star", "input") : critical_exponent(phi);
    RemainingOptions opt;
    opt.tolerance = get_number(in, "tolerance", "input", opt.tolerance);
    RegularityReport rep;
    if (in.contains("gamma")) {
        rep = remaining_modulus(phi, ks, eps, get_numbers(in, "gamma", "input"), opt);
    } else {
        std::vector<double> lg = in.contains("log_gamma") ? get_numbers(in, "log_gamma", "input") : default_log_gamma_grid(eps);
        rep = remaining_modulus_log(phi, ks, eps, lg, opt);
    }
    Outcome o;
    o.data = rep;
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < rep.log_gamma.size(); ++j)
        rows.push_back({rep.log_gamma[j], rep.log_omega_star[j], rep.log_L[j], rep.balance_mismatch[j]});
    o.csv = csv_rows({"ln_gamma", "ln_omega_star", "ln_L", "balance_mismatch"}, rows);
    o.summary = "remaining: k_star=" + std::to_string(rep.k_star) + " balance_residual=" + format_double(rep.balance_residual);
    return o;
}

Outcome cmd_jackson(const json& in) {
    const int k = get_int(in, "k", "input");
    const double ah = get_number(in, "alpha_hat", "input");
    const int n = get_int(in, "n", "input", 8192);
    std::vector<double> rs;
    for (int j = 3; j <= 9; ++j) rs.push_back(std::ldexp(1.0, -j));
    rs = numbers_or(in, "r", rs);
    ModulusSpec m = in.contains("modulus") ? modulus_from_json(in["modulus"], "input.modulus") : ModulusSpec::hoelder(ah);
    TorusFunction f = synthesize_ck_function(k, ah, n);
    SmoothErrorReport rep = smooth_error_report(f, m, k, rs);
    Outcome o;
    o.data = rep;
    std::vector<std::vector<double>> rows;
    for (const auto& r : rep.rows) rows.push_back({r.r, static_cast<double>(r.order), r.error, r.strip_error, r.bound, r.ratio});
    o.csv = csv_rows({"r", "order", "error", "strip_error", "bound", "ratio"}, rows);
    o.summary = "jackson-bench: slope=" + format_double(rep.fits.empty() ? 0.0 : rep.fits[0].slope_vs_r);
    return o;
}

Outcome cmd_dio(const json& in) {
    std::vector<double> omega = get_numbers(in, "omega", "input");
    const double tau = get_number(in, "tau", "input");
    const int kmax = get_int(in, "k_max", "input", 200);
    if (omega.size() < 2) throw ArgumentError("input.omega: need at least two components");
    if (kmax < 1) throw ArgumentError("input.k_max: must be >= 1");
    Outcome o;
    DioResult r = dio_search(omega, tau, kmax);
    o.data["search"] = r;
    o.csv = csv_rows({"value", "resonant"}, {{r.value, r.resonant ? 1.0 : 0.0}});
    try {
        Frequency f = certify(omega, tau, kmax);
        o.data["certificate"] = f;
        o.summary = "dio: certified alpha_star=" + format_double(*f.alpha_star);
    } catch (const ResonanceError& e) {
        o.data["error"] = {{"kind", "resonance"}, {"message", e.what()}, {"witness", r.witness}};
        o.code = 1;
        o.summary = std::string("dio: ") + e.what();
    }
    return o;
}

Outcome cmd_regularity(const json& in) {
    RegularityReport rep = regularity_from_deltas(get_numbers(in, "r", "input"), get_numbers(in, "deltas", "input"));
    Outcome o;
    o.data = rep;
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < rep.log_gamma.size(); ++j) rows.push_back({rep.log_gamma[j], rep.log_omega_star[j]});
    o.csv = csv_rows({"ln_gamma", "ln_omega_star"}, rows);
    o.summary = rep.analytic_limit ? "regularity: analytic limit" : "regularity: k_star=" + std::to_string(rep.k_star);
    return o;
}

json hypothesis_json(const HamiltonianModel& model, const Frequency& f) { return check_hypotheses(model, f); }

Outcome cmd_kam(const json& in, const CommandConfig& cfg, std::ostream& err) {
    HamiltonianModel model = model_from_json(in.value("model", json()), "input.model");
    std::vector<double> omega = in.contains("omega") ? get_numbers(in, "omega", "input") : model.omega;
    if (static_cast<int>(omega.size()) != model.n) throw ArgumentError("input.omega: dimension mismatch with the model");
    const double tau = get_number(in, "tau", "input");
    KamConfig kc = kam_config_from_json(in.value("config", json()));
    const int kmax = get_int(in, "k_max", "input", kc.lattice);
    Frequency freq;
    freq.omega = omega;
    freq.tau = tau;
    freq.k_max = kmax;

    Outcome o;
    o.data["hypotheses"] = hypothesis_json(model, freq);
    IterationTrace partial;
    KamResult res;
    try {
        res = run_kam(model, freq, kc, &partial);
    } catch (const HypothesisError& e) {
        o.code = 1;
        o.data["error"] = {{"kind", "hypothesis"}, {"hypothesis", e.hypothesis}, {"margin", e.margin}, {"message", e.what()}};
        o.summary = std::string("kam-run: ") + e.what();
        return o;
    } catch (const DivergenceError& e) {
        o.code = 1;
        o.data["error"] = {{"kind", "divergence"}, {"message", e.what()}};
        o.data["trace"] = partial.records;
        o.csv = trace_csv(partial);
        o.summary = std::string("kam-run: ") + e.what();
        return o;
    }
    auto resid = invariance_residual(model, res.torus, omega);
    o.data["residual"] = {{"du_minus_hy", resid.first}, {"dv_plus_hx", resid.second},
                          {"composition_gap", composition_gap(res)}, {"min_jacobian_det", res.torus.min_jacobian_det()},
                          {"steps", res.trace.records.size()}, {"stop_reason", res.trace.stop_reason}};
    double max_freq = 0.0;
    for (const auto& r : res.trace.records) max_freq = std::max(max_freq, r.freq_error);
    o.data["residual"]["max_frequency_error"] = max_freq;
    // regularity of the conjugacy
    int k1 = 0, k2 = 0;
    json reg;
    try {
        auto th = theoretical_regularity(model.modulus, model.k, tau, model.epsilon, &k1, &k2);
        reg["theoretical"] = {{"k1_star", k1}, {"k2_star", k2}, {"u", th.first}, {"w", th.second}};
    } catch (const std::exception& e) {
        reg["theoretical"] = {{"error", e.what()}};
    }
    std::vector<double> r, du, dw;
    for (const auto& rec : res.trace.records) {
        r.push_back(rec.r_nu);
        du.push_back(rec.u_delta);
        dw.push_back(rec.w_delta);
    }
    for (auto [name, d] : {std::pair<const char*, const std::vector<double>*>{"u", &du}, {"w", &dw}}) {
        try {
            reg["measured"][name] = regularity_from_deltas(r, *d);
        } catch (const std::exception& e) {
            reg["measured"][name] = {{"error", e.what()}};
        }
    }
    o.data["regularity"] = reg;
    o.data["torus"] = res.torus;
    o.data["trace"] = res.trace.records;
    o.csv = trace_csv(res.trace);
    std::ostringstream s;
    s << "kam-run: steps=" << res.trace.records.size() << " max_freq_error=" << format_double(max_freq)
      << " residual=(" << format_double(resid.first) << ", " << format_double(resid.second) << ")";
    o.summary = s.str();
    if (cfg.verbosity > 0) err << o.summary << '\n';
    return o;
}

json read_input(const std::string& path) {
    if (path.empty()) throw ArgumentError("--input is required");
    fs::path p(path);
    if (p.extension() == ".toml") throw ArgumentError("input: TOML documents are not supported, use JSON");
    std::ifstream f(path);
    if (!f) throw ArgumentError("input: cannot open '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ArgumentError(std::string("input: malformed JSON: ") + e.what());
    }
}

void write_file(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ArgumentError("output: cannot write '" + p.string() + "'");
    f << s;
}

void emit(const CommandConfig& cfg, const Outcome& o, std::ostream& out) {
    const std::string body = cfg.format == Format::csv ? o.csv : dump(o.data);
    if (cfg.subcommand == "kam-run") {
        if (cfg.output.empty()) {
            out << body;
        } else {
            fs::path dir(cfg.output);
            fs::create_directories(dir);
            write_file(dir / "trace.csv", o.csv);
            json torus = o.data.contains("torus") ? o.data["torus"] : json::object();
            write_file(dir / "torus.json", dump(torus));
            json summary = o.data;
            summary.erase("torus");
            summary.erase("trace");
            write_file(dir / "residual.json", dump(summary));
        }
    } else if (cfg.output.empty()) {
        out << body;
    } else {
        write_file(cfg.output, body);
    }
    out << o.summary << '\n';
}

} // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s{"modcheck", "dini", "kstar", "remaining", "jackson-bench", "dio", "kam-run", "regularity"};
    return s;
}

int dispatch(const CommandConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto& subs = subcommands();
    if (std::find(subs.begin(), subs.end(), cfg.subcommand) == subs.end()) {
        err << "error: unknown subcommand '" << cfg.subcommand << "'\n";
        return 2;
    }
    if (cfg.threads < 1) {
        err << "error: --threads must be >= 1\n";
        return 2;
    }
    set_thread_count(cfg.threads);
    try {
        json in = read_input(cfg.input);
        if (!in.is_object()) throw ArgumentError("input: top level must be an object");
        Outcome o;
        const auto& s = cfg.subcommand;
        if (s == "modcheck") o = cmd_modcheck(in);
        else if (s == "dini") o = cmd_dini(in);
        else if (s == "kstar") o = cmd_kstar(in);
        else if (s == "remaining") o = cmd_remaining(in);
        else if (s == "jackson-bench") o = cmd_jackson(in);
        else if (s == "dio") o = cmd_dio(in);
        else if (s == "regularity") o = cmd_regularity(in);
        else o = cmd_kam(in, cfg, err);
        emit(cfg, o, out);
        if (o.code != 0) {
            json diag = o.data.contains("error") ? o.data["error"] : json{{"summary", o.summary}};
            err << diag.dump() << '\n';
        }
        return o.code;
    } catch (const ArgumentError& e) {
        err << json{{"kind", "usage"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << json{{"kind", "usage"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    } catch (const json::exception& e) {
        err << json{{"kind", "usage"}, {"message", e.what()}}.dump() << '\n';
        return 2;
    } catch (const HypothesisError& e) {
        err << json{{"kind", "hypothesis"}, {"hypothesis", e.hypothesis}, {"message", e.what()}}.dump() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << json{{"kind", "analysis"}, {"message", e.what()}}.dump() << '\n';
        return 1;
    }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"modulus-of-continuity KAM toolkit"};
    app.require_subcommand(1);
    CommandConfig cfg;
    std::string fmt = "json";
    for (const auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--input,-i", cfg.input, "input JSON document")->required();
        sub->add_option("--output,-o", cfg.output, "output file (directory for kam-run)");
        sub->add_option("--format,-f", fmt, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", cfg.seed, "seed recorded for reproducibility");
        sub->add_flag("--verbose,-v", cfg.verbosity, "verbosity");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    for (auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
    cfg.format = fmt == "csv" ? Format::csv : Format::json;
    return dispatch(cfg, out, err);
}

} // namespace modkam::cli
