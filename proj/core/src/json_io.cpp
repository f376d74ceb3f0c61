#include "modkam/json_io.hpp"

#include "modkam/error.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace modkam {

namespace {

const json& require(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object()) throw ArgumentError(where + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ArgumentError(where + "." + key + ": missing");
    return *it;
}

json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

const json& params_of(const json& j) {
    auto it = j.find("params");
    return (it != j.end() && it->is_object()) ? *it : j;
}

TorusFunction torus_function_from_json(const json& j, int n, int N, const std::string& where) {
    TorusFunction f(n, N);
    if (j.is_number()) {
        f.set_mean(j.get<double>());
        return f;
    }
    if (!j.is_array()) throw ArgumentError(where + ": expected a number or a list of [k..., re, im] entries");
    for (std::size_t e = 0; e < j.size(); ++e) {
        const json& row = j[e];
        const std::string w = where + "[" + std::to_string(e) + "]";
        if (!row.is_array() || row.size() < static_cast<std::size_t>(n + 1) || row.size() > static_cast<std::size_t>(n + 2))
            throw ArgumentError(w + ": expected [k_1, ..., k_n, re(, im)]");
        std::vector<int> k;
        for (int d = 0; d < n; ++d) {
            if (!row[static_cast<std::size_t>(d)].is_number_integer()) throw ArgumentError(w + ": frequency must be integer");
            int kk = row[static_cast<std::size_t>(d)].get<int>();
            if (std::abs(kk) >= N / 2) throw ArgumentError(w + ": frequency outside the lattice");
            k.push_back(kk);
        }
        if (!row[static_cast<std::size_t>(n)].is_number()) throw ArgumentError(w + ": coefficient must be numeric");
        double re = row[static_cast<std::size_t>(n)].get<double>();
        double im = row.size() == static_cast<std::size_t>(n + 2) ? row[static_cast<std::size_t>(n + 1)].get<double>() : 0.0;
        f.set_coeff(k, f.coeff(k) + cplx(re, im));
    }
    return f;
}

} // namespace

double get_number(const json& j, const std::string& key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_number()) throw ArgumentError(where + "." + key + ": expected a number");
    return v.get<double>();
}

double get_number(const json& j, const std::string& key, const std::string& where, double fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return get_number(j, key, where);
}

int get_int(const json& j, const std::string& key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_number_integer()) throw ArgumentError(where + "." + key + ": expected an integer");
    return v.get<int>();
}

int get_int(const json& j, const std::string& key, const std::string& where, int fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return get_int(j, key, where);
}

std::vector<double> get_numbers(const json& j, const std::string& key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_array()) throw ArgumentError(where + "." + key + ": expected a list of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ArgumentError(where + "." + key + ": expected a list of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

ModulusSpec modulus_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ArgumentError(where + ": expected an object");
    const json& kind_j = require(j, "kind", where);
    if (!kind_j.is_string()) throw ArgumentError(where + ".kind: expected a string");
    ModulusKind kind;
    try {
        kind = modulus_kind_from_string(kind_j.get<std::string>());
    } catch (const ArgumentError&) {
        throw ArgumentError(where + ".kind: unknown modulus kind '" + kind_j.get<std::string>() + "'");
    }
    const json& p = params_of(j);
    const std::string pw = where + (j.contains("params") ? ".params" : "");
    ModulusSpec m;
    switch (kind) {
    case ModulusKind::hoelder:
        m = ModulusSpec::hoelder(get_number(p, "alpha", pw), get_number(j, "delta", where, 1.0));
        break;
    case ModulusKind::log_hoelder:
        m = ModulusSpec::log_hoelder(get_number(p, "lambda", pw), get_number(j, "delta", where, 0.5));
        break;
    case ModulusKind::gen_log_hoelder: {
        int depth = get_int(p, "depth", pw);
        double lambda = get_number(p, "lambda", pw);
        m = j.contains("delta") ? ModulusSpec::gen_log_hoelder(depth, lambda, get_number(j, "delta", where))
                                : ModulusSpec::gen_log_hoelder(depth, lambda);
        break;
    }
    case ModulusKind::power_log:
        m = ModulusSpec::power_log(get_number(p, "alpha", pw), get_number(p, "lambda", pw), get_number(j, "delta", where, 0.5));
        break;
    case ModulusKind::tabulated:
        if (p.contains("log_x")) {
            m = ModulusSpec::tabulated_log(get_numbers(p, "log_x", pw), get_numbers(p, "log_w", pw));
        } else {
            const json& s = require(p, "samples", pw);
            if (!s.is_array()) throw ArgumentError(pw + ".samples: expected a list of [x, w] pairs");
            std::vector<std::pair<double, double>> pairs;
            for (const auto& e : s) {
                if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                    throw ArgumentError(pw + ".samples: expected a list of [x, w] pairs");
                pairs.emplace_back(e[0].get<double>(), e[1].get<double>());
            }
            m = ModulusSpec::tabulated(pairs);
        }
        break;
    }
    return m;
}

HamiltonianModel model_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ArgumentError(where + ": expected an object");
    const json& kind_j = require(j, "kind", where);
    if (!kind_j.is_string()) throw ArgumentError(where + ".kind: expected a string");
    ModelKind kind;
    try {
        kind = model_kind_from_string(kind_j.get<std::string>());
    } catch (const ArgumentError&) {
        throw ArgumentError(where + ".kind: unknown model kind '" + kind_j.get<std::string>() + "'");
    }
    if (kind != ModelKind::custom) {
        ExampleParams ep;
        ep.omega = get_numbers(j, "omega", where);
        ep.M = get_number(j, "M", where, ep.M);
        ep.epsilon = get_number(j, "epsilon", where, kind == ModelKind::integrable ? 0.0 : ep.epsilon);
        ep.lambda = get_number(j, "lambda", where, ep.lambda);
        ep.ell = get_number(j, "ell", where, ep.ell);
        ep.k = get_int(j, "k", where, ep.k);
        ep.lattice = get_int(j, "lattice", where, ep.lattice);
        return build_example_hamiltonian(kind, ep);
    }
    HamiltonianModel m;
    m.kind = ModelKind::custom;
    m.omega = get_numbers(j, "omega", where);
    m.n = static_cast<int>(m.omega.size());
    if (m.n < 1 || m.n > 3) throw ArgumentError(where + ".omega: dimension must be 1, 2 or 3");
    const int N = get_int(j, "lattice", where, 16);
    if (N < 4 || N % 2) throw ArgumentError(where + ".lattice: must be even and >= 4");
    m.M = get_number(j, "M", where);
    m.epsilon = get_number(j, "epsilon", where);
    m.k = get_int(j, "k", where);
    m.rho = get_number(j, "rho", where, 1.0);
    m.modulus = modulus_from_json(require(j, "modulus", where), where + ".modulus");
    m.h0 = j.contains("h0") ? torus_function_from_json(j["h0"], m.n, N, where + ".h0") : TorusFunction(m.n, N);
    const json& h1 = require(j, "h1", where);
    if (!h1.is_array() || static_cast<int>(h1.size()) != m.n) throw ArgumentError(where + ".h1: expected n entries");
    for (int i = 0; i < m.n; ++i)
        m.h1.push_back(torus_function_from_json(h1[static_cast<std::size_t>(i)], m.n, N, where + ".h1[" + std::to_string(i) + "]"));
    const json& h2 = require(j, "h2", where);
    if (!h2.is_array() || static_cast<int>(h2.size()) != m.n * m.n) throw ArgumentError(where + ".h2: expected n*n entries");
    for (int i = 0; i < m.n * m.n; ++i)
        m.h2.push_back(torus_function_from_json(h2[static_cast<std::size_t>(i)], m.n, N, where + ".h2[" + std::to_string(i) + "]"));
    if (j.contains("p_lambda")) {
        double lam = get_number(j, "p_lambda", where);
        if (!(lam > 0.0)) throw ArgumentError(where + ".p_lambda: must be positive");
        m.P = std::make_shared<const ActionProfile>(lam);
        m.p_scale = get_number(j, "p_scale", where, m.epsilon);
    }
    return m;
}

KamConfig kam_config_from_json(const json& j) {
    KamConfig c;
    if (j.is_null()) return c;
    if (!j.is_object()) throw ArgumentError("config: expected an object");
    c.theta = get_number(j, "theta", "config", c.theta);
    c.nu_max = get_int(j, "nu_max", "config", c.nu_max);
    c.min_steps = get_int(j, "min_steps", "config", c.min_steps);
    c.lattice = get_int(j, "cutoff", "config", c.lattice);
    c.max_inner = get_int(j, "max_inner", "config", c.max_inner);
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        c.newton_tol = get_number(t, "newton", "config.tolerances", c.newton_tol);
        c.accept_tol = get_number(t, "frequency", "config.tolerances", c.accept_tol);
        c.stop_floor = get_number(t, "floor", "config.tolerances", c.stop_floor);
        c.inversion_tol = get_number(t, "inversion", "config.tolerances", c.inversion_tol);
        c.gate = get_number(t, "gate", "config.tolerances", c.gate);
    }
    if (c.nu_max < 0) throw ArgumentError("config.nu_max: must be >= 0");
    if (c.lattice < 4 || c.lattice % 2) throw ArgumentError("config.cutoff: must be even and >= 4");
    if (!(c.theta > 0.0 && c.theta < 1.0)) throw ArgumentError("config.theta: must lie in (0, 1)");
    return c;
}

void to_json(json& j, const ModulusSpec& m) {
    j = json::object();
    j["kind"] = to_string(m.kind);
    json p = json::object();
    switch (m.kind) {
    case ModulusKind::hoelder: p["alpha"] = m.alpha; break;
    case ModulusKind::log_hoelder: p["lambda"] = m.lambda; break;
    case ModulusKind::gen_log_hoelder:
        p["depth"] = m.depth;
        p["lambda"] = m.lambda;
        break;
    case ModulusKind::power_log:
        p["alpha"] = m.alpha;
        p["lambda"] = m.lambda;
        break;
    case ModulusKind::tabulated:
        p["log_x"] = nums(m.log_x);
        p["log_w"] = nums(m.log_w);
        if (m.has_tail) p["tail"] = {{"a", num(m.tail.a)}, {"b", num(m.tail.b)}};
        break;
    }
    j["params"] = p;
    j["delta"] = num(m.delta);
}

void to_json(json& j, const PropertyReport& r) {
    j = json::object();
    j["property"] = to_string(r.property);
    j["verdict"] = r.verdict;
    json w = json::array();
    for (const auto& p : r.witness) w.push_back({{"x", num(p.x)}, {"value", num(p.value)}});
    j["witness"] = w;
    j["bound_constant"] = num(r.bound_constant);
    if (!r.implied.empty()) {
        json a = json::array();
        for (auto p : r.implied) a.push_back(to_string(p));
        j["implied"] = a;
    }
    if (r.property == Property::convex) j["second_difference_extreme"] = num(r.second_difference_extreme);
    if (r.property == Property::weak_homogeneous) j["limit_estimate"] = num(r.limit_estimate);
}

void to_json(json& j, const IntegralVerdict& v) {
    j = json::object();
    j["verdict"] = v.converges ? "converges" : "diverges";
    j["value"] = num(v.value);
    j["log_value"] = num(v.log_value);
    j["divergence_rate"] = num(v.divergence_rate);
    j["decay_power"] = num(v.decay_power);
    json t = json::array();
    for (const auto& p : v.truncation_trace) t.push_back({num(p.upper), num(p.log_partial)});
    j["truncation_trace"] = t;
}

void to_json(json& j, const RegularityReport& r) {
    j = json::object();
    j["analytic_limit"] = r.analytic_limit;
    if (r.analytic_limit) return;
    j["k_star"] = r.k_star;
    j["epsilon"] = num(r.epsilon);
    std::vector<double> g, w, L;
    for (double x : r.log_gamma) g.push_back(std::exp(x));
    for (double x : r.log_omega_star) w.push_back(std::exp(x));
    for (double x : r.log_L) L.push_back(std::exp(x));
    j["gamma"] = nums(g);
    j["omega_star"] = nums(w);
    j["L"] = nums(L);
    j["ln_gamma"] = nums(r.log_gamma);
    j["ln_omega_star"] = nums(r.log_omega_star);
    j["ln_L"] = nums(r.log_L);
    j["balance_mismatch"] = nums(r.balance_mismatch);
    j["balance_residual"] = num(r.balance_residual);
    j["tolerance"] = num(r.tolerance);
    if (r.log_gamma.size() >= 3) {
        ExponentFit f = fit_remaining_exponents(r);
        j["fit"] = {{"power", num(f.power)}, {"log_power", num(f.log_power)},
                    {"power_only", num(f.power_only)}, {"log_only", num(f.log_only)}};
    }
    if (r.phi_fit) j["phi_fit"] = *r.phi_fit;
}

void to_json(json& j, const DioResult& r) {
    j = json::object();
    j["value"] = num(r.value);
    j["witness"] = r.witness;
    j["resonant"] = r.resonant;
}

void to_json(json& j, const Frequency& f) {
    j = json::object();
    j["omega"] = nums(f.omega);
    j["tau"] = num(f.tau);
    j["alpha_star"] = f.alpha_star ? num(*f.alpha_star) : json(nullptr);
    j["k_max"] = f.k_max;
}

void to_json(json& j, const SmoothErrorReport& r) {
    j = json::object();
    json rows = json::array();
    for (const auto& e : r.rows)
        rows.push_back({{"r", num(e.r)}, {"order", e.order}, {"error", num(e.error)}, {"strip_error", num(e.strip_error)},
                        {"bound", num(e.bound)}, {"ratio", num(e.ratio)}});
    j["rows"] = rows;
    json fits = json::array();
    for (const auto& f : r.fits)
        fits.push_back({{"order", f.order}, {"slope_vs_r", num(f.slope_vs_r)}, {"slope_vs_bound", num(f.slope_vs_bound)},
                        {"offset", num(f.offset)}, {"exact", f.exact}, {"non_monotone", f.non_monotone}});
    j["fits"] = fits;
}

void to_json(json& j, const HypothesisReport& r) {
    j = json::object();
    json a = json::array();
    for (const auto& c : r.checks)
        a.push_back({{"name", c.name}, {"passed", c.passed}, {"lhs", num(c.lhs)}, {"rhs", num(c.rhs)},
                     {"margin", num(c.margin)}, {"detail", c.detail}});
    j["checks"] = a;
    j["all_passed"] = r.all_passed();
}

void to_json(json& j, const StepRecord& r) {
    j = json::object();
    j["nu"] = r.nu;
    j["r_nu"] = num(r.r_nu);
    j["psi_minus_id"] = num(r.psi_minus_id);
    j["psi_jac_minus_id"] = num(r.psi_jac_minus_id);
    j["freq_error_in"] = num(r.freq_error_in);
    j["angle_error_in"] = num(r.angle_error_in);
    j["freq_error"] = num(r.freq_error);
    j["angle_error"] = num(r.angle_error);
    j["u_delta"] = num(r.u_delta);
    j["w_delta"] = num(r.w_delta);
    j["q_diff"] = num(r.q_diff);
    j["ux_sup"] = num(r.ux_sup);
    j["jac_sum"] = num(r.jac_sum);
    j["ratio_psi"] = num(r.ratio_psi);
    j["ratio_jac"] = num(r.ratio_jac);
    j["ratio_q"] = num(r.ratio_q);
    j["ratio_ux"] = num(r.ratio_ux);
    j["ratio_u"] = num(r.ratio_u);
    j["ratio_w"] = num(r.ratio_w);
    j["residual_y"] = num(r.residual_y);
    j["residual_x"] = num(r.residual_x);
    j["min_det"] = num(r.min_det);
    j["inner_iterations"] = r.inner_iterations;
}

void to_json(json& j, const TorusFunction& f) {
    j = json::object();
    j["dim"] = f.dim();
    j["lattice"] = f.n();
    json c = json::array();
    const auto& co = f.coefficients();
    for (std::size_t i = 0; i < co.size(); ++i) {
        if (std::abs(co[i]) == 0.0) continue;
        json row = json::array();
        for (int k : f.frequencies(i)) row.push_back(k);
        row.push_back(num(co[i].real()));
        row.push_back(num(co[i].imag()));
        c.push_back(row);
    }
    j["coefficients"] = c;
}

void to_json(json& j, const TorusMap& t) {
    j = json::object();
    j["n"] = t.n;
    j["lattice"] = t.lattice;
    j["strip"] = num(t.strip);
    j["u_minus_id"] = t.u_minus_id;
    j["v"] = t.v;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trace_csv(const IterationTrace& trace) {
    std::ostringstream os;
    os << "nu,r_nu,psi_minus_id,psi_jac_minus_id,freq_error_in,angle_error_in,freq_error,angle_error,u_delta,w_delta,"
          "q_diff,ux_sup,jac_sum,ratio_psi,ratio_jac,ratio_q,ratio_ux,ratio_u,ratio_w,residual_y,residual_x,min_det,"
          "inner_iterations\n";
    for (const auto& r : trace.records) {
        const double v[] = {r.r_nu, r.psi_minus_id, r.psi_jac_minus_id, r.freq_error_in, r.angle_error_in, r.freq_error,
                            r.angle_error, r.u_delta, r.w_delta, r.q_diff, r.ux_sup, r.jac_sum, r.ratio_psi, r.ratio_jac,
                            r.ratio_q, r.ratio_ux, r.ratio_u, r.ratio_w, r.residual_y, r.residual_x, r.min_det};
        os << r.nu;
        for (double x : v) os << ',' << format_double(x);
        os << ',' << r.inner_iterations << '\n';
    }
    return os.str();
}

} // namespace modkam
