#include "hypetc/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>
#include <variant>

#include <json.hpp>

#include "hypetc/csv.hpp"
#include "hypetc/error.hpp"

namespace hypetc {

using nlohmann::json;

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::OpenLoop: return "open_loop";
        case Mode::Ctc: return "ctc";
        case Mode::Cetc: return "cetc";
        case Mode::Petc: return "petc";
        case Mode::Stc: return "stc";
    }
    return "?";
}

Mode parse_mode(std::string_view text) {
    for (Mode m : {Mode::OpenLoop, Mode::Ctc, Mode::Cetc, Mode::Petc, Mode::Stc}) {
        if (text == to_string(m)) return m;
    }
    if (text == "ol") return Mode::OpenLoop;
    throw Error(ErrorCode::InvalidConfig, "unknown mode '" + std::string(text) + "'");
}

PlantCoefficients RawPlant::coefficients() const {
    return PlantCoefficients::constant(lambda1, lambda2, c1, c2, q, rho, ell);
}

RunConfig default_config() {
    RunConfig cfg;
    cfg.etc.C = 413.4211;
    return cfg;
}

void RunConfig::validate() const {
    if (canal.has_value() == raw.has_value()) {
        throw Error(ErrorCode::InvalidConfig, "exactly one of plant.canal and plant.raw is required");
    }
    if (stride == 0) throw Error(ErrorCode::InvalidConfig, "output stride must be positive");
    etc.validate();
    if (!(kernel.tol > 0.0) || kernel.max_iter == 0) {
        throw Error(ErrorCode::InvalidConfig, "kernel tol and max_iter must be positive");
    }
    if (!(petc.h_frac > 0.0 && petc.h_frac <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "petc.h_frac must lie in (0, 1]");
    }
    if (!(stc.delta_bar > 0.0)) throw Error(ErrorCode::InvalidConfig, "stc.delta_bar must be positive");
    if (!(stc.phi_u >= 0.0) || !(stc.phi_v >= 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "stc.phi_u and stc.phi_v must be nonnegative");
    }
    const PlantCoefficients coeffs = canal ? linearize(*canal).plant : raw->coefficients();
    coeffs.validate();
    sim.validate(coeffs);
}

// ---------------------------------------------------------------------------
// JSON configuration

namespace {

void check_keys(const json& obj, std::string_view where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) {
        throw Error(ErrorCode::InvalidConfig, std::string(where) + " must be an object");
    }
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) {
            throw Error(ErrorCode::InvalidConfig,
                        "unknown key '" + key + "' in " + std::string(where));
        }
    }
}

template <typename T>
void read(const json& obj, const char* key, T& dst) {
    if (!obj.contains(key)) return;
    try {
        dst = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("bad value for '") + key + "': " + e.what());
    }
}

void read_optional(const json& obj, const char* key, std::optional<double>& dst) {
    if (!obj.contains(key)) return;
    if (obj.at(key).is_null()) {
        dst.reset();
        return;
    }
    double v = 0.0;
    read(obj, key, v);
    dst = v;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("malformed JSON: ") + e.what());
    }
    RunConfig cfg = default_config();
    check_keys(doc, "config",
               {"mode", "plant", "etc", "petc", "stc", "sim", "kernel", "initial", "output"});

    if (doc.contains("mode")) {
        std::string m;
        read(doc, "mode", m);
        cfg.mode = parse_mode(m);
    }
    if (doc.contains("plant")) {
        const json& p = doc["plant"];
        check_keys(p, "plant", {"canal", "raw"});
        cfg.canal.reset();
        cfg.raw.reset();
        if (p.contains("canal")) {
            const json& c = p["canal"];
            check_keys(c, "plant.canal", {"g", "ell", "Cf", "H_eq", "V_eq", "H_ell", "k_G", "S_b"});
            CanalConfig canal;
            read(c, "g", canal.g);
            read(c, "ell", canal.ell);
            read(c, "Cf", canal.Cf);
            read(c, "H_eq", canal.H_eq);
            read(c, "V_eq", canal.V_eq);
            read(c, "H_ell", canal.H_ell);
            read(c, "k_G", canal.k_G);
            read_optional(c, "S_b", canal.S_b);
            cfg.canal = canal;
        }
        if (p.contains("raw")) {
            const json& r = p["raw"];
            check_keys(r, "plant.raw", {"lambda1", "lambda2", "c1", "c2", "q", "rho", "ell"});
            RawPlant raw;
            read(r, "lambda1", raw.lambda1);
            read(r, "lambda2", raw.lambda2);
            read(r, "c1", raw.c1);
            read(r, "c2", raw.c2);
            read(r, "q", raw.q);
            read(r, "rho", raw.rho);
            read(r, "ell", raw.ell);
            cfg.raw = raw;
        }
    }
    if (doc.contains("etc")) {
        const json& e = doc["etc"];
        check_keys(e, "etc", {"eta", "theta", "sigma", "m0", "mu", "delta", "C", "c_margin"});
        read(e, "eta", cfg.etc.eta);
        read(e, "theta", cfg.etc.theta);
        read(e, "sigma", cfg.etc.sigma);
        read(e, "m0", cfg.etc.m0);
        read(e, "mu", cfg.etc.mu);
        read(e, "delta", cfg.etc.delta);
        read_optional(e, "C", cfg.etc.C);
        read(e, "c_margin", cfg.etc.c_margin);
    }
    if (doc.contains("petc")) {
        const json& p = doc["petc"];
        check_keys(p, "petc", {"h", "h_frac"});
        read_optional(p, "h", cfg.petc.h);
        read(p, "h_frac", cfg.petc.h_frac);
    }
    if (doc.contains("stc")) {
        const json& s = doc["stc"];
        check_keys(s, "stc", {"delta_bar", "phi_u", "phi_v", "F_floor", "G_max_factor"});
        read(s, "delta_bar", cfg.stc.delta_bar);
        read(s, "phi_u", cfg.stc.phi_u);
        read(s, "phi_v", cfg.stc.phi_v);
        read(s, "F_floor", cfg.stc.options.F_floor);
        read(s, "G_max_factor", cfg.stc.options.G_max_factor);
    }
    if (doc.contains("sim")) {
        const json& s = doc["sim"];
        check_keys(s, "sim", {"dt", "n_x", "t_end"});
        read(s, "dt", cfg.sim.dt);
        read(s, "n_x", cfg.sim.n_x);
        read(s, "t_end", cfg.sim.t_end);
    }
    if (doc.contains("kernel")) {
        const json& k = doc["kernel"];
        check_keys(k, "kernel", {"tol", "max_iter"});
        read(k, "tol", cfg.kernel.tol);
        read(k, "max_iter", cfg.kernel.max_iter);
    }
    if (doc.contains("initial")) {
        const json& i = doc["initial"];
        check_keys(i, "initial", {"first_amplitude", "first_mode", "second_amplitude",
                                  "second_mode", "observer_matches_plant"});
        read(i, "first_amplitude", cfg.initial.first_amplitude);
        read(i, "first_mode", cfg.initial.first_mode);
        read(i, "second_amplitude", cfg.initial.second_amplitude);
        read(i, "second_mode", cfg.initial.second_mode);
        read(i, "observer_matches_plant", cfg.initial.observer_matches_plant);
    }
    if (doc.contains("output")) {
        const json& o = doc["output"];
        check_keys(o, "output", {"dir", "stride", "probes", "dump_kernels"});
        std::string dir = cfg.out_dir.string();
        read(o, "dir", dir);
        cfg.out_dir = dir;
        read(o, "stride", cfg.stride);
        read(o, "probes", cfg.probes);
        read(o, "dump_kernels", cfg.dump_kernels);
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string dump_config(const RunConfig& cfg) {
    json doc = json::object();
    doc["mode"] = std::string(to_string(cfg.mode));
    json plant = json::object();
    if (cfg.canal) {
        const auto& c = *cfg.canal;
        plant["canal"] = {{"g", c.g},       {"ell", c.ell},   {"Cf", c.Cf},
                          {"H_eq", c.H_eq}, {"V_eq", c.V_eq}, {"H_ell", c.H_ell},
                          {"k_G", c.k_G},   {"S_b", optional_json(c.S_b)}};
    }
    if (cfg.raw) {
        const auto& r = *cfg.raw;
        plant["raw"] = {{"lambda1", r.lambda1}, {"lambda2", r.lambda2}, {"c1", r.c1},
                        {"c2", r.c2},           {"q", r.q},             {"rho", r.rho},
                        {"ell", r.ell}};
    }
    doc["plant"] = plant;
    doc["etc"] = {{"eta", cfg.etc.eta},     {"theta", cfg.etc.theta}, {"sigma", cfg.etc.sigma},
                  {"m0", cfg.etc.m0},       {"mu", cfg.etc.mu},       {"delta", cfg.etc.delta},
                  {"C", optional_json(cfg.etc.C)}, {"c_margin", cfg.etc.c_margin}};
    doc["petc"] = {{"h", optional_json(cfg.petc.h)}, {"h_frac", cfg.petc.h_frac}};
    doc["stc"] = {{"delta_bar", cfg.stc.delta_bar},
                  {"phi_u", cfg.stc.phi_u},
                  {"phi_v", cfg.stc.phi_v},
                  {"F_floor", cfg.stc.options.F_floor},
                  {"G_max_factor", cfg.stc.options.G_max_factor}};
    doc["sim"] = {{"dt", cfg.sim.dt}, {"n_x", cfg.sim.n_x}, {"t_end", cfg.sim.t_end}};
    doc["kernel"] = {{"tol", cfg.kernel.tol}, {"max_iter", cfg.kernel.max_iter}};
    doc["initial"] = {{"first_amplitude", cfg.initial.first_amplitude},
                      {"first_mode", cfg.initial.first_mode},
                      {"second_amplitude", cfg.initial.second_amplitude},
                      {"second_mode", cfg.initial.second_mode},
                      {"observer_matches_plant", cfg.initial.observer_matches_plant}};
    doc["output"] = {{"dir", cfg.out_dir.string()},
                     {"stride", cfg.stride},
                     {"probes", cfg.probes},
                     {"dump_kernels", cfg.dump_kernels}};
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Design

Design prepare(const RunConfig& cfg) {
    cfg.validate();
    Design d;
    if (cfg.canal) {
        d.model = linearize(*cfg.canal);
        d.coeffs = d.model->plant;
    } else {
        d.coeffs = cfg.raw->coefficients();
    }
    const auto& c = d.coeffs;
    const double rq = std::abs(c.rho * c.q);
    if (!(rq < 0.5)) {
        d.warnings.push_back("|rho q| = " + format_number(rq) + " is not below 1/2");
    }

    const TriangularGrid tri(cfg.sim.n_x, c.ell);
    d.K = solve_kernels(KernelFamily::Controller, c, tri, cfg.kernel);
    d.P = solve_kernels(KernelFamily::Observer, c, tri, cfg.kernel);
    d.L = solve_kernels(KernelFamily::InverseController, c, tri, cfg.kernel);
    d.R = solve_kernels(KernelFamily::InverseObserver, c, tri, cfg.kernel);
    d.gains = gain_profiles(d.K, d.P, d.L, c);
    d.consts = design_constants(d.gains, c, cfg.etc);
    if (d.consts.C_below_lower) {
        d.warnings.push_back("C = " + format_number(d.consts.C) +
                             " does not exceed its lower bound " + format_number(d.consts.C_lower));
    }
    if (d.consts.theta_m * cfg.sim.dt >= cfg.etc.theta) {
        // One Euler step of m can then outrun the continuous trigger check.
        d.warnings.push_back("theta_m * dt = " + format_number(d.consts.theta_m * cfg.sim.dt) +
                             " is not below theta; reduce dt");
    }
    d.stc = stc_constants(d.gains, d.R, c, cfg.stc.delta_bar, cfg.stc.phi_u, cfg.stc.phi_v);
    try {
        d.petc = cfg.petc.h ? fixed_h(*cfg.petc.h, d.consts, cfg.sim.dt)
                            : select_h(d.consts, cfg.petc.h_frac, cfg.sim.dt);
    } catch (const Error& e) {
        if (cfg.mode == Mode::Petc) throw;
        // Only PETC runs need a valid period; others report it.
        d.warnings.push_back(std::string("petc period unavailable: ") + e.what());
    }
    return d;
}

namespace {

using Value = std::variant<double, bool, std::string>;

/// Flat JSON object with numbers at 15 significant digits.
std::string flat_json(const std::vector<std::pair<std::string, Value>>& entries) {
    std::ostringstream out;
    out << "{\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& [key, value] = entries[i];
        out << "  " << json(key).dump() << ": ";
        if (const double* v = std::get_if<double>(&value)) {
            out << (std::isfinite(*v) ? format_number(*v) : std::string("null"));
        } else if (const bool* b = std::get_if<bool>(&value)) {
            out << (*b ? "true" : "false");
        } else {
            out << json(std::get<std::string>(value)).dump();
        }
        out << (i + 1 < entries.size() ? ",\n" : "\n");
    }
    out << "}\n";
    return out.str();
}

}  // namespace

std::string constants_json(const Design& d, const RunConfig& cfg) {
    const auto& c = d.coeffs;
    const auto& k = d.consts;
    const auto& s = d.stc;
    std::vector<std::pair<std::string, Value>> e = {
        {"lambda1", c.lambda1},
        {"lambda2", c.lambda2},
        {"q", c.q},
        {"rho", c.rho},
        {"ell", c.ell},
        {"reflection_product", k.reflection},
        {"assumption_small_reflection", k.reflection < 0.5},
        {"mu", k.mu},
        {"delta", k.delta},
        {"mu_upper", k.mu_upper},
        {"eta", cfg.etc.eta},
        {"theta", cfg.etc.theta},
        {"sigma", cfg.etc.sigma},
        {"m0", cfg.etc.m0},
        {"eps0", k.eps[0]},
        {"eps1", k.eps[1]},
        {"eps2", k.eps[2]},
        {"eps3", k.eps[3]},
        {"kappa0", k.kappa[0]},
        {"kappa1", k.kappa[1]},
        {"kappa2", k.kappa[2]},
        {"a", k.a},
        {"r", k.r},
        {"C", k.C},
        {"C_lower", k.C_lower},
        {"C_exceeds_lower", !k.C_below_lower},
        {"D", k.D},
        {"theta_m", k.theta_m},
        {"tau", k.tau},
        {"h", d.petc.h},
        {"mu_bar", s.mu_bar},
        {"delta_bar", s.delta_bar},
        {"C_bar", s.C_bar},
        {"D_bar", s.D_bar},
        {"P_V2", s.P_V2},
        {"varrho", s.varrho},
        {"r_d", s.r_d},
        {"phi_u", s.phi_u},
        {"phi_v", s.phi_v},
        {"phi_alpha", s.phi_alpha},
        {"phi_beta", s.phi_beta},
        {"transit_time", s.transit},
        {"Nalpha_0", d.gains.Nalpha.front()},
        {"Nbeta_0", d.gains.Nbeta.front()},
        {"Nalpha_ell", d.gains.Nalpha.back()},
        {"Nbeta_ell", d.gains.Nbeta.back()},
        {"n_x", static_cast<double>(cfg.sim.n_x)},
        {"dt", cfg.sim.dt},
    };
    if (d.model) {
        const auto& m = *d.model;
        const std::vector<std::pair<std::string, Value>> extra = {
            {"f_H", m.f_H},         {"f_V", m.f_V},       {"gamma1", m.gamma1},
            {"gamma2", m.gamma2},   {"q_tilde", m.q_tilde}, {"rho_tilde", m.rho_tilde},
            {"rho_u", m.rho_u},     {"U_eq", m.U_eq},     {"S_b", cfg.canal->bottom_slope()},
        };
        e.insert(e.end(), extra.begin(), extra.end());
    }
    return flat_json(e);
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

constexpr double kExtinctionCushion = 0.5;  // [s] after the transit time

struct Digest {
    std::uint64_t h = 1469598103934665603ULL;
    void add(double x) {
        const auto bits = std::bit_cast<std::uint64_t>(x);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffU;
            h *= 1099511628211ULL;
        }
    }
};

HyperbolicState initial_plant(const RunConfig& cfg, const Design& d, const UniformGrid& grid) {
    const auto& ic = cfg.initial;
    const double ell = d.coeffs.ell;
    std::vector<double> a(grid.n_x), b(grid.n_x);
    for (std::size_t i = 0; i < grid.n_x; ++i) {
        const double x = grid.x(i);
        a[i] = ic.first_amplitude * std::sin(ic.first_mode * std::numbers::pi * x / ell);
        b[i] = ic.second_amplitude * std::sin(ic.second_mode * std::numbers::pi * x / ell);
    }
    if (d.model) return to_characteristic(a, b, *d.model);
    HyperbolicState s(grid.n_x);
    s.u = std::move(a);
    s.v = std::move(b);
    return s;
}

struct ProbeSet {
    std::vector<std::size_t> nodes;
    std::vector<double> x;
};

ProbeSet snap_probes(const std::vector<double>& probes, const UniformGrid& grid) {
    ProbeSet out;
    for (double p : probes) {
        const double s = std::clamp(p / grid.dx(), 0.0, static_cast<double>(grid.n_x - 1));
        const auto i = static_cast<std::size_t>(std::lround(s));
        out.nodes.push_back(i);
        out.x.push_back(grid.x(i));
    }
    return out;
}

}  // namespace

RunSummary run_scenario(const RunConfig& cfg) { return run_scenario(cfg, prepare(cfg)); }

RunSummary run_scenario(const RunConfig& cfg, const Design& d) {
    const auto& c = d.coeffs;
    const auto& k = d.consts;
    const auto& p = cfg.etc;
    const UniformGrid grid(cfg.sim.n_x, c.ell);
    const double dt = cfg.sim.dt;
    const auto total = static_cast<std::size_t>(std::llround(cfg.sim.t_end / dt));
    const std::size_t last = grid.n_x - 1;

    RunSummary sum;
    sum.mode = cfg.mode;
    sum.steps = total;
    sum.dt = dt;
    sum.t_end = static_cast<double>(total) * dt;
    sum.tau = k.tau;
    sum.h = d.petc.h;
    sum.transit = d.stc.transit;
    sum.warnings = d.warnings;

    if (cfg.mode == Mode::Petc && d.petc.steps < 1) {
        throw Error(ErrorCode::InvalidArgument, "design has no valid sampling period");
    }
    TransportStepper stepper(c, grid, dt);
    HyperbolicState plant = initial_plant(cfg, d, grid);
    HyperbolicState obs = cfg.initial.observer_matches_plant ? plant : HyperbolicState(grid.n_x);
    // Stepped on its own so that it is bit-identical across modes.
    HyperbolicState error = difference(plant, obs);

    TriggerState ts(p.m0);
    HyperbolicState target = transform_to_target(obs, d.K);
    ts.set_continuous(control_law(obs, d.gains));

    const bool sampled = cfg.mode == Mode::Cetc || cfg.mode == Mode::Petc || cfg.mode == Mode::Stc;
    std::size_t next_stc_step = 0;
    auto stc_schedule = [&](std::size_t step, EventRecord& rec) {
        const double v2 = vbar2(target, d.stc, c);
        const double F = calF(static_cast<double>(step) * dt, v2, d.stc, c);
        const GapResult gap = next_event_gap(ts.m, F, k, p, d.stc, cfg.stc.options);
        rec.F = F;
        rec.G = gap.G;
        rec.Gbar = gap.Gbar;
        const auto n = static_cast<std::size_t>(std::ceil(gap.G / dt - 1e-9));
        next_stc_step = step + std::max<std::size_t>(n, 1);
    };

    if (sampled) {
        EventRecord& rec = ts.fire(0.0, gamma_c(ts, k, p));
        if (cfg.mode == Mode::Stc) stc_schedule(0, rec);
    } else if (cfg.mode == Mode::Ctc) {
        ts.U_held = ts.U_continuous;
        ts.d = 0.0;
    } else {
        ts.U_held = 0.0;
        ts.set_continuous(ts.U_continuous);
    }

    const ProbeSet probes = snap_probes(cfg.probes, grid);
    std::vector<std::vector<double>> physical;
    sum.min_H = std::numeric_limits<double>::infinity();

    sum.initial_norm = l2_norm(plant, c.ell);
    sum.initial_error_norm = l2_norm(error, c.ell);
    sum.min_norm_ratio = 1.0;
    sum.max_gamma_c = -std::numeric_limits<double>::infinity();
    sum.max_m = -std::numeric_limits<double>::infinity();
    Digest digest;

    auto record = [&](std::size_t step) {
        const double t = static_cast<double>(step) * dt;
        TrajectoryRow row;
        row.t = t;
        row.norm_plant = l2_norm(plant, c.ell);
        row.norm_observer = l2_norm(obs, c.ell);
        row.norm_error = l2_norm(error, c.ell);
        row.U_held = ts.U_held;
        row.U_continuous = ts.U_continuous;
        row.d = ts.d;
        row.m = ts.m;
        row.gamma_c = gamma_c(ts, k, p);
        sum.trajectory.push_back(row);
        if (d.model) {
            const auto [H, V] = from_characteristic(plant, *d.model);
            const GateOpening gate = gate_opening(ts.U_held, H[last], *d.model, *cfg.canal);
            if (gate.clamped) ++sum.gate_clamps;
            sum.min_H = std::min(sum.min_H, *std::min_element(H.begin(), H.end()));
            std::vector<double> line = {t};
            for (std::size_t i : probes.nodes) line.push_back(H[i]);
            for (std::size_t i : probes.nodes) line.push_back(V[i]);
            line.push_back(gate.opening);
            physical.push_back(std::move(line));
        }
    };

    auto track = [&](std::size_t step) {
        const double t = static_cast<double>(step) * dt;
        const double gc = gamma_c(ts, k, p);
        sum.max_gamma_c = std::max(sum.max_gamma_c, gc);
        sum.max_m = std::max(sum.max_m, ts.m);
        const double np = l2_norm(plant, c.ell);
        const double ratio = sum.initial_norm > 0.0 ? np / sum.initial_norm : 0.0;
        sum.min_norm_ratio = std::min(sum.min_norm_ratio, ratio);
        if (!sum.time_to_1pct && ratio < 0.01) sum.time_to_1pct = t;
        const double ne_sq = l2_norm_sq(error, c.ell);
        digest.add(ne_sq);
        digest.add(error.v[0]);
        for (std::size_t i = 0; i < grid.n_x; ++i) {
            const double du = std::abs(plant.u[i] - obs.u[i] - error.u[i]);
            const double dv = std::abs(plant.v[i] - obs.v[i] - error.v[i]);
            sum.max_error_mismatch = std::max({sum.max_error_mismatch, du, dv});
        }
        if (t >= sum.transit + kExtinctionCushion && sum.initial_error_norm > 0.0) {
            sum.max_error_ratio_after_transit =
                std::max(sum.max_error_ratio_after_transit, std::sqrt(ne_sq) / sum.initial_error_norm);
        }
    };

    track(0);
    record(0);

    for (std::size_t n = 0; n < total; ++n) {
        // Drivers of the dynamic variable at t_n.
        const double norm_sq = l2_norm_sq(target, c.ell);
        const double a_ell = target.u[last];
        const double b0 = plant.v[0] - obs.v[0];
        update_m(ts, dt, k, p, norm_sq, a_ell * a_ell, b0 * b0);

        const double v0_now = plant.v[0];
        stepper.step_plant(plant, ts.U_held);
        stepper.step_observer(obs, v0_now, plant.v[0], ts.U_held, d.gains);
        stepper.step_error(error, d.gains);
        if (!plant.finite() || !obs.finite()) {
            throw Error(ErrorCode::InvalidArgument,
                        "simulation produced non-finite values at t = " +
                            format_number(static_cast<double>(n + 1) * dt));
        }

        target = transform_to_target(obs, d.K);
        const double U = control_law(obs, d.gains);
        const std::size_t step = n + 1;
        const double t = static_cast<double>(step) * dt;

        switch (cfg.mode) {
            case Mode::OpenLoop:
                ts.set_continuous(U);
                break;
            case Mode::Ctc:
                ts.U_continuous = U;
                ts.U_held = U;
                ts.d = 0.0;
                break;
            case Mode::Cetc:
                ts.set_continuous(U);
                if (cetc_should_trigger(ts, k, p)) ts.fire(t, gamma_c(ts, k, p));
                break;
            case Mode::Petc:
                ts.set_continuous(U);
                if (step % static_cast<std::size_t>(d.petc.steps) == 0) {
                    const double gp = gamma_p(ts.d, ts.m, k, p, d.petc.h);
                    if (gp > 0.0) ts.fire(t, gp);
                }
                break;
            case Mode::Stc:
                ts.set_continuous(U);
                if (step == next_stc_step) {
                    EventRecord& rec = ts.fire(t, gamma_c(ts, k, p));
                    stc_schedule(step, rec);
                }
                break;
        }

        track(step);
        if (step % cfg.stride == 0 || step == total) record(step);
    }

    sum.final_norm = l2_norm(plant, c.ell);
    sum.events = ts.events;
    if (sum.events.size() >= 2) {
        double total_gap = 0.0;
        double min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < sum.events.size(); ++i) {
            total_gap += sum.events[i].dwell;
            min_gap = std::min(min_gap, sum.events[i].dwell);
        }
        sum.mean_dwell = total_gap / static_cast<double>(sum.events.size() - 1);
        sum.min_dwell = min_gap;
    } else {
        sum.mean_dwell = std::numeric_limits<double>::quiet_NaN();
        sum.min_dwell = std::numeric_limits<double>::quiet_NaN();
    }
    if (!d.model) sum.min_H = std::numeric_limits<double>::quiet_NaN();
    if (sum.gate_clamps > 0) {
        sum.warnings.push_back("gate opening clamped at zero on " +
                               std::to_string(sum.gate_clamps) + " stored steps");
    }
    sum.error_digest = digest.h;

    if (cfg.out_dir.empty()) return sum;

    const std::string tag(to_string(cfg.mode));
    const auto& dir = cfg.out_dir;
    auto emit = [&](const std::string& name, const std::function<void(std::ostream&)>& writer) {
        write_file_atomic(dir / name, writer);
        sum.files.push_back((dir / name).string());
    };

    emit("trajectory_" + tag + ".csv", [&](std::ostream& out) {
        out << "t,norm_plant,norm_observer,norm_error,U_held,U_continuous\n";
        for (const auto& r : sum.trajectory) {
            write_row(out, {r.t, r.norm_plant, r.norm_observer, r.norm_error, r.U_held,
                            r.U_continuous});
        }
    });
    emit("trigger_" + tag + ".csv", [&](std::ostream& out) {
        out << "t,d,m,gamma_c\n";
        for (const auto& r : sum.trajectory) write_row(out, {r.t, r.d, r.m, r.gamma_c});
    });
    emit("events_" + tag + ".csv", [&](std::ostream& out) {
        const bool stc = cfg.mode == Mode::Stc;
        out << "mode,k,t_k,dwell,U_held" << (stc ? ",F_k,G_k,Gbar_k" : "") << "\n";
        for (const auto& e : sum.events) {
            out << tag << ',' << e.k << ',' << format_number(e.t) << ','
                << format_number(e.dwell) << ',' << format_number(e.U_held);
            if (stc) {
                out << ',' << format_number(e.F) << ',' << format_number(e.G) << ','
                    << format_number(e.Gbar);
            }
            out << '\n';
        }
    });
    if (d.model) {
        emit("physical_" + tag + ".csv", [&](std::ostream& out) {
            out << 't';
            for (double x : probes.x) out << ",H_" << format_number(x);
            for (double x : probes.x) out << ",V_" << format_number(x);
            out << ",U_ell\n";
            for (const auto& line : physical) write_row(out, line);
        });
    }
    emit("constants.json", [&](std::ostream& out) { out << constants_json(d, cfg); });
    if (cfg.dump_kernels) {
        for (const KernelSet* ks : {&d.K, &d.P, &d.L, &d.R}) {
            emit("kernels_" + std::string(to_string(ks->family)) + ".csv",
                 [&](std::ostream& out) { write_kernels_csv(out, *ks); });
        }
        emit("gains.csv", [&](std::ostream& out) { write_gains_csv(out, d.gains); });
    }

    std::vector<std::pair<std::string, Value>> s = {
        {"mode", tag},
        {"steps", static_cast<double>(sum.steps)},
        {"dt", sum.dt},
        {"t_end", sum.t_end},
        {"tau", sum.tau},
        {"h", sum.h},
        {"events", static_cast<double>(sum.events.size())},
        {"min_dwell", sum.min_dwell},
        {"mean_dwell", sum.mean_dwell},
        {"initial_norm", sum.initial_norm},
        {"final_norm", sum.final_norm},
        {"min_norm_ratio", sum.min_norm_ratio},
        {"time_to_1pct", sum.time_to_1pct.value_or(std::numeric_limits<double>::quiet_NaN())},
        {"initial_error_norm", sum.initial_error_norm},
        {"max_error_ratio_after_transit", sum.max_error_ratio_after_transit},
        {"max_gamma_c", sum.max_gamma_c},
        {"max_m", sum.max_m},
        {"min_H", sum.min_H},
        {"gate_clamps", static_cast<double>(sum.gate_clamps)},
        {"max_error_mismatch", sum.max_error_mismatch},
        {"error_digest", std::to_string(sum.error_digest)},
    };
    const std::string summary_name = "summary_" + tag + ".json";
    sum.files.push_back((dir / summary_name).string());
    std::string manifest;
    for (std::size_t i = 0; i < sum.files.size(); ++i) {
        manifest += (i ? ";" : "") + std::filesystem::path(sum.files[i]).filename().string();
    }
    s.emplace_back("files", manifest);
    write_file_atomic(dir / summary_name, [&](std::ostream& out) { out << flat_json(s); });
    return sum;
}

// ---------------------------------------------------------------------------
// Comparison

namespace {

std::string shared_part(const RunConfig& cfg) {
    RunConfig copy = cfg;
    copy.mode = Mode::Cetc;
    copy.out_dir.clear();
    copy.stride = 1;
    return dump_config(copy);
}

}  // namespace

std::vector<CompareRow> compare_modes(const std::vector<RunConfig>& configs,
                                      std::vector<RunSummary>* summaries) {
    if (configs.empty()) return {};
    const std::string reference = shared_part(configs.front());
    for (const auto& cfg : configs) {
        if (shared_part(cfg) != reference) {
            throw Error(ErrorCode::ConfigMismatch,
                        "compared runs must share plant, parameters, initial data and clock");
        }
    }
    const Design design = prepare(configs.front());
    std::vector<CompareRow> rows;
    for (const auto& cfg : configs) {
        RunSummary s = run_scenario(cfg, design);
        CompareRow row;
        row.mode = cfg.mode;
        row.events = s.events.size();
        row.mean_dwell = s.mean_dwell;
        row.min_dwell = s.min_dwell;
        row.time_to_1pct = s.time_to_1pct;
        row.final_norm_ratio = s.initial_norm > 0.0 ? s.final_norm / s.initial_norm : 0.0;
        rows.push_back(row);
        if (summaries) summaries->push_back(std::move(s));
    }
    return rows;
}

void write_compare_csv(const std::filesystem::path& path, const std::vector<CompareRow>& rows) {
    write_file_atomic(path, [&](std::ostream& out) {
        out << "mode,events,mean_dwell,min_dwell,time_to_1pct,final_norm_ratio\n";
        for (const auto& r : rows) {
            out << to_string(r.mode) << ',' << r.events << ',' << format_number(r.mean_dwell)
                << ',' << format_number(r.min_dwell) << ','
                << format_number(r.time_to_1pct.value_or(std::numeric_limits<double>::quiet_NaN()))
                << ',' << format_number(r.final_norm_ratio) << '\n';
        }
    });
}

}  // namespace hypetc
