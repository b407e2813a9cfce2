// Acceptance checks on the reference canal; one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "hypetc/experiment.hpp"

using namespace hypetc;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

bool close(double a, double b, double rel = 1e-12) {
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

double shared_node_error(const KernelSet& coarse, const KernelSet& fine) {
    const std::size_t r = (fine.grid.n_x - 1) / (coarse.grid.n_x - 1);
    double e = 0.0;
    for (std::size_t m = 0; m < 4; ++m)
        for (std::size_t i = 0; i < coarse.grid.n_x; ++i)
            for (std::size_t j = 0; j <= i; ++j)
                e = std::max(e, std::abs(coarse.at(m, i, j) - fine.at(m, i * r, j * r)));
    return e;
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    RunConfig base = default_config();
    base.out_dir.clear();
    const Design design = prepare(base);
    const auto& k = design.consts;
    const auto& c = design.coeffs;
    const double dt = base.sim.dt;

    // 1. dwell-time
    {
        const double ref = 0.13323;
        const double rel = std::abs(k.tau - ref) / ref;
        report(rel <= 0.05, "dwell_time",
               fmt("tau = %.6f s", k.tau) + fmt(", relative deviation %.3g", rel));
    }

    std::map<Mode, RunSummary> runs;
    for (Mode m : {Mode::OpenLoop, Mode::Ctc, Mode::Cetc, Mode::Petc, Mode::Stc}) {
        RunConfig cfg = base;
        cfg.mode = m;
        runs.emplace(m, run_scenario(cfg, design));
    }
    const auto& cetc = runs.at(Mode::Cetc);
    const auto& petc = runs.at(Mode::Petc);
    const auto& stc = runs.at(Mode::Stc);

    // 2. dwell floors
    {
        bool ok = cetc.events.size() >= 2 && petc.events.size() >= 2 && stc.events.size() >= 2;
        double worst_cetc = INFINITY, worst_stc = INFINITY, worst_petc_frac = 0.0;
        for (std::size_t i = 1; i < cetc.events.size(); ++i) {
            worst_cetc = std::min(worst_cetc, cetc.events[i].dwell);
        }
        for (std::size_t i = 1; i < stc.events.size(); ++i) {
            worst_stc = std::min(worst_stc, stc.events[i].dwell);
        }
        bool petc_ok = std::abs(petc.h - 0.13) < 1e-12;
        for (std::size_t i = 1; i < petc.events.size(); ++i) {
            const double n = petc.events[i].dwell / petc.h;
            worst_petc_frac = std::max(worst_petc_frac, std::abs(n - std::round(n)));
            petc_ok = petc_ok && std::round(n) >= 1.0;
        }
        ok = ok && worst_cetc >= k.tau - dt && worst_stc >= k.tau - dt && petc_ok &&
             worst_petc_frac < 1e-6;
        report(ok, "dwell_floor",
               fmt("CETC min gap %.4f s", worst_cetc) + fmt(", STC min gap %.4f s", worst_stc) +
                   fmt(", PETC h = %.4f s", petc.h) +
                   fmt(" (max off-grid fraction %.2g)", worst_petc_frac) +
                   fmt(", tau - dt = %.5f s", k.tau - dt));
    }

    // 3. soundness
    {
        bool ok = true;
        std::string detail;
        for (const auto* s : {&cetc, &petc, &stc}) {
            ok = ok && s->max_gamma_c <= 1e-9 && s->max_m < 0.0;
            detail += std::string(detail.empty() ? "" : "; ") + std::string(to_string(s->mode)) +
                      fmt(" max Gamma_c %.3g", s->max_gamma_c) + fmt(", max m %.3g", s->max_m);
        }
        report(ok, "trigger_soundness", detail);
    }

    // 4. convergence
    {
        bool ok = true;
        std::string detail;
        for (Mode m : {Mode::Ctc, Mode::Cetc, Mode::Petc, Mode::Stc}) {
            const auto& s = runs.at(m);
            ok = ok && s.time_to_1pct.has_value();
            detail += std::string(to_string(m)) +
                      (s.time_to_1pct ? fmt(" 1%% at %.2f s; ", *s.time_to_1pct) : " never; ");
        }
        const auto& ol = runs.at(Mode::OpenLoop);
        ok = ok && !ol.time_to_1pct.has_value();
        detail += fmt("open_loop min ratio %.4f", ol.min_norm_ratio) +
                  fmt(" over %.0f s", ol.t_end);
        report(ok, "convergence", detail);
    }

    // 5. extinction
    {
        bool same = true;
        double worst = 0.0;
        for (const auto& [m, s] : runs) {
            same = same && s.error_digest == cetc.error_digest;
            worst = std::max(worst, s.max_error_ratio_after_transit);
        }
        report(worst <= 1e-3 && same, "observer_extinction",
               fmt("max error ratio after %.3f s", cetc.transit + 0.5) + fmt(" = %.3g", worst) +
                   (same ? ", error trajectories identical across modes"
                         : ", error trajectories differ across modes"));
    }

    // 6. kernels
    {
        double worst = 0.0;
        for (const KernelSet* ks : {&design.K, &design.P, &design.L, &design.R}) {
            worst = std::max(worst, kernel_residuals(*ks, c).max());
        }
        auto zero = PlantCoefficients::constant(c.lambda1, c.lambda2, 0.0, 0.0, c.q, c.rho, c.ell);
        bool zeros = true;
        const TriangularGrid small(51, c.ell);
        for (auto fam : {KernelFamily::Controller, KernelFamily::Observer,
                         KernelFamily::InverseController, KernelFamily::InverseObserver}) {
            const KernelSet z = solve_kernels(fam, zero, small);
            for (const auto& v : z.k)
                for (double x : v) zeros = zeros && x == 0.0;
        }
        double min_ratio = INFINITY;
        for (auto fam : {KernelFamily::Controller, KernelFamily::Observer,
                         KernelFamily::InverseController, KernelFamily::InverseObserver}) {
            const KernelSet ref = solve_kernels(fam, c, TriangularGrid(801, c.ell));
            const KernelSet a = solve_kernels(fam, c, TriangularGrid(101, c.ell));
            const KernelSet b = solve_kernels(fam, c, TriangularGrid(201, c.ell));
            min_ratio = std::min(min_ratio, shared_node_error(a, ref) / shared_node_error(b, ref));
        }
        report(worst <= 1e-6 && zeros && min_ratio >= 1.8, "kernel_suite",
               fmt("max residual %.3g at n_x = 201", worst) +
                   (zeros ? ", zero coupling exact" : ", zero coupling NOT exact") +
                   fmt(", min refinement ratio %.3f", min_ratio));
    }

    // 7. identities
    {
        const auto& p = base.etc;
        bool ok = true;
        for (std::size_t i = 0; i < 3; ++i) ok = ok && close(k.kappa[i], p.theta * k.eps[i] / (1 - p.sigma));
        ok = ok && close(k.a, 1.0 + k.eps[3] + p.eta);
        ok = ok && close(k.D, 2.0 * k.C * c.q * c.q);
        ok = ok && close(k.theta_m, 2.0 * k.D * std::exp(p.mu * c.ell / c.lambda2));
        const auto& cv = *base.canal;
        ok = ok && close(c.lambda1 * c.lambda2, cv.g * cv.H_eq - cv.V_eq * cv.V_eq);

        const std::size_t n = base.sim.n_x;
        std::vector<double> H(n), V(n);
        for (std::size_t i = 0; i < n; ++i) {
            H[i] = 0.2 * std::sin(0.05 * static_cast<double>(i));
            V[i] = -0.1 * std::cos(0.07 * static_cast<double>(i));
        }
        const auto [Hb, Vb] = from_characteristic(to_characteristic(H, V, *design.model), *design.model);
        double coord = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            coord = std::max({coord, std::abs(Hb[i] - cv.H_eq - H[i]), std::abs(Vb[i] - cv.V_eq - V[i])});
        }
        ok = ok && coord <= 1e-13;
        report(ok, "exact_identities", fmt("coordinate round-trip error %.3g", coord));
    }

    // 8. STC vs CETC
    report(stc.mean_dwell < cetc.mean_dwell, "stc_vs_cetc_density",
           fmt("STC mean dwell %.4f s", stc.mean_dwell) + fmt(" (%.0f events)", stc.events.size()) +
               fmt(", CETC mean dwell %.4f s", cetc.mean_dwell) +
               fmt(" (%.0f events)", cetc.events.size()));

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d failure(s), %.1f s\n", failures, secs);
    return failures == 0 ? 0 : 1;
}
