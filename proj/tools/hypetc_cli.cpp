// Command-line driver: simulate, constants, compare.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypetc/csv.hpp"
#include "hypetc/error.hpp"
#include "hypetc/experiment.hpp"

using namespace hypetc;

namespace {

RunConfig load_or_default(const std::string& path) {
    return path.empty() ? default_config() : load_config(path);
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

void report_reflection(const RunConfig& cfg) {
    const PlantCoefficients c = cfg.canal ? linearize(*cfg.canal).plant : cfg.raw->coefficients();
    const double rq = std::abs(c.rho * c.q);
    std::cerr << "assumption small_reflection: |rho q| = " << format_number(rq)
              << (rq < 0.5 ? " < 0.5 (holds)" : " >= 0.5 (violated)") << "\n";
}

std::vector<Mode> parse_modes(const std::string& list) {
    std::vector<Mode> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_mode(item));
    }
    if (out.empty()) throw Error(ErrorCode::InvalidConfig, "no modes given");
    return out;
}

std::string dwell_text(double v) { return std::isnan(v) ? "-" : format_number(v); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-triggered boundary control of 2x2 hyperbolic systems"};
    app.require_subcommand(0, 1);

    bool print_defaults = false;
    app.add_flag("--print-defaults", print_defaults, "Print the reference configuration and exit");

    std::string config_path;
    std::string mode_text;
    std::string out_dir;
    std::size_t stride = 0;
    double t_end = 0.0;
    bool dump_kernels = false;

    auto* sim = app.add_subcommand("simulate", "Run one closed-loop or open-loop scenario");
    sim->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sim->add_option("--mode", mode_text, "open_loop | ctc | cetc | petc | stc");
    sim->add_option("--out", out_dir, "Output directory");
    sim->add_option("--stride", stride, "Store every n-th step")->check(CLI::PositiveNumber);
    sim->add_option("--t-end", t_end, "Horizon override [s]")->check(CLI::PositiveNumber);
    sim->add_flag("--dump-kernels", dump_kernels, "Also write kernel and gain samples");

    auto* cst = app.add_subcommand("constants", "Print all design constants");
    cst->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    cst->add_option("--out", out_dir, "Also write constants.json here");

    std::string modes_text = "cetc,petc,stc";
    auto* cmp = app.add_subcommand("compare", "Run several modes on shared data and tabulate");
    cmp->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    cmp->add_option("--modes", modes_text, "Comma-separated list of modes");
    cmp->add_option("--out", out_dir, "Output directory");
    cmp->add_option("--t-end", t_end, "Horizon override [s]")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (print_defaults) {
            std::cout << dump_config(default_config());
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return 1;
        }

        RunConfig cfg = load_or_default(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (t_end > 0.0) cfg.sim.t_end = t_end;

        if (*sim) {
            if (!mode_text.empty()) cfg.mode = parse_mode(mode_text);
            if (stride > 0) cfg.stride = stride;
            if (dump_kernels) cfg.dump_kernels = true;
            const RunSummary s = run_scenario(cfg);
            print_warnings(s.warnings);
            std::cout << "mode=" << to_string(s.mode) << " events=" << s.events.size()
                      << " min_dwell=" << dwell_text(s.min_dwell)
                      << " mean_dwell=" << dwell_text(s.mean_dwell)
                      << " initial_norm=" << format_number(s.initial_norm)
                      << " final_norm=" << format_number(s.final_norm) << " time_to_1pct="
                      << (s.time_to_1pct ? format_number(*s.time_to_1pct) : std::string("-"))
                      << "\n";
            for (const auto& f : s.files) std::cout << "wrote " << f << "\n";
            return 0;
        }

        if (*cst) {
            report_reflection(cfg);
            const Design d = prepare(cfg);
            print_warnings(d.warnings);
            const std::string text = constants_json(d, cfg);
            std::cout << text;
            if (!out_dir.empty()) {
                write_file_atomic(cfg.out_dir / "constants.json",
                                  [&](std::ostream& out) { out << text; });
            }
            return 0;
        }

        if (*cmp) {
            std::vector<RunConfig> configs;
            for (Mode m : parse_modes(modes_text)) {
                RunConfig c = cfg;
                c.mode = m;
                configs.push_back(c);
            }
            std::vector<RunSummary> summaries;
            const auto rows = compare_modes(configs, &summaries);
            for (const auto& s : summaries) print_warnings(s.warnings);
            const auto path = cfg.out_dir / "compare.csv";
            write_compare_csv(path, rows);
            std::cout << "mode,events,mean_dwell,min_dwell,time_to_1pct,final_norm_ratio\n";
            for (const auto& r : rows) {
                std::cout << to_string(r.mode) << ',' << r.events << ','
                          << dwell_text(r.mean_dwell) << ',' << dwell_text(r.min_dwell) << ','
                          << (r.time_to_1pct ? format_number(*r.time_to_1pct) : std::string("-"))
                          << ',' << format_number(r.final_norm_ratio) << "\n";
            }
            std::cout << "wrote " << path.string() << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: code=" << to_string(e.code()) << " message=" << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: code=Internal message=" << e.what() << "\n";
        return 3;
    }
    return 0;
}
