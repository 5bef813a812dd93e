// ddfc: data collection, closed-loop simulation and run comparison.

#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddfc/collection.hpp"
#include "ddfc/config.hpp"
#include "ddfc/report.hpp"
#include "ddfc/scenario.hpp"
#include "ddfc/trajectory_kernel.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string dataset;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string format = "csv,svg";
    std::vector<std::string> runs;
    ddfc::Index order = 0;
};

fs::path dataset_file(const fs::path& dir, const std::string& area) { return dir / (area + ".csv"); }

int cmd_collect(const Options& opt) {
    ddfc::ScenarioConfig cfg = ddfc::load_config(opt.config);
    if (opt.seed) cfg.collection.seed = *opt.seed;
    const ddfc::CollectionResult col = ddfc::run_collection(cfg, true);

    const fs::path out = opt.out.empty() ? fs::path("dataset") : fs::path(opt.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) throw ddfc::IoError("cannot create output directory", out.string());

    nlohmann::json report;
    report["samples"] = col.samples;
    report["period_s"] = cfg.collection.period_s;
    report["seed"] = cfg.collection.seed;
    report["areas"] = nlohmann::json::array();
    for (const auto& a : col.areas) {
        ddfc::write_dataset(a.dataset, dataset_file(out, a.area_id));
        report["areas"].push_back({{"area", a.area_id},
                                   {"pe_rank", a.pe.rank},
                                   {"pe_required_rank", a.pe.required_rank},
                                   {"exciting", a.pe.exciting},
                                   {"freq_rms_hz", a.freq_rms_hz}});
        std::cout << a.area_id << ": T=" << col.samples << " PE rank " << a.pe.rank << "/" << a.pe.required_rank
                  << " rms(df)=" << a.freq_rms_hz << " Hz\n";
    }
    const fs::path rp = out / "collection.json";
    std::ofstream(rp) << report.dump(2) << "\n";
    std::cout << "wrote " << col.areas.size() << " datasets to " << out.string() << "\n";
    return 0;
}

int cmd_simulate(const Options& opt) {
    ddfc::ScenarioConfig cfg = ddfc::load_config(opt.config);
    if (opt.seed) cfg.run.seed = *opt.seed;
    const ddfc::ExportFormats formats = ddfc::parse_formats(opt.format);

    ddfc::DatasetMap datasets;
    if (!opt.dataset.empty()) {
        for (std::size_t a = 0; a < cfg.areas.size(); ++a) {
            if (cfg.controllers[a].mode != ddfc::ControllerMode::data_driven) continue;
            datasets.emplace(cfg.areas[a].id, ddfc::read_dataset(dataset_file(opt.dataset, cfg.areas[a].id)));
        }
    } else {
        std::cout << "no --dataset given; collecting in-process\n";
        for (auto& a : ddfc::run_collection(cfg, true).areas) datasets.emplace(a.area_id, std::move(a.dataset));
    }

    const ddfc::RunResult result = ddfc::run_scenario(cfg, datasets);
    const fs::path out = opt.out.empty() ? fs::path("run") : fs::path(opt.out);
    const auto files = ddfc::export_result(result, out, formats);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

    const auto& m = result.metrics;
    std::cout << "nadir " << m.nadir_hz << " Hz, settling " << m.settling_time_s << " s"
              << (m.settled ? "" : " (not settled)") << ", steady-state error " << m.steady_state_error_hz << " Hz\n";
    for (const auto& a : m.per_area) {
        std::cout << "  " << a.area_id << ": d_hat " << a.estimate_mean_MW << " MW (true " << a.true_load_mean_MW
                  << "), nadir " << a.nadir_hz << " Hz\n";
    }
    std::cout << "wrote " << files.size() << " files to " << out.string() << "\n";
    return 0;
}

int cmd_compare(const Options& opt) {
    if (opt.runs.size() != 2) throw ddfc::ConfigError("compare needs exactly two run directories");
    const auto deltas = ddfc::compare_runs(opt.runs[0], opt.runs[1]);
    if (opt.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& d : deltas) {
            j.push_back({{"metric", d.key},
                         {"a", std::isfinite(d.a) ? nlohmann::json(d.a) : nlohmann::json(nullptr)},
                         {"b", std::isfinite(d.b) ? nlohmann::json(d.b) : nlohmann::json(nullptr)},
                         {"delta", std::isfinite(d.b - d.a) ? nlohmann::json(d.b - d.a) : nlohmann::json(nullptr)}});
        }
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << std::left << std::setw(44) << "metric" << std::right << std::setw(16) << "a" << std::setw(16) << "b"
              << std::setw(16) << "b - a" << "\n";
    for (const auto& d : deltas) {
        std::cout << std::left << std::setw(44) << d.key << std::right << std::setw(16) << d.a << std::setw(16) << d.b
                  << std::setw(16) << d.b - d.a << "\n";
    }
    return 0;
}

int cmd_check_pe(const Options& opt) {
    if (opt.dataset.empty()) throw ddfc::ConfigError("check-pe needs --dataset <file.csv>");
    const ddfc::TrajectoryDataset ds = ddfc::read_dataset(opt.dataset);
    ddfc::Index order = opt.order;
    if (order <= 0) {
        order = 8;
        if (!opt.config.empty()) {
            const ddfc::ScenarioConfig cfg = ddfc::load_config(opt.config);
            const auto a = static_cast<std::size_t>(cfg.area_index(ds.label));
            order = cfg.controllers[a].t_ini + 1;
        }
    }
    const ddfc::PeReport pe = ddfc::is_persistently_exciting(ds.u, order);
    const ddfc::HankelBlock h = ddfc::build_hankel(ds.u, order);
    const ddfc::PinvResult sv = ddfc::truncated_pinv(h.matrix);
    nlohmann::json j{{"dataset", opt.dataset},
                     {"label", ds.label},
                     {"samples", ds.length()},
                     {"order", order},
                     {"rank", pe.rank},
                     {"required_rank", pe.required_rank},
                     {"exciting", pe.exciting},
                     {"reason", pe.reason}};
    std::vector<double> s(sv.singular_values.data(), sv.singular_values.data() + sv.singular_values.size());
    j["singular_values"] = s;
    if (opt.format == "json") {
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "samples " << ds.length() << ", order " << order << ": rank " << pe.rank << "/" << pe.required_rank
                  << (pe.exciting ? " persistently exciting\n" : " NOT persistently exciting (" + pe.reason + ")\n");
        if (s.size() > 0) std::cout << "sigma_max " << s.front() << ", sigma_min " << s.back() << "\n";
    }
    return pe.exciting ? 0 : static_cast<int>(ddfc::ExitCode::infeasible);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-driven disturbance estimation and frequency control for multi-area grids"};
    app.set_version_flag("--version", ddfc::library_version());
    app.require_subcommand(1);
    Options opt;

    auto* collect = app.add_subcommand("collect", "Run the excitation phase and save one dataset per area");
    collect->add_option("--config", opt.config, "Scenario JSON")->required();
    collect->add_option("--out", opt.out, "Output directory for datasets");
    collect->add_option("--seed", opt.seed, "Override collection seed");

    auto* simulate = app.add_subcommand("simulate", "Run a closed-loop scenario");
    simulate->add_option("--config", opt.config, "Scenario JSON")->required();
    simulate->add_option("--dataset", opt.dataset, "Directory written by `collect`");
    simulate->add_option("--out", opt.out, "Run output directory");
    simulate->add_option("--seed", opt.seed, "Override run seed");
    simulate->add_option("--format", opt.format, "csv, svg or csv,svg")->capture_default_str();

    auto* compare = app.add_subcommand("compare", "Metric deltas between two run directories");
    compare->add_option("runs", opt.runs, "Two run directories")->expected(2)->required();
    compare->add_option("--format", opt.format, "text or json");

    auto* check = app.add_subcommand("check-pe", "Persistency-of-excitation diagnostics for a dataset");
    check->add_option("--dataset", opt.dataset, "Dataset CSV")->required();
    check->add_option("--config", opt.config, "Scenario JSON (order from the area's T_ini)");
    check->add_option("--order", opt.order, "Excitation order to test");
    check->add_option("--format", opt.format, "text or json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ddfc::ExitCode::config);
    }
    if (!compare->parsed() && !check->parsed() && opt.format.empty()) opt.format = "csv,svg";
    if ((compare->parsed() || check->parsed()) && opt.format == "csv,svg") opt.format = "text";

    try {
        if (collect->parsed()) return cmd_collect(opt);
        if (simulate->parsed()) return cmd_simulate(opt);
        if (compare->parsed()) return cmd_compare(opt);
        if (check->parsed()) return cmd_check_pe(opt);
    } catch (const ddfc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ddfc::ExitCode::io);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
