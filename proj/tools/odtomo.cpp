// odtomo: simulate link measurements, estimate path flows, run benchmarks.

#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "odtomo/error.hpp"
#include "odtomo/experiment.hpp"

namespace {

void add_dp_flags(CLI::App& cmd, odtomo::DpConfig& dp) {
    static const std::map<std::string, odtomo::ThresholdMode> modes{
        {"absolute", odtomo::ThresholdMode::Absolute}, {"statistical", odtomo::ThresholdMode::Statistical}};
    cmd.add_option("--epsilon", dp.epsilon, "Absolute cumulant threshold")->check(CLI::NonNegativeNumber);
    cmd.add_option("--order-cap", dp.order_cap, "Largest cumulant order evaluated")->check(CLI::Range(1, 12));
    cmd.add_option("--z", dp.z, "Standard errors a cumulant must clear in statistical mode")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--threshold-mode", dp.mode, "absolute or statistical")
        ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
}

void add_experiment_flags(CLI::App& cmd, odtomo::ExperimentSpec& spec, std::string& format) {
    cmd.add_option("--network", spec.network_path, "Network file (TNTP or JSON)")->required()->check(CLI::ExistingFile);
    cmd.add_option("--format", format, "tntp or json (default: from extension)")
        ->check(CLI::IsMember({"tntp", "json"}));
    cmd.add_option("--k", spec.k_values, "Active OD pairs, ascending")->delimiter(',');
    cmd.add_option("--samples", spec.sample_counts, "Measurement counts, ascending")->delimiter(',');
    cmd.add_option("--trials", spec.trials, "Trials per k")->check(CLI::PositiveNumber);
    cmd.add_option("--seed", spec.seed, "Master seed");
    cmd.add_option("--observe", spec.observe, "'all' or a file of observed edge indices");
    cmd.add_option("--mean-lo", spec.means.lo, "Lower end of the path mean range");
    cmd.add_option("--mean-hi", spec.means.hi, "Upper end of the path mean range");
    cmd.add_option("--out", spec.out, "Output directory (simulate) or report file (benchmark)")->required();
}

void resolve_format(odtomo::ExperimentSpec& spec, const std::string& format) {
    spec.format = format.empty() ? odtomo::guess_format(spec.network_path) : odtomo::parse_format(format);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Path-flow recovery from aggregate link measurements"};
    app.require_subcommand(1);

    odtomo::ExperimentSpec sim_spec;
    std::string sim_format;
    CLI::App* simulate = app.add_subcommand("simulate", "Write measurement CSVs and truth sidecars");
    add_experiment_flags(*simulate, sim_spec, sim_format);

    odtomo::EstimateOptions est;
    CLI::App* estimate = app.add_subcommand("estimate", "Estimate path support and means from a measurement CSV");
    estimate->add_option("--in", est.measurements, "Measurement CSV")->check(CLI::ExistingFile);
    estimate->add_option("--truth", est.truth, "Truth sidecar, used for scoring and exact mode")
        ->check(CLI::ExistingFile);
    estimate->add_flag("--exact", est.exact, "Use exact cumulants from the truth sidecar");
    estimate->add_option("--out", est.out, "Result JSON (default: stdout)");
    add_dp_flags(*estimate, est.dp);

    odtomo::ExperimentSpec bench_spec;
    std::string bench_format;
    CLI::App* benchmark = app.add_subcommand("benchmark", "Run the full pipeline and write a report CSV");
    add_experiment_flags(*benchmark, bench_spec, bench_format);
    add_dp_flags(*benchmark, bench_spec.dp);
    benchmark->add_flag("--exact", bench_spec.exact, "Use exact cumulants instead of samples");
    benchmark->add_option("--threads", bench_spec.threads, "Worker threads (0: all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            resolve_format(sim_spec, sim_format);
            const auto files = odtomo::cmd_simulate(sim_spec);
            std::cerr << "wrote " << files.size() << " files to " << sim_spec.out << '\n';
        } else if (estimate->parsed()) {
            const auto doc = odtomo::cmd_estimate(est);
            if (est.out.empty()) {
                std::cout << doc.dump(2) << '\n';
            }
            if (doc["diagnostics"]["truncated"].get<bool>()) {
                std::cerr << "warning: order cap reached, result is truncated\n";
            }
        } else if (benchmark->parsed()) {
            resolve_format(bench_spec, bench_format);
            const auto report = odtomo::cmd_benchmark(bench_spec);
            for (const auto& s : report.summary) {
                std::cerr << s.network << " k=" << s.k << " N=" << s.samples
                          << " mean_rel_error=" << s.mean.rel_total_error << '\n';
            }
        }
    } catch (const odtomo::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
