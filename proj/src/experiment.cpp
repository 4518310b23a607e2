#include "odtomo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "odtomo/error.hpp"
#include "odtomo/io.hpp"

namespace odtomo {

namespace fs = std::filesystem;

void ExperimentSpec::validate() const {
    if (trials < 1) {
        throw InvalidInput("trials must be at least 1");
    }
    auto check_ascending = [](const std::vector<std::size_t>& v, const char* what) {
        if (v.empty()) {
            throw InvalidInput(std::string(what) + " list is empty");
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] == 0) {
                throw InvalidInput(std::string(what) + " must be positive");
            }
            if (i > 0 && v[i] <= v[i - 1]) {
                throw InvalidInput(std::string(what) + " must be strictly ascending");
            }
        }
    };
    check_ascending(k_values, "k");
    check_ascending(sample_counts, "sample count");
    if (!(means.lo > 0.0) || !(means.hi >= means.lo) || !std::isfinite(means.hi)) {
        throw InvalidInput("mean range must satisfy 0 < lo <= hi");
    }
    dp.validate();
}

std::uint64_t instance_seed(std::uint64_t seed, std::size_t k, std::size_t trial) {
    Rng rng = Rng::stream(seed, (static_cast<std::uint64_t>(k) << 32) ^ static_cast<std::uint64_t>(trial));
    return rng();
}

std::uint64_t measurement_seed(std::uint64_t inst_seed, std::size_t samples) {
    Rng rng = Rng::stream(inst_seed, static_cast<std::uint64_t>(samples));
    return rng();
}

ObservationPlan load_observation_plan(const std::string& observe, std::size_t edge_count) {
    if (observe.empty() || observe == "all") {
        return ObservationPlan::all(edge_count);
    }
    std::ifstream in(observe);
    if (!in) {
        throw ParseError(observe, 0, "cannot open observation file");
    }
    ObservationPlan plan;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream tokens(line);
        std::string tok;
        while (tokens >> tok) {
            std::size_t value = 0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
            if (ec != std::errc() || ptr != tok.data() + tok.size()) {
                throw ParseError(observe, line_no, "bad edge index '" + tok + "'");
            }
            plan.edges.push_back(value);
        }
    }
    try {
        plan.validate(edge_count);
    } catch (const InvalidInput& e) {
        throw ParseError(observe, 0, e.what());
    }
    return plan;
}

std::string network_label(const std::string& path) {
    return fs::path(path).stem().string();
}

namespace {

struct Setup {
    std::shared_ptr<const Network> network;
    ObservationPlan plan;
    std::string label;
};

Setup load_setup(const ExperimentSpec& spec) {
    spec.validate();
    Setup s;
    s.network = std::make_shared<const Network>(load_network(spec.network_path, spec.format));
    s.plan = load_observation_plan(spec.observe, s.network->edge_count());
    s.label = network_label(spec.network_path);
    return s;
}

std::string trial_stem(std::size_t k, std::size_t trial) {
    return "k" + std::to_string(k) + "_t" + std::to_string(trial);
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ParseError(path.string(), 0, "cannot open for writing");
    }
    return out;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::vector<std::string> cmd_simulate(const ExperimentSpec& spec) {
    const Setup setup = load_setup(spec);
    const fs::path dir = spec.out.empty() ? fs::path(".") : fs::path(spec.out);
    fs::create_directories(dir);
    std::vector<std::string> written;
    for (std::size_t k : spec.k_values) {
        for (std::size_t t = 0; t < spec.trials; ++t) {
            const std::uint64_t iseed = instance_seed(spec.seed, k, t);
            const Instance inst = make_instance(setup.network, k, spec.means, setup.plan, iseed);

            const fs::path truth_path = dir / (trial_stem(k, t) + "_truth.json");
            open_output(truth_path) << truth_to_json(inst, setup.label).dump(2) << '\n';
            written.push_back(truth_path.string());

            for (std::size_t n : spec.sample_counts) {
                const MeasurementSet m = measure(inst, n, measurement_seed(iseed, n));
                const fs::path csv_path = dir / (trial_stem(k, t) + "_n" + std::to_string(n) + ".csv");
                auto out = open_output(csv_path);
                write_measurements_csv(out, m);
                written.push_back(csv_path.string());
            }
        }
    }
    return written;
}

nlohmann::json cmd_estimate(const EstimateOptions& opts) {
    opts.dp.validate();
    std::optional<ExactModel> truth;
    if (!opts.truth.empty()) {
        truth = truth_model_from_json(read_json_file(opts.truth), opts.truth);
    }

    std::vector<std::string> columns;
    std::optional<CumulantSource> source;
    if (opts.exact) {
        if (!truth) {
            throw InvalidInput("exact mode needs a truth sidecar");
        }
        source = CumulantSource::exact(*truth);
        for (std::size_t i = 0; i < truth->length(); ++i) {
            columns.push_back("y" + std::to_string(i));
        }
    } else {
        if (opts.measurements.empty()) {
            throw InvalidInput("no measurement file given");
        }
        std::ifstream in(opts.measurements);
        if (!in) {
            throw ParseError(opts.measurements, 0, "cannot open file");
        }
        MeasurementSet m = read_measurements_csv(in, opts.measurements);
        columns = m.column_names;
        source = CumulantSource::empirical(std::move(m.samples), opts.dp.order_cap);
    }

    const EstimationResult result = estimate(*source, opts.dp);
    nlohmann::json doc = result_to_json(result, columns);
    doc["mode"] = opts.exact ? "exact" : "empirical";
    if (truth) {
        const ErrorMetrics em = error_metrics(*truth, result);
        doc["metrics"] = {{"true_total", em.true_total},
                          {"estimated_total", em.estimated_total},
                          {"rel_total_error", em.relative_total_error},
                          {"precision", em.precision},
                          {"recall", em.recall},
                          {"l1_error", em.l1_error}};
    }
    if (!opts.out.empty()) {
        open_output(opts.out) << doc.dump(2) << '\n';
    }
    return doc;
}

SummaryRow summarize(const std::vector<const ReportRow*>& rows) {
    if (rows.empty()) {
        throw InvalidInput("summarize: no rows");
    }
    SummaryRow s;
    s.network = rows.front()->network;
    s.k = rows.front()->k;
    s.samples = rows.front()->samples;
    s.trials = rows.size();
    std::vector<double> err, prec, rec, l1, trunc;
    for (const ReportRow* r : rows) {
        err.push_back(r->metrics.relative_total_error);
        prec.push_back(r->metrics.precision);
        rec.push_back(r->metrics.recall);
        l1.push_back(r->metrics.l1_error);
        trunc.push_back(r->truncated ? 1.0 : 0.0);
    }
    auto mean_of = [](const std::vector<double>& v) {
        double sum = 0.0;
        for (double x : v) {
            sum += x;
        }
        return sum / static_cast<double>(v.size());
    };
    s.mean = {mean_of(err), mean_of(prec), mean_of(rec), mean_of(l1), mean_of(trunc)};
    s.median = {median_of(err), median_of(prec), median_of(rec), median_of(l1), median_of(trunc)};
    return s;
}

BenchmarkReport run_benchmark(const ExperimentSpec& spec) {
    const Setup setup = load_setup(spec);

    struct Job {
        std::size_t k = 0;
        std::size_t trial = 0;
    };
    std::vector<Job> jobs;
    for (std::size_t k : spec.k_values) {
        for (std::size_t t = 0; t < spec.trials; ++t) {
            jobs.push_back({k, t});
        }
    }
    const std::size_t per_job = spec.sample_counts.size();
    std::vector<ReportRow> rows(jobs.size() * per_job);

    auto run_job = [&](std::size_t j) {
        const Job& job = jobs[j];
        const std::uint64_t iseed = instance_seed(spec.seed, job.k, job.trial);
        const Instance inst = make_instance(setup.network, job.k, spec.means, setup.plan, iseed);
        const QuotientModel truth = inst.quotient();
        for (std::size_t c = 0; c < per_job; ++c) {
            const std::size_t n = spec.sample_counts[c];
            const auto start = std::chrono::steady_clock::now();
            EstimationResult result;
            if (spec.exact) {
                result = estimate(CumulantSource::exact(truth.as_model()), spec.dp);
            } else {
                MeasurementSet m = measure(inst, n, measurement_seed(iseed, n));
                result = estimate(CumulantSource::empirical(std::move(m.samples), spec.dp.order_cap), spec.dp);
            }
            const auto stop = std::chrono::steady_clock::now();
            ReportRow& row = rows[j * per_job + c];
            row.network = setup.label;
            row.k = job.k;
            row.samples = n;
            row.trial = job.trial;
            row.metrics = error_metrics(truth, result);
            row.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
            row.truncated = result.diagnostics.truncated;
        }
    };

    unsigned workers = spec.threads != 0 ? spec.threads : std::max(1U, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, jobs.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            try {
                run_job(j);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = jobs.size();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    BenchmarkReport report;
    report.rows = std::move(rows);
    for (std::size_t k : spec.k_values) {
        for (std::size_t n : spec.sample_counts) {
            std::vector<const ReportRow*> group;
            for (const ReportRow& r : report.rows) {
                if (r.k == k && r.samples == n) {
                    group.push_back(&r);
                }
            }
            report.summary.push_back(summarize(group));
        }
    }
    return report;
}

BenchmarkReport cmd_benchmark(const ExperimentSpec& spec) {
    BenchmarkReport report = run_benchmark(spec);
    if (!spec.out.empty()) {
        const fs::path out(spec.out);
        if (out.has_parent_path()) {
            fs::create_directories(out.parent_path());
        }
        {
            auto f = open_output(out);
            write_report_csv(f, report);
        }
        auto f = open_output(out.string() + ".timing.csv");
        write_timing_csv(f, report);
    }
    return report;
}

void write_report_csv(std::ostream& out, const BenchmarkReport& report) {
    out << "kind,network,k,samples,trial,rel_total_error,precision,recall,l1_error,truncated\n";
    for (const ReportRow& r : report.rows) {
        out << "trial," << r.network << ',' << r.k << ',' << r.samples << ',' << r.trial << ','
            << format_double(r.metrics.relative_total_error) << ',' << format_double(r.metrics.precision) << ','
            << format_double(r.metrics.recall) << ',' << format_double(r.metrics.l1_error) << ','
            << (r.truncated ? 1 : 0) << '\n';
    }
    for (const SummaryRow& s : report.summary) {
        for (const auto& [kind, m] : {std::pair{"mean", s.mean}, std::pair{"median", s.median}}) {
            out << kind << ',' << s.network << ',' << s.k << ',' << s.samples << ",," << format_double(m.rel_total_error)
                << ',' << format_double(m.precision) << ',' << format_double(m.recall) << ','
                << format_double(m.l1_error) << ',' << format_double(m.truncated) << '\n';
        }
    }
}

void write_timing_csv(std::ostream& out, const BenchmarkReport& report) {
    out << "network,k,samples,trial,runtime_ms\n";
    for (const ReportRow& r : report.rows) {
        out << r.network << ',' << r.k << ',' << r.samples << ',' << r.trial << ',' << format_double(r.runtime_ms)
            << '\n';
    }
}

} // namespace odtomo
