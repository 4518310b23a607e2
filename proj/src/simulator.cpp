#include "odtomo/simulator.hpp"

#include <cmath>
#include <cstring>
#include <iomanip>
#include <sstream>

#include "odtomo/error.hpp"

namespace odtomo {

namespace {

std::uint64_t poisson_multiplication(double mean, Rng& rng) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = rng.uniform();
    while (prod > limit) {
        ++k;
        prod *= rng.uniform();
    }
    return k;
}

// Hörmann (1993), "The transformed rejection method for generating Poisson random variables".
std::uint64_t poisson_ptrs(double mean, Rng& rng) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) {
            return static_cast<std::uint64_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

class Fnv1a {
  public:
    template <typename T>
    void add(const T& value) {
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, &value, sizeof(T));
        for (unsigned char c : bytes) {
            h_ = (h_ ^ c) * 0x100000001B3ULL;
        }
    }
    [[nodiscard]] std::uint64_t value() const { return h_; }

  private:
    std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

} // namespace

std::uint64_t poisson_sample(double mean, Rng& rng) {
    if (!(mean > 0.0) || !std::isfinite(mean)) {
        throw InvalidInput("poisson_sample: mean must be positive and finite");
    }
    return mean < 30.0 ? poisson_multiplication(mean, rng) : poisson_ptrs(mean, rng);
}

std::uint64_t Instance::hash() const {
    Fnv1a h;
    h.add(static_cast<std::uint64_t>(paths.size()));
    for (std::size_t j = 0; j < paths.size(); ++j) {
        h.add(static_cast<std::uint64_t>(paths[j].origin));
        h.add(static_cast<std::uint64_t>(paths[j].destination));
        for (std::size_t e : paths[j].edges) {
            h.add(static_cast<std::uint64_t>(e));
        }
        h.add(means[j]);
    }
    for (std::size_t e : plan.edges) {
        h.add(static_cast<std::uint64_t>(e));
    }
    return h.value();
}

QuotientModel Instance::quotient() const {
    return build_quotient(paths, means, plan, network->edge_count());
}

Eigen::MatrixXd Instance::mixing_matrix() const {
    const std::size_t m = network->edge_count();
    return projection_matrix<double>(plan, m) * incidence<double>(paths, m);
}

std::vector<std::pair<std::size_t, std::size_t>> reachable_od_pairs(const Network& net) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t s = 0; s < net.node_count(); ++s) {
        const auto reach = reachable_from(net, s);
        for (std::size_t t = 0; t < net.node_count(); ++t) {
            if (reach[t]) {
                pairs.emplace_back(s, t);
            }
        }
    }
    return pairs;
}

Instance make_instance(std::shared_ptr<const Network> net, std::size_t k, MeanRange range, ObservationPlan plan,
                       std::uint64_t seed) {
    if (!net) {
        throw InvalidInput("make_instance: no network");
    }
    if (!(range.lo > 0.0) || !(range.hi >= range.lo) || !std::isfinite(range.hi)) {
        throw InvalidInput("make_instance: mean range must satisfy 0 < lo <= hi");
    }
    plan.validate(net->edge_count());
    auto pairs = reachable_od_pairs(*net);
    if (k == 0 || k > pairs.size()) {
        throw InvalidInput("make_instance: k=" + std::to_string(k) + " but only " + std::to_string(pairs.size()) +
                           " reachable OD pairs");
    }
    Rng rng(seed);
    // Partial Fisher–Yates: the first k slots become a uniform k-subset.
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pairs.size() - i));
        std::swap(pairs[i], pairs[j]);
    }
    Instance inst;
    inst.network = net;
    inst.plan = std::move(plan);
    inst.seed = seed;
    for (std::size_t i = 0; i < k; ++i) {
        inst.paths.push_back(shortest_path(*net, pairs[i].first, pairs[i].second));
        inst.means.push_back(rng.uniform(range.lo, range.hi));
    }
    return inst;
}

MeasurementSet measure(const Instance& inst, std::size_t n, Rng& rng) {
    if (n == 0) {
        throw InvalidInput("measure: need at least one sample");
    }
    const auto k = static_cast<Eigen::Index>(inst.paths.size());
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), k);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index j = 0; j < k; ++j) {
            x(r, j) = static_cast<double>(poisson_sample(inst.means[static_cast<std::size_t>(j)], rng));
        }
    }
    MeasurementSet out;
    out.samples = x * inst.mixing_matrix().transpose();
    out.instance_hash = inst.hash();
    for (std::size_t e : inst.plan.edges) {
        out.column_names.push_back(edge_column_name(e));
    }
    return out;
}

MeasurementSet measure(const Instance& inst, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    MeasurementSet out = measure(inst, n, rng);
    out.seed = seed;
    return out;
}

std::string edge_column_name(std::size_t edge) {
    return "e" + std::to_string(edge);
}

void write_measurements_csv(std::ostream& out, const MeasurementSet& m) {
    for (std::size_t c = 0; c < m.column_names.size(); ++c) {
        out << (c ? "," : "") << m.column_names[c];
    }
    out << '\n';
    std::ostringstream cell;
    cell << std::setprecision(17);
    for (Eigen::Index r = 0; r < m.samples.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.samples.cols(); ++c) {
            if (c) {
                out << ',';
            }
            const double v = m.samples(r, c);
            if (v == std::floor(v) && std::fabs(v) < 9.0e15) {
                out << static_cast<long long>(v);
            } else {
                cell.str({});
                cell << v;
                out << cell.str();
            }
        }
        out << '\n';
    }
}

MeasurementSet read_measurements_csv(std::istream& in, const std::string& source_name) {
    MeasurementSet m;
    std::string line;
    std::size_t lineno = 0;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        for (std::string cell; std::getline(ss, cell, ',');) {
            cells.push_back(cell);
        }
        if (!s.empty() && s.back() == ',') {
            cells.emplace_back();
        }
        return cells;
    };
    auto strip = [](std::string s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) {
            s.pop_back();
        }
        while (!s.empty() && s.front() == ' ') {
            s.erase(s.begin());
        }
        return s;
    };
    if (!std::getline(in, line)) {
        throw ParseError(source_name, 1, "missing header row");
    }
    ++lineno;
    for (auto& c : split(strip(line))) {
        m.column_names.push_back(strip(c));
    }
    if (m.column_names.empty() || m.column_names.front().empty()) {
        throw ParseError(source_name, lineno, "empty header row");
    }
    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != m.column_names.size()) {
            throw ParseError(source_name, lineno,
                             "expected " + std::to_string(m.column_names.size()) + " fields, found " +
                                 std::to_string(cells.size()));
        }
        for (const auto& raw : cells) {
            const std::string c = strip(raw);
            double v = 0.0;
            std::size_t used = 0;
            try {
                v = std::stod(c, &used);
            } catch (const std::exception&) {
                used = std::string::npos;
            }
            if (used != c.size() || c.empty()) {
                throw ParseError(source_name, lineno, "not a number: '" + c + "'");
            }
            if (!std::isfinite(v) || v < 0.0) {
                throw ParseError(source_name, lineno, "flow counts must be finite and nonnegative");
            }
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) {
        throw ParseError(source_name, lineno, "no sample rows");
    }
    m.samples = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(m.column_names.size()));
    return m;
}

} // namespace odtomo
