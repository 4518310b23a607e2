#include "odtomo/cumulants.hpp"

#include <cmath>
#include <mutex>
#include <unordered_set>

#include "odtomo/partitions.hpp"

namespace odtomo {

namespace {

// (n−1)!(−1)^(n−1) for a partition with n blocks.
double partition_coefficient(int blocks) {
    double f = 1.0;
    for (int i = 2; i < blocks; ++i) {
        f *= i;
    }
    return (blocks % 2 == 1) ? f : -f;
}

} // namespace

void validate_samples(const SampleMatrix& samples) {
    if (samples.rows() < 1) {
        throw InvalidInput("sample matrix has no rows");
    }
    if (!samples.allFinite()) {
        throw InvalidInput("sample matrix has non-finite entries");
    }
    if (samples.size() > 0 && samples.minCoeff() < 0.0) {
        throw InvalidInput("sample matrix has negative entries");
    }
}

void ExactModel::validate() const {
    if (columns.size() != means.size()) {
        throw InvalidInput("ExactModel: " + std::to_string(columns.size()) + " columns but " +
                           std::to_string(means.size()) + " means");
    }
    std::unordered_set<BitVector, BitVectorHash> seen;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != columns.front().size() || (link_count != 0 && columns[j].size() != link_count)) {
            throw InvalidInput("ExactModel: columns have different lengths");
        }
        if (columns[j].none()) {
            throw InvalidInput("ExactModel: zero column");
        }
        if (!seen.insert(columns[j]).second) {
            throw InvalidInput("ExactModel: duplicate column " + columns[j].to_string());
        }
        if (!(means[j] > 0.0) || !std::isfinite(means[j])) {
            throw InvalidInput("ExactModel: means must be positive and finite");
        }
    }
}

double ExactModel::total() const {
    double s = 0.0;
    for (double m : means) {
        s += m;
    }
    return s;
}

double exact_phi(const ExactModel& model, const BitVector& v) {
    double sum = 0.0;
    for (std::size_t j = 0; j < model.columns.size(); ++j) {
        if (model.columns[j].size() != v.size()) {
            throw InvalidInput("exact_phi: length mismatch");
        }
        if (v.subset_of(model.columns[j])) {
            sum += model.means[j];
        }
    }
    return sum;
}

// ---------------------------------------------------------------------------

struct EmpiricalCumulants::Expansion {
    int order = 0;
    std::vector<std::size_t> idx;
    bool has_zero_column = false;
    std::vector<double> moments; // by local subset mask
};

EmpiricalCumulants::EmpiricalCumulants(SampleMatrix samples, int order_cap)
    : samples_(std::move(samples)), order_cap_(order_cap) {
    validate_samples(samples_);
    if (order_cap < 1 || order_cap > kMaxPartitionOrder) {
        throw InvalidInput("order cap must be in 1.." + std::to_string(kMaxPartitionOrder));
    }
    column_nonzero_.resize(static_cast<std::size_t>(samples_.cols()));
    for (Eigen::Index c = 0; c < samples_.cols(); ++c) {
        column_nonzero_[static_cast<std::size_t>(c)] = (samples_.col(c).array() != 0.0).any();
    }
}

double EmpiricalCumulants::moment(const BitVector& subset, const std::vector<std::size_t>& global_idx,
                                  std::uint32_t local_mask) {
    if (auto it = moments_.find(subset); it != moments_.end()) {
        return it->second;
    }
    std::vector<std::size_t> cols;
    for (std::size_t k = 0; k < global_idx.size(); ++k) {
        if ((local_mask >> k) & 1U) {
            cols.push_back(global_idx[k]);
        }
    }
    const double m = empirical_moment(samples_, cols);
    moments_.emplace(subset, m);
    return m;
}

EmpiricalCumulants::Expansion EmpiricalCumulants::expand(const BitVector& v) {
    if (v.size() != static_cast<std::size_t>(samples_.cols())) {
        throw InvalidInput("joint cumulant: vector length " + std::to_string(v.size()) + " but samples have " +
                           std::to_string(samples_.cols()) + " columns");
    }
    Expansion e;
    e.order = v.count();
    if (e.order == 0) {
        throw InvalidInput("joint cumulant of the zero vector is undefined");
    }
    if (e.order > order_cap_) {
        throw OrderCapExceeded(e.order, order_cap_);
    }
    e.idx = v.indices();
    for (std::size_t i : e.idx) {
        if (!column_nonzero_[i]) {
            // Every partition has a block containing this column, whose moment is 0.
            e.has_zero_column = true;
            return e;
        }
    }
    const std::uint32_t full = (std::uint32_t{1} << e.order) - 1;
    e.moments.assign(full + 1, 0.0);
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        BitVector subset(v.size());
        for (int k = 0; k < e.order; ++k) {
            if ((mask >> k) & 1U) {
                subset.set(e.idx[static_cast<std::size_t>(k)]);
            }
        }
        e.moments[mask] = moment(subset, e.idx, mask);
    }
    return e;
}

double EmpiricalCumulants::cumulant(const BitVector& v) {
    const Expansion e = expand(v);
    if (e.has_zero_column) {
        return 0.0;
    }
    double sum = 0.0;
    SetPartitions parts(e.order);
    do {
        const int n = parts.block_count();
        const auto masks = parts.block_masks();
        double term = partition_coefficient(n);
        for (int b = 0; b < n; ++b) {
            term *= e.moments[masks[b]];
        }
        sum += term;
    } while (parts.advance());
    return sum;
}

double EmpiricalCumulants::standard_error(const BitVector& v) {
    const Expansion e = expand(v);
    const auto n_rows = samples_.rows();
    if (e.has_zero_column || n_rows < 2) {
        return 0.0;
    }

    // Gradient of the partition sum with respect to each subset moment.
    std::vector<double> grad(e.moments.size(), 0.0);
    SetPartitions parts(e.order);
    do {
        const int n = parts.block_count();
        const auto masks = parts.block_masks();
        const double c = partition_coefficient(n);
        for (int b = 0; b < n; ++b) {
            double others = c;
            for (int o = 0; o < n; ++o) {
                if (o != b) {
                    others *= e.moments[masks[o]];
                }
            }
            grad[masks[b]] += others;
        }
    } while (parts.advance());

    // Per-row influence Σ_S grad[S] Π_{i∈S} Y_i, built depth-first over subsets.
    Eigen::ArrayXd influence = Eigen::ArrayXd::Zero(n_rows);
    std::vector<Eigen::ArrayXd> stack(static_cast<std::size_t>(e.order));
    auto descend = [&](auto&& self, int start, int depth, std::uint32_t mask) -> void {
        for (int j = start; j < e.order; ++j) {
            const auto col = samples_.col(static_cast<Eigen::Index>(e.idx[static_cast<std::size_t>(j)])).array();
            auto& cur = stack[static_cast<std::size_t>(depth)];
            if (depth == 0) {
                cur = col;
            } else {
                cur = stack[static_cast<std::size_t>(depth - 1)] * col;
            }
            const std::uint32_t m = mask | (std::uint32_t{1} << j);
            if (grad[m] != 0.0) {
                influence += grad[m] * cur;
            }
            self(self, j + 1, depth + 1, m);
        }
    };
    descend(descend, 0, 0, 0);

    const double mean = influence.mean();
    const double var = (influence - mean).square().sum() / static_cast<double>(n_rows - 1);
    return std::sqrt(var / static_cast<double>(n_rows));
}

double joint_cumulant(const SampleMatrix& samples, const BitVector& v, int order_cap) {
    if (v.count() > order_cap) {
        throw OrderCapExceeded(v.count(), order_cap);
    }
    EmpiricalCumulants est(samples, std::min(std::max(order_cap, 1), kMaxPartitionOrder));
    return est.cumulant(v);
}

// ---------------------------------------------------------------------------

struct CumulantSource::State {
    struct Entry {
        double value = 0.0;
        double standard_error = std::numeric_limits<double>::quiet_NaN();
    };

    std::variant<EmpiricalCumulants, ExactModel> backend;
    std::mutex mutex;
    std::unordered_map<BitVector, Entry, BitVectorHash> cache;
};

CumulantSource::CumulantSource(std::unique_ptr<State> state) : state_(std::move(state)) {}

CumulantSource CumulantSource::empirical(SampleMatrix samples, int order_cap) {
    auto st = std::unique_ptr<State>(
        new State{EmpiricalCumulants(std::move(samples), order_cap), {}, {}});
    return CumulantSource(std::move(st));
}

CumulantSource CumulantSource::exact(ExactModel model) {
    model.validate();
    auto st = std::unique_ptr<State>(new State{std::move(model), {}, {}});
    return CumulantSource(std::move(st));
}

bool CumulantSource::is_exact() const {
    return std::holds_alternative<ExactModel>(state_->backend);
}

std::size_t CumulantSource::length() const {
    if (const auto* m = std::get_if<ExactModel>(&state_->backend)) {
        return m->length();
    }
    return static_cast<std::size_t>(std::get<EmpiricalCumulants>(state_->backend).samples().cols());
}

int CumulantSource::order_cap() const {
    if (const auto* e = std::get_if<EmpiricalCumulants>(&state_->backend)) {
        return e->order_cap();
    }
    return std::numeric_limits<int>::max();
}

double CumulantSource::phi(const BitVector& v) const {
    std::lock_guard lock(state_->mutex);
    if (auto it = state_->cache.find(v); it != state_->cache.end()) {
        return it->second.value;
    }
    double value = 0.0;
    if (auto* e = std::get_if<EmpiricalCumulants>(&state_->backend)) {
        value = e->cumulant(v);
    } else {
        value = exact_phi(std::get<ExactModel>(state_->backend), v);
    }
    state_->cache.emplace(v, State::Entry{value, std::numeric_limits<double>::quiet_NaN()});
    return value;
}

double CumulantSource::standard_error(const BitVector& v) const {
    if (is_exact()) {
        return 0.0;
    }
    phi(v);
    std::lock_guard lock(state_->mutex);
    auto& entry = state_->cache.at(v);
    if (std::isnan(entry.standard_error)) {
        entry.standard_error = std::get<EmpiricalCumulants>(state_->backend).standard_error(v);
    }
    return entry.standard_error;
}

std::size_t CumulantSource::evaluations() const {
    std::lock_guard lock(state_->mutex);
    return state_->cache.size();
}

} // namespace odtomo
