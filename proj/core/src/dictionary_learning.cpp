#include "nss/dictionary_learning.hpp"

#include <cmath>
#include <string>

namespace nss {

void LearnConfig::validate() const {
    if (!(eta_slow > 0.0)) throw ConfigError("eta_slow must be > 0");
    if (!(eta_strong >= eta_slow)) throw ConfigError("eta_strong must be >= eta_slow");
    if (!(strong_phase_s >= 0.0)) throw ConfigError("strong_phase_s must be >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(noise_variance >= 0.0)) throw ConfigError("noise_variance must be >= 0");
    if (!(eta_gain > 0.0)) throw ConfigError("eta_gain must be > 0");
    if (steps_strong < 1 || steps_slow < 1) throw ConfigError("steps_strong and steps_slow must be >= 1");
}

TrainPhase TrainPhase::at(double elapsed_s, const LearnConfig& cfg) {
    return {elapsed_s, elapsed_s < cfg.strong_phase_s ? Phase::Strong : Phase::Slow};
}

Schedule schedule(double elapsed_s, const LearnConfig& cfg) {
    if (!(elapsed_s >= 0.0)) throw PreconditionError("schedule: elapsed_s must be >= 0");
    if (TrainPhase::at(elapsed_s, cfg).phase == Phase::Strong) return {cfg.eta_strong, cfg.steps_strong};
    return {cfg.eta_slow, cfg.steps_slow};
}

BatchReduction parse_batch_reduction(std::string_view name) {
    if (name == "mean") return BatchReduction::Mean;
    if (name == "sum") return BatchReduction::Sum;
    throw ConfigError("batch_reduction must be mean or sum (got '" + std::string(name) + "')");
}

std::string_view to_string(BatchReduction r) { return r == BatchReduction::Sum ? "sum" : "mean"; }

namespace {

Vector random_unit_vector(Eigen::Index n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    do {
        for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
    } while (!(v.norm() > 0.0));
    return v / v.norm();
}

}  // namespace

Dictionary init_dictionary(Eigen::Index input_dim, Eigen::Index atoms, std::uint64_t seed) {
    if (input_dim < 1 || atoms < 1) throw ConfigError("dictionary dimensions must be >= 1");
    Rng rng(seed);
    Matrix d(input_dim, atoms);
    for (Eigen::Index j = 0; j < atoms; ++j) d.col(j) = random_unit_vector(input_dim, rng);
    return Dictionary(std::move(d));
}

Dictionary dictionary_update(const Dictionary& dict, std::span<const LearningPair> batch, double eta,
                             double noise_variance, Rng& rng, BatchReduction reduction) {
    const Matrix& d = dict.atoms();
    Matrix grad = Matrix::Zero(d.rows(), d.cols());
    for (const auto& pair : batch) {
        if (pair.input.size() != d.rows() || pair.code.size() != d.cols()) {
            throw DimensionError("dictionary_update: pair dimensions do not match dictionary");
        }
        const Vector residual = pair.input - d * pair.code;
        grad.noalias() += residual * pair.code.transpose();
    }
    Matrix updated = d;
    if (!batch.empty()) {
        updated += (reduction == BatchReduction::Sum ? eta : eta / static_cast<double>(batch.size())) * grad;
    }
    if (noise_variance > 0.0) {
        std::normal_distribution<double> normal(0.0, std::sqrt(noise_variance));
        for (Eigen::Index j = 0; j < updated.cols(); ++j) {
            for (Eigen::Index i = 0; i < updated.rows(); ++i) updated(i, j) += normal(rng);
        }
    }
    for (Eigen::Index j = 0; j < updated.cols(); ++j) {
        const double n = updated.col(j).norm();
        if (n > 0.0 && std::isfinite(n)) {
            updated.col(j) /= n;
        } else {
            updated.col(j) = random_unit_vector(updated.rows(), rng);
        }
    }
    return Dictionary(std::move(updated));
}

}  // namespace nss
