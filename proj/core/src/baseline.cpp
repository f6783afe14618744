#include "nss/baseline.hpp"

#include <Eigen/Eigenvalues>

#include <limits>

namespace nss {

Vector PcaModel::project(const Vector& waveform) const {
    if (waveform.size() != static_cast<Eigen::Index>(n_channels) * segment_length) {
        throw DimensionError("PCA projection: waveform length mismatch");
    }
    Vector f(feature_dim());
    for (int c = 0; c < n_channels; ++c) {
        const Vector centered = waveform.segment(static_cast<Eigen::Index>(c) * segment_length, segment_length) -
                                means[static_cast<std::size_t>(c)];
        f.segment(static_cast<Eigen::Index>(c) * components, components) =
            axes[static_cast<std::size_t>(c)].transpose() * centered;
    }
    return f;
}

Matrix PcaModel::project_all(std::span<const SpikeWaveform> waveforms) const {
    Matrix out(static_cast<Eigen::Index>(waveforms.size()), feature_dim());
    for (std::size_t i = 0; i < waveforms.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = project(waveforms[i].vector).transpose();
    }
    return out;
}

PcaModel pca_fit(std::span<const SpikeWaveform> waveforms, int n_channels, int components_per_channel) {
    if (n_channels < 1) throw ConfigError("n_channels must be >= 1");
    if (components_per_channel < 1) throw ConfigError("components_per_channel must be >= 1");
    if (waveforms.size() < static_cast<std::size_t>(components_per_channel) + 1) {
        throw PreconditionError("pca_fit: need at least components_per_channel + 1 waveforms");
    }
    const Eigen::Index dim = waveforms.front().vector.size();
    if (dim % n_channels != 0) throw DimensionError("pca_fit: waveform length not divisible by channel count");
    const int seg = static_cast<int>(dim / n_channels);
    if (components_per_channel > seg) throw ConfigError("components_per_channel exceeds segment length");

    PcaModel model;
    model.n_channels = n_channels;
    model.segment_length = seg;
    model.components = components_per_channel;
    const auto n = static_cast<Eigen::Index>(waveforms.size());
    double total_variance = 0.0;
    for (int c = 0; c < n_channels; ++c) {
        Matrix x(n, seg);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& v = waveforms[static_cast<std::size_t>(i)].vector;
            if (v.size() != dim) throw DimensionError("pca_fit: inconsistent waveform lengths");
            x.row(i) = v.segment(static_cast<Eigen::Index>(c) * seg, seg).transpose();
        }
        const Vector mean = x.colwise().mean().transpose();
        x.rowwise() -= mean.transpose();
        const Matrix cov = (x.transpose() * x) / static_cast<double>(n - 1);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
        if (eig.info() != Eigen::Success) throw NumericalFault("pca_fit: eigendecomposition failed");
        // Eigen sorts ascending; take the trailing columns in reverse.
        Matrix axes(seg, components_per_channel);
        Vector explained(components_per_channel);
        const double trace = std::max(eig.eigenvalues().sum(), 0.0);
        total_variance += trace;
        for (int k = 0; k < components_per_channel; ++k) {
            const Eigen::Index idx = seg - 1 - k;
            Vector axis = eig.eigenvectors().col(idx);
            // Sign convention: largest-magnitude loading positive.
            Eigen::Index arg;
            axis.cwiseAbs().maxCoeff(&arg);
            if (axis[arg] < 0.0) axis = -axis;
            axes.col(k) = axis;
            explained[k] = trace > 0.0 ? std::max(eig.eigenvalues()[idx], 0.0) / trace : 0.0;
        }
        model.means.push_back(mean);
        model.axes.push_back(std::move(axes));
        model.explained.push_back(std::move(explained));
    }
    if (!(total_variance > 0.0)) throw PreconditionError("pca_fit: zero covariance (all waveforms identical)");
    return model;
}

int KMeansModel::assign(const Vector& feature) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < centroids.rows(); ++k) {
        const double d = (centroids.row(k).transpose() - feature).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(k);
        }
    }
    return best;
}

KMeansModel kmeans_fit(const Matrix& features, int k, std::uint64_t seed, const KMeansOptions& opts) {
    if (k < 1) throw ConfigError("K must be >= 1");
    const Eigen::Index n = features.rows();
    if (k > n) throw PreconditionError("kmeans_fit: K exceeds the number of points");
    if (!features.allFinite()) throw NumericalFault("kmeans_fit: non-finite features");

    Rng rng(seed);
    KMeansModel model;
    model.centroids.resize(k, features.cols());

    // k-means++ seeding.
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    Eigen::Index first = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
    model.centroids.row(0) = features.row(first);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            d2[static_cast<std::size_t>(i)] =
                std::min(d2[static_cast<std::size_t>(i)], (features.row(i) - model.centroids.row(c - 1)).squaredNorm());
            total += d2[static_cast<std::size_t>(i)];
        }
        Eigen::Index pick = c;
        if (total > 0.0) {
            // Zero-distance points never advance the cumulative sum, so they
            // cannot be drawn.
            const double r = std::uniform_real_distribution<double>(0.0, total)(rng);
            double cum = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                cum += d2[static_cast<std::size_t>(i)];
                if (cum > r) {
                    pick = i;
                    break;
                }
            }
        }
        model.centroids.row(c) = features.row(pick);
    }

    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    for (int it = 0; it < opts.max_iterations; ++it) {
        double inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const int a = model.assign(features.row(i).transpose());
            labels[static_cast<std::size_t>(i)] = a;
            inertia += (features.row(i) - model.centroids.row(a)).squaredNorm();
        }
        model.inertia_history.push_back(inertia);
        model.inertia = inertia;
        model.iterations = it + 1;

        Matrix sums = Matrix::Zero(k, features.cols());
        std::vector<long> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(labels[static_cast<std::size_t>(i)]) += features.row(i);
            ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        }
        double shift = 0.0;
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) continue;  // empty cluster keeps its centroid
            const Eigen::RowVectorXd updated = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            shift = std::max(shift, (updated - model.centroids.row(c)).norm());
            model.centroids.row(c) = updated;
        }
        if (shift <= opts.tolerance) {
            double final_inertia = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                final_inertia += (features.row(i) - model.centroids.row(model.assign(features.row(i).transpose()))).squaredNorm();
            }
            model.inertia = final_inertia;
            model.inertia_history.push_back(final_inertia);
            break;
        }
    }
    return model;
}

void BaselineConfig::validate() const {
    if (k_clusters < 1) throw ConfigError("baseline.k_clusters must be >= 1");
    if (components_per_channel < 1) throw ConfigError("baseline.components_per_channel must be >= 1");
    if (!(train_window_s >= 0.0)) throw ConfigError("baseline.train_window_s must be >= 0");
}

SortResult baseline_sort(std::span<const SpikeWaveform> waveforms, int n_channels, const BaselineConfig& cfg,
                         std::uint64_t seed) {
    cfg.validate();
    std::vector<SpikeWaveform> training;
    for (const auto& w : waveforms) {
        if (w.timestamp < cfg.train_window_s) training.push_back(w);
    }
    if (training.size() < static_cast<std::size_t>(cfg.k_clusters)) {
        throw PreconditionError("baseline_sort: fewer training waveforms than clusters");
    }
    const PcaModel pca = pca_fit(training, n_channels, cfg.components_per_channel);
    const KMeansModel km = kmeans_fit(pca.project_all(training), cfg.k_clusters, seed);

    SortResult result;
    for (const auto& w : waveforms) {
        if (!cfg.label_training_window && w.timestamp < cfg.train_window_s) continue;
        result.labels.push_back({w.timestamp, km.assign(pca.project(w.vector))});
    }
    return result;
}

}  // namespace nss
