#include "nss/lca.hpp"

#include <cmath>
#include <string>

namespace nss {

Dictionary::Dictionary(Matrix atoms) : atoms_(std::move(atoms)) {
    for (Eigen::Index j = 0; j < atoms_.cols(); ++j) {
        const double n = atoms_.col(j).norm();
        if (!(std::abs(n - 1.0) <= kNormTolerance)) {
            throw PreconditionError("dictionary atom " + std::to_string(j) + " is not unit-norm (norm " +
                                    std::to_string(n) + ")");
        }
    }
}

Dictionary Dictionary::normalized(Matrix atoms) {
    for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
        const double n = atoms.col(j).norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw PreconditionError("cannot normalize zero or non-finite atom " + std::to_string(j));
        }
        atoms.col(j) /= n;
    }
    return Dictionary(std::move(atoms));
}

InhibitionMatrix build_inhibition(const Dictionary& dict) {
    InhibitionMatrix inhib;
    inhib.w = -(dict.atoms().transpose() * dict.atoms());
    inhib.w.diagonal().setZero();
    // Symmetrize away rounding differences between (i, j) and (j, i).
    inhib.w = 0.5 * (inhib.w + inhib.w.transpose()).eval();
    return inhib;
}

NeuronModel parse_neuron_model(std::string_view name) {
    if (name == "tdq") return NeuronModel::Tdq;
    if (name == "lif") return NeuronModel::Lif;
    if (name == "continuous") return NeuronModel::Continuous;
    throw ConfigError("neuron must be one of tdq, lif, continuous (got '" + std::string(name) + "')");
}

std::string_view to_string(NeuronModel model) {
    switch (model) {
        case NeuronModel::Tdq: return "tdq";
        case NeuronModel::Lif: return "lif";
        case NeuronModel::Continuous: return "continuous";
    }
    return "tdq";
}

void LcaConfig::validate() const {
    if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in (0, 1]");
    if (!(tau_ms > 0.0)) throw ConfigError("tau_ms must be > 0");
    if (!(dt_ms > 0.0 && dt_ms < tau_ms)) throw ConfigError("dt_ms must satisfy 0 < dt_ms < tau_ms");
    if (n_steps < 1) throw ConfigError("n_steps must be >= 1");
    if (bit_width < 1 || bit_width > 32) throw ConfigError("bit_width must lie in [1, 32]");
    if (!(lif_threshold > 0.0)) throw ConfigError("lif_threshold must be > 0");
    if (decode_window < 1) throw ConfigError("decode_window must be >= 1");
}

double LcaConfig::quant_step() const {
    return 1.0 / (std::ldexp(1.0, bit_width) - 1.0);
}

void LcaLayerState::reset() {
    u.setZero();
    v.setZero();
    a.setZero();
}

QuantizedEmission tdq_quantize(double drive, double carry, double step) noexcept {
    const double p = drive + carry;
    const double levels = std::round(1.0 / step);
    // The tiny slack absorbs rounding in accumulated carries (0.4 + 0.4 + ...).
    double k = std::floor(p / step + 1e-9);
    if (k < 0.0) k = 0.0;
    if (k > levels) k = levels;
    const double emitted = k * step;
    return {emitted, p - emitted};
}

LifEmission lif_fire(double potential, double threshold, LifReset reset) noexcept {
    if (potential >= threshold) {
        return {true, reset == LifReset::Soft ? potential - threshold : 0.0};
    }
    return {false, potential};
}

const Vector& tdq_emit(LcaLayerState& state, const Vector& u_new, const LcaConfig& cfg) {
    state.u = u_new;
    if (cfg.neuron == NeuronModel::Continuous) {
        for (Eigen::Index i = 0; i < u_new.size(); ++i) state.a[i] = rectified_softshrink(u_new[i], cfg.lambda);
        state.v.setZero();
        return state.a;
    }
    const double s = cfg.quant_step();
    for (Eigen::Index i = 0; i < u_new.size(); ++i) {
        const auto q = tdq_quantize(rectified_softshrink(u_new[i], cfg.lambda), state.v[i], s);
        state.a[i] = q.emitted;
        state.v[i] = q.carry;
    }
    return state.a;
}

const Vector& lif_emit(LcaLayerState& state, const Vector& u_new, const LcaConfig& cfg) {
    // The comparator voltage v integrates the rectified activation; a spike
    // has unit height.
    state.u = u_new;
    for (Eigen::Index i = 0; i < u_new.size(); ++i) {
        const auto f = lif_fire(state.v[i] + rectified_softshrink(u_new[i], cfg.lambda), cfg.lif_threshold,
                                cfg.lif_reset);
        state.a[i] = f.spike ? 1.0 : 0.0;
        state.v[i] = f.potential;
    }
    return state.a;
}

void lca_step(LcaLayerState& state, const Vector& bias, const InhibitionMatrix& inhib, const LcaConfig& cfg) {
    const Eigen::Index m = state.u.size();
    if (bias.size() != m || inhib.w.rows() != m) throw DimensionError("lca_step: bias/state/inhibition size mismatch");

    Vector drive = bias - state.u;
    for (Eigen::Index j = 0; j < m; ++j) {
        const double aj = state.a[j];
        if (aj != 0.0) drive.noalias() += aj * inhib.w.col(j);
    }
    Vector u_new = state.u + cfg.leak_ratio() * drive;
    if (!u_new.allFinite()) throw NumericalFault("non-finite membrane potential in lca_step");

    if (cfg.neuron == NeuronModel::Lif) {
        lif_emit(state, u_new, cfg);
    } else {
        tdq_emit(state, u_new, cfg);
    }
}

double lasso_objective(const Vector& x, const Dictionary& dict, const Vector& a, double lambda) {
    return 0.5 * (x - dict.atoms() * a).squaredNorm() + lambda * a.lpNorm<1>();
}

SparseCode sparse_code(const Vector& x, const Dictionary& dict, const InhibitionMatrix& inhib, const LcaConfig& cfg) {
    cfg.validate();
    if (x.size() != dict.input_dim()) throw DimensionError("sparse_code: input length does not match dictionary");
    if (!(std::abs(x.norm() - 1.0) <= 1e-6)) throw PreconditionError("sparse_code: input must be unit-norm");

    const Eigen::Index m = dict.atom_count();
    const Vector bias = dict.atoms().transpose() * x;
    LcaLayerState state(m);
    SparseCode out;
    out.decoded = Vector::Zero(m);
    std::vector<char> active(static_cast<std::size_t>(m), 0);
    const int window = std::min(cfg.decode_window, cfg.n_steps);
    for (int t = 0; t < cfg.n_steps; ++t) {
        lca_step(state, bias, inhib, cfg);
        for (Eigen::Index i = 0; i < m; ++i) {
            if (state.a[i] != 0.0) {
                ++out.emitted_spikes;
                active[static_cast<std::size_t>(i)] = 1;
            }
        }
        if (t >= cfg.n_steps - window) out.decoded += state.a;
    }
    out.decoded /= static_cast<double>(window);
    out.code = state.a;
    out.residual = x - dict.atoms() * out.decoded;
    for (char c : active) out.active_neurons += c;
    return out;
}

SparseCode sparse_code(const Vector& x, const Dictionary& dict, const LcaConfig& cfg) {
    return sparse_code(x, dict, build_inhibition(dict), cfg);
}

}  // namespace nss
