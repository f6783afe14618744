#pragma once

#include "nss/types.hpp"

#include <filesystem>
#include <string_view>

namespace nss {

/// Matrix of unit-L2-norm atoms, one per column (input_dim × atom_count).
class Dictionary {
public:
    static constexpr double kNormTolerance = 1e-6;

    Dictionary() = default;
    /// Throws PreconditionError if any column norm differs from 1 by more
    /// than kNormTolerance.
    explicit Dictionary(Matrix atoms);

    /// Scales every column to unit norm; zero columns are rejected.
    static Dictionary normalized(Matrix atoms);

    const Matrix& atoms() const noexcept { return atoms_; }
    Eigen::Index input_dim() const noexcept { return atoms_.rows(); }
    Eigen::Index atom_count() const noexcept { return atoms_.cols(); }

private:
    Matrix atoms_;
};

/// Lateral inhibition -(D^T D - I): symmetric, zero diagonal.
struct InhibitionMatrix {
    Matrix w;
};

InhibitionMatrix build_inhibition(const Dictionary& dict);

enum class NeuronModel {
    Tdq,         ///< graded spikes with temporally diffused quantization
    Lif,         ///< binary spikes from an integrate-and-fire comparator
    Continuous,  ///< exact activation, no quantization
};

enum class LifReset { Soft, Hard };

NeuronModel parse_neuron_model(std::string_view name);
std::string_view to_string(NeuronModel model);

struct LcaConfig {
    double lambda = 0.03;
    double tau_ms = 2.0;
    double dt_ms = 0.1;
    int n_steps = 200;
    int bit_width = 2;
    NeuronModel neuron = NeuronModel::Tdq;
    double lif_threshold = 1.06;
    LifReset lif_reset = LifReset::Soft;
    /// Trailing steps averaged to decode the emitted code.
    int decode_window = 10;

    void validate() const;
    /// Spike height 1/(2^N - 1).
    double quant_step() const;
    double leak_ratio() const noexcept { return dt_ms / tau_ms; }
};

/// Membrane potentials u, carried quantization error (or LIF voltage) v,
/// and the most recent emission a.
struct LcaLayerState {
    Vector u;
    Vector v;
    Vector a;

    explicit LcaLayerState(Eigen::Index neurons = 0)
        : u(Vector::Zero(neurons)), v(Vector::Zero(neurons)), a(Vector::Zero(neurons)) {}
    void reset();
};

inline double rectified_softshrink(double u, double lambda) noexcept {
    return u > lambda ? u - lambda : 0.0;
}

struct QuantizedEmission {
    double emitted;
    double carry;
};

/// One TDQ step on a single neuron: p = drive + carry, emit floor(p/s)·s
/// clamped to [0, 1], keep the remainder as the new carry.
QuantizedEmission tdq_quantize(double drive, double carry, double step) noexcept;

struct LifEmission {
    bool spike;
    double potential;
};

/// Threshold comparison with soft (subtract) or hard (zero) reset.
LifEmission lif_fire(double potential, double threshold, LifReset reset) noexcept;

/// Layer-wide emitters. Both set state.u = u_new, update the carry/voltage
/// in state.v and store the emission in state.a, which is also returned.
const Vector& tdq_emit(LcaLayerState& state, const Vector& u_new, const LcaConfig& cfg);
const Vector& lif_emit(LcaLayerState& state, const Vector& u_new, const LcaConfig& cfg);

/// Explicit Euler step u += (dt/tau)(b - u + W a_prev), then emission per
/// cfg.neuron. Throws NumericalFault on non-finite state.
void lca_step(LcaLayerState& state, const Vector& bias, const InhibitionMatrix& inhib, const LcaConfig& cfg);

/// 1/2 ||x - D a||^2 + lambda ||a||_1
double lasso_objective(const Vector& x, const Dictionary& dict, const Vector& a, double lambda);

struct SparseCode {
    Vector code;      ///< emission after the final step
    Vector decoded;   ///< mean emission over the trailing decode window
    Vector residual;  ///< x - D·decoded
    long emitted_spikes = 0;
    int active_neurons = 0;
};

/// Presents a unit-norm input for cfg.n_steps steps from a reset state.
SparseCode sparse_code(const Vector& x, const Dictionary& dict, const InhibitionMatrix& inhib, const LcaConfig& cfg);
SparseCode sparse_code(const Vector& x, const Dictionary& dict, const LcaConfig& cfg);

/// Binary layout: "NSSD", u32 version, u32 L, u32 M, then L·M little-endian
/// float64 in column-major order.
std::string serialize_dictionary(const Dictionary& dict);
Dictionary deserialize_dictionary(std::string_view bytes, std::size_t* consumed = nullptr);
void save_dictionary(const std::filesystem::path& path, const Dictionary& dict);
Dictionary load_dictionary(const std::filesystem::path& path);

}  // namespace nss
