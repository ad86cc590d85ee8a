#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "rhlab/classifier.hpp"
#include "rhlab/device.hpp"
#include "rhlab/pattern.hpp"

namespace rhlab {

enum class Activation : std::uint8_t { None = 0, Relu = 1 };

/// One dense layer of 8-bit signed weights. `scale` converts integer
/// outputs to real units; scales compose multiplicatively across layers.
struct QuantizedLayer {
    std::uint32_t out_dim = 0;
    std::uint32_t in_dim = 0;
    double scale = 1.0;
    Activation activation = Activation::None;
    std::vector<std::int8_t> weights;  ///< row-major out_dim x in_dim
};

struct QuantizedNetwork {
    std::vector<QuantizedLayer> layers;

    void validate() const;
    std::uint32_t input_dim() const;
    std::uint32_t output_dim() const;
    std::uint64_t weight_bits() const;  ///< eight per weight
};

/// Integer feature vectors with class labels; all samples share `dim`.
struct Dataset {
    std::uint32_t dim = 0;
    std::vector<std::int8_t> features;  ///< row-major size() x dim
    std::vector<std::uint8_t> labels;

    std::size_t size() const { return labels.size(); }
    const std::int8_t* sample(std::size_t i) const { return features.data() + i * dim; }
};

struct ToyTask {
    QuantizedNetwork network;
    Dataset dataset;  ///< 1000-point evaluation set
};

/// Deterministic 10-class Gaussian-cluster task in 16 dimensions plus a
/// two-layer network fitted to it by quantized nearest-centroid: layer one
/// holds the per-class training means, layer two a scaled identity. Fails
/// with a calibration error when the fit lands below 90% on the evaluation
/// set (pick another seed).
ToyTask build_toy_network(std::uint64_t seed);

/// Exact integer-arithmetic inference; prediction is the lowest argmax
/// index. Shape error on dimension mismatch, input error on an empty set.
double evaluate(const QuantizedNetwork& net, const Dataset& data);

/// One weight bit; bit 7 is the sign. Ordering is (layer, row, col, bit),
/// which is also the attack's tie-breaking order.
struct BitRef {
    std::uint32_t layer = 0;
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    std::uint8_t bit = 0;
    auto operator<=>(const BitRef&) const = default;
};

/// Flips the addressed bit in place (an involution).
void apply_flip(QuantizedNetwork& net, const BitRef& ref);

/// Row-major placement of every weight bit onto consecutive DRAM cells:
/// layers in order, weights row-major, sign bit first within each weight.
struct CellLayout {
    struct LayerSpan {
        std::uint32_t out_dim = 0;
        std::uint32_t in_dim = 0;
        std::uint64_t base = 0;  ///< global index of the layer's first bit
    };

    std::uint32_t rows = 0;  ///< device footprint
    std::uint32_t cols = 0;
    std::vector<LayerSpan> spans;
    std::uint64_t total_bits = 0;

    CellCoord cell_of(const BitRef& ref) const;
    BitRef bit_at(std::uint64_t global_index) const;
};

/// Addressing error when the network does not fit the device.
CellLayout make_cell_layout(const QuantizedNetwork& net, std::uint32_t rows,
                            std::uint32_t cols);

/// Weakest security level an attack model can still flip under a scheme.
std::uint8_t min_flippable_level(Scheme scheme, AttackModel model);

/// Weight bits whose mapped cell the given attack model can flip, sorted by
/// (layer, row, col, bit). Shape error when map and layout footprints differ.
std::vector<BitRef> allowed_bits(const SecurityLevelMap& map, const CellLayout& layout,
                                 AttackModel model);

struct AttackConfig {
    std::uint64_t max_iters = 100;
    double target_acc = 0.10;  ///< random-guess level for ten classes
    std::uint32_t batch = 256; ///< candidate scoring uses the first `batch` samples
    std::uint32_t workers = 0; ///< candidate-scoring parallelism; 0 = hardware
};

struct AttackReport {
    std::uint64_t iterations = 0;
    std::vector<BitRef> flipped;      ///< one entry per iteration, in order
    std::vector<double> trajectory;   ///< evaluation accuracy; iterations + 1 entries
    double final_accuracy = 0.0;
    std::string reason;
};

/// Greedy bit-flip attack: every iteration scores each allowed single-bit
/// flip by cross-entropy on the fixed scoring batch, applies the one that
/// raises the loss most (ties break toward the lowest BitRef), and stops
/// once evaluation accuracy reaches target_acc or max_iters runs out.
/// Deterministic for fixed inputs regardless of worker count.
AttackReport attack(const QuantizedNetwork& net, const Dataset& data,
                    const std::vector<BitRef>& allowed, const AttackConfig& config = {});

/// Flat binary network image: "RHQN" magic, format version, layer count,
/// per-layer header (out, in, scale bits, activation), then row-major
/// int8 payloads in layer order.
void save_network(const QuantizedNetwork& net, const std::string& path);
QuantizedNetwork load_network(const std::string& path);

}  // namespace rhlab
