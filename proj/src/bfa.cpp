#include "rhlab/bfa.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>

#include "rhlab/errors.hpp"
#include "rhlab/parallel.hpp"
#include "rhlab/rng.hpp"

namespace rhlab {

void QuantizedNetwork::validate() const {
    if (layers.empty())
        fail(ErrorKind::Shape, "network has no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const QuantizedLayer& layer = layers[l];
        if (layer.in_dim == 0 || layer.out_dim == 0)
            fail(ErrorKind::Shape, "layer " + std::to_string(l) + " has a zero dimension");
        if (layer.weights.size() !=
            static_cast<std::size_t>(layer.in_dim) * layer.out_dim)
            fail(ErrorKind::Shape, "layer " + std::to_string(l) + " holds " +
                                       std::to_string(layer.weights.size()) +
                                       " weights, dimensions demand " +
                                       std::to_string(layer.in_dim * layer.out_dim));
        if (!(layer.scale > 0.0) || !std::isfinite(layer.scale))
            fail(ErrorKind::Config, "layer " + std::to_string(l) + " scale must be positive");
        if (l > 0 && layer.in_dim != layers[l - 1].out_dim)
            fail(ErrorKind::Shape, "layer " + std::to_string(l) + " expects " +
                                       std::to_string(layer.in_dim) + " inputs, previous " +
                                       "layer emits " + std::to_string(layers[l - 1].out_dim));
    }
}

std::uint32_t QuantizedNetwork::input_dim() const {
    return layers.empty() ? 0 : layers.front().in_dim;
}

std::uint32_t QuantizedNetwork::output_dim() const {
    return layers.empty() ? 0 : layers.back().out_dim;
}

std::uint64_t QuantizedNetwork::weight_bits() const {
    std::uint64_t bits = 0;
    for (const QuantizedLayer& layer : layers) bits += 8ull * layer.weights.size();
    return bits;
}

namespace {

std::int64_t activate(Activation kind, std::int64_t pre) {
    return kind == Activation::Relu && pre < 0 ? 0 : pre;
}

/// Forward pass returning the final integer activations.
std::vector<std::int64_t> forward(const QuantizedNetwork& net, const std::int8_t* x) {
    std::vector<std::int64_t> act(x, x + net.input_dim());
    std::vector<std::int64_t> next;
    for (const QuantizedLayer& layer : net.layers) {
        next.assign(layer.out_dim, 0);
        for (std::uint32_t j = 0; j < layer.out_dim; ++j) {
            const std::int8_t* row = layer.weights.data() +
                                     static_cast<std::size_t>(j) * layer.in_dim;
            std::int64_t sum = 0;
            for (std::uint32_t i = 0; i < layer.in_dim; ++i)
                sum += static_cast<std::int64_t>(row[i]) * act[i];
            next[j] = activate(layer.activation, sum);
        }
        act.swap(next);
    }
    return act;
}

std::uint32_t argmax_class(const std::vector<std::int64_t>& logits) {
    std::uint32_t best = 0;
    for (std::uint32_t j = 1; j < logits.size(); ++j)
        if (logits[j] > logits[best]) best = j;  // ties keep the lowest index
    return best;
}

}  // namespace

double evaluate(const QuantizedNetwork& net, const Dataset& data) {
    net.validate();
    if (data.size() == 0)
        fail(ErrorKind::Input, "cannot evaluate on an empty dataset");
    if (data.dim != net.input_dim())
        fail(ErrorKind::Shape, "dataset dimension " + std::to_string(data.dim) +
                                   " does not match network input " +
                                   std::to_string(net.input_dim()));
    if (data.features.size() != data.size() * static_cast<std::size_t>(data.dim))
        fail(ErrorKind::Shape, "dataset feature buffer does not match its label count");

    std::size_t correct = 0;
    for (std::size_t s = 0; s < data.size(); ++s)
        correct += argmax_class(forward(net, data.sample(s))) == data.labels[s];
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace {

// Independent random streams of the toy task generator.
constexpr std::uint64_t kSaltCentroid = 0x63656e74726f6964ULL;  // "centroid"
constexpr std::uint64_t kSaltTrain = 0x747261696e736574ULL;     // "trainset"
constexpr std::uint64_t kSaltEval = 0x6576616c20736574ULL;      // "eval set"

constexpr std::uint32_t kTaskDim = 16;
constexpr std::uint32_t kTaskClasses = 10;
constexpr std::uint32_t kTrainSamples = 2000;
constexpr std::uint32_t kEvalSamples = 1000;
constexpr double kCentroidLength = 90.0;   ///< class means sit on this sphere
constexpr double kSampleSigma = 14.0;      ///< per-coordinate cluster spread
constexpr double kFitRowLength = 110.0;    ///< quantized length of fitted rows

std::int8_t quantize(double v) {
    const double r = std::nearbyint(v);
    return static_cast<std::int8_t>(std::clamp(r, -128.0, 127.0));
}

Dataset draw_samples(std::uint64_t seed, std::uint64_t salt, std::uint32_t count,
                     const std::vector<double>& centroids) {
    Dataset data;
    data.dim = kTaskDim;
    data.features.resize(static_cast<std::size_t>(count) * kTaskDim);
    data.labels.resize(count);
    for (std::uint32_t s = 0; s < count; ++s) {
        const std::uint32_t label = s % kTaskClasses;
        data.labels[s] = static_cast<std::uint8_t>(label);
        for (std::uint32_t i = 0; i < kTaskDim; ++i) {
            const double noise =
                kSampleSigma * rng::gaussian(rng::mix(seed ^ salt, s, i));
            data.features[static_cast<std::size_t>(s) * kTaskDim + i] =
                quantize(centroids[label * kTaskDim + i] + noise);
        }
    }
    return data;
}

}  // namespace

ToyTask build_toy_network(std::uint64_t seed) {
    // Class means: random directions scaled onto a common sphere, so the
    // biasless nearest-centroid rule below is a fair classifier.
    std::vector<double> centroids(kTaskClasses * kTaskDim);
    for (std::uint32_t k = 0; k < kTaskClasses; ++k) {
        double norm2 = 0;
        for (std::uint32_t i = 0; i < kTaskDim; ++i) {
            const double g = rng::gaussian(rng::mix(seed ^ kSaltCentroid, k, i));
            centroids[k * kTaskDim + i] = g;
            norm2 += g * g;
        }
        const double scale = kCentroidLength / std::sqrt(norm2);
        for (std::uint32_t i = 0; i < kTaskDim; ++i) centroids[k * kTaskDim + i] *= scale;
    }

    const Dataset train = draw_samples(seed, kSaltTrain, kTrainSamples, centroids);
    const Dataset eval = draw_samples(seed, kSaltEval, kEvalSamples, centroids);

    // Fit: layer one holds the quantized per-class training means (equal
    // length, so dot products rank by proximity), layer two scales the
    // class channels straight through.
    QuantizedNetwork net;
    QuantizedLayer hidden;
    hidden.out_dim = kTaskClasses;
    hidden.in_dim = kTaskDim;
    hidden.scale = 0x1p-8;
    hidden.activation = Activation::Relu;
    hidden.weights.resize(static_cast<std::size_t>(kTaskClasses) * kTaskDim);
    for (std::uint32_t k = 0; k < kTaskClasses; ++k) {
        std::vector<double> mean(kTaskDim, 0.0);
        std::uint32_t members = 0;
        for (std::uint32_t s = 0; s < kTrainSamples; ++s) {
            if (train.labels[s] != k) continue;
            ++members;
            for (std::uint32_t i = 0; i < kTaskDim; ++i) mean[i] += train.sample(s)[i];
        }
        double norm2 = 0;
        for (std::uint32_t i = 0; i < kTaskDim; ++i) {
            mean[i] /= members;
            norm2 += mean[i] * mean[i];
        }
        const double scale = kFitRowLength / std::sqrt(norm2);
        for (std::uint32_t i = 0; i < kTaskDim; ++i)
            hidden.weights[k * kTaskDim + i] = quantize(mean[i] * scale);
    }
    net.layers.push_back(std::move(hidden));

    QuantizedLayer head;
    head.out_dim = kTaskClasses;
    head.in_dim = kTaskClasses;
    head.scale = 0x1p-9;
    head.activation = Activation::None;
    head.weights.assign(static_cast<std::size_t>(kTaskClasses) * kTaskClasses, 0);
    for (std::uint32_t k = 0; k < kTaskClasses; ++k)
        head.weights[k * kTaskClasses + k] = 64;
    net.layers.push_back(std::move(head));
    net.validate();

    const double accuracy = evaluate(net, eval);
    if (accuracy < 0.90)
        fail(ErrorKind::Calibration,
             "toy-network fit reached only " + std::to_string(accuracy) +
                 " on its evaluation set; pick another seed");
    return {std::move(net), std::move(eval)};
}

namespace {

void check_bit_ref(const QuantizedNetwork& net, const BitRef& ref) {
    if (ref.layer >= net.layers.size())
        fail(ErrorKind::Addressing, "bit addresses layer " + std::to_string(ref.layer) +
                                        " of a " + std::to_string(net.layers.size()) +
                                        "-layer network");
    const QuantizedLayer& layer = net.layers[ref.layer];
    if (ref.row >= layer.out_dim || ref.col >= layer.in_dim || ref.bit > 7)
        fail(ErrorKind::Addressing,
             "bit (" + std::to_string(ref.layer) + ", " + std::to_string(ref.row) + ", " +
                 std::to_string(ref.col) + ", " + std::to_string(ref.bit) +
                 ") lies outside the layer");
}

}  // namespace

void apply_flip(QuantizedNetwork& net, const BitRef& ref) {
    check_bit_ref(net, ref);
    QuantizedLayer& layer = net.layers[ref.layer];
    std::int8_t& w = layer.weights[static_cast<std::size_t>(ref.row) * layer.in_dim + ref.col];
    w = static_cast<std::int8_t>(static_cast<std::uint8_t>(w) ^ (1u << ref.bit));
}

CellCoord CellLayout::cell_of(const BitRef& ref) const {
    if (ref.layer >= spans.size())
        fail(ErrorKind::Addressing, "layout has no layer " + std::to_string(ref.layer));
    const LayerSpan& span = spans[ref.layer];
    if (ref.row >= span.out_dim || ref.col >= span.in_dim || ref.bit > 7)
        fail(ErrorKind::Addressing, "bit reference outside its layer span");
    const std::uint64_t weight =
        static_cast<std::uint64_t>(ref.row) * span.in_dim + ref.col;
    const std::uint64_t global = span.base + weight * 8 + (7 - ref.bit);
    return {static_cast<std::uint32_t>(global / cols),
            static_cast<std::uint32_t>(global % cols)};
}

BitRef CellLayout::bit_at(std::uint64_t global_index) const {
    if (global_index >= total_bits)
        fail(ErrorKind::Addressing, "bit index " + std::to_string(global_index) +
                                        " beyond the layout's " +
                                        std::to_string(total_bits) + " bits");
    std::size_t layer = spans.size() - 1;
    while (spans[layer].base > global_index) --layer;
    const LayerSpan& span = spans[layer];
    const std::uint64_t offset = global_index - span.base;
    const std::uint64_t weight = offset / 8;
    BitRef ref;
    ref.layer = static_cast<std::uint32_t>(layer);
    ref.row = static_cast<std::uint32_t>(weight / span.in_dim);
    ref.col = static_cast<std::uint32_t>(weight % span.in_dim);
    ref.bit = static_cast<std::uint8_t>(7 - offset % 8);
    return ref;
}

CellLayout make_cell_layout(const QuantizedNetwork& net, std::uint32_t rows,
                            std::uint32_t cols) {
    net.validate();
    if (rows == 0 || cols == 0)
        fail(ErrorKind::Config, "layout footprint must be non-empty");
    CellLayout layout;
    layout.rows = rows;
    layout.cols = cols;
    std::uint64_t base = 0;
    for (const QuantizedLayer& layer : net.layers) {
        layout.spans.push_back({layer.out_dim, layer.in_dim, base});
        base += 8ull * layer.weights.size();
    }
    layout.total_bits = base;
    if (layout.total_bits > static_cast<std::uint64_t>(rows) * cols)
        fail(ErrorKind::Addressing, "network needs " + std::to_string(layout.total_bits) +
                                        " cells, device offers " +
                                        std::to_string(static_cast<std::uint64_t>(rows) * cols));
    return layout;
}

std::uint8_t min_flippable_level(Scheme scheme, AttackModel model) {
    switch (scheme) {
        case Scheme::FourLevel:
            return model == AttackModel::SG ? 4 : model == AttackModel::VC ? 3 : 2;
        case Scheme::ThreeLevel:
            // Level 2 does not exist; the double-sided attack gains nothing.
            return model == AttackModel::SG ? 4 : 3;
        case Scheme::TwoLevel:
            // Nesting failed, so only the single-sided evidence is trusted.
            return 4;
    }
    fail(ErrorKind::Internal, "unreachable scheme");
}

std::vector<BitRef> allowed_bits(const SecurityLevelMap& map, const CellLayout& layout,
                                 AttackModel model) {
    if (map.rows != layout.rows || map.cols != layout.cols)
        fail(ErrorKind::Shape, "level map and layout footprints differ");
    const std::uint8_t floor = min_flippable_level(map.scheme, model);
    std::vector<BitRef> bits;
    // Consecutive placement makes global bit index == level-map cell index.
    for (std::uint64_t g = 0; g < layout.total_bits; ++g)
        if (map.levels[g] >= floor) bits.push_back(layout.bit_at(g));
    std::sort(bits.begin(), bits.end());
    return bits;
}

namespace {

/// Per-sample pre-activation cache for every layer, refreshed after each
/// applied flip. Scoring a candidate then touches only the affected row
/// plus the layers behind it.
struct SampleCache {
    std::vector<std::vector<std::int64_t>> pres;  ///< per layer, out_dim wide
};

SampleCache make_cache(const QuantizedNetwork& net, const std::int8_t* x) {
    SampleCache cache;
    cache.pres.reserve(net.layers.size());
    std::vector<std::int64_t> act(x, x + net.input_dim());
    for (const QuantizedLayer& layer : net.layers) {
        std::vector<std::int64_t> pre(layer.out_dim, 0);
        for (std::uint32_t j = 0; j < layer.out_dim; ++j) {
            const std::int8_t* row = layer.weights.data() +
                                     static_cast<std::size_t>(j) * layer.in_dim;
            std::int64_t sum = 0;
            for (std::uint32_t i = 0; i < layer.in_dim; ++i)
                sum += static_cast<std::int64_t>(row[i]) * act[i];
            pre[j] = sum;
        }
        act.resize(layer.out_dim);
        for (std::uint32_t j = 0; j < layer.out_dim; ++j)
            act[j] = activate(layer.activation, pre[j]);
        cache.pres.push_back(std::move(pre));
    }
    return cache;
}

double cross_entropy(const std::vector<std::int64_t>& logits, double scale,
                     std::uint8_t label) {
    double zmax = -1e300;
    for (std::int64_t v : logits) zmax = std::max(zmax, static_cast<double>(v) * scale);
    double sum = 0;
    for (std::int64_t v : logits) sum += std::exp(static_cast<double>(v) * scale - zmax);
    return std::log(sum) - (static_cast<double>(logits[label]) * scale - zmax);
}

/// Batch loss if `ref` were flipped, from the caches of the current weights.
double loss_with_flip(const QuantizedNetwork& net, const Dataset& data,
                      const std::vector<SampleCache>& caches, double logit_scale,
                      const BitRef& ref) {
    const QuantizedLayer& layer = net.layers[ref.layer];
    const std::size_t last = net.layers.size() - 1;
    const std::int8_t old_w =
        layer.weights[static_cast<std::size_t>(ref.row) * layer.in_dim + ref.col];
    const std::int64_t delta =
        static_cast<std::int64_t>(
            static_cast<std::int8_t>(static_cast<std::uint8_t>(old_w) ^ (1u << ref.bit))) -
        old_w;

    double total = 0;
    std::vector<std::int64_t> logits(net.output_dim());
    for (std::size_t s = 0; s < caches.size(); ++s) {
        const SampleCache& cache = caches[s];
        const std::int64_t input_c =
            ref.layer == 0
                ? data.sample(s)[ref.col]
                : activate(net.layers[ref.layer - 1].activation,
                           cache.pres[ref.layer - 1][ref.col]);
        const std::int64_t new_pre = cache.pres[ref.layer][ref.row] + delta * input_c;

        if (ref.layer == last) {
            const QuantizedLayer& out = net.layers[last];
            for (std::uint32_t j = 0; j < out.out_dim; ++j)
                logits[j] = activate(out.activation, cache.pres[last][j]);
            logits[ref.row] = activate(out.activation, new_pre);
        } else {
            const std::int64_t d_post =
                activate(layer.activation, new_pre) -
                activate(layer.activation, cache.pres[ref.layer][ref.row]);
            if (d_post == 0) {
                for (std::uint32_t j = 0; j < net.layers[last].out_dim; ++j)
                    logits[j] = activate(net.layers[last].activation, cache.pres[last][j]);
            } else if (ref.layer + 1 == last) {
                const QuantizedLayer& out = net.layers[last];
                for (std::uint32_t j = 0; j < out.out_dim; ++j)
                    logits[j] = activate(
                        out.activation,
                        cache.pres[last][j] +
                            static_cast<std::int64_t>(
                                out.weights[static_cast<std::size_t>(j) * out.in_dim +
                                            ref.row]) *
                                d_post);
            } else {
                // Deep fallback: rebuild the activation vector at ref.layer
                // and run the remaining layers in full.
                std::vector<std::int64_t> act(layer.out_dim);
                for (std::uint32_t j = 0; j < layer.out_dim; ++j)
                    act[j] = activate(layer.activation, cache.pres[ref.layer][j]);
                act[ref.row] += d_post;
                std::vector<std::int64_t> next;
                for (std::size_t l = ref.layer + 1; l <= last; ++l) {
                    const QuantizedLayer& deep = net.layers[l];
                    next.assign(deep.out_dim, 0);
                    for (std::uint32_t j = 0; j < deep.out_dim; ++j) {
                        const std::int8_t* row = deep.weights.data() +
                                                 static_cast<std::size_t>(j) * deep.in_dim;
                        std::int64_t sum = 0;
                        for (std::uint32_t i = 0; i < deep.in_dim; ++i)
                            sum += static_cast<std::int64_t>(row[i]) * act[i];
                        next[j] = activate(deep.activation, sum);
                    }
                    act.swap(next);
                }
                logits = act;
            }
        }
        total += cross_entropy(logits, logit_scale, data.labels[s]);
    }
    return total / static_cast<double>(caches.size());
}

}  // namespace

AttackReport attack(const QuantizedNetwork& net, const Dataset& data,
                    const std::vector<BitRef>& allowed, const AttackConfig& config) {
    net.validate();
    if (config.batch == 0)
        fail(ErrorKind::Config, "scoring batch must be >= 1");
    if (!(config.target_acc >= 0.0) || config.target_acc > 1.0)
        fail(ErrorKind::Config, "target accuracy must lie in [0, 1]");
    for (const BitRef& ref : allowed) check_bit_ref(net, ref);

    std::vector<BitRef> candidates = allowed;
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    AttackReport report;
    report.trajectory.push_back(evaluate(net, data));
    report.final_accuracy = report.trajectory.back();
    if (candidates.empty()) {
        report.reason = "no flippable bits";
        return report;
    }
    if (report.final_accuracy <= config.target_acc) {
        report.reason = "target already met";
        return report;
    }

    double logit_scale = 1.0;
    for (const QuantizedLayer& layer : net.layers) logit_scale *= layer.scale;
    const std::size_t batch = std::min<std::size_t>(config.batch, data.size());

    QuantizedNetwork working = net;
    std::vector<SampleCache> caches(batch);
    const auto refresh = [&] {
        for (std::size_t s = 0; s < batch; ++s)
            caches[s] = make_cache(working, data.sample(s));
    };
    refresh();

    std::vector<double> losses(candidates.size());
    for (std::uint64_t iter = 0; iter < config.max_iters; ++iter) {
        parallel_for(
            candidates.size(),
            [&](std::size_t i) {
                losses[i] = loss_with_flip(working, data, caches, logit_scale, candidates[i]);
            },
            config.workers);
        std::size_t best = 0;
        for (std::size_t i = 1; i < losses.size(); ++i)
            if (losses[i] > losses[best]) best = i;  // ties keep the lowest BitRef

        apply_flip(working, candidates[best]);
        report.flipped.push_back(candidates[best]);
        report.trajectory.push_back(evaluate(working, data));
        report.final_accuracy = report.trajectory.back();
        if (report.final_accuracy <= config.target_acc) {
            report.reason = "reached target accuracy";
            break;
        }
        refresh();
    }
    report.iterations = report.flipped.size();
    if (report.reason.empty()) report.reason = "iteration limit reached";
    return report;
}

namespace {

constexpr char kNetworkMagic[4] = {'R', 'H', 'Q', 'N'};
constexpr std::uint8_t kNetworkVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::ofstream& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t take_bytes(const std::string& bytes, std::size_t at, int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
    return v;
}

}  // namespace

void save_network(const QuantizedNetwork& net, const std::string& path) {
    net.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Input, "cannot write " + path);
    out.write(kNetworkMagic, 4);
    out.put(static_cast<char>(kNetworkVersion));
    put_u32(out, static_cast<std::uint32_t>(net.layers.size()));
    for (const QuantizedLayer& layer : net.layers) {
        put_u32(out, layer.out_dim);
        put_u32(out, layer.in_dim);
        put_u64(out, std::bit_cast<std::uint64_t>(layer.scale));
        out.put(static_cast<char>(layer.activation));
    }
    for (const QuantizedLayer& layer : net.layers)
        out.write(reinterpret_cast<const char*>(layer.weights.data()),
                  static_cast<std::streamsize>(layer.weights.size()));
    if (!out)
        fail(ErrorKind::Input, "write failed: " + path);
}

QuantizedNetwork load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::Input, "cannot read " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < 9 || bytes.compare(0, 4, kNetworkMagic, 4) != 0)
        fail(ErrorKind::Parse, path + ": not a network image");
    if (static_cast<std::uint8_t>(bytes[4]) != kNetworkVersion)
        fail(ErrorKind::Parse, path + ": unsupported network version " +
                                   std::to_string(static_cast<unsigned char>(bytes[4])));
    const std::uint64_t layer_count = take_bytes(bytes, 5, 4);
    const std::size_t header_size = 9 + layer_count * 17;
    if (layer_count == 0 || bytes.size() < header_size)
        fail(ErrorKind::Parse, path + ": truncated network header");

    QuantizedNetwork net;
    std::size_t at = 9;
    std::size_t payload = 0;
    for (std::uint64_t l = 0; l < layer_count; ++l) {
        QuantizedLayer layer;
        layer.out_dim = static_cast<std::uint32_t>(take_bytes(bytes, at, 4));
        layer.in_dim = static_cast<std::uint32_t>(take_bytes(bytes, at + 4, 4));
        layer.scale = std::bit_cast<double>(take_bytes(bytes, at + 8, 8));
        const std::uint8_t activation = static_cast<std::uint8_t>(bytes[at + 16]);
        if (activation > 1)
            fail(ErrorKind::Parse, path + ": unknown activation code " +
                                       std::to_string(activation));
        layer.activation = static_cast<Activation>(activation);
        payload += static_cast<std::size_t>(layer.out_dim) * layer.in_dim;
        net.layers.push_back(std::move(layer));
        at += 17;
    }
    if (bytes.size() != header_size + payload)
        fail(ErrorKind::Parse, path + ": payload size does not match the header");
    for (QuantizedLayer& layer : net.layers) {
        const std::size_t count = static_cast<std::size_t>(layer.out_dim) * layer.in_dim;
        layer.weights.resize(count);
        std::copy_n(reinterpret_cast<const std::int8_t*>(bytes.data()) + at, count,
                    layer.weights.begin());
        at += count;
    }
    net.validate();
    return net;
}

}  // namespace rhlab
