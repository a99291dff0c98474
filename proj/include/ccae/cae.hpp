#ifndef CCAE_CAE_HPP
#define CCAE_CAE_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ccae/latent.hpp"
#include "ccae/layers.hpp"
#include "ccae/market_data.hpp"
#include "ccae/nadam.hpp"

namespace ccae {

/// One encoder block: a same-padded convolution of `filters` output channels
/// followed by batch norm, ReLU and pooling. The decoder mirrors the list.
struct Block {
    std::size_t filters = 0;
    std::size_t kernel = 3;
};

struct ArchitectureSpec {
    std::size_t input_length = 192;
    std::size_t input_channels = 1;
    std::vector<Block> blocks;
    std::size_t feature_dim = 10;
    std::size_t pool_factor = 2;
    std::size_t min_filters = 1;
    std::size_t max_filters = 4096;

    /// Throws ConfigError when the geometry is inconsistent (feature_dim < 1,
    /// input_length not divisible by pool_factor^blocks, filters out of the
    /// declared bounds).
    void validate() const;

    /// Time-axis length at the bottleneck: input_length / pool^blocks.
    std::size_t bottleneck_length() const;

    /// The production geometry: 6 blocks of 64,128,256,512,512,512 filters
    /// (kernel 3), pool 2, 10 latent units, 192-day input.
    static ArchitectureSpec full_scale(std::size_t input_channels);
};

struct TrainConfig {
    std::size_t epochs = 500;
    std::size_t batch_size = 16;
    std::uint64_t seed = 1;
    NadamConfig optimizer;
};

struct TrainReport {
    std::vector<double> loss_curve; // mean reconstruction MSE per epoch
    double final_loss = 0;
    double wall_time_seconds = 0;
};

/// Convolutional autoencoder: encoder blocks, a dense feature layer, and a
/// mirrored decoder whose last convolution is linear so normalized values of
/// either sign are representable.
class CAEModel {
public:
    CAEModel(const ArchitectureSpec& spec, std::uint64_t seed);

    /// h = E(x) for a [batch, input_length, input_channels] tensor,
    /// batch norm in inference mode.
    Tensor encode(const Tensor& x);
    /// Latent rows aligned with the tensor's symbol order.
    LatentMatrix encode(const FeatureTensor& features);
    /// x~ = D(h) for [batch, feature_dim].
    Tensor decode(const Tensor& h);
    Tensor reconstruct(const Tensor& x);

    /// Minimizes mean squared reconstruction error over `data`
    /// ([samples, input_length, input_channels]) with Nadam; shuffling and
    /// initialization depend only on seeds. Throws DivergenceError with the
    /// epoch/batch position if the loss turns non-finite.
    TrainReport train(const Tensor& data, const TrainConfig& config);

    /// Trainable parameter element count (running stats excluded).
    std::size_t param_count() const;
    /// Architecture depth under the conv/pool/upsample + feature-layer
    /// counting: 4 * blocks + 1.
    std::size_t layer_count() const;

    std::vector<ParamRef> parameters();
    std::vector<StateRef> state_tensors();

    const ArchitectureSpec& spec() const { return spec_; }
    Sequential& encoder() { return encoder_; }
    Sequential& decoder() { return decoder_; }

    /// Checkpoint directory: architecture.json + params.json + params.bin.
    void save(const std::filesystem::path& dir) const;
    static CAEModel load(const std::filesystem::path& dir);

private:
    void build(std::uint64_t seed);

    ArchitectureSpec spec_;
    Sequential encoder_, decoder_;
};

} // namespace ccae

#endif
