#include "ccae/cae.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "ccae/errors.hpp"
#include "ccae/io_util.hpp"
#include "ccae/serialize.hpp"

namespace ccae {

namespace {

nlohmann::json spec_to_json(const ArchitectureSpec& s) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : s.blocks) blocks.push_back({b.filters, b.kernel});
    return {{"input_length", s.input_length},
            {"input_channels", s.input_channels},
            {"blocks", blocks},
            {"feature_dim", s.feature_dim},
            {"pool_factor", s.pool_factor},
            {"min_filters", s.min_filters},
            {"max_filters", s.max_filters}};
}

ArchitectureSpec spec_from_json(const nlohmann::json& j) {
    ArchitectureSpec s;
    s.input_length = j.at("input_length");
    s.input_channels = j.at("input_channels");
    for (const auto& b : j.at("blocks"))
        s.blocks.push_back({b.at(0).get<std::size_t>(), b.at(1).get<std::size_t>()});
    s.feature_dim = j.at("feature_dim");
    s.pool_factor = j.at("pool_factor");
    s.min_filters = j.value("min_filters", std::size_t{1});
    s.max_filters = j.value("max_filters", std::size_t{4096});
    return s;
}

} // namespace

void ArchitectureSpec::validate() const {
    if (feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
    if (input_length < 1 || input_channels < 1)
        throw ConfigError("input geometry must be positive");
    if (pool_factor < 1) throw ConfigError("pool_factor must be >= 1");
    std::size_t len = input_length;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (len % pool_factor != 0)
            throw ConfigError("input_length " + std::to_string(input_length) +
                              " is not divisible by pool_factor^" +
                              std::to_string(blocks.size()));
        len /= pool_factor;
        if (blocks[i].filters < min_filters || blocks[i].filters > max_filters)
            throw ConfigError("block " + std::to_string(i) + " filters " +
                              std::to_string(blocks[i].filters) +
                              " outside declared bounds");
        if (blocks[i].kernel < 1) throw ConfigError("kernel size must be >= 1");
    }
}

std::size_t ArchitectureSpec::bottleneck_length() const {
    std::size_t len = input_length;
    for (std::size_t i = 0; i < blocks.size(); ++i) len /= pool_factor;
    return len;
}

ArchitectureSpec ArchitectureSpec::full_scale(std::size_t input_channels) {
    ArchitectureSpec s;
    s.input_length = 192;
    s.input_channels = input_channels;
    s.blocks = {{64, 3}, {128, 3}, {256, 3}, {512, 3}, {512, 3}, {512, 3}};
    s.feature_dim = 10;
    s.pool_factor = 2;
    s.min_filters = 64;
    s.max_filters = 512;
    return s;
}

CAEModel::CAEModel(const ArchitectureSpec& spec, std::uint64_t seed) : spec_(spec) {
    spec_.validate();
    build(seed);
}

void CAEModel::build(std::uint64_t seed) {
    const std::size_t n = spec_.blocks.size();
    std::size_t ch = spec_.input_channels;
    std::size_t len = spec_.input_length;
    for (const auto& block : spec_.blocks) {
        encoder_.add<Conv1d>(block.kernel, ch, block.filters, 1, Padding::same);
        encoder_.add<BatchNorm1d>(block.filters);
        encoder_.add<ReLU>();
        encoder_.add<MaxPool1d>(spec_.pool_factor);
        ch = block.filters;
        len /= spec_.pool_factor;
    }
    encoder_.add<Flatten>();
    encoder_.add<Dense>(len * ch, spec_.feature_dim);

    decoder_.add<Dense>(spec_.feature_dim, len * ch);
    decoder_.add<Reshape>(len, ch);
    for (std::size_t i = 0; i < n; ++i) {
        decoder_.add<Upsample1d>(spec_.pool_factor);
        const bool last = i + 1 == n;
        const std::size_t out_ch = last ? spec_.input_channels
                                        : spec_.blocks[n - 2 - i].filters;
        const std::size_t kernel = spec_.blocks[n - 1 - i].kernel;
        decoder_.add<Conv1d>(kernel, ch, out_ch, 1, Padding::same);
        if (!last) {
            decoder_.add<BatchNorm1d>(out_ch);
            decoder_.add<ReLU>();
        }
        ch = out_ch;
    }

    Rng rng(seed);
    encoder_.init_params(rng);
    decoder_.init_params(rng);
}

Tensor CAEModel::encode(const Tensor& x) {
    if (x.rank() != 3 || x.dim(1) != spec_.input_length ||
        x.dim(2) != spec_.input_channels)
        throw ConfigError("encode input " + x.shape_string() + " does not match spec [" +
                          std::to_string(spec_.input_length) + "x" +
                          std::to_string(spec_.input_channels) + "]");
    return encoder_.forward(x, Mode::infer);
}

LatentMatrix CAEModel::encode(const FeatureTensor& features) {
    const Tensor h = encode(features.data);
    LatentMatrix m;
    m.symbols = features.symbols;
    m.dim = spec_.feature_dim;
    m.values = h.data;
    return m;
}

Tensor CAEModel::decode(const Tensor& h) {
    if (h.rank() != 2 || h.dim(1) != spec_.feature_dim)
        throw ConfigError("decode input " + h.shape_string() + " must be [batch, " +
                          std::to_string(spec_.feature_dim) + "]");
    return decoder_.forward(h, Mode::infer);
}

Tensor CAEModel::reconstruct(const Tensor& x) {
    return decode(encode(x));
}

std::size_t CAEModel::param_count() const {
    std::size_t total = 0;
    auto& self = const_cast<CAEModel&>(*this);
    for (const auto& p : self.encoder_.params())
        if (p.trainable) total += p.value->size();
    for (const auto& p : self.decoder_.params())
        if (p.trainable) total += p.value->size();
    return total;
}

std::size_t CAEModel::layer_count() const {
    return 4 * spec_.blocks.size() + 1;
}

std::vector<ParamRef> CAEModel::parameters() {
    std::vector<ParamRef> out;
    for (auto p : encoder_.params()) {
        p.name = "encoder." + p.name;
        out.push_back(p);
    }
    for (auto p : decoder_.params()) {
        p.name = "decoder." + p.name;
        out.push_back(p);
    }
    return out;
}

std::vector<StateRef> CAEModel::state_tensors() {
    std::vector<StateRef> out;
    for (auto s : encoder_.state()) {
        s.name = "encoder." + s.name;
        out.push_back(s);
    }
    for (auto s : decoder_.state()) {
        s.name = "decoder." + s.name;
        out.push_back(s);
    }
    return out;
}

TrainReport CAEModel::train(const Tensor& data, const TrainConfig& config) {
    if (data.rank() != 3 || data.dim(1) != spec_.input_length ||
        data.dim(2) != spec_.input_channels)
        throw ConfigError("training data " + data.shape_string() +
                          " does not match the architecture input");
    const std::size_t samples = data.dim(0);
    if (config.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (config.batch_size < 1 || config.batch_size > samples)
        throw ConfigError("batch_size must lie in [1, sample count]");

    const auto t0 = std::chrono::steady_clock::now();
    auto params = parameters();
    Nadam optimizer(params, config.optimizer);
    Rng shuffle_rng(mix_seed(config.seed, 1));

    const std::size_t sample_elems = spec_.input_length * spec_.input_channels;
    std::vector<std::size_t> order(samples);
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainReport report;
    report.loss_curve.reserve(config.epochs);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double sq_sum = 0;
        std::size_t elem_count = 0;
        for (std::size_t begin = 0; begin < samples; begin += config.batch_size) {
            const std::size_t bs = std::min(config.batch_size, samples - begin);
            Tensor batch = Tensor::zeros({bs, spec_.input_length, spec_.input_channels});
            for (std::size_t i = 0; i < bs; ++i) {
                const std::size_t src = order[begin + i] * sample_elems;
                std::copy(data.data.begin() + src, data.data.begin() + src + sample_elems,
                          batch.data.begin() + i * sample_elems);
            }
            encoder_.zero_grads();
            decoder_.zero_grads();
            const Tensor h = encoder_.forward(batch, Mode::train);
            const Tensor pred = decoder_.forward(h, Mode::train);
            const double loss = mse_loss(pred, batch);
            if (!std::isfinite(loss))
                throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) +
                                      ", batch " + std::to_string(begin / config.batch_size));
            const Tensor grad_h = decoder_.backward(mse_grad(pred, batch));
            encoder_.backward(grad_h);
            optimizer.step(params);
            sq_sum += loss * static_cast<double>(pred.size());
            elem_count += pred.size();
        }
        report.loss_curve.push_back(sq_sum / static_cast<double>(elem_count));
    }
    report.final_loss = report.loss_curve.back();
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

void CAEModel::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    nlohmann::json arch;
    arch["format"] = "ccae-model";
    arch["version"] = 1;
    arch["architecture"] = spec_to_json(spec_);
    write_file_atomic(dir / "architecture.json", arch.dump(2) + "\n");
    auto& self = const_cast<CAEModel&>(*this);
    write_parameter_file(dir / "params.json", dir / "params.bin", self.parameters(),
                         self.state_tensors());
}

CAEModel CAEModel::load(const std::filesystem::path& dir) {
    nlohmann::json arch;
    try {
        arch = nlohmann::json::parse(read_file(dir / "architecture.json"));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError((dir / "architecture.json").string() + ": " + e.what());
    }
    if (arch.value("format", "") != "ccae-model")
        throw ParseError(dir.string() + ": not a model checkpoint");
    CAEModel model(spec_from_json(arch.at("architecture")), 0);
    read_parameter_file(dir / "params.json", dir / "params.bin", model.parameters(),
                        model.state_tensors());
    return model;
}

} // namespace ccae
