#ifndef CCAE_SERIALIZE_HPP
#define CCAE_SERIALIZE_HPP

#include <filesystem>
#include <vector>

#include "ccae/layers.hpp"
#include "ccae/nadam.hpp"

namespace ccae {

/// Parameter-set container format: a JSON manifest (tensor names, shapes,
/// blob offsets, optimizer scalars) next to a binary blob of raw
/// little-endian 64-bit floats behind a versioned 16-byte header.
/// Moment tensors are stored too when an optimizer is supplied, so training
/// can resume exactly.
void write_parameter_file(const std::filesystem::path& manifest_path,
                          const std::filesystem::path& blob_path,
                          const std::vector<ParamRef>& params,
                          const std::vector<StateRef>& state,
                          const Nadam* optimizer = nullptr);

/// Loads tensors by name into the given views; every manifest entry must
/// match an existing tensor of identical shape. Restores optimizer moments
/// and step when `optimizer` is non-null and the file carries them.
void read_parameter_file(const std::filesystem::path& manifest_path,
                         const std::filesystem::path& blob_path,
                         const std::vector<ParamRef>& params,
                         const std::vector<StateRef>& state,
                         Nadam* optimizer = nullptr);

} // namespace ccae

#endif
