#include "ccae/serialize.hpp"

#include <cstring>
#include <fstream>
#include <map>

#include <json.hpp>

#include "ccae/errors.hpp"
#include "ccae/io_util.hpp"

namespace ccae {

namespace {

constexpr char kMagic[8] = {'C', 'C', 'A', 'E', 'B', 'L', 'B', '1'};
constexpr std::uint32_t kVersion = 1;

void append_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t read_u32_le(const std::string& s, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
    return v;
}

void append_doubles_le(std::string& out, const std::vector<double>& values) {
    for (double d : values) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, sizeof(bits));
        for (int i = 0; i < 8; ++i)
            out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
}

void read_doubles_le(const std::string& s, std::size_t off, std::vector<double>& out) {
    for (double& d : out) {
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[off + i]))
                    << (8 * i);
        off += 8;
        std::memcpy(&d, &bits, sizeof(d));
    }
}

struct Entry {
    std::string name;
    const Tensor* tensor;
};

} // namespace

void write_parameter_file(const std::filesystem::path& manifest_path,
                          const std::filesystem::path& blob_path,
                          const std::vector<ParamRef>& params,
                          const std::vector<StateRef>& state,
                          const Nadam* optimizer) {
    std::vector<Entry> entries;
    for (const auto& p : params) entries.push_back({p.name, p.value});
    for (const auto& s : state) entries.push_back({s.name, s.value});
    if (optimizer) {
        const auto& m = optimizer->first_moments();
        const auto& v = optimizer->second_moments();
        if (m.size() != params.size())
            throw ShapeError("optimizer moments do not match parameter list");
        for (std::size_t i = 0; i < params.size(); ++i) {
            entries.push_back({"opt.m." + params[i].name, &m[i]});
            entries.push_back({"opt.v." + params[i].name, &v[i]});
        }
    }

    std::string blob(kMagic, sizeof(kMagic));
    append_u32_le(blob, kVersion);
    append_u32_le(blob, static_cast<std::uint32_t>(entries.size()));

    nlohmann::json tensors = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json t;
        t["name"] = e.name;
        t["shape"] = e.tensor->shape;
        t["offset"] = blob.size();
        t["count"] = e.tensor->size();
        tensors.push_back(t);
        append_doubles_le(blob, e.tensor->data);
    }

    nlohmann::json manifest;
    manifest["format"] = "ccae-params";
    manifest["version"] = kVersion;
    manifest["blob"] = blob_path.filename().string();
    manifest["tensors"] = tensors;
    if (optimizer) {
        manifest["optimizer"] = {{"kind", "nadam"},
                                 {"step", optimizer->step_count()},
                                 {"learning_rate", optimizer->config().learning_rate},
                                 {"beta1", optimizer->config().beta1},
                                 {"beta2", optimizer->config().beta2},
                                 {"epsilon", optimizer->config().epsilon}};
    }

    write_file_atomic(manifest_path, manifest.dump(2) + "\n");
    write_file_atomic(blob_path, blob);
}

void read_parameter_file(const std::filesystem::path& manifest_path,
                         const std::filesystem::path& blob_path,
                         const std::vector<ParamRef>& params,
                         const std::vector<StateRef>& state,
                         Nadam* optimizer) {
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(manifest_path.string() + ": " + e.what());
    }
    if (manifest.value("format", "") != "ccae-params")
        throw ParseError(manifest_path.string() + ": not a parameter manifest");
    if (manifest.value("version", 0u) != kVersion)
        throw ParseError(manifest_path.string() + ": unsupported version");

    const std::string blob = read_file(blob_path);
    if (blob.size() < 16 || std::memcmp(blob.data(), kMagic, sizeof(kMagic)) != 0)
        throw ParseError(blob_path.string() + ": bad blob header");
    if (read_u32_le(blob, 8) != kVersion)
        throw ParseError(blob_path.string() + ": unsupported blob version");

    std::map<std::string, Tensor*> targets;
    for (const auto& p : params) targets[p.name] = p.value;
    for (const auto& s : state) targets[s.name] = s.value;
    std::vector<Tensor>* opt_m = nullptr;
    std::vector<Tensor>* opt_v = nullptr;
    if (optimizer) {
        opt_m = &optimizer->first_moments();
        opt_v = &optimizer->second_moments();
        for (std::size_t i = 0; i < params.size(); ++i) {
            targets["opt.m." + params[i].name] = &(*opt_m)[i];
            targets["opt.v." + params[i].name] = &(*opt_v)[i];
        }
    }

    for (const auto& t : manifest.at("tensors")) {
        const std::string name = t.at("name");
        const auto it = targets.find(name);
        if (it == targets.end()) {
            if (name.rfind("opt.", 0) == 0 && !optimizer) continue; // moments not wanted
            throw DataError(manifest_path.string() + ": unknown tensor '" + name + "'");
        }
        const std::vector<std::size_t> shape = t.at("shape");
        if (shape != it->second->shape)
            throw ShapeError("tensor '" + name + "' shape mismatch in " +
                             manifest_path.string());
        const std::size_t offset = t.at("offset");
        const std::size_t count = t.at("count");
        if (count != it->second->size() || offset + 8 * count > blob.size())
            throw ParseError(blob_path.string() + ": tensor '" + name +
                             "' outside blob bounds");
        read_doubles_le(blob, offset, it->second->data);
    }

    if (optimizer && manifest.contains("optimizer"))
        optimizer->set_step_count(manifest["optimizer"].value("step", 0ull));
}

} // namespace ccae
