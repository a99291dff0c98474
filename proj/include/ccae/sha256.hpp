#ifndef CCAE_SHA256_HPP
#define CCAE_SHA256_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

namespace ccae {

/// Incremental SHA-256 (FIPS 180-4). Used for config hashes and output file
/// digests in run manifests; hex output matches sha256sum.
class Sha256 {
public:
    Sha256();
    void update(const void* data, std::size_t len);
    void update(const std::string& s) { update(s.data(), s.size()); }
    /// Finalizes and returns the 32-byte digest; the object must not be
    /// updated afterwards.
    std::array<std::uint8_t, 32> digest();
    std::string hex_digest();

    static std::string of_string(const std::string& s);
    static std::string of_file(const std::filesystem::path& p);

private:
    void process_block(const std::uint8_t* block);

    std::array<std::uint32_t, 8> state_;
    std::array<std::uint8_t, 64> buffer_;
    std::size_t buffer_len_ = 0;
    std::uint64_t total_len_ = 0;
    bool finalized_ = false;
};

} // namespace ccae

#endif
