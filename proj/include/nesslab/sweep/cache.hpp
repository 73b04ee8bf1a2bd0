// cache.hpp — On-disk cache of solved points, one JSON file per key

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "nesslab/sweep/record.hpp"

namespace nesslab::sweep {

std::uint64_t fnv1a64(std::string_view bytes);

// 16 hex digits over the canonical text of the point. alpha enters as its
// shortest round-trip decimal string.
std::string cache_key(int L, double J, double alpha, double gamma, double Gamma,
                      double tolerance, std::string_view version);

class ResultCache {
public:
    ResultCache() = default; // disabled
    explicit ResultCache(std::filesystem::path dir);

    bool enabled() const { return !dir_.empty(); }
    const std::filesystem::path& dir() const { return dir_; }

    std::optional<ResultRecord> load(const std::string& key) const;
    // Writes to a unique temporary file and renames it into place. An entry
    // that already exists is left untouched.
    void store(const std::string& key, const ResultRecord& r) const;

private:
    std::filesystem::path dir_;
};

} // namespace nesslab::sweep
