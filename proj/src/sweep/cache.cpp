// cache.cpp — Write-once JSON cache of solved points

#include "nesslab/sweep/cache.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <thread>

#include <unistd.h>

#include "nesslab/sweep/record.hpp"

namespace nesslab::sweep {

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string cache_key(int L, double J, double alpha, double gamma, double Gamma,
                      double tolerance, std::string_view version)
{
    std::string text = "L=" + std::to_string(L);
    text += ";J=" + format_double(J);
    text += ";alpha=" + format_double(alpha);
    text += ";gamma=" + format_double(gamma);
    text += ";Gamma=" + format_double(Gamma);
    text += ";tol=" + format_double(tolerance);
    text += ";version=";
    text += version;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
}

ResultCache::ResultCache(std::filesystem::path dir) : dir_(std::move(dir))
{
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::optional<ResultRecord> ResultCache::load(const std::string& key) const
{
    if (!enabled()) return std::nullopt;
    std::ifstream in(dir_ / (key + ".json"));
    if (!in) return std::nullopt;
    try {
        return record_from_json(nlohmann::json::parse(in));
    } catch (const std::exception&) {
        return std::nullopt; // unreadable entries are recomputed
    }
}

void ResultCache::store(const std::string& key, const ResultRecord& r) const
{
    if (!enabled()) return;
    const auto target = dir_ / (key + ".json");
    std::error_code ec;
    if (std::filesystem::exists(target, ec)) return;

    static std::atomic<unsigned> counter{0};
    std::ostringstream tmpname;
    tmpname << key << ".tmp." << ::getpid() << '.'
            << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.' << counter++;
    const auto tmp = dir_ / tmpname.str();
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cache: cannot write " + tmp.string());
        out << to_json(r).dump() << '\n';
        if (!out) throw std::runtime_error("cache: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
    }
}

} // namespace nesslab::sweep
