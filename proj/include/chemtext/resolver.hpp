#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

namespace chemtext {

// Transport failure after all retries; distinct from a definitive miss so
// callers can tell "not a chemical" from "could not ask".
struct ResolverUnavailable : std::runtime_error {
    explicit ResolverUnavailable(const std::string& msg) : std::runtime_error(msg) {}
};

// Remote name->structure lookup. fetch_smiles returns the structure string,
// nullopt for a definitive miss, and throws on transport problems.
class RemoteLookup {
  public:
    virtual ~RemoteLookup() = default;
    virtual std::optional<std::string> fetch_smiles(const std::string& name) = 0;
};

// HTTP GET backend: <base_url>/name/<urlencoded>/smiles, 200 -> body,
// 404 -> miss, anything else -> transport error.
class HttpChemLookup : public RemoteLookup {
  public:
    explicit HttpChemLookup(std::string base_url);
    std::optional<std::string> fetch_smiles(const std::string& name) override;

  private:
    std::string host_;
    int port_;
    std::string path_prefix_;
};

struct Resolution {
    std::string canonical_name;
    std::string smiles;
};

// Local TSV cache with an optional remote behind it. Cache hits never touch
// the remote; remote hits are persisted back to the cache file.
class NameResolver {
  public:
    NameResolver() = default;

    void load_cache(const std::filesystem::path& cache_tsv);
    // Path used to persist newly resolved names (appended). May equal the
    // loaded cache path; empty disables persistence.
    void set_cache_file(const std::filesystem::path& p) { cache_file_ = p; }
    void set_remote(std::shared_ptr<RemoteLookup> remote) { remote_ = std::move(remote); }
    void set_retry(int attempts, std::chrono::milliseconds base_backoff) {
        attempts_ = attempts;
        backoff_ = base_backoff;
    }
    void set_max_in_flight(int n);

    std::size_t cache_size() const { return cache_.size(); }

    // Hit: {name, smiles}. Miss: nullopt. Remote down and name uncached:
    // throws ResolverUnavailable.
    std::optional<Resolution> resolve(const std::string& name);

  private:
    std::map<std::string, std::string> cache_;  // lowercase name -> smiles
    std::filesystem::path cache_file_;
    std::shared_ptr<RemoteLookup> remote_;
    int attempts_ = 3;
    std::chrono::milliseconds backoff_{100};
    int max_in_flight_ = 4;
    int in_flight_ = 0;
    std::mutex mutex_;
    std::condition_variable_any slots_;
};

}  // namespace chemtext
