#include "chemtext/resolver.hpp"

#include <fstream>
#include <thread>

#include <httplib.h>

#include "chemtext/util.hpp"

namespace chemtext {

HttpChemLookup::HttpChemLookup(std::string base_url) {
    // split scheme://host:port/prefix
    std::string url = std::move(base_url);
    auto scheme_end = url.find("://");
    if (scheme_end != std::string::npos) url = url.substr(scheme_end + 3);
    auto slash = url.find('/');
    std::string hostport = slash == std::string::npos ? url : url.substr(0, slash);
    path_prefix_ = slash == std::string::npos ? "" : url.substr(slash);
    if (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    auto colon = hostport.find(':');
    host_ = colon == std::string::npos ? hostport : hostport.substr(0, colon);
    port_ = colon == std::string::npos ? 80 : std::stoi(hostport.substr(colon + 1));
}

std::optional<std::string> HttpChemLookup::fetch_smiles(const std::string& name) {
    httplib::Client client(host_, port_);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(10, 0);
    std::string path = path_prefix_ + "/name/" + httplib::detail::encode_url(name) + "/smiles";
    auto res = client.Get(path);
    if (!res) throw std::runtime_error("resolver transport error: " + httplib::to_string(res.error()));
    if (res->status == 200) {
        std::string body = trim(res->body);
        if (body.empty()) return std::nullopt;
        return body;
    }
    if (res->status == 404) return std::nullopt;
    throw std::runtime_error("resolver HTTP status " + std::to_string(res->status));
}

void NameResolver::load_cache(const std::filesystem::path& cache_tsv) {
    for (auto& line : read_lines(cache_tsv)) {
        if (line.empty() || line[0] == '#') continue;
        auto cols = split(line, '\t');
        if (cols.size() < 2) continue;
        std::string key = to_lower(trim(cols[0]));
        if (!key.empty()) cache_[key] = trim(cols[1]);
    }
}

void NameResolver::set_max_in_flight(int n) {
    if (n < 1) throw std::invalid_argument("max_in_flight must be >= 1");
    max_in_flight_ = n;
}

std::optional<Resolution> NameResolver::resolve(const std::string& name) {
    std::string key = to_lower(trim(name));
    if (key.empty()) return std::nullopt;

    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return Resolution{name, it->second};
    }
    if (!remote_) return std::nullopt;

    {
        std::unique_lock lock(mutex_);
        slots_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
        ++in_flight_;
    }
    std::optional<std::string> fetched;
    std::string last_error;
    bool ok = false;
    for (int attempt = 0; attempt < attempts_; ++attempt) {
        try {
            fetched = remote_->fetch_smiles(name);
            ok = true;
            break;
        } catch (const std::exception& e) {
            last_error = e.what();
            if (attempt + 1 < attempts_) {
                std::this_thread::sleep_for(backoff_ * (1 << attempt));
            }
        }
    }
    {
        std::lock_guard lock(mutex_);
        --in_flight_;
        slots_.notify_one();
    }
    if (!ok) {
        throw ResolverUnavailable("name resolver unavailable after " + std::to_string(attempts_) +
                                  " attempts: " + last_error);
    }
    if (!fetched) return std::nullopt;

    {
        std::lock_guard lock(mutex_);
        cache_[key] = *fetched;
        if (!cache_file_.empty()) {
            if (cache_file_.has_parent_path())
                std::filesystem::create_directories(cache_file_.parent_path());
            std::ofstream out(cache_file_, std::ios::app);
            out << key << '\t' << *fetched << "\n";
        }
    }
    return Resolution{name, *fetched};
}

}  // namespace chemtext
