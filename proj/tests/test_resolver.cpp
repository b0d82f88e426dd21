#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "chemtext/resolver.hpp"
#include "support/testpaths.hpp"

using namespace chemtext;

namespace {

const char* kTntSmiles = "Cc1c(cc(cc1[N+](=O)[O-])[N+](=O)[O-])[N+](=O)[O-]";

class CountingLookup : public RemoteLookup {
  public:
    std::optional<std::string> fetch_smiles(const std::string& name) override {
        ++calls;
        if (fail_always) throw std::runtime_error("fake transport down");
        auto it = table.find(name);
        if (it == table.end()) return std::nullopt;
        return it->second;
    }
    std::map<std::string, std::string> table;
    bool fail_always = false;
    int calls = 0;
};

}  // namespace

TEST_CASE("cache hit resolves without any remote call") {
    testsupport::TempDir tmp("resolver");
    {
        std::ofstream f(tmp / "cache.tsv");
        f << "tnt\t" << kTntSmiles << "\n";
    }
    auto fake = std::make_shared<CountingLookup>();
    NameResolver resolver;
    resolver.load_cache(tmp / "cache.tsv");
    resolver.set_remote(fake);

    auto hit = resolver.resolve("TNT");
    REQUIRE(hit.has_value());
    CHECK(hit->smiles == kTntSmiles);
    CHECK(fake->calls == 0);
}

TEST_CASE("unknown name without remote is a miss") {
    NameResolver resolver;
    CHECK(!resolver.resolve("notachemicalxyz").has_value());
}

TEST_CASE("remote miss is a miss, remote hit is cached persistently") {
    testsupport::TempDir tmp("resolver_remote");
    auto fake = std::make_shared<CountingLookup>();
    fake->table["hexogen"] = "C1N(CN(CN1[N+](=O)[O-])[N+](=O)[O-])[N+](=O)[O-]";

    NameResolver resolver;
    resolver.set_cache_file(tmp / "cache.tsv");
    resolver.set_remote(fake);

    CHECK(!resolver.resolve("notachemicalxyz").has_value());
    CHECK(fake->calls == 1);

    auto hit = resolver.resolve("hexogen");
    REQUIRE(hit.has_value());
    CHECK(fake->calls == 2);

    // second resolve comes from the in-memory cache
    CHECK(resolver.resolve("HEXOGEN").has_value());
    CHECK(fake->calls == 2);

    // and the persisted cache serves a fresh resolver
    NameResolver fresh;
    fresh.load_cache(tmp / "cache.tsv");
    CHECK(fresh.resolve("hexogen").has_value());
}

TEST_CASE("transport failure raises resolver-unavailable, not a miss") {
    auto fake = std::make_shared<CountingLookup>();
    fake->fail_always = true;
    NameResolver resolver;
    resolver.set_remote(fake);
    resolver.set_retry(3, std::chrono::milliseconds(1));
    CHECK_THROWS_AS(resolver.resolve("anything"), ResolverUnavailable);
    CHECK(fake->calls == 3);  // exponential backoff exhausted all attempts
}

TEST_CASE("http backend against a local server") {
    httplib::Server server;
    std::atomic<int> hits{0};
    server.Get(R"(/v1/name/(.+)/smiles)", [&](const httplib::Request& req, httplib::Response& res) {
        ++hits;
        std::string name = req.matches[1];
        if (name == "TNT") {
            res.set_content(kTntSmiles, "text/plain");
        } else {
            res.status = 404;
        }
    });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    {
        NameResolver resolver;
        resolver.set_remote(std::make_shared<HttpChemLookup>(
            "http://127.0.0.1:" + std::to_string(port) + "/v1"));
        auto hit = resolver.resolve("TNT");
        REQUIRE(hit.has_value());
        CHECK(hit->smiles == kTntSmiles);
        CHECK(!resolver.resolve("definitelynot").has_value());
        CHECK(hits == 2);
        // cached now; no further HTTP traffic
        CHECK(resolver.resolve("tnt").has_value());
        CHECK(hits == 2);
    }

    server.stop();
    server_thread.join();
}
