// Real HTTP transport for repository discovery, isolated in one TU so the
// rest of the library never includes httplib.

#include <cstdlib>
#include <string>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "vcf/ingest.hpp"

namespace vcf::ingest {

HttpResponse github_http_get(const std::string& host,
                             const std::string& path) {
    httplib::SSLClient client(host);
    client.set_follow_location(true);
    httplib::Headers headers{{"Accept", "application/vnd.github+json"},
                             {"User-Agent", "vcf-corpus-tool"}};
    if (const char* token = std::getenv("VCF_API_TOKEN"); token && *token)
        headers.emplace("Authorization", std::string("Bearer ") + token);
    auto res = client.Get(path, headers);
    if (!res) return HttpResponse{0, ""};
    return HttpResponse{res->status, res->body};
}

}  // namespace vcf::ingest
