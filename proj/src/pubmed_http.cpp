#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "docmap/pubmed.hpp"

namespace docmap::pubmed {
namespace {

class EutilsTransport final : public HttpTransport {
public:
    EutilsTransport() : client_("https://eutils.ncbi.nlm.nih.gov") {
        client_.set_connection_timeout(30);
        client_.set_read_timeout(120);
        client_.set_follow_location(true);
    }

    HttpResponse get(const std::string& target) override {
        auto res = client_.Get(target);
        if (!res) throw FetchError("connection failed: " + httplib::to_string(res.error()));
        return {res->status, res->body};
    }

private:
    httplib::Client client_;
};

}  // namespace

std::unique_ptr<HttpTransport> make_eutils_transport() {
    return std::make_unique<EutilsTransport>();
}

}  // namespace docmap::pubmed
