#include "ct2bc/hash_commitment.hpp"

#include "ct2bc/rng.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>
#include <string_view>

namespace ct2bc {
namespace {

constexpr std::string_view kDomain = "ct2bc.toss-commit.v1";

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const noexcept { EVP_MD_CTX_free(ctx); }
};

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw Error("SHA-256 initialisation failed");
        }
    }

    void update(std::span<const std::uint8_t> data) {
        if (EVP_DigestUpdate(ctx_.get(), data.data(), data.size()) != 1) {
            throw Error("SHA-256 update failed");
        }
    }

    Digest finish() {
        Digest out{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), out.data(), &len) != 1 || len != out.size()) {
            throw Error("SHA-256 finalisation failed");
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx_;
};

} // namespace

Digest sha256(std::span<const std::uint8_t> data) {
    Sha256 h;
    h.update(data);
    return h.finish();
}

Salt random_salt(Rng& rng) {
    Salt salt{};
    rng.fill(salt);
    return salt;
}

Digest commit_bits(std::span<const Bit> bits, const Salt& salt) {
    Sha256 h;
    h.update({reinterpret_cast<const std::uint8_t*>(kDomain.data()), kDomain.size()});
    const auto n = static_cast<std::uint32_t>(bits.size());
    const std::uint8_t count[4] = {static_cast<std::uint8_t>(n >> 24), static_cast<std::uint8_t>(n >> 16),
                                   static_cast<std::uint8_t>(n >> 8), static_cast<std::uint8_t>(n)};
    h.update(count);
    h.update(pack_bits(bits));
    h.update(salt);
    return h.finish();
}

bool opening_matches(const Digest& digest, std::span<const Bit> bits, const Salt& salt) {
    const Digest recomputed = commit_bits(bits, salt);
    // Digests are public; no need for a constant-time compare.
    return std::equal(recomputed.begin(), recomputed.end(), digest.begin());
}

} // namespace ct2bc
