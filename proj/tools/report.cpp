#include "report.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <stdexcept>

#ifndef KITWPA_VERSION
#define KITWPA_VERSION "0.0.0"
#endif

namespace kitwpa::cli {

struct InputDigest::Impl {
    EVP_MD_CTX* ctx = nullptr;
};

InputDigest::InputDigest() : impl_(new Impl) {
    impl_->ctx = EVP_MD_CTX_new();
    if (!impl_->ctx || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 init failed");
    }
}

InputDigest::~InputDigest() {
    EVP_MD_CTX_free(impl_->ctx);
    delete impl_;
}

void InputDigest::add(const std::string& label, const std::string& bytes) {
    const std::string head = label + '\0' + std::to_string(bytes.size()) + '\0';
    EVP_DigestUpdate(impl_->ctx, head.data(), head.size());
    EVP_DigestUpdate(impl_->ctx, bytes.data(), bytes.size());
}

std::string InputDigest::hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int n = 0;
    EVP_MD_CTX* copy = EVP_MD_CTX_new();
    EVP_MD_CTX_copy_ex(copy, impl_->ctx);
    EVP_DigestFinal_ex(copy, md, &n);
    EVP_MD_CTX_free(copy);
    std::string out;
    char buf[3];
    for (unsigned int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        out += buf;
    }
    return out;
}

ojson Report::to_json() const {
    ojson j;
    j["command"] = command;
    j["toolkit_version"] = toolkit_version();
    j["seed"] = seed;
    j["input_digest_sha256"] = input_digest;
    j["results"] = results;
    j["warnings"] = warnings;
    j["outputs"] = outputs;
    return j;
}

const std::vector<std::string>& unit_suffixes() {
    static const std::vector<std::string> s{
        "_K",   "_ohm", "_ohm_per_sq", "_Hz", "_H", "_H_per_sq", "_F", "_A", "_A2", "_A2_per_W", "_H_per_A2",
        "_dBm", "_dB",  "_dBc",        "_s",  "_rad", "_rad_per_supercell", "_Np_per_supercell", "_per_supercell", "_ratio", "_count",
    };
    return s;
}

namespace {

bool has_unit(const std::string& key) {
    for (const auto& s : unit_suffixes()) {
        if (key.size() > s.size() && key.compare(key.size() - s.size(), s.size(), s) == 0) return true;
    }
    return false;
}

void scan(const ojson& j, const std::string& path, const std::string& key, std::vector<std::string>& bad) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) scan(v, path + "." + k, k, bad);
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); ++i) scan(j[i], path + "[" + std::to_string(i) + "]", key, bad);
    } else if (j.is_number() && !has_unit(key)) {
        bad.push_back(path);
    }
}

}  // namespace

std::vector<std::string> keys_without_units(const ojson& j) {
    std::vector<std::string> bad;
    scan(j, "", "", bad);
    return bad;
}

std::string toolkit_version() { return KITWPA_VERSION; }

}  // namespace kitwpa::cli
