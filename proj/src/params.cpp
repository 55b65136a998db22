#include "ncrhok/params.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "json.hpp"

#include "ncrhok/errors.hpp"

namespace ncrhok::ad {

namespace {

constexpr char kMagic[4] = {'N', 'C', 'R', 'H'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "parameter files assume a little-endian host");

void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_str(std::ostream& os, const std::string& s) {
    put_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& is, const std::string& what) {
    std::uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
        throw InputError("truncated parameter file while reading " + what);
    return v;
}

std::string get_str(std::istream& is, const std::string& what) {
    const auto len = get_u32(is, what + " length");
    std::string s(len, '\0');
    if (len && !is.read(s.data(), static_cast<std::streamsize>(len)))
        throw InputError("truncated parameter file while reading " + what);
    return s;
}

} // namespace

Tensor& ParamStore::add(const std::string& name, Tensor t) {
    if (name.empty()) throw InputError("parameter name must not be empty");
    if (!t.defined()) throw ShapeError("parameter '" + name + "' is undefined");
    if (params_.count(name)) throw InputError("duplicate parameter name '" + name + "'");
    if (t.data()->grad.empty()) t.data()->grad.assign(t.size(), 0.0);
    return params_.emplace(name, std::move(t)).first->second;
}

Tensor& ParamStore::at(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw InputError("unknown parameter '" + name + "'");
    return it->second;
}

const Tensor& ParamStore::at(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw InputError("unknown parameter '" + name + "'");
    return it->second;
}

std::size_t ParamStore::num_scalars() const {
    std::size_t n = 0;
    for (const auto& [name, t] : params_) n += t.size();
    return n;
}

void ParamStore::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot open '" + path + "' for writing");
    os.write(kMagic, sizeof kMagic);
    put_u32(os, kVersion);
    put_u32(os, static_cast<std::uint32_t>(config.size()));
    for (const auto& [k, v] : config) {
        put_str(os, k);
        put_str(os, v);
    }
    put_u32(os, static_cast<std::uint32_t>(params_.size()));
    for (const auto& [name, t] : params_) {
        put_str(os, name);
        put_u32(os, 2);
        put_u32(os, static_cast<std::uint32_t>(t.rows()));
        put_u32(os, static_cast<std::uint32_t>(t.cols()));
        os.write(reinterpret_cast<const char*>(t.value().data()),
                 static_cast<std::streamsize>(t.size() * sizeof(double)));
    }
    if (!os) throw InputError("write failed for '" + path + "'");
}

ParamStore ParamStore::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InputError("cannot open '" + path + "'");
    char magic[4];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw InputError("'" + path + "' is not a parameter file (bad magic)");
    const auto version = get_u32(is, "version");
    if (version != kVersion)
        throw InputError("unsupported parameter file version " + std::to_string(version));

    ParamStore store;
    const auto ncfg = get_u32(is, "config count");
    for (std::uint32_t i = 0; i < ncfg; ++i) {
        auto key = get_str(is, "config key");
        auto value = get_str(is, "config value");
        store.config.emplace(std::move(key), std::move(value));
    }
    const auto nparams = get_u32(is, "param count");
    for (std::uint32_t i = 0; i < nparams; ++i) {
        auto name = get_str(is, "param name");
        const auto rank = get_u32(is, "rank of '" + name + "'");
        if (rank != 2)
            throw InputError("parameter '" + name + "' has unsupported rank " +
                             std::to_string(rank));
        const auto rows = get_u32(is, "rows of '" + name + "'");
        const auto cols = get_u32(is, "cols of '" + name + "'");
        std::vector<double> val(static_cast<std::size_t>(rows) * cols);
        if (!val.empty() &&
            !is.read(reinterpret_cast<char*>(val.data()),
                     static_cast<std::streamsize>(val.size() * sizeof(double))))
            throw InputError("truncated parameter file while reading data of '" + name + "'");
        store.add(name, make_tensor(static_cast<int>(rows), static_cast<int>(cols),
                                    std::move(val)));
    }
    return store;
}

void ParamStore::export_json(const std::string& path) const {
    nlohmann::json j;
    j["format"] = "ncrhok-params";
    j["version"] = kVersion;
    j["config"] = nlohmann::json::object();
    for (const auto& [k, v] : config) j["config"][k] = v;
    j["params"] = nlohmann::json::object();
    for (const auto& [name, t] : params_) {
        nlohmann::json p;
        p["rows"] = t.rows();
        p["cols"] = t.cols();
        p["data"] = t.value();
        j["params"][name] = std::move(p);
    }
    std::ofstream os(path);
    if (!os) throw InputError("cannot open '" + path + "' for writing");
    os << j.dump(2) << '\n';
    if (!os) throw InputError("write failed for '" + path + "'");
}

} // namespace ncrhok::ad
