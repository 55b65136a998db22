#pragma once

#include <map>
#include <string>

#include "ncrhok/tensor.hpp"

namespace ncrhok::ad {

/**
 * Named collection of trainable tensors plus a small string-keyed config
 * block. Iteration order is the name order (std::map), which also fixes the
 * on-disk layout, so identical contents always serialize to identical bytes.
 *
 * Binary layout (little-endian): magic "NCRH", u32 version, u32 config entry
 * count then (u32 key length, key, u32 value length, value) per entry, u32
 * param count then (u32 name length, name, u32 rank = 2, u32 rows, u32 cols,
 * rows*cols f64) per tensor in ascending name order.
 */
class ParamStore {
public:
    /** Registers a tensor under a unique name and gives it a gradient buffer. */
    Tensor& add(const std::string& name, Tensor t);

    Tensor& at(const std::string& name);
    const Tensor& at(const std::string& name) const;
    bool contains(const std::string& name) const { return params_.count(name) > 0; }

    std::size_t size() const { return params_.size(); }
    std::size_t num_scalars() const;

    std::map<std::string, Tensor>& items() { return params_; }
    const std::map<std::string, Tensor>& items() const { return params_; }

    std::map<std::string, std::string> config;

    void save(const std::string& path) const;
    static ParamStore load(const std::string& path);

    void export_json(const std::string& path) const;

private:
    std::map<std::string, Tensor> params_;
};

} // namespace ncrhok::ad
