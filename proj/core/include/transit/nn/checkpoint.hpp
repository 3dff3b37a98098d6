#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "transit/nn/params.hpp"

namespace transit::nn {

// Checkpoints are a JSON manifest (store/entry names, shapes, step
// counter) next to a raw blob of little-endian 64-bit floats.
void save_checkpoint(const std::string& manifest_path,
                     const std::map<std::string, const ParamStore*>& stores,
                     std::int64_t step,
                     const std::map<std::string, std::string>& meta = {});

// Loads values into already-shaped stores; shapes must match the manifest.
// Returns the stored step counter.
std::int64_t load_checkpoint(const std::string& manifest_path,
                             const std::map<std::string, ParamStore*>& stores);

// Reads a meta field written at save time ("" when missing).
std::string checkpoint_meta(const std::string& manifest_path,
                            const std::string& key);

}  // namespace transit::nn
