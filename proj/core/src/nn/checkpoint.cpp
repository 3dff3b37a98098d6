#include "transit/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace transit::nn {

namespace {

void write_le_doubles(std::ofstream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &v[i], sizeof(bits));
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b)
      bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xFF);
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

void read_le_doubles(std::ifstream& in, double* dst, std::size_t count) {
  std::vector<unsigned char> buf(count * 8);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<long>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size())
    throw std::runtime_error("checkpoint: truncated data blob");
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | buf[i * 8 + b];
    std::memcpy(&dst[i], &bits, sizeof(bits));
  }
}

std::string blob_path_for(const std::string& manifest_path,
                          const std::string& data_name) {
  return (std::filesystem::path(manifest_path).parent_path() / data_name)
      .string();
}

}  // namespace

void save_checkpoint(const std::string& manifest_path,
                     const std::map<std::string, const ParamStore*>& stores,
                     std::int64_t step,
                     const std::map<std::string, std::string>& meta) {
  nlohmann::json manifest;
  manifest["format"] = "transit-ckpt-v1";
  manifest["step"] = step;
  const std::string data_name =
      std::filesystem::path(manifest_path).stem().string() + ".bin";
  manifest["data"] = data_name;
  for (const auto& [k, v] : meta) manifest["meta"][k] = v;

  std::ofstream blob(blob_path_for(manifest_path, data_name),
                     std::ios::binary | std::ios::trunc);
  if (!blob) throw std::runtime_error("checkpoint: cannot write data blob");

  std::int64_t offset = 0;
  nlohmann::json jstores = nlohmann::json::array();
  for (const auto& [store_name, store] : stores) {
    nlohmann::json js;
    js["store"] = store_name;
    js["offset"] = offset;
    js["count"] = store->size();
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : store->entries())
      entries.push_back({{"name", e.name},
                         {"rows", e.rows},
                         {"cols", e.cols},
                         {"offset", e.offset}});
    js["entries"] = entries;
    jstores.push_back(js);
    write_le_doubles(blob, store->value);
    offset += store->size();
  }
  manifest["stores"] = jstores;

  std::ofstream mf(manifest_path, std::ios::trunc);
  if (!mf) throw std::runtime_error("checkpoint: cannot write manifest");
  mf << manifest.dump(2) << "\n";
}

std::int64_t load_checkpoint(const std::string& manifest_path,
                             const std::map<std::string, ParamStore*>& stores) {
  std::ifstream mf(manifest_path);
  if (!mf) throw std::runtime_error("checkpoint: cannot open " + manifest_path);
  nlohmann::json manifest = nlohmann::json::parse(mf);
  if (manifest.value("format", "") != "transit-ckpt-v1")
    throw std::runtime_error("checkpoint: unknown format");

  std::ifstream blob(
      blob_path_for(manifest_path, manifest.at("data").get<std::string>()),
      std::ios::binary);
  if (!blob) throw std::runtime_error("checkpoint: cannot open data blob");

  for (const auto& js : manifest.at("stores")) {
    const std::string store_name = js.at("store").get<std::string>();
    auto it = stores.find(store_name);
    if (it == stores.end()) continue;
    ParamStore* store = it->second;
    if (store->size() != js.at("count").get<std::int64_t>())
      throw std::runtime_error("checkpoint: size mismatch for store '" +
                               store_name + "'");
    for (const auto& je : js.at("entries")) {
      const auto& e = store->entry(je.at("name").get<std::string>());
      if (e.rows != je.at("rows").get<Eigen::Index>() ||
          e.cols != je.at("cols").get<Eigen::Index>() ||
          e.offset != je.at("offset").get<Eigen::Index>())
        throw std::runtime_error("checkpoint: shape mismatch for '" +
                                 je.at("name").get<std::string>() + "'");
    }
    blob.seekg(js.at("offset").get<std::int64_t>() * 8);
    read_le_doubles(blob, store->value.data(),
                    static_cast<std::size_t>(store->size()));
  }
  return manifest.at("step").get<std::int64_t>();
}

std::string checkpoint_meta(const std::string& manifest_path,
                            const std::string& key) {
  std::ifstream mf(manifest_path);
  if (!mf) throw std::runtime_error("checkpoint: cannot open " + manifest_path);
  nlohmann::json manifest = nlohmann::json::parse(mf);
  if (!manifest.contains("meta") || !manifest["meta"].contains(key)) return "";
  return manifest["meta"][key].get<std::string>();
}

}  // namespace transit::nn
