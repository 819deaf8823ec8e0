// Copyright 2026 The GOAS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "goas/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "goas/error.hpp"

namespace goas {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'G', 'O', 'A', 'S', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little, "checkpoint blobs assume a little-endian host");

std::string param_key(const std::string& prefix, std::size_t index, const std::string& name) {
  return prefix + "/" + std::to_string(index) + "/" + name;
}

}  // namespace

const Tensor<float>& Checkpoint::tensor(const std::string& name) const {
  const auto it = tensors.find(name);
  if (it == tensors.end()) throw SchemaError("checkpoint has no tensor '" + name + "'");
  return it->second;
}

void save_checkpoint(const Checkpoint& checkpoint, const fs::path& path) {
  json header = checkpoint.header;
  json index = json::array();
  for (const auto& [name, t] : checkpoint.tensors) index.push_back({{"name", name}, {"shape", t.shape()}});
  header["tensors"] = index;
  const std::string text = header.dump();

  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint " + tmp.string());
    const std::uint32_t version = Checkpoint::kVersion;
    const std::uint64_t length = text.size();
    out.write(kMagic, sizeof(kMagic));
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&length), sizeof(length));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [name, t] : checkpoint.tensors) {
      out.write(reinterpret_cast<const char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(float)));
    }
    if (!out) throw IoError("failed writing checkpoint " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place at " + path.string() + ": " + ec.message());
}

Checkpoint load_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  char magic[8];
  std::uint32_t version = 0;
  std::uint64_t length = 0;
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&length), sizeof(length));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw SchemaError(path.string() + " is not a checkpoint file");
  }
  if (version != Checkpoint::kVersion) {
    throw SchemaError("unsupported checkpoint version " + std::to_string(version));
  }
  if (length > (1ull << 30)) throw SchemaError("checkpoint header is implausibly large");
  std::string text(length, '\0');
  in.read(text.data(), static_cast<std::streamsize>(length));
  if (!in) throw SchemaError("truncated checkpoint header in " + path.string());

  Checkpoint checkpoint;
  try {
    checkpoint.header = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("corrupt checkpoint header: ") + e.what());
  }
  const json index = checkpoint.header.value("tensors", json::array());
  checkpoint.header.erase("tensors");
  for (const auto& entry : index) {
    const auto name = entry.at("name").get<std::string>();
    Tensor<float> t(entry.at("shape").get<Shape>());
    in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(float)));
    if (!in) throw SchemaError("truncated tensor '" + name + "' in " + path.string());
    checkpoint.tensors.emplace(name, std::move(t));
  }
  return checkpoint;
}

void export_parameters(Checkpoint& checkpoint, const std::string& prefix,
                       const std::vector<nn::Parameter<float>*>& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    checkpoint.tensors[param_key(prefix, i, params[i]->name)] = params[i]->value;
  }
  checkpoint.header["counts"][prefix] = params.size();
}

bool has_parameters(const Checkpoint& checkpoint, const std::string& prefix) {
  return checkpoint.header.contains("counts") && checkpoint.header["counts"].contains(prefix);
}

void import_parameters(const Checkpoint& checkpoint, const std::string& prefix,
                       const std::vector<nn::Parameter<float>*>& params) {
  if (!has_parameters(checkpoint, prefix)) throw SchemaError("checkpoint has no '" + prefix + "' parameters");
  const auto count = checkpoint.header["counts"][prefix].get<std::size_t>();
  if (count != params.size()) {
    throw SchemaError("checkpoint '" + prefix + "' holds " + std::to_string(count) + " parameters, model expects " +
                      std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor<float>& t = checkpoint.tensor(param_key(prefix, i, params[i]->name));
    if (t.shape() != params[i]->value.shape()) {
      throw SchemaError("checkpoint tensor " + params[i]->name + " has shape " + shape_string(t.shape()) +
                        ", model expects " + shape_string(params[i]->value.shape()));
    }
    params[i]->value = t;
  }
}

void export_optimizer(Checkpoint& checkpoint, const std::string& prefix, const nn::Adam<float>& optimizer) {
  checkpoint.header["optimizers"][prefix] = optimizer.steps();
  for (std::size_t i = 0; i < optimizer.first_moments().size(); ++i) {
    checkpoint.tensors[prefix + "/m/" + std::to_string(i)] = optimizer.first_moments()[i];
    checkpoint.tensors[prefix + "/v/" + std::to_string(i)] = optimizer.second_moments()[i];
  }
}

void import_optimizer(const Checkpoint& checkpoint, const std::string& prefix, nn::Adam<float>& optimizer) {
  if (!checkpoint.header.contains("optimizers") || !checkpoint.header["optimizers"].contains(prefix)) {
    throw SchemaError("checkpoint has no optimizer state '" + prefix + "'");
  }
  optimizer.set_steps(checkpoint.header["optimizers"][prefix].get<std::int64_t>());
  for (std::size_t i = 0; i < optimizer.first_moments().size(); ++i) {
    const auto& m = checkpoint.tensor(prefix + "/m/" + std::to_string(i));
    const auto& v = checkpoint.tensor(prefix + "/v/" + std::to_string(i));
    if (m.shape() != optimizer.first_moments()[i].shape() || v.shape() != m.shape()) {
      throw SchemaError("optimizer state '" + prefix + "' does not match the model");
    }
    optimizer.first_moments()[i] = m;
    optimizer.second_moments()[i] = v;
  }
}

}  // namespace goas
