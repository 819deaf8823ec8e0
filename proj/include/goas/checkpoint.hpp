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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "goas/nn/adam.hpp"
#include "goas/nn/layers.hpp"
#include "goas/tensor.hpp"

namespace goas {

// Single-file container: the 8-byte magic "GOASCKPT", a u32 format version,
// a u64 header length, a JSON header, then raw little-endian float32 blobs in
// header order.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  nlohmann::json header = nlohmann::json::object();  // kind, arch, train config, step, rng, ...
  std::map<std::string, Tensor<float>> tensors;

  bool has(const std::string& name) const { return tensors.count(name) > 0; }
  const Tensor<float>& tensor(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Parameters are stored as "<prefix>/<index>/<name>" so order and identity
// are both checked on import.
void export_parameters(Checkpoint& checkpoint, const std::string& prefix,
                       const std::vector<nn::Parameter<float>*>& params);
void import_parameters(const Checkpoint& checkpoint, const std::string& prefix,
                       const std::vector<nn::Parameter<float>*>& params);
bool has_parameters(const Checkpoint& checkpoint, const std::string& prefix);

void export_optimizer(Checkpoint& checkpoint, const std::string& prefix, const nn::Adam<float>& optimizer);
void import_optimizer(const Checkpoint& checkpoint, const std::string& prefix, nn::Adam<float>& optimizer);

}  // namespace goas
