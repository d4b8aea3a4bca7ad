// Copyright 2026 The skillret Authors
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

#ifndef SKILLRET_NUMCORE_CHECKPOINT_H_
#define SKILLRET_NUMCORE_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "skillret/numcore/tensor.h"

namespace skillret {

// On-disk layout:
//   "SKCK" | u16 version | u32 header length | JSON header | payload
// The header lists tensors (name, shape) in payload order along with dtype,
// config fingerprint, normalizer statistics and free-form metadata. The
// payload is each tensor's values, row-major little-endian.
inline constexpr char kCheckpointMagic[4] = {'S', 'K', 'C', 'K'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

enum class Dtype { kF32, kF64 };

struct Checkpoint {
  struct Tensor {
    std::string name;
    std::vector<int> shape;
    std::vector<double> values;
  };

  std::string fingerprint;
  nlohmann::json normalizer;  // null when absent
  nlohmann::json meta;        // null when absent
  std::vector<Tensor> tensors;

  const Tensor* Find(const std::string& name) const;
};

Checkpoint CaptureCheckpoint(const ParamSet& params);
// Names, order and shapes must match exactly; throws ConfigError otherwise.
void RestoreCheckpoint(const Checkpoint& ckpt, ParamSet& params);

std::string EncodeCheckpoint(const Checkpoint& ckpt, Dtype dtype = Dtype::kF32);
Checkpoint DecodeCheckpoint(const std::string& bytes,
                            const std::string& origin = "<memory>");

void WriteCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt,
                     Dtype dtype = Dtype::kF32);
// Throws FormatError naming the file on bad magic, version or sizes.
Checkpoint ReadCheckpoint(const std::filesystem::path& path);

}  // namespace skillret

#endif  // SKILLRET_NUMCORE_CHECKPOINT_H_
