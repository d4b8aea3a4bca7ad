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

#include "skillret/numcore/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "skillret/errors.h"

namespace skillret {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

template <typename T>
void AppendPod(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T ReadPod(const std::string& bytes, std::size_t& offset, const std::string& origin) {
  if (offset + sizeof(T) > bytes.size()) {
    throw FormatError(origin + ": truncated checkpoint");
  }
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

std::size_t ShapeProduct(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int e : shape) n *= static_cast<std::size_t>(e);
  return n;
}

}  // namespace

const Checkpoint::Tensor* Checkpoint::Find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

Checkpoint CaptureCheckpoint(const ParamSet& params) {
  Checkpoint ckpt;
  for (std::size_t i = 0; i < params.num_tensors(); ++i) {
    const ParamTensor& p = params.tensor(i);
    ckpt.tensors.push_back(
        {p.name, p.shape, std::vector<double>(p.value.data(), p.value.data() + p.value.size())});
  }
  return ckpt;
}

void RestoreCheckpoint(const Checkpoint& ckpt, ParamSet& params) {
  if (ckpt.tensors.size() != params.num_tensors()) {
    throw ConfigError("checkpoint has " + std::to_string(ckpt.tensors.size()) +
                      " tensors, model expects " + std::to_string(params.num_tensors()));
  }
  for (std::size_t i = 0; i < ckpt.tensors.size(); ++i) {
    const auto& src = ckpt.tensors[i];
    ParamTensor& dst = params.tensor(i);
    if (src.name != dst.name || src.shape != dst.shape) {
      throw ConfigError("checkpoint tensor " + src.name + " does not match model tensor " +
                        dst.name);
    }
    std::copy(src.values.begin(), src.values.end(), dst.value.data());
  }
}

std::string EncodeCheckpoint(const Checkpoint& ckpt, Dtype dtype) {
  nlohmann::json header;
  header["dtype"] = dtype == Dtype::kF32 ? "f32" : "f64";
  header["fingerprint"] = ckpt.fingerprint;
  header["normalizer"] = ckpt.normalizer;
  header["meta"] = ckpt.meta;
  header["tensors"] = nlohmann::json::array();
  for (const auto& t : ckpt.tensors) {
    if (t.values.size() != ShapeProduct(t.shape)) {
      throw ConfigError("tensor " + t.name + ": value count does not match shape");
    }
    header["tensors"].push_back({{"name", t.name}, {"shape", t.shape}});
  }
  const std::string text = header.dump();

  std::string out(kCheckpointMagic, 4);
  AppendPod<std::uint16_t>(out, kCheckpointVersion);
  AppendPod<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  for (const auto& t : ckpt.tensors) {
    for (double v : t.values) {
      if (dtype == Dtype::kF32) {
        AppendPod<float>(out, static_cast<float>(v));
      } else {
        AppendPod<double>(out, v);
      }
    }
  }
  return out;
}

Checkpoint DecodeCheckpoint(const std::string& bytes, const std::string& origin) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
    throw FormatError(origin + ": bad checkpoint magic");
  }
  std::size_t offset = 4;
  const auto version = ReadPod<std::uint16_t>(bytes, offset, origin);
  if (version != kCheckpointVersion) {
    throw FormatError(origin + ": unsupported checkpoint version " + std::to_string(version));
  }
  const auto header_len = ReadPod<std::uint32_t>(bytes, offset, origin);
  if (offset + header_len > bytes.size()) throw FormatError(origin + ": truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(offset, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(origin + ": malformed checkpoint header: " + e.what());
  }
  offset += header_len;

  Checkpoint ckpt;
  try {
    const std::string dtype = header.at("dtype").get<std::string>();
    if (dtype != "f32" && dtype != "f64") throw FormatError(origin + ": unknown dtype " + dtype);
    const bool f32 = dtype == "f32";
    ckpt.fingerprint = header.at("fingerprint").get<std::string>();
    ckpt.normalizer = header.at("normalizer");
    ckpt.meta = header.at("meta");
    for (const auto& entry : header.at("tensors")) {
      Checkpoint::Tensor t;
      t.name = entry.at("name").get<std::string>();
      t.shape = entry.at("shape").get<std::vector<int>>();
      MatrixExtents(t.shape);
      const std::size_t n = ShapeProduct(t.shape);
      t.values.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        t.values[i] = f32 ? static_cast<double>(ReadPod<float>(bytes, offset, origin))
                          : ReadPod<double>(bytes, offset, origin);
      }
      ckpt.tensors.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(origin + ": malformed checkpoint header: " + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(origin + ": " + e.what());
  }
  if (offset != bytes.size()) {
    throw FormatError(origin + ": trailing bytes after checkpoint payload");
  }
  return ckpt;
}

void WriteCheckpoint(const std::filesystem::path& path, const Checkpoint& ckpt, Dtype dtype) {
  const std::string bytes = EncodeCheckpoint(ckpt, dtype);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write checkpoint " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint ReadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open checkpoint");
  std::ostringstream ss;
  ss << in.rdbuf();
  return DecodeCheckpoint(ss.str(), path.string());
}

}  // namespace skillret
