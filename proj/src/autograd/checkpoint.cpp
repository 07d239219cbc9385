// Copyright 2026 The translit Authors
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

#include "autograd/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <sstream>

#include "common/fsutil.hpp"
#include "common/hash.hpp"

namespace translit::ag {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr const char* kMagic = "translit-checkpoint";

std::string to_hex(const std::string& s) {
  static const char* d = "0123456789abcdef";
  std::string out;
  out.reserve(s.size() * 2);
  for (unsigned char c : s) {
    out += d[c >> 4];
    out += d[c & 15];
  }
  return out;
}

std::string from_hex(const std::string& h) {
  if (h.size() % 2) fail(ErrorKind::kParse, "checkpoint: bad hex field");
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    fail(ErrorKind::kParse, "checkpoint: bad hex field");
  };
  std::string out(h.size() / 2, '\0');
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<char>(nib(h[2 * i]) * 16 + nib(h[2 * i + 1]));
  return out;
}

template <typename U>
void put(std::string& out, U v) {
  char buf[sizeof(U)];
  std::memcpy(buf, &v, sizeof(U));
  out.append(buf, sizeof(U));
}

template <typename U>
U get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(U) > in.size()) fail(ErrorKind::kParse, "checkpoint: truncated block data");
  U v;
  std::memcpy(&v, in.data() + pos, sizeof(U));
  pos += sizeof(U);
  return v;
}

std::size_t dtype_size(DType d) { return d == DType::kF32 ? 4 : 8; }

}  // namespace

template <typename T>
Block Block::from(const std::string& name, const Shape& shape, const std::vector<T>& data) {
  Block b;
  b.name = name;
  b.dtype = std::is_same_v<T, float> ? DType::kF32 : DType::kF64;
  b.shape = shape;
  b.payload.resize(data.size() * sizeof(T));
  std::memcpy(b.payload.data(), data.data(), b.payload.size());
  return b;
}

template <typename T>
std::vector<T> Block::as() const {
  const std::size_t n = payload.size() / dtype_size(dtype);
  std::vector<T> out(n);
  if (dtype == DType::kF32) {
    std::vector<float> f(n);
    std::memcpy(f.data(), payload.data(), payload.size());
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<T>(f[i]);
  } else {
    std::vector<double> f(n);
    std::memcpy(f.data(), payload.data(), payload.size());
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<T>(f[i]);
  }
  return out;
}

const Block* Checkpoint::find(const std::string& name) const {
  for (const auto& b : blocks)
    if (b.name == name) return &b;
  return nullptr;
}

std::string Checkpoint::serialize() const {
  std::string out;
  out += std::string(kMagic) + " " + std::to_string(kFormatVersion) + "\n";
  out += "arch " + arch + "\n";
  out += "kind " + kind + "\n";
  out += "config " + config.dump() + "\n";
  out += "source_vocab_sha256 " + sha256_hex(source_vocab) + "\n";
  out += "target_vocab_sha256 " + sha256_hex(target_vocab) + "\n";
  out += "source_vocab " + to_hex(source_vocab) + "\n";
  out += "target_vocab " + to_hex(target_vocab) + "\n";
  if (train_state) out += "train_state " + train_state->dump() + "\n";
  out += "blocks " + std::to_string(blocks.size()) + "\n";
  out += "end\n";
  for (const auto& b : blocks) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(b.name.size()));
    out += b.name;
    put<std::uint8_t>(out, static_cast<std::uint8_t>(b.dtype));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(b.shape.size()));
    for (auto d : b.shape) put<std::uint64_t>(out, d);
    out.append(reinterpret_cast<const char*>(b.payload.data()), b.payload.size());
  }
  return out;
}

Checkpoint Checkpoint::parse(const std::string& bytes) {
  Checkpoint c;
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string {
    const auto nl = bytes.find('\n', pos);
    if (nl == std::string::npos) fail(ErrorKind::kParse, "checkpoint: truncated header");
    std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };
  const std::string magic = next_line();
  if (magic != std::string(kMagic) + " " + std::to_string(kFormatVersion)) {
    fail(ErrorKind::kParse, "not a translit checkpoint (or unsupported format version)");
  }
  std::size_t nblocks = 0;
  std::string src_hash, tgt_hash;
  for (;;) {
    const std::string line = next_line();
    if (line == "end") break;
    const auto sp = line.find(' ');
    const std::string key = line.substr(0, sp);
    const std::string val = sp == std::string::npos ? "" : line.substr(sp + 1);
    try {
      if (key == "arch") c.arch = val;
      else if (key == "kind") c.kind = val;
      else if (key == "config") c.config = nlohmann::ordered_json::parse(val);
      else if (key == "train_state") c.train_state = nlohmann::ordered_json::parse(val);
      else if (key == "source_vocab") c.source_vocab = from_hex(val);
      else if (key == "target_vocab") c.target_vocab = from_hex(val);
      else if (key == "source_vocab_sha256") src_hash = val;
      else if (key == "target_vocab_sha256") tgt_hash = val;
      else if (key == "blocks") nblocks = std::stoull(val);
      else fail(ErrorKind::kParse, "checkpoint: unknown header field '" + key + "'");
    } catch (const nlohmann::ordered_json::exception& e) {
      fail(ErrorKind::kParse, "checkpoint: bad " + key + " field: " + e.what());
    }
  }
  if (sha256_hex(c.source_vocab) != src_hash || sha256_hex(c.target_vocab) != tgt_hash) {
    fail(ErrorKind::kParse, "checkpoint: vocabulary hash mismatch");
  }
  for (std::size_t i = 0; i < nblocks; ++i) {
    Block b;
    const auto nlen = get<std::uint32_t>(bytes, pos);
    if (pos + nlen > bytes.size()) fail(ErrorKind::kParse, "checkpoint: truncated block name");
    b.name = bytes.substr(pos, nlen);
    pos += nlen;
    const auto dt = get<std::uint8_t>(bytes, pos);
    if (dt != 1 && dt != 2) fail(ErrorKind::kParse, "checkpoint: unknown dtype in block " + b.name);
    b.dtype = static_cast<DType>(dt);
    const auto ndim = get<std::uint32_t>(bytes, pos);
    for (std::uint32_t d = 0; d < ndim; ++d) b.shape.push_back(get<std::uint64_t>(bytes, pos));
    const std::size_t n = numel(b.shape) * dtype_size(b.dtype);
    if (pos + n > bytes.size()) fail(ErrorKind::kParse, "checkpoint: truncated block " + b.name);
    b.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
    c.blocks.push_back(std::move(b));
  }
  if (pos != bytes.size()) fail(ErrorKind::kParse, "checkpoint: trailing data");
  return c;
}

void Checkpoint::save(const std::filesystem::path& path) const { write_file_atomic(path, serialize()); }

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  try {
    return parse(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse) fail(ErrorKind::kParse, path.string() + ": " + e.what());
    throw;
  }
}

template <typename T>
void store_params(const ParamStore<T>& params, Checkpoint& ckpt, const std::string& prefix) {
  for (const auto& p : params.params()) ckpt.blocks.push_back(Block::from(prefix + p->name, p->shape, p->value));
}

template <typename T>
void restore_params(ParamStore<T>& params, const Checkpoint& ckpt, const std::string& prefix) {
  for (const auto& p : params.params()) {
    const Block* b = ckpt.find(prefix + p->name);
    if (!b) fail(ErrorKind::kParse, "checkpoint is missing parameter " + prefix + p->name);
    if (b->shape != p->shape) {
      fail(ErrorKind::kParse, "checkpoint parameter " + p->name + " has shape " + shape_str(b->shape) + ", expected " +
                                  shape_str(p->shape));
    }
    p->value = b->as<T>();
  }
}

template Block Block::from<float>(const std::string&, const Shape&, const std::vector<float>&);
template Block Block::from<double>(const std::string&, const Shape&, const std::vector<double>&);
template std::vector<float> Block::as<float>() const;
template std::vector<double> Block::as<double>() const;
template void store_params<float>(const ParamStore<float>&, Checkpoint&, const std::string&);
template void store_params<double>(const ParamStore<double>&, Checkpoint&, const std::string&);
template void restore_params<float>(ParamStore<float>&, const Checkpoint&, const std::string&);
template void restore_params<double>(ParamStore<double>&, const Checkpoint&, const std::string&);

}  // namespace translit::ag
