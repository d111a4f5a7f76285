// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "bss/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "bss/error.hpp"
#include "byte_order.hpp"

namespace bss {

namespace {
constexpr char kMagic[8] = {'B', 'S', 'S', 'C', 'K', 'P', 'T', '\0'};
}

void save_checkpoint(const TinyConvNet& model, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  const ConvNetArch& a = model.arch();
  os.write(kMagic, sizeof kMagic);
  detail::put_u32_le(os, kCheckpointVersion);
  for (int v : {a.in_channels, a.height, a.width, a.conv1_channels, a.conv2_channels,
                a.num_classes}) {
    detail::put_u32_le(os, static_cast<std::uint32_t>(v));
  }
  detail::put_u64_le(os, model.params().size());
  for (float p : model.params()) detail::put_f32_le(os, p);
  if (!os) throw IoError("write failed for " + path.string());
}

TinyConvNet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path.string());
  detail::ByteReader in(is, "checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) in.fail("bad magic", 0);
  const std::uint32_t version = in.u32_le();
  if (version != kCheckpointVersion) {
    in.fail("unsupported version " + std::to_string(version), 8);
  }
  ConvNetArch a;
  int* fields[] = {&a.in_channels, &a.height,         &a.width,
                   &a.conv1_channels, &a.conv2_channels, &a.num_classes};
  for (int* f : fields) {
    const std::uint32_t v = in.u32_le();
    if (v > 65536) in.fail("implausible architecture field", in.offset() - 4);
    *f = static_cast<int>(v);
  }
  try {
    a.validate();
  } catch (const ArgumentError& e) {
    in.fail(std::string("invalid architecture: ") + e.what(), 12);
  }
  const std::uint64_t count = in.u64_le();
  if (count != a.param_count()) {
    in.fail("parameter count " + std::to_string(count) + " does not match architecture (" +
                std::to_string(a.param_count()) + ")",
            in.offset() - 8);
  }
  std::vector<float> params(count);
  for (float& p : params) p = in.f32_le();
  return TinyConvNet(a, std::move(params));
}

}  // namespace bss
