#pragma once

// Portable model checkpoints.
//
// Layout (all integers little-endian):
//   "MTNER"                       5-byte magic
//   u32 version                   currently 1
//   u32 n, n bytes, u32 crc32     metadata block: `key=value` lines
//   u32 section count
//   per section:
//     u32 id length, id bytes, u32 rank, u64 extent * rank,
//     f64 values (row-major), u32 crc32 over the section bytes above

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "morphotag/diff.hpp"
#include "morphotag/model.hpp"

namespace morphotag {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedArray {
  std::string id;
  diff::Tensor value;

  friend bool operator==(const NamedArray&, const NamedArray&) = default;
};

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  ModelConfig config;
  std::vector<std::string> words;
  std::u32string chars;
  std::string tagset_rules;  // TagsetMapping text form
  std::optional<std::vector<std::string>> lexicon;
  std::vector<NamedArray> arrays;
  double best_dev_f1 = 0.0;
  std::size_t epoch = 0;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

Checkpoint snapshot(const Model& model, double best_dev_f1 = 0.0, std::size_t epoch = 0);
Model restore(const Checkpoint& ckpt);
// Copies the checkpoint's arrays into an existing model of the same shape.
void copy_params(const Checkpoint& ckpt, Model& model);

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace morphotag
