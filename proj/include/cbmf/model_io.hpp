#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "cbmf/factorize.hpp"

namespace cbmf {

/// Text model file: a "key value" header followed by [anova], [P] and
/// [Q] or [B] sections. Every floating-point value is written with 17
/// significant digits, so write -> read -> write is byte-identical.
struct ModelFile {
  static constexpr int kFormatVersion = 1;

  Hyperparams hyper;  // gamma always resolved
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t n_attrs = 0;
  std::uint64_t fingerprint = 0;
  FactorModel model;
};

void write_model(std::ostream& out, const ModelFile& file);
void write_model(const std::filesystem::path& path, const ModelFile& file);

// Throws InputError on any structural mismatch.
ModelFile read_model(std::istream& in);
ModelFile read_model(const std::filesystem::path& path);

}  // namespace cbmf
