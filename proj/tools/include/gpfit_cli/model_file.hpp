#pragma once

// Versioned key = value text format for fitted models.
//
//   # gpfit model
//   schema_version = 1
//   n = 7
//   d = 1
//   X = 0.03,0.21,...          (row-major, n*d values)
//   Y = ...
//   beta_hat = ...
//   mu_hat = ...
//   ...
//
// Every real is written with 17 significant digits so that loading a saved
// model restores each field bit for bit.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <gpfit/design.hpp>
#include <gpfit/gp.hpp>
#include <gpfit/optimizer.hpp>

namespace gpfit::cli {

inline constexpr int kModelSchemaVersion = 1;

struct ModelFile {
  GpModel model;
  std::uint64_t seed = 0;
  MultistartPlan plan;
  std::uint64_t total_evaluations = 0;
  /// Native bounding box when the inputs were rescaled to [0,1]^d at fit time.
  std::optional<Box> input_box;
};

std::string serialize_model(const ModelFile& file);
/// Throws InputError naming `source` and the offending line.
ModelFile parse_model(std::istream& in, const std::string& source);

void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

}  // namespace gpfit::cli
