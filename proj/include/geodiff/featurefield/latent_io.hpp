#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "geodiff/featurefield/latent_field.hpp"

namespace geodiff::ff {

// Latent container: one JSON header line
//   {"height":H,"width":W,"channels":C,"dtype":"f32","order":"row-major, channel-last"}
// followed by H*W*C little-endian float32 values. Values are narrowed to
// float32 on write; reading then writing a container reproduces it bit for bit.
void write_latent(std::ostream& out, const LatentField& field);
LatentField read_latent(std::istream& in);

void save_latent(const std::filesystem::path& path, const LatentField& field);
LatentField load_latent(const std::filesystem::path& path);

// Serialized container bytes (used for digests and byte comparisons).
std::string encode_latent(const LatentField& field);

}  // namespace geodiff::ff
