#include "geodiff/featurefield/latent_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "geodiff/error.hpp"

namespace geodiff::ff {
namespace {

constexpr const char* kOrder = "row-major, channel-last";

void put_f32_le(std::string& buf, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

float get_f32_le(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= std::uint32_t(p[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

int header_dim(const nlohmann::json& header, const char* key) {
  if (!header.contains(key) || !header[key].is_number_integer() || header[key].get<long long>() <= 0) {
    throw InputError(std::string("latent header: '") + key + "' must be a positive integer");
  }
  return header[key].get<int>();
}

}  // namespace

std::string encode_latent(const LatentField& field) {
  std::string buf = "{\"height\":" + std::to_string(field.height()) +
                    ",\"width\":" + std::to_string(field.width()) +
                    ",\"channels\":" + std::to_string(field.channels()) +
                    ",\"dtype\":\"f32\",\"order\":\"" + kOrder + "\"}\n";
  buf.reserve(buf.size() + field.size() * 4);
  for (double v : field.values()) put_f32_le(buf, static_cast<float>(v));
  return buf;
}

void write_latent(std::ostream& out, const LatentField& field) {
  const std::string buf = encode_latent(field);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

LatentField read_latent(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("latent container: missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("latent container: corrupt header: ") + e.what());
  }
  if (!header.is_object()) throw InputError("latent container: header is not an object");
  const int h = header_dim(header, "height");
  const int w = header_dim(header, "width");
  const int c = header_dim(header, "channels");
  if (header.value("dtype", "") != "f32") throw InputError("latent container: dtype must be \"f32\"");
  if (header.value("order", "") != kOrder) {
    throw InputError(std::string("latent container: order must be \"") + kOrder + "\"");
  }

  LatentField field(h, w, c);
  const std::size_t nbytes = field.size() * 4;
  std::string payload(nbytes, '\0');
  in.read(payload.data(), static_cast<std::streamsize>(nbytes));
  if (static_cast<std::size_t>(in.gcount()) != nbytes) {
    throw InputError("latent container: payload truncated (expected " + std::to_string(nbytes) + " bytes)");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw InputError("latent container: trailing bytes after payload");

  const auto* bytes = reinterpret_cast<const unsigned char*>(payload.data());
  auto values = field.values();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = get_f32_le(bytes + 4 * i);
  return field;
}

void save_latent(const std::filesystem::path& path, const LatentField& field) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  write_latent(out, field);
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

LatentField load_latent(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open latent file '" + path.string() + "'");
  return read_latent(in);
}

}  // namespace geodiff::ff
