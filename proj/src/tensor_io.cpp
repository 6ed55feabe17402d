#include "ctxsal/io.hpp"

#include "byte_stream.hpp"

#include <cmath>

namespace ctxsal {

namespace {
constexpr char kTensorMagic[4] = {'C', 'S', 'F', 'T'};
}

std::vector<std::uint8_t> encode_tensor(const FeatureFieldf& field) {
  detail::ByteWriter out;
  out.raw(kTensorMagic, 4);
  out.u32(kTensorVersion);
  out.u32(static_cast<std::uint32_t>(field.width()));
  out.u32(static_cast<std::uint32_t>(field.height()));
  out.u32(static_cast<std::uint32_t>(field.channels()));
  // Planes are row-major (channels x pixels): linear order is channel-major.
  const float* data = field.planes().data();
  const auto n = static_cast<std::size_t>(field.planes().size());
  for (std::size_t i = 0; i < n; ++i) out.f32(data[i]);
  return std::move(out.bytes());
}

FeatureFieldf decode_tensor(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader in(bytes.data(), bytes.size(), ErrorCode::Io);
  char magic[4];
  in.raw(magic, 4);
  if (std::memcmp(magic, kTensorMagic, 4) != 0) throw Error(ErrorCode::Io, "bad tensor magic");
  const auto version = in.u32();
  if (version != kTensorVersion) {
    throw Error(ErrorCode::Io, "unsupported tensor version " + std::to_string(version));
  }
  const auto width = in.u32();
  const auto height = in.u32();
  const auto channels = in.u32();
  const std::uint64_t count = std::uint64_t{width} * height * channels;
  if (count * 4 != in.remaining()) {
    throw Error(ErrorCode::Io, "tensor payload length does not match header");
  }
  FeatureFieldf field(static_cast<int>(width), static_cast<int>(height), static_cast<int>(channels));
  float* data = field.planes().data();
  for (std::uint64_t i = 0; i < count; ++i) {
    data[i] = in.f32();
  }
  if (!field.all_finite()) throw Error(ErrorCode::NonFiniteInput, "tensor contains NaN or Inf");
  return field;
}

FeatureFieldf read_tensor(const fs::path& path) {
  try {
    return decode_tensor(read_file_bytes(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::MissingFile) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_tensor(const fs::path& path, const FeatureFieldf& field) { write_file_bytes(path, encode_tensor(field)); }

}  // namespace ctxsal
