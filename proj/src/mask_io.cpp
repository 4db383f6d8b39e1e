#include "bloombench/mask_io.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include <png.h>

#include "bloombench/error.hpp"

namespace bloombench {

nlohmann::ordered_json rle_to_json(const RleMask& rle) {
  return {{"width", rle.width}, {"height", rle.height}, {"counts", rle.counts}};
}

RleMask rle_from_json(const nlohmann::json& j) {
  try {
    RleMask rle;
    const auto w = j.at("width").get<std::int64_t>();
    const auto h = j.at("height").get<std::int64_t>();
    if (w < 0 || h < 0) throw Error(ErrorCode::MalformedRle, "negative dimension");
    rle.width = static_cast<std::size_t>(w);
    rle.height = static_cast<std::size_t>(h);
    for (const auto& c : j.at("counts")) {
      if (!c.is_number_integer() || c.get<std::int64_t>() < 0) {
        throw Error(ErrorCode::MalformedRle, "counts must be non-negative integers");
      }
      rle.counts.push_back(c.get<std::uint64_t>());
    }
    return rle;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRle, e.what());
  }
}

void write_rle_file(const RleMask& rle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << rle_to_json(rle).dump() << '\n';
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

RleMask read_rle_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  try {
    return rle_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRle, path.string() + ": " + e.what());
  }
}

namespace {

std::vector<std::uint8_t> encode_png(std::span<const std::uint8_t> pixels, std::size_t width, std::size_t height,
                                     png_uint_32 format) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::IoError, std::string("png encode: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::IoError, std::string("png encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_rgb_png(std::span<const std::uint8_t> rgb, std::size_t width, std::size_t height) {
  return encode_png(rgb, width, height, PNG_FORMAT_RGB);
}

std::vector<std::uint8_t> encode_gray_png(std::span<const std::uint8_t> gray, std::size_t width,
                                          std::size_t height) {
  return encode_png(gray, width, height, PNG_FORMAT_GRAY);
}

std::vector<std::uint8_t> encode_mask_png(const Mask& m) {
  std::vector<std::uint8_t> gray(m.bits.size());
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = m.bits[i] ? 255 : 0;
  return encode_gray_png(gray, m.width, m.height);
}

Mask decode_mask_png(std::span<const std::uint8_t> png) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, png.data(), png.size())) {
    throw Error(ErrorCode::MalformedImage, image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> gray(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, gray.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorCode::MalformedImage, image.message);
  }
  Mask m(image.width, image.height);
  for (std::size_t i = 0; i < m.bits.size(); ++i) m.bits[i] = gray[i] >= 128 ? 1 : 0;
  return m;
}

void write_mask_png(const Mask& m, const std::filesystem::path& path) {
  const auto bytes = encode_mask_png(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Mask read_mask_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_mask_png(bytes);
}

Mask read_mask_file(const std::filesystem::path& path) {
  if (path.extension() == ".png") return read_mask_png(path);
  return decode_rle(read_rle_file(path));
}

}  // namespace bloombench
