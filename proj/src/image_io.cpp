#include "samsr/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "samsr/error.hpp"

namespace samsr {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "binary tensor formats assume a little-endian host");

namespace {

std::uint32_t read_be32(const std::uint8_t* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) | (std::uint32_t(p[2]) << 8) | p[3];
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

std::vector<std::uint8_t> encode_png(const std::vector<std::uint8_t>& pixels, std::size_t channels, std::size_t h,
                                     std::size_t w) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0, nullptr))
    fail_io(std::string("PNG encode failed: ") + image.message);
  std::vector<std::uint8_t> buf(size);
  if (!png_image_write_to_memory(&image, buf.data(), &size, 0, pixels.data(), 0, nullptr))
    fail_io(std::string("PNG encode failed: ") + image.message);
  buf.resize(size);
  return buf;
}

std::uint8_t quantize(double v) { return static_cast<std::uint8_t>(std::lround(v * 255.0)); }

}  // namespace

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_io("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail_io("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail_io("write failed for " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail_io("cannot rename into " + path.string());
  }
}

ImageTensor load_image(const fs::path& path) {
  std::vector<std::uint8_t> bytes = read_file(path);
  // Signature (8) + IHDR length/type (8) + width, height (8) + depth, colour type.
  if (bytes.size() < 26 || png_sig_cmp(bytes.data(), 0, 8) != 0 || std::memcmp(bytes.data() + 12, "IHDR", 4) != 0)
    fail_io(path.string() + ": not a PNG file");
  const int bit_depth = bytes[24];
  const int colour_type = bytes[25];
  if (bit_depth != 8) fail_io(path.string() + ": unsupported bit depth " + std::to_string(bit_depth) + " (need 8)");
  if (colour_type != PNG_COLOR_TYPE_GRAY && colour_type != PNG_COLOR_TYPE_RGB)
    fail_io(path.string() + ": unsupported colour type " + std::to_string(colour_type) + " (need gray or RGB)");
  const std::size_t channels = colour_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t w = read_be32(bytes.data() + 16);
  const std::size_t h = read_be32(bytes.data() + 20);

  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    fail_io(path.string() + ": " + image.message);
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    fail_io(path.string() + ": " + image.message);
  }
  if (image.width != w || image.height != h) fail_io(path.string() + ": inconsistent header");

  ImageTensor out(channels, h, w);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t c = 0; c < channels; ++c) out.at(c, y, x) = pixels[(y * w + x) * channels + c] / 255.0;
  return out;
}

void save_image(const ImageTensor& img, const fs::path& path, bool clamp) {
  const std::size_t c_n = img.channels(), h = img.height(), w = img.width();
  std::vector<std::uint8_t> pixels(c_n * h * w);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t c = 0; c < c_n; ++c) {
        double v = img.at(c, y, x);
        if (clamp) {
          v = std::clamp(v, 0.0, 1.0);
        } else if (v < 0.0 || v > 1.0) {
          fail_numeric("save_image: value outside [0,1] with clamping disabled");
        }
        pixels[(y * w + x) * c_n + c] = quantize(v);
      }
  write_file_atomic(path, encode_png(pixels, c_n, h, w));
}

ImageTensor normalize_for_display(const ImageTensor& img) {
  auto v = img.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  ImageTensor out = img;
  const double span = *hi - *lo;
  for (double& x : out.values()) x = span > 0.0 ? (x - *lo) / span : 0.5;
  return out;
}

MaskStack load_mask_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail_io("mask directory not found: " + dir.string());
  std::vector<std::string> names;
  std::size_t size_h = 0, size_w = 0;
  const fs::path manifest = dir / "manifest.txt";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
      if (line.starts_with("#")) {
        std::istringstream hdr(line.substr(1));
        std::string key;
        if (hdr >> key && key == "size") hdr >> size_h >> size_w;
        continue;
      }
      if (!line.empty()) names.push_back(line);
    }
  } else {
    for (const auto& e : fs::directory_iterator(dir)) {
      const std::string n = e.path().filename().string();
      if (n.starts_with("mask_") && n.ends_with(".png")) names.push_back(n);
    }
    std::sort(names.begin(), names.end());
  }

  MaskStack stack;
  if (size_h > 0 && size_w > 0) stack = MaskStack(0, size_h, size_w);
  bool first = true;
  for (const auto& name : names) {
    ImageTensor img = load_image(dir / name);
    if (img.channels() != 1) fail_io(name + ": masks must be 8-bit grayscale");
    if (first && stack.count() == 0 && (size_h == 0 || (img.height() == size_h && img.width() == size_w))) {
      stack = MaskStack(0, img.height(), img.width());
      first = false;
    } else if (img.height() != stack.height() || img.width() != stack.width()) {
      fail_io(name + ": mask size differs from the stack size");
    }
    std::vector<double> bin(img.size());
    std::transform(img.values().begin(), img.values().end(), bin.begin(), [](double v) { return v != 0.0 ? 1.0 : 0.0; });
    stack.push_back(bin);
  }
  return stack;
}

void save_mask_dir(const MaskStack& stack, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) fail_io("cannot create mask directory " + dir.string());
  if (!stack.binary()) fail_usage("save_mask_dir: stack must be binary");
  std::ostringstream manifest;
  manifest << "# size " << stack.height() << ' ' << stack.width() << '\n';
  for (std::size_t m = 0; m < stack.count(); ++m) {
    char name[32];
    std::snprintf(name, sizeof name, "mask_%03zu.png", m);
    auto mk = stack.mask(m);
    std::vector<std::uint8_t> pixels(mk.size());
    std::transform(mk.begin(), mk.end(), pixels.begin(), [](double v) { return v != 0.0 ? 255 : 0; });
    write_file_atomic(dir / name, encode_png(pixels, 1, stack.height(), stack.width()));
    manifest << name << '\n';
  }
  const std::string text = manifest.str();
  write_file_atomic(dir / "manifest.txt",
                    std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void save_tensor(const ImageTensor& t, const fs::path& path) {
  std::vector<std::uint8_t> out(kTensorMagic, kTensorMagic + 4);
  put_u32(out, static_cast<std::uint32_t>(t.channels()));
  put_u32(out, static_cast<std::uint32_t>(t.height()));
  put_u32(out, static_cast<std::uint32_t>(t.width()));
  const auto v = t.values();
  const auto* raw = reinterpret_cast<const std::uint8_t*>(v.data());
  out.insert(out.end(), raw, raw + v.size_bytes());
  write_file_atomic(path, out);
}

ImageTensor load_tensor(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kTensorMagic, 4) != 0)
    fail_io(path.string() + ": not a tensor file");
  const Shape shape{get_u32(bytes.data() + 4), get_u32(bytes.data() + 8), get_u32(bytes.data() + 12)};
  if (bytes.size() != 16 + shape.size() * sizeof(double)) fail_io(path.string() + ": truncated tensor file");
  std::vector<double> data(shape.size());
  std::memcpy(data.data(), bytes.data() + 16, shape.size() * sizeof(double));
  return ImageTensor(shape, std::move(data));
}

}  // namespace samsr
