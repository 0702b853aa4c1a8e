#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "samsr/tensor.hpp"

namespace samsr {

// 8-bit grayscale or RGB PNG; value v maps to v/255.
ImageTensor load_image(const std::filesystem::path& path);

// Quantizes to 8 bits (round-to-nearest). With clamp off, out-of-range
// values are an error instead of being clipped.
void save_image(const ImageTensor& img, const std::filesystem::path& path, bool clamp = true);

// Maps [min, max] of the tensor affinely onto [0,1] for viewing.
ImageTensor normalize_for_display(const ImageTensor& img);

// Mask directory: mask_000.png, mask_001.png, ... plus manifest.txt listing
// the file names in canonical index order. Nonzero pixels read as 1. Lines
// starting with '#' are comments; "# size H W" records the mask size so an
// empty stack keeps its dimensions.
MaskStack load_mask_dir(const std::filesystem::path& dir);
void save_mask_dir(const MaskStack& stack, const std::filesystem::path& dir);

// Raw float64 tensor: 16-byte header (magic "SMRT", channels, H, W as
// little-endian u32) followed by C*H*W little-endian doubles.
inline constexpr char kTensorMagic[4] = {'S', 'M', 'R', 'T'};
void save_tensor(const ImageTensor& t, const std::filesystem::path& path);
ImageTensor load_tensor(const std::filesystem::path& path);

// Writes via a sibling temp file and rename so readers never see partial output.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace samsr
