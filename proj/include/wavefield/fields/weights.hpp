#pragma once

#include <filesystem>

#include "wavefield/fields/height_field.hpp"
#include "wavefield/fields/image_field.hpp"

// Weight export as one F32R record per array (matrices as W x H = in x out,
// vectors as n x 1, one channel) plus a small key = value descriptor:
//   height_field.txt, height_l<i>_weight.f32r, height_l<i>_bias.f32r
//   image_field.txt,  image_l<i>_weight.f32r,  image_l<i>_bias.f32r, image_fourier_B.f32r
// Values are stored as float32, so a reload rounds weights to single precision.
namespace wf::fields {

void save_height_field(const HeightField& field, const std::filesystem::path& dir);
HeightField load_height_field(const std::filesystem::path& dir);

void save_image_field(const ImageField& field, const std::filesystem::path& dir);
ImageField load_image_field(const std::filesystem::path& dir);

}  // namespace wf::fields
