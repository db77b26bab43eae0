#include "discus/core/complex_channels.hpp"

namespace discus {

ChannelImage complex_to_channels(const ComplexImage& img) {
  if (!all_finite(img.span())) throw NonFiniteError("complex_to_channels: non-finite pixel");
  ChannelImage out{img.ny(), img.nx(), std::vector<float>(2 * img.size())};
  const std::size_t n = img.size();
  for (std::size_t i = 0; i < n; ++i) {
    out.data[i] = img[i].real();
    out.data[n + i] = img[i].imag();
  }
  return out;
}

ComplexImage channels_to_complex(std::span<const float> ch, int ny, int nx) {
  const std::size_t n = static_cast<std::size_t>(ny) * nx;
  if (ch.size() != 2 * n) throw DimensionError("channels_to_complex: expected 2 x Ny x Nx values");
  ComplexImage img(ny, nx);
  for (std::size_t i = 0; i < n; ++i) img[i] = {ch[i], ch[n + i]};
  return img;
}

ComplexImage channels_to_complex(const ChannelImage& ch) {
  return channels_to_complex(ch.data, ch.ny, ch.nx);
}

}  // namespace discus
