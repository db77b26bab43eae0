#pragma once

// Conversions between pipeline objects and the named-array archive layout
// used by the command-line tools.

#include <optional>

#include "discus/core/archive.hpp"
#include "discus/engine/trainer.hpp"
#include "discus/mri/kspace.hpp"
#include "discus/mri/mask.hpp"
#include "discus/sim/motion.hpp"

namespace discus {

// Datasets `frames` (T, Ny, Nx), `coil_maps` (C, Ny, Nx) and, when given,
// `motion_record` (T, 2) holding angle in degrees and x shift in pixels.
NamedArrayArchive series_archive(const ImageSeries& series, const CoilSensitivities& maps,
                                 const std::optional<MotionRecord>& motion);
ImageSeries series_from_archive(const NamedArrayArchive& a);
CoilSensitivities maps_from_archive(const NamedArrayArchive& a);
std::optional<MotionRecord> motion_from_archive(const NamedArrayArchive& a);

// Dataset `mask` (T, PE) plus acceleration / ACS metadata.
NamedArrayArchive mask_archive(const SamplingMask& mask);
SamplingMask mask_from_archive(const NamedArrayArchive& a);

// Datasets `kspace` (T, C, Ny, Nx) and `mask`, with noise and scale metadata.
NamedArrayArchive kspace_archive(const KSpaceSeries& k);
KSpaceSeries kspace_from_archive(const NamedArrayArchive& a);

// `recon_frames` and `loss_trace` always; for learned methods also
// `z_static`, `z_dynamic`, `manifold_support` (Ny, Nx) and the network
// state `theta` / `normalization`.
NamedArrayArchive result_archive(const ReconResult& r);
ImageSeries recon_from_archive(const NamedArrayArchive& a);

}  // namespace discus
