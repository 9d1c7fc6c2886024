#include "voxelgraph/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "voxelgraph/rng.hpp"
#include "voxelgraph/uncertainty.hpp"

namespace voxelgraph {

namespace {

constexpr double kBandMargin = 1e-3;

enum Stream : std::uint64_t { kPetNoise = 1, kCtNoise = 2, kProbNoise = 3 };

bool inside(const Coord& c, const Coord& center, const std::array<double, 3>& r) {
  const double dz = static_cast<double>(c.z - center.z) / r[0];
  const double dy = static_cast<double>(c.y - center.y) / r[1];
  const double dx = static_cast<double>(c.x - center.x) / r[2];
  return dz * dz + dy * dy + dx * dx <= 1.0;
}

void check_region(const Dims& d, const Coord& center,
                  const std::array<double, 3>& r, const std::string& name) {
  for (double v : r) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(Errc::config, name + ": radii must be finite and > 0");
    }
  }
  const std::array<double, 3> c{static_cast<double>(center.z),
                                static_cast<double>(center.y),
                                static_cast<double>(center.x)};
  const std::array<double, 3> ext{static_cast<double>(d.nz),
                                  static_cast<double>(d.ny),
                                  static_cast<double>(d.nx)};
  for (std::size_t k = 0; k < 3; ++k) {
    if (c[k] - r[k] < 0.0 || c[k] + r[k] > ext[k] - 1.0) {
      throw Error(Errc::config, name + " lies outside the volume bounds");
    }
  }
}

// Separable box blur with windows clipped at the border.
std::vector<double> box_blur(const std::vector<double>& in, const Dims& d,
                             int radius) {
  if (radius <= 0) return in;
  std::vector<double> a = in, b(in.size());
  const auto nz = d.nz, ny = d.ny, nx = d.nx;
  const auto idx = [&](std::int64_t z, std::int64_t y, std::int64_t x) {
    return static_cast<std::size_t>((z * ny + y) * nx + x);
  };
  const auto blur_axis = [&](int axis) {
    for (std::int64_t z = 0; z < nz; ++z) {
      for (std::int64_t y = 0; y < ny; ++y) {
        for (std::int64_t x = 0; x < nx; ++x) {
          const std::int64_t pos = axis == 0 ? z : axis == 1 ? y : x;
          const std::int64_t len = axis == 0 ? nz : axis == 1 ? ny : nx;
          const std::int64_t lo = std::max<std::int64_t>(0, pos - radius);
          const std::int64_t hi = std::min<std::int64_t>(len - 1, pos + radius);
          double sum = 0.0;
          for (std::int64_t t = lo; t <= hi; ++t) {
            sum += a[axis == 0 ? idx(t, y, x) : axis == 1 ? idx(z, t, x) : idx(z, y, t)];
          }
          b[idx(z, y, x)] = sum / static_cast<double>(hi - lo + 1);
        }
      }
    }
    std::swap(a, b);
  };
  blur_axis(2);
  blur_axis(1);
  blur_axis(0);
  return a;
}

}  // namespace

void validate(const PhantomSpec& spec) {
  try {
    validate_dims(spec.dims);
    validate_spacing(spec.spacing);
  } catch (const Error& e) {
    throw Error(Errc::config, std::string("phantom spec: ") + e.what());
  }
  const auto finite_nonneg = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(Errc::config, std::string(name) + " must be finite and >= 0");
    }
  };
  finite_nonneg(spec.noise_sd, "noise_sd");
  finite_nonneg(spec.background.pet_sd, "background.pet_sd");
  finite_nonneg(spec.background.ct_sd, "background.ct_sd");
  for (double v : {spec.background.pet_mean, spec.background.ct_mean,
                   spec.ct_lesion_offset}) {
    if (!std::isfinite(v)) throw Error(Errc::config, "background statistics must be finite");
  }
  if (spec.blur_radius < 0) throw Error(Errc::config, "blur_radius must be >= 0");
  if (!(spec.beta > 0.0 && spec.beta < 1.0)) {
    throw Error(Errc::config, "beta must lie in (0, 1)");
  }
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    throw Error(Errc::config, "alpha must lie in (0, 1)");
  }
  const UncertainBand band = uncertain_band(spec.alpha);
  const double low_cap = std::min(band.p_lo, spec.beta) - kBandMargin;
  const double high_floor = std::max(band.p_hi, spec.beta) + kBandMargin;
  if (low_cap < 0.0 || high_floor > 1.0 - kBandMargin) {
    throw Error(Errc::config, "alpha leaves no room for certain probabilities");
  }
  for (double v : {spec.lesion_prob, spec.background_prob}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(Errc::config, "lesion_prob and background_prob must lie in [0, 1]");
    }
  }

  for (std::size_t i = 0; i < spec.lesions.size(); ++i) {
    const Lesion& l = spec.lesions[i];
    const std::string name = "lesions[" + std::to_string(i) + "]";
    check_region(spec.dims, l.center, l.radii, name);
    if (!std::isfinite(l.pet_intensity)) {
      throw Error(Errc::config, name + ": pet_intensity must be finite");
    }
  }
  const double fp_lo = std::max(spec.beta, band.p_lo);
  for (std::size_t i = 0; i < spec.false_positives.size(); ++i) {
    const FalsePositive& f = spec.false_positives[i];
    const std::string name = "false_positives[" + std::to_string(i) + "]";
    check_region(spec.dims, f.center, f.radii, name);
    if (!(f.prob_level > fp_lo && f.prob_level < band.p_hi)) {
      throw Error(Errc::config,
                  name + ": prob_level " + std::to_string(f.prob_level) +
                      " must lie strictly inside (" + std::to_string(fp_lo) +
                      ", " + std::to_string(band.p_hi) + ")");
    }
    if (!std::isfinite(f.pet_intensity)) {
      throw Error(Errc::config, name + ": pet_intensity must be finite");
    }
  }
}

Phantom generate_phantom(const PhantomSpec& spec) {
  validate(spec);
  const Dims& d = spec.dims;
  const std::size_t n = d.size();
  const CounterRng rng(spec.seed);
  const UncertainBand band = uncertain_band(spec.alpha);

  // Clamp ranges: each region stays strictly on its side of the band.
  const double bg_hi = std::min(band.p_lo, spec.beta) - kBandMargin;
  const double lesion_lo = std::max(band.p_hi, spec.beta) + kBandMargin;
  const double lesion_hi = 1.0 - kBandMargin;
  const double fp_lo = std::max(band.p_lo, spec.beta) + kBandMargin;
  const double fp_hi = band.p_hi - kBandMargin;

  Mask3 gt(d, spec.spacing);
  Mask3 fp(d, spec.spacing);
  std::vector<double> pet(n), ct(n), prob(n);
  const Grid<std::uint8_t> shape(d, spec.spacing);

  for (std::size_t i = 0; i < n; ++i) {
    const Coord c = shape.coord(i);
    const Lesion* lesion = nullptr;
    for (const Lesion& l : spec.lesions) {
      if (inside(c, l.center, l.radii)) {
        lesion = &l;
        break;
      }
    }
    const FalsePositive* blob = nullptr;
    if (lesion == nullptr) {
      for (const FalsePositive& f : spec.false_positives) {
        if (inside(c, f.center, f.radii)) {
          blob = &f;
          break;
        }
      }
    }

    const double pet_noise = spec.background.pet_sd * rng.gaussian(kPetNoise, i);
    const double ct_noise = spec.background.ct_sd * rng.gaussian(kCtNoise, i);
    const double prob_noise = spec.noise_sd * rng.gaussian(kProbNoise, i);
    ct[i] = spec.background.ct_mean + ct_noise;

    if (lesion != nullptr) {
      gt.set(i, true);
      pet[i] = lesion->pet_intensity + pet_noise;
      ct[i] += spec.ct_lesion_offset;
      prob[i] = std::clamp(spec.lesion_prob + prob_noise, lesion_lo, lesion_hi);
    } else if (blob != nullptr) {
      fp.set(i, true);
      pet[i] = blob->pet_intensity + pet_noise;
      prob[i] = std::clamp(blob->prob_level + prob_noise, fp_lo, fp_hi);
    } else {
      pet[i] = spec.background.pet_mean + pet_noise;
      prob[i] = std::clamp(spec.background_prob + prob_noise, 0.0, bg_hi);
    }
  }

  return {Volume3(d, spec.spacing, DType::float32, std::move(ct)),
          Volume3(d, spec.spacing, DType::float32, box_blur(pet, d, spec.blur_radius)),
          std::move(gt),
          Volume3(d, spec.spacing, DType::float32, std::move(prob)),
          std::move(fp)};
}

}  // namespace voxelgraph
