#include <cstdlib>
#include <string>

#include "raceopt/kernels/nearest.hpp"

namespace raceopt::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__) || defined(_M_ARM64)
      return true;
#else
      return false;
#endif
  }
  return false;
}

namespace {

Isa select_isa() {
  if (const char* forced = std::getenv("RACEOPT_SIMD")) {
    const std::string name(forced);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (name == isa_name(isa) && isa_available(isa)) return isa;
    }
  }
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = select_isa();
  return isa;
}

NearestResult nearest_point(Isa isa, std::span<const double> xs, std::span<const double> ys,
                            double qx, double qy) {
  switch (isa) {
    case Isa::Avx2:
      return nearest_point_avx2(xs, ys, qx, qy);
    case Isa::Neon:
      return nearest_point_neon(xs, ys, qx, qy);
    case Isa::Scalar:
      break;
  }
  return nearest_point_scalar(xs, ys, qx, qy);
}

NearestResult nearest_point(std::span<const double> xs, std::span<const double> ys, double qx,
                            double qy) {
  return nearest_point(active_isa(), xs, ys, qx, qy);
}

}  // namespace raceopt::kernels
