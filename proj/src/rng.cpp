#include "stvae/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace stvae {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Acklam's rational approximation for the probit function.
double icdf_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x1234567ULL));
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& tag) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return derive_seed(master, h);
}

double normal_icdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_icdf: p must be in (0,1), got " + std::to_string(p));
  }
  double x = icdf_approx(p);
  // One Halley step against the exact CDF.
  double e = normal_cdf(x) - p;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

double Rng::truncated_normal(double mean, double sd, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("truncated_normal: lo >= hi");
  if (sd <= 0.0) throw std::invalid_argument("truncated_normal: sd must be positive");
  double a = normal_cdf((lo - mean) / sd);
  double b = normal_cdf((hi - mean) / sd);
  if (b - a < 1e-300) {
    // All mass outside (lo,hi) to double precision: clamp to nearest bound.
    double mid = (normal_cdf((hi - mean) / sd) < 0.5) ? hi : lo;
    double eps = 1e-12 * (hi - lo);
    return mid == hi ? hi - eps : lo + eps;
  }
  double p = a + (b - a) * uniform();
  p = std::min(std::max(p, 1e-300), 1.0 - 1e-16);
  return mean + sd * normal_icdf(p);
}

}  // namespace stvae
