#ifndef STVAE_RNG_HPP
#define STVAE_RNG_HPP

#include <cstdint>
#include <random>
#include <string>

namespace stvae {

// Mixes a stream tag into a master seed so that independent units of work
// (series, batches, chains) get decorrelated but reproducible streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t master, const std::string& tag);

// Inverse standard-normal CDF, accurate to ~1e-15 (rational approximation
// plus one Halley refinement).
double normal_icdf(double p);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  double uniform() { return unit_(eng_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(eng_); }
  double normal(double mean, double sd) { return mean + sd * normal(); }
  double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

  // Gamma(shape, scale); used for inverse-gamma conjugate updates.
  double gamma(double shape, double scale) {
    std::gamma_distribution<double> g(shape, scale);
    return g(eng_);
  }
  double inverse_gamma(double shape, double scale) {
    return scale / gamma(shape, 1.0);
  }

  // N(mean, sd^2) truncated to (lo, hi), sampled by inverse CDF so that
  // far-tail conditionals stay exact and cheap.
  double truncated_normal(double mean, double sd, double lo, double hi);

  int uniform_int(int lo, int hi) {  // inclusive bounds
    std::uniform_int_distribution<int> d(lo, hi);
    return d(eng_);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(0, static_cast<int>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace stvae

#endif
