#pragma once

// Functions sampled on a regular periodic grid in R^d (d <= 3) and spectral
// application of radial Fourier multipliers.

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace siltlab {

/// Grid covering [-(extent + margin), extent + margin)^d with spacing h.
/// `extent` bounds the region of interest; `margin` is periodic padding.
struct GridSpec {
  int dim = 1;
  double extent = 8.0;
  double h = 1.0 / 32.0;
  double margin = 8.0;

  void validate() const;
  std::size_t points_per_axis() const;
  std::size_t size() const;
  double lower() const;
};

class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const GridSpec& spec);

  static GridFunction sample(const GridSpec& spec, const std::function<double(std::span<const double>)>& f);
  static GridFunction constant(const GridSpec& spec, double c);

  const GridSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  double h() const { return spec_.h; }
  std::size_t points_per_axis() const { return n_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Coordinates of flat index i.
  std::array<double, 3> point(std::size_t i) const;

  double integral() const;
  double inner(const GridFunction& other) const;
  double max_abs() const;

  GridFunction& operator*=(const GridFunction& other);
  GridFunction& operator*=(double c);
  GridFunction& operator+=(const GridFunction& other);

  /// Copy onto a grid with the same spacing and extent but a wider margin
  /// (zero padded); `crop` reverses it.
  GridFunction widened(double margin) const;
  GridFunction cropped(const GridSpec& target) const;

 private:
  GridSpec spec_;
  std::size_t n_ = 0;
  std::vector<double> values_;
};

GridFunction operator*(GridFunction a, const GridFunction& b);

/// Multiplies the discrete Fourier transform of `values` (n^d grid, spacing h)
/// by m(|k|) with k the angular wave vector, in place.
void apply_radial_multiplier(std::vector<double>& values, int dim, std::size_t n, double h,
                             const std::function<double(double)>& m);

/// Real-to-complex transform of an n^d array (last axis halved to n/2+1).
std::vector<std::complex<double>> fft_forward(const std::vector<double>& values, int dim, std::size_t n);
/// Inverse of fft_forward, normalized so fft_inverse(fft_forward(v)) = v.
std::vector<double> fft_inverse(std::vector<std::complex<double>> coeffs, int dim, std::size_t n);
/// |k| for every coefficient of the half spectrum (angular wave numbers).
std::vector<double> half_spectrum_wavenumbers(int dim, std::size_t n, double h);
/// Multiplicity of every half-spectrum coefficient in a full-spectrum sum (1 or 2).
std::vector<double> half_spectrum_weights(int dim, std::size_t n);

}  // namespace siltlab
