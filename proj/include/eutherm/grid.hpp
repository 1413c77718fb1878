#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <random>
#include <vector>

#include "eutherm/errors.hpp"

namespace eutherm {

using Field = std::vector<double>;

// Periodic tensor-product grid with FFT differentiation. d in {1,2}, n a
// power of two per axis, box length the same along every axis. Derivatives
// are exact for band-limited fields, and grad/div are exact (to roundoff)
// negative adjoints of each other in the uniform-grid inner product, which
// is what the skew-symmetry certificates lean on.
class Grid {
 public:
  Grid() = default;

  Grid(int d, int n, double length) : d_(d), n_(n), len_(length) {
    if (d < 1 || d > 2) throw BadParameters("grid: d must be 1 or 2");
    if (n < 8 || (n & (n - 1)) != 0) throw BadParameters("grid: n must be a power of two >= 8");
    if (!(length > 0)) throw BadParameters("grid: length must be positive");
    cache_ = std::make_shared<FftCache>(d, n);
  }

  int dim() const { return d_; }
  int n() const { return n_; }
  double length() const { return len_; }
  size_t num_points() const {
    size_t m = static_cast<size_t>(n_);
    return d_ == 1 ? m : m * m;
  }
  double spacing() const { return len_ / n_; }
  double volume() const { return d_ == 1 ? len_ : len_ * len_; }
  double cell_volume() const { return volume() / static_cast<double>(num_points()); }

  bool compatible(const Grid& o) const { return d_ == o.d_ && n_ == o.n_ && len_ == o.len_; }

  size_t index(int ix, int iy = 0) const { return static_cast<size_t>(iy) * n_ + ix; }
  double x_of(int ix) const { return ix * spacing(); }

  Field zeros() const { return Field(num_points(), 0.0); }

  // spectral d/dx_axis
  Field deriv(const Field& f, int axis) const {
    check(f);
    std::lock_guard<std::mutex> lk(cache_->mu);
    cache_->load(f);
    cache_->forward();
    const double fac = 2.0 * M_PI / len_;
    auto& out = cache_->out;
    if (d_ == 1) {
      for (int i = 0; i < n_; ++i) {
        const double k = wavenumber(i) * fac;
        const double re = out[i][0], im = out[i][1];
        out[i][0] = -k * im;
        out[i][1] = k * re;
      }
    } else {
      for (int iy = 0; iy < n_; ++iy)
        for (int ix = 0; ix < n_; ++ix) {
          const size_t id = index(ix, iy);
          const double k = (axis == 0 ? wavenumber(ix) : wavenumber(iy)) * fac;
          const double re = out[id][0], im = out[id][1];
          out[id][0] = -k * im;
          out[id][1] = k * re;
        }
    }
    cache_->backward();
    return cache_->unload();
  }

  // zero every mode with max-norm wavenumber above kcut
  Field low_pass(const Field& f, int kcut) const {
    check(f);
    std::lock_guard<std::mutex> lk(cache_->mu);
    cache_->load(f);
    cache_->forward();
    auto& out = cache_->out;
    if (d_ == 1) {
      for (int i = 0; i < n_; ++i)
        if (std::abs(wavenumber(i)) > kcut) out[i][0] = out[i][1] = 0.0;
    } else {
      for (int iy = 0; iy < n_; ++iy)
        for (int ix = 0; ix < n_; ++ix)
          if (std::max(std::abs(wavenumber(ix)), std::abs(wavenumber(iy))) > kcut) {
            const size_t id = index(ix, iy);
            out[id][0] = out[id][1] = 0.0;
          }
    }
    cache_->backward();
    return cache_->unload();
  }

  // 2/3-rule dealiasing of products
  Field dealias(const Field& f) const { return low_pass(f, n_ / 3); }

  // largest normalized mode amplitude strictly above kcut (band-limit checks)
  double high_mode_max(const Field& f, int kcut) const {
    check(f);
    std::lock_guard<std::mutex> lk(cache_->mu);
    cache_->load(f);
    cache_->forward();
    auto& out = cache_->out;
    const double inv = 1.0 / static_cast<double>(num_points());
    double m = 0;
    if (d_ == 1) {
      for (int i = 0; i < n_; ++i)
        if (std::abs(wavenumber(i)) > kcut)
          m = std::max(m, std::hypot(out[i][0], out[i][1]) * inv);
    } else {
      for (int iy = 0; iy < n_; ++iy)
        for (int ix = 0; ix < n_; ++ix)
          if (std::max(std::abs(wavenumber(ix)), std::abs(wavenumber(iy))) > kcut) {
            const size_t id = index(ix, iy);
            m = std::max(m, std::hypot(out[id][0], out[id][1]) * inv);
          }
    }
    return m;
  }

  double integrate(const Field& f) const {
    check(f);
    double s = 0;
    for (double v : f) s += v;
    return s * cell_volume();
  }

  double inner(const Field& f, const Field& g) const {
    check(f);
    check(g);
    double s = 0;
    for (size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
    return s * cell_volume();
  }

  double l2norm(const Field& f) const { return std::sqrt(inner(f, f)); }

  // Reproducible band-limited field: a fixed-order sum of Fourier modes with
  // |k|_inf <= kmax and 1/(1+|k|^2) spectral decay. kmax = 0 gives a constant.
  Field random_smooth(int kmax, uint64_t seed) const {
    if (kmax > n_ / 4) throw BadParameters("random_smooth: kmax must be <= n/4");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Field f(num_points(), 0.0);
    const double c0 = gauss(rng);
    for (auto& v : f) v = c0;
    const double fac = 2.0 * M_PI / len_;
    if (d_ == 1) {
      for (int k = 1; k <= kmax; ++k) {
        const double amp = gauss(rng) / (1.0 + k * k);
        const double phase = gauss(rng);
        for (int ix = 0; ix < n_; ++ix) f[ix] += amp * std::cos(fac * k * x_of(ix) + phase);
      }
    } else {
      for (int kx = 0; kx <= kmax; ++kx)
        for (int ky = -kmax; ky <= kmax; ++ky) {
          if (kx == 0 && ky <= 0) continue;  // half-lattice; conjugate pairs implicit
          const double k2 = kx * kx + ky * ky;
          const double amp = gauss(rng) / (1.0 + k2);
          const double phase = gauss(rng);
          for (int iy = 0; iy < n_; ++iy) {
            const double py = fac * ky * x_of(iy) + phase;
            for (int ix = 0; ix < n_; ++ix)
              f[index(ix, iy)] += amp * std::cos(fac * kx * x_of(ix) + py);
          }
        }
    }
    return f;
  }

 private:
  struct FftCache {
    FftCache(int d, int n) {
      npts = d == 1 ? static_cast<size_t>(n) : static_cast<size_t>(n) * n;
      in = fftw_alloc_complex(npts);
      out = fftw_alloc_complex(npts);
      if (d == 1) {
        fwd = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(n, out, in, FFTW_BACKWARD, FFTW_ESTIMATE);
      } else {
        fwd = fftw_plan_dft_2d(n, n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_2d(n, n, out, in, FFTW_BACKWARD, FFTW_ESTIMATE);
      }
    }
    ~FftCache() {
      fftw_destroy_plan(fwd);
      fftw_destroy_plan(bwd);
      fftw_free(in);
      fftw_free(out);
    }
    void load(const Field& f) {
      for (size_t i = 0; i < npts; ++i) {
        in[i][0] = f[i];
        in[i][1] = 0.0;
      }
    }
    void forward() { fftw_execute(fwd); }
    void backward() { fftw_execute(bwd); }
    Field unload() {
      Field f(npts);
      const double inv = 1.0 / static_cast<double>(npts);
      for (size_t i = 0; i < npts; ++i) f[i] = in[i][0] * inv;
      return f;
    }
    size_t npts = 0;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan fwd{}, bwd{};
    std::mutex mu;
  };

  int wavenumber(int i) const {
    int k = i <= n_ / 2 ? i : i - n_;
    if (i == n_ / 2) k = 0;  // drop Nyquist so the derivative stays skew
    return k;
  }

  void check(const Field& f) const {
    if (f.size() != num_points()) throw GridMismatch("field size does not match grid");
  }

  int d_ = 0;
  int n_ = 0;
  double len_ = 0;
  std::shared_ptr<FftCache> cache_;
};

}  // namespace eutherm
