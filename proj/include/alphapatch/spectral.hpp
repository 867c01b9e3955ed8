#pragma once

// Spectral calculus on the uniform periodic grid gamma_j = -pi + 2*pi*j/N.
//
// All curve data is stored nodally; Fourier space is an implementation detail
// of differentiation, filtering, antidifferentiation, grid refinement and
// off-grid evaluation.  Curves pack the two coordinates as x + i*y, so every
// operation here works on complex samples and handles both components in one
// transform.  Diagonal multipliers are applied with the usual real-data
// Nyquist convention (zeroed for odd derivative orders, kept for even ones),
// which is also correct component-wise for the packed representation.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace alphapatch::spectral {

using cd = std::complex<double>;

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;

inline bool is_power_of_two(std::size_t n) { return n && (n & (n - 1)) == 0; }

// Signed wavenumber of a DFT bin: 0..N/2, then negative.
inline int wavenumber(std::size_t bin, std::size_t n) {
    return bin <= n / 2 ? static_cast<int>(bin)
                        : static_cast<int>(bin) - static_cast<int>(n);
}

namespace detail {

// Iterative radix-2 Cooley-Tukey; unnormalized, sign by `inverse`.
inline void fft_pow2(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    std::vector<cd> tw(n / 2);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? two_pi : -two_pi) / static_cast<double>(len);
        for (std::size_t k = 0; k < len / 2; ++k)
            tw[k] = cd(std::cos(ang * static_cast<double>(k)),
                       std::sin(ang * static_cast<double>(k)));
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cd u = a[i + k];
                const cd v = a[i + k + len / 2] * tw[k];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

// Direct O(N^2) DFT for general even N (desk-scale fallback).
inline void dft_direct(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    std::vector<cd> out(n);
    const double sgn = inverse ? 1.0 : -1.0;
    for (std::size_t m = 0; m < n; ++m) {
        cd acc(0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = sgn * two_pi * static_cast<double>(m) *
                               static_cast<double>(j) / static_cast<double>(n);
            acc += a[j] * cd(std::cos(ang), std::sin(ang));
        }
        out[m] = acc;
    }
    a = std::move(out);
}

inline void transform(std::vector<cd>& a, bool inverse) {
    if (is_power_of_two(a.size()))
        fft_pow2(a, inverse);
    else
        dft_direct(a, inverse);
}

}  // namespace detail

// Forward DFT, unnormalized: A_m = sum_j a_j exp(-2 pi i j m / N).
inline std::vector<cd> fft(std::vector<cd> a) {
    detail::transform(a, false);
    return a;
}

// Inverse DFT with 1/N normalization.
inline std::vector<cd> ifft(std::vector<cd> a) {
    detail::transform(a, true);
    const double s = 1.0 / static_cast<double>(a.size());
    for (cd& v : a) v *= s;
    return a;
}

// Nodal spectral derivative of given order (>= 1).  The Nyquist mode is
// zeroed for odd orders and multiplied by (i*k)^order (a real number) for
// even orders, the symmetric choice for samples of a real-coefficient
// trigonometric interpolant.
inline std::vector<cd> derivative(const std::vector<cd>& f, int order) {
    if (order < 1) throw std::invalid_argument("spectral::derivative: order must be >= 1");
    const std::size_t n = f.size();
    std::vector<cd> bins = fft(f);
    for (std::size_t m = 0; m < n; ++m) {
        const int k = wavenumber(m, n);
        if (m == n / 2) {
            if (order % 2 == 1) {
                bins[m] = 0.0;
            } else {
                double mult = 1.0;
                for (int p = 0; p < order; p += 2) mult *= -static_cast<double>(k) * k;
                bins[m] *= mult;
            }
            continue;
        }
        cd mult(1.0);
        for (int p = 0; p < order; ++p) mult *= cd(0.0, static_cast<double>(k));
        bins[m] *= mult;
    }
    std::vector<cd> out = ifft(std::move(bins));
    return out;
}

// Apply a real Fourier multiplier given as a function of |k|.
template <typename MultFn>
inline std::vector<cd> filter(const std::vector<cd>& f, MultFn&& mult_of_abs_k) {
    const std::size_t n = f.size();
    std::vector<cd> bins = fft(f);
    for (std::size_t m = 0; m < n; ++m) {
        const int k = wavenumber(m, n);
        bins[m] *= mult_of_abs_k(std::abs(k));
    }
    return ifft(std::move(bins));
}

// Nodal antiderivative of the zero-mean part of f: the DC and Nyquist bins
// are dropped, every other bin is divided by i*k.  The result has zero mean;
// callers anchor the constant themselves.
inline std::vector<cd> antiderivative_zero_mean(const std::vector<cd>& f) {
    const std::size_t n = f.size();
    std::vector<cd> bins = fft(f);
    bins[0] = 0.0;
    bins[n / 2] = 0.0;
    for (std::size_t m = 1; m < n; ++m) {
        if (m == n / 2) continue;
        const int k = wavenumber(m, n);
        bins[m] /= cd(0.0, static_cast<double>(k));
    }
    return ifft(std::move(bins));
}

// Samples of the trigonometric interpolant on the `factor`-times finer grid
// (same interval, same first node).  The Nyquist coefficient is split evenly
// between +N/2 and -N/2, the standard real-symmetric padding.
inline std::vector<cd> refine(const std::vector<cd>& f, int factor) {
    if (factor < 1) throw std::invalid_argument("spectral::refine: factor must be >= 1");
    if (factor == 1) return f;
    const std::size_t n = f.size();
    const std::size_t m = n * static_cast<std::size_t>(factor);
    std::vector<cd> bins = fft(f);
    std::vector<cd> padded(m, cd(0.0));
    for (std::size_t b = 0; b < n; ++b) {
        const int k = wavenumber(b, n);
        if (b == n / 2) {
            padded[n / 2] = 0.5 * bins[b];
            padded[m - n / 2] = 0.5 * bins[b];
        } else if (k >= 0) {
            padded[b] = bins[b];
        } else {
            padded[m + static_cast<std::size_t>(k)] = bins[b];
        }
    }
    std::vector<cd> out = ifft(std::move(padded));
    const double s = static_cast<double>(factor);
    for (cd& v : out) v *= s;  // ifft normalized by 1/M, samples need 1/N
    return out;
}

// Trigonometric interpolant through nodal samples, evaluable anywhere.
// Built once (one FFT), O(N) per evaluation.
class TrigInterp {
public:
    explicit TrigInterp(const std::vector<cd>& samples)
        : n_(samples.size()), coeff_(fft(samples)) {
        const double s = 1.0 / static_cast<double>(n_);
        for (cd& c : coeff_) c *= s;
    }

    std::size_t size() const { return n_; }

    // Value of the interpolant at arbitrary gamma (grid base at -pi).
    cd operator()(double gamma) const {
        // True coefficient of e^{i k gamma} is coeff_[bin] * e^{i k pi}
        // because the first node sits at -pi, not 0; fold the phase in here.
        cd acc(0.0);
        for (std::size_t m = 0; m < n_; ++m) {
            const int k = wavenumber(m, n_);
            if (m == n_ / 2) {
                // Nyquist as a cosine about the first node.
                acc += coeff_[m] * std::cos(0.5 * static_cast<double>(n_) * (gamma + pi));
                continue;
            }
            const double ang = static_cast<double>(k) * (gamma + pi);
            acc += coeff_[m] * cd(std::cos(ang), std::sin(ang));
        }
        return acc;
    }

private:
    std::size_t n_;
    std::vector<cd> coeff_;
};

}  // namespace alphapatch::spectral
