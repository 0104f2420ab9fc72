#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "pace/error.hpp"
#include "pace/tensor.hpp"

namespace pace {

inline constexpr double kTau = 6.28318530717958647692;

inline bool is_pow2(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

// Twiddle table e^(-i tau j / n) for j in [0, n/2); shared by every call of
// the same size. Stage `len` butterflies index it with stride n/len.
template <typename S>
const std::vector<std::complex<S>>& fft_twiddles(std::int64_t n) {
    static thread_local std::vector<std::vector<std::complex<S>>> cache;
    std::size_t log2n = 0;
    while ((std::int64_t(1) << log2n) < n) ++log2n;
    if (cache.size() <= log2n) cache.resize(log2n + 1);
    auto& tw = cache[log2n];
    if (tw.empty()) {
        tw.resize(static_cast<std::size_t>(n / 2 > 0 ? n / 2 : 1));
        for (std::int64_t j = 0; j < n / 2; ++j) {
            double ang = -kTau * double(j) / double(n);
            tw[static_cast<std::size_t>(j)] = {S(std::cos(ang)), S(std::sin(ang))};
        }
    }
    return tw;
}

// Iterative radix-2 Cooley-Tukey, in place. inverse applies the 1/n factor.
template <typename S>
void fft(std::vector<std::complex<S>>& a, bool inverse) {
    auto n = static_cast<std::int64_t>(a.size());
    if (!is_pow2(n)) throw ContractError("fft: length " + std::to_string(n) + " not a power of 2");
    for (std::int64_t i = 1, j = 0; i < n; ++i) {
        std::int64_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const auto& tw = fft_twiddles<S>(n);
    const S flip = inverse ? S(-1) : S(1);
    for (std::int64_t len = 2; len <= n; len <<= 1) {
        std::int64_t half = len / 2, stride = n / len;
        for (std::int64_t i = 0; i < n; i += len) {
            for (std::int64_t j = 0; j < half; ++j) {
                const auto& w = tw[static_cast<std::size_t>(j * stride)];
                S wr = w.real(), wi = flip * w.imag();
                std::complex<S>& lo = a[i + j];
                std::complex<S>& hi = a[i + j + half];
                S vr = hi.real() * wr - hi.imag() * wi;
                S vi = hi.real() * wi + hi.imag() * wr;
                hi = {lo.real() - vr, lo.imag() - vi};
                lo = {lo.real() + vr, lo.imag() + vi};
            }
        }
    }
    if (inverse) {
        S inv = S(1) / S(n);
        for (auto& x : a) x = {x.real() * inv, x.imag() * inv};
    }
}

// Periodic Hann: 0.5 - 0.5 cos(2 pi j / n).
template <typename S>
std::vector<S> hann_window(std::int64_t n) {
    std::vector<S> w(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j)
        w[static_cast<std::size_t>(j)] = S(0.5 - 0.5 * std::cos(kTau * double(j) / double(n)));
    return w;
}

// Non-differentiating STFT magnitude of a raw waveform. Frames start at
// i*hop; no padding, so frames = 1 + (T - win)/hop. Rows are frames,
// columns the win/2 + 1 one-sided bins.
template <typename S>
std::vector<std::vector<S>> stft_mag_plain(const std::vector<S>& x, std::int64_t win,
                                           std::int64_t hop) {
    auto t = static_cast<std::int64_t>(x.size());
    if (t < win) throw ContractError("stft: signal shorter than window");
    std::vector<S> w = hann_window<S>(win);
    std::int64_t frames = 1 + (t - win) / hop, bins = win / 2 + 1;
    std::vector<std::vector<S>> mag(static_cast<std::size_t>(frames));
    std::vector<std::complex<S>> buf(static_cast<std::size_t>(win));
    for (std::int64_t f = 0; f < frames; ++f) {
        std::int64_t off = f * hop;
        for (std::int64_t j = 0; j < win; ++j)
            buf[static_cast<std::size_t>(j)] = {x[static_cast<std::size_t>(off + j)] *
                                                    w[static_cast<std::size_t>(j)],
                                                S(0)};
        fft(buf, false);
        auto& row = mag[static_cast<std::size_t>(f)];
        row.resize(static_cast<std::size_t>(bins));
        for (std::int64_t b = 0; b < bins; ++b)
            row[static_cast<std::size_t>(b)] = std::abs(buf[static_cast<std::size_t>(b)]);
    }
    return mag;
}

// Differentiable STFT magnitude. x is 1-D (T); output (frames, win/2 + 1).
// Backward: with U_b = X_b / max(|X_b|, eps) and D_b = g_b U_b zero-padded
// beyond the one-sided bins, dL/dx_w[j] = Re(n * ifft(D)[j]), then the
// window weights route it back onto x.
template <typename S>
Tensor<S> stft_mag(const Tensor<S>& x, std::int64_t win, std::int64_t hop) {
    if (x.ndim() != 1) throw DimensionError("stft_mag: need 1-D input, got " + shape_str(x.shape()));
    std::int64_t t = x.dim(0);
    if (t < win) throw ContractError("stft_mag: signal shorter than window");
    if (!is_pow2(win)) throw ContractError("stft_mag: window must be a power of 2");
    std::int64_t frames = 1 + (t - win) / hop, bins = win / 2 + 1;
    std::vector<S> w = hann_window<S>(win);
    auto spectra = std::make_shared<std::vector<std::vector<std::complex<S>>>>(
        static_cast<std::size_t>(frames));
    Tensor<S> out = Tensor<S>::make_result({frames, bins}, {x});
    {
        std::vector<std::complex<S>> buf(static_cast<std::size_t>(win));
        for (std::int64_t f = 0; f < frames; ++f) {
            std::int64_t off = f * hop;
            for (std::int64_t j = 0; j < win; ++j)
                buf[static_cast<std::size_t>(j)] = {x.values()[off + j] * w[static_cast<std::size_t>(j)],
                                                    S(0)};
            fft(buf, false);
            if (x.requires_grad()) (*spectra)[static_cast<std::size_t>(f)] = buf;
            for (std::int64_t b = 0; b < bins; ++b)
                out.values()[f * bins + b] = std::abs(buf[static_cast<std::size_t>(b)]);
        }
    }
    out.set_backprop([x, spectra, w, win, hop, frames, bins](typename Tensor<S>::Impl& self) mutable {
        std::vector<std::complex<S>> d(static_cast<std::size_t>(win));
        for (std::int64_t f = 0; f < frames; ++f) {
            const auto& spec = (*spectra)[static_cast<std::size_t>(f)];
            std::fill(d.begin(), d.end(), std::complex<S>(0, 0));
            for (std::int64_t b = 0; b < bins; ++b) {
                S g = self.grad[f * bins + b];
                if (g == S(0)) continue;
                std::complex<S> xb = spec[static_cast<std::size_t>(b)];
                S m = std::abs(xb);
                d[static_cast<std::size_t>(b)] = g * xb / std::max(m, S(1e-12));
            }
            fft(d, true);
            std::int64_t off = f * hop;
            for (std::int64_t j = 0; j < win; ++j)
                x.grad()[off + j] += w[static_cast<std::size_t>(j)] * S(win) *
                                     d[static_cast<std::size_t>(j)].real();
        }
    });
    return out;
}

}  // namespace pace
