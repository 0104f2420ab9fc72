#pragma once

#include <cstdint>
#include <vector>

#include "pace/dsp.hpp"
#include "pace/nn.hpp"
#include "pace/tensor.hpp"

namespace pace {

template <typename S>
struct LossWeights {
    S lambda_mi = S(0.01);
    S lambda_recon_e = S(10);
    S lambda_adv = S(1);
    S lambda_feat = S(2);
    S lambda_rec = S(1);

    void validate() const {
        for (S v : {lambda_mi, lambda_recon_e, lambda_adv, lambda_feat, lambda_rec})
            if (!(v >= S(0)) || !std::isfinite(double(v)))
                throw ConfigError("loss weights must be finite and nonnegative");
    }
};

// Mean squared error between embedding matrices of identical shape.
template <typename S>
Tensor<S> recon_embedding_loss(const Tensor<S>& e_hat, const Tensor<S>& e_ref) {
    if (e_hat.shape() != e_ref.shape())
        throw ContractError("recon_embedding_loss: " + shape_str(e_hat.shape()) + " vs " +
                            shape_str(e_ref.shape()));
    return mean(square(sub(e_hat, e_ref)));
}

inline const std::vector<std::int64_t>& spectral_windows() {
    static const std::vector<std::int64_t> wins = {64, 128, 256, 512, 1024, 2048};
    return wins;
}

// Multi-scale spectral distance: per window size, mean |mag difference| plus
// root-mean-square log-magnitude difference, summed over scales.
template <typename S>
Tensor<S> spectral_loss(const Tensor<S>& x, const Tensor<S>& x_hat,
                        const std::vector<std::int64_t>& wins = spectral_windows()) {
    if (x.ndim() != 1 || x_hat.ndim() != 1 || x.dim(0) != x_hat.dim(0))
        throw ContractError("spectral_loss: length mismatch " + shape_str(x.shape()) + " vs " +
                            shape_str(x_hat.shape()));
    Tensor<S> total = Tensor<S>::scalar(S(0));
    for (std::int64_t win : wins) {
        Tensor<S> m = stft_mag(x, win, win / 4);
        Tensor<S> mh = stft_mag(x_hat, win, win / 4);
        Tensor<S> l1 = mean(abs(sub(m, mh)));
        Tensor<S> dlog = sub(log(add_scalar(m, S(1e-5))), log(add_scalar(mh, S(1e-5))));
        Tensor<S> l2 = sqrt(mean(square(dlog)));
        total = add(total, add(l1, l2));
    }
    return total;
}

// Turns a waveform into the discriminator's input image: one-sided
// 512-point spectrogram magnitude as a (1, 257, frames) map.
template <typename S>
Tensor<S> disc_input(const Tensor<S>& x) {
    Tensor<S> m = stft_mag(x, 512, 128);          // (frames, 257)
    Tensor<S> img = transpose(m);                 // (257, frames)
    return reshape(img, {1, img.dim(0), img.dim(1)});
}

// STFT-magnitude discriminator: four strided 2-D convolutions producing one
// logit map; the first three post-activation maps feed feature matching.
template <typename S>
struct Discriminator {
    Conv2dLayer<S> c1, c2, c3, c4;

    Discriminator() = default;
    Discriminator(Rng& rng, std::int64_t base = 8)
        : c1(1, base, 5, 5, 2, 2, 2, 2, rng),
          c2(base, 2 * base, 5, 5, 2, 2, 2, 2, rng),
          c3(2 * base, 2 * base, 3, 3, 2, 2, 1, 1, rng),
          c4(2 * base, 1, 3, 3, 1, 1, 1, 1, rng) {
        // zero final layer: untrained logits are exactly 0
        c4.w.values().setZero();
        c4.b.values().setZero();
    }

    struct Out {
        Tensor<S> logits;
        std::vector<Tensor<S>> feats;
    };

    Out forward(const Tensor<S>& img) const {
        Out o;
        Tensor<S> h1 = elu(c1.forward(img));
        Tensor<S> h2 = elu(c2.forward(h1));
        Tensor<S> h3 = elu(c3.forward(h2));
        o.logits = c4.forward(h3);
        o.feats = {h1, h2, h3};
        return o;
    }

    // Same computation against detached parameter copies, so a backward pass
    // through the result never reaches the live parameters.
    Out forward_frozen(const Tensor<S>& img) const {
        Out o;
        Tensor<S> h1 = elu(conv2d(img, c1.w.detach(), c1.b.detach(), 2, 2, 2, 2));
        Tensor<S> h2 = elu(conv2d(h1, c2.w.detach(), c2.b.detach(), 2, 2, 2, 2));
        Tensor<S> h3 = elu(conv2d(h2, c3.w.detach(), c3.b.detach(), 2, 2, 1, 1));
        o.logits = conv2d(h3, c4.w.detach(), c4.b.detach(), 1, 1, 1, 1);
        o.feats = {h1, h2, h3};
        return o;
    }

    void params(std::vector<Tensor<S>>& out) const {
        c1.params(out);
        c2.params(out);
        c3.params(out);
        c4.params(out);
    }
    void named_params(const std::string& p, std::vector<std::pair<std::string, Tensor<S>>>& out) const {
        out.emplace_back(p + ".c1.w", c1.w); out.emplace_back(p + ".c1.b", c1.b);
        out.emplace_back(p + ".c2.w", c2.w); out.emplace_back(p + ".c2.b", c2.b);
        out.emplace_back(p + ".c3.w", c3.w); out.emplace_back(p + ".c3.b", c3.b);
        out.emplace_back(p + ".c4.w", c4.w); out.emplace_back(p + ".c4.b", c4.b);
    }
};

template <typename S>
struct AdvLosses {
    Tensor<S> l_adv, l_feat, l_disc;
};

// Hinge GAN objectives plus feature matching.
//   l_disc = mean(relu(1 - D(x))) + mean(relu(1 + D(x_hat.detach())))
//   l_adv  = -mean(D_frozen(x_hat))
//   l_feat = mean over layers of mean|f(x) - f(x_hat)| / (mean|f(x)| + eps)
// l_disc sees the generator only through a detached x_hat; l_adv and l_feat
// see the discriminator only through detached parameters.
template <typename S>
AdvLosses<S> adversarial_losses(const Discriminator<S>& disc, const Tensor<S>& x,
                                const Tensor<S>& x_hat) {
    if (x.ndim() != 1 || x_hat.ndim() != 1 || x.dim(0) != x_hat.dim(0))
        throw ContractError("adversarial_losses: length mismatch");
    AdvLosses<S> out;

    Tensor<S> img_real = disc_input(x.detach());
    auto real_live = disc.forward(img_real);
    auto fake_live = disc.forward(disc_input(x_hat.detach()));
    Tensor<S> one = Tensor<S>::scalar(S(1));
    out.l_disc = add(mean(relu(sub(one, real_live.logits))),
                     mean(relu(add(one, fake_live.logits))));

    auto fake_frozen = disc.forward_frozen(disc_input(x_hat));
    out.l_adv = neg(mean(fake_frozen.logits));

    Tensor<S> feat_acc = Tensor<S>::scalar(S(0));
    auto n_layers = static_cast<std::int64_t>(fake_frozen.feats.size());
    for (std::int64_t i = 0; i < n_layers; ++i) {
        Tensor<S> ref = real_live.feats[static_cast<std::size_t>(i)].detach();
        Tensor<S> diff = mean(abs(sub(fake_frozen.feats[static_cast<std::size_t>(i)], ref)));
        S denom = ref.values().abs().mean() + S(1e-8);
        feat_acc = add(feat_acc, mul_scalar(diff, S(1) / denom));
    }
    out.l_feat = mul_scalar(feat_acc, S(1) / S(n_layers));
    return out;
}

// Weighted sum of the five generator objectives.
template <typename S>
Tensor<S> total_generator_loss(const Tensor<S>& l_mi, const Tensor<S>& l_recon_e,
                               const Tensor<S>& l_adv, const Tensor<S>& l_feat,
                               const Tensor<S>& l_rec, const LossWeights<S>& w) {
    w.validate();
    Tensor<S> total = mul_scalar(l_mi, w.lambda_mi);
    total = add(total, mul_scalar(l_recon_e, w.lambda_recon_e));
    total = add(total, mul_scalar(l_adv, w.lambda_adv));
    total = add(total, mul_scalar(l_feat, w.lambda_feat));
    total = add(total, mul_scalar(l_rec, w.lambda_rec));
    return total;
}

}  // namespace pace
