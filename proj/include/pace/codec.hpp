#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pace/error.hpp"
#include "pace/nn.hpp"
#include "pace/prosody.hpp"
#include "pace/rng.hpp"
#include "pace/tensor.hpp"
#include "pace/wav.hpp"

namespace pace {

// Channel plan for the split codec. Strides are fixed (2, 4, 5 | 8 and the
// transposed mirror); widths scale between the full model and the toy model
// used for desk-scale training.
struct CodecDims {
    std::int64_t init_w = 64;        // width after the input convolution
    std::int64_t w1 = 64, w2 = 128;  // stage-1 block widths (block 3 ends at frame_dim)
    std::int64_t frame_dim = 256;    // e^f width, matches the prosody embedding width
    std::int64_t codec_dim = 128;    // codec embedding width
    std::int64_t scale_hidden = 64;
    std::int64_t dec1 = 256, dec2 = 128, dec3 = 64, dec4 = 64;
    std::int64_t disc_base = 8;
    std::int64_t rvq_stages = 8;
    std::int64_t rvq_entries = 1024;

    static CodecDims full() { return CodecDims{}; }
    static CodecDims toy() {
        CodecDims d;
        d.init_w = 16; d.w1 = 16; d.w2 = 32;
        d.frame_dim = 64; d.codec_dim = 32; d.scale_hidden = 16;
        d.dec1 = 64; d.dec2 = 32; d.dec3 = 16; d.dec4 = 16;
        d.disc_base = 4;
        return d;
    }
};

namespace detail {

// Same-coverage kernels: 2p = k - s, so T maps to exactly T/s (and back to
// exactly T*s for the transposed direction).
inline std::int64_t kernel_for(std::int64_t stride) { return stride % 2 == 0 ? 2 * stride : 2 * stride + 1; }
inline std::int64_t pad_for(std::int64_t stride) { return (kernel_for(stride) - stride) / 2; }

}  // namespace detail

// Strided downsampling block: strided conv, ELU, then a stride-1 residual
// refinement at the output rate. The stage-2 block keeps a linear output so
// codec embeddings are not range-clipped.
template <typename S>
struct EncBlock {
    Conv1dLayer<S> down, res;
    bool linear_out = false;

    EncBlock() = default;
    EncBlock(std::int64_t cin, std::int64_t cout, std::int64_t stride, Rng& rng, bool linear_out_ = false)
        : down(cin, cout, detail::kernel_for(stride), stride, detail::pad_for(stride), rng),
          res(cout, cout, 3, 1, 1, rng),
          linear_out(linear_out_) {}

    Tensor<S> forward(const Tensor<S>& x) const {
        Tensor<S> h = elu(down.forward(x));
        Tensor<S> y = add(h, res.forward(h));
        return linear_out ? y : elu(y);
    }
    void params(std::vector<Tensor<S>>& out) const { down.params(out); res.params(out); }
    void named_params(const std::string& p, std::vector<std::pair<std::string, Tensor<S>>>& out) const {
        out.emplace_back(p + ".down.w", down.w); out.emplace_back(p + ".down.b", down.b);
        out.emplace_back(p + ".res.w", res.w); out.emplace_back(p + ".res.b", res.b);
    }
};

// First three codec blocks (strides 2, 4, 5): waveform (1, L) -> e^f as
// (L/40, frame_dim) rows.
template <typename S>
struct Stage1Encoder {
    Conv1dLayer<S> init;
    EncBlock<S> b1, b2, b3;

    Stage1Encoder() = default;
    Stage1Encoder(const CodecDims& d, Rng& rng)
        : init(1, d.init_w, 3, 1, 1, rng),
          b1(d.init_w, d.w1, 2, rng),
          b2(d.w1, d.w2, 4, rng),
          b3(d.w2, d.frame_dim, 5, rng) {}

    Tensor<S> forward(const Tensor<S>& wave) const {
        if (wave.ndim() != 2 || wave.dim(0) != 1)
            throw ContractError("stage-1 encoder expects a (1, L) waveform, got " + shape_str(wave.shape()));
        if (wave.dim(1) % 40 != 0)
            throw ContractError("stage-1 encoder needs length divisible by 40, got " +
                                std::to_string(wave.dim(1)));
        return transpose(b3.forward(b2.forward(b1.forward(elu(init.forward(wave))))));
    }
    void params(std::vector<Tensor<S>>& out) const {
        init.params(out); b1.params(out); b2.params(out); b3.params(out);
    }
    void named_params(const std::string& p, std::vector<std::pair<std::string, Tensor<S>>>& out) const {
        out.emplace_back(p + ".init.w", init.w); out.emplace_back(p + ".init.b", init.b);
        b1.named_params(p + ".b1", out); b2.named_params(p + ".b2", out); b3.named_params(p + ".b3", out);
    }
};

// Fourth codec block (stride 8): (F, frame_dim) rows -> (F/8, codec_dim) rows,
// linear output.
template <typename S>
struct Stage2Encoder {
    EncBlock<S> b4;

    Stage2Encoder() = default;
    Stage2Encoder(const CodecDims& d, Rng& rng) : b4(d.frame_dim, d.codec_dim, 8, rng, true) {}

    Tensor<S> forward(const Tensor<S>& frames) const {
        if (frames.ndim() != 2)
            throw ContractError("stage-2 encoder expects (F, D) frames, got " + shape_str(frames.shape()));
        if (frames.dim(0) % 8 != 0)
            throw ContractError("stage-2 encoder needs frame count divisible by 8, got " +
                                std::to_string(frames.dim(0)));
        return transpose(b4.forward(transpose(frames)));
    }
    void params(std::vector<Tensor<S>>& out) const { b4.params(out); }
    void named_params(const std::string& p, std::vector<std::pair<std::string, Tensor<S>>>& out) const {
        b4.named_params(p + ".b4", out);
    }
};

// Predicts per-utterance scalars K and B from the pre-scale embedding (conv,
// global average pool over frames, linear head each), applies y = K*x + B,
// then one more convolution. Output matches the input frame/channel shape.
template <typename S>
struct ScaleLayer {
    Conv1dLayer<S> k_conv, b_conv;
    LinearLayer<S> k_lin, b_lin;
    Conv1dLayer<S> out_conv;

    ScaleLayer() = default;
    ScaleLayer(const CodecDims& d, Rng& rng)
        : k_conv(d.codec_dim, d.scale_hidden, 3, 1, 1, rng),
          b_conv(d.codec_dim, d.scale_hidden, 3, 1, 1, rng),
          k_lin(d.scale_hidden, 1, rng),
          b_lin(d.scale_hidden, 1, rng),
          out_conv(d.codec_dim, d.codec_dim, 3, 1, 1, rng) {
        // Start near identity scaling so early training is not dominated by a
        // random multiplicative gain.
        k_lin.b.values()[0] = S(1);
        b_lin.b.values()[0] = S(0);
    }

    // pre, returned: (F, codec_dim) rows.
    Tensor<S> forward(const Tensor<S>& pre) const {
        Tensor<S> ct = transpose(pre);  // (codec_dim, F)
        Tensor<S> k = branch(k_conv, k_lin, ct);
        Tensor<S> b = branch(b_conv, b_lin, ct);
        return transpose(out_conv.forward(add(mul(ct, k), b)));
    }

    // The per-utterance scalars, exposed for containment checks.
    std::pair<Tensor<S>, Tensor<S>> scalars(const Tensor<S>& pre) const {
        Tensor<S> ct = transpose(pre);
        return {branch(k_conv, k_lin, ct), branch(b_conv, b_lin, ct)};
    }
    void params(std::vector<Tensor<S>>& out) const {
        k_conv.params(out); b_conv.params(out); k_lin.params(out); b_lin.params(out);
        out_conv.params(out);
    }
    void named_params(const std::string& p, std::vector<std::pair<std::string, Tensor<S>>>& out) const {
        out.emplace_back(p + ".k_conv.w", k_conv.w); out.emplace_back(p + ".k_conv.b", k_conv.b);
        out.emplace_back(p + ".b_conv.w", b_conv.w); out.emplace_back(p + ".b_conv.b", b_conv.b);
        out.emplace_back(p + ".k_lin.w", k_lin.w); out.emplace_back(p + ".k_lin.b", k_lin.b);
        out.emplace_back(p + ".b_lin.w", b_lin.w); out.emplace_back(p + ".b_lin.b", b_lin.b);
        out.emplace_back(p + ".out_conv.w", out_conv.w); out.emplace_back(p + ".out_conv.b", out_conv.b);
    }

private:
    Tensor<S> branch(const Conv1dLayer<S>& conv, const LinearLayer<S>& lin, const Tensor<S>& ct) const {
        Tensor<S> h = conv.forward(ct);  // (hidden, F)
        Tensor<S> pooled = mul_scalar(sum_over_cols(h), S(1) / S(h.dim(1)));  // (hidden, 1)
        return lin.forward(transpose(pooled));  // (1, 1)
    }
};

// Residual vector quantizer: per stage, pick the nearest entry by Euclidean
// distance, subtract, continue. Codebooks live outside the autodiff graph and
// train by EMA; entry 0 of every stage is pinned to zero so a stage can always
// leave the residual unchanged.
template <typename S>
struct Rvq {
    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    using Vec = Eigen::Array<S, Eigen::Dynamic, 1>;

    std::int64_t stages = 0, entries = 0, dim = 0;
    S decay = S(0.99);
    std::vector<Mat> books;      // (entries, dim) per stage
    std::vector<Vec> ema_count;  // (entries) per stage
    std::vector<Mat> ema_sum;    // (entries, dim) per stage

    struct Out {
        std::vector<std::int64_t> codes;  // frame-major, (F * stages)
        Mat recon;                        // (F, dim) sum of chosen entries
        Tensor<S> quantized;              // straight-through wrapper
        std::vector<Mat> stage_inputs;    // residual seen by each stage, for EMA
    };

    Rvq() = default;
    Rvq(std::int64_t stages_, std::int64_t entries_, std::int64_t dim_, Rng& rng)
        : stages(stages_), entries(entries_), dim(dim_) {
        books.resize(static_cast<std::size_t>(stages));
        ema_count.resize(static_cast<std::size_t>(stages));
        ema_sum.resize(static_cast<std::size_t>(stages));
        for (auto& b : books) {
            b.resize(entries, dim);
            for (std::int64_t i = 0; i < entries; ++i)
                for (std::int64_t j = 0; j < dim; ++j)
                    b(i, j) = i == 0 ? S(0) : S(rng.normal()) * S(0.05);
        }
        reset_ema();
    }

    void reset_ema() {
        for (std::size_t s = 0; s < books.size(); ++s) {
            ema_count[s] = Vec::Ones(entries);
            ema_sum[s] = books[s];
        }
    }

    // Nearest entry per frame for one codebook; scores drop the ||r||^2 term
    // shared by all entries.
    void assign_stage(const Mat& residual, const Mat& book, std::vector<std::int64_t>& idx) const {
        Mat scores = residual * book.transpose() * S(-2);
        Vec sq = book.rowwise().squaredNorm();
        scores.rowwise() += sq.matrix().transpose();
        idx.resize(static_cast<std::size_t>(residual.rows()));
        for (std::int64_t f = 0; f < residual.rows(); ++f) {
            Eigen::Index best = 0;
            scores.row(f).minCoeff(&best);
            idx[static_cast<std::size_t>(f)] = best;
        }
    }

    Out quantize(const Tensor<S>& emb) const {
        if (emb.ndim() != 2 || emb.dim(1) != dim)
            throw ContractError("rvq expects (F, " + std::to_string(dim) + "), got " + shape_str(emb.shape()));
        std::int64_t f = emb.dim(0);
        Out out;
        out.codes.resize(static_cast<std::size_t>(f * stages));
        out.stage_inputs.reserve(static_cast<std::size_t>(stages));
        Mat residual(f, dim);
        for (std::int64_t i = 0; i < f; ++i)
            for (std::int64_t j = 0; j < dim; ++j) residual(i, j) = emb.data()[i * dim + j];
        out.recon = Mat::Zero(f, dim);
        std::vector<std::int64_t> idx;
        for (std::int64_t s = 0; s < stages; ++s) {
            out.stage_inputs.push_back(residual);
            assign_stage(residual, books[static_cast<std::size_t>(s)], idx);
            for (std::int64_t i = 0; i < f; ++i) {
                const auto e = books[static_cast<std::size_t>(s)].row(idx[static_cast<std::size_t>(i)]);
                out.recon.row(i) += e;
                residual.row(i) -= e;
                out.codes[static_cast<std::size_t>(i * stages + s)] = idx[static_cast<std::size_t>(i)];
            }
        }
        Tensor<S> hard = Tensor<S>::zeros({f, dim});
        for (std::int64_t i = 0; i < f; ++i)
            for (std::int64_t j = 0; j < dim; ++j) hard.values()[i * dim + j] = out.recon(i, j);
        out.quantized = straight_through(hard, emb);
        return out;
    }

    Mat dequantize(const std::vector<std::int64_t>& codes) const {
        if (codes.size() % static_cast<std::size_t>(stages) != 0)
            throw ContractError("code count not divisible by stage count");
        std::int64_t f = static_cast<std::int64_t>(codes.size()) / stages;
        Mat out = Mat::Zero(f, dim);
        for (std::int64_t i = 0; i < f; ++i)
            for (std::int64_t s = 0; s < stages; ++s) {
                std::int64_t c = codes[static_cast<std::size_t>(i * stages + s)];
                if (c < 0 || c >= entries)
                    throw IndexError("code " + std::to_string(c) + " outside [0, " +
                                     std::to_string(entries) + ") at frame " + std::to_string(i));
                out.row(i) += books[static_cast<std::size_t>(s)].row(c);
            }
        return out;
    }

    // EMA codebook update from one quantized batch; entry 0 stays pinned and
    // entries whose usage decays below 1 are reseeded from the batch.
    void ema_update(const Out& out, Rng& rng) {
        std::int64_t f = out.recon.rows();
        for (std::int64_t s = 0; s < stages; ++s) {
            auto& count = ema_count[static_cast<std::size_t>(s)];
            auto& sum = ema_sum[static_cast<std::size_t>(s)];
            auto& book = books[static_cast<std::size_t>(s)];
            const Mat& input = out.stage_inputs[static_cast<std::size_t>(s)];
            Vec batch_count = Vec::Zero(entries);
            Mat batch_sum = Mat::Zero(entries, dim);
            for (std::int64_t i = 0; i < f; ++i) {
                std::int64_t c = out.codes[static_cast<std::size_t>(i * stages + s)];
                batch_count(c) += S(1);
                batch_sum.row(c) += input.row(i);
            }
            count = decay * count + (S(1) - decay) * batch_count;
            sum = decay * sum + (S(1) - decay) * batch_sum;
            for (std::int64_t e = 1; e < entries; ++e) {
                if (count(e) < S(1)) {
                    std::int64_t pick = rng.randint(f);
                    for (std::int64_t j = 0; j < dim; ++j)
                        book(e, j) = input(pick, j) + S(rng.normal()) * S(1e-3);
                    count(e) = S(1);
                    sum.row(e) = book.row(e);
                } else {
                    book.row(e) = sum.row(e) / count(e);
                }
            }
        }
    }

    // k-means++ seeding per stage on the residual stream of `data`; entry 0
    // stays zero. When data has fewer rows than entries, the remainder is
    // filled with perturbed data rows.
    void kmeans_init(const Mat& data, Rng& rng) {
        Mat residual = data;
        std::vector<std::int64_t> idx;
        for (std::int64_t s = 0; s < stages; ++s) {
            auto& book = books[static_cast<std::size_t>(s)];
            book.row(0).setZero();
            std::int64_t n = residual.rows();
            Vec d2 = residual.rowwise().squaredNorm();
            for (std::int64_t e = 1; e < entries; ++e) {
                double total = static_cast<double>(d2.sum());
                std::int64_t pick;
                if (total <= 0.0) {
                    pick = rng.randint(n);
                    for (std::int64_t j = 0; j < dim; ++j)
                        book(e, j) = residual(pick, j) + S(rng.normal()) * S(1e-3);
                } else {
                    double r = rng.uniform(0.0, total);
                    pick = n - 1;
                    double acc = 0.0;
                    for (std::int64_t i = 0; i < n; ++i) {
                        acc += static_cast<double>(d2(i));
                        if (acc >= r) { pick = i; break; }
                    }
                    book.row(e) = residual.row(pick);
                }
                d2 = d2.min((residual.rowwise() - book.row(e)).rowwise().squaredNorm().array());
            }
            assign_stage(residual, book, idx);
            for (std::int64_t i = 0; i < n; ++i)
                residual.row(i) -= book.row(idx[static_cast<std::size_t>(i)]);
        }
        reset_ema();
    }
};

// Transposed-convolution upsampling block mirroring EncBlock. The two
// highest-rate blocks skip the residual refinement to keep decode affordable.
template <typename S>
struct DecBlock {
    ConvT1dLayer<S> up;
    Conv1dLayer<S> res;
    bool has_res = true;

    DecBlock() = default;
    DecBlock(std::int64_t cin, std::int64_t cout, std::int64_t stride, Rng& rng, bool has_res_ = true)
        : up(cin, cout, detail::kernel_for(stride), stride, detail::pad_for(stride), rng),
          has_res(has_res_) {
        if (has_res) res = Conv1dLayer<S>(cout, cout, 3, 1, 1, rng);
    }

    Tensor<S> forward(const Tensor<S>& x) const {
        Tensor<S> h = elu(up.forward(x));
        return has_res ? elu(add(h, res.forward(h))) : h;
    }
    void params(std::vector<Tensor<S>>& out) const {
        up.params(out);
        if (has_res) res.params(out);
    }
    void named_params(const std::string& p, std::vector<std::pair<std::string, Tensor<S>>>& out) const {
        out.emplace_back(p + ".up.w", up.w); out.emplace_back(p + ".up.b", up.b);
        if (has_res) { out.emplace_back(p + ".res.w", res.w); out.emplace_back(p + ".res.b", res.b); }
    }
};

// Mirror of the encoder: (F, codec_dim) rows -> (1, F*320) waveform, linear
// output (export clamping happens at the WAV boundary, not in the graph).
template <typename S>
struct Decoder {
    DecBlock<S> u1, u2, u3, u4;
    Conv1dLayer<S> head;

    Decoder() = default;
    Decoder(const CodecDims& d, Rng& rng)
        : u1(d.codec_dim, d.dec1, 8, rng, true),
          u2(d.dec1, d.dec2, 5, rng, true),
          u3(d.dec2, d.dec3, 4, rng, false),
          u4(d.dec3, d.dec4, 2, rng, false),
          head(d.dec4, 1, 3, 1, 1, rng) {}

    Tensor<S> forward(const Tensor<S>& emb) const {
        if (emb.ndim() != 2)
            throw ContractError("decoder expects (F, D) embeddings, got " + shape_str(emb.shape()));
        Tensor<S> ct = transpose(emb);
        return head.forward(u4.forward(u3.forward(u2.forward(u1.forward(ct)))));
    }
    void params(std::vector<Tensor<S>>& out) const {
        u1.params(out); u2.params(out); u3.params(out); u4.params(out); head.params(out);
    }
    void named_params(const std::string& p, std::vector<std::pair<std::string, Tensor<S>>>& out) const {
        u1.named_params(p + ".u1", out); u2.named_params(p + ".u2", out);
        u3.named_params(p + ".u3", out); u4.named_params(p + ".u4", out);
        out.emplace_back(p + ".head.w", head.w); out.emplace_back(p + ".head.b", head.b);
    }

    void copy_params_from(const Decoder& other) {
        std::vector<Tensor<S>> mine, theirs;
        params(mine);
        other.params(theirs);
        for (std::size_t i = 0; i < mine.size(); ++i) mine[i].values() = theirs[i].values();
    }
};

template <typename S>
Tensor<S> wave_tensor(const std::vector<float>& samples, bool requires_grad = false) {
    Tensor<S> t = Tensor<S>::zeros({1, static_cast<std::int64_t>(samples.size())}, requires_grad);
    for (std::size_t i = 0; i < samples.size(); ++i) t.values()[static_cast<std::int64_t>(i)] = S(samples[i]);
    return t;
}

// The prosody-aware encoder stack plus quantizer and decoder.
template <typename S>
struct PaceModel {
    CodecDims dims;
    Stage1Encoder<S> enc1;
    EmbeddingTable<S> f0_table, uv_table;  // vocab 256 / 2, width frame_dim
    Stage2Encoder<S> enc2;
    ScaleLayer<S> scale;
    bool use_scale = true;  // ablation switch: bypass the scale layer entirely
    Rvq<S> rvq;
    Decoder<S> dec;

    PaceModel() = default;
    PaceModel(const CodecDims& d, Rng& rng)
        : dims(d),
          enc1(d, rng),
          f0_table(kF0Bins, d.frame_dim, rng),
          uv_table(2, d.frame_dim, rng),
          enc2(d, rng),
          scale(d, rng),
          rvq(d.rvq_stages, d.rvq_entries, d.codec_dim, rng),
          dec(d, rng) {}

    // e^f: (L/40, frame_dim).
    Tensor<S> encode_frames(const Tensor<S>& wave) const { return enc1.forward(wave); }

    // Elementwise sum; all three inputs share (F, frame_dim).
    static Tensor<S> fuse_prosody(const Tensor<S>& e_f, const Tensor<S>& e_f0, const Tensor<S>& e_uv) {
        if (e_f.shape() != e_f0.shape() || e_f.shape() != e_uv.shape())
            throw ContractError("prosody fusion shape mismatch: " + shape_str(e_f.shape()) + " vs " +
                                shape_str(e_f0.shape()) + " vs " + shape_str(e_uv.shape()));
        return add(add(e_f, e_f0), e_uv);
    }

    Tensor<S> encode_codec(const Tensor<S>& fused) const { return enc2.forward(fused); }
    Tensor<S> apply_scale(const Tensor<S>& pre) const { return use_scale ? scale.forward(pre) : pre; }

    struct Forward {
        Tensor<S> e_f;      // (F, frame_dim)
        Tensor<S> e_hat;    // (F/8, codec_dim), scaled
        typename Rvq<S>::Out q;
    };

    // Full encoder path with prosody re-injection. Prosody features must carry
    // exactly L/40 frames.
    Forward encode(const Tensor<S>& wave, const ProsodyFeatures& f) const {
        Forward out;
        out.e_f = encode_frames(wave);
        auto [e_f0, e_uv] = embed_prosody(f0_table, uv_table, f);
        Tensor<S> fused = fuse_prosody(out.e_f, e_f0, e_uv);
        out.e_hat = apply_scale(encode_codec(fused));
        out.q = rvq.quantize(out.e_hat);
        return out;
    }

    // Stage-1 path: no prosody input at all.
    Forward encode_no_prosody(const Tensor<S>& wave) const {
        Forward out;
        out.e_f = encode_frames(wave);
        out.e_hat = apply_scale(encode_codec(out.e_f));
        out.q = rvq.quantize(out.e_hat);
        return out;
    }

    Tensor<S> decode(const Tensor<S>& emb) const { return dec.forward(emb); }

    void generator_params(std::vector<Tensor<S>>& out) const {
        enc1.params(out); f0_table.params(out); uv_table.params(out);
        enc2.params(out); scale.params(out); dec.params(out);
    }
    void named_params(std::vector<std::pair<std::string, Tensor<S>>>& out) const {
        enc1.named_params("enc1", out);
        out.emplace_back("emb.f0", f0_table.table);
        out.emplace_back("emb.uv", uv_table.table);
        enc2.named_params("enc2", out);
        scale.named_params("scale", out);
        dec.named_params("dec", out);
    }
};

// Plainly trained codec (no prosody path, no scale layer): the frozen producer
// of reference embeddings e^c and the decoder warm start.
template <typename S>
struct ReferenceCodec {
    CodecDims dims;
    Stage1Encoder<S> enc1;
    Stage2Encoder<S> enc2;
    Rvq<S> rvq;
    Decoder<S> dec;

    ReferenceCodec() = default;
    ReferenceCodec(const CodecDims& d, Rng& rng)
        : dims(d), enc1(d, rng), enc2(d, rng), rvq(d.rvq_stages, d.rvq_entries, d.codec_dim, rng), dec(d, rng) {}

    // e^c: (L/320, codec_dim).
    Tensor<S> encode(const Tensor<S>& wave) const { return enc2.forward(enc1.forward(wave)); }
    Tensor<S> decode(const Tensor<S>& emb) const { return dec.forward(emb); }

    void params(std::vector<Tensor<S>>& out) const {
        enc1.params(out); enc2.params(out); dec.params(out);
    }
    void named_params(std::vector<std::pair<std::string, Tensor<S>>>& out) const {
        enc1.named_params("enc1", out);
        enc2.named_params("enc2", out);
        dec.named_params("dec", out);
    }
};

}  // namespace pace
