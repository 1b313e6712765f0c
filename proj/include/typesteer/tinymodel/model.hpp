#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "typesteer/util/rng.hpp"

namespace typesteer::tinymodel {

struct ModelConfig {
    int nLayers = 8;
    int dModel = 192;
    int nHeads = 6;
    int ctxLen = 512;
    int vocabSize = 0;  // set from the token table
    uint64_t seed = 42;
    double learningRate = 3e-4;
    int batchSize = 4;
    int epochs = 6;
    double weightDecay = 0.1;
    // Small batches need a shorter second-moment horizon to adapt quickly.
    double adamBeta2 = 0.99;
};

struct ContextOverflow : std::runtime_error { using std::runtime_error::runtime_error; };
struct BadLayer : std::runtime_error { using std::runtime_error::runtime_error; };
struct BadShape : std::runtime_error { using std::runtime_error::runtime_error; };
struct NonFiniteLoss : std::runtime_error { using std::runtime_error::runtime_error; };

// Decoder-only pre-norm transformer with learned absolute positions, GELU
// MLP (4x), and embedding/output weight tying. Templated on the scalar so
// gradients can be finite-difference-checked in double precision.
template <typename Scalar>
class ModelT {
public:
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    struct Param {
        std::string name;
        Mat w, m, v;  // value + AdamW moments
        bool decay = false;
    };

    // One loss specification per sequence: positions i in [predBegin,
    // predEnd) predict tokens[i+1]. Language modelling uses (0, len-1).
    struct LossRange {
        int predBegin = 0;
        int predEnd = 0;
    };

    explicit ModelT(const ModelConfig& cfg) : cfg_(cfg) {
        if (cfg.dModel % cfg.nHeads != 0) throw BadShape("dModel must divide by nHeads");
        if (cfg.vocabSize <= 0) throw BadShape("vocabSize unset");
        Rng rng(cfg.seed);
        auto normal = [&](Mat& mat, double sd) {
            for (Eigen::Index j = 0; j < mat.cols(); ++j) {
                for (Eigen::Index i = 0; i < mat.rows(); ++i) {
                    mat(i, j) = static_cast<Scalar>(rng.normal() * sd);
                }
            }
        };
        const int d = cfg.dModel;
        const double residSd = 0.02 / std::sqrt(2.0 * cfg.nLayers);

        auto add = [&](const std::string& name, int rows, int cols, bool decay,
                       double sd) -> Mat& {
            Param p;
            p.name = name;
            p.w = Mat::Zero(rows, cols);
            if (sd > 0) normal(p.w, sd);
            p.m = Mat::Zero(rows, cols);
            p.v = Mat::Zero(rows, cols);
            p.decay = decay;
            params_.push_back(std::move(p));
            return params_.back().w;
        };

        add("tokEmb", cfg.vocabSize, d, false, 0.02);
        add("posEmb", cfg.ctxLen, d, false, 0.02);
        for (int l = 0; l < cfg.nLayers; ++l) {
            std::string p = "L" + std::to_string(l) + ".";
            add(p + "ln1g", 1, d, false, 0).setOnes();
            add(p + "ln1b", 1, d, false, 0);
            add(p + "wqkv", d, 3 * d, true, 0.02);
            add(p + "bqkv", 1, 3 * d, false, 0);
            add(p + "wo", d, d, true, residSd);
            add(p + "bo", 1, d, false, 0);
            add(p + "ln2g", 1, d, false, 0).setOnes();
            add(p + "ln2b", 1, d, false, 0);
            add(p + "w1", d, 4 * d, true, 0.02);
            add(p + "b1", 1, 4 * d, false, 0);
            add(p + "w2", 4 * d, d, true, residSd);
            add(p + "b2", 1, d, false, 0);
        }
        add("lnfg", 1, d, false, 0).setOnes();
        add("lnfb", 1, d, false, 0);

        index_.clear();
        for (size_t i = 0; i < params_.size(); ++i) index_[params_[i].name] = i;
    }

    const ModelConfig& config() const { return cfg_; }
    long long step() const { return step_; }
    void set_step(long long s) { step_ = s; }
    std::vector<Param>& params() { return params_; }
    const std::vector<Param>& params() const { return params_; }
    Mat& param(const std::string& name) { return params_[index_.at(name)].w; }
    const Mat& param(const std::string& name) const { return params_[index_.at(name)].w; }

    // ---------------------------------------------------------------- forward

    // Residual-stream capture: taps[pos][l] is the stream at `pos` right
    // after block l (the value block l+1 reads). Patches are added at
    // `patchPosition` immediately after the patched block's output.
    Mat hidden_final(const std::vector<int>& tokens,
                     const std::map<int, Vec>* patches = nullptr, int patchPosition = -1,
                     std::map<int, std::vector<Vec>>* taps = nullptr) const {
        Mat x = embed(tokens);
        validate_patches(patches);
        for (int l = 0; l < cfg_.nLayers; ++l) {
            block_forward(l, x, nullptr);
            if (patches && patchPosition >= 0) {
                auto it = patches->find(l);
                if (it != patches->end()) x.row(patchPosition) += it->second.transpose();
            }
            if (taps) {
                for (auto& [pos, layers] : *taps) layers.push_back(x.row(pos).transpose());
            }
        }
        return x;
    }

    Mat all_logits(const std::vector<int>& tokens,
                   const std::map<int, Vec>* patches = nullptr, int patchPosition = -1,
                   std::map<int, std::vector<Vec>>* taps = nullptr) const {
        Mat x = hidden_final(tokens, patches, patchPosition, taps);
        Mat f = layer_norm(x, param("lnfg"), param("lnfb"));
        return f * param("tokEmb").transpose();
    }

    Vec logits_last(const std::vector<int>& tokens,
                    const std::map<int, Vec>* patches = nullptr, int patchPosition = -1,
                    std::map<int, std::vector<Vec>>* taps = nullptr) const {
        Mat x = hidden_final(tokens, patches, patchPosition, taps);
        Mat last = layer_norm(x.bottomRows(1), param("lnfg"), param("lnfb"));
        return (last * param("tokEmb").transpose()).row(0).transpose();
    }

    // Greedy argmax decoding. Patches are re-applied at the current last
    // position every step. Stops at <eos> (not emitted) or once `stop`
    // returns true on the emitted tokens; eosId < 0 disables eos handling.
    std::vector<int> generate_greedy(
        const std::vector<int>& prompt, const std::map<int, Vec>* patches, int maxNew,
        int eosId, const std::function<bool(const std::vector<int>&)>& stop) const {
        std::vector<int> seq = prompt;
        std::vector<int> out;
        for (int i = 0; i < maxNew; ++i) {
            if (static_cast<int>(seq.size()) >= cfg_.ctxLen) {
                throw ContextOverflow("no headroom for generation");
            }
            Vec lg = logits_last(seq, patches, static_cast<int>(seq.size()) - 1);
            int best = 0;
            lg.maxCoeff(&best);
            if (best == eosId) break;
            out.push_back(best);
            seq.push_back(best);
            if (stop && stop(out)) break;
        }
        return out;
    }

    // ---------------------------------------------------------------- training

    // Mean next-token cross-entropy over the counted positions.
    double loss_only(const std::vector<std::vector<int>>& seqs,
                     const std::vector<LossRange>& ranges) const {
        double total = 0.0;
        long long count = 0;
        for (size_t i = 0; i < seqs.size(); ++i) {
            accumulate_loss(seqs[i], ranges[i], total, count, nullptr);
        }
        return count ? total / count : 0.0;
    }

    // Computes mean-loss gradients into `grads` (aligned with params()).
    double compute_gradients(const std::vector<std::vector<int>>& seqs,
                             const std::vector<LossRange>& ranges,
                             std::vector<Mat>& grads, int nThreads = 1) const {
        grads.resize(params_.size());
        for (size_t i = 0; i < params_.size(); ++i) {
            grads[i] = Mat::Zero(params_[i].w.rows(), params_[i].w.cols());
        }
        long long count = 0;
        for (size_t i = 0; i < seqs.size(); ++i) {
            count += std::max(0, std::min<int>(ranges[i].predEnd,
                                               static_cast<int>(seqs[i].size()) - 1) -
                                     std::max(0, ranges[i].predBegin));
        }
        if (count == 0) return 0.0;

        double total = 0.0;
        if (nThreads <= 1 || seqs.size() == 1) {
            long long dummy = 0;
            for (size_t i = 0; i < seqs.size(); ++i) {
                accumulate_loss(seqs[i], ranges[i], total, dummy, &grads, 1.0 / count);
            }
        } else {
            int nt = std::min<int>(nThreads, static_cast<int>(seqs.size()));
            std::vector<std::vector<Mat>> shardGrads(nt);
            std::vector<double> shardLoss(nt, 0.0);
            std::vector<std::thread> workers;
            for (int t = 0; t < nt; ++t) {
                workers.emplace_back([&, t]() {
                    auto& g = shardGrads[t];
                    g.resize(params_.size());
                    for (size_t i = 0; i < params_.size(); ++i) {
                        g[i] = Mat::Zero(params_[i].w.rows(), params_[i].w.cols());
                    }
                    long long dummy = 0;
                    for (size_t i = t; i < seqs.size(); i += nt) {
                        accumulate_loss(seqs[i], ranges[i], shardLoss[t], dummy, &g, 1.0 / count);
                    }
                });
            }
            for (auto& w : workers) w.join();
            // Deterministic reduction: fixed shard order.
            for (int t = 0; t < nt; ++t) {
                total += shardLoss[t];
                for (size_t i = 0; i < params_.size(); ++i) grads[i] += shardGrads[t][i];
            }
        }
        return total / count;
    }

    // One AdamW step over the batch; returns the batch loss.
    double train_batch(const std::vector<std::vector<int>>& seqs,
                       const std::vector<LossRange>& ranges, double lr, double weightDecay,
                       int nThreads = 1) {
        std::vector<Mat> grads;
        double loss = compute_gradients(seqs, ranges, grads, nThreads);
        if (!std::isfinite(loss)) {
            throw NonFiniteLoss("loss is not finite at step " + std::to_string(step_));
        }
        ++step_;
        const double b1 = 0.9, b2 = cfg_.adamBeta2, eps = 1e-8;
        const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_));
        const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_));
        for (size_t i = 0; i < params_.size(); ++i) {
            Param& p = params_[i];
            p.m = static_cast<Scalar>(b1) * p.m + static_cast<Scalar>(1 - b1) * grads[i];
            p.v = static_cast<Scalar>(b2) * p.v +
                  static_cast<Scalar>(1 - b2) * grads[i].cwiseProduct(grads[i]).eval();
            Mat mhat = p.m / static_cast<Scalar>(bc1);
            Mat vhat = p.v / static_cast<Scalar>(bc2);
            if (p.decay) p.w -= static_cast<Scalar>(lr * weightDecay) * p.w;
            p.w -= static_cast<Scalar>(lr) *
                   mhat.cwiseQuotient((vhat.cwiseSqrt().array() + static_cast<Scalar>(eps))
                                          .matrix());
        }
        return loss;
    }

private:
    ModelConfig cfg_;
    std::vector<Param> params_;
    std::map<std::string, size_t> index_;
    long long step_ = 0;

    // ------------------------------------------------------------- primitives

    static Mat layer_norm(const Mat& x, const Mat& g, const Mat& b) {
        const Scalar eps = static_cast<Scalar>(1e-5);
        Mat out(x.rows(), x.cols());
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            Scalar mu = x.row(i).mean();
            Scalar var = (x.row(i).array() - mu).square().mean();
            Scalar inv = Scalar(1) / std::sqrt(var + eps);
            out.row(i) =
                ((x.row(i).array() - mu) * inv) * g.row(0).array() + b.row(0).array();
        }
        return out;
    }

    static Scalar gelu1(Scalar x) {
        return Scalar(0.5) * x * (Scalar(1) + std::erf(x * Scalar(M_SQRT1_2)));
    }
    static Scalar gelu1_grad(Scalar x) {
        Scalar phi = std::exp(Scalar(-0.5) * x * x) *
                     Scalar(0.3989422804014326779399460599343);
        return Scalar(0.5) * (Scalar(1) + std::erf(x * Scalar(M_SQRT1_2))) + x * phi;
    }

    Mat embed(const std::vector<int>& tokens) const {
        const int T = static_cast<int>(tokens.size());
        if (T == 0) throw BadShape("empty token sequence");
        if (T > cfg_.ctxLen) throw ContextOverflow("sequence exceeds context length");
        const Mat& te = param("tokEmb");
        const Mat& pe = param("posEmb");
        Mat x(T, cfg_.dModel);
        for (int i = 0; i < T; ++i) {
            if (tokens[i] < 0 || tokens[i] >= cfg_.vocabSize) throw BadShape("token id range");
            x.row(i) = te.row(tokens[i]) + pe.row(i);
        }
        return x;
    }

    void validate_patches(const std::map<int, Vec>* patches) const {
        if (!patches) return;
        for (const auto& [l, v] : *patches) {
            if (l < 0 || l >= cfg_.nLayers) throw BadLayer("patch layer out of range");
            if (v.size() != cfg_.dModel) throw BadShape("patch vector length");
        }
    }

    struct BlockCache {
        Mat xin, a, qkv, attOut, xmid, b, h1, gelu;
        std::vector<Mat> probs;  // per head, T x T
    };

    // Applies block l to x in place; fills the cache when given.
    void block_forward(int l, Mat& x, BlockCache* cache) const {
        const std::string p = "L" + std::to_string(l) + ".";
        const int T = static_cast<int>(x.rows());
        const int d = cfg_.dModel;
        const int H = cfg_.nHeads;
        const int dh = d / H;
        const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));

        if (cache) cache->xin = x;
        Mat a = layer_norm(x, param(p + "ln1g"), param(p + "ln1b"));
        Mat qkv = (a * param(p + "wqkv")).rowwise() + param(p + "bqkv").row(0);
        Mat attOut(T, d);
        if (cache) {
            cache->a = a;
            cache->qkv = qkv;
            cache->probs.assign(H, Mat());
        }
        for (int h = 0; h < H; ++h) {
            auto Q = qkv.middleCols(h * dh, dh);
            auto K = qkv.middleCols(d + h * dh, dh);
            auto V = qkv.middleCols(2 * d + h * dh, dh);
            Mat scores = (Q * K.transpose()) * scale;
            Mat probs(T, T);
            for (int i = 0; i < T; ++i) {
                Scalar mx = scores.row(i).head(i + 1).maxCoeff();
                Eigen::Array<Scalar, 1, Eigen::Dynamic> e =
                    (scores.row(i).head(i + 1).array() - mx).exp();
                Scalar z = e.sum();
                probs.row(i).setZero();
                probs.row(i).head(i + 1) = (e / z).matrix();
            }
            attOut.middleCols(h * dh, dh) = probs * V;
            if (cache) cache->probs[h] = std::move(probs);
        }
        if (cache) cache->attOut = attOut;
        x += ((attOut * param(p + "wo")).rowwise() + param(p + "bo").row(0)).eval();
        if (cache) cache->xmid = x;

        Mat b = layer_norm(x, param(p + "ln2g"), param(p + "ln2b"));
        Mat h1 = (b * param(p + "w1")).rowwise() + param(p + "b1").row(0);
        Mat g = h1.unaryExpr([](Scalar v) { return gelu1(v); });
        if (cache) {
            cache->b = b;
            cache->h1 = h1;
            cache->gelu = g;
        }
        x += ((g * param(p + "w2")).rowwise() + param(p + "b2").row(0)).eval();
    }

    static void layer_norm_backward(const Mat& xin, const Mat& g, const Mat& dy, Mat& dx,
                                    Mat& dg, Mat& db) {
        const Scalar eps = static_cast<Scalar>(1e-5);
        const Eigen::Index D = xin.cols();
        dx.resize(xin.rows(), D);
        for (Eigen::Index i = 0; i < xin.rows(); ++i) {
            Scalar mu = xin.row(i).mean();
            Scalar var = (xin.row(i).array() - mu).square().mean();
            Scalar inv = Scalar(1) / std::sqrt(var + eps);
            Eigen::Array<Scalar, 1, Eigen::Dynamic> xhat = (xin.row(i).array() - mu) * inv;
            Eigen::Array<Scalar, 1, Eigen::Dynamic> dyg = dy.row(i).array() * g.row(0).array();
            Scalar m1 = dyg.mean();
            Scalar m2 = (dyg * xhat).mean();
            dx.row(i) = (inv * (dyg - m1 - xhat * m2)).matrix();
            dg.row(0).array() += dy.row(i).array() * xhat;
            db.row(0).array() += dy.row(i).array();
        }
    }

    size_t idx(const std::string& name) const { return index_.at(name); }

    // Forward + (optionally) backward for one sequence. Adds `weight`-scaled
    // gradients of the summed token losses into `grads`.
    void accumulate_loss(const std::vector<int>& tokens, const LossRange& range,
                         double& totalLoss, long long& count, std::vector<Mat>* grads,
                         double weight = 0.0) const {
        const int T = static_cast<int>(tokens.size());
        const int d = cfg_.dModel;
        int predBegin = std::max(0, range.predBegin);
        int predEnd = std::min(range.predEnd, T - 1);
        if (predBegin >= predEnd) return;

        Mat x = embed(tokens);
        std::vector<BlockCache> caches(grads ? cfg_.nLayers : 0);
        Mat x0;
        if (grads) x0 = x;
        for (int l = 0; l < cfg_.nLayers; ++l) {
            block_forward(l, x, grads ? &caches[l] : nullptr);
        }
        Mat xf = x;
        Mat f = layer_norm(x, param("lnfg"), param("lnfb"));
        Mat logits = f * param("tokEmb").transpose();

        // Per-position softmax cross-entropy; dLogits built only when needed.
        Mat dlogits;
        if (grads) dlogits = Mat::Zero(T, cfg_.vocabSize);
        for (int i = predBegin; i < predEnd; ++i) {
            int target = tokens[i + 1];
            Scalar mx = logits.row(i).maxCoeff();
            Eigen::Array<Scalar, 1, Eigen::Dynamic> e = (logits.row(i).array() - mx).exp();
            Scalar z = e.sum();
            totalLoss += static_cast<double>(-(logits(i, target) - mx) + std::log(z));
            ++count;
            if (grads) {
                dlogits.row(i) = (e / z).matrix() * static_cast<Scalar>(weight);
                dlogits(i, target) -= static_cast<Scalar>(weight);
            }
        }
        if (!grads) return;

        std::vector<Mat>& G = *grads;
        // Tied output projection: logits = f * tokEmb^T.
        Mat df = dlogits * param("tokEmb");
        G[idx("tokEmb")] += dlogits.transpose() * f;

        Mat dx;
        layer_norm_backward(xf, param("lnfg"), df, dx, G[idx("lnfg")], G[idx("lnfb")]);

        const int H = cfg_.nHeads;
        const int dh = d / H;
        const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));
        for (int l = cfg_.nLayers - 1; l >= 0; --l) {
            const std::string p = "L" + std::to_string(l) + ".";
            BlockCache& c = caches[l];

            // MLP branch: x = xmid + gelu(ln2(xmid) w1 + b1) w2 + b2.
            Mat dgelu = dx * param(p + "w2").transpose();
            G[idx(p + "w2")] += c.gelu.transpose() * dx;
            G[idx(p + "b2")] += dx.colwise().sum();
            Mat dh1 = dgelu.array() * c.h1.unaryExpr([](Scalar v) { return gelu1_grad(v); }).array();
            Mat db_ = dh1 * param(p + "w1").transpose();
            G[idx(p + "w1")] += c.b.transpose() * dh1;
            G[idx(p + "b1")] += dh1.colwise().sum();
            Mat dxmid;
            layer_norm_backward(c.xmid, param(p + "ln2g"), db_, dxmid, G[idx(p + "ln2g")],
                                G[idx(p + "ln2b")]);
            dxmid += dx;  // residual

            // Attention branch: xmid = xin + (attOut wo + bo).
            Mat dattOut = dxmid * param(p + "wo").transpose();
            G[idx(p + "wo")] += c.attOut.transpose() * dxmid;
            G[idx(p + "bo")] += dxmid.colwise().sum();

            Mat dqkv = Mat::Zero(T, 3 * d);
            for (int h = 0; h < H; ++h) {
                auto Q = c.qkv.middleCols(h * dh, dh);
                auto K = c.qkv.middleCols(d + h * dh, dh);
                auto V = c.qkv.middleCols(2 * d + h * dh, dh);
                const Mat& P = c.probs[h];
                auto dO = dattOut.middleCols(h * dh, dh);
                dqkv.middleCols(2 * d + h * dh, dh) += P.transpose() * dO;  // dV
                Mat dP = dO * V.transpose();
                Mat dS = (dP.array() - (dP.array() * P.array())
                                           .rowwise()
                                           .sum()
                                           .replicate(1, T)) *
                         P.array();
                dqkv.middleCols(h * dh, dh) += (dS * K) * scale;             // dQ
                dqkv.middleCols(d + h * dh, dh) += (dS.transpose() * Q) * scale;  // dK
            }
            Mat da = dqkv * param(p + "wqkv").transpose();
            G[idx(p + "wqkv")] += c.a.transpose() * dqkv;
            G[idx(p + "bqkv")] += dqkv.colwise().sum();
            Mat dxin;
            layer_norm_backward(c.xin, param(p + "ln1g"), da, dxin, G[idx(p + "ln1g")],
                                G[idx(p + "ln1b")]);
            dx = dxmid + dxin;
        }

        // Embedding rows (input side) and positions.
        Mat& dte = G[idx("tokEmb")];
        Mat& dpe = G[idx("posEmb")];
        for (int i = 0; i < T; ++i) {
            dte.row(tokens[i]) += dx.row(i);
            dpe.row(i) += dx.row(i);
        }
    }
};

using Model = ModelT<float>;

}  // namespace typesteer::tinymodel
