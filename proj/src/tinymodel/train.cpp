#include "typesteer/tinymodel/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "typesteer/tinymodel/fim.hpp"
#include "typesteer/tinymodel/token_table.hpp"

namespace typesteer::tinymodel {

Model train_model(const std::vector<std::vector<int>>& seqs, const TrainOptions& opt,
                  std::ostream* log) {
    if (seqs.empty()) throw BadShape("empty training corpus");
    ModelConfig cfg = opt.cfg;
    if (cfg.vocabSize <= 0) cfg.vocabSize = TokenTable::instance().size();
    Model model(cfg);
    Rng root(cfg.seed ^ 0x7261696eull);  // independent of init stream

    // FIM adds at most 4 tokens (3 sentinels + eos).
    std::vector<size_t> usable;
    for (size_t i = 0; i < seqs.size(); ++i) {
        if (static_cast<int>(seqs[i].size()) + 4 <= cfg.ctxLen && seqs[i].size() >= 3) {
            usable.push_back(i);
        }
    }
    if (log && usable.size() != seqs.size()) {
        *log << "dropped " << (seqs.size() - usable.size()) << " of " << seqs.size()
             << " sequences (too long or too short)\n";
    }
    if (usable.empty()) throw BadShape("no usable training sequences");

    std::vector<size_t> anchoredUsable;
    for (size_t i = 0; i < opt.anchored.size(); ++i) {
        if (static_cast<int>(opt.anchored[i].tokens.size()) <= cfg.ctxLen) {
            anchoredUsable.push_back(i);
        }
    }

    // Linear warmup into cosine decay; the configured rate is the peak.
    const long long corpusBatches =
        (static_cast<long long>(usable.size()) + cfg.batchSize - 1) / cfg.batchSize;
    const long long stepsPerEpoch = anchoredUsable.empty() ? corpusBatches : 2 * corpusBatches;
    const long long totalSteps = stepsPerEpoch * cfg.epochs;
    const long long warmup = std::min<long long>(200, std::max<long long>(1, totalSteps / 20));
    const double lrMin = cfg.learningRate / 10.0;
    const int fimMiddle = TokenTable::instance().fimMiddle();
    constexpr size_t kMiddleWindow = 8;
    long long step = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng epochRng = root.child(static_cast<uint64_t>(epoch));
        std::vector<size_t> order = usable;
        epochRng.shuffle(order);
        // One Bernoulli(fimRate) roll per batch, not per item: the loss on a
        // FIM item is restricted to a few positions, but train_batch averages
        // the gradient over all counted positions in the batch, so a windowed
        // FIM item next to full-loss plain items would be diluted to near
        // nothing. Homogeneous batches keep the infill gradient undiluted
        // while the item-level FIM fraction still averages fimRate.
        Rng batchRng = epochRng.child(0x62617463ull);
        Rng anchorRng = epochRng.child(0x616e6368ull);
        double running = 0.0;
        int steps = 0;
        auto lrNow = [&]() {
            if (step < warmup) return cfg.learningRate * static_cast<double>(step + 1) / warmup;
            double frac = static_cast<double>(step - warmup) /
                          std::max<long long>(1, totalSteps - warmup);
            return lrMin + 0.5 * (cfg.learningRate - lrMin) * (1.0 + std::cos(M_PI * frac));
        };
        auto runBatch = [&](const std::vector<std::vector<int>>& batch,
                            const std::vector<Model::LossRange>& ranges) {
            double lr = lrNow();
            ++step;
            running += model.train_batch(batch, ranges, lr, cfg.weightDecay, opt.nThreads);
            ++steps;
            if (log && opt.logEvery > 0 && steps % opt.logEvery == 0) {
                *log << "epoch " << epoch << " step " << steps << " loss "
                     << running / opt.logEvery << "\n";
                log->flush();
                running = 0.0;
            }
        };
        for (size_t at = 0; at < order.size(); at += cfg.batchSize) {
            size_t end = std::min(order.size(), at + cfg.batchSize);
            double batchRate = batchRng.bernoulli(opt.fimRate) ? 1.0 : 0.0;
            std::vector<std::vector<int>> batch;
            std::vector<Model::LossRange> ranges;
            for (size_t k = at; k < end; ++k) {
                Rng itemRng = epochRng.child(order[k] + 1);
                std::vector<int> t = fim_transform(seqs[order[k]], itemRng, batchRate);
                // FIM items take loss on the first few tokens after the
                // <fim_middle> sentinel only: the infill signal is a tiny
                // fraction of the plain next-token loss, and concentrating on
                // it is what makes infilling emerge at this scale. Tokens past
                // the window cannot influence those loss positions (causal
                // attention), so the sequence is truncated there. Plain items
                // keep the full-sequence loss.
                int predBegin = 0;
                for (size_t j = 0; j < t.size(); ++j) {
                    if (t[j] == fimMiddle) {
                        predBegin = static_cast<int>(j);
                        break;
                    }
                }
                if (predBegin > 0) {
                    size_t keep = static_cast<size_t>(predBegin) + 1 + kMiddleWindow;
                    if (t.size() > keep) t.resize(keep);
                }
                ranges.push_back({predBegin, static_cast<int>(t.size()) - 1});
                batch.push_back(std::move(t));
            }
            runBatch(batch, ranges);
            if (!anchoredUsable.empty()) {
                batch.clear();
                ranges.clear();
                for (size_t k = at; k < end; ++k) {
                    const AnchoredItem& it =
                        opt.anchored[anchoredUsable[anchorRng.below(anchoredUsable.size())]];
                    batch.push_back(it.tokens);
                    ranges.push_back({it.lossBegin, static_cast<int>(it.tokens.size()) - 1});
                }
                runBatch(batch, ranges);
            }
        }
        if (log) *log << "epoch " << epoch << " done (" << steps << " steps)\n";
    }
    return model;
}

Model fine_tune(const Model& start, const std::vector<FinetunePair>& data, double lr,
                double weightDecay, int epochs, int batchSize, std::ostream* log,
                const std::function<void(int, const Model&)>& onEpoch) {
    if (data.empty()) throw BadShape("empty fine-tuning dataset");
    Model model = start;
    const TokenTable& tt = TokenTable::instance();
    Rng root(start.config().seed ^ 0x66696e65ull);

    std::vector<std::vector<int>> seqs;
    std::vector<Model::LossRange> ranges;
    for (const auto& pr : data) {
        std::vector<int> s = pr.prompt;
        s.insert(s.end(), pr.expected.begin(), pr.expected.end());
        s.push_back(tt.eos());
        ranges.push_back({static_cast<int>(pr.prompt.size()) - 1,
                          static_cast<int>(s.size()) - 1});
        seqs.push_back(std::move(s));
    }

    for (int epoch = 0; epoch < epochs; ++epoch) {
        Rng epochRng = root.child(static_cast<uint64_t>(epoch));
        std::vector<size_t> order(seqs.size());
        std::iota(order.begin(), order.end(), 0);
        epochRng.shuffle(order);
        double total = 0.0;
        int steps = 0;
        for (size_t at = 0; at < order.size(); at += batchSize) {
            size_t end = std::min(order.size(), at + batchSize);
            std::vector<std::vector<int>> batch;
            std::vector<Model::LossRange> br;
            for (size_t k = at; k < end; ++k) {
                batch.push_back(seqs[order[k]]);
                br.push_back(ranges[order[k]]);
            }
            total += model.train_batch(batch, br, lr, weightDecay);
            ++steps;
        }
        if (log) *log << "finetune epoch " << epoch << " mean loss " << total / steps << "\n";
        if (onEpoch) onEpoch(epoch, model);
    }
    return model;
}

}  // namespace typesteer::tinymodel
