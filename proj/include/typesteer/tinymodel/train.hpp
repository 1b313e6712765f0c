#pragma once

#include <iosfwd>

#include "typesteer/tinymodel/model.hpp"

namespace typesteer::tinymodel {

// A pre-built training item whose loss is restricted to a suffix of the
// sequence: positions [lossBegin, size-1) count. Used for FIM samples cut at
// chosen positions (e.g. type-annotation sites) rather than uniform ones.
struct AnchoredItem {
    std::vector<int> tokens;
    int lossBegin = 0;
};

struct TrainOptions {
    ModelConfig cfg;
    double fimRate = 0.5;
    int nThreads = 1;  // >1 shards batches with a deterministic reduction order
    int logEvery = 50;
    // Optional pool of anchored FIM items mixed into training: after every
    // batch drawn from `seqs`, one batch is sampled (seeded) from this pool.
    // Same next-token objective, different cut distribution.
    std::vector<AnchoredItem> anchored;
};

// Next-token training over the encoded corpus. Each epoch reshuffles and
// re-rolls the FIM split of every item (seeded from cfg.seed). Items whose
// FIM form exceeds ctxLen are dropped; the drop count is logged once.
Model train_model(const std::vector<std::vector<int>>& seqs, const TrainOptions& opt,
                  std::ostream* log);

struct FinetunePair {
    std::vector<int> prompt;
    std::vector<int> expected;  // continuation; loss is restricted to these + <eos>
};

// Supervised fine-tuning on (FIM prompt, expected type) pairs. onEpoch runs
// after each epoch (for held-out accuracy curves); epochs=0 is an identity.
Model fine_tune(const Model& start, const std::vector<FinetunePair>& data, double lr,
                double weightDecay, int epochs, int batchSize, std::ostream* log,
                const std::function<void(int, const Model&)>& onEpoch = nullptr);

}  // namespace typesteer::tinymodel
