#include "typesteer/steering/vectors.hpp"

#include <fstream>
#include <ostream>

#include <json.hpp>

#include "typesteer/util/hash.hpp"

namespace typesteer::steering {

using json = nlohmann::json;
using Model = tinymodel::Model;

SteeringVectorSet compute_steering_vectors(const Model& model,
                                           const std::vector<SteeringTriple>& steerSet,
                                           std::ostream* log) {
    if (steerSet.empty()) throw std::invalid_argument("empty steering set");
    const int nLayers = model.config().nLayers;
    const int d = model.config().dModel;

    std::vector<Eigen::VectorXd> sum(nLayers, Eigen::VectorXd::Zero(d));
    int used = 0, skipped = 0;
    for (const auto& t : steerSet) {
        try {
            auto tapsOf = [&](const FimPrompt& prompt) {
                std::vector<int> toks = prompt_tokens(prompt);
                std::map<int, std::vector<Model::Vec>> taps;
                taps[static_cast<int>(toks.size()) - 1] = {};
                model.hidden_final(toks, nullptr, -1, &taps);
                return taps.begin()->second;
            };
            auto pos = tapsOf(t.positive);
            auto neg = tapsOf(t.negative);
            for (int l = 0; l < nLayers; ++l) {
                sum[l] += (pos[l] - neg[l]).cast<double>();
            }
            ++used;
        } catch (const tinymodel::ContextOverflow&) {
            ++skipped;
        }
    }
    if (log && skipped) *log << "steering vectors: skipped " << skipped << " overlong pairs\n";
    if (used == 0) throw std::runtime_error("no usable steering pairs");

    SteeringVectorSet out;
    out.pairCount = used;
    out.datasetDigest = dataset_digest(steerSet);
    for (int l = 0; l < nLayers; ++l) {
        out.vectors.push_back((sum[l] / used).cast<float>());
    }
    return out;
}

SteeringVectorSet random_vector_set(const SteeringVectorSet& like, uint64_t seed) {
    Rng rng(seed);
    SteeringVectorSet out;
    out.pairCount = like.pairCount;
    out.datasetDigest = like.datasetDigest;
    for (const auto& v : like.vectors) {
        Model::Vec r(v.size());
        for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = static_cast<float>(rng.normal());
        float norm = r.norm();
        if (norm > 0) r *= v.norm() / norm;
        out.vectors.push_back(std::move(r));
    }
    return out;
}

void save_vectors(const std::string& path, const SteeringVectorSet& set) {
    json header{{"datasetDigest", hex64(set.datasetDigest)},
                {"pairCount", set.pairCount},
                {"nLayers", set.vectors.size()},
                {"dModel", set.vectors.empty() ? 0 : set.vectors[0].size()}};
    std::string hs = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write("TSV1", 4);
    uint32_t n = static_cast<uint32_t>(hs.size());
    unsigned char b[4] = {static_cast<unsigned char>(n), static_cast<unsigned char>(n >> 8),
                          static_cast<unsigned char>(n >> 16),
                          static_cast<unsigned char>(n >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
    out.write(hs.data(), hs.size());
    for (const auto& v : set.vectors) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            float x = v(i);
            out.write(reinterpret_cast<const char*>(&x), 4);
        }
    }
}

SteeringVectorSet load_vectors(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "TSV1") {
        throw std::runtime_error("bad vector-file magic in " + path);
    }
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    uint32_t n = static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
                 (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
    std::string hs(n, '\0');
    in.read(hs.data(), n);
    json header = json::parse(hs);

    SteeringVectorSet out;
    out.datasetDigest = std::stoull(header.at("datasetDigest").get<std::string>(), nullptr, 16);
    out.pairCount = header.at("pairCount").get<int>();
    size_t nLayers = header.at("nLayers").get<size_t>();
    Eigen::Index d = header.at("dModel").get<Eigen::Index>();
    for (size_t l = 0; l < nLayers; ++l) {
        Model::Vec v(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            float x;
            in.read(reinterpret_cast<char*>(&x), 4);
            v(i) = x;
        }
        out.vectors.push_back(std::move(v));
    }
    if (!in) throw std::runtime_error("truncated vector file: " + path);
    return out;
}

}  // namespace typesteer::steering
