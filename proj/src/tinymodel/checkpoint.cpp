#include "typesteer/tinymodel/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "typesteer/tinymodel/token_table.hpp"
#include "typesteer/util/hash.hpp"

namespace typesteer::tinymodel {

using json = nlohmann::json;

namespace {
constexpr char kMagic[4] = {'T', 'S', 'L', '1'};

void write_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}
}  // namespace

void save_checkpoint(const Model& model, const std::string& path) {
    const ModelConfig& cfg = model.config();
    json tensors = json::array();
    for (const auto& p : model.params()) {
        tensors.push_back({{"name", p.name},
                           {"rows", p.w.rows()},
                           {"cols", p.w.cols()},
                           {"decay", p.decay}});
    }
    json header{{"config",
                 {{"nLayers", cfg.nLayers},
                  {"dModel", cfg.dModel},
                  {"nHeads", cfg.nHeads},
                  {"ctxLen", cfg.ctxLen},
                  {"vocabSize", cfg.vocabSize},
                  {"seed", cfg.seed},
                  {"learningRate", cfg.learningRate},
                  {"batchSize", cfg.batchSize},
                  {"epochs", cfg.epochs},
                  {"weightDecay", cfg.weightDecay}}},
                {"step", model.step()},
                {"rngStateDigest",
                 hex64(fnv1a64(std::to_string(cfg.seed) + ":" + std::to_string(model.step())))},
                {"tokenTableDigest", hex64(TokenTable::instance().digest())},
                {"tensors", tensors}};
    std::string hs = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot open for writing: " + path);
    out.write(kMagic, 4);
    write_u32(out, static_cast<uint32_t>(hs.size()));
    out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    for (const auto& p : model.params()) {
        // Column-major storage order, matching Eigen's default.
        for (Eigen::Index j = 0; j < p.w.cols(); ++j) {
            for (Eigen::Index i = 0; i < p.w.rows(); ++i) {
                float v = p.w(i, j);
                static_assert(sizeof(float) == 4);
                out.write(reinterpret_cast<const char*>(&v), 4);
            }
        }
    }
    if (!out) throw CheckpointError("write failed: " + path);
}

Model load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw CheckpointError("bad magic bytes in " + path);
    }
    uint32_t hlen = read_u32(in);
    std::string hs(hlen, '\0');
    in.read(hs.data(), hlen);
    if (!in) throw CheckpointError("truncated header in " + path);
    json header = json::parse(hs);

    std::string digest = header.at("tokenTableDigest").get<std::string>();
    if (digest != hex64(TokenTable::instance().digest())) {
        throw CheckpointError("token table digest mismatch in " + path);
    }

    const json& jc = header.at("config");
    ModelConfig cfg;
    cfg.nLayers = jc.at("nLayers").get<int>();
    cfg.dModel = jc.at("dModel").get<int>();
    cfg.nHeads = jc.at("nHeads").get<int>();
    cfg.ctxLen = jc.at("ctxLen").get<int>();
    cfg.vocabSize = jc.at("vocabSize").get<int>();
    cfg.seed = jc.at("seed").get<uint64_t>();
    cfg.learningRate = jc.at("learningRate").get<double>();
    cfg.batchSize = jc.at("batchSize").get<int>();
    cfg.epochs = jc.at("epochs").get<int>();
    cfg.weightDecay = jc.at("weightDecay").get<double>();

    Model model(cfg);
    model.set_step(header.at("step").get<long long>());
    const json& tensors = header.at("tensors");
    if (tensors.size() != model.params().size()) {
        throw CheckpointError("tensor directory size mismatch in " + path);
    }
    for (size_t t = 0; t < tensors.size(); ++t) {
        auto& p = model.params()[t];
        const json& jt = tensors[t];
        if (jt.at("name").get<std::string>() != p.name ||
            jt.at("rows").get<Eigen::Index>() != p.w.rows() ||
            jt.at("cols").get<Eigen::Index>() != p.w.cols()) {
            throw CheckpointError("tensor mismatch at " + p.name + " in " + path);
        }
        for (Eigen::Index j = 0; j < p.w.cols(); ++j) {
            for (Eigen::Index i = 0; i < p.w.rows(); ++i) {
                float v;
                in.read(reinterpret_cast<char*>(&v), 4);
                p.w(i, j) = v;
            }
        }
    }
    if (!in) throw CheckpointError("truncated tensor data in " + path);
    return model;
}

}  // namespace typesteer::tinymodel
