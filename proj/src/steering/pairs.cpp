#include "typesteer/steering/pairs.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "typesteer/minilang/parser.hpp"
#include "typesteer/minilang/render.hpp"
#include "typesteer/util/hash.hpp"

namespace typesteer::steering {

using json = nlohmann::json;
using namespace minilang;

std::optional<SteeringTriple> make_steering_pair(const tinymodel::Model& model,
                                                 const corpusgen::CorpusEntry& entry,
                                                 const SteeringDatasetSpec& spec, Rng& rng) {
    if (entry.dialect != spec.dialect) return std::nullopt;
    Program p = corpusgen::entry_program(entry);
    auto sites = list_annotation_sites(p);
    std::vector<size_t> present;
    for (size_t i = 0; i < sites.size(); ++i) {
        if (sites[i].present) present.push_back(i);
    }
    if (present.empty()) return std::nullopt;
    size_t target = present[rng.below(present.size())];

    FimPrompt positive = build_fim_type_prompt(p, target, entry.programId);
    Prediction clean;
    try {
        clean = predict_type(model, positive);
    } catch (const tinymodel::ContextOverflow&) {
        return std::nullopt;
    }
    if (!clean.exactMatch) return std::nullopt;

    std::string preText = render(p, p.dialect);
    Program q = clone_program(p);
    mutate::EditTrace trace;
    for (int i = 0; i < spec.maxEditsPerPair; ++i) {
        Program next;
        mutate::Edit e;
        try {
            std::tie(next, e) = mutate::apply_random_edit(q, rng, target, spec.editKinds);
        } catch (const mutate::NoLegalEdit&) {
            return std::nullopt;
        }
        q = std::move(next);
        trace.applied.push_back(e);
        if (e.kind == mutate::EditKind::RenameUserType) {
            bool chained = false;
            for (auto& [from, to] : trace.typeNameMap) {
                if (to == e.from) to = e.to, chained = true;
            }
            if (!chained) trace.typeNameMap[e.from] = e.to;
        }

        FimPrompt negative = build_fim_type_prompt(q, target, entry.programId);
        Prediction pred;
        try {
            pred = predict_type(model, negative);
        } catch (const tinymodel::ContextOverflow&) {
            return std::nullopt;
        }
        if (!pred.exactMatch) {
            trace.editDistance =
                static_cast<int>(mutate::edit_distance(preText, render(q, q.dialect)));
            SteeringTriple t;
            t.positive = std::move(positive);
            t.expectedType = negative.expectedType;
            t.negative = std::move(negative);
            t.editTrace = std::move(trace);
            t.negativePrediction = pred.typeText;
            return t;
        }
    }
    return std::nullopt;
}

std::vector<SteeringTriple> balance_dataset(const std::vector<SteeringTriple>& triples,
                                            int cap) {
    std::map<std::string, int> counts;
    std::vector<SteeringTriple> out;
    for (const auto& t : triples) {
        if (counts[t.expectedType] < cap) {
            ++counts[t.expectedType];
            out.push_back(t);
        }
    }
    return out;
}

std::pair<std::vector<SteeringTriple>, std::vector<SteeringTriple>> split_steer_heldout(
    const std::vector<SteeringTriple>& triples, double ratio, uint64_t seed) {
    std::set<int> ids;
    for (const auto& t : triples) ids.insert(t.positive.sourceProgramId);
    std::vector<int> order(ids.begin(), ids.end());
    Rng rng(seed);
    rng.shuffle(order);
    size_t nSteer = static_cast<size_t>(order.size() * ratio + 0.5);
    std::set<int> steerIds(order.begin(), order.begin() + nSteer);
    std::vector<SteeringTriple> steer, heldOut;
    for (const auto& t : triples) {
        (steerIds.count(t.positive.sourceProgramId) ? steer : heldOut).push_back(t);
    }
    return {steer, heldOut};
}

namespace {

json prompt_to_json(const FimPrompt& p) {
    return json{{"prefix", p.prefixText},
                {"suffix", p.suffixText},
                {"expected", p.expectedType},
                {"siteIndex", p.siteIndex}};
}

FimPrompt prompt_from_json(const json& j, int programId, Dialect d) {
    std::string prefix = j.at("prefix").get<std::string>();
    std::string expected = j.at("expected").get<std::string>();
    std::string suffix = j.at("suffix").get<std::string>();
    Program p = parse(prefix + expected + suffix, d);
    FimPrompt out = build_fim_type_prompt(p, j.at("siteIndex").get<int>(), programId);
    return out;
}

}  // namespace

void write_triples(const std::string& path, const std::vector<SteeringTriple>& triples) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& t : triples) {
        json edits = json::array();
        for (const auto& e : t.editTrace.applied) {
            edits.push_back({{"kind", mutate::edit_kind_name(e.kind)},
                             {"from", e.from},
                             {"to", e.to},
                             {"siteIndex", e.siteIndex},
                             {"declIndex", e.declIndex}});
        }
        json line{{"positive", prompt_to_json(t.positive)},
                  {"negative", prompt_to_json(t.negative)},
                  {"expectedType", t.expectedType},
                  {"programId", t.positive.sourceProgramId},
                  {"dialect", dialect_name(t.positive.dialect)},
                  {"editTrace",
                   {{"applied", edits},
                    {"editDistance", t.editTrace.editDistance},
                    {"typeNameMap", t.editTrace.typeNameMap}}},
                  {"negativePrediction", t.negativePrediction}};
        out << line.dump() << '\n';
    }
}

std::vector<SteeringTriple> load_triples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<SteeringTriple> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        int programId = j.at("programId").get<int>();
        Dialect d = j.at("dialect").get<std::string>() == "P" ? Dialect::P : Dialect::T;
        SteeringTriple t;
        t.positive = prompt_from_json(j.at("positive"), programId, d);
        t.negative = prompt_from_json(j.at("negative"), programId, d);
        t.expectedType = j.at("expectedType").get<std::string>();
        const json& jt = j.at("editTrace");
        t.editTrace.editDistance = jt.at("editDistance").get<int>();
        t.editTrace.typeNameMap =
            jt.at("typeNameMap").get<std::map<std::string, std::string>>();
        for (const json& je : jt.at("applied")) {
            mutate::Edit e;
            e.kind = *mutate::edit_kind_from_name(je.at("kind").get<std::string>());
            e.from = je.at("from").get<std::string>();
            e.to = je.at("to").get<std::string>();
            e.siteIndex = je.at("siteIndex").get<int>();
            e.declIndex = je.at("declIndex").get<int>();
            t.editTrace.applied.push_back(std::move(e));
        }
        t.negativePrediction = j.at("negativePrediction").get<std::string>();
        out.push_back(std::move(t));
    }
    return out;
}

uint64_t dataset_digest(const std::vector<SteeringTriple>& triples) {
    uint64_t h = fnv1a64("triples");
    for (const auto& t : triples) {
        h = fnv1a64(t.positive.prefixText, h);
        h = fnv1a64(t.positive.expectedType, h);
        h = fnv1a64(t.negative.prefixText, h);
        h = fnv1a64(t.negative.suffixText, h);
        h = fnv1a64(t.expectedType, h);
    }
    return h;
}

}  // namespace typesteer::steering
