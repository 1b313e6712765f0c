#include "typesteer/steering/eval.hpp"

#include "typesteer/tinymodel/model.hpp"

namespace typesteer::steering {

using Model = tinymodel::Model;

EvalReport steer_and_eval(const Model& model, const SteeringVectorSet& vectors,
                          const std::vector<int>& layers,
                          const std::vector<SteeringTriple>& dataset) {
    std::map<int, Model::Vec> patches;
    for (int l : layers) {
        if (l < 0 || l >= static_cast<int>(vectors.vectors.size())) {
            throw tinymodel::BadLayer("steering layer out of range");
        }
        patches[l] = vectors.vectors[l];
    }

    EvalReport report;
    for (const auto& t : dataset) {
        Prediction pred;
        try {
            pred = predict_type(model, t.negative, patches.empty() ? nullptr : &patches);
        } catch (const tinymodel::ContextOverflow&) {
            continue;
        }
        ++report.total;
        TypeStats& stats = report.perType[t.expectedType];
        ++stats.total;
        if (pred.typeText == t.expectedType) {
            ++report.exact;
            ++stats.exact;
        }
        if (pred.passesChecker) {
            ++report.checker;
            ++stats.checker;
        }
    }
    return report;
}

}  // namespace typesteer::steering
