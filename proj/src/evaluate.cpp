/*
Copyright 2026, lfqkit contributors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#include "lfq/evaluate.hpp"

#include <algorithm>
#include <limits>

namespace lfq {

std::string to_string(TruthLabel t) {
    switch (t) {
        case TruthLabel::up: return "up";
        case TruthLabel::down: return "down";
        default: return "null";
    }
}

GroundTruth design_to_truth(const DesignTable& design,
                            const std::string& case_class,
                            const std::string& control_class) {
    const std::size_t ci = design.class_index(case_class);
    const std::size_t ki = design.class_index(control_class);
    GroundTruth truth;
    for (const auto& row : design.rows) {
        const double c = row.abundance[ci];
        const double k = row.abundance[ki];
        truth.labels[row.accession] =
            c > k ? TruthLabel::up : c < k ? TruthLabel::down : TruthLabel::unchanged;
    }
    return truth;
}

RocResult roc(const std::vector<std::pair<std::string, double>>& scores,
              const GroundTruth& truth) {
    struct Scored {
        double score;
        bool positive;
    };
    std::vector<Scored> ranked;
    for (const auto& [acc, score] : scores) {
        auto it = truth.labels.find(acc);
        if (it == truth.labels.end()) continue;
        ranked.push_back({score, it->second != TruthLabel::unchanged});
    }
    long long n_pos = 0, n_neg = 0;
    for (const auto& s : ranked) (s.positive ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        throw DataError("roc: need at least one positive and one negative protein");

    std::sort(ranked.begin(), ranked.end(), [](const Scored& a, const Scored& b) {
        return a.score > b.score;
    });

    RocResult res;
    res.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    long long tp = 0, fp = 0;
    double auc = 0.0;
    std::size_t i = 0;
    while (i < ranked.size()) {
        std::size_t j = i;
        long long tp_add = 0, fp_add = 0;
        while (j < ranked.size() && ranked[j].score == ranked[i].score) {
            (ranked[j].positive ? tp_add : fp_add)++;
            ++j;
        }
        // trapezoid over the tie block = wins + ties/2 in pair-counting terms
        auc += static_cast<double>(fp_add) *
               (static_cast<double>(tp) + 0.5 * static_cast<double>(tp_add));
        tp += tp_add;
        fp += fp_add;
        res.points.push_back({ranked[i].score,
                              static_cast<double>(fp) / static_cast<double>(n_neg),
                              static_cast<double>(tp) / static_cast<double>(n_pos)});
        i = j;
    }
    res.auc = auc / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
    return res;
}

std::vector<ConfusionRow> confusion_at_fdr(
    const std::vector<TauResult>& results, const GroundTruth& truth,
    double alpha,
    const std::function<std::string(const std::string&)>& class_of) {
    std::map<std::string, ConfusionRow> rows;
    for (const auto& r : results) {
        if (!truth.labels.count(r.accession)) continue;
        ConfusionRow& row = rows[class_of(r.accession)];
        row.total++;
        if (r.q_value <= alpha && r.tau != 0.0)
            (r.tau > 0 ? row.up_called : row.down_called)++;
    }
    std::vector<ConfusionRow> out;
    out.reserve(rows.size());
    for (auto& [name, row] : rows) {
        row.class_name = name;
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace lfq
