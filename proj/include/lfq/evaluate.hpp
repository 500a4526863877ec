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
#pragma once

#include <functional>

#include "lfq/ingest.hpp"
#include "lfq/stats.hpp"

namespace lfq {

enum class TruthLabel { up, down, unchanged };
std::string to_string(TruthLabel t);

/// True per-protein direction, case versus control.
struct GroundTruth {
    std::map<std::string, TruthLabel> labels;
};

/// Compares the two selected design columns exactly: up when the case
/// abundance is larger, down when smaller, unchanged when equal.
GroundTruth design_to_truth(const DesignTable& design,
                            const std::string& case_class,
                            const std::string& control_class);

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocResult {
    std::vector<RocPoint> points; // starts at (0,0), ends at (1,1)
    double auc = 0.5;
};

/// ROC of a score (higher = more confidently different) against the truth,
/// with proteins labeled up or down pooled as positives and unchanged ones
/// as negatives. Only proteins present in both the scores and the truth are
/// ranked. The trapezoidal AUC equals the tie-adjusted Mann-Whitney
/// statistic over (positive, negative) pairs.
RocResult roc(const std::vector<std::pair<std::string, double>>& scores,
              const GroundTruth& truth);

struct ConfusionRow {
    std::string class_name;
    int up_called = 0;
    int down_called = 0;
    int total = 0; // proteins of this class eligible for calling
};

/// Calls = proteins with q <= alpha, direction by the sign of tau,
/// partitioned by an accession-class rule and restricted to proteins the
/// truth knows about. Rows are sorted by class name.
std::vector<ConfusionRow> confusion_at_fdr(
    const std::vector<TauResult>& results, const GroundTruth& truth,
    double alpha,
    const std::function<std::string(const std::string&)>& class_of);

} // namespace lfq
