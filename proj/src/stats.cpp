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
#include "lfq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "lfq/rng.hpp"
#include "lfq/rollup.hpp"
#include "lfq/tsv.hpp"

namespace lfq {

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double median(std::vector<double> values) {
    if (values.empty()) throw NoDataError("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

double scaled_w(double rank_sum, int n, int m) {
    const double w_min = 0.5 * n * (n + 1);
    const double w_max = 0.5 * n * (n + 2 * m + 1);
    return (2.0 * rank_sum - (w_max + w_min)) / (w_max - w_min);
}

} // namespace

WilcoxonResult wilcoxon_w(std::span<const double> case_values,
                          std::span<const double> control_values) {
    const int n = static_cast<int>(case_values.size());
    const int m = static_cast<int>(control_values.size());
    if (n < 1 || m < 1)
        throw UndefinedStatistic("wilcoxon_w: a group has no observations");

    std::vector<double> pooled;
    pooled.reserve(case_values.size() + control_values.size());
    pooled.insert(pooled.end(), case_values.begin(), case_values.end());
    pooled.insert(pooled.end(), control_values.begin(), control_values.end());
    const auto ranks = midranks(pooled);

    double rank_sum = 0.0;
    for (int i = 0; i < n; ++i) rank_sum += ranks[i];

    WilcoxonResult res;
    res.rank_sum = rank_sum;
    res.n_case = n;
    res.n_control = m;
    res.w = scaled_w(rank_sum, n, m);
    return res;
}

MissingPolicy missing_policy_for(Measure m) {
    return m == Measure::spectral_count ? MissingPolicy::treat_as_zero
                                        : MissingPolicy::exclude;
}

namespace {

std::vector<double> apply_policy(std::span<const Cell> cells,
                                 MissingPolicy policy) {
    std::vector<double> out;
    out.reserve(cells.size());
    for (const auto& c : cells) {
        if (c)
            out.push_back(*c);
        else if (policy == MissingPolicy::treat_as_zero)
            out.push_back(0.0);
    }
    return out;
}

} // namespace

WilcoxonResult wilcoxon_w(std::span<const Cell> case_values,
                          std::span<const Cell> control_values,
                          MissingPolicy policy) {
    const auto cs = apply_policy(case_values, policy);
    const auto ct = apply_policy(control_values, policy);
    return wilcoxon_w(std::span<const double>(cs), std::span<const double>(ct));
}

std::optional<double> element_w(std::span<const Cell> case_values,
                                std::span<const Cell> control_values,
                                MissingPolicy policy) {
    const auto cs = apply_policy(case_values, policy);
    const auto ct = apply_policy(control_values, policy);
    if (cs.empty() && ct.empty()) return std::nullopt;
    if (ct.empty()) return 1.0;
    if (cs.empty()) return -1.0;
    return wilcoxon_w(std::span<const double>(cs), std::span<const double>(ct)).w;
}

double tau(std::span<const double> element_ws) {
    if (element_ws.empty())
        throw UndefinedStatistic("tau: no elements");
    double sum = 0.0;
    for (double w : element_ws) sum += w;
    return sum / static_cast<double>(element_ws.size());
}

namespace {

double count_relabelings(int total, int cases) {
    // C(total, cases), saturating well above any practical request
    double c = 1.0;
    for (int i = 0; i < cases; ++i) {
        c *= static_cast<double>(total - i) / static_cast<double>(i + 1);
        if (c > 1e18) return 1e18;
    }
    return c;
}

/// Pooled values and their midranks for one element; only the columns that
/// survive the missing rule participate, and they are fixed across
/// relabelings (the rule depends on the cells, not the labels).
struct ElementData {
    std::vector<std::size_t> cols;
    std::vector<double> ranks;
};

ElementData element_data(const QuantMatrix& m, std::size_t entity,
                         MissingPolicy policy) {
    ElementData data;
    std::vector<double> values;
    for (std::size_t j = 0; j < m.samples.size(); ++j) {
        const Cell& c = m.cell(entity, j);
        if (c) {
            data.cols.push_back(j);
            values.push_back(*c);
        } else if (policy == MissingPolicy::treat_as_zero) {
            data.cols.push_back(j);
            values.push_back(0.0);
        }
    }
    data.ranks = midranks(values);
    return data;
}

std::optional<double> element_w_for_labels(const ElementData& data,
                                           const std::vector<std::uint8_t>& is_case) {
    int n = 0;
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < data.cols.size(); ++i) {
        if (is_case[data.cols[i]]) {
            ++n;
            rank_sum += data.ranks[i];
        }
    }
    const int m = static_cast<int>(data.cols.size()) - n;
    if (n == 0 && m == 0) return std::nullopt;
    if (m == 0) return 1.0;
    if (n == 0) return -1.0;
    return scaled_w(rank_sum, n, m);
}

} // namespace

std::vector<TauResult> permutation_test(const QuantMatrix& m,
                                        const ProteinMap& pm,
                                        const PermutationOptions& options) {
    const MissingPolicy policy = missing_policy_for(m.measure);
    const std::size_t n_samples = m.samples.size();

    std::vector<std::uint8_t> observed(n_samples, 0);
    int n_case = 0;
    for (std::size_t j = 0; j < n_samples; ++j) {
        if (m.samples[j].group == Group::cases) {
            observed[j] = 1;
            ++n_case;
        }
    }
    const int n_ctrl = static_cast<int>(n_samples) - n_case;
    if (n_case == 0 || n_ctrl == 0)
        throw UndefinedStatistic("permutation test: a group has no samples");
    if (count_relabelings(static_cast<int>(n_samples), n_case) < 2.0)
        throw DataError("permutation test: fewer than 2 distinct relabelings");
    if (!options.exhaustive && options.permutations < 1)
        throw DataError("permutation test: B must be >= 1");

    const auto groups = protein_elements(pm, m, m.level);

    std::vector<ElementData> data(m.entities.size());
    std::vector<bool> usable(m.entities.size(), false);
    for (std::size_t e = 0; e < m.entities.size(); ++e) {
        data[e] = element_data(m, e, policy);
        usable[e] = !data[e].cols.empty();
    }

    struct ProteinWork {
        const ProteinElements* group;
        std::vector<std::size_t> entity_rows;
        double tau_obs = 0.0;
        long long exceed = 0;
    };
    std::vector<ProteinWork> work;
    work.reserve(groups.size());
    for (const auto& g : groups) {
        ProteinWork pw;
        pw.group = &g;
        for (const auto& entity : g.elements) {
            const std::size_t e = m.entity_index(entity);
            if (usable[e]) pw.entity_rows.push_back(e);
        }
        if (pw.entity_rows.empty()) continue;
        double sum = 0.0;
        int k = 0;
        for (std::size_t e : pw.entity_rows) {
            auto w = element_w_for_labels(data[e], observed);
            if (w) {
                sum += *w;
                ++k;
            }
        }
        if (k == 0) continue;
        pw.tau_obs = sum / k;
        work.push_back(std::move(pw));
    }

    auto tally = [&](const std::vector<std::uint8_t>& labels) {
        for (auto& pw : work) {
            double sum = 0.0;
            int k = 0;
            for (std::size_t e : pw.entity_rows) {
                auto w = element_w_for_labels(data[e], labels);
                if (w) {
                    sum += *w;
                    ++k;
                }
            }
            if (k > 0 && std::abs(sum / k) >= std::abs(pw.tau_obs)) ++pw.exceed;
        }
    };

    long long n_draws = 0;
    if (options.exhaustive) {
        // every distinct placement of the case labels
        std::vector<std::size_t> pick(static_cast<std::size_t>(n_case));
        std::iota(pick.begin(), pick.end(), 0);
        while (true) {
            std::vector<std::uint8_t> labels(n_samples, 0);
            for (std::size_t p : pick) labels[p] = 1;
            tally(labels);
            ++n_draws;
            // next combination
            int i = n_case - 1;
            while (i >= 0 &&
                   pick[static_cast<std::size_t>(i)] ==
                       n_samples - static_cast<std::size_t>(n_case - i))
                --i;
            if (i < 0) break;
            ++pick[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < n_case; ++j)
                pick[static_cast<std::size_t>(j)] =
                    pick[static_cast<std::size_t>(j - 1)] + 1;
        }
    } else {
        Rng rng(options.seed);
        std::vector<std::uint8_t> labels;
        for (int b = 0; b < options.permutations; ++b) {
            labels = observed;
            rng.shuffle(labels);
            tally(labels);
            ++n_draws;
        }
    }

    std::vector<TauResult> results;
    results.reserve(work.size());
    std::vector<double> p_values;
    p_values.reserve(work.size());
    for (const auto& pw : work) {
        TauResult r;
        r.accession = pw.group->accession;
        r.level = m.level;
        r.measure = m.measure;
        r.k = static_cast<int>(pw.entity_rows.size());
        r.tau = pw.tau_obs;
        r.p_value = static_cast<double>(1 + pw.exceed) /
                    static_cast<double>(n_draws + 1);
        r.direction = pw.tau_obs > 0 ? "up" : pw.tau_obs < 0 ? "down" : "flat";
        p_values.push_back(r.p_value);
        results.push_back(std::move(r));
    }
    const auto q = bh_qvalues(p_values);
    for (std::size_t i = 0; i < results.size(); ++i) results[i].q_value = q[i];
    return results;
}

std::vector<double> bh_qvalues(std::span<const double> p_values) {
    const std::size_t n = p_values.size();
    for (double p : p_values)
        if (!(p > 0.0 && p <= 1.0))
            throw DataError("bh_qvalues: p-values must lie in (0, 1]");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return p_values[a] < p_values[b];
    });

    std::vector<double> q(n, 0.0);
    double running = 1.0;
    for (std::size_t r = n; r >= 1; --r) {
        const std::size_t i = order[r - 1];
        running = std::min(running, static_cast<double>(n) * p_values[i] /
                                        static_cast<double>(r));
        q[i] = running;
    }
    return q;
}

SpearmanResult spearman_rho(std::span<const double> x,
                            std::span<const double> y, int permutations,
                            std::uint64_t seed) {
    if (x.size() != y.size())
        throw DataError("spearman_rho: input lengths differ");
    if (x.size() < 3)
        throw DataError("spearman_rho: need at least 3 observations");

    const auto rx = midranks(x);
    const auto ry = midranks(y);
    const std::size_t n = rx.size();

    auto pearson = [n](const std::vector<double>& a, const std::vector<double>& b,
                       const std::vector<std::size_t>* b_perm) {
        double ma = 0.0, mb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ma += a[i];
            mb += b[b_perm ? (*b_perm)[i] : i];
        }
        ma /= n;
        mb /= n;
        double sab = 0.0, saa = 0.0, sbb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double da = a[i] - ma;
            const double db = b[b_perm ? (*b_perm)[i] : i] - mb;
            sab += da * db;
            saa += da * da;
            sbb += db * db;
        }
        if (saa == 0.0 || sbb == 0.0)
            throw UndefinedStatistic("spearman_rho: zero-variance rank vector");
        return sab / std::sqrt(saa * sbb);
    };

    SpearmanResult res;
    res.rho = pearson(rx, ry, nullptr);

    Rng rng(seed);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    long long exceed = 0;
    for (int b = 0; b < permutations; ++b) {
        rng.shuffle(perm);
        if (std::abs(pearson(rx, ry, &perm)) >= std::abs(res.rho)) ++exceed;
    }
    res.p_value =
        static_cast<double>(1 + exceed) / static_cast<double>(permutations + 1);
    return res;
}

void write_tau_results(const std::filesystem::path& path,
                       const std::vector<TauResult>& results) {
    TsvWriter out(path, {"protein", "level", "measure", "K", "tau", "p_value",
                         "q_value", "direction"});
    for (const auto& r : results)
        out.row({r.accession, to_string(r.level), to_string(r.measure),
                 fmt_int(r.k), fmt_double(r.tau), fmt_double(r.p_value),
                 fmt_double(r.q_value), r.direction});
}

std::vector<TauResult> read_tau_results(const std::filesystem::path& path) {
    TsvReader in(path, {"protein", "level", "measure", "K", "tau", "p_value",
                        "q_value", "direction"});
    std::vector<TauResult> results;
    while (auto row = in.next()) {
        TauResult r;
        r.accession = (*row)[0];
        r.level = level_from_string((*row)[1]);
        r.measure = measure_from_string((*row)[2]);
        r.k = static_cast<int>(in.as_int((*row)[3], "K"));
        r.tau = in.as_double((*row)[4], "tau");
        r.p_value = in.as_double((*row)[5], "p_value");
        r.q_value = in.as_double((*row)[6], "q_value");
        r.direction = (*row)[7];
        results.push_back(std::move(r));
    }
    return results;
}

} // namespace lfq
