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
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "lfq/pipeline.hpp"
#include "lfq/rollup.hpp"
#include "lfq/simulate.hpp"
#include "lfq/tsv.hpp"

namespace fs = std::filesystem;
using namespace lfq;

namespace {

std::vector<RunKey> scan_raster_dir(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw DataError("raster directory '" + dir.string() + "' does not exist");
    std::vector<RunKey> runs;
    const std::string suffix = ".raster.tsv";
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (name.size() <= suffix.size() ||
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
            continue;
        name.resize(name.size() - suffix.size());
        const std::size_t sep = name.find("__");
        if (sep == std::string::npos)
            runs.push_back({name, ""});
        else
            runs.push_back({name.substr(0, sep), name.substr(sep + 2)});
    }
    std::sort(runs.begin(), runs.end());
    return runs;
}

void write_report(const fs::path& path, const QuantifyOutput& out) {
    TsvWriter report(path, {"key", "value"});
    report.row({"identifications_total", fmt_int((long long)out.ids_total)});
    report.row({"identifications_passing", fmt_int((long long)out.ids_passing)});
    report.row({"species_counted", fmt_int((long long)out.species_counted)});
    report.row({"fits_attempted", fmt_int((long long)out.fits_attempted)});
    report.row({"fits_converged", fmt_int((long long)out.fits_converged)});
    report.row({"fits_successful", fmt_int((long long)out.fits_successful)});
    report.row({"species_final_count_matrix",
                fmt_int((long long)out.counts_final.entities.size())});
    report.row({"species_final_abundance_matrix",
                fmt_int((long long)out.abundance_final.entities.size())});
}

void write_strata(const fs::path& histogram_path, const fs::path& medians_path,
                  const std::vector<StratumSummary>& strata) {
    TsvWriter hist(histogram_path, {"stratum", "bin_low", "bin_high", "count"});
    for (const auto& s : strata)
        for (std::size_t b = 0; b < s.histogram.size(); ++b)
            hist.row({s.stratum, fmt_double(-1.0 + 0.1 * (double)b),
                      fmt_double(-1.0 + 0.1 * (double)(b + 1)),
                      fmt_int(s.histogram[b])});
    TsvWriter med(medians_path, {"stratum", "median_w", "count"});
    for (const auto& s : strata)
        med.row({s.stratum, fmt_double(s.median_w), fmt_int(s.count)});
}

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed) {
    SimConfig config = load_sim_config(config_path);
    if (seed) config.seed = *seed;
    SimDataset ds = simulate(config);
    fs::create_directories(out_dir);
    write_dataset(ds, out_dir);
    std::cerr << "simulate: " << ds.identifications.size()
              << " identifications across " << ds.rasters.size() << " runs -> "
              << out_dir.string() << "\n";
    return 0;
}

int cmd_quantify(const fs::path& ids_path, const fs::path& raster_dir,
                 const fs::path& groups_path, double fdr_threshold,
                 int min_presence, const fs::path& out_dir) {
    const auto ids = read_identifications(ids_path);
    const auto groups = read_groups(groups_path);
    const auto runs = scan_raster_dir(raster_dir);
    if (ids.empty())
        std::cerr << "warning: no identifications in " << ids_path.string()
                  << "; matrices will be empty\n";

    // lazy per-run raster cache; quant walks runs in order
    Raster cache;
    bool cached = false;
    RunKey cached_run;
    RasterProvider provider = [&](const RunKey& run) -> const Raster* {
        if (cached && cached_run == run) return &cache;
        const fs::path p = raster_dir / (run.label() + ".raster.tsv");
        if (!fs::exists(p)) return nullptr;
        cache = read_raster(p);
        cached = true;
        cached_run = run;
        return &cache;
    };

    QuantifyOptions options;
    options.fdr_threshold = fdr_threshold;
    options.min_presence = min_presence;
    QuantifyOutput out = run_quantify(ids, runs, provider, groups, options);

    fs::create_directories(out_dir);
    write_matrix(out_dir / "counts_replicate.tsv", out.counts_replicate);
    write_matrix(out_dir / "abundance_replicate.tsv", out.abundance_replicate);
    write_matrix(out_dir / "counts_final.tsv", out.counts_final);
    write_matrix(out_dir / "abundance_final.tsv", out.abundance_final);
    write_fit_records(out_dir / "fits.tsv", out.fits);
    write_report(out_dir / "report.tsv", out);
    return 0;
}

int cmd_rollup(const fs::path& matrix_path, const fs::path& groups_path,
               const fs::path& map_path, const std::string& from,
               const std::string& level, const std::string& measure,
               const fs::path& out_path) {
    const auto groups = read_groups(groups_path);
    const auto pm = read_protein_map(map_path);
    const QuantMatrix m =
        read_matrix(matrix_path, measure_from_string(measure),
                    level_from_string(from), groups);
    const QuantMatrix rolled = rollup_matrix(m, level_from_string(level), pm);
    write_matrix(out_path, rolled);
    return 0;
}

int cmd_test(const fs::path& matrix_path, const fs::path& groups_path,
             const fs::path& map_path, const std::string& level,
             const std::string& measure, int permutations, std::uint64_t seed,
             const fs::path& out_path) {
    const auto groups = read_groups(groups_path);
    const auto pm = read_protein_map(map_path);
    QuantMatrix m = read_matrix(matrix_path, measure_from_string(measure),
                                Level::species, groups);
    const Level target = level_from_string(level);
    if (target != Level::species) m = rollup_matrix(m, target, pm);

    PermutationOptions options;
    options.permutations = permutations;
    options.seed = seed;
    const auto results = permutation_test(m, pm, options);
    write_tau_results(out_path, results);
    return 0;
}

int cmd_diagnose(const fs::path& fits_path, const fs::path& matrix_path,
                 const fs::path& groups_path, const fs::path& map_path,
                 const fs::path& sequences_path, const std::string& fg_prefix,
                 const std::string& bg_prefix, const std::string& rank_group,
                 bool no_proline_rule, const fs::path& out_dir) {
    const auto groups = read_groups(groups_path);
    const auto pm = read_protein_map(map_path);
    const auto fits = read_fit_records(fits_path);
    const QuantMatrix abundance =
        read_matrix(matrix_path, Measure::ion_abundance, Level::species, groups);
    std::map<std::string, std::string> sequences;
    if (!sequences_path.empty()) sequences = read_protein_sequences(sequences_path);

    DiagnoseOptions options;
    options.foreground_prefix = fg_prefix;
    options.background_prefix = bg_prefix;
    options.rank_control = rank_group == "control";
    options.proline_rule = !no_proline_rule;
    DiagnoseOutput out =
        run_diagnose(fits, abundance, groups, pm, sequences, options);

    fs::create_directories(out_dir);
    {
        TsvWriter tsv(out_dir / "interference.tsv", {"species", "d_i", "cohort"});
        for (const auto& rec : out.interference)
            tsv.row({rec.species,
                     rec.distance ? fmt_double(*rec.distance) : "NA",
                     to_string(rec.cohort)});
    }
    {
        TsvWriter tsv(out_dir / "species_w.tsv", {"species", "w"});
        for (const auto& [species, w] : out.species_w)
            tsv.row({species, fmt_double(w)});
    }
    write_strata(out_dir / "stratified_w_abundance.tsv",
                 out_dir / "stratified_w_abundance_medians.tsv",
                 out.by_abundance);
    write_strata(out_dir / "stratified_w_missingness.tsv",
                 out_dir / "stratified_w_missingness_medians.tsv",
                 out.by_missingness);
    write_strata(out_dir / "stratified_w_interference.tsv",
                 out_dir / "stratified_w_interference_medians.tsv",
                 out.by_cohort);
    for (const char* expected : {"zero", "positive", "missing"}) {
        bool found = false;
        for (const auto& s : out.by_cohort) found = found || s.stratum == expected;
        if (!found)
            std::cerr << "note: interference stratum '" << expected
                      << "' is empty and was omitted\n";
    }
    if (!sequences.empty()) {
        TsvWriter tsv(out_dir / "semi_profile.tsv",
                      {"sample_id", "semi_count", "semi_abundance_fraction"});
        for (const auto& p : out.semi_profile)
            tsv.row({p.sample_label, fmt_int(p.semi_count),
                     fmt_double(p.semi_abundance_fraction)});
    }
    return 0;
}

int cmd_evaluate(const fs::path& results_path, const fs::path& design_path,
                 const std::string& case_class, const std::string& control_class,
                 double alpha, const std::vector<std::string>& class_prefixes,
                 const fs::path& out_dir) {
    const auto results = read_tau_results(results_path);
    const auto design = read_design(design_path);
    const GroundTruth truth = design_to_truth(design, case_class, control_class);

    std::vector<std::pair<std::string, std::string>> rules;
    for (const auto& rule : class_prefixes) {
        const std::size_t eq = rule.find('=');
        if (eq == std::string::npos || eq == 0)
            throw DataError("--class-prefix expects PREFIX=NAME, got '" + rule +
                            "'");
        rules.emplace_back(rule.substr(0, eq), rule.substr(eq + 1));
    }
    auto class_of = [&rules](const std::string& acc) -> std::string {
        for (const auto& [prefix, name] : rules)
            if (acc.size() >= prefix.size() &&
                acc.compare(0, prefix.size(), prefix) == 0)
                return name;
        return "other";
    };

    std::vector<std::pair<std::string, double>> scores;
    scores.reserve(results.size());
    for (const auto& r : results)
        scores.emplace_back(r.accession, 1.0 - r.p_value);
    const RocResult curve = roc(scores, truth);
    const auto confusion = confusion_at_fdr(results, truth, alpha, class_of);

    fs::create_directories(out_dir);
    {
        TsvWriter tsv(out_dir / "roc.tsv", {"threshold", "fpr", "tpr"});
        for (const auto& p : curve.points)
            tsv.row({fmt_double(p.threshold), fmt_double(p.fpr),
                     fmt_double(p.tpr)});
    }
    {
        TsvWriter tsv(out_dir / "auc.tsv", {"measure", "level", "auc"});
        const std::string measure =
            results.empty() ? "" : to_string(results.front().measure);
        const std::string level =
            results.empty() ? "" : to_string(results.front().level);
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%.3f", curve.auc);
        tsv.row({measure, level, buf});
    }
    {
        TsvWriter tsv(out_dir / "confusion.tsv",
                      {"class", "up", "down", "total"});
        for (const auto& row : confusion)
            tsv.row({row.class_name, fmt_int(row.up_called),
                     fmt_int(row.down_called), fmt_int(row.total)});
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"label-free LC-MS/MS differential quantification toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
    sim->footer(
        "Config keys (key=value, '#' comments):\n"
        "  design=PATH (required, design TSV), case_class, control_class,\n"
        "  bio_replicates, tech_replicates, species_min, species_max,\n"
        "  run_length, rt_margin, amp_min, amp_max, sigma_min, sigma_max,\n"
        "  lambda_min, lambda_max, rho_min, rho_max, mz_min, mz_max,\n"
        "  noise, bio_cv, tech_cv, rt_jitter,\n"
        "  competition={off|proportional}, competition_strength,\n"
        "  detection_floor, background_prefix,\n"
        "  semi_rate_case, semi_rate_control, semi_amp_min, semi_amp_max,\n"
        "  semi_parent_min_amp, cid_rate, cid_cap, mz_error, fdr_max, seed");
    fs::path sim_config, sim_out;
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    sim->add_option("--config", sim_config, "key=value config file")
        ->required()
        ->check(CLI::ExistingFile);
    sim->add_option("--out", sim_out, "output directory")->required();
    sim->add_option("--seed", sim_seed, "override the config seed")
        ->each([&](const std::string&) { sim_seed_set = true; });

    // quantify
    auto* quant = app.add_subcommand(
        "quantify", "build species-level count and abundance matrices");
    fs::path q_ids, q_rasters, q_groups, q_out;
    double q_fdr = 0.001;
    int q_min_presence = 3;
    quant->add_option("--ids", q_ids, "identifications TSV")
        ->required()
        ->check(CLI::ExistingFile);
    quant->add_option("--raster-dir", q_rasters, "directory of *.raster.tsv")
        ->required();
    quant->add_option("--groups", q_groups, "sample_id -> group TSV")
        ->required()
        ->check(CLI::ExistingFile);
    quant->add_option("--fdr-threshold", q_fdr, "identification FDR threshold");
    quant->add_option("--min-presence", q_min_presence,
                      "required per-group presence count");
    quant->add_option("--out", q_out, "output directory")->required();

    // rollup
    auto* roll = app.add_subcommand("rollup", "aggregate a matrix to a higher level");
    fs::path r_matrix, r_groups, r_map, r_out;
    std::string r_from = "species", r_level, r_measure = "abundance";
    roll->add_option("--matrix", r_matrix)->required()->check(CLI::ExistingFile);
    roll->add_option("--groups", r_groups)->required()->check(CLI::ExistingFile);
    roll->add_option("--map", r_map)->required()->check(CLI::ExistingFile);
    roll->add_option("--from", r_from, "input level (species|peptide)");
    roll->add_option("--level", r_level, "target level (peptide|protein)")
        ->required();
    roll->add_option("--measure", r_measure, "count|abundance");
    roll->add_option("--out", r_out, "output TSV")->required();

    // test
    auto* test = app.add_subcommand(
        "test", "permutation-calibrated differential abundance test");
    fs::path t_matrix, t_groups, t_map, t_out;
    std::string t_level = "species", t_measure = "abundance";
    int t_permutations = 1500;
    std::uint64_t t_seed = 0;
    test->add_option("--matrix", t_matrix, "species-level matrix TSV")
        ->required()
        ->check(CLI::ExistingFile);
    test->add_option("--groups", t_groups)->required()->check(CLI::ExistingFile);
    test->add_option("--map", t_map)->required()->check(CLI::ExistingFile);
    test->add_option("--level", t_level, "species|peptide|protein");
    test->add_option("--measure", t_measure, "count|abundance");
    test->add_option("--permutations", t_permutations, "relabelings B");
    test->add_option("--seed", t_seed, "permutation seed");
    test->add_option("--out", t_out, "results TSV")->required();

    // diagnose
    auto* diag = app.add_subcommand(
        "diagnose", "interference distances, w stratification, semi-tryptic profile");
    fs::path d_fits, d_matrix, d_groups, d_map, d_sequences, d_out;
    std::string d_fg, d_bg, d_rank = "case";
    bool d_no_proline = false;
    diag->add_option("--fits", d_fits)->required()->check(CLI::ExistingFile);
    diag->add_option("--matrix", d_matrix, "species-level abundance matrix")
        ->required()
        ->check(CLI::ExistingFile);
    diag->add_option("--groups", d_groups)->required()->check(CLI::ExistingFile);
    diag->add_option("--map", d_map)->required()->check(CLI::ExistingFile);
    diag->add_option("--sequences", d_sequences,
                     "protein sequences TSV (enables the semi-tryptic profile)")
        ->check(CLI::ExistingFile);
    diag->add_option("--fg-prefix", d_fg, "accession prefix of analyzed class");
    diag->add_option("--bg-prefix", d_bg, "accession prefix of competing class");
    diag->add_option("--rank-group", d_rank,
                     "group whose ranks define w (case|control)")
        ->check(CLI::IsMember({"case", "control"}));
    diag->add_flag("--no-proline-rule", d_no_proline,
                   "ignore proline when judging tryptic cuts");
    diag->add_option("--out", d_out, "output directory")->required();

    // evaluate
    auto* eval = app.add_subcommand("evaluate",
                                    "score calls against the design ground truth");
    fs::path e_results, e_design, e_out;
    std::string e_case, e_control;
    double e_alpha = 0.05;
    std::vector<std::string> e_class_prefixes;
    eval->add_option("--results", e_results)->required()->check(CLI::ExistingFile);
    eval->add_option("--design", e_design)->required()->check(CLI::ExistingFile);
    eval->add_option("--case-class", e_case)->required();
    eval->add_option("--control-class", e_control)->required();
    eval->add_option("--alpha", e_alpha, "FDR call threshold");
    eval->add_option("--class-prefix", e_class_prefixes,
                     "PREFIX=NAME accession class rule (repeatable)");
    eval->add_option("--out", e_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_config, sim_out,
                                sim_seed_set
                                    ? std::optional<std::uint64_t>(sim_seed)
                                    : std::nullopt);
        if (quant->parsed())
            return cmd_quantify(q_ids, q_rasters, q_groups, q_fdr,
                                q_min_presence, q_out);
        if (roll->parsed())
            return cmd_rollup(r_matrix, r_groups, r_map, r_from, r_level,
                              r_measure, r_out);
        if (test->parsed())
            return cmd_test(t_matrix, t_groups, t_map, t_level, t_measure,
                            t_permutations, t_seed, t_out);
        if (diag->parsed())
            return cmd_diagnose(d_fits, d_matrix, d_groups, d_map, d_sequences,
                                d_fg, d_bg, d_rank, d_no_proline, d_out);
        if (eval->parsed())
            return cmd_evaluate(e_results, e_design, e_case, e_control, e_alpha,
                                e_class_prefixes, e_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
