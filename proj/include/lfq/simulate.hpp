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

#include "lfq/diagnostics.hpp"
#include "lfq/evaluate.hpp"
#include "lfq/quant.hpp"

namespace lfq {

/// Synthetic dataset generator settings. All randomness flows from `seed`;
/// identical configs produce byte-identical datasets.
struct SimConfig {
    DesignTable design;
    std::string case_class = "case";
    std::string control_class = "control";

    int bio_replicates = 6;  // biological samples per class
    int tech_replicates = 2; // runs per biological sample

    int species_min = 3, species_max = 8; // species per protein

    double run_length = 2400.0; // seconds
    double rt_margin = 80.0;    // keep features away from the run edges

    // feature parameter priors
    double amp_min = 5.0, amp_max = 5000.0; // log-uniform, per design unit
    double sigma_min = 2.0, sigma_max = 5.0;
    double lambda_min = 0.5, lambda_max = 2.0;
    double rho_min = 0.008, rho_max = 0.02;
    double mz_min = 420.0, mz_max = 1180.0;

    double noise = 0.01;    // additive Gaussian std as a fraction of A
    double bio_cv = 0.25;   // log-normal spread across biological samples
    double tech_cv = 0.05;  // log-normal spread across technical replicates
    double rt_jitter = 1.0; // per-run Gaussian shift of mu, seconds

    enum class Competition { off, proportional };
    Competition competition = Competition::off;
    double competition_strength = 3.0;
    double detection_floor = 0.01;      // fraction of the run's median A
    std::string background_prefix;      // accessions of competing features

    double semi_rate_case = 0.0;    // injected semi-tryptic species, fraction
    double semi_rate_control = 0.0; // of the catalog, per class
    double semi_amp_min = 0.01, semi_amp_max = 0.05; // fraction of parent A
    double semi_parent_min_amp = 0.0; // only truncate parents at least this big

    double cid_rate = 5e-4; // expected identifications per unit abundance
    double cid_cap = 50.0;  // saturation of the expected count
    double mz_error = 0.003;
    double fdr_max = 0.0009;

    std::uint64_t seed = 1;
};

/// Reads a flat key=value config file ('#' comments). The design is loaded
/// from the path in the `design` key, resolved against the config file's
/// directory.
SimConfig load_sim_config(const std::filesystem::path&);

/// One species' feature in one run.
struct RunFeature {
    std::string species; // canonical
    std::string accession;
    bool background = false; // competes for ions with foreground features
    FeatureParams params;
    bool dropped = false; // fell below the detection floor
};

/// Everything the generator knows and the pipeline is supposed to recover.
struct SimTruth {
    GroundTruth direction;
    std::map<std::string, std::vector<RunFeature>> features; // run label ->
    std::vector<InterferenceRecord> interference; // from true extents
    std::map<std::string, bool> semi_injected;    // species -> injected flag
};

struct SimDataset {
    std::vector<Identification> identifications;
    std::vector<std::pair<RunKey, Raster>> rasters;
    ProteinMap protein_map;
    std::map<std::string, std::string> protein_sequences;
    GroupMap groups;
    DesignTable design;
    SimTruth truth;

    RasterProvider raster_provider() const;
    std::vector<RunKey> runs() const;
};

/// Amplitude suppression between co-eluting features: every foreground
/// feature overlapped (2-sigma extents) by background features has its
/// amplitude scaled by 1 / (1 + c * sum of overlapping background A / own A).
/// Afterwards any feature below detection_floor * median A is dropped.
void apply_competition(std::vector<RunFeature>& features, double strength,
                       double detection_floor);

SimDataset simulate(const SimConfig& config);

/// Writes the dataset in the pipeline's input formats plus a truth/
/// subdirectory (directions, per-run features, species flags, interference).
void write_dataset(const SimDataset&, const std::filesystem::path& out_dir);

} // namespace lfq
