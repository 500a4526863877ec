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
#include "lfq/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "lfq/rng.hpp"
#include "lfq/tsv.hpp"

namespace lfq {

namespace {

constexpr const char* kResidues = "ACDEFGHIKLMNPQRSTVWY";

struct CatalogSpecies {
    SpeciesKey key;
    std::string canonical;
    std::string accession;
    bool background = false;
    double base_amplitude = 0.0; // per design abundance unit
    double mu = 0.0, sigma = 1.0, lambda = 1.0, rho = 0.01, zeta0 = 0.0,
           delta = 0.5;
    bool semi_injected = false;
    Group injected_class = Group::cases;
};

std::string random_peptide(Rng& rng) {
    const std::size_t len = 6 + rng.below(9); // 6..14
    std::string seq;
    seq.reserve(len);
    for (std::size_t i = 0; i + 1 < len; ++i) {
        char c = kResidues[rng.below(20)];
        if (i == 0)
            while (c == 'P') c = kResidues[rng.below(20)];
        seq.push_back(c);
    }
    seq.push_back(rng.uniform() < 0.5 ? 'K' : 'R');
    return seq;
}

void draw_kinetics(CatalogSpecies& sp, const SimConfig& cfg, Rng& rng) {
    sp.base_amplitude = rng.log_uniform(cfg.amp_min, cfg.amp_max);
    sp.mu = rng.uniform(cfg.rt_margin, cfg.run_length - cfg.rt_margin);
    sp.sigma = rng.uniform(cfg.sigma_min, cfg.sigma_max);
    sp.lambda = rng.uniform(cfg.lambda_min, cfg.lambda_max);
    sp.rho = rng.uniform(cfg.rho_min, cfg.rho_max);
    sp.zeta0 = rng.uniform(cfg.mz_min, cfg.mz_max);
    sp.delta = kNeutronMassDa / sp.key.charge;
}

} // namespace

void apply_competition(std::vector<RunFeature>& features, double strength,
                       double detection_floor) {
    // Suppress foreground amplitudes against a snapshot of the originals.
    std::vector<double> original(features.size());
    for (std::size_t i = 0; i < features.size(); ++i)
        original[i] = features[i].params.amplitude;

    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].background) continue;
        const TimeExtent fg = extent_2sigma(features[i].params);
        double overlapping = 0.0;
        for (std::size_t j = 0; j < features.size(); ++j) {
            if (!features[j].background) continue;
            if (pairwise_distance(fg, extent_2sigma(features[j].params)) == 0.0)
                overlapping += original[j];
        }
        if (overlapping > 0.0 && original[i] > 0.0)
            features[i].params.amplitude =
                original[i] / (1.0 + strength * overlapping / original[i]);
    }

    if (features.empty()) return;
    std::vector<double> amplitudes;
    amplitudes.reserve(features.size());
    for (const auto& f : features) amplitudes.push_back(f.params.amplitude);
    std::sort(amplitudes.begin(), amplitudes.end());
    const std::size_t n = amplitudes.size();
    const double med = n % 2 ? amplitudes[n / 2]
                             : 0.5 * (amplitudes[n / 2 - 1] + amplitudes[n / 2]);
    const double floor = detection_floor * med;
    for (auto& f : features)
        if (f.params.amplitude < floor) f.dropped = true;
}

SimDataset simulate(const SimConfig& cfg) {
    if (cfg.design.rows.empty()) throw DataError("simulate: empty design");
    const std::size_t case_col = cfg.design.class_index(cfg.case_class);
    const std::size_t ctrl_col = cfg.design.class_index(cfg.control_class);
    if (cfg.bio_replicates < 1 || cfg.tech_replicates < 1)
        throw DataError("simulate: replicate counts must be >= 1");
    if (!(cfg.run_length > 0)) throw DataError("simulate: run length must be > 0");

    SimDataset ds;
    ds.design = cfg.design;

    // ---- catalog (stream 0) -------------------------------------------
    Rng catalog_rng = Rng::stream(cfg.seed, 0);
    std::vector<CatalogSpecies> catalog;
    std::set<std::string> used_sequences;
    std::set<std::string> used_canonicals;

    for (const auto& row : cfg.design.rows) {
        const int span = cfg.species_max - cfg.species_min;
        const int n_species =
            cfg.species_min +
            (span > 0 ? static_cast<int>(catalog_rng.below(
                            static_cast<std::size_t>(span) + 1))
                      : 0);
        const int n_peptides = (n_species + 1) / 2;
        const int n_extra = n_species - n_peptides;

        std::vector<std::string> peptides;
        std::string protein_seq;
        for (int i = 0; i < n_peptides; ++i) {
            std::string seq = random_peptide(catalog_rng);
            while (used_sequences.count(seq)) seq = random_peptide(catalog_rng);
            used_sequences.insert(seq);
            peptides.push_back(seq);
            protein_seq += seq;
            ds.protein_map.entries[seq].insert(row.accession);
        }
        ds.protein_sequences[row.accession] = protein_seq;

        auto add_species = [&](const std::string& seq, int charge) {
            CatalogSpecies sp;
            sp.key.sequence = seq;
            sp.key.charge = charge;
            sp.canonical = render_species(sp.key);
            sp.accession = row.accession;
            sp.background =
                !cfg.background_prefix.empty() &&
                row.accession.compare(0, cfg.background_prefix.size(),
                                      cfg.background_prefix) == 0;
            draw_kinetics(sp, cfg, catalog_rng);
            used_canonicals.insert(sp.canonical);
            catalog.push_back(std::move(sp));
        };
        for (int i = 0; i < n_peptides; ++i) add_species(peptides[i], 2);
        for (int i = 0; i < n_extra; ++i) add_species(peptides[i], 3);
    }

    // ---- semi-tryptic injection (stream 1) ----------------------------
    Rng inject_rng = Rng::stream(cfg.seed, 1);
    const std::size_t base_count = catalog.size();
    auto inject = [&](double rate, Group cls) {
        const int wanted =
            static_cast<int>(std::lround(rate * static_cast<double>(base_count)));
        int made = 0, attempts = 0;
        while (made < wanted && attempts < wanted * 50 + 100) {
            ++attempts;
            const CatalogSpecies& parent = catalog[inject_rng.below(base_count)];
            if (parent.base_amplitude < cfg.semi_parent_min_amp) continue;
            const std::string& seq = parent.key.sequence;
            std::vector<std::size_t> cuts;
            for (std::size_t j = 5; j < seq.size(); ++j)
                if (seq[j - 1] != 'K' && seq[j - 1] != 'R') cuts.push_back(j);
            if (cuts.empty()) continue;
            const std::string prefix =
                seq.substr(0, cuts[inject_rng.below(cuts.size())]);
            CatalogSpecies sp;
            sp.key.sequence = prefix;
            sp.key.charge = parent.key.charge;
            sp.canonical = render_species(sp.key);
            if (used_canonicals.count(sp.canonical)) continue;
            sp.accession = parent.accession;
            sp.background = parent.background;
            draw_kinetics(sp, cfg, inject_rng);
            sp.base_amplitude = parent.base_amplitude *
                                inject_rng.uniform(cfg.semi_amp_min,
                                                   cfg.semi_amp_max);
            sp.semi_injected = true;
            sp.injected_class = cls;
            used_canonicals.insert(sp.canonical);
            used_sequences.insert(prefix);
            ds.protein_map.entries[prefix].insert(parent.accession);
            catalog.push_back(std::move(sp));
            ++made;
        }
    };
    inject(cfg.semi_rate_case, Group::cases);
    inject(cfg.semi_rate_control, Group::controls);

    for (const auto& sp : catalog)
        ds.truth.semi_injected[sp.canonical] = sp.semi_injected;

    // ---- samples and groups -------------------------------------------
    struct Sample {
        std::string id;
        Group group;
        std::size_t design_col;
    };
    std::vector<Sample> samples;
    auto add_samples = [&](const std::string& cls, Group g, std::size_t col) {
        for (int b = 1; b <= cfg.bio_replicates; ++b) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%s%02d", cls.c_str(), b);
            samples.push_back({buf, g, col});
        }
    };
    add_samples(cfg.case_class, Group::cases, case_col);
    add_samples(cfg.control_class, Group::controls, ctrl_col);
    for (const auto& s : samples) ds.groups[s.id] = s.group;

    // Biological jitter, fixed across a sample's technical replicates.
    std::vector<std::vector<double>> bio_jitter(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
        Rng rng = Rng::stream(cfg.seed, 1000 + s);
        bio_jitter[s].resize(catalog.size());
        for (std::size_t i = 0; i < catalog.size(); ++i)
            bio_jitter[s][i] = std::exp(rng.normal(0.0, cfg.bio_cv));
    }

    // ---- per-run generation (streams 2000+) ----------------------------
    std::size_t run_index = 0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        for (int t = 1; t <= cfg.tech_replicates; ++t, ++run_index) {
            RunKey run{samples[s].id, "t" + std::to_string(t)};
            Rng rng = Rng::stream(cfg.seed, 2000 + run_index);

            std::vector<RunFeature> features;
            std::vector<std::size_t> feature_species;
            for (std::size_t i = 0; i < catalog.size(); ++i) {
                const CatalogSpecies& sp = catalog[i];
                // one tech draw and one rt draw per catalog entry keeps the
                // stream aligned whether or not the species is present
                const double tech = std::exp(rng.normal(0.0, cfg.tech_cv));
                const double rt_shift =
                    cfg.rt_jitter > 0 ? rng.normal(0.0, cfg.rt_jitter) : 0.0;

                const double design_abundance =
                    cfg.design.abundance_of(sp.accession, samples[s].design_col);
                if (design_abundance <= 0.0) continue;
                if (sp.semi_injected && sp.injected_class != samples[s].group)
                    continue;

                RunFeature f;
                f.species = sp.canonical;
                f.accession = sp.accession;
                f.background = sp.background;
                f.params.amplitude = sp.base_amplitude * design_abundance *
                                     bio_jitter[s][i] * tech;
                f.params.mu = sp.mu + rt_shift;
                f.params.sigma = sp.sigma;
                f.params.zeta0 = sp.zeta0;
                f.params.delta = sp.delta;
                f.params.lambda = sp.lambda;
                f.params.rho = sp.rho;
                f.params.n_peaks = 4;
                features.push_back(std::move(f));
                feature_species.push_back(i);
            }

            if (cfg.competition == SimConfig::Competition::proportional)
                apply_competition(features, cfg.competition_strength,
                                  cfg.detection_floor);

            // Raster points (shared 1 s integer time grid, five m/z offsets
            // per isotope peak) and CID identifications, drawn per feature in
            // catalog order: a feature's randomness is self-contained, so
            // appending species to the catalog leaves earlier features'
            // draws untouched.
            std::map<std::pair<double, double>, double> grid;
            for (const auto& f : features) {
                if (f.dropped) continue;
                const FeatureParams& p = f.params;
                const double t_lo = std::ceil(p.mu - 2.5 * p.sigma);
                const double t_hi = std::floor(p.mu + 2.5 * p.sigma);
                for (double tt = t_lo; tt <= t_hi; tt += 1.0) {
                    if (tt < 0 || tt > cfg.run_length) continue;
                    for (int k = 0; k < p.n_peaks; ++k) {
                        for (int off = -2; off <= 2; ++off) {
                            const double mz = p.zeta0 + k * p.delta + off * p.rho;
                            double v = evaluate_model(p, tt, mz);
                            if (cfg.noise > 0)
                                v += rng.normal(0.0, cfg.noise * p.amplitude);
                            grid[{tt, mz}] += v;
                        }
                    }
                }

                const double mean =
                    cfg.cid_cap *
                    (1.0 - std::exp(-cfg.cid_rate * p.amplitude / cfg.cid_cap));
                const int count = rng.poisson(mean);
                for (int c = 0; c < count; ++c) {
                    Identification id;
                    id.sample_id = run.sample_id;
                    id.replicate_id = run.replicate_id;
                    id.species = parse_species(f.species);
                    id.retention_time = std::max(
                        0.0, rng.uniform(p.mu - 2 * p.sigma, p.mu + 2 * p.sigma));
                    id.precursor_mz =
                        p.zeta0 + rng.uniform(-cfg.mz_error, cfg.mz_error);
                    id.fdr = rng.uniform(0.0, cfg.fdr_max);
                    ds.identifications.push_back(std::move(id));
                }
            }
            Raster raster;
            raster.sample_id = run.sample_id;
            raster.replicate_id = run.replicate_id;
            raster.points.reserve(grid.size());
            for (const auto& [key, v] : grid)
                raster.points.push_back({key.first, key.second, std::max(v, 0.0)});

            ds.truth.features[run.label()] = features;
            ds.rasters.emplace_back(run, std::move(raster));
        }
    }

    // ---- truth ----------------------------------------------------------
    for (const auto& row : cfg.design.rows) {
        const double c = row.abundance[case_col];
        const double k = row.abundance[ctrl_col];
        ds.truth.direction.labels[row.accession] =
            c > k ? TruthLabel::up : c < k ? TruthLabel::down : TruthLabel::unchanged;
    }

    if (!cfg.background_prefix.empty()) {
        std::map<std::string, std::map<std::string, TimeExtent>> fg;
        std::map<std::string, std::vector<TimeExtent>> bg;
        std::vector<std::string> case_runs;
        for (const auto& [label, feats] : ds.truth.features) {
            std::size_t sep = label.find("__");
            const std::string sample = label.substr(0, sep);
            if (ds.groups.at(sample) != Group::cases) continue;
            case_runs.push_back(label);
            for (const auto& f : feats) {
                if (f.dropped) continue;
                if (f.background)
                    bg[label].push_back(extent_2sigma(f.params));
                else
                    fg[f.species][label] = extent_2sigma(f.params);
            }
        }
        ds.truth.interference = interference_distance(fg, bg, case_runs);
    }

    return ds;
}

RasterProvider SimDataset::raster_provider() const {
    return [this](const RunKey& run) -> const Raster* {
        for (const auto& [key, raster] : rasters)
            if (key == run) return &raster;
        return nullptr;
    };
}

std::vector<RunKey> SimDataset::runs() const {
    std::vector<RunKey> out;
    out.reserve(rasters.size());
    for (const auto& [key, raster] : rasters) out.push_back(key);
    return out;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config '" + path.string() + "'");

    SimConfig cfg;
    bool have_design = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        // trim
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        std::size_t begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos) continue;
        line = line.substr(begin);

        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(path.string() + ": line " +
                                 std::to_string(line_no) + ": expected key=value",
                             line_no);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);

        auto as_double = [&](const std::string& v) {
            try {
                std::size_t used = 0;
                double d = std::stod(v, &used);
                if (used != v.size()) throw std::invalid_argument(v);
                return d;
            } catch (const std::exception&) {
                throw ParseError(path.string() + ": line " +
                                     std::to_string(line_no) +
                                     ": bad number '" + v + "'",
                                 line_no);
            }
        };
        auto as_int = [&](const std::string& v) {
            return static_cast<int>(as_double(v));
        };

        if (key == "design") {
            std::filesystem::path dp = value;
            if (dp.is_relative()) dp = path.parent_path() / dp;
            cfg.design = read_design(dp);
            have_design = true;
        } else if (key == "case_class") cfg.case_class = value;
        else if (key == "control_class") cfg.control_class = value;
        else if (key == "bio_replicates") cfg.bio_replicates = as_int(value);
        else if (key == "tech_replicates") cfg.tech_replicates = as_int(value);
        else if (key == "species_min") cfg.species_min = as_int(value);
        else if (key == "species_max") cfg.species_max = as_int(value);
        else if (key == "run_length") cfg.run_length = as_double(value);
        else if (key == "rt_margin") cfg.rt_margin = as_double(value);
        else if (key == "amp_min") cfg.amp_min = as_double(value);
        else if (key == "amp_max") cfg.amp_max = as_double(value);
        else if (key == "sigma_min") cfg.sigma_min = as_double(value);
        else if (key == "sigma_max") cfg.sigma_max = as_double(value);
        else if (key == "lambda_min") cfg.lambda_min = as_double(value);
        else if (key == "lambda_max") cfg.lambda_max = as_double(value);
        else if (key == "rho_min") cfg.rho_min = as_double(value);
        else if (key == "rho_max") cfg.rho_max = as_double(value);
        else if (key == "mz_min") cfg.mz_min = as_double(value);
        else if (key == "mz_max") cfg.mz_max = as_double(value);
        else if (key == "noise") cfg.noise = as_double(value);
        else if (key == "bio_cv") cfg.bio_cv = as_double(value);
        else if (key == "tech_cv") cfg.tech_cv = as_double(value);
        else if (key == "rt_jitter") cfg.rt_jitter = as_double(value);
        else if (key == "competition") {
            if (value == "off") cfg.competition = SimConfig::Competition::off;
            else if (value == "proportional")
                cfg.competition = SimConfig::Competition::proportional;
            else
                throw ParseError(path.string() + ": line " +
                                     std::to_string(line_no) +
                                     ": competition must be off|proportional",
                                 line_no);
        }
        else if (key == "competition_strength")
            cfg.competition_strength = as_double(value);
        else if (key == "detection_floor") cfg.detection_floor = as_double(value);
        else if (key == "background_prefix") cfg.background_prefix = value;
        else if (key == "semi_rate_case") cfg.semi_rate_case = as_double(value);
        else if (key == "semi_rate_control")
            cfg.semi_rate_control = as_double(value);
        else if (key == "semi_amp_min") cfg.semi_amp_min = as_double(value);
        else if (key == "semi_amp_max") cfg.semi_amp_max = as_double(value);
        else if (key == "semi_parent_min_amp")
            cfg.semi_parent_min_amp = as_double(value);
        else if (key == "cid_rate") cfg.cid_rate = as_double(value);
        else if (key == "cid_cap") cfg.cid_cap = as_double(value);
        else if (key == "mz_error") cfg.mz_error = as_double(value);
        else if (key == "fdr_max") cfg.fdr_max = as_double(value);
        else if (key == "seed")
            cfg.seed = static_cast<std::uint64_t>(as_double(value));
        else
            throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                                 ": unknown key '" + key + "'",
                             line_no);
    }
    if (!have_design)
        throw DataError(path.string() + ": config must name a design file");
    cfg.design.class_index(cfg.case_class);
    cfg.design.class_index(cfg.control_class);
    return cfg;
}

void write_dataset(const SimDataset& ds, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "rasters");
    std::filesystem::create_directories(dir / "truth");

    write_identifications(dir / "identifications.tsv", ds.identifications);
    write_protein_map(dir / "protein_map.tsv", ds.protein_map);
    write_protein_sequences(dir / "protein_sequences.tsv", ds.protein_sequences);
    write_design(dir / "design.tsv", ds.design);
    write_groups(dir / "groups.tsv", ds.groups);
    for (const auto& [run, raster] : ds.rasters)
        write_raster(dir / "rasters" / (run.label() + ".raster.tsv"), raster);

    {
        TsvWriter out(dir / "truth" / "directions.tsv",
                      {"protein_accession", "direction"});
        for (const auto& [acc, label] : ds.truth.direction.labels)
            out.row({acc, to_string(label)});
    }
    {
        TsvWriter out(dir / "truth" / "species.tsv",
                      {"species", "semi_injected"});
        for (const auto& [species, injected] : ds.truth.semi_injected)
            out.row({species, injected ? "1" : "0"});
    }
    {
        TsvWriter out(dir / "truth" / "features.tsv",
                      {"run", "species", "accession", "A", "mu", "sigma",
                       "zeta0", "delta", "lambda", "rho", "dropped"});
        for (const auto& [label, feats] : ds.truth.features)
            for (const auto& f : feats)
                out.row({label, f.species, f.accession,
                         fmt_double(f.params.amplitude), fmt_double(f.params.mu),
                         fmt_double(f.params.sigma), fmt_double(f.params.zeta0),
                         fmt_double(f.params.delta), fmt_double(f.params.lambda),
                         fmt_double(f.params.rho), f.dropped ? "1" : "0"});
    }
    {
        TsvWriter out(dir / "truth" / "interference.tsv",
                      {"species", "d_i", "cohort"});
        for (const auto& rec : ds.truth.interference)
            out.row({rec.species,
                     rec.distance ? fmt_double(*rec.distance) : "NA",
                     to_string(rec.cohort)});
    }
}

} // namespace lfq
