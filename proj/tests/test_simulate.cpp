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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <unistd.h>

#include "lfq/pipeline.hpp"
#include "lfq/simulate.hpp"

using namespace lfq;
namespace fs = std::filesystem;

namespace {

DesignTable uniform_design(int proteins, double case_level, double ctrl_level,
                           const std::string& prefix = "P") {
    DesignTable d;
    d.classes = {"case", "control"};
    for (int i = 0; i < proteins; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%s%03d", prefix.c_str(), i);
        d.rows.push_back({buf, {case_level, ctrl_level}});
    }
    return d;
}

SimConfig small_config() {
    SimConfig cfg;
    cfg.design = uniform_design(6, 3.0, 3.0);
    cfg.bio_replicates = 2;
    cfg.tech_replicates = 2;
    cfg.species_min = 2;
    cfg.species_max = 4;
    cfg.run_length = 1200.0;
    cfg.cid_rate = 2e-3;
    cfg.seed = 11;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("identical configs generate byte-identical datasets") {
    const SimConfig cfg = small_config();
    const SimDataset a = simulate(cfg);
    const SimDataset b = simulate(cfg);
    CHECK(a.identifications.size() == b.identifications.size());

    const fs::path root =
        fs::temp_directory_path() / ("lfq_sim_" + std::to_string(::getpid()));
    write_dataset(a, root / "a");
    write_dataset(b, root / "b");
    int files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
        if (!entry.is_regular_file()) continue;
        ++files;
        const fs::path rel = fs::relative(entry.path(), root / "a");
        CHECK(slurp(entry.path()) == slurp(root / "b" / rel));
    }
    CHECK(files > 10);
    fs::remove_all(root);
}

TEST_CASE("different seeds differ") {
    SimConfig cfg = small_config();
    const SimDataset a = simulate(cfg);
    cfg.seed = 12;
    const SimDataset b = simulate(cfg);
    CHECK(a.identifications.size() != b.identifications.size());
}

TEST_CASE("emitted identifications and rasters are consistent with the truth") {
    const SimDataset ds = simulate(small_config());

    std::set<std::string> known_species;
    for (const auto& [species, injected] : ds.truth.semi_injected)
        known_species.insert(species);
    for (const auto& id : ds.identifications)
        CHECK(known_species.count(render_species(id.species)) == 1);

    // every non-dropped feature leaves raster points near its apex
    for (const auto& [run, raster] : ds.rasters) {
        const auto& feats = ds.truth.features.at(run.label());
        for (const auto& f : feats) {
            if (f.dropped) continue;
            bool seen = false;
            for (const auto& pt : raster.points)
                if (std::abs(pt.time - f.params.mu) <= 2.0 &&
                    std::abs(pt.mz - f.params.zeta0) <= 0.1)
                    seen = true;
            CHECK(seen);
        }
        // raster invariants hold
        for (std::size_t i = 1; i < raster.points.size(); ++i) {
            const auto& p = raster.points[i - 1];
            const auto& q = raster.points[i];
            CHECK(std::tie(p.time, p.mz) < std::tie(q.time, q.mz));
        }
    }

    // identifications land inside the 2-sigma extent of their feature
    for (const auto& id : ds.identifications) {
        const std::string run = id.sample_id + "__" + id.replicate_id;
        const std::string canonical = render_species(id.species);
        bool found = false;
        for (const auto& f : ds.truth.features.at(run)) {
            if (f.species != canonical) continue;
            found = true;
            CHECK(id.retention_time >= f.params.mu - 2 * f.params.sigma - 1e-9);
            CHECK(id.retention_time <= f.params.mu + 2 * f.params.sigma + 1e-9);
            CHECK(std::abs(id.precursor_mz - f.params.zeta0) <= 0.0031);
        }
        CHECK(found);
    }
}

TEST_CASE("zero-abundance classes produce no features") {
    SimConfig cfg = small_config();
    cfg.design = uniform_design(4, 2.0, 0.0); // absent from controls
    const SimDataset ds = simulate(cfg);
    for (const auto& [label, feats] : ds.truth.features) {
        const std::string sample = label.substr(0, label.find("__"));
        if (ds.groups.at(sample) == Group::controls) CHECK(feats.empty());
    }
}

TEST_CASE("noiseless fits recover the simulated truth end to end") {
    SimConfig cfg;
    cfg.design = uniform_design(10, 3.0, 3.0);
    cfg.bio_replicates = 1;
    cfg.tech_replicates = 1;
    cfg.species_min = 1;
    cfg.species_max = 2;
    cfg.run_length = 8000.0; // spread features out
    cfg.mz_min = 400, cfg.mz_max = 1500;
    cfg.noise = 0.0;
    cfg.bio_cv = 0.0;
    cfg.tech_cv = 0.0;
    cfg.rt_jitter = 0.0;
    cfg.cid_rate = 1e-2;
    cfg.seed = 4;
    const SimDataset ds = simulate(cfg);

    QuantifyOptions options;
    options.min_presence = 1;
    const QuantifyOutput out = run_quantify(
        ds.identifications, ds.runs(), ds.raster_provider(), ds.groups, options);

    const auto& feats = ds.truth.features.begin()->second;
    int checked = 0;
    for (const auto& f : feats) {
        if (f.dropped) continue;
        // species may lack identifications at low amplitude; skip those
        std::size_t e = 0;
        bool in_matrix = false;
        for (; e < out.abundance_replicate.entities.size(); ++e)
            if (out.abundance_replicate.entities[e] == f.species) {
                in_matrix = true;
                break;
            }
        if (!in_matrix) continue;
        const Cell cell = out.abundance_replicate.cell(e, 0);
        if (!cell) continue;
        const double truth_volume = analytic_volume(f.params);
        CHECK(std::abs(*cell - truth_volume) / truth_volume < 1e-3);
        ++checked;
    }
    CHECK(checked >= 5);

    // per run, the ion-quantified species are a subset of the counted ones
    const QuantMatrix& counts = out.counts_replicate;
    const QuantMatrix& volumes = out.abundance_replicate;
    for (std::size_t e = 0; e < volumes.entities.size(); ++e) {
        const std::size_t ce = counts.entity_index(volumes.entities[e]);
        for (std::size_t j = 0; j < volumes.samples.size(); ++j) {
            if (!volumes.cell(e, j)) continue;
            REQUIRE(counts.cell(ce, j).has_value());
            CHECK(*counts.cell(ce, j) >= 1.0);
        }
    }
}

TEST_CASE("spike-in sweep trends") {
    // constant background plus a case-only spike class swept over levels:
    // fitted spike abundances grow with the level, and so does the number
    // of spike proteins called up at a fixed FDR
    const double levels[3] = {0.5, 4.0, 24.0};
    std::vector<double> mean_spike_abundance;
    std::vector<int> up_calls;

    for (double level : levels) {
        SimConfig cfg;
        DesignTable d;
        d.classes = {"spike", "qc"};
        for (int i = 0; i < 40; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "BG%03d", i);
            d.rows.push_back({buf, {60.0, 60.0}});
        }
        for (int i = 0; i < 20; ++i) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "SPK%03d", i);
            d.rows.push_back({buf, {level, 0.0}});
        }
        cfg.design = d;
        cfg.case_class = "spike";
        cfg.control_class = "qc";
        cfg.bio_replicates = 8;
        cfg.tech_replicates = 1;
        cfg.species_min = 2;
        cfg.species_max = 4;
        cfg.run_length = 2000.0;
        cfg.cid_rate = 0.02;
        cfg.cid_cap = 20.0;
        cfg.seed = 71;
        const SimDataset ds = simulate(cfg);
        const QuantifyOutput out =
            run_quantify(ds.identifications, ds.runs(), ds.raster_provider(),
                         ds.groups, QuantifyOptions{});

        double sum = 0.0;
        int cells = 0;
        const QuantMatrix& volumes = out.abundance_replicate;
        for (std::size_t e = 0; e < volumes.entities.size(); ++e) {
            const std::string seq = parse_species(volumes.entities[e]).sequence;
            const std::string& acc = *ds.protein_map.proteins_of(seq).begin();
            if (acc.compare(0, 3, "SPK") != 0) continue;
            for (std::size_t j = 0; j < volumes.samples.size(); ++j)
                if (volumes.cell(e, j)) {
                    sum += *volumes.cell(e, j);
                    ++cells;
                }
        }
        mean_spike_abundance.push_back(cells ? sum / cells : 0.0);

        PermutationOptions perm;
        perm.permutations = 400;
        perm.seed = 3;
        const auto results =
            permutation_test(out.abundance_final, ds.protein_map, perm);
        int up = 0;
        for (const auto& r : results)
            if (r.accession.compare(0, 3, "SPK") == 0 && r.q_value <= 0.05 &&
                r.tau > 0)
                ++up;
        up_calls.push_back(up);
    }

    CHECK(mean_spike_abundance[0] < mean_spike_abundance[1]);
    CHECK(mean_spike_abundance[1] < mean_spike_abundance[2]);
    CHECK(up_calls[0] <= up_calls[1]);
    CHECK(up_calls[1] <= up_calls[2]);
    CHECK(up_calls[2] >= 15); // most of the 20 spiked proteins at the top
}

TEST_CASE("competition suppresses and drops overlapping foreground features") {
    auto feature = [](const std::string& species, const std::string& acc,
                      bool background, double amplitude, double mu) {
        RunFeature f;
        f.species = species;
        f.accession = acc;
        f.background = background;
        f.params.amplitude = amplitude;
        f.params.mu = mu;
        f.params.sigma = 2.0;
        f.params.zeta0 = 500.0;
        f.params.delta = 0.5;
        f.params.lambda = 1.0;
        f.params.rho = 0.01;
        f.params.n_peaks = 4;
        return f;
    };

    SUBCASE("no overlap leaves amplitudes unchanged") {
        std::vector<RunFeature> feats = {
            feature("A+2", "BG1", false, 100.0, 100.0),
            feature("B+2", "SPK1", true, 500.0, 300.0)};
        apply_competition(feats, 3.0, 0.01);
        CHECK(feats[0].params.amplitude == 100.0);
        CHECK(!feats[0].dropped);
    }
    SUBCASE("overlap reduces by the proportional factor") {
        std::vector<RunFeature> feats = {
            feature("A+2", "BG1", false, 100.0, 100.0),
            feature("B+2", "SPK1", true, 50.0, 101.0)};
        apply_competition(feats, 3.0, 0.0);
        // 100 / (1 + 3 * 50 / 100)
        CHECK(feats[0].params.amplitude == doctest::Approx(40.0));
        CHECK(feats[1].params.amplitude == 50.0); // background untouched
    }
    SUBCASE("a large background competitor drops the feature entirely") {
        std::vector<RunFeature> feats = {
            feature("A+2", "BG1", false, 100.0, 100.0),
            feature("B+2", "BG2", false, 90.0, 400.0),
            feature("C+2", "BG3", false, 110.0, 700.0),
            feature("S+2", "SPK1", true, 100000.0, 101.0)};
        apply_competition(feats, 3.0, 0.01);
        CHECK(feats[0].dropped);       // suppressed below 1% of the median
        CHECK(!feats[1].dropped);
        CHECK(!feats[2].dropped);
    }
}

TEST_CASE("semi-tryptic injection") {
    SimConfig cfg = small_config();
    SUBCASE("rate zero injects nothing") {
        const SimDataset ds = simulate(cfg);
        for (const auto& [species, injected] : ds.truth.semi_injected)
            CHECK(!injected);
    }
    SUBCASE("injected species are class-bound, low-abundance, semi-tryptic") {
        cfg.semi_rate_case = 0.2;
        const SimDataset ds = simulate(cfg);
        int injected_count = 0;
        for (const auto& [species, injected] : ds.truth.semi_injected)
            if (injected) ++injected_count;
        CHECK(injected_count > 0);

        for (const auto& [label, feats] : ds.truth.features) {
            const std::string sample = label.substr(0, label.find("__"));
            const bool is_case = ds.groups.at(sample) == Group::cases;
            for (const auto& f : feats)
                if (ds.truth.semi_injected.at(f.species)) CHECK(is_case);
        }

        // every injected species classifies strictly semi-tryptic in its
        // parent protein context
        for (const auto& [species, injected] : ds.truth.semi_injected) {
            if (!injected) continue;
            const SpeciesKey key = parse_species(species);
            CHECK(best_tryptic_status(key, ds.protein_map,
                                      ds.protein_sequences) ==
                  TrypticStatus::strictly_semi_tryptic);
        }
    }
}

TEST_CASE("config file round trip") {
    const fs::path dir =
        fs::temp_directory_path() / ("lfq_cfg_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    write_design(dir / "design.tsv", uniform_design(3, 2.0, 1.0));
    {
        std::ofstream out(dir / "sim.cfg");
        out << "# comment line\n"
            << "design=design.tsv\n"
            << "case_class=case\n"
            << "control_class=control\n"
            << "bio_replicates=3\n"
            << "tech_replicates=1\n"
            << "competition=proportional\n"
            << "background_prefix=SPK\n"
            << "seed=99\n";
    }
    const SimConfig cfg = load_sim_config(dir / "sim.cfg");
    CHECK(cfg.design.rows.size() == 3);
    CHECK(cfg.bio_replicates == 3);
    CHECK(cfg.competition == SimConfig::Competition::proportional);
    CHECK(cfg.background_prefix == "SPK");
    CHECK(cfg.seed == 99);

    SUBCASE("unknown keys are rejected") {
        std::ofstream out(dir / "bad.cfg");
        out << "design=design.tsv\nnot_a_key=1\n";
        out.close();
        CHECK_THROWS_AS(load_sim_config(dir / "bad.cfg"), ParseError);
    }
    fs::remove_all(dir);
}
