#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "discus/eval/metrics.hpp"
#include "discus/eval/report.hpp"
#include "discus/eval/study.hpp"
#include "discus/io/config.hpp"
#include "discus/io/image.hpp"
#include "discus/sim/phantom.hpp"

using namespace discus;

namespace {

RealImage ramp_image(int ny, int nx) {
  RealImage img(ny, nx);
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) img(y, x) = static_cast<float>(std::sin(0.3 * x) * std::cos(0.2 * y) + 0.01 * x * y);
  return img;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

StudyConfig tiny_study() {
  StudyConfig c = study1_defaults();
  c.size = 32;
  c.frames = 4;
  c.acs_lines = 4;
  c.motions = {"rotation", "both"};
  c.methods = {"cs", "discus"};
  c.discus_repeats = 2;
  c.train.iterations = 3;
  c.train.batch_frames = 2;
  c.generator = {2, 4, 2, 4, 2, 0.2f};
  c.cs.iterations = 3;
  c.master_seed = 21;
  return c;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("NMSE closed forms") {
    const ComplexImage ref = shepp_logan(32, 0.5);
    CHECK(nmse_db(ref, ref) == kNmseFloorDb);
    CHECK(nmse_db(ref, ComplexImage(32, 32)) == doctest::Approx(0.0).epsilon(1e-12));
    ComplexImage est = ref;
    for (auto& v : est.values()) v *= 0.9f;
    CHECK(nmse_db(ref, est) == doctest::Approx(-20.0).epsilon(1e-5));
    for (double a : {0.25, 0.5, 1.5, 1.99}) {
      ComplexImage e = ref;
      for (auto& v : e.values()) v *= static_cast<float>(a);
      CHECK(nmse_db(ref, e) == doctest::Approx(20 * std::log10(std::abs(1 - a))).epsilon(1e-5));
    }
    CHECK_THROWS_AS(nmse_db(ComplexImage(8, 8), ref), DimensionError);
    CHECK_THROWS_AS(nmse_db(ComplexImage(32, 32), ref), UndefinedError);
  }

  TEST_CASE("SSIM identities and errors") {
    const RealImage a = ramp_image(32, 40);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    RealImage shifted = a;
    for (auto& v : shifted.values()) v += 0.01f;
    const double s = ssim(a, shifted);
    CHECK(s < 1.0);
    CHECK(s > 0.9);
    std::mt19937_64 r(1);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    RealImage noise(32, 40);
    for (auto& v : noise.values()) v = u(r);
    CHECK(std::abs(ssim(a, noise)) < 0.2);
    CHECK_THROWS_AS(ssim(a, RealImage(32, 41)), DimensionError);
    CHECK_THROWS_AS(ssim(RealImage(6, 6), RealImage(6, 6)), DimensionError);
    CHECK_THROWS_AS(ssim(RealImage(16, 16, 1.0f), a), DimensionError);
    CHECK_THROWS_AS(ssim(RealImage(16, 16, 1.0f), RealImage(16, 16, 1.0f)), UndefinedError);
  }

  TEST_CASE("SSIM agrees with values frozen from scikit-image") {
    // structural_similarity(ref, est, data_range=ref.max()-ref.min()) with
    // default arguments on these deterministic images.
    RealImage ref(24, 24), est(24, 24);
    for (int y = 0; y < 24; ++y)
      for (int x = 0; x < 24; ++x) {
        ref(y, x) = static_cast<float>((x * 7 + y * 3) % 11) / 10.0f;
        est(y, x) = static_cast<float>((x * 5 + y * 2) % 13) / 12.0f;
      }
    CHECK(std::abs(ssim(ref, est) - 0.004029228432494917) < 1e-6);
    RealImage half = ref;
    for (auto& v : half.values()) v *= 0.5f;
    CHECK(std::abs(ssim(ref, half) - 0.6411732624710342) < 1e-6);
  }

  TEST_CASE("series metrics are arithmetic means of per-frame values") {
    ImageSeries ref, est;
    for (int t = 0; t < 3; ++t) {
      ref.frames.push_back(shepp_logan(32, 0.1 * t));
      ComplexImage e = ref.frames.back();
      for (auto& v : e.values()) v *= static_cast<float>(0.9 - 0.1 * t);
      est.frames.push_back(e);
    }
    const MetricsReport m = evaluate_series(ref, est, "x");
    REQUIRE(m.nmse.size() == 3u);
    CHECK(m.mean_nmse == doctest::Approx((m.nmse[0] + m.nmse[1] + m.nmse[2]) / 3).epsilon(1e-12));
    CHECK(m.mean_ssim == doctest::Approx((m.ssim[0] + m.ssim[1] + m.ssim[2]) / 3).epsilon(1e-12));
    CHECK(m.nmse[0] == doctest::Approx(-20.0).epsilon(1e-4));
    est.frames.pop_back();
    CHECK_THROWS_AS(evaluate_series(ref, est, "x"), DimensionError);
  }

  TEST_CASE("error panel uses 5x absolute error scaling") {
    ComplexImage ref(8, 8, cfloat{1.0f, 0.0f});
    ComplexImage est = ref;
    est(2, 3) = {0.75f, 0.0f};  // error 0.25 -> clipped
    est(5, 5) = {0.5f, 0.0f};   // error 0.5 -> clipped
    est(6, 1) = {0.875f, 0.0f}; // error 0.125 -> 0.625 of full scale
    const GrayImage p = error_panel(ref, est);
    CHECK(p.width == 8 * 3 + 2 * 2);
    CHECK(p.height == 8);
    const int off = 2 * (8 + 2);
    CHECK(p.pixels[2 * p.width + off + 3] == 255);
    CHECK(p.pixels[2 * p.width + 8 + 2 + 3] == to_gray(0.75, 1.0));
    CHECK(p.pixels[5 * p.width + off + 5] == 255);
    CHECK(p.pixels[0 * p.width + off + 0] == 0);
    CHECK(p.pixels[6 * p.width + off + 1] == to_gray(0.625, 1.0));
    CHECK(p.pixels[0] == 255);
  }

  TEST_CASE("study config parsing") {
    const auto doc = parse_config(R"(
[phantom]
size = 48
motions = ["translation"]
[mask]
accel = 3
[train]
lambda = 0.5
channels = 8
[methods]
run = ["discus", "cs"]
seed = 5
)");
    const StudyConfig c = study_config_from(doc, study1_defaults());
    CHECK(c.size == 48);
    CHECK(c.motions == std::vector<std::string>{"translation"});
    CHECK(c.accel == 3.0);
    CHECK(c.train.lambda == 0.5);
    CHECK(c.generator.channels == 8);
    CHECK(c.master_seed == 5u);
    CHECK_THROWS_AS(study_config_from(parse_config("[train]\nlamda = 1\n"), study1_defaults()), ConfigError);
    CHECK_THROWS_AS(study_config_from(parse_config("[extra]\n"), study1_defaults()), ConfigError);
    CHECK_THROWS_AS(study_config_from(parse_config("[methods]\nrun = [\"sgdip\"]\n"), study1_defaults()), ConfigError);
    CHECK_THROWS_AS(study_config_from(parse_config("[mask]\naccel = \"fast\"\n"), study1_defaults()), ConfigError);
  }

  TEST_CASE("shipped study configs equal the built-in defaults") {
    auto same = [](const StudyConfig& a, const StudyConfig& b) {
      CHECK(a.phantom == b.phantom);
      CHECK(a.size == b.size);
      CHECK(a.frames == b.frames);
      CHECK(a.motions == b.motions);
      CHECK(a.coils == b.coils);
      CHECK(a.mask_kind == b.mask_kind);
      CHECK(a.accel == b.accel);
      CHECK(a.acs_lines == b.acs_lines);
      CHECK(a.snr_db == b.snr_db);
      CHECK(a.train.lambda == b.train.lambda);
      CHECK(a.train.lambda_warmup == b.train.lambda_warmup);
      CHECK(a.train.iterations == b.train.iterations);
      CHECK(a.train.code_std == b.train.code_std);
      CHECK(a.generator.scales == b.generator.scales);
      CHECK(a.generator.channels == b.generator.channels);
      CHECK(a.generator.skip_channels == b.generator.skip_channels);
      CHECK(a.dip_iterations == b.dip_iterations);
      CHECK(a.methods == b.methods);
      CHECK(a.discus_repeats == b.discus_repeats);
      CHECK(a.frame_counts == b.frame_counts);
      CHECK(a.cs.lambda_w == b.cs.lambda_w);
      CHECK(a.lps.lambda_l == b.lps.lambda_l);
      CHECK(a.lps.lambda_s == b.lps.lambda_s);
      CHECK(a.master_seed == b.master_seed);
    };
    const std::filesystem::path dir = DISCUS_SOURCE_DIR "/configs";
    same(study_config_from(load_config(dir / "study1.toml"), StudyConfig{}), study1_defaults());
    same(study_config_from(load_config(dir / "ablation.toml"), StudyConfig{}), ablation_defaults());
  }

  TEST_CASE("simulated problems") {
    StudyConfig c = tiny_study();
    const SimulatedProblem p = simulate_problem(c, "both");
    CHECK(p.true_dimensionality == 2);
    CHECK(p.kspace.frames == 4);
    CHECK(p.reference.frame_count() == 4);
    const SimulatedProblem q = p.first_frames(2);
    CHECK(q.kspace.frames == 2);
    CHECK(q.reference.frames[1] == p.reference.frames[1]);
    CHECK_THROWS_AS(simulate_problem(c, "cardiac"), ConfigError);
    c.phantom = "cardiac";
    c.coils = 2;
    CHECK(simulate_problem(c, "cardiac").kspace.coils == 2);
  }

  TEST_CASE("study reports: row counts, reproducibility, filters") {
    const StudyConfig c = tiny_study();
    const StudyResult a = run_study1(c);
    // 2 series x (cs + 2 DISCUS repeats)
    CHECK(a.runs.size() == 6u);
    const std::string csv = runs_csv(a, {});
    CHECK(count_lines(csv) == 1 + 6);
    CHECK(count_lines(runs_csv(a, {"discus"})) == 1 + 4);
    CHECK(count_lines(frames_csv(a, {})) == 1 + 6 * 4);
    CHECK(a.dimensionality_counts().at("rotation").size() >= 1u);
    const auto sum = a.summary();
    CHECK(sum.size() == 4u);
    for (const auto& row : sum)
      if (row.method == "discus") {
        CHECK(row.runs == 2);
        std::vector<double> v;
        for (const auto& run : a.runs)
          if (run.metrics.method == "discus" && run.metrics.series == row.series) v.push_back(run.metrics.mean_nmse);
        const double mean = (v[0] + v[1]) / 2;
        CHECK(row.mean_nmse == doctest::Approx(mean).epsilon(1e-12));
        CHECK(row.sem_nmse == doctest::Approx(std::abs(v[0] - v[1]) / 2).epsilon(1e-9));
      }
    const StudyResult b = run_study1(c);
    CHECK(runs_csv(b, {}) == csv);
    CHECK(frames_csv(b, {}) == frames_csv(a, {}));
    CHECK_THROWS_AS(runs_csv(a, {"lps"}), ConfigError);

    const auto dir = std::filesystem::temp_directory_path() / "discus_eval_report";
    std::filesystem::remove_all(dir);
    make_report(a, dir, {});
    CHECK(slurp(dir / "runs.csv") == csv);
    CHECK(std::filesystem::exists(dir / "discus_rotation_T4_panel.png"));
    CHECK(std::filesystem::exists(dir / "discus_both_T4_codes.gif"));
    CHECK(std::filesystem::exists(dir / "cs_both_T4_series.gif"));
    CHECK_FALSE(std::filesystem::exists(dir / "cs_both_T4_codes.gif"));
    const GrayImage panel = read_png(dir / "cs_rotation_T4_panel.png");
    CHECK(panel.width == 3 * 32 + 4);
    CHECK_THROWS_AS(make_report(a, dir, {"lps"}), ConfigError);
    CHECK_THROWS_AS(make_report(a, "/proc/no_such_dir/x", {}), IoError);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("ablation grid") {
    StudyConfig c = ablation_defaults();
    c.size = 32;
    c.frames = 4;
    c.acs_lines = 4;
    c.frame_counts = {2, 4};
    c.methods = {"dgs", "discus"};
    c.train.iterations = 2;
    c.train.batch_frames = 2;
    c.generator = {2, 4, 2, 4, 2, 0.2f};
    c.train.lambda = 0.1;
    const StudyResult r = run_ablation(c);
    CHECK(r.runs.size() == 4u);
    CHECK(r.runs[0].metrics.frames == 2);
    CHECK(r.runs[3].metrics.frames == 4);
    CHECK(r.runs[0].metrics.series == "cardiac");
    c.frame_counts = {8};
    CHECK_THROWS_AS(run_ablation(c), ConfigError);
  }
}
