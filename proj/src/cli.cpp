#include "cuspfit/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>

#include "cuspfit/errors.hpp"
#include "cuspfit/io.hpp"
#include "cuspfit/metrics.hpp"
#include "cuspfit/pipeline.hpp"
#include "cuspfit/synthdata.hpp"

namespace cuspfit {
namespace {

namespace fs = std::filesystem;

std::string default_out_dir() {
  const char* env = std::getenv("CUSPFIT_OUT");
  return (env != nullptr && *env != '\0') ? env : ".";
}

fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec)
    throw IoError("cannot create output directory '" + dir +
                  "': " + ec.message());
  return p;
}

void log_line(const std::string& msg) { std::cerr << msg << std::endl; }

std::string safe_label(const std::string& label) {
  std::string out = label;
  for (char& ch : out)
    if (ch == '/' || ch == '\\' || ch == ' ') ch = '_';
  return out;
}

/// Template-shape flags shared by `template`, `synth` and the fit
/// commands (where they describe the starting surface when no template
/// file is supplied).
struct TemplateFlags {
  TemplateSpec spec;

  void attach(CLI::App* cmd) {
    cmd->add_option("--radius", spec.radius, "annulus radius")
        ->capture_default_str();
    cmd->add_option("--height", spec.height, "skirt height")
        ->capture_default_str();
    cmd->add_option("--leaflets", spec.leaflet_count, "leaflet lobe count")
        ->capture_default_str();
    cmd->add_option("--n-axial", spec.n_axial, "axial control rows")
        ->capture_default_str();
    cmd->add_option("--n-circ", spec.n_circ_free,
                    "free circumferential control columns")
        ->capture_default_str();
    cmd->add_option("--degree-axial", spec.degree_axial,
                    "axial B-spline degree")
        ->capture_default_str();
    cmd->add_option("--degree-circ", spec.degree_circ,
                    "circumferential B-spline degree")
        ->capture_default_str();
    cmd->add_option("--scallop-depth", spec.scallop_depth,
                    "free-edge scallop depth as a fraction of height")
        ->capture_default_str();
  }
};

/// Fit-configuration flags. Precedence: defaults, then --config file
/// values, then flags given on the command line.
struct FitFlags {
  CLI::App* cmd = nullptr;
  std::string config_path;
  FitConfig staged;

  void attach(CLI::App* c) {
    cmd = c;
    cmd->add_option("--config", config_path,
                    "key=value config file; explicit flags override it")
        ->check(CLI::ExistingFile);
    cmd->add_option("--wcd", staged.weights.w_cd, "Chamfer distance weight")
        ->capture_default_str();
    cmd->add_option("--whd", staged.weights.w_hd, "Hausdorff distance weight")
        ->capture_default_str();
    cmd->add_option("--wa", staged.weights.w_a, "annulus distance weight")
        ->capture_default_str();
    cmd->add_option("--worth", staged.weights.w_orth,
                    "parameterization orthogonality weight")
        ->capture_default_str();
    cmd->add_option("--wtpe", staged.weights.w_tpe,
                    "tangent-point energy weight")
        ->capture_default_str();
    cmd->add_option("--wnorm", staged.weights.w_norm,
                    "normal consistency weight")
        ->capture_default_str();
    cmd->add_option("--alpha", staged.weights.tpe_alpha,
                    "tangent-point energy exponent")
        ->capture_default_str();
    cmd->add_option("--delta", staged.delta, "optimizer step size")
        ->capture_default_str();
    cmd->add_option("--tmax", staged.t_max, "gradient-descent iterations")
        ->capture_default_str();
    cmd->add_option("--nu", staged.sample_nu, "axial sample stations")
        ->capture_default_str();
    cmd->add_option("--nv", staged.sample_nv,
                    "circumferential sample stations")
        ->capture_default_str();
    cmd->add_option("--record-every", staged.record_every,
                    "loss-history recording stride")
        ->capture_default_str();
    cmd->add_option("--threads", staged.threads,
                    "worker threads (0 = all cores)")
        ->capture_default_str();
    cmd->add_flag("--plain-descent", staged.plain_descent,
                  "fixed-step descent instead of Adam");
    cmd->add_flag("--early-stop", staged.early_stop,
                  "stop when the loss plateaus");
  }

  FitConfig build() const {
    FitConfig cfg;
    if (!config_path.empty()) apply_config(load_key_value(config_path), &cfg);
    const auto passed = [&](const char* name) { return cmd->count(name) > 0; };
    if (passed("--wcd")) cfg.weights.w_cd = staged.weights.w_cd;
    if (passed("--whd")) cfg.weights.w_hd = staged.weights.w_hd;
    if (passed("--wa")) cfg.weights.w_a = staged.weights.w_a;
    if (passed("--worth")) cfg.weights.w_orth = staged.weights.w_orth;
    if (passed("--wtpe")) cfg.weights.w_tpe = staged.weights.w_tpe;
    if (passed("--wnorm")) cfg.weights.w_norm = staged.weights.w_norm;
    if (passed("--alpha")) cfg.weights.tpe_alpha = staged.weights.tpe_alpha;
    if (passed("--delta")) cfg.delta = staged.delta;
    if (passed("--tmax")) cfg.t_max = staged.t_max;
    if (passed("--nu")) cfg.sample_nu = staged.sample_nu;
    if (passed("--nv")) cfg.sample_nv = staged.sample_nv;
    if (passed("--record-every")) cfg.record_every = staged.record_every;
    if (passed("--threads")) cfg.threads = staged.threads;
    if (passed("--plain-descent")) cfg.plain_descent = staged.plain_descent;
    if (passed("--early-stop")) cfg.early_stop = staged.early_stop;
    cfg.weights.validate();
    return cfg;
  }
};

ProgressFn make_progress(bool quiet, int record_every) {
  if (quiet) return {};
  const int stride = std::max(1, record_every * 10);
  return [stride](const HistoryEntry& entry) {
    if (entry.iteration % stride == 0)
      log_line("  iter " + std::to_string(entry.iteration) + "  loss " +
               format_double(entry.loss.total));
  };
}

void write_fit_outputs(const FitResult& result, const PointCloud& cloud,
                       const FitConfig& cfg, const fs::path& out,
                       const std::string& stem, int bins, bool mesh) {
  save_surface(result.surface, (out / (stem + ".surf")).string());
  save_loss_history_csv(result.history,
                        (out / (stem + "_history.csv")).string());
  const SnndReport report =
      evaluate_fit(result.surface, cloud, cfg.sample_nu, cfg.sample_nv, bins,
                   cfg.threads);
  save_snnd_values_csv(report, (out / (stem + "_snnd.csv")).string());
  save_snnd_histogram_csv(report,
                          (out / (stem + "_snnd_hist.csv")).string());
  if (mesh)
    save_quad_mesh(result.surface, (out / (stem + "_mesh.obj")).string(),
                   cfg.sample_nu, cfg.sample_nv);
  log_line("  " + stem + ": " + std::to_string(result.iterations) +
           " iterations, " + format_double(result.wall_seconds) +
           " s, final loss " +
           format_double(result.history.back().loss.total) + ", mean sNND " +
           format_double(report.mean_value));
}

int cmd_template(const TemplateFlags& tf, const std::string& out_dir,
                 bool mesh, int mesh_nu, int mesh_nv) {
  const fs::path out = prepare_out_dir(out_dir);
  const SplineSurface surface = make_template(tf.spec);
  save_surface(surface, (out / "template.surf").string());
  if (mesh)
    save_quad_mesh(surface, (out / "template_mesh.obj").string(), mesh_nu,
                   mesh_nv);
  log_line("wrote " + (out / "template.surf").string());
  return 0;
}

int cmd_synth(const TemplateFlags& tf, const std::string& out_dir,
              double closure, double amplitude, int count, double noise_sd,
              std::uint64_t seed, double annulus_band, bool mesh) {
  const fs::path out = prepare_out_dir(out_dir);
  SynthStage stage;
  stage.base = tf.spec;
  stage.closure = closure;
  stage.amplitude = amplitude;
  stage.seed = seed;
  const SplineSurface truth = synth_valve_surface(stage);
  save_surface(truth, (out / "synth_truth.surf").string());
  if (mesh)
    save_quad_mesh(truth, (out / "synth_truth_mesh.obj").string(), 40, 120);

  PointCloud cloud = sample_poisson_disk(truth, count, seed);
  if (annulus_band > 0.0) {
    // Points within the band of the annulus edge get the annulus label.
    const double u0 = truth.knots_axial.domain_min();
    const double v0 = truth.knots_circ.domain_min();
    const double period = truth.circ_period();
    const int ring_n = 720;
    std::vector<Vec3> ring(ring_n);
    for (int j = 0; j < ring_n; ++j)
      ring[j] = surface_point(truth, u0, v0 + period * j / ring_n);
    cloud.labels.assign(cloud.size(), PointLabel::unlabeled);
    const double band2 = annulus_band * annulus_band;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& r : ring)
        best = std::min(best, (cloud.points[i] - r).squaredNorm());
      if (best <= band2) cloud.labels[i] = PointLabel::annulus;
    }
  }
  if (noise_sd > 0.0) cloud = add_gaussian_noise(cloud, noise_sd, seed + 1);
  save_point_cloud(cloud, (out / "synth_cloud.csv").string());
  log_line("wrote " + std::to_string(cloud.size()) + " points to " +
           (out / "synth_cloud.csv").string());
  return 0;
}

int cmd_fit(const TemplateFlags& tf, const FitFlags& ff,
            const std::string& out_dir, const std::string& cloud_path,
            const std::string& template_path, bool no_prealign,
            bool dump_gradient, bool mesh, int bins, bool quiet) {
  const fs::path out = prepare_out_dir(out_dir);
  const PointCloud cloud = load_point_cloud(cloud_path);
  SplineSurface initial = template_path.empty() ? make_template(tf.spec)
                                                : load_surface(template_path);
  const FitConfig cfg = ff.build();
  if (!no_prealign) initial = affine_prealign(initial, cloud);
  if (dump_gradient) {
    const auto [loss, grad] = loss_gradient(initial, cloud, cfg.weights,
                                            cfg.sample_nu, cfg.sample_nv,
                                            cfg.threads);
    save_gradient_grid(grad, (out / "gradient_initial.txt").string());
    log_line("initial loss " + format_double(loss.total));
  }
  const FitResult result =
      fit_single(initial, cloud, cfg, make_progress(quiet, cfg.record_every));
  write_fit_outputs(result, cloud, cfg, out, "fitted", bins, mesh);
  if (result.status == FitStatus::failed_degenerate) {
    log_line("fit failed: " + result.message);
    return 1;
  }
  return 0;
}

int cmd_fit_sequence(const TemplateFlags& tf, const FitFlags& ff,
                     const std::string& out_dir,
                     const std::string& manifest_path,
                     const std::string& template_path, bool realign,
                     bool mesh, int bins, bool quiet) {
  const fs::path out = prepare_out_dir(out_dir);
  const FrameSequence frames = load_manifest(manifest_path);
  const SplineSurface tmpl = template_path.empty() ? make_template(tf.spec)
                                                   : load_surface(template_path);
  const FitConfig cfg = ff.build();
  const std::vector<FitResult> results = fit_sequence(
      tmpl, frames, cfg, realign, make_progress(quiet, cfg.record_every));

  std::vector<FrameSummary> summary;
  bool failed = false;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const std::string stem = safe_label(frames[i].label);
    write_fit_outputs(results[i], frames[i].cloud, cfg, out, stem, bins,
                      mesh);
    const SnndReport report =
        evaluate_fit(results[i].surface, frames[i].cloud, cfg.sample_nu,
                     cfg.sample_nv, bins, cfg.threads);
    summary.push_back({frames[i].label, report.min_value, report.max_value,
                       report.mean_value});
    if (results[i].status == FitStatus::failed_degenerate) {
      failed = true;
      log_line("frame '" + frames[i].label + "' failed: " +
               results[i].message);
    }
  }
  save_snnd_summary_csv(summary, (out / "sequence_summary.csv").string());
  if (results.size() < frames.size()) failed = true;
  return failed ? 1 : 0;
}

int cmd_evaluate(const std::string& out_dir, const std::string& cloud_path,
                 const std::string& surface_path, int n_u, int n_v, int bins,
                 int threads) {
  const fs::path out = prepare_out_dir(out_dir);
  const PointCloud cloud = load_point_cloud(cloud_path);
  const SplineSurface surface = load_surface(surface_path);
  const SnndReport report =
      evaluate_fit(surface, cloud, n_u, n_v, bins, threads);
  save_snnd_values_csv(report, (out / "snnd.csv").string());
  save_snnd_histogram_csv(report, (out / "snnd_hist.csv").string());
  log_line("sNND over " + std::to_string(report.values.size()) +
           " points: min " + format_double(report.min_value) + ", mean " +
           format_double(report.mean_value) + ", max " +
           format_double(report.max_value) + " (area " +
           format_double(report.area) + ")");
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"cuspfit: fits a deformable periodic B-spline valve surface "
               "to 3-D point clouds"};
  app.require_subcommand(1);

  std::string out_dir = default_out_dir();
  app.add_option("--out", out_dir,
                 "output directory (default: $CUSPFIT_OUT or '.')")
      ->capture_default_str();

  // template
  CLI::App* c_template =
      app.add_subcommand("template", "generate the valve template surface");
  TemplateFlags tf_template;
  tf_template.attach(c_template);
  bool template_mesh = false;
  int mesh_nu = 40, mesh_nv = 120;
  c_template->add_flag("--mesh", template_mesh, "also export a quad mesh");
  c_template->add_option("--mesh-nu", mesh_nu, "mesh axial samples")
      ->capture_default_str();
  c_template->add_option("--mesh-nv", mesh_nv, "mesh circumferential samples")
      ->capture_default_str();

  // synth
  CLI::App* c_synth = app.add_subcommand(
      "synth", "generate a synthetic valve surface and point cloud");
  TemplateFlags tf_synth;
  tf_synth.attach(c_synth);
  double closure = 0.6, amplitude = 5.0, noise_sd = 0.0, annulus_band = 0.0;
  int synth_count = 1500;
  std::uint64_t synth_seed = 1;
  bool synth_mesh = false;
  c_synth->add_option("--closure", closure, "closure state in [0,1]")
      ->capture_default_str();
  c_synth->add_option("--amplitude", amplitude, "peak leaflet displacement")
      ->capture_default_str();
  c_synth->add_option("--count", synth_count, "target point count")
      ->capture_default_str();
  c_synth->add_option("--noise", noise_sd, "Gaussian noise SD per coordinate")
      ->capture_default_str();
  c_synth->add_option("--seed", synth_seed, "sampling seed")
      ->capture_default_str();
  c_synth->add_option("--annulus-band", annulus_band,
                      "label points within this distance of the annulus edge")
      ->capture_default_str();
  c_synth->add_flag("--mesh", synth_mesh, "also export a quad mesh");

  // fit
  CLI::App* c_fit =
      app.add_subcommand("fit", "fit the template to one point cloud");
  TemplateFlags tf_fit;
  tf_fit.attach(c_fit);
  FitFlags ff_fit;
  ff_fit.attach(c_fit);
  std::string fit_cloud, fit_template;
  bool no_prealign = false, dump_gradient = false, fit_mesh = false,
       fit_quiet = false;
  int fit_bins = 20;
  c_fit->add_option("--cloud", fit_cloud, "point-cloud CSV")
      ->required()
      ->check(CLI::ExistingFile);
  c_fit->add_option("--template", fit_template,
                    "starting surface file (default: built-in template)")
      ->check(CLI::ExistingFile);
  c_fit->add_flag("--no-prealign", no_prealign,
                  "skip the similarity pre-alignment");
  c_fit->add_flag("--dump-gradient", dump_gradient,
                  "write the gradient at the starting surface");
  c_fit->add_flag("--mesh", fit_mesh, "also export a quad mesh");
  c_fit->add_flag("--quiet", fit_quiet, "suppress progress output");
  c_fit->add_option("--bins", fit_bins, "sNND histogram bins")
      ->capture_default_str();

  // fit-sequence
  CLI::App* c_seq = app.add_subcommand(
      "fit-sequence", "fit a cardiac-cycle sequence of point clouds");
  TemplateFlags tf_seq;
  tf_seq.attach(c_seq);
  FitFlags ff_seq;
  ff_seq.attach(c_seq);
  std::string seq_manifest, seq_template;
  bool realign = false, seq_mesh = false, seq_quiet = false;
  int seq_bins = 20;
  c_seq->add_option("--manifest", seq_manifest,
                    "frame manifest: '<label> <cloud-path>' per line")
      ->required()
      ->check(CLI::ExistingFile);
  c_seq->add_option("--template", seq_template,
                    "starting surface file (default: built-in template)")
      ->check(CLI::ExistingFile);
  c_seq->add_flag("--realign-each-frame", realign,
                  "re-run pre-alignment on every frame");
  c_seq->add_flag("--mesh", seq_mesh, "also export quad meshes");
  c_seq->add_flag("--quiet", seq_quiet, "suppress progress output");
  c_seq->add_option("--bins", seq_bins, "sNND histogram bins")
      ->capture_default_str();

  // evaluate
  CLI::App* c_eval = app.add_subcommand(
      "evaluate", "sNND report for an existing surface and cloud");
  std::string eval_cloud, eval_surface;
  int eval_nu = 40, eval_nv = 120, eval_bins = 20, eval_threads = 0;
  c_eval->add_option("--cloud", eval_cloud, "point-cloud CSV")
      ->required()
      ->check(CLI::ExistingFile);
  c_eval->add_option("--surface", eval_surface, "surface file")
      ->required()
      ->check(CLI::ExistingFile);
  c_eval->add_option("--nu", eval_nu, "axial sample stations")
      ->capture_default_str();
  c_eval->add_option("--nv", eval_nv, "circumferential sample stations")
      ->capture_default_str();
  c_eval->add_option("--bins", eval_bins, "histogram bins")
      ->capture_default_str();
  c_eval->add_option("--threads", eval_threads, "worker threads (0 = all)")
      ->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(c_template))
      return cmd_template(tf_template, out_dir, template_mesh, mesh_nu,
                          mesh_nv);
    if (app.got_subcommand(c_synth))
      return cmd_synth(tf_synth, out_dir, closure, amplitude, synth_count,
                       noise_sd, synth_seed, annulus_band, synth_mesh);
    if (app.got_subcommand(c_fit))
      return cmd_fit(tf_fit, ff_fit, out_dir, fit_cloud, fit_template,
                     no_prealign, dump_gradient, fit_mesh, fit_bins,
                     fit_quiet);
    if (app.got_subcommand(c_seq))
      return cmd_fit_sequence(tf_seq, ff_seq, out_dir, seq_manifest,
                              seq_template, realign, seq_mesh, seq_bins,
                              seq_quiet);
    if (app.got_subcommand(c_eval))
      return cmd_evaluate(out_dir, eval_cloud, eval_surface, eval_nu, eval_nv,
                          eval_bins, eval_threads);
  } catch (const ParseError& e) {
    log_line(std::string("error: ") + e.what());
    return 2;
  } catch (const IoError& e) {
    log_line(std::string("error: ") + e.what());
    return 2;
  } catch (const ArgumentError& e) {
    log_line(std::string("error: ") + e.what());
    return 2;
  } catch (const std::exception& e) {
    log_line(std::string("error: ") + e.what());
    return 1;
  }
  return 2;
}

}  // namespace cuspfit
