// Command-line front end: synthesize phantoms, denoise images/volumes,
// compute metrics, export partition maps, and run replicated benchmarks.
// Every run writes a JSON manifest with the fully resolved parameters;
// `ort --manifest FILE` replays a recorded run exactly.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ort/image_io.hpp"
#include "ort/metrics.hpp"
#include "ort/parallel.hpp"
#include "ort/smoother.hpp"
#include "ort/synth.hpp"
#include "ort/tensor_io.hpp"
#include "ort/tree.hpp"

using json = nlohmann::ordered_json;

namespace {

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    dims.push_back(std::stoi(part));
    if (dims.back() <= 0) throw CLI::ValidationError("--dims", "dims must be positive");
  }
  if (dims.empty()) throw CLI::ValidationError("--dims", "empty dims");
  return dims;
}

std::string dims_to_string(const std::vector<int>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(dims[i]);
  }
  return s;
}

struct CommonOpts {
  double sigma = -1.0;  // <0: estimate from input
  double r_n = 0.0;
  double h_n = 0.0;
  double kappa = 5.0;
  std::string estimator = "local_weighted";
  std::string patch_source = "pilot";
  int min_leaf = 4;
  int dirs = 0;
  int refine = 20;
  int max_leaves = 4096;
  double penalty = 3.0;
  std::uint64_t seed = 0;
  int threads = 0;
  int depth = 8;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--sigma", o.sigma, "Noise s.d.; estimated from the input when omitted");
  cmd->add_option("--r-n", o.r_n, "Splitting threshold (default 1e-4*sigma^2)");
  cmd->add_option("--h-n", o.h_n, "Neighborhood half-width in domain units (default 3/n)");
  cmd->add_option("--kappa", o.kappa, "Similarity scale kappa_n")->check(CLI::PositiveNumber);
  cmd->add_option("--estimator", o.estimator, "leaf_mean or local_weighted")
      ->check(CLI::IsMember({"leaf_mean", "local_weighted"}));
  cmd->add_option("--patch-source", o.patch_source,
                  "Patch intensities for similarity scores: pilot or raw")
      ->check(CLI::IsMember({"pilot", "raw"}));
  cmd->add_option("--min-leaf", o.min_leaf, "Minimum points per leaf")->check(CLI::PositiveNumber);
  cmd->add_option("--dirs", o.dirs, "Random oblique directions per node (0 = auto)");
  cmd->add_option("--refine", o.refine, "Direction refinement rounds");
  cmd->add_option("--max-leaves", o.max_leaves, "Leaf budget (0 = unbounded)");
  cmd->add_option("--penalty", o.penalty,
                  "Noise-adaptive split penalty coefficient (0 disables)");
  cmd->add_option("--seed", o.seed, "Seed for all per-run randomness");
  cmd->add_option("--threads", o.threads, "Worker thread cap (0 = hardware)");
  cmd->add_option("--depth", o.depth, "Output image bit depth")->check(CLI::IsMember({8, 16}));
}

ort::SmootherConfig to_config(const CommonOpts& o) {
  ort::SmootherConfig cfg;
  if (o.sigma >= 0.0) cfg.sigma = o.sigma;
  cfg.r_n = o.r_n;
  cfg.h_n = o.h_n;
  cfg.kappa_n = o.kappa;
  cfg.estimator =
      o.estimator == "leaf_mean" ? ort::EstimatorKind::leaf_mean : ort::EstimatorKind::local_weighted;
  cfg.patch_source = o.patch_source == "raw" ? ort::PatchSource::raw : ort::PatchSource::pilot;
  cfg.adaptive_split = o.penalty > 0.0;
  cfg.tree.min_leaf = o.min_leaf;
  cfg.tree.n_random_dirs = o.dirs;
  cfg.tree.refine_steps = o.refine;
  cfg.tree.max_leaves = o.max_leaves;
  cfg.tree.split_penalty = o.penalty;
  cfg.tree.seed = o.seed;
  return cfg;
}

json common_to_json(const CommonOpts& o) {
  return json{{"sigma", o.sigma},         {"r_n", o.r_n},
              {"h_n", o.h_n},             {"kappa", o.kappa},
              {"estimator", o.estimator}, {"patch_source", o.patch_source},
              {"min_leaf", o.min_leaf},   {"dirs", o.dirs},
              {"refine", o.refine},       {"max_leaves", o.max_leaves},
              {"penalty", o.penalty},     {"seed", o.seed},
              {"threads", o.threads},     {"depth", o.depth}};
}

void common_from_json(const json& j, CommonOpts& o) {
  o.sigma = j.value("sigma", o.sigma);
  o.r_n = j.value("r_n", o.r_n);
  o.h_n = j.value("h_n", o.h_n);
  o.kappa = j.value("kappa", o.kappa);
  o.estimator = j.value("estimator", o.estimator);
  o.patch_source = j.value("patch_source", o.patch_source);
  o.min_leaf = j.value("min_leaf", o.min_leaf);
  o.dirs = j.value("dirs", o.dirs);
  o.refine = j.value("refine", o.refine);
  o.max_leaves = j.value("max_leaves", o.max_leaves);
  o.penalty = j.value("penalty", o.penalty);
  o.seed = j.value("seed", o.seed);
  o.threads = j.value("threads", o.threads);
  o.depth = j.value("depth", o.depth);
}

void write_manifest(const json& manifest, const std::string& explicit_path,
                    const std::string& anchor_output) {
  std::string path = explicit_path;
  if (path.empty()) path = anchor_output + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw ort::io_error("cannot write manifest " + path);
  out << manifest.dump(2) << "\n";
}

ort::PiecewiseSpec resolve_spec(const std::string& preset, const std::string& spec_path) {
  if (!spec_path.empty()) return ort::load_spec(spec_path);
  if (preset == "triangle") return ort::triangle_spec();
  if (preset == "tetrahedron") return ort::tetrahedron_spec();
  throw CLI::ValidationError("--preset", "unknown preset '" + preset + "'");
}

void write_partition_map(const ort::LeafPartition& part, const std::vector<int>& dims,
                         const std::string& path) {
  // Leaf ids modulo 65536 as 16-bit grayscale; lossless for the default
  // 4096-leaf budget.
  std::vector<double> v(part.leaf_ids().size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = static_cast<double>(part.leaf_ids()[i] % 65536) / 65535.0;
  }
  ort::write_image(ort::LatticeField(dims, std::move(v)), path, 16);
}

// ---- subcommand payloads -------------------------------------------------

struct SynthArgs {
  std::string preset = "triangle";
  std::string spec_path;
  std::string dims = "100x100";
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string output;
  std::string truth_out;
  int depth = 8;
  std::string manifest_out;
};

int run_synth(const SynthArgs& a) {
  const auto spec = resolve_spec(a.preset, a.spec_path);
  const auto dims = parse_dims(a.dims);
  auto truth = ort::render(spec, dims);
  auto noisy = ort::add_noise(truth, {a.sigma, a.seed});
  ort::write_field(noisy, a.output, a.depth);
  if (!a.truth_out.empty()) ort::write_field(truth, a.truth_out, a.depth);

  json manifest{{"command", "synth"},
                {"preset", a.preset},
                {"spec", a.spec_path},
                {"dims", a.dims},
                {"sigma", a.sigma},
                {"seed", a.seed},
                {"output", a.output},
                {"truth_out", a.truth_out},
                {"depth", a.depth}};
  write_manifest(manifest, a.manifest_out, a.output);
  std::printf("synth: wrote %s (%s, sigma=%g, seed=%llu)\n", a.output.c_str(), a.dims.c_str(),
              a.sigma, static_cast<unsigned long long>(a.seed));
  return 0;
}

struct DenoiseArgs {
  std::string input;
  std::string output;
  CommonOpts opts;
  std::string partition_map;
  std::string split_log;
  std::string manifest_out;
};

int run_denoise(const DenoiseArgs& a) {
  ort::set_max_threads(a.opts.threads);
  auto field = ort::read_field(a.input);
  auto cfg = to_config(a.opts);
  auto result = ort::denoise(field, cfg);
  ort::write_field(result.estimate, a.output, a.opts.depth);
  if (!a.partition_map.empty()) {
    if (field.dim() != 2) throw ort::io_error("--partition-map requires a 2-D input");
    write_partition_map(result.partition, field.dims(), a.partition_map);
  }
  if (!a.split_log.empty()) {
    std::ofstream out(a.split_log);
    if (!out) throw ort::io_error("cannot write split log " + a.split_log);
    out << ort::format_split_log(result.partition);
  }

  json manifest{{"command", "denoise"},
                {"input", a.input},
                {"output", a.output},
                {"partition_map", a.partition_map},
                {"split_log", a.split_log},
                {"options", common_to_json(a.opts)},
                {"resolved",
                 {{"sigma", result.sigma},
                  {"r_n", result.r_n},
                  {"h_n", result.h_n},
                  {"leaf_count", result.partition.leaf_count()}}}};
  write_manifest(manifest, a.manifest_out, a.output);
  std::printf("denoise: %s -> %s (sigma=%.6g, r_n=%.6g, leaves=%d)\n", a.input.c_str(),
              a.output.c_str(), result.sigma, result.r_n, result.partition.leaf_count());
  return 0;
}

struct PartitionMapArgs {
  std::string input;
  std::string output;
  CommonOpts opts;
  std::string split_log;
  std::string manifest_out;
};

int run_partition_map(const PartitionMapArgs& a) {
  ort::set_max_threads(a.opts.threads);
  auto field = ort::read_field(a.input);
  if (field.dim() != 2) throw ort::io_error("partition-map requires a 2-D input");
  auto cfg = to_config(a.opts);
  auto result = ort::denoise(field, cfg);
  write_partition_map(result.partition, field.dims(), a.output);
  if (!a.split_log.empty()) {
    std::ofstream out(a.split_log);
    out << ort::format_split_log(result.partition);
  }
  json manifest{{"command", "partition-map"},
                {"input", a.input},
                {"output", a.output},
                {"split_log", a.split_log},
                {"options", common_to_json(a.opts)},
                {"resolved",
                 {{"sigma", result.sigma},
                  {"r_n", result.r_n},
                  {"leaf_count", result.partition.leaf_count()}}}};
  write_manifest(manifest, a.manifest_out, a.output);
  std::printf("partition-map: %s -> %s (leaves=%d)\n", a.input.c_str(), a.output.c_str(),
              result.partition.leaf_count());
  return 0;
}

struct MetricsArgs {
  std::string file_a;
  std::string file_b;
  bool do_remse = false;
  bool do_rmse = false;
  bool do_psnr = false;
  bool do_dkq = false;
  int edge_bandwidth = 2;
  double edge_threshold = -1.0;
  std::string scale = "domain";
  std::string manifest_out;
};

int run_metrics(const MetricsArgs& a) {
  auto fa = ort::read_field(a.file_a);
  auto fb = ort::read_field(a.file_b);
  const bool all = !(a.do_remse || a.do_rmse || a.do_psnr || a.do_dkq);
  json results;
  if (a.do_remse || all) {
    const double v = ort::remse(fa, fb);
    std::printf("remse %.17g\n", v);
    results["remse"] = v;
  }
  if (a.do_rmse || all) {
    const double v = ort::rmse(fa, fb);
    std::printf("rmse %.17g\n", v);
    results["rmse"] = v;
  }
  if (a.do_psnr || all) {
    const double v = ort::psnr(fa, fb);
    std::printf("psnr %.17g\n", v);
    results["psnr"] = v;
  }
  if (a.do_dkq || all) {
    auto ea = ort::detect_edges(fa, a.edge_bandwidth, a.edge_threshold);
    auto eb = ort::detect_edges(fb, a.edge_bandwidth, a.edge_threshold);
    double v = ort::d_kq(ea, eb);
    if (a.scale == "pixel") v *= static_cast<double>(std::max(fa.dims()[0], fa.dims()[1]));
    std::printf("d_kq %.17g\n", v);
    results["d_kq"] = v;
  }
  json manifest{{"command", "metrics"},
                {"a", a.file_a},
                {"b", a.file_b},
                {"edge_bandwidth", a.edge_bandwidth},
                {"edge_threshold", a.edge_threshold},
                {"scale", a.scale},
                {"results", results}};
  if (!a.manifest_out.empty()) write_manifest(manifest, a.manifest_out, "");
  return 0;
}

struct BenchArgs {
  std::string preset = "triangle";
  std::string spec_path;
  std::string dims_list = "200x200";
  std::string sigmas = "0.1,0.2,0.3";
  int replications = 5;
  bool edges = false;
  CommonOpts opts;
  std::string output;
  std::string manifest_out;
};

int run_bench(const BenchArgs& a) {
  ort::set_max_threads(a.opts.threads);
  const auto spec = resolve_spec(a.preset, a.spec_path);

  std::vector<std::vector<int>> dims_list;
  {
    std::stringstream ss(a.dims_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) dims_list.push_back(parse_dims(tok));
  }
  std::vector<double> sigmas;
  {
    std::stringstream ss(a.sigmas);
    std::string tok;
    while (std::getline(ss, tok, ',')) sigmas.push_back(std::stod(tok));
  }
  if (a.replications < 1) throw CLI::ValidationError("--replications", "must be >= 1");

  std::ostringstream table;
  table << "dims\tsigma\trep\tremse_x1e3\trmse_x1e3\tnoisy_rmse_x1e3\tpsnr_db\tleaves";
  if (a.edges) table << "\td_kq";
  table << "\n";

  char buf[256];
  for (const auto& dims : dims_list) {
    auto truth = ort::render(spec, dims);
    std::optional<ort::EdgeSet> truth_edges;
    if (a.edges && truth.dim() == 2) truth_edges = ort::detect_edges_auto(truth);
    for (double sigma : sigmas) {
      std::vector<double> remses, rmses, dkqs;
      for (int rep = 0; rep < a.replications; ++rep) {
        const std::uint64_t rep_seed = a.opts.seed + static_cast<std::uint64_t>(rep);
        auto noisy = ort::add_noise(truth, {sigma, rep_seed});
        CommonOpts o = a.opts;
        o.sigma = sigma;
        o.seed = rep_seed;
        auto cfg = to_config(o);
        auto result = ort::denoise(noisy, cfg);
        const double re = ort::remse(result.estimate, truth);
        const double rm = ort::rmse(result.estimate, truth);
        const double rn = ort::rmse(noisy, truth);
        const double ps = ort::psnr(result.estimate, truth);
        remses.push_back(re);
        rmses.push_back(rm);
        std::snprintf(buf, sizeof(buf), "%s\t%g\t%d\t%.4f\t%.4f\t%.4f\t%.3f\t%d",
                      dims_to_string(dims).c_str(), sigma, rep + 1, re * 1e3, rm * 1e3, rn * 1e3,
                      ps, result.partition.leaf_count());
        table << buf;
        if (a.edges && truth.dim() == 2) {
          auto est_edges = ort::detect_edges_auto(result.estimate);
          double dk = est_edges.empty() ? std::nan("") : ort::d_kq(est_edges, *truth_edges);
          dkqs.push_back(dk);
          std::snprintf(buf, sizeof(buf), "\t%.6f", dk);
          table << buf;
        }
        table << "\n";
      }
      auto mean_of = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
      };
      auto stderr_of = [&](const std::vector<double>& v) {
        if (v.size() < 2) return 0.0;
        const double m = mean_of(v);
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
      };
      std::snprintf(buf, sizeof(buf), "%s\t%g\tmean\t%.4f\t%.4f\t\t\t",
                    dims_to_string(dims).c_str(), sigma, mean_of(remses) * 1e3,
                    mean_of(rmses) * 1e3);
      table << buf;
      if (a.edges && !dkqs.empty()) {
        std::snprintf(buf, sizeof(buf), "\t%.6f", mean_of(dkqs));
        table << buf;
      }
      table << "\n";
      std::snprintf(buf, sizeof(buf), "%s\t%g\tstderr\t%.4f\t%.4f\t\t\t",
                    dims_to_string(dims).c_str(), sigma, stderr_of(remses) * 1e3,
                    stderr_of(rmses) * 1e3);
      table << buf;
      if (a.edges && !dkqs.empty()) {
        std::snprintf(buf, sizeof(buf), "\t%.6f", stderr_of(dkqs));
        table << buf;
      }
      table << "\n";
    }
  }

  std::fputs(table.str().c_str(), stdout);
  std::string anchor = "bench";
  if (!a.output.empty()) {
    std::ofstream out(a.output);
    if (!out) throw ort::io_error("cannot write report " + a.output);
    out << table.str();
    anchor = a.output;
  }
  json manifest{{"command", "bench"},      {"preset", a.preset},
                {"spec", a.spec_path},     {"dims_list", a.dims_list},
                {"sigmas", a.sigmas},      {"replications", a.replications},
                {"edges", a.edges},        {"output", a.output},
                {"options", common_to_json(a.opts)}};
  write_manifest(manifest, a.manifest_out, anchor);
  return 0;
}

// ---- manifest replay -------------------------------------------------------

int replay_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ort::io_error("cannot open manifest " + path);
  json m = json::parse(in);
  const std::string command = m.at("command");
  if (command == "synth") {
    SynthArgs a;
    a.preset = m.value("preset", a.preset);
    a.spec_path = m.value("spec", a.spec_path);
    a.dims = m.value("dims", a.dims);
    a.sigma = m.value("sigma", a.sigma);
    a.seed = m.value("seed", a.seed);
    a.output = m.at("output");
    a.truth_out = m.value("truth_out", a.truth_out);
    a.depth = m.value("depth", a.depth);
    return run_synth(a);
  }
  if (command == "denoise") {
    DenoiseArgs a;
    a.input = m.at("input");
    a.output = m.at("output");
    a.partition_map = m.value("partition_map", a.partition_map);
    a.split_log = m.value("split_log", a.split_log);
    common_from_json(m.at("options"), a.opts);
    return run_denoise(a);
  }
  if (command == "partition-map") {
    PartitionMapArgs a;
    a.input = m.at("input");
    a.output = m.at("output");
    a.split_log = m.value("split_log", a.split_log);
    common_from_json(m.at("options"), a.opts);
    return run_partition_map(a);
  }
  if (command == "metrics") {
    MetricsArgs a;
    a.file_a = m.at("a");
    a.file_b = m.at("b");
    a.edge_bandwidth = m.value("edge_bandwidth", a.edge_bandwidth);
    a.edge_threshold = m.value("edge_threshold", a.edge_threshold);
    a.scale = m.value("scale", a.scale);
    return run_metrics(a);
  }
  if (command == "bench") {
    BenchArgs a;
    a.preset = m.value("preset", a.preset);
    a.spec_path = m.value("spec", a.spec_path);
    a.dims_list = m.value("dims_list", a.dims_list);
    a.sigmas = m.value("sigmas", a.sigmas);
    a.replications = m.value("replications", a.replications);
    a.edges = m.value("edges", a.edges);
    a.output = m.value("output", a.output);
    common_from_json(m.at("options"), a.opts);
    return run_bench(a);
  }
  throw ort::io_error("manifest replay: unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jump-preserving denoising with oblique regression trees"};
  app.require_subcommand(0, 1);

  std::string replay_path;
  app.add_option("--manifest", replay_path, "Replay a recorded run manifest");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Render a phantom and add seeded noise");
  synth_cmd->add_option("--preset", synth.preset, "triangle or tetrahedron");
  synth_cmd->add_option("--spec", synth.spec_path, "Piecewise spec file (overrides --preset)");
  synth_cmd->add_option("--dims", synth.dims, "Grid size, e.g. 200x200 or 64x64x64");
  synth_cmd->add_option("--sigma", synth.sigma, "Noise s.d.")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--seed", synth.seed, "Noise seed");
  synth_cmd->add_option("-o,--output", synth.output, "Output file (.pgm/.png/.orft)")->required();
  synth_cmd->add_option("--truth-out", synth.truth_out, "Also write the noiseless field");
  synth_cmd->add_option("--depth", synth.depth, "Image bit depth")->check(CLI::IsMember({8, 16}));
  synth_cmd->add_option("--manifest-out", synth.manifest_out, "Manifest path override");

  DenoiseArgs denoise_args;
  auto* denoise_cmd = app.add_subcommand("denoise", "Run the tree + estimator pipeline");
  denoise_cmd->add_option("-i,--input", denoise_args.input, "Input image or tensor")->required();
  denoise_cmd->add_option("-o,--output", denoise_args.output, "Output file")->required();
  add_common(denoise_cmd, denoise_args.opts);
  denoise_cmd->add_option("--partition-map", denoise_args.partition_map,
                          "Write leaf ids as a 16-bit image");
  denoise_cmd->add_option("--split-log", denoise_args.split_log, "Write the split log");
  denoise_cmd->add_option("--manifest-out", denoise_args.manifest_out, "Manifest path override");

  PartitionMapArgs pm;
  auto* pm_cmd = app.add_subcommand("partition-map", "Grow the tree and export leaf ids");
  pm_cmd->add_option("-i,--input", pm.input, "Input image")->required();
  pm_cmd->add_option("-o,--output", pm.output, "Output 16-bit map image")->required();
  add_common(pm_cmd, pm.opts);
  pm_cmd->add_option("--split-log", pm.split_log, "Write the split log");
  pm_cmd->add_option("--manifest-out", pm.manifest_out, "Manifest path override");

  MetricsArgs metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Compare two fields");
  metrics_cmd->add_option("a", metrics.file_a, "First file (estimate)")->required();
  metrics_cmd->add_option("b", metrics.file_b, "Second file (truth)")->required();
  metrics_cmd->add_flag("--remse", metrics.do_remse, "Summed-error REMSE");
  metrics_cmd->add_flag("--rmse", metrics.do_rmse, "Per-pixel RMSE");
  metrics_cmd->add_flag("--psnr", metrics.do_psnr, "PSNR in dB");
  metrics_cmd->add_flag("--dkq", metrics.do_dkq, "Edge-set d_KQ (2-D only)");
  metrics_cmd->add_option("--edge-bandwidth", metrics.edge_bandwidth, "Edge detector window");
  metrics_cmd->add_option("--edge-threshold", metrics.edge_threshold,
                          "Gradient threshold (negative = auto)");
  metrics_cmd->add_option("--scale", metrics.scale, "d_KQ units: domain or pixel")
      ->check(CLI::IsMember({"domain", "pixel"}));
  metrics_cmd->add_option("--manifest-out", metrics.manifest_out, "Manifest path override");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Replicated noise/resolution protocol");
  bench_cmd->add_option("--preset", bench.preset, "triangle or tetrahedron");
  bench_cmd->add_option("--spec", bench.spec_path, "Piecewise spec file");
  bench_cmd->add_option("--dims-list", bench.dims_list, "Comma-separated grids");
  bench_cmd->add_option("--sigmas", bench.sigmas, "Comma-separated noise levels");
  bench_cmd->add_option("--replications", bench.replications, "Replications per cell");
  bench_cmd->add_flag("--edges", bench.edges, "Include d_KQ columns (2-D)");
  add_common(bench_cmd, bench.opts);
  bench_cmd->add_option("-o,--output", bench.output, "Report file (TSV)");
  bench_cmd->add_option("--manifest-out", bench.manifest_out, "Manifest path override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!replay_path.empty()) return replay_manifest(replay_path);
    if (synth_cmd->parsed()) return run_synth(synth);
    if (denoise_cmd->parsed()) return run_denoise(denoise_args);
    if (pm_cmd->parsed()) return run_partition_map(pm);
    if (metrics_cmd->parsed()) return run_metrics(metrics);
    if (bench_cmd->parsed()) return run_bench(bench);
    std::cerr << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ort: " << e.what() << "\n";
    return 1;
  }
}
