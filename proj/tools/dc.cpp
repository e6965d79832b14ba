// Command-line frontend for the data-collaboration library. Talks to the
// core exclusively through the C API in datacollab.h.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "datacollab.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

int exit_code_for(dc_status status) {
  switch (status) {
    case DC_OK: return kExitOk;
    case DC_ERR_VALIDATION:
    case DC_ERR_DIMENSION:
    case DC_ERR_ARGUMENT: return kExitValidation;
    case DC_ERR_RANK:
    case DC_ERR_SINGULAR:
    case DC_ERR_NUMERICAL: return kExitNumerical;
    case DC_ERR_IO: return kExitIo;
  }
  return kExitNumerical;
}

struct CliError {
  int code;
  std::string message;
};

void check(dc_status status, const std::string& context) {
  if (status == DC_OK) return;
  throw CliError{exit_code_for(status),
                 context + ": " + dc_status_name(status) + ": " + dc_last_error()};
}

using MatrixPtr = std::unique_ptr<dc_matrix, decltype(&dc_matrix_free)>;
using ScenarioPtr = std::unique_ptr<dc_scenario, decltype(&dc_scenario_free)>;
using AlignmentPtr = std::unique_ptr<dc_alignment, decltype(&dc_alignment_free)>;

MatrixPtr own(dc_matrix* m) { return MatrixPtr(m, &dc_matrix_free); }

std::string take_string(char* s) {
  std::string out(s ? s : "");
  dc_string_free(s);
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw CliError{kExitIo, "cannot read " + path.string()};
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return text;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw CliError{kExitIo, "cannot write " + path.string()};
  os << text;
  if (!os) throw CliError{kExitIo, "write failed: " + path.string()};
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text << '\n';
  else
    write_file(out_path, text);
}

MatrixPtr load_matrix(const fs::path& path) {
  dc_matrix* m = nullptr;
  check(dc_matrix_read_dcm1(path.string().c_str(), &m), "reading " + path.string());
  return own(m);
}

void store_matrix(const dc_matrix* m, const fs::path& path, bool csv_mirror) {
  check(dc_matrix_write_dcm1(m, path.string().c_str()), "writing " + path.string());
  if (csv_mirror) {
    fs::path mirror = path;
    mirror.replace_extension(".csv");
    check(dc_matrix_write_csv(m, mirror.string().c_str()), "writing " + mirror.string());
  }
}

std::string user_dir_name(int64_t user) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "user_%03lld", static_cast<long long>(user));
  return buf;
}

// ---- gen ------------------------------------------------------------

int cmd_gen(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override, bool csv_mirror) {
  json spec = json::parse(read_file(config_path), nullptr, /*allow_exceptions=*/false);
  if (spec.is_discarded()) throw CliError{kExitValidation, "scenario config is not valid JSON"};
  if (seed_override) spec["seed"] = *seed_override;

  dc_scenario* raw = nullptr;
  check(dc_scenario_generate(spec.dump().c_str(), &raw), "generating scenario");
  ScenarioPtr scenario(raw, &dc_scenario_free);

  const fs::path root(out_dir);
  const fs::path private_dir = root / "private";
  const fs::path analyst_dir = root / "analyst";
  std::error_code ec;
  fs::create_directories(private_dir, ec);
  fs::create_directories(analyst_dir, ec);
  if (ec) throw CliError{kExitIo, "cannot create output directories under " + out_dir};

  char* spec_echo = nullptr;
  check(dc_scenario_spec_json(scenario.get(), &spec_echo), "serializing spec");
  write_file(root / "scenario.json", take_string(spec_echo) + "\n");

  {
    dc_matrix* anchor = nullptr;
    check(dc_scenario_anchor(scenario.get(), &anchor), "fetching anchor");
    store_matrix(anchor, root / "anchor.dcm1", csv_mirror);
    dc_matrix_free(anchor);
  }

  const int64_t users = dc_scenario_user_count(scenario.get());
  for (int64_t i = 0; i < users; ++i) {
    const fs::path user_private = private_dir / user_dir_name(i);
    const fs::path user_analyst = analyst_dir / user_dir_name(i);
    fs::create_directories(user_private, ec);
    fs::create_directories(user_analyst, ec);
    if (ec) throw CliError{kExitIo, "cannot create user directories"};

    dc_matrix* x = nullptr;
    dc_matrix* f = nullptr;
    dc_matrix* e = nullptr;
    check(dc_scenario_user_data(scenario.get(), i, &x), "fetching user data");
    check(dc_scenario_user_basis(scenario.get(), i, &f), "fetching secret basis");
    check(dc_scenario_user_mixing(scenario.get(), i, &e), "fetching mixing factor");
    store_matrix(x, user_private / "x.dcm1", csv_mirror);
    store_matrix(f, user_private / "f.dcm1", csv_mirror);
    store_matrix(e, user_private / "e.dcm1", csv_mirror);

    std::vector<int64_t> labels(static_cast<std::size_t>(dc_matrix_rows(x)));
    check(dc_scenario_user_labels(scenario.get(), i, labels.data()), "fetching labels");
    const json labels_json = labels;
    write_file(user_private / "labels.json", labels_json.dump() + "\n");
    write_file(user_analyst / "labels.json", labels_json.dump() + "\n");

    dc_matrix* x_tilde = nullptr;
    dc_matrix* a_proj = nullptr;
    check(dc_encode_user(scenario.get(), i, &x_tilde, &a_proj), "encoding user");
    store_matrix(x_tilde, user_analyst / "x_tilde.dcm1", csv_mirror);
    store_matrix(a_proj, user_analyst / "a_proj.dcm1", csv_mirror);

    dc_matrix_free(x_tilde);
    dc_matrix_free(a_proj);
    dc_matrix_free(x);
    dc_matrix_free(f);
    dc_matrix_free(e);
  }

  json summary;
  summary["out"] = out_dir;
  summary["users"] = users;
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

// ---- align ------------------------------------------------------------

fs::path analyst_root(const fs::path& in_dir) {
  if (fs::is_directory(in_dir / "analyst")) return in_dir / "analyst";
  return in_dir;
}

std::vector<MatrixPtr> load_bundle_anchors(const fs::path& in_dir) {
  const fs::path root = analyst_root(in_dir);
  std::vector<MatrixPtr> anchors;
  for (int64_t i = 0;; ++i) {
    const fs::path user_dir = root / user_dir_name(i);
    if (!fs::is_directory(user_dir)) {
      if (i == 0) throw CliError{kExitValidation, "no user bundles under " + root.string()};
      break;
    }
    const fs::path a_proj = user_dir / "a_proj.dcm1";
    if (!fs::exists(a_proj))
      throw CliError{kExitValidation,
                     "user " + std::to_string(i) + ": missing bundle file " + a_proj.string()};
    anchors.push_back(load_matrix(a_proj));
  }
  return anchors;
}

json write_alignment(const dc_alignment* alignment, const fs::path& dir, bool csv_mirror,
                     std::optional<std::uint64_t> target_seed) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError{kExitIo, "cannot create " + dir.string()};

  dc_method method;
  check(dc_alignment_method(alignment, &method), "alignment method");
  const char* method_name =
      method == DC_METHOD_IMAKURA ? "imakura" : (method == DC_METHOD_KAWAKAMI ? "kawakami" : "odc");

  const int64_t count = dc_alignment_count(alignment);
  json files = json::array();
  for (int64_t i = 0; i < count; ++i) {
    dc_matrix* g = nullptr;
    check(dc_alignment_matrix(alignment, i, &g), "fetching change-of-basis matrix");
    const std::string name = "g_" + user_dir_name(i).substr(5) + ".dcm1";
    store_matrix(g, dir / name, csv_mirror);
    files.push_back(name);
    dc_matrix_free(g);
  }

  double residual = 0.0;
  check(dc_alignment_anchor_residual(alignment, &residual), "alignment residual");
  char* notes_raw = nullptr;
  check(dc_alignment_notes_json(alignment, &notes_raw), "alignment notes");

  json manifest;
  manifest["method"] = method_name;
  manifest["users"] = count;
  manifest["anchor_residual"] = residual;
  manifest["notes"] = json::parse(take_string(notes_raw));
  manifest["files"] = files;
  if (target_seed) manifest["target_seed"] = *target_seed;

  dc_matrix* target = nullptr;
  if (dc_alignment_target(alignment, &target) == DC_OK) {
    store_matrix(target, dir / "target.dcm1", csv_mirror);
    manifest["target_file"] = "target.dcm1";
    dc_matrix_free(target);
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");

  json summary;
  summary["anchor_residual"] = residual;
  summary["dir"] = dir.string();
  return summary;
}

int cmd_align(const std::string& in_dir, const std::string& out_dir, const std::string& method,
              const std::string& target_matrix_path, std::optional<std::uint64_t> target_seed,
              bool csv_mirror) {
  const std::vector<MatrixPtr> anchors = load_bundle_anchors(in_dir);
  std::vector<const dc_matrix*> raw;
  raw.reserve(anchors.size());
  for (const MatrixPtr& a : anchors) raw.push_back(a.get());
  const auto count = static_cast<int64_t>(raw.size());

  MatrixPtr target(nullptr, &dc_matrix_free);
  if (!target_matrix_path.empty()) target = load_matrix(target_matrix_path);

  json summary;
  const bool all = method == "all";
  if (all || method == "imakura") {
    dc_alignment* a = nullptr;
    check(dc_align_imakura(raw.data(), count, target.get(), &a), "imakura alignment");
    AlignmentPtr alignment(a, &dc_alignment_free);
    summary["imakura"] =
        write_alignment(alignment.get(), fs::path(out_dir) / "imakura", csv_mirror, std::nullopt);
  }
  if (all || method == "kawakami") {
    dc_alignment* a = nullptr;
    check(dc_align_kawakami(raw.data(), count, &a), "kawakami alignment");
    AlignmentPtr alignment(a, &dc_alignment_free);
    summary["kawakami"] =
        write_alignment(alignment.get(), fs::path(out_dir) / "kawakami", csv_mirror, std::nullopt);
  }
  if (all || method == "odc") {
    dc_alignment* a = nullptr;
    const std::uint64_t seed = target_seed.value_or(0);
    check(dc_align_odc(raw.data(), count, target.get(), seed, &a), "odc alignment");
    AlignmentPtr alignment(a, &dc_alignment_free);
    std::optional<std::uint64_t> recorded_seed;
    if (!target) recorded_seed = seed;
    summary["odc"] =
        write_alignment(alignment.get(), fs::path(out_dir) / "odc", csv_mirror, recorded_seed);
  }
  if (summary.empty()) throw CliError{kExitValidation, "unknown method: " + method};
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

// ---- verify ------------------------------------------------------------

int cmd_verify(const std::string& gen_dir, const std::string& alignment_dir,
               const std::string& out_path) {
  const fs::path align_root(alignment_dir);
  const json manifest = json::parse(read_file(align_root / "manifest.json"));
  const std::string method_name = manifest.at("method").get<std::string>();
  const dc_method method = method_name == "imakura"
                               ? DC_METHOD_IMAKURA
                               : (method_name == "kawakami" ? DC_METHOD_KAWAKAMI : DC_METHOD_ODC);

  const int64_t users = manifest.at("users").get<int64_t>();
  std::vector<MatrixPtr> f, g;
  for (int64_t i = 0; i < users; ++i) {
    const fs::path f_path = fs::path(gen_dir) / "private" / user_dir_name(i) / "f.dcm1";
    if (!fs::exists(f_path))
      throw CliError{kExitValidation,
                     "user " + std::to_string(i) + ": missing secret basis " + f_path.string()};
    f.push_back(load_matrix(f_path));
    g.push_back(load_matrix(align_root / manifest.at("files").at(i).get<std::string>()));
  }

  MatrixPtr target(nullptr, &dc_matrix_free);
  if (manifest.contains("target_file") && method == DC_METHOD_ODC)
    target = load_matrix(align_root / manifest.at("target_file").get<std::string>());

  std::vector<const dc_matrix*> f_raw, g_raw;
  for (const MatrixPtr& m : f) f_raw.push_back(m.get());
  for (const MatrixPtr& m : g) g_raw.push_back(m.get());

  char* report_raw = nullptr;
  check(dc_concordance_report(f_raw.data(), g_raw.data(), users, method, target.get(),
                              &report_raw),
        "concordance report");
  const std::string report = take_string(report_raw);
  emit(report, out_path);
  return json::parse(report).at("satisfied").get<bool>() ? kExitOk : kExitValidation;
}

// ---- cost / bench / demo -------------------------------------------------

int cmd_cost(const std::string& config_path, const std::string& out_path) {
  char* report = nullptr;
  check(dc_cost_report(read_file(config_path).c_str(), &report), "cost report");
  emit(take_string(report), out_path);
  return kExitOk;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw CliError{kExitIo, "cannot create " + out_dir};
  char* csv = nullptr;
  char* meta = nullptr;
  check(dc_run_sweep(read_file(config_path).c_str(), &csv, &meta), "timing sweep");
  write_file(fs::path(out_dir) / "sweep.csv", take_string(csv));
  write_file(fs::path(out_dir) / "sweep_meta.json", take_string(meta) + "\n");
  std::cout << "wrote " << (fs::path(out_dir) / "sweep.csv").string() << '\n';
  return kExitOk;
}

int cmd_demo(const std::string& gen_dir, int64_t user, const std::string& out_path) {
  const fs::path root(gen_dir);
  MatrixPtr anchor = load_matrix(root / "anchor.dcm1");
  MatrixPtr a_proj = load_matrix(root / "analyst" / user_dir_name(user) / "a_proj.dcm1");
  MatrixPtr f_true = load_matrix(root / "private" / user_dir_name(user) / "f.dcm1");

  dc_matrix* recovered_raw = nullptr;
  check(dc_collude_reconstruct(anchor.get(), a_proj.get(), &recovered_raw),
        "collusion reconstruction");
  MatrixPtr recovered = own(recovered_raw);

  dc_matrix* diff_raw = nullptr;
  check(dc_matrix_sub(recovered.get(), f_true.get(), &diff_raw), "comparing bases");
  MatrixPtr diff = own(diff_raw);
  double err = 0.0, ref = 0.0;
  check(dc_matrix_frobenius(diff.get(), &err), "norm");
  check(dc_matrix_frobenius(f_true.get(), &ref), "norm");

  json report;
  report["user"] = user;
  report["recovery_error"] = ref > 0.0 ? err / ref : err;
  report["note"] =
      "a user colluding with the analyst recovers the secret basis from the raw anchor";
  emit(report.dump(2), out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-collaboration protocol toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Cap linear-algebra threads (0 = hardware default)");

  std::string config, out, in_dir, alignment_dir, method = "all", target_matrix;
  std::string format = "json";
  std::uint64_t seed = 0, target_seed = 0;
  bool have_seed = false, have_target_seed = false;
  int64_t user = 0;

  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic collaboration instance");
  gen->add_option("--config", config, "ScenarioSpec JSON")->required();
  gen->add_option("--out", out, "Output directory")->required();
  gen->add_option("--seed", seed, "Override the scenario seed")->each([&](const std::string&) {
    have_seed = true;
  });
  gen->add_option("--format", format, "json (DCM1 only) or csv (adds CSV mirrors)")
      ->check(CLI::IsMember({"json", "csv"}));

  CLI::App* align = app.add_subcommand("align", "Compute change-of-basis matrices");
  align->add_option("--in", in_dir, "gen output directory (or its analyst/ subdirectory)")
      ->required();
  align->add_option("--out", out, "Output directory")->required();
  align->add_option("--method", method, "imakura | kawakami | odc | all");
  align->add_option("--target-matrix", target_matrix, "DCM1 path for R (imakura) or O (odc)");
  align->add_option("--target-seed", target_seed, "Seed for a Haar-random ODC target")
      ->each([&](const std::string&) { have_target_seed = true; });
  align->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  CLI::App* verify = app.add_subcommand("verify", "Concordance report against hidden bases");
  verify->add_option("--in", in_dir, "gen output directory")->required();
  verify->add_option("--alignment", alignment_dir, "alignment method directory")->required();
  verify->add_option("--out", out, "Write the JSON report here instead of stdout");

  CLI::App* cost = app.add_subcommand("cost", "Analytic traffic/FLOP/memory/time report");
  cost->add_option("--config", config, "CostParams JSON")->required();
  cost->add_option("--out", out, "Write the JSON report here instead of stdout");

  CLI::App* bench = app.add_subcommand("bench", "Seeded timing sweep with median-of-repeats");
  bench->add_option("--config", config, "SweepSpec JSON")->required();
  bench->add_option("--out", out, "Output directory")->required();

  CLI::App* demo = app.add_subcommand("demo", "Collusion reconstruction demonstration");
  demo->add_option("--in", in_dir, "gen output directory")->required();
  demo->add_option("--user", user, "User index to attack");
  demo->add_option("--out", out, "Write the JSON report here instead of stdout");

  // Global flags like --threads may appear after the subcommand name.
  for (CLI::App* sub : {gen, align, verify, cost, bench, demo}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  if (threads > 0) dc_set_max_threads(threads);

  try {
    if (gen->parsed())
      return cmd_gen(config, out,
                     have_seed ? std::optional<std::uint64_t>(seed) : std::nullopt,
                     format == "csv");
    if (align->parsed())
      return cmd_align(in_dir, out, method, target_matrix,
                       have_target_seed ? std::optional<std::uint64_t>(target_seed) : std::nullopt,
                       format == "csv");
    if (verify->parsed()) return cmd_verify(in_dir, alignment_dir, out);
    if (cost->parsed()) return cmd_cost(config, out);
    if (bench->parsed()) return cmd_bench(config, out);
    if (demo->parsed()) return cmd_demo(in_dir, user, out);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}
