// Command-line front end: validate, certify and render scene files.
//
//   hifs validate <scene>
//   hifs lipschitz <scene>
//   hifs render <scene> [--seed S] [--threads T] [--out-dir DIR]
//
// Exit codes: 0 success, 2 validation failure, 3 engine failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hifs/hifs.hpp"

namespace {

constexpr int exit_validation = 2;
constexpr int exit_engine = 3;

hifs::SceneConfig load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hifs::scene_error(path, "cannot read scene file");
  std::ostringstream text;
  text << in.rdbuf();
  return hifs::parse_scene(text.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hypercomplex iterated function systems"};
  app.require_subcommand(1);

  std::string scene_path;
  auto* validate = app.add_subcommand("validate", "Parse a scene and check that its families are contractive");
  validate->add_option("scene", scene_path, "Scene JSON file")->required();

  auto* lipschitz = app.add_subcommand("lipschitz", "Print Lipschitz constants and the invariant radius");
  lipschitz->add_option("scene", scene_path, "Scene JSON file")->required();

  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out_dir = ".";
  auto* render = app.add_subcommand("render", "Run the scene's engine and write its outputs");
  render->add_option("scene", scene_path, "Scene JSON file")->required();
  render->add_option("--seed", seed, "Override engine.seed");
  render->add_option("--threads", threads, "Override engine.threads")->check(CLI::PositiveNumber);
  render->add_option("--out-dir", out_dir, "Directory for outputs and report.json");

  CLI11_PARSE(app, argc, argv);

  hifs::SceneConfig scene;
  try {
    scene = load(scene_path);
    if (seed) scene.engine.seed = *seed;
    if (threads) scene.engine.threads = *threads;
    hifs::validate_scene(scene);
  } catch (const hifs::error& e) {
    std::cerr << "invalid scene: " << e.what() << "\n";
    return exit_validation;
  }

  try {
    if (*validate) {
      const auto schedule = hifs::build_schedule(scene);
      for (const auto* f : schedule.referenced()) f->require_contractive();
      std::cout << "ok: " << scene.algebra.name() << ", k = " << scene.k << ", D = " << scene.dim() << ", "
                << scene.families.size() << " famil" << (scene.families.size() == 1 ? "y" : "ies") << "\n";
      return 0;
    }
    if (*lipschitz) {
      std::cout << hifs::lipschitz_summary(hifs::build_schedule(scene)).dump(2) << "\n";
      return 0;
    }
  } catch (const hifs::error& e) {
    std::cerr << "invalid scene: " << e.what() << "\n";
    return exit_validation;
  }

  // render
  hifs::json report;
  try {
    report = hifs::run_scene(scene, out_dir);
  } catch (const hifs::scene_error& e) {
    std::cerr << "invalid scene: " << e.what() << "\n";
    return exit_validation;
  } catch (const hifs::not_contractive& e) {
    std::cerr << "invalid scene: " << e.what() << "\n";
    return exit_validation;
  } catch (const hifs::error& e) {
    std::cerr << "engine failure: " << e.what() << "\n";
    return exit_engine;
  }
  try {
    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / "report.json") << report.dump(2) << "\n";
  } catch (const std::exception& e) {
    std::cerr << "engine failure: " << e.what() << "\n";
    return exit_engine;
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}
