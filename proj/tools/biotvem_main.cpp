#include <CLI11.hpp>
#include <iostream>

#include "biotvem/mesh.hpp"
#include "biotvem/study.hpp"

using namespace biotvem;

namespace {

int cmd_run(const std::string& config_path) {
  StudyConfig cfg = StudyConfig::parse_file(config_path);
  StudyResult result = run_study(cfg);
  std::cout << format_eoc_table(result.table);
  for (size_t j = 0; j < result.levels.size(); ++j)
    std::cout << "level " << j << ": |div u_h| = " << result.levels[j].div_norm
              << ", |u_h|_1 = " << result.levels[j].u_h1_norm << "\n";
  if (!cfg.output_dir.empty())
    std::cout << "wrote " << cfg.output_dir << "/eoc.csv\n";
  return 0;
}

int cmd_gen_cube(int n, const std::string& out_path) {
  PolyMesh3 mesh = generate_cube_mesh(n);
  tag_boundaries(mesh, benchmark_boundary_rule());
  export_mesh_file(mesh, out_path);
  std::cout << "wrote " << out_path << " (" << mesh.num_vertices() << " vertices, "
            << mesh.num_faces() << " faces, " << mesh.num_cells() << " cells)\n";
  return 0;
}

int cmd_check(const std::string& path) {
  PolyMesh3 mesh = import_mesh_file(path);
  RegularityReport rep = check_regularity(mesh);
  int counts[4] = {0, 0, 0, 0};
  for (int f = 0; f < mesh.num_faces(); ++f)
    ++counts[static_cast<int>(mesh.face(f).tag)];
  std::cout << path << ": " << mesh.num_vertices() << " vertices, " << mesh.num_edges()
            << " edges, " << mesh.num_faces() << " faces, " << mesh.num_cells()
            << " cells\n"
            << "h = " << mesh.mesh_size() << ", inferred regularity rho = "
            << rep.inferred_rho << "\n"
            << "tags: interior " << counts[0] << ", dirichlet " << counts[1]
            << ", traction " << counts[2] << ", interface " << counts[3] << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual element solver for a bulk flow coupled to a poroelastic plate"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Run a convergence study from a config file");
  run->add_option("config", config_path, "Config file path")->required();

  CLI::App* mesh = app.add_subcommand("mesh", "Mesh utilities");
  mesh->require_subcommand(1);

  int n = 2;
  std::string out_path;
  CLI::App* gen = mesh->add_subcommand("gen-cube", "Generate a tagged n x n x n cube mesh");
  gen->add_option("--n", n, "Subdivisions per axis")->required();
  gen->add_option("--out", out_path, "Output mesh path")->required();

  std::string check_path;
  CLI::App* check = mesh->add_subcommand("check", "Validate a mesh file");
  check->add_option("mesh", check_path, "Mesh file path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (gen->parsed()) return cmd_gen_cube(n, out_path);
    if (check->parsed()) return cmd_check(check_path);
  } catch (const Error& e) {
    std::cerr << e.kind_name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal-error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
