#include "biotvem/study.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "biotvem/surface.hpp"

namespace biotvem {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Config, "invalid numeric value '" + v + "' for " + key);
  }
}

} // namespace

StudyConfig StudyConfig::parse(std::istream& in) {
  StudyConfig cfg;
  std::string line;
  int lineno = 0;
  bool saw_levels = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Config,
                  "config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "mesh.family") {
      if (val != "cube" && val != "file")
        throw Error(ErrorKind::Config, "unknown mesh.family '" + val + "'");
      cfg.mesh_family = val;
    } else if (key == "mesh.levels") {
      cfg.levels.clear();
      std::istringstream ls(val);
      std::string item;
      while (std::getline(ls, item, ',')) {
        item = trim(item);
        if (!item.empty()) cfg.levels.push_back(item);
      }
      saw_levels = true;
    } else if (key == "params.rho_f") {
      cfg.params.rho_f = parse_double(val, key);
    } else if (key == "params.mu") {
      cfg.params.mu = parse_double(val, key);
    } else if (key == "params.gamma") {
      cfg.params.gamma = parse_double(val, key);
    } else if (key == "params.rho_p") {
      cfg.params.rho_p = parse_double(val, key);
    } else if (key == "params.D") {
      cfg.params.D = parse_double(val, key);
    } else if (key == "params.alpha") {
      cfg.params.alpha = parse_double(val, key);
    } else if (key == "params.c0") {
      cfg.params.c0 = parse_double(val, key);
    } else if (key == "params.kappa") {
      cfg.params.kappa = parse_double(val, key);
    } else if (key == "params.tau") {
      cfg.params.tau = parse_double(val, key);
    } else if (key == "solver.mode") {
      if (val == "monolithic")
        cfg.solver.mode = SolverConfig::Mode::Monolithic;
      else if (val == "fixed_point")
        cfg.solver.mode = SolverConfig::Mode::FixedPoint;
      else
        throw Error(ErrorKind::Config, "unknown solver.mode '" + val + "'");
    } else if (key == "solver.tol") {
      cfg.solver.fp_tol = parse_double(val, key);
    } else if (key == "solver.max_iterations") {
      cfg.solver.max_iterations = static_cast<int>(parse_double(val, key));
    } else if (key == "output.dir") {
      cfg.output_dir = val;
    } else {
      throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
    }
  }
  if (!saw_levels || cfg.levels.empty())
    throw Error(ErrorKind::Config, "config must set mesh.levels");
  cfg.params.validate();
  return cfg;
}

StudyConfig StudyConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config file " + path);
  return parse(in);
}

namespace {

PolyMesh3 load_level(const StudyConfig& cfg, const std::string& level) {
  if (cfg.mesh_family == "cube") {
    int n = 0;
    try {
      size_t pos = 0;
      n = std::stoi(level, &pos);
      if (pos != level.size()) throw std::invalid_argument(level);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "cube level must be an integer, got '" + level + "'");
    }
    if (n < 1) throw Error(ErrorKind::Config, "cube level must be positive");
    PolyMesh3 mesh = generate_cube_mesh(n);
    tag_boundaries(mesh, benchmark_boundary_rule());
    return mesh;
  }
  return import_mesh_file(level);  // tags are stored in the file
}

void write_fields(const std::string& path, const DofLayout& layout,
                  const SolutionFields& fields) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Config, "cannot write " + path);
  out << std::setprecision(17);
  out << "FIELDS u " << fields.u.size() << " p " << fields.p.size() << " phi "
      << fields.phi.size() << " w " << fields.w.size() << "\n";
  (void)layout;
  for (int i = 0; i < fields.full.size(); ++i) out << fields.full[i] << "\n";
}

} // namespace

StudyResult run_study(const StudyConfig& config) {
  StudyResult result;
  std::vector<ErrorReport> reports;
  if (!config.output_dir.empty())
    std::filesystem::create_directories(config.output_dir);

  for (size_t j = 0; j < config.levels.size(); ++j) {
    PolyMesh3 mesh = load_level(config, config.levels[j]);
    SurfaceExtraction ext = extract_surface(mesh);
    ElementSet elements = build_elements(mesh, ext.surface);
    ManufacturedCase mcase = benchmark_case(config.params);

    DofLayout layout = build_layout(mesh, ext.surface, ext.connector);
    set_boundary_values(layout, mesh, ext.surface, ext.connector, mcase);

    CoupledProblem prob;
    prob.mesh = &mesh;
    prob.surface = &ext.surface;
    prob.connector = &ext.connector;
    prob.elements = &elements;
    prob.params = config.params;
    prob.mcase = &mcase;

    BlockSystem system = assemble(prob, layout);
    SolutionFields fields = solve(system, config.solver);

    LevelResult lr;
    lr.report = compute_errors(prob, layout, fields);
    lr.div_norm = divergence_norm(mesh, elements, layout, fields);
    lr.u_h1_norm = velocity_h1_norm(mesh, elements, layout, fields);
    result.levels.push_back(lr);
    reports.push_back(lr.report);

    if (!config.output_dir.empty())
      write_fields(config.output_dir + "/fields_" + std::to_string(j) + ".vem", layout,
                   fields);
  }

  result.table = eoc(reports);
  if (!config.output_dir.empty()) {
    const std::string path = config.output_dir + "/eoc.csv";
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Config, "cannot write " + path);
    out << eoc_csv(result.table);
  }
  return result;
}

} // namespace biotvem
