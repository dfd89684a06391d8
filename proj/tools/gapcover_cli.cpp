// gapcover: cover / verify / project / random / batch

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gapcover/harness.hpp"

using namespace gapcover;

namespace {

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(Errc::parse, "cannot write '" + path + "'");
  out << text;
}

struct RunFlags {
  std::string input, output, csv, eps;
  std::uint64_t budget = 0;
  bool fail_fast = false, allow_skip = false, timing = false, corpus = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool batch) {
  cmd->add_option("--input", f.input, "instance JSON file ('-' for stdin)");
  cmd->add_option("--output", f.output, "report file (default stdout)");
  cmd->add_option("--eps", f.eps, "ellipsoid tolerance as a rational, e.g. 1/100");
  cmd->add_option("--budget", f.budget, "enumeration budget (points)");
  cmd->add_option("--csv", f.csv, "also write CSV rows to this file");
  cmd->add_flag("--fail-fast", f.fail_fast, "stop at the first failing instance");
  cmd->add_flag("--allow-skip", f.allow_skip, "budget overruns skip the instance instead of failing the run");
  cmd->add_flag("--timing", f.timing, "include wall-clock timings (reports are then not reproducible)");
  if (batch) cmd->add_flag("--corpus", f.corpus, "run the built-in 150-instance acceptance corpus");
}

int run(Mode mode, const RunFlags& f) {
  std::vector<InstanceSpec> specs;
  if (f.corpus) {
    specs = acceptance_corpus();
  } else {
    if (f.input.empty()) throw Error(Errc::parse, "--input is required");
    specs = parse_instances(read_file(f.input));
  }
  RunOptions opt;
  opt.mode = mode;
  if (!f.eps.empty()) {
    Rat e = parse_rat(f.eps);
    if (e <= 0 || e >= 1) throw Error(Errc::parse, "--eps must lie in (0, 1)");
    opt.eps = e;
  }
  if (f.budget) opt.budget = f.budget;
  opt.fail_fast = f.fail_fast;
  opt.allow_skip = f.allow_skip;
  BatchReport b = run_batch(specs, opt);
  write_out(f.output, batch_json(b, f.timing).dump(2) + "\n");
  if (!f.csv.empty()) write_out(f.csv, csv_header() + csv_rows(b, f.timing));
  for (const auto& o : b.outcomes)
    if (o.status != Status::certified && o.status != Status::not_run) {
      std::cerr << "instance " << o.index << ": " << to_string(o.status);
      if (o.error) std::cerr << " (" << (o.error->stage().empty() ? "" : o.error->stage() + ": ") << o.error->what() << ")";
      if (o.report && o.report->witness) {
        std::cerr << " witness";
        for (const auto& c : *o.report->witness) std::cerr << ' ' << c;
      }
      std::cerr << '\n';
    }
  return b.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cover the lattice points of a symmetric convex body by a certified GAP"};
  app.require_subcommand(1);

  RunFlags cover_f, verify_f, project_f, batch_f;
  add_run_flags(app.add_subcommand("cover", "compute and certify a GAP cover of each instance"), cover_f, false);
  add_run_flags(app.add_subcommand("verify", "check the GAP given in each instance"), verify_f, false);
  add_run_flags(app.add_subcommand("project", "cover, then check the projection chain for the instance's phi"),
                project_f, false);
  add_run_flags(app.add_subcommand("batch", "cover every instance of a list or of the built-in corpus"), batch_f,
                true);

  GenParams gen;
  std::string radius = "4", output;
  std::size_t count = 1;
  auto* random = app.add_subcommand("random", "write seeded random instances as JSON");
  random->add_option("--kind", gen.kind, "lattice-ball | random-vertices | random-ellipsoid")
      ->check(CLI::IsMember({"lattice-ball", "random-vertices", "random-ellipsoid"}));
  random->add_option("--dim", gen.dim, "dimension")->check(CLI::PositiveNumber);
  random->add_option("--seed", gen.seed, "seed of the first instance");
  random->add_option("--count", count, "number of instances (seeds seed, seed+1, ...)")->check(CLI::PositiveNumber);
  random->add_option("--entry-bound", gen.h, "entry bound of the random matrix");
  random->add_option("--radius", radius, "ball radius, rational");
  random->add_option("--points", gen.points, "random-vertices: number of points (default 2*dim)");
  random->add_option("--coord", gen.coord, "random-vertices: coordinate bound");
  random->add_option("--output", output, "file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (random->parsed()) {
      gen.radius = parse_rat(radius);
      Json out = Json::array();
      const std::uint64_t first = gen.seed;
      for (std::size_t i = 0; i < count; ++i) {
        gen.seed = first + i;
        out.push_back(instance_json(gen_random(gen)));
      }
      write_out(output, (count == 1 ? out[0] : out).dump(2) + "\n");
      return 0;
    }
    if (app.got_subcommand("cover")) return run(Mode::cover, cover_f);
    if (app.got_subcommand("verify")) return run(Mode::verify, verify_f);
    if (app.got_subcommand("project")) return run(Mode::project, project_f);
    return run(Mode::cover, batch_f);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::budget ? 3 : 2;
  }
}
