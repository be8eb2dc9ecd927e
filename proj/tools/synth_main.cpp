// Writes the synthetic subject: traces.jsonl and afs.json in the given directory.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cbr/error.hpp"
#include "cbr/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic recall subject"};
  std::string out_dir = ".";
  cbr::synthetic::SyntheticConfig cfg;
  app.add_option("--out-dir", out_dir, "Destination directory");
  app.add_option("--seed", cfg.seed, "Generator seed");
  app.add_option("--runs", cfg.runs, "Number of runs");
  app.add_option("--segments", cfg.segments_per_run, "Segments per run");
  CLI11_PARSE(app, argc, argv);

  const auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(out_dir + "/" + name, std::ios::binary);
    out << text;
    if (!out) {
      std::cerr << "cannot write " << out_dir << "/" << name << "\n";
      std::exit(1);
    }
  };
  write("traces.jsonl", cbr::collector::write_runs(cbr::synthetic::generate_runs(cfg)));
  write("afs.json", cbr::symex::write_af_json(cbr::synthetic::abstraction_functions()));
  return 0;
}
