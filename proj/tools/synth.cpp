// Writes the bundled synthetic data sets and the reference NH4 load table.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "smoothbench/error.hpp"
#include "smoothbench/io.hpp"
#include "smoothbench/synthetic.hpp"

using namespace smoothbench;

int main(int argc, char** argv) {
  CLI::App app{"Generate the bundled synthetic surveillance data"};
  std::string dir = "data";
  std::size_t length = 60;
  std::uint64_t seed = 42;
  app.add_option("--out-dir", dir, "Output directory");
  app.add_option("--length", length, "Samples per site");
  app.add_option("--seed", seed, "Seed");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, auto&& fn) {
      std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
      if (!out) throw Error(ErrorKind::IoError, "cannot write " + name);
      fn(out);
    };
    SyntheticSite site;
    write("synthetic_site.csv", [&](std::ostream& o) {
      write_surveillance_csv(o, make_synthetic_site(site, length, seed));
    });
    write("synthetic_sites.csv", [&](std::ostream& o) {
      write_surveillance_csv(o, make_catchment_dataset(length, seed));
    });
    write("biomarker_reference.csv", [&](std::ostream& o) { write_biomarker_table(o, reference_nh4_loads()); });
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
